//! Runs the toy service in the foreground: `stratagen-toy [ADDR]`.

fn main() {
    let addr = std::env::args().nth(1).unwrap_or_else(|| "127.0.0.1:8080".into());
    let svc = match stratagen_toy::ToyService::bind(&addr) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("cannot bind {addr}: {e}");
            std::process::exit(1);
        }
    };
    println!("listening on {}", svc.url());
    svc.join();
}
