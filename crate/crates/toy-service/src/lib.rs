//! A small HTTP service to run generated suites against.
//!
//! * `POST /measure` takes `{"pressure": int, "temperature": int}` and fails
//!   with 500 when pressure < 10 and temperature > 300.
//! * `POST /login` accepts any non-empty user.
//! * `GET`/`DELETE /persons/{id}` and `POST /persons` work on an in-memory
//!   store seeded with [`PEOPLE`].

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use serde_json::{json, Value as Json};
use tiny_http::{Header, Method, Response, Server};

/// Records the store starts with.
pub const PEOPLE: &str = include_str!("../data/people.json");
/// Spec describing the service's endpoints.
pub const SPEC: &str = include_str!("../data/toy.bsqapi");

#[derive(Default)]
struct State {
    people: Mutex<Vec<Json>>,
    error_hits: AtomicUsize,
    requests: AtomicUsize,
    hits: Mutex<BTreeMap<String, usize>>,
}

/// A running instance; stops when dropped.
pub struct ToyService {
    url: String,
    server: Arc<Server>,
    state: Arc<State>,
    worker: Option<JoinHandle<()>>,
}

impl ToyService {
    /// Starts on an ephemeral port on the loopback interface.
    pub fn spawn() -> std::io::Result<Self> {
        Self::bind("127.0.0.1:0")
    }

    pub fn bind(addr: &str) -> std::io::Result<Self> {
        let server = Arc::new(Server::http(addr).map_err(std::io::Error::other)?);
        let port = server
            .server_addr()
            .to_ip()
            .map(|a| a.port())
            .ok_or_else(|| std::io::Error::other("not an ip listener"))?;
        let state = Arc::new(State::default());
        *state.people.lock().unwrap() = serde_json::from_str(PEOPLE).expect("seed data");
        let (s, st) = (server.clone(), state.clone());
        let worker = std::thread::spawn(move || {
            for mut req in s.incoming_requests() {
                let mut body = String::new();
                let _ = req.as_reader().read_to_string(&mut body);
                let (status, reply) = handle(&st, req.method(), req.url(), &body);
                let header = Header::from_bytes("Content-Type", "application/json").expect("header");
                let _ = req.respond(
                    Response::from_string(reply.to_string())
                        .with_status_code(status)
                        .with_header(header),
                );
            }
        });
        Ok(ToyService {
            url: format!("http://127.0.0.1:{port}"),
            server,
            state,
            worker: Some(worker),
        })
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    /// Number of requests that reached the measure error branch.
    pub fn error_hits(&self) -> usize {
        self.state.error_hits.load(Ordering::SeqCst)
    }

    pub fn requests(&self) -> usize {
        self.state.requests.load(Ordering::SeqCst)
    }

    /// Requests per `"<METHOD> <route> <status>"` key.
    pub fn hits(&self) -> BTreeMap<String, usize> {
        self.state.hits.lock().unwrap().clone()
    }

    /// Blocks serving requests until the process exits.
    pub fn join(mut self) {
        if let Some(w) = self.worker.take() {
            let _ = w.join();
        }
    }
}

impl Drop for ToyService {
    fn drop(&mut self) {
        self.server.unblock();
        if let Some(w) = self.worker.take() {
            let _ = w.join();
        }
    }
}

fn handle(st: &State, method: &Method, url: &str, body: &str) -> (u16, Json) {
    st.requests.fetch_add(1, Ordering::SeqCst);
    let path = url.split('?').next().unwrap_or("");
    let parsed: Json = serde_json::from_str(body).unwrap_or(Json::Null);
    let (route, (status, reply)) = match (method, path) {
        (Method::Post, "/measure") => ("/measure", measure(st, &parsed)),
        (Method::Post, "/login") => ("/login", login(&parsed)),
        (Method::Post, "/persons") => ("/persons", create(st, &parsed)),
        (Method::Get, p) if p.starts_with("/persons/") => ("/persons/{id}", get(st, &p[9..])),
        (Method::Delete, p) if p.starts_with("/persons/") => ("/persons/{id}", delete(st, &p[9..])),
        _ => ("other", (404, json!({"error": "no such route"}))),
    };
    *st.hits
        .lock()
        .unwrap()
        .entry(format!("{method} {route} {status}"))
        .or_default() += 1;
    (status, reply)
}

fn measure(st: &State, body: &Json) -> (u16, Json) {
    let (Some(p), Some(t)) = (body["pressure"].as_i64(), body["temperature"].as_i64()) else {
        return (400, json!({"error": "pressure and temperature must be integers"}));
    };
    if p < 10 && t > 300 {
        st.error_hits.fetch_add(1, Ordering::SeqCst);
        return (500, json!({"error": "sensor fault"}));
    }
    (200, json!({"ok": true}))
}

fn login(body: &Json) -> (u16, Json) {
    match body["user"].as_str() {
        Some(u) if !u.is_empty() => (200, json!({"token": format!("token-{u}")})),
        _ => (401, json!({"error": "unauthorized"})),
    }
}

fn get(st: &State, id: &str) -> (u16, Json) {
    let people = st.people.lock().unwrap();
    match people.iter().find(|p| p["id"] == id) {
        Some(p) => (200, p.clone()),
        None => (404, json!({"error": "not found"})),
    }
}

fn create(st: &State, body: &Json) -> (u16, Json) {
    let p = &body["p"];
    if !p.is_object() || !p["id"].is_string() {
        return (400, json!({"error": "expected a person"}));
    }
    let mut people = st.people.lock().unwrap();
    if people.iter().any(|q| q["id"] == p["id"]) {
        return (409, json!({"error": "exists"}));
    }
    people.push(p.clone());
    (201, p.clone())
}

fn delete(st: &State, id: &str) -> (u16, Json) {
    let mut people = st.people.lock().unwrap();
    let before = people.len();
    people.retain(|p| p["id"] != id);
    if people.len() < before {
        (204, Json::Null)
    } else {
        (404, json!({"error": "not found"}))
    }
}
