//! `stratagen` command line: generate, execute, check and dump-components.
//!
//! Every flag overrides the matching key of the `--config` TOML file. Errors
//! go to stderr as one JSON object `{"error": kind, "message": text}` and
//! the process exits non-zero.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stratagen::combinator::SuiteMode;
use stratagen::config::{ConfigError, RunConfig};
use stratagen::pipeline::{self, files, PipelineError};
use stratagen::providers::ProviderKind;

#[derive(Parser)]
#[command(name = "stratagen", version, about = "Type-directed k-wise test generation for web APIs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose, fill strata and write the test suite to the output directory.
    Generate(Opts),
    /// Run the suite against a service (or write the requests with --dry-run).
    Execute(Opts),
    /// Report k-wise coverage of the suite; exits 2 if anything is uncovered.
    Check(Opts),
    /// Print the component decomposition of each api.
    DumpComponents(Opts),
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// TOML file with defaults for every option below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Restrict to this api; repeatable.
    #[arg(long = "api")]
    apis: Vec<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
    /// Comma-separated, in priority order: random, static, mock, llm.
    #[arg(long, value_delimiter = ',')]
    providers: Option<Vec<ProviderKind>>,
    #[arg(long)]
    seed: Option<u64>,
    /// full or reduced.
    #[arg(long)]
    mode: Option<SuiteMode>,
    /// Maximum stratum size.
    #[arg(long)]
    cap: Option<usize>,
    /// Concurrent provider requests.
    #[arg(long)]
    parallelism: Option<usize>,
    #[arg(long)]
    static_table: Option<PathBuf>,
    /// Mock data file; repeatable.
    #[arg(long)]
    mock_data: Vec<PathBuf>,
    /// Directory of recorded LLM responses to replay.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Call the live model and record its responses into --fixtures.
    #[arg(long)]
    record: bool,
    #[arg(long)]
    llm_endpoint: Option<String>,
    #[arg(long)]
    llm_model: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    base_url: Option<String>,
    #[arg(long)]
    budget_secs: Option<u64>,
    /// Write requests to <out>/requests instead of sending them.
    #[arg(long)]
    dry_run: bool,
}

impl Opts {
    fn resolve(self) -> Result<RunConfig, ConfigError> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($src:ident => $($dst:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$src { c.$($dst).+ = v; })*
            };
        }
        set!(
            k => k, max_len => max_len, max_depth => max_depth, providers => providers,
            seed => seed, mode => mode, cap => cap, parallelism => parallelism,
            out => out, budget_secs => exec.budget_secs,
        );
        c.spec = self.spec.or(c.spec);
        c.static_table = self.static_table.or(c.static_table);
        c.llm.fixtures = self.fixtures.or(c.llm.fixtures);
        c.llm.endpoint = self.llm_endpoint.or(c.llm.endpoint);
        c.llm.model = self.llm_model.or(c.llm.model);
        c.exec.base_url = self.base_url.or(c.exec.base_url);
        if !self.apis.is_empty() {
            c.apis = self.apis;
        }
        if !self.mock_data.is_empty() {
            c.mock_data = self.mock_data;
        }
        c.llm.record |= self.record;
        c.exec.dry_run |= self.dry_run;
        Ok(c)
    }
}

fn run(cmd: Command) -> Result<ExitCode, PipelineError> {
    match cmd {
        Command::Generate(o) => {
            let cfg = o.resolve()?;
            let g = pipeline::run_generate(&cfg)?;
            for r in &g.runs {
                println!("{}: {} components, {} tests", r.api.name, r.decomposition.components.len(), r.tests.len());
            }
            println!("wrote {}", cfg.out.join(files::SUITE).display());
        }
        Command::Execute(o) => {
            let cfg = o.resolve()?;
            let report = pipeline::run_execute(&cfg)?;
            print!("{}", report.summary_table());
        }
        Command::Check(o) => {
            let cfg = o.resolve()?;
            let mut complete = true;
            for (api, r) in pipeline::run_check(&cfg)? {
                println!("{api}: {} of {} feasible {}-tuples covered", r.feasible - r.uncovered.len(), r.feasible, r.k);
                for u in &r.uncovered {
                    let parts: Vec<String> = u.assignments.iter().map(|(p, v)| format!("{p}={v}")).collect();
                    println!("  uncovered {}", parts.join(", "));
                }
                complete &= r.uncovered.is_empty();
            }
            if !complete {
                return Ok(ExitCode::from(2));
            }
        }
        Command::DumpComponents(o) => {
            let cfg = o.resolve()?;
            print!("{}", pipeline::dump_all(&cfg)?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", pipeline::error_record(&e));
            ExitCode::FAILURE
        }
    }
}
