//! End-to-end runs: parse, decompose, fill strata, combine, emit, execute.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::combinator::{coverage_check, gen_suite, CombinatorError, CoverageReport, TestCase};
use crate::config::{ConfigError, RunConfig};
use crate::decompose::{decompose_api, dump_components, Component, ComponentKind, DecomposeError, Decomposition};
use crate::providers::{
    ingest_mock_data, ChatClient, FixtureClient, LlmClient, ProviderError, ProviderKind, ProviderSet,
    RecordingClient, SeededRng, StaticTable,
};
use crate::runner::{execute, prepare_requests, ApiSuite, ExecConfig, RunReport, RunnerError};
use crate::spec::{parse_spec, ApiSig, ApiSpec, ParseError};
use crate::value::Value;

/// Filled components of each api.
type ApiComponents = Vec<(ApiSig, Vec<Component>)>;

/// Suites above this size trigger a warning suggesting reduced mode.
pub const LARGE_SUITE: usize = 10_000;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error(transparent)]
    Combinator(#[from] CombinatorError),
    #[error(transparent)]
    Runner(#[from] RunnerError),
    #[error("unknown api `{0}`")]
    UnknownApi(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl PipelineError {
    /// Short stable name of the failing stage, for machine-readable records.
    pub fn kind(&self) -> &'static str {
        match self {
            PipelineError::Config(_) => "config",
            PipelineError::Parse { .. } => "parse",
            PipelineError::Decompose(_) => "decompose",
            PipelineError::Provider(_) => "provider",
            PipelineError::Combinator(_) => "combinator",
            PipelineError::Runner(_) => "runner",
            PipelineError::UnknownApi(_) => "config",
            PipelineError::Io { .. } => "io",
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Everything generated for one api.
#[derive(Debug, Clone)]
pub struct ApiRun {
    pub api: ApiSig,
    pub decomposition: Decomposition,
    pub tests: Vec<TestCase>,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub spec: ApiSpec,
    pub runs: Vec<ApiRun>,
}

impl Generated {
    pub fn suites(&self) -> Vec<ApiSuite> {
        self.runs
            .iter()
            .map(|r| ApiSuite { api: r.api.name.clone(), tests: r.tests.clone() })
            .collect()
    }

    pub fn total_tests(&self) -> usize {
        self.runs.iter().map(|r| r.tests.len()).sum()
    }

    pub fn all_components(&self) -> Vec<Component> {
        self.runs.iter().flat_map(|r| r.decomposition.components.iter().cloned()).collect()
    }
}

pub fn load_spec(cfg: &RunConfig) -> Result<ApiSpec, PipelineError> {
    let path = cfg.spec.as_deref().ok_or_else(|| ConfigError::Invalid("no spec file given".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_spec(&text).map_err(|source| PipelineError::Parse { path: path.display().to_string(), source })
}

fn selected_apis<'a>(cfg: &RunConfig, spec: &'a ApiSpec) -> Result<Vec<&'a ApiSig>, PipelineError> {
    if cfg.apis.is_empty() {
        return Ok(spec.apis.iter().collect());
    }
    cfg.apis
        .iter()
        .map(|n| spec.api(n).ok_or_else(|| PipelineError::UnknownApi(n.clone())))
        .collect()
}

/// Builds the provider set described by `cfg`.
pub fn provider_set(cfg: &RunConfig) -> Result<ProviderSet, PipelineError> {
    let mut set = ProviderSet::new(cfg.providers.clone()).with_parallelism(cfg.parallelism);
    set.cap = cfg.cap;
    if let Some(p) = &cfg.static_table {
        set = set.with_static(StaticTable::load(p)?);
    }
    if !cfg.mock_data.is_empty() {
        set = set.with_mock(ingest_mock_data(&cfg.mock_data)?);
    }
    if cfg.providers.contains(&ProviderKind::Llm) {
        let client: Arc<dyn LlmClient> = match (&cfg.llm.fixtures, cfg.llm.record) {
            (Some(dir), false) => Arc::new(FixtureClient::new(dir)),
            (Some(dir), true) => Arc::new(RecordingClient::new(
                ChatClient::from_env(cfg.llm.endpoint.as_deref(), cfg.llm.model.as_deref())?,
                dir,
            )),
            (None, _) => Arc::new(ChatClient::from_env(cfg.llm.endpoint.as_deref(), cfg.llm.model.as_deref())?),
        };
        set = set.with_llm(client);
    }
    Ok(set)
}

/// Decomposition of every selected api, strata not yet filled.
pub fn decompose_all(cfg: &RunConfig, spec: &ApiSpec) -> Result<Vec<(ApiSig, Decomposition)>, PipelineError> {
    selected_apis(cfg, spec)?
        .into_iter()
        .map(|api| Ok((api.clone(), decompose_api(spec, api, &cfg.decomposition())?)))
        .collect()
}

/// Parses, decomposes, fills strata and combines, without touching disk
/// beyond reading inputs.
pub fn generate(cfg: &RunConfig) -> Result<Generated, PipelineError> {
    cfg.validate()?;
    let spec = load_spec(cfg)?;
    let providers = provider_set(cfg)?;
    let rng = SeededRng::new(cfg.seed);
    let mut runs = Vec::new();
    for (api, mut d) in decompose_all(cfg, &spec)? {
        crate::providers::fill_strata(&mut d.components, &providers, &rng, &spec, &api)?;
        let tests = gen_suite(&d.components, &cfg.suite())?;
        runs.push(ApiRun { api, decomposition: d, tests });
    }
    let g = Generated { spec, runs };
    if g.total_tests() > LARGE_SUITE {
        log::warn!(
            "{} tests generated; consider reduced mode or a smaller k",
            g.total_tests()
        );
    }
    Ok(g)
}

pub fn dump_all(cfg: &RunConfig) -> Result<String, PipelineError> {
    let spec = load_spec(cfg)?;
    let mut out = String::new();
    for (api, d) in decompose_all(cfg, &spec)? {
        out.push_str(&format!("# {}\n", api.signature()));
        out.push_str(&dump_components(&d.components));
    }
    Ok(out)
}

/// The strata file record for one component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumRecord {
    pub path: String,
    pub kind: String,
    pub refinements: Vec<String>,
    pub guards: Vec<String>,
    pub values: Vec<Value>,
    pub sources: Vec<crate::decompose::Source>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiStrata {
    pub api: String,
    pub components: Vec<StratumRecord>,
}

fn stratum_record(c: &Component) -> StratumRecord {
    StratumRecord {
        path: c.path.to_string(),
        kind: match &c.kind {
            ComponentKind::Primitive(k) => k.to_string(),
            ComponentKind::Length { .. } => "Length".into(),
            ComponentKind::Selector(_) => "Selector".into(),
        },
        refinements: c.refinements.iter().map(|r| r.to_string()).collect(),
        guards: c.guards.iter().map(|g| g.to_string()).collect(),
        values: c.values.clone(),
        sources: c.sources.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteFile {
    pub seed: u64,
    pub k: usize,
    pub apis: Vec<ApiSuite>,
}

/// Output file names inside the output directory.
pub mod files {
    pub const DECOMPOSITION: &str = "decomposition.txt";
    pub const STRATA: &str = "strata.json";
    pub const SUITE: &str = "suite.json";
    pub const CONFIG: &str = "config.json";
    pub const REPORT: &str = "report.json";
    pub const SUMMARY: &str = "summary.txt";
    pub const REQUESTS: &str = "requests";
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf, PipelineError> {
    let p = dir.join(name);
    std::fs::write(&p, text).map_err(|e| io_err(&p, e))?;
    Ok(p)
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Generates and writes the decomposition dump, strata, suite and the
/// resolved config to the output directory.
pub fn run_generate(cfg: &RunConfig) -> Result<Generated, PipelineError> {
    let g = generate(cfg)?;
    std::fs::create_dir_all(&cfg.out).map_err(|e| io_err(&cfg.out, e))?;
    let mut dump = String::new();
    for r in &g.runs {
        dump.push_str(&format!("# {}\n", r.api.signature()));
        dump.push_str(&dump_components(&r.decomposition.components));
    }
    write(&cfg.out, files::DECOMPOSITION, &dump)?;
    let strata: Vec<ApiStrata> = g
        .runs
        .iter()
        .map(|r| ApiStrata {
            api: r.api.name.clone(),
            components: r.decomposition.components.iter().map(stratum_record).collect(),
        })
        .collect();
    write(&cfg.out, files::STRATA, &pretty(&strata))?;
    let suite = SuiteFile { seed: cfg.seed, k: cfg.k, apis: g.suites() };
    write(&cfg.out, files::SUITE, &pretty(&suite))?;
    write(&cfg.out, files::CONFIG, &pretty(cfg))?;
    Ok(g)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_err(path, e))
}

/// The suite and filled components: read back from the output directory
/// when a previous `generate` left them there, generated inline otherwise.
fn suite_and_strata(cfg: &RunConfig) -> Result<(ApiSpec, Vec<ApiSuite>, ApiComponents), PipelineError> {
    let suite_path = cfg.out.join(files::SUITE);
    let strata_path = cfg.out.join(files::STRATA);
    if suite_path.exists() && strata_path.exists() {
        let spec = load_spec(cfg)?;
        let suite: SuiteFile = read_json(&suite_path)?;
        let strata: Vec<ApiStrata> = read_json(&strata_path)?;
        let mut comps = Vec::new();
        for (api, mut d) in decompose_all(cfg, &spec)? {
            if let Some(s) = strata.iter().find(|s| s.api == api.name) {
                for c in &mut d.components {
                    if let Some(rec) = s.components.iter().find(|r| r.path == c.path.as_str()) {
                        c.values = rec.values.clone();
                        c.sources = rec.sources.clone();
                    }
                }
            }
            comps.push((api, d.components));
        }
        return Ok((spec, suite.apis, comps));
    }
    let g = generate(cfg)?;
    let suites = g.suites();
    let comps = g.runs.iter().map(|r| (r.api.clone(), r.decomposition.components.clone())).collect();
    Ok((g.spec, suites, comps))
}

/// Executes the suite against `cfg.exec.base_url` (or writes request files
/// in dry-run mode) and stores the report.
pub fn run_execute(cfg: &RunConfig) -> Result<RunReport, PipelineError> {
    cfg.validate()?;
    let (spec, suites, comps) = suite_and_strata(cfg)?;
    let flat: Vec<Component> = comps.into_iter().flat_map(|(_, c)| c).collect();
    let requests = prepare_requests(&spec, &suites, cfg.decomposition(), &flat)?;
    let base = match (&cfg.exec.base_url, cfg.exec.dry_run) {
        (Some(b), _) => b.clone(),
        (None, true) => String::new(),
        (None, false) => return Err(ConfigError::Invalid("execute needs a base url or dry-run".into()).into()),
    };
    let mut exec = ExecConfig::new(&base, Duration::from_secs(cfg.exec.budget_secs));
    if cfg.exec.dry_run {
        exec.dry_run = Some(cfg.out.join(files::REQUESTS));
    }
    let report = execute(&requests, &exec)?;
    std::fs::create_dir_all(&cfg.out).map_err(|e| io_err(&cfg.out, e))?;
    write(&cfg.out, files::REPORT, &pretty(&report))?;
    write(&cfg.out, files::SUMMARY, &report.summary_table())?;
    write(&cfg.out, files::CONFIG, &pretty(cfg))?;
    Ok(report)
}

/// Coverage of the suite per api. Apis with fewer components than `k` are
/// checked at their component count, as in generation.
pub fn run_check(cfg: &RunConfig) -> Result<Vec<(String, CoverageReport)>, PipelineError> {
    cfg.validate()?;
    let (_, suites, comps) = suite_and_strata(cfg)?;
    Ok(comps
        .into_iter()
        .map(|(api, components)| {
            let empty = Vec::new();
            let tests = suites.iter().find(|s| s.api == api.name).map_or(&empty, |s| &s.tests);
            // Judge each suite by the k it was generated with, after clamping.
            (api.name.clone(), coverage_check(tests, &components, cfg.k.min(components.len())))
        })
        .collect())
}

/// Machine-readable error record.
pub fn error_record(e: &PipelineError) -> Json {
    json!({"error": e.kind(), "message": e.to_string()})
}
