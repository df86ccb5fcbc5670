//! Request construction and suite execution against a live endpoint.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value as Json};
use thiserror::Error;

use crate::combinator::TestCase;
use crate::decompose::{Component, DecompositionConfig};
use crate::emit::{EmitError, Reconstructor, TypedValue};
use crate::spec::{ApiSig, ApiSpec, Verb};

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("suite names unknown api `{0}`")]
    UnknownApi(String),
    #[error("{api}: {source}")]
    Emit { api: String, source: EmitError },
    #[error("cannot write request file {path}: {message}")]
    DryRunWrite { path: String, message: String },
}

/// Tests generated for one api.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiSuite {
    pub api: String,
    pub tests: Vec<TestCase>,
}

fn verb_rank(v: Verb) -> u8 {
    match v {
        Verb::Auth => 0,
        Verb::Get => 1,
        Verb::Post | Verb::Put => 2,
        Verb::Delete => 3,
    }
}

/// Everything but unreserved characters is escaped in a route segment.
const PATH_SEGMENT: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

/// Authentication first, then reads, then writes, then deletes. Ties keep
/// declaration order.
pub fn order_endpoints(apis: &[ApiSig]) -> Vec<&ApiSig> {
    let mut out: Vec<&ApiSig> = apis.iter().collect();
    out.sort_by_key(|a| verb_rank(a.effective_verb()));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub api: String,
    pub verb: Verb,
    /// Path with route parameters substituted, plus the query string.
    pub route: String,
    pub body: Option<Json>,
    /// Compact wire form of all arguments, for the report.
    pub input: String,
}

impl Request {
    pub fn method(&self) -> &'static str {
        self.verb.http_method()
    }
}

/// Route parameters (`{name}` in the route) are substituted into the path.
/// GET and DELETE carry the remaining arguments as query parameters; other
/// verbs send them as one JSON object keyed by parameter name.
pub fn build_request(api: &ApiSig, args: &[(String, TypedValue)]) -> Request {
    let verb = api.effective_verb();
    let mut route = api.effective_route();
    let mut rest: Vec<(&str, Json)> = Vec::new();
    let mut input = Map::new();
    for (name, v) in args {
        let json = v.to_json();
        input.insert(name.clone(), json.clone());
        let placeholder = format!("{{{name}}}");
        if route.contains(&placeholder) {
            let text = plain_text(&json);
            route = route.replace(&placeholder, &utf8_percent_encode(&text, PATH_SEGMENT).to_string());
        } else {
            rest.push((name, json));
        }
    }
    let body = match verb {
        Verb::Get | Verb::Delete => {
            if !rest.is_empty() {
                let mut q = form_urlencoded::Serializer::new(String::new());
                for (name, json) in &rest {
                    q.append_pair(name, &plain_text(json));
                }
                route = format!("{route}?{}", q.finish());
            }
            None
        }
        _ => Some(Json::Object(rest.into_iter().map(|(k, v)| (k.to_string(), v)).collect())),
    };
    Request {
        api: api.name.clone(),
        verb,
        route,
        body,
        input: Json::Object(input).to_string(),
    }
}

fn plain_text(json: &Json) -> String {
    match json {
        Json::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Reconstructs every test and lays the requests out in execution order:
/// apis by [`order_endpoints`], tests in generation order within an api.
pub fn prepare_requests(
    spec: &ApiSpec,
    suites: &[ApiSuite],
    cfg: DecompositionConfig,
    strata: &[Component],
) -> Result<Vec<Request>, RunnerError> {
    for s in suites {
        if spec.api(&s.api).is_none() {
            return Err(RunnerError::UnknownApi(s.api.clone()));
        }
    }
    let rec = Reconstructor::new(spec, cfg, strata);
    let mut out = Vec::new();
    for api in order_endpoints(&spec.apis) {
        for s in suites.iter().filter(|s| s.api == api.name) {
            for t in &s.tests {
                let args = rec
                    .reconstruct_params(t, api)
                    .map_err(|source| RunnerError::Emit { api: api.name.clone(), source })?;
                out.push(build_request(api, &args));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ExecConfig {
    pub base_url: String,
    pub budget: Duration,
    /// When set, requests are written here instead of sent.
    pub dry_run: Option<PathBuf>,
    pub timeout: Duration,
}

impl ExecConfig {
    pub fn new(base_url: &str, budget: Duration) -> Self {
        ExecConfig {
            base_url: base_url.trim_end_matches('/').to_string(),
            budget,
            dry_run: None,
            timeout: Duration::from_secs(10),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub api: String,
    pub verb: Verb,
    pub route: String,
    pub input: String,
    pub status: Option<u16>,
    pub latency_ms: u64,
    pub error: Option<String>,
    /// Response body, truncated.
    pub response: Option<String>,
}

impl RunEntry {
    pub fn status_class(&self) -> String {
        match self.status {
            Some(s) => format!("{}xx", s / 100),
            None if self.error.is_some() => "transport".into(),
            None => "dry-run".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunSummary {
    pub planned: usize,
    pub executed: usize,
    pub by_class: BTreeMap<String, usize>,
    pub auth_failed: bool,
    pub budget_exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunReport {
    pub entries: Vec<RunEntry>,
    pub summary: RunSummary,
}

impl RunReport {
    /// Human-readable tally by status class.
    pub fn summary_table(&self) -> String {
        let s = &self.summary;
        let mut out = format!("executed {} of {} requests\n", s.executed, s.planned);
        out.push_str("class      count\n");
        for (class, n) in &s.by_class {
            out.push_str(&format!("{class:<10} {n}\n"));
        }
        if s.auth_failed {
            out.push_str("warning: an authentication call failed; later calls ran unauthenticated\n");
        }
        if s.budget_exhausted {
            out.push_str("time budget exhausted before the suite finished\n");
        }
        out
    }
}

const RESPONSE_LIMIT: usize = 512;

/// Sends (or, in dry-run mode, writes) requests in order until the wall
/// clock budget runs out. Transport failures are recorded, never fatal.
pub fn execute(requests: &[Request], cfg: &ExecConfig) -> Result<RunReport, RunnerError> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(Some(cfg.timeout))
        .build()
        .into();
    if let Some(dir) = &cfg.dry_run {
        std::fs::create_dir_all(dir).map_err(|e| RunnerError::DryRunWrite {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?;
    }
    let start = Instant::now();
    let mut report = RunReport::default();
    report.summary.planned = requests.len();
    for (i, req) in requests.iter().enumerate() {
        if start.elapsed() >= cfg.budget {
            report.summary.budget_exhausted = true;
            break;
        }
        let entry = match &cfg.dry_run {
            Some(dir) => {
                let path = dir.join(format!("{:05}-{}.json", i + 1, req.api));
                let record = serde_json::json!({
                    "verb": req.verb,
                    "method": req.method(),
                    "route": req.route,
                    "body": req.body,
                });
                std::fs::write(&path, serde_json::to_string_pretty(&record).expect("json")).map_err(|e| {
                    RunnerError::DryRunWrite { path: path.display().to_string(), message: e.to_string() }
                })?;
                entry_for(req, None, 0, None, None)
            }
            None => send(&agent, &cfg.base_url, req),
        };
        if req.verb == Verb::Auth && !matches!(entry.status, Some(s) if s < 400) && cfg.dry_run.is_none() {
            report.summary.auth_failed = true;
        }
        *report.summary.by_class.entry(entry.status_class()).or_default() += 1;
        report.entries.push(entry);
    }
    report.summary.executed = report.entries.len();
    Ok(report)
}

fn entry_for(req: &Request, status: Option<u16>, latency_ms: u64, error: Option<String>, response: Option<String>) -> RunEntry {
    RunEntry {
        api: req.api.clone(),
        verb: req.verb,
        route: req.route.clone(),
        input: req.input.clone(),
        status,
        latency_ms,
        error,
        response,
    }
}

fn send(agent: &ureq::Agent, base: &str, req: &Request) -> RunEntry {
    let url = format!("{base}{}", req.route);
    let t0 = Instant::now();
    let result = match (req.method(), &req.body) {
        ("GET", _) => agent.get(&url).call(),
        ("DELETE", _) => agent.delete(&url).call(),
        ("PUT", Some(b)) => agent.put(&url).send_json(b),
        (_, Some(b)) => agent.post(&url).send_json(b),
        (_, None) => agent.post(&url).send_empty(),
    };
    let latency = t0.elapsed().as_millis() as u64;
    match result {
        Ok(mut resp) => {
            let status = resp.status().as_u16();
            let mut text = resp.body_mut().read_to_string().unwrap_or_default();
            if text.len() > RESPONSE_LIMIT {
                let cut = (0..=RESPONSE_LIMIT).rev().find(|&i| text.is_char_boundary(i)).unwrap_or(0);
                text.truncate(cut);
            }
            entry_for(req, Some(status), latency, None, Some(text))
        }
        Err(e) => entry_for(req, None, latency, Some(e.to_string()), None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_spec;
    use crate::value::Value;

    #[test]
    fn endpoint_order() {
        let spec = parse_spec(
            "@route POST /c\napi create(x: Int): Bool;\n@route GET /l\napi list(): Bool;\n\
             @route AUTH /login\napi login(u: String): Bool;\n@route DELETE /r\napi remove(x: Int): Bool;\n\
             @route PUT /u\napi update(x: Int): Bool;",
        )
        .unwrap();
        let names: Vec<&str> = order_endpoints(&spec.apis).iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, ["login", "list", "create", "update", "remove"]);
        assert!(order_endpoints(&[]).is_empty());
    }

    #[test]
    fn request_shapes() {
        let spec = parse_spec(
            "@route GET /persons/{id}\napi getPerson(id: String, verbose: Bool): Bool;\napi measure(p: Int, t: Int): Bool;",
        )
        .unwrap();
        let args = vec![
            ("id".to_string(), TypedValue::Prim(Value::Str("a b".into()))),
            ("verbose".to_string(), TypedValue::Prim(Value::Bool(true))),
        ];
        let r = build_request(&spec.apis[0], &args);
        assert_eq!(r.route, "/persons/a%20b?verbose=true");
        assert_eq!(r.body, None);
        let args = vec![
            ("p".to_string(), TypedValue::Prim(Value::Int(0))),
            ("t".to_string(), TypedValue::Prim(Value::Int(400))),
        ];
        let r = build_request(&spec.apis[1], &args);
        assert_eq!(r.method(), "POST");
        assert_eq!(r.route, "/measure");
        assert_eq!(r.body.unwrap().to_string(), r#"{"p":0,"t":400}"#);
    }

    #[test]
    fn zero_budget_runs_nothing() {
        let spec = parse_spec("api ping(x: Int): Bool;").unwrap();
        let args = vec![("x".to_string(), TypedValue::Prim(Value::Int(1)))];
        let reqs = vec![build_request(&spec.apis[0], &args)];
        let report = execute(&reqs, &ExecConfig::new("http://127.0.0.1:9", Duration::ZERO)).unwrap();
        assert!(report.entries.is_empty());
        assert!(report.summary.budget_exhausted);
        assert_eq!(report.summary.planned, 1);
    }

    #[test]
    fn unreachable_is_recorded() {
        let spec = parse_spec("@route AUTH /login\napi login(x: Int): Bool;").unwrap();
        let args = vec![("x".to_string(), TypedValue::Prim(Value::Int(1)))];
        let reqs = vec![build_request(&spec.apis[0], &args); 2];
        let report = execute(&reqs, &ExecConfig::new("http://127.0.0.1:9", Duration::from_secs(30))).unwrap();
        assert_eq!(report.entries.len(), 2);
        assert_eq!(report.summary.by_class["transport"], 2);
        assert!(report.summary.auth_failed);
    }
}
