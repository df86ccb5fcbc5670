//! LLM-backed value generation: clients, fixture replay and response parsing.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde_json::{json, Value as Json};
use sha2::{Digest, Sha256};

use super::{PromptContext, ProviderError};
use crate::decompose::Component;
use crate::value::Value;

/// Sampling temperatures for the first attempt and each retry.
const TEMPERATURES: [f64; 3] = [0.2, 0.7, 1.0];

pub trait LlmClient: Send + Sync {
    fn complete(&self, prompt: &str, temperature: f64) -> Result<String, ProviderError>;
}

/// Chat-completion client over HTTP.
pub struct ChatClient {
    endpoint: String,
    model: String,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl ChatClient {
    pub fn new(endpoint: &str, model: &str, api_key: Option<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(120)))
            .build()
            .into();
        ChatClient {
            endpoint: endpoint.to_string(),
            model: model.to_string(),
            api_key,
            agent,
        }
    }

    /// Reads `LLM_ENDPOINT`, `LLM_MODEL` and (optionally) `LLM_API_KEY`.
    /// Explicit arguments win over the environment.
    pub fn from_env(endpoint: Option<&str>, model: Option<&str>) -> Result<Self, ProviderError> {
        let var = |k: &str| std::env::var(k).ok().filter(|s| !s.is_empty());
        let endpoint = endpoint
            .map(str::to_string)
            .or_else(|| var("LLM_ENDPOINT"))
            .ok_or(ProviderError::MissingResource(super::ProviderKind::Llm))?;
        let model = model
            .map(str::to_string)
            .or_else(|| var("LLM_MODEL"))
            .ok_or(ProviderError::MissingResource(super::ProviderKind::Llm))?;
        Ok(ChatClient::new(&endpoint, &model, var("LLM_API_KEY")))
    }
}

impl LlmClient for ChatClient {
    fn complete(&self, prompt: &str, temperature: f64) -> Result<String, ProviderError> {
        let body = json!({
            "model": self.model,
            "temperature": temperature,
            "messages": [{"role": "user", "content": prompt}],
        });
        let mut req = self.agent.post(&self.endpoint);
        if let Some(k) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {k}"));
        }
        let mut resp = req
            .send_json(&body)
            .map_err(|e| ProviderError::LlmTransport(e.to_string()))?;
        let reply: Json = resp
            .body_mut()
            .read_json()
            .map_err(|e| ProviderError::LlmTransport(e.to_string()))?;
        reply["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| ProviderError::LlmTransport("reply has no choices[0].message.content".into()))
    }
}

/// Hex SHA-256 of the prompt text; names fixture files.
pub fn prompt_hash(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

/// Serves recorded responses from `<dir>/<prompt_hash>.txt`. A missing file
/// is an error, never a silent fallback.
#[derive(Debug, Clone)]
pub struct FixtureClient {
    dir: PathBuf,
}

impl FixtureClient {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FixtureClient { dir: dir.into() }
    }

    pub fn fixture_path(&self, prompt: &str) -> PathBuf {
        self.dir.join(format!("{}.txt", prompt_hash(prompt)))
    }

    /// Records `response` as the reply to `prompt`.
    pub fn store(&self, prompt: &str, response: &str) -> std::io::Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        std::fs::write(self.fixture_path(prompt), response)
    }
}

impl LlmClient for FixtureClient {
    fn complete(&self, prompt: &str, _temperature: f64) -> Result<String, ProviderError> {
        let path = self.fixture_path(prompt);
        std::fs::read_to_string(&path).map_err(|_| ProviderError::FixtureMiss {
            path: self.dir.display().to_string(),
            hash: prompt_hash(prompt),
        })
    }
}

/// Passes calls through to a live client and stores every reply as a fixture.
pub struct RecordingClient<C> {
    inner: C,
    fixtures: FixtureClient,
}

impl<C: LlmClient> RecordingClient<C> {
    pub fn new(inner: C, dir: &Path) -> Self {
        RecordingClient {
            inner,
            fixtures: FixtureClient::new(dir),
        }
    }
}

impl<C: LlmClient> LlmClient for RecordingClient<C> {
    fn complete(&self, prompt: &str, temperature: f64) -> Result<String, ProviderError> {
        let reply = self.inner.complete(prompt, temperature)?;
        self.fixtures
            .store(prompt, &reply)
            .map_err(|e| ProviderError::LlmTransport(format!("cannot record fixture: {e}")))?;
        Ok(reply)
    }
}

/// Parses a reply into a flat list of primitive JSON values. A surrounding
/// markdown code fence is tolerated; anything other than a flat array is
/// malformed.
pub fn parse_response(text: &str) -> Result<Vec<Json>, ProviderError> {
    let mut body = text.trim();
    if let Some(rest) = body.strip_prefix("```") {
        let rest = rest.trim_start_matches(|c: char| c.is_ascii_alphanumeric());
        body = rest.strip_suffix("```").unwrap_or(rest).trim();
    }
    let parsed: Json = serde_json::from_str(body)
        .map_err(|e| ProviderError::MalformedResponse(format!("not JSON: {e}")))?;
    let Json::Array(items) = parsed else {
        return Err(ProviderError::MalformedResponse("not an array".into()));
    };
    if items.iter().any(|v| v.is_array() || v.is_object()) {
        return Err(ProviderError::MalformedResponse("array is not flat".into()));
    }
    Ok(items)
}

/// Asks the model for values of `c`. Malformed replies are retried with a
/// higher temperature; entries of the wrong kind or failing a refinement are
/// dropped.
pub fn llm_values(
    c: &Component,
    ctx: &PromptContext,
    client: &dyn LlmClient,
) -> Result<Vec<Value>, ProviderError> {
    let Some(kind) = c.primitive_kind() else {
        return Ok(Vec::new());
    };
    let prompt = ctx.render();
    let mut last = None;
    for t in TEMPERATURES {
        let reply = client.complete(&prompt, t)?;
        let items = match parse_response(&reply) {
            Ok(items) => items,
            Err(e) => {
                log::warn!("{}: {e}", c.path);
                last = Some(e);
                continue;
            }
        };
        let mut out: Vec<Value> = Vec::new();
        for raw in &items {
            match kind.coerce_json(raw) {
                Some(v) if c.accepts(&v) => {
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
                _ => log::info!("{}: dropped llm value {raw}", c.path),
            }
        }
        if out.is_empty() {
            return Err(ProviderError::EmptyAfterValidation(c.path.to_string()));
        }
        return Ok(out);
    }
    Err(last.expect("at least one attempt"))
}
