//! Run configuration: every knob of a generate/execute run in one record,
//! loadable from a TOML file and overridable field by field.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinator::{SuiteConfig, SuiteMode};
use crate::decompose::DecompositionConfig;
use crate::providers::{ProviderKind, DEFAULT_CAP, DEFAULT_PARALLELISM};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Unreadable { path: String, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmSettings {
    pub endpoint: Option<String>,
    pub model: Option<String>,
    /// Replay recorded responses from this directory.
    pub fixtures: Option<PathBuf>,
    /// With `fixtures`, call the live model and store its replies there.
    pub record: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExecSettings {
    pub base_url: Option<String>,
    pub budget_secs: u64,
    pub dry_run: bool,
}

impl Default for ExecSettings {
    fn default() -> Self {
        ExecSettings {
            base_url: None,
            budget_secs: 60,
            dry_run: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub spec: Option<PathBuf>,
    /// Restrict generation to these apis; empty means all.
    pub apis: Vec<String>,
    pub k: usize,
    pub max_len: usize,
    pub max_depth: usize,
    pub providers: Vec<ProviderKind>,
    pub seed: u64,
    pub mode: SuiteMode,
    pub cap: usize,
    pub parallelism: usize,
    pub static_table: Option<PathBuf>,
    pub mock_data: Vec<PathBuf>,
    pub llm: LlmSettings,
    pub out: PathBuf,
    pub exec: ExecSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            spec: None,
            apis: Vec::new(),
            k: 2,
            max_len: 3,
            max_depth: 3,
            providers: vec![ProviderKind::Random],
            seed: 0,
            mode: SuiteMode::Full,
            cap: DEFAULT_CAP,
            parallelism: DEFAULT_PARALLELISM,
            static_table: None,
            mock_data: Vec::new(),
            llm: LlmSettings::default(),
            out: PathBuf::from("out"),
            exec: ExecSettings::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Unreadable {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    pub fn decomposition(&self) -> DecompositionConfig {
        DecompositionConfig {
            max_len: self.max_len,
            max_depth: self.max_depth,
        }
    }

    pub fn suite(&self) -> SuiteConfig {
        SuiteConfig {
            k: self.k,
            mode: self.mode,
            seed: self.seed,
        }
    }

    /// Checks everything that can be checked before any work starts.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.spec.is_none() {
            return bad("no spec file given");
        }
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        if self.max_depth == 0 {
            return bad("max_depth must be at least 1");
        }
        if self.cap == 0 {
            return bad("cap must be at least 1");
        }
        if self.parallelism == 0 {
            return bad("parallelism must be at least 1");
        }
        if self.providers.is_empty() {
            return bad("at least one provider is required");
        }
        for (i, p) in self.providers.iter().enumerate() {
            if self.providers[..i].contains(p) {
                return Err(ConfigError::Invalid(format!("provider `{p}` listed twice")));
            }
        }
        if self.providers.contains(&ProviderKind::Static) && self.static_table.is_none() {
            return bad("the static provider needs a static table");
        }
        if self.providers.contains(&ProviderKind::Mock) && self.mock_data.is_empty() {
            return bad("the mock provider needs mock data files");
        }
        if self.llm.record && self.llm.fixtures.is_none() {
            return bad("recording needs a fixture directory");
        }
        Ok(())
    }
}
