//! Value providers: fill each component's strata.

mod fill;
mod llm;
mod mock;
mod prompt;
mod random;
mod rng;
mod static_table;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fill::{fill_strata, ProviderSet, DEFAULT_CAP, DEFAULT_PARALLELISM};
pub use llm::{
    llm_values, parse_response, prompt_hash, ChatClient, FixtureClient, LlmClient, RecordingClient,
};
pub use mock::{ingest_mock_data, mock_values, MockDataset, MockRecord};
pub use prompt::{build_prompt, PromptContext};
pub use random::random_values;
pub use rng::SeededRng;
pub use static_table::{static_values, StaticTable};

#[derive(Debug, Error, PartialEq)]
pub enum ProviderError {
    #[error("no value satisfies the refinement of `{0}`")]
    RefinementUnsatisfiable(String),
    #[error("llm transport: {0}")]
    LlmTransport(String),
    #[error("no fixture for prompt {hash} in {path}")]
    FixtureMiss { path: String, hash: String },
    #[error("malformed llm response: {0}")]
    MalformedResponse(String),
    #[error("no llm value for `{0}` survived validation")]
    EmptyAfterValidation(String),
    #[error("cannot read {file}: {message}")]
    UnreadableFile { file: String, message: String },
    #[error("{file}: entry {} is not a flat record", index.map_or("(top level)".to_string(), |i| i.to_string()))]
    NonRecordEntry { file: String, index: Option<usize> },
    #[error("no value providers configured")]
    NoProviders,
    #[error("provider `{0}` is enabled but its input is missing")]
    MissingResource(ProviderKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Random,
    Static,
    Mock,
    Llm,
}

impl ProviderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProviderKind::Random => "random",
            ProviderKind::Static => "static",
            ProviderKind::Mock => "mock",
            ProviderKind::Llm => "llm",
        }
    }
}

impl fmt::Display for ProviderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProviderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "random" => Ok(ProviderKind::Random),
            "static" => Ok(ProviderKind::Static),
            "mock" => Ok(ProviderKind::Mock),
            "llm" => Ok(ProviderKind::Llm),
            other => Err(format!("unknown provider `{other}` (expected random, static, mock or llm)")),
        }
    }
}
