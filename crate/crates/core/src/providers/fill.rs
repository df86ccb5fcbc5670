use std::sync::Arc;

use rayon::prelude::*;

use super::{
    build_prompt, llm_values, mock_values, random_values, static_values, LlmClient, MockDataset,
    ProviderError, ProviderKind, SeededRng, StaticTable,
};
use crate::decompose::{Component, Source};
use crate::spec::{ApiSig, ApiSpec};
use crate::value::Value;

pub const DEFAULT_CAP: usize = 6;
pub const DEFAULT_PARALLELISM: usize = 4;

/// Configured providers and their inputs.
#[derive(Clone)]
pub struct ProviderSet {
    pub order: Vec<ProviderKind>,
    pub static_table: Option<StaticTable>,
    /// Also embedded in every LLM prompt when present.
    pub mock: Option<MockDataset>,
    pub llm: Option<Arc<dyn LlmClient>>,
    /// Maximum stratum size per primitive component.
    pub cap: usize,
    /// Components filled concurrently; also bounds in-flight LLM requests.
    pub parallelism: usize,
}

impl ProviderSet {
    pub fn new(order: Vec<ProviderKind>) -> Self {
        ProviderSet {
            order,
            static_table: None,
            mock: None,
            llm: None,
            cap: DEFAULT_CAP,
            parallelism: DEFAULT_PARALLELISM,
        }
    }

    pub fn random() -> Self {
        Self::new(vec![ProviderKind::Random])
    }

    pub fn with_static(mut self, t: StaticTable) -> Self {
        self.static_table = Some(t);
        self
    }

    pub fn with_mock(mut self, m: MockDataset) -> Self {
        self.mock = Some(m);
        self
    }

    pub fn with_llm(mut self, c: Arc<dyn LlmClient>) -> Self {
        self.llm = Some(c);
        self
    }

    pub fn with_parallelism(mut self, n: usize) -> Self {
        self.parallelism = n.max(1);
        self
    }

    fn validate(&self) -> Result<(), ProviderError> {
        if self.order.is_empty() {
            return Err(ProviderError::NoProviders);
        }
        for k in &self.order {
            let present = match k {
                ProviderKind::Random => true,
                ProviderKind::Static => self.static_table.is_some(),
                ProviderKind::Mock => self.mock.is_some(),
                ProviderKind::Llm => self.llm.is_some(),
            };
            if !present {
                return Err(ProviderError::MissingResource(*k));
            }
        }
        Ok(())
    }
}

/// Fills the strata of every primitive component of one api's decomposition.
/// Synthetic components keep their enumerated domains. A primitive component
/// whose configured providers all come back empty falls back to mock, then
/// static, then random values, so it never ends empty.
pub fn fill_strata(
    components: &mut [Component],
    providers: &ProviderSet,
    rng: &SeededRng,
    spec: &ApiSpec,
    api: &ApiSig,
) -> Result<(), ProviderError> {
    providers.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(providers.parallelism.max(1))
        .build()
        .map_err(|e| ProviderError::LlmTransport(format!("thread pool: {e}")))?;
    pool.install(|| {
        components
            .par_iter_mut()
            .try_for_each(|c| fill_one(c, providers, rng, spec, api))
    })
}

fn fill_one(
    c: &mut Component,
    providers: &ProviderSet,
    rng: &SeededRng,
    spec: &ApiSpec,
    api: &ApiSig,
) -> Result<(), ProviderError> {
    if c.kind.is_synthetic() {
        return Ok(());
    }
    let mut values: Vec<Value> = Vec::new();
    let mut sources: Vec<Source> = Vec::new();
    let push = |vs: Vec<Value>, src: Source, values: &mut Vec<Value>, sources: &mut Vec<Source>| {
        for v in vs {
            if values.len() < providers.cap && !values.contains(&v) {
                values.push(v);
                sources.push(src);
            }
        }
    };
    for kind in &providers.order {
        let vs = run_provider(*kind, c, providers, rng, spec, api)?;
        push(vs, source_of(*kind), &mut values, &mut sources);
    }
    if values.is_empty() {
        for kind in [ProviderKind::Mock, ProviderKind::Static, ProviderKind::Random] {
            let available = match kind {
                ProviderKind::Mock => providers.mock.is_some(),
                ProviderKind::Static => providers.static_table.is_some(),
                _ => true,
            };
            if !available {
                continue;
            }
            let vs = run_provider(kind, c, providers, rng, spec, api)?;
            if !vs.is_empty() {
                log::info!("{}: filled by {kind} fallback", c.path);
                push(vs, source_of(kind), &mut values, &mut sources);
                break;
            }
        }
    }
    c.values = values;
    c.sources = sources;
    Ok(())
}

fn run_provider(
    kind: ProviderKind,
    c: &Component,
    providers: &ProviderSet,
    rng: &SeededRng,
    spec: &ApiSpec,
    api: &ApiSig,
) -> Result<Vec<Value>, ProviderError> {
    Ok(match kind {
        ProviderKind::Random => random_values(c, rng, providers.cap)?,
        ProviderKind::Static => providers
            .static_table
            .as_ref()
            .map(|t| static_values(c, t))
            .unwrap_or_default(),
        ProviderKind::Mock => providers
            .mock
            .as_ref()
            .map(|m| mock_values(c, m))
            .unwrap_or_default(),
        ProviderKind::Llm => {
            let Some(client) = providers.llm.as_deref() else {
                return Ok(Vec::new());
            };
            let ctx = build_prompt(c, spec, api, providers.mock.as_ref());
            match llm_values(c, &ctx, client) {
                Ok(vs) => vs,
                Err(e @ (ProviderError::MalformedResponse(_) | ProviderError::EmptyAfterValidation(_))) => {
                    log::warn!("{}: {e}; falling back", c.path);
                    Vec::new()
                }
                Err(e) => return Err(e),
            }
        }
    })
}

fn source_of(kind: ProviderKind) -> Source {
    match kind {
        ProviderKind::Random => Source::Random,
        ProviderKind::Static => Source::Static,
        ProviderKind::Mock => Source::Mock,
        ProviderKind::Llm => Source::Llm,
    }
}
