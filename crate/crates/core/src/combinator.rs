//! k-way combinatorial suite generation under guard constraints.
//!
//! For every k-subset of components, every tuple of the subset's strata
//! becomes one test. Guard subjects the selected components depend on are
//! forced to their smallest satisfying value; every other component is drawn
//! uniformly from its stratum when its guards hold and omitted otherwise.

use std::collections::{BTreeMap, HashMap, HashSet};

use itertools::Itertools;
use rand::RngExt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decompose::Component;
use crate::providers::SeededRng;
use crate::value::Value;

#[derive(Debug, Error, PartialEq)]
pub enum CombinatorError {
    #[error("k must be at least 1")]
    InvalidK,
    #[error("no value tuple of {0:?} has a feasible completion")]
    InfeasibleSelection(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteMode {
    #[default]
    Full,
    Reduced,
}

impl std::str::FromStr for SuiteMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(SuiteMode::Full),
            "reduced" => Ok(SuiteMode::Reduced),
            other => Err(format!("unknown mode `{other}` (expected full or reduced)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub k: usize,
    pub mode: SuiteMode,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            k: 2,
            mode: SuiteMode::Full,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestCase {
    /// Rendered path to value, for every component whose guards hold.
    pub assignments: BTreeMap<String, Value>,
    /// Paths of the selected k-subset.
    pub subset: Vec<String>,
    /// Index of the tuple within the subset's value product.
    pub tuple: usize,
}

impl TestCase {
    /// Dedup key: sorted `path=value` lines.
    pub fn canonical(&self) -> String {
        self.assignments
            .iter()
            .map(|(p, v)| format!("{p}={}", v.canonical()))
            .join("\n")
    }
}

/// One test per feasible tuple of `selected`'s strata. Errors only when no
/// tuple at all can be completed.
pub fn gen_k_tests(
    selected: &[usize],
    all: &[Component],
    rng: &SeededRng,
) -> Result<Vec<TestCase>, CombinatorError> {
    let paths: Vec<String> = selected.iter().map(|&i| all[i].path.to_string()).collect();
    let index = path_index(all);
    let mut stream = rng.stream_for(&format!("combine/{}", paths.join(",")));
    let mut out = Vec::new();
    let mut tuples = 0usize;
    for (t, tuple) in selected
        .iter()
        .map(|&i| all[i].values.iter().cloned())
        .multi_cartesian_product()
        .enumerate()
    {
        tuples += 1;
        let picks: Vec<(usize, Value)> = selected.iter().copied().zip(tuple).collect();
        let Some(mut assignment) = force(&picks, all, &index) else {
            continue;
        };
        for c in all {
            let key = c.path.as_str();
            if assignment.contains_key(key) || c.values.is_empty() || !guards_hold(c, &assignment) {
                continue;
            }
            let v = c.values[stream.random_range(0..c.values.len())].clone();
            assignment.insert(key.to_string(), v);
        }
        out.push(TestCase {
            assignments: assignment,
            subset: paths.clone(),
            tuple: t,
        });
    }
    if out.is_empty() && tuples > 0 {
        return Err(CombinatorError::InfeasibleSelection(paths));
    }
    Ok(out)
}

/// Full: every k-subset's tests, deduplicated. Reduced: a greedy pass over
/// the full suite keeping tests that cover a new k-tuple.
pub fn gen_suite(components: &[Component], cfg: &SuiteConfig) -> Result<Vec<TestCase>, CombinatorError> {
    if cfg.k == 0 {
        return Err(CombinatorError::InvalidK);
    }
    if components.is_empty() {
        return Ok(Vec::new());
    }
    let k = if cfg.k > components.len() {
        log::warn!("k={} exceeds the {} components; using k={}", cfg.k, components.len(), components.len());
        components.len()
    } else {
        cfg.k
    };
    let rng = SeededRng::new(cfg.seed);
    let subsets: Vec<Vec<usize>> = (0..components.len()).combinations(k).collect();
    let per_subset: Vec<Vec<TestCase>> = subsets
        .par_iter()
        .map(|s| match gen_k_tests(s, components, &rng) {
            Ok(ts) => ts,
            Err(e) => {
                log::debug!("{e}; skipped");
                Vec::new()
            }
        })
        .collect();

    let mut seen = HashSet::new();
    let full: Vec<TestCase> = per_subset
        .into_iter()
        .flatten()
        .filter(|t| seen.insert(t.canonical()))
        .collect();
    Ok(match cfg.mode {
        SuiteMode::Full => full,
        SuiteMode::Reduced => reduce(full, k),
    })
}

fn reduce(full: Vec<TestCase>, k: usize) -> Vec<TestCase> {
    let mut covered: HashSet<String> = HashSet::new();
    full.into_iter()
        .filter(|t| {
            let mut fresh = false;
            for key in test_tuples(t, k) {
                fresh |= covered.insert(key);
            }
            fresh
        })
        .collect()
}

/// One k-tuple that is feasible but appears in no test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Uncovered {
    pub assignments: Vec<(String, Value)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub k: usize,
    pub feasible: usize,
    pub uncovered: Vec<Uncovered>,
}

/// Enumerates every feasible k-tuple of the components' strata and reports
/// those that no test contains.
pub fn coverage_check(suite: &[TestCase], components: &[Component], k: usize) -> CoverageReport {
    let mut report = CoverageReport {
        k,
        feasible: 0,
        uncovered: Vec::new(),
    };
    if k == 0 || k > components.len() {
        return report;
    }
    let covered: HashSet<String> = suite.iter().flat_map(|t| test_tuples(t, k)).collect();
    let index = path_index(components);
    for subset in (0..components.len()).combinations(k) {
        for tuple in subset
            .iter()
            .map(|&i| components[i].values.iter().cloned())
            .multi_cartesian_product()
        {
            let picks: Vec<(usize, Value)> = subset.iter().copied().zip(tuple).collect();
            if force(&picks, components, &index).is_none() {
                continue;
            }
            report.feasible += 1;
            let mut entries: Vec<(String, Value)> = picks
                .into_iter()
                .map(|(i, v)| (components[i].path.to_string(), v))
                .collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            if !covered.contains(&tuple_key(&entries)) {
                report.uncovered.push(Uncovered { assignments: entries });
            }
        }
    }
    report
}

fn tuple_key(entries: &[(String, Value)]) -> String {
    entries
        .iter()
        .map(|(p, v)| format!("{p}={}", v.canonical()))
        .join("\u{1f}")
}

fn test_tuples(t: &TestCase, k: usize) -> Vec<String> {
    t.assignments
        .iter()
        .map(|(p, v)| (p.clone(), v.clone()))
        .combinations(k)
        .map(|c| tuple_key(&c))
        .collect()
}

fn path_index(all: &[Component]) -> HashMap<&str, usize> {
    all.iter().enumerate().map(|(i, c)| (c.path.as_str(), i)).collect()
}

fn guards_hold(c: &Component, assignment: &BTreeMap<String, Value>) -> bool {
    c.guards.iter().all(|g| {
        assignment
            .get(g.subject.as_str())
            .is_some_and(|v| g.holds_for(v))
    })
}

/// Assigns the picks and forces every guard subject they depend on to the
/// first stratum value satisfying all guards on it. `None` when the picks
/// cannot all be feasible together.
fn force(
    picks: &[(usize, Value)],
    all: &[Component],
    index: &HashMap<&str, usize>,
) -> Option<BTreeMap<String, Value>> {
    let mut assignment: BTreeMap<String, Value> = picks
        .iter()
        .map(|(i, v)| (all[*i].path.to_string(), v.clone()))
        .collect();
    // Guard lists carry the whole chain of enclosing guards, so the picks'
    // guards already name every subject that needs a value.
    let mut constraints: BTreeMap<usize, Vec<&crate::decompose::Guard>> = BTreeMap::new();
    for (i, _) in picks {
        for g in &all[*i].guards {
            let s = *index.get(g.subject.as_str())?;
            constraints.entry(s).or_default().push(g);
        }
    }
    for (s, gs) in &constraints {
        let subject = &all[*s];
        let key = subject.path.as_str();
        if let Some(v) = assignment.get(key) {
            if !gs.iter().all(|g| g.holds_for(v)) {
                return None;
            }
            continue;
        }
        let v = subject
            .values
            .iter()
            .find(|v| gs.iter().all(|g| g.holds_for(v)))?;
        assignment.insert(key.to_string(), v.clone());
    }
    for p in assignment.keys() {
        if !guards_hold(&all[index[p.as_str()]], &assignment) {
            return None;
        }
    }
    Some(assignment)
}
