use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Outcome of one identity checked over a batch of samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub samples: usize,
    pub violations: Vec<Value>,
}

impl AxiomReport {
    pub fn new(axiom: &str) -> Self {
        AxiomReport {
            axiom: axiom.to_string(),
            samples: 0,
            violations: Vec::new(),
        }
    }

    /// Records one sample; `witness` is stored when `ok` is false.
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.samples += 1;
        if !ok {
            self.violations.push(witness());
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A full suite run. Everything in it is a function of the inputs and the
/// seed, so two runs with the same arguments serialize identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub results: Vec<AxiomReport>,
    pub stats: BTreeMap<String, u64>,
}

impl SuiteReport {
    pub fn is_clean(&self) -> bool {
        self.results.iter().all(AxiomReport::is_clean)
    }

    pub fn result(&self, axiom: &str) -> Option<&AxiomReport> {
        self.results.iter().find(|r| r.axiom == axiom)
    }

    pub fn stat(&self, key: &str) -> u64 {
        self.stats.get(key).copied().unwrap_or(0)
    }
}
