//! Verdict records shared by every verification suite.

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// One `(identity, k, profile)` cell of a suite run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteEntry {
    pub suite: String,
    pub dgla_id: String,
    pub identity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree_profile: Option<String>,
    pub trials: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_counterexample: Option<String>,
}

impl SuiteEntry {
    pub fn new(suite: &str, dgla_id: &str, identity: &str) -> Self {
        SuiteEntry {
            suite: suite.to_string(),
            dgla_id: dgla_id.to_string(),
            identity: identity.to_string(),
            k: None,
            degree_profile: None,
            trials: 0,
            failures: 0,
            first_counterexample: None,
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_profile(mut self, profile: impl Into<String>) -> Self {
        self.degree_profile = Some(profile.into());
        self
    }

    /// Folds per-trial outcomes (in trial order) into the tally.
    pub fn absorb<I: IntoIterator<Item = Option<String>>>(mut self, outcomes: I) -> Self {
        for o in outcomes {
            self.trials += 1;
            if let Some(cx) = o {
                self.failures += 1;
                if self.first_counterexample.is_none() {
                    self.first_counterexample = Some(cx);
                }
            }
        }
        self
    }

    pub fn record(&mut self, outcome: Option<String>) {
        self.trials += 1;
        if let Some(cx) = outcome {
            self.failures += 1;
            if self.first_counterexample.is_none() {
                self.first_counterexample = Some(cx);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

pub fn all_passed(entries: &[SuiteEntry]) -> bool {
    entries.iter().all(SuiteEntry::passed)
}

/// Total number of failing trials across `entries`.
pub fn failure_count(entries: &[SuiteEntry]) -> usize {
    entries.iter().map(|e| e.failures).sum()
}
