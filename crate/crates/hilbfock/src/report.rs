//! Pass/fail bookkeeping shared by the verification routines.

use serde::Serialize;

/// Number of counterexamples kept verbatim per check.
const KEEP: usize = 8;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub checked: usize,
    pub failed: usize,
    pub counterexamples: Vec<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            checked: 0,
            failed: 0,
            counterexamples: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    pub fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.counterexamples.len() < KEEP {
                self.counterexamples.push(detail());
            }
        }
    }

    pub fn fail(&mut self, detail: impl Into<String>) {
        self.record(false, || detail.into());
    }

    pub fn merge(&mut self, o: CheckReport) {
        self.checked += o.checked;
        self.failed += o.failed;
        for c in o.counterexamples {
            if self.counterexamples.len() < KEEP {
                self.counterexamples.push(c);
            }
        }
    }

    pub fn summary(&self) -> String {
        if self.passed() {
            format!("{}: ok ({} checks)", self.name, self.checked)
        } else {
            format!(
                "{}: {} of {} checks failed; first: {}",
                self.name,
                self.failed,
                self.checked,
                self.counterexamples.first().map_or("", |s| s.as_str())
            )
        }
    }
}
