use serde::Serialize;

/// Tally of a universally quantified check over a finite family.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub checked: usize,
    pub failures: usize,
    pub counterexample: Option<String>,
}

impl CheckReport {
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(witness());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checked += other.checked;
        self.failures += other.failures;
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
    }
}
