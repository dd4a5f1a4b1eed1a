//! Pass/fail records shared by every validator.

use serde::{Deserialize, Serialize};

/// Outcome of one numerical check: the worst residual found, where it
/// occurred, and the tolerance it was compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub worst: f64,
    /// Flow time `s` or process time `t` of the worst residual, if meaningful.
    pub location: Option<f64>,
    pub tolerance: f64,
}

impl Check {
    /// Passes iff `worst <= tolerance`.
    pub fn new(name: impl Into<String>, worst: f64, location: Option<f64>, tolerance: f64) -> Self {
        Self { name: name.into(), pass: worst <= tolerance, worst, location, tolerance }
    }

    pub fn vacuous(name: impl Into<String>, tolerance: f64) -> Self {
        Self::new(name, 0.0, None, tolerance)
    }
}

/// Running maximum with the location where it was attained.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Worst {
    pub value: f64,
    pub at: Option<f64>,
}

impl Worst {
    pub fn new() -> Self {
        Self { value: 0.0, at: None }
    }

    pub fn push(&mut self, value: f64, at: f64) {
        if value > self.value || value.is_nan() {
            self.value = value;
            self.at = Some(at);
        }
    }

    pub fn check(self, name: &str, tolerance: f64) -> Check {
        Check::new(name, self.value, self.at, tolerance)
    }
}

/// All checks pass.
pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}
