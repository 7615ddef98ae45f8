//! Uniform pass/fail records for inequality checks.

use serde::{Deserialize, Serialize};

/// Multiple of the standard error allowed on statistical checks.
pub const SIGMA_MULTIPLIER: f64 = 3.0;

/// One inequality `lhs ≤ rhs`, possibly with Monte Carlo error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub stderr: f64,
    pub pass: bool,
}

impl Check {
    /// `lhs ≤ rhs·(1 + rel) + abs`, no statistical error.
    pub fn exact(name: impl Into<String>, lhs: f64, rhs: f64, rel: f64, abs: f64) -> Self {
        let pass = lhs <= rhs + rel * rhs.abs() + abs;
        Check { name: name.into(), lhs, rhs, stderr: 0.0, pass }
    }

    /// `lhs ≤ rhs + 3·stderr`.
    pub fn statistical(name: impl Into<String>, lhs: f64, rhs: f64, stderr: f64) -> Self {
        Self::with_budget(name, lhs, rhs, stderr, 0.0)
    }

    /// `lhs ≤ rhs + 3·stderr + budget`, for a deterministic bias allowance.
    pub fn with_budget(name: impl Into<String>, lhs: f64, rhs: f64, stderr: f64, budget: f64) -> Self {
        let pass = lhs <= rhs + SIGMA_MULTIPLIER * stderr + budget;
        Check { name: name.into(), lhs, rhs, stderr, pass }
    }

    /// `|lhs - rhs| ≤ 3·stderr + budget`.
    pub fn two_sided(name: impl Into<String>, lhs: f64, rhs: f64, stderr: f64, budget: f64) -> Self {
        let pass = (lhs - rhs).abs() <= SIGMA_MULTIPLIER * stderr + budget;
        Check { name: name.into(), lhs, rhs, stderr, pass }
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_rules() {
        assert!(Check::exact("a", 1.0, 1.0, 0.0, 0.0).pass);
        assert!(!Check::exact("a", 1.1, 1.0, 0.05, 0.0).pass);
        assert!(Check::statistical("b", 1.2, 1.0, 0.1).pass);
        assert!(!Check::statistical("b", 1.4, 1.0, 0.1).pass);
        assert!(Check::two_sided("c", 0.7, 1.0, 0.1, 0.0).pass);
        assert!(!Check::two_sided("c", 0.6, 1.0, 0.1, 0.0).pass);
        assert!(Check::with_budget("d", 1.5, 1.0, 0.1, 0.2).pass);
    }
}
