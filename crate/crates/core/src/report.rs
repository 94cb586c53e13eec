//! Numerical claim checks with recorded slack.

use serde::Serialize;

/// Default absolute tolerance for inequality and equality checks.
pub const CHECK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs <= rhs`
    Le,
    /// `lhs == rhs`
    Eq,
}

/// One evaluated claim `lhs <relation> rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs` for `Le`, `-|lhs - rhs|` for `Eq`; negative beyond the
    /// tolerance means the claim failed.
    pub slack: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let slack = rhs - lhs;
        Self {
            name: name.into(),
            relation: Relation::Le,
            lhs,
            rhs,
            slack,
            tolerance,
            passed: slack >= -tolerance,
        }
    }

    pub fn ge(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let mut c = Self::le(name, rhs, lhs, tolerance);
        std::mem::swap(&mut c.lhs, &mut c.rhs);
        c
    }

    pub fn eq(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let slack = -(lhs - rhs).abs();
        Self {
            name: name.into(),
            relation: Relation::Eq,
            lhs,
            rhs,
            slack,
            tolerance,
            passed: slack >= -tolerance,
        }
    }

    /// A boolean claim with no numeric slack.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        Self::eq(name, v, 1.0, 0.0)
    }
}

/// An ordered collection of checks.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CheckReport {
    pub checks: Vec<Check>,
}

impl CheckReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Smallest slack across all checks, if any.
    pub fn min_slack(&self) -> Option<f64> {
        self.checks.iter().map(|c| c.slack).reduce(f64::min)
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }
}

impl FromIterator<Check> for CheckReport {
    fn from_iter<I: IntoIterator<Item = Check>>(iter: I) -> Self {
        Self {
            checks: iter.into_iter().collect(),
        }
    }
}
