//! Pass/fail records shared by every verifier.

use serde::Serialize;
use std::fmt;

/// Evidence attached to a failing check.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A single matrix coordinate inside the named block or relation.
    Entry { location: String, row: usize, col: usize },
    /// An ordered pair of relations whose product misbehaves.
    Product { left: String, right: String },
    /// Two coordinates that should carry the same value but do not.
    Conflict { location: String, first: (usize, usize), second: (usize, usize) },
    Note { text: String },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Entry { location, row, col } => write!(f, "{location} entry ({row},{col})"),
            Witness::Product { left, right } => write!(f, "product {left} * {right}"),
            Witness::Conflict { location, first, second } => write!(
                f,
                "{location} coordinates ({},{}) and ({},{})",
                first.0, first.1, second.0, second.1
            ),
            Witness::Note { text } => f.write_str(text),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn pass(name: &str) -> Self {
        Check { name: name.into(), passed: true, witness: None, residual: None, detail: String::new() }
    }

    pub fn fail(name: &str, witness: Witness) -> Self {
        Check { name: name.into(), passed: false, witness: Some(witness), residual: None, detail: String::new() }
    }

    /// Passes when `residual <= bound`.
    pub fn residual(name: &str, residual: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            passed: residual <= bound,
            witness: None,
            residual: Some(residual),
            detail: String::new(),
        }
    }

    pub fn from_witness(name: &str, witness: Option<Witness>) -> Self {
        match witness {
            Some(w) => Check::fail(name, w),
            None => Check::pass(name),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn with_residual(mut self, residual: f64) -> Self {
        self.residual = Some(residual);
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0).max(10);
        for c in &self.checks {
            write!(f, "{:<width$} {}", c.name, if c.passed { "pass" } else { "FAIL" })?;
            if let Some(r) = c.residual {
                write!(f, "  residual {r:.3e}")?;
            }
            if let Some(w) = &c.witness {
                write!(f, "  at {w}")?;
            }
            if !c.detail.is_empty() {
                write!(f, "  ({})", c.detail)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
