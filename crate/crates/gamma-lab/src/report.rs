//! Uniform residual-check reporting shared by the verifiers and the CLI.

use serde::Serialize;

/// One verified identity: its residual, the tolerance it was held to, and
/// the law (the operator identity) it instantiates.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    /// The identity being verified, written as a formula.
    pub law: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        law: impl Into<String>,
        residual: f64,
        tol: f64,
    ) -> Self {
        Self {
            name: name.into(),
            law: law.into(),
            residual,
            tol,
            pass: residual <= tol,
        }
    }

    /// A check that records a boolean outcome rather than a residual.
    pub fn flag(name: impl Into<String>, law: impl Into<String>, pass: bool) -> Self {
        Self {
            name: name.into(),
            law: law.into(),
            residual: if pass { 0.0 } else { f64::INFINITY },
            tol: 0.0,
            pass,
        }
    }
}

/// A group of checks with an aggregate verdict.
#[derive(Debug, Clone, Default, Serialize)]
pub struct CheckSet {
    pub checks: Vec<Check>,
}

impl CheckSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn add(&mut self, name: impl Into<String>, law: impl Into<String>, residual: f64, tol: f64) {
        self.push(Check::new(name, law, residual, tol));
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.residual)
            .fold(0.0, f64::max)
    }

    pub fn extend(&mut self, other: CheckSet) {
        self.checks.extend(other.checks);
    }
}
