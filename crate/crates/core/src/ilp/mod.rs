//! 0-1 models with one variable per word and a maximize-cardinality
//! objective, plus LP-file exchange, solution import and verification, and a
//! built-in exact solver.

mod lp;
mod solution;
mod solver;

pub use lp::{read_lp, write_lp, write_lp_string};
pub use solution::{
    read_solution, verify_solution, ReadMode, Solution, SolutionSource, SolverStatus, VerificationReport,
};
pub use solver::solve_builtin;

use crate::bitseq::{enumerate_words, Word};
use crate::constraints::{FamilyId, LinearConstraint};
use crate::error::{Error, Result};

/// Provenance recorded with a generated model.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelMetadata {
    pub families: Vec<FamilyId>,
    pub c6_splits: Vec<(usize, usize)>,
    pub version: String,
}

/// Maximize `sum V_x` over all words `x` of length n subject to linear rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpModel {
    n: usize,
    constraints: Vec<LinearConstraint>,
    metadata: ModelMetadata,
}

impl IlpModel {
    pub fn new(n: usize, constraints: Vec<LinearConstraint>, metadata: ModelMetadata) -> Self {
        IlpModel { n, constraints, metadata }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn metadata(&self) -> &ModelMetadata {
        &self.metadata
    }

    pub fn variable_count(&self) -> usize {
        1 << self.n
    }

    /// Variables in canonical order.
    pub fn variables(&self) -> impl Iterator<Item = Word> {
        enumerate_words(self.n).expect("model length is valid")
    }

    pub fn constraint(&self, label: &str) -> Option<&LinearConstraint> {
        self.constraints.iter().find(|c| c.label == label)
    }

    /// Resolves a variable name of this model.
    pub fn variable(&self, name: &str) -> Result<Word> {
        parse_variable(name).filter(|w| w.len() == self.n).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }
}

/// `x_` followed by the word's bits.
pub fn variable_name(w: &Word) -> String {
    format!("x_{w}")
}

pub fn parse_variable(name: &str) -> Option<Word> {
    name.strip_prefix("x_").and_then(|bits| bits.parse().ok())
}
