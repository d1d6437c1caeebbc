use std::fmt;
use std::io::BufRead;

use super::IlpModel;
use crate::bitseq::Word;
use crate::error::{Error, Result};
use crate::sdecc::{is_sdecc, Validity};
use crate::vt::Code;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionSource {
    Builtin,
    Imported,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Optimal,
    Feasible,
    Unknown,
}

impl fmt::Display for SolverStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverStatus::Optimal => "optimal",
            SolverStatus::Feasible => "feasible",
            SolverStatus::Unknown => "unknown",
        })
    }
}

/// A 0/1 assignment to every variable of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    n: usize,
    values: Vec<bool>,
    pub source: SolutionSource,
    pub status: SolverStatus,
    /// Objective value the producer reported, if it reported one.
    pub claimed_objective: Option<i64>,
    pub nodes: u64,
}

impl Solution {
    pub fn new(n: usize, source: SolutionSource, status: SolverStatus) -> Self {
        Solution { n, values: vec![false; 1 << n], source, status, claimed_objective: None, nodes: 0 }
    }

    /// Indicator vector of a code.
    pub fn from_code(code: &Code, source: SolutionSource, status: SolverStatus) -> Self {
        let mut s = Solution::new(code.length(), source, status);
        for w in code.iter() {
            s.values[w.index()] = true;
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, w: &Word) -> bool {
        w.len() == self.n && self.values[w.index()]
    }

    pub fn set(&mut self, w: &Word, v: bool) {
        assert_eq!(w.len(), self.n);
        self.values[w.index()] = v;
    }

    /// Number of variables at 1.
    pub fn objective(&self) -> i64 {
        self.values.iter().filter(|&&v| v).count() as i64
    }

    pub fn selected(&self) -> Code {
        let n = self.n;
        let words = self.values.iter().enumerate().filter(|(_, &v)| v).map(|(i, _)| Word::raw(i as u32, n));
        Code::from_words(n, words).expect("lengths agree")
    }

    /// Writes `name value` lines for every variable, preceded by the objective.
    pub fn write<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# Objective value = {}", self.objective())?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(out, "{} {}", super::variable_name(&Word::raw(i as u32, self.n)), u8::from(*v))?;
        }
        Ok(())
    }
}

/// How fractional values in a solution file are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReadMode {
    /// Values at or above 0.5 read as 1.
    #[default]
    Rounding,
    /// Values farther than 1e-6 from 0 or 1 are rejected.
    Strict,
}

const INTEGRALITY_TOL: f64 = 1e-6;

fn objective_comment(line: &str) -> Option<i64> {
    let lower = line.to_ascii_lowercase();
    let rest = lower.split_once("objective")?.1;
    let value = rest.trim_start_matches(|c: char| c.is_alphabetic() || c.is_whitespace() || c == '=' || c == ':');
    let v: f64 = value.split_whitespace().next()?.parse().ok()?;
    Some(v.round() as i64)
}

/// Reads whitespace-separated `name value` lines against a model.
///
/// Lines starting with `#` are comments; a comment such as
/// `# Objective value = 172` is kept as the claimed objective. Variables
/// not listed default to 0.
pub fn read_solution<R: BufRead>(input: R, model: &IlpModel, mode: ReadMode) -> Result<Solution> {
    let mut sol = Solution::new(model.n(), SolutionSource::Imported, SolverStatus::Unknown);
    let mut seen = vec![false; model.variable_count()];
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let content = line.trim();
        if content.is_empty() {
            continue;
        }
        if let Some(comment) = content.strip_prefix('#') {
            if let Some(v) = objective_comment(comment) {
                sol.claimed_objective = Some(v);
            }
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let [name, value] = fields[..] else {
            return Err(Error::Parse { line: lineno, msg: format!("expected `name value`, got {content:?}") });
        };
        let w = model.variable(name)?;
        let v: f64 = value
            .parse()
            .map_err(|_| Error::Parse { line: lineno, msg: format!("non-numeric value {value:?} for {name}") })?;
        if !v.is_finite() || !(-INTEGRALITY_TOL..=1.0 + INTEGRALITY_TOL).contains(&v) {
            return Err(Error::Parse { line: lineno, msg: format!("{name} = {value} is not a binary value") });
        }
        if mode == ReadMode::Strict && (v - v.round()).abs() > INTEGRALITY_TOL {
            return Err(Error::Parse { line: lineno, msg: format!("{name} = {value} is not integral") });
        }
        if std::mem::replace(&mut seen[w.index()], true) {
            return Err(Error::Parse { line: lineno, msg: format!("{name} assigned twice") });
        }
        sol.set(&w, v >= 0.5);
    }
    Ok(sol)
}

/// Result of checking a solution against a model and against the code
/// definition directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub objective: i64,
    pub violated: Vec<String>,
    /// `None` when the selected set cannot be checked (word length 1).
    pub validity: Option<Validity>,
    pub claimed_objective: Option<i64>,
    pub length_mismatch: bool,
}

impl VerificationReport {
    pub fn objective_consistent(&self) -> bool {
        self.claimed_objective.is_none_or(|c| c == self.objective)
    }

    pub fn passed(&self) -> bool {
        !self.length_mismatch
            && self.violated.is_empty()
            && self.validity.as_ref().is_none_or(Validity::is_valid)
            && self.objective_consistent()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })?;
        writeln!(f, "objective: {}", self.objective)?;
        if let Some(c) = self.claimed_objective {
            writeln!(f, "claimed objective: {c}{}", if self.objective_consistent() { "" } else { " (mismatch)" })?;
        }
        if self.length_mismatch {
            writeln!(f, "solution word length differs from the model")?;
        }
        if self.violated.is_empty() {
            writeln!(f, "violated constraints: none")?;
        } else {
            writeln!(f, "violated constraints: {}", self.violated.len())?;
            for label in &self.violated {
                writeln!(f, "  {label}")?;
            }
        }
        match &self.validity {
            Some(Validity::Valid) => writeln!(f, "sdecc: valid"),
            Some(Validity::Conflict { first, second, shared }) => {
                writeln!(f, "sdecc: invalid, {first} and {second} both delete to {shared}")
            }
            None => writeln!(f, "sdecc: not checked"),
        }
    }
}

/// Checks every model row, the code property of the chosen words, and the
/// reported objective.
pub fn verify_solution(model: &IlpModel, sol: &Solution) -> VerificationReport {
    if sol.n() != model.n() {
        return VerificationReport {
            objective: sol.objective(),
            violated: Vec::new(),
            validity: None,
            claimed_objective: sol.claimed_objective,
            length_mismatch: true,
        };
    }
    let violated =
        model.constraints().iter().filter(|c| !c.is_satisfied(|w| sol.value(w))).map(|c| c.label.clone()).collect();
    let code = sol.selected();
    VerificationReport {
        objective: sol.objective(),
        violated,
        validity: is_sdecc(&code).ok(),
        claimed_objective: sol.claimed_objective,
        length_mismatch: false,
    }
}
