//! Linear constraint families over the indicator variables `V_x`, one
//! variable per word of length n.
//!
//! - `C0`: for every word `y` of length n-1, at most one chosen word covers `y`.
//! - `C1`: the code is at least as large as `VT_0(n)`.
//! - `C2`: words whose surface strictly contains another word's surface are excluded.
//! - `C3`: the all-zero and all-one words are chosen.
//! - `C4`: at least as many chosen words of low weight as of high weight.
//! - `C5`: per weight class of length n-1, run-weighted counting.
//! - `C6`: each subcube fixing a prefix `u` and suffix `v` holds at most `M(r)` words.

use std::fmt;
use std::str::FromStr;

use crate::bitseq::{
    concat_bits, enumerate_words, hamming_weight, run_count, single_deletions, single_insertions, Word, WordSet,
};
use crate::error::{Error, Result};
use crate::ilp::{IlpModel, ModelMetadata};
use crate::par;
#[allow(unused_imports)]
use crate::par::prelude::*;
use crate::sdecc::known_max;
use crate::vt::vt0_size;

/// Largest n any generator accepts.
pub const MAX_MODEL_N: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyId {
    C0,
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
}

impl FamilyId {
    pub const ALL: [FamilyId; 7] =
        [FamilyId::C0, FamilyId::C1, FamilyId::C2, FamilyId::C3, FamilyId::C4, FamilyId::C5, FamilyId::C6];
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", *self as u8)
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        FamilyId::ALL.into_iter().find(|f| f.to_string() == t).ok_or_else(|| Error::UnknownFamily(s.trim().to_string()))
    }
}

/// Parses a comma-separated family list such as `c0,c1,c4`.
pub fn parse_families(csv: &str) -> Result<Vec<FamilyId>> {
    csv.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(&self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }

    pub fn holds(&self, lhs: i64, rhs: i64) -> bool {
        match self {
            Sense::Le => lhs <= rhs,
            Sense::Ge => lhs >= rhs,
            Sense::Eq => lhs == rhs,
        }
    }
}

/// `sum coef * V_word  (sense)  rhs`, terms in canonical word order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    pub label: String,
    pub terms: Vec<(Word, i64)>,
    pub sense: Sense,
    pub rhs: i64,
}

impl LinearConstraint {
    fn new(label: String, mut terms: Vec<(Word, i64)>, sense: Sense, rhs: i64) -> Self {
        terms.retain(|t| t.1 != 0);
        terms.sort_by_key(|t| t.0);
        debug_assert!(terms.windows(2).all(|p| p[0].0 != p[1].0), "duplicate variable in {label}");
        LinearConstraint { label, terms, sense, rhs }
    }

    /// Left-hand side under an indicator function.
    pub fn activity(&self, chosen: impl Fn(&Word) -> bool) -> i64 {
        self.terms.iter().filter(|(w, _)| chosen(w)).map(|(_, c)| c).sum()
    }

    pub fn is_satisfied(&self, chosen: impl Fn(&Word) -> bool) -> bool {
        self.sense.holds(self.activity(chosen), self.rhs)
    }

    pub fn coefficient(&self, w: &Word) -> i64 {
        self.terms.binary_search_by_key(w, |t| t.0).map(|i| self.terms[i].1).unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintFamily {
    pub id: FamilyId,
    /// `(p, q)` for `C6`.
    pub split: Option<(usize, usize)>,
    pub constraints: Vec<LinearConstraint>,
    /// Labels of rows dropped because they could never be violated.
    pub vacuous: Vec<String>,
}

impl ConstraintFamily {
    fn new(id: FamilyId, constraints: Vec<LinearConstraint>) -> Self {
        ConstraintFamily { id, split: None, constraints, vacuous: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }
}

fn check_n(n: usize) -> Result<()> {
    if !(2..=MAX_MODEL_N).contains(&n) {
        return Err(Error::UnsupportedN { n, lo: 2, hi: MAX_MODEL_N });
    }
    Ok(())
}

fn all_words(n: usize) -> impl Iterator<Item = Word> + Clone {
    enumerate_words(n).expect("n already validated")
}

/// Renders a possibly empty bit segment for labels.
fn segment(bits: u32, len: usize) -> String {
    if len == 0 {
        "-".to_string()
    } else {
        Word::raw(bits, len).to_string()
    }
}

pub fn gen_c0(n: usize) -> Result<ConstraintFamily> {
    check_n(n)?;
    let rows = par::into_iter!(0..1u32 << (n - 1))
        .map(|c| {
            let center = Word::raw(c, n - 1);
            let terms = single_insertions(&center).into_iter().map(|x| (x, 1)).collect();
            LinearConstraint::new(format!("c0_y{center}"), terms, Sense::Le, 1)
        })
        .collect();
    Ok(ConstraintFamily::new(FamilyId::C0, rows))
}

pub fn gen_c1(n: usize) -> Result<ConstraintFamily> {
    check_n(n)?;
    let rhs = vt0_size(n)? as i64;
    let terms = all_words(n).map(|x| (x, 1)).collect();
    Ok(ConstraintFamily::new(FamilyId::C1, vec![LinearConstraint::new("c1".into(), terms, Sense::Ge, rhs)]))
}

fn sorted_surface(x: &Word) -> Vec<Word> {
    // single_deletions yields distinct words; sort for merge-based subset tests.
    let mut s: Vec<Word> = single_deletions(x).collect();
    s.sort_unstable();
    s
}

fn is_proper_subset(small: &[Word], big: &[Word]) -> bool {
    if small.len() >= big.len() {
        return false;
    }
    let mut it = big.iter();
    small.iter().all(|s| it.by_ref().any(|b| b == s))
}

/// A word `y` whose surface is a proper subset of `x`'s surface, if any.
///
/// Only words sharing a surface center with `x` can qualify, so candidates
/// are drawn from the insertions of `x`'s own deletions.
pub fn dominating_witness(x: &Word) -> Option<Word> {
    if x.len() < 2 {
        return None;
    }
    let sx = sorted_surface(x);
    sx.iter().flat_map(single_insertions).filter(|y| y != x).find(|y| is_proper_subset(&sorted_surface(y), &sx))
}

/// Words that some other word strictly dominates.
pub fn dominated_words(n: usize) -> Result<WordSet> {
    check_n(n)?;
    let words: Vec<Word> =
        par::into_iter!(0..1u32 << n).map(|v| Word::raw(v, n)).filter(|x| dominating_witness(x).is_some()).collect();
    WordSet::from_words(n, words)
}

pub fn gen_c2(n: usize) -> Result<ConstraintFamily> {
    let rows = dominated_words(n)?
        .iter()
        .map(|x| LinearConstraint::new(format!("c2_x{x}"), vec![(*x, 1)], Sense::Eq, 0))
        .collect();
    Ok(ConstraintFamily::new(FamilyId::C2, rows))
}

pub fn gen_c3(n: usize) -> Result<ConstraintFamily> {
    check_n(n)?;
    let zero = Word::zeros(n)?;
    let one = Word::ones(n)?;
    Ok(ConstraintFamily::new(
        FamilyId::C3,
        vec![
            LinearConstraint::new("c3_zero".into(), vec![(zero, 1)], Sense::Eq, 1),
            LinearConstraint::new("c3_one".into(), vec![(one, 1)], Sense::Eq, 1),
        ],
    ))
}

/// Low-weight words minus high-weight words, at least zero. For even n the
/// weight-n/2 words sit on both sides and cancel.
pub fn gen_c4(n: usize) -> Result<ConstraintFamily> {
    check_n(n)?;
    let terms = all_words(n)
        .filter_map(|x| {
            let twice = 2 * hamming_weight(&x);
            match twice.cmp(&n) {
                std::cmp::Ordering::Less => Some((x, 1)),
                std::cmp::Ordering::Greater => Some((x, -1)),
                std::cmp::Ordering::Equal => None,
            }
        })
        .collect();
    Ok(ConstraintFamily::new(FamilyId::C4, vec![LinearConstraint::new("c4".into(), terms, Sense::Ge, 0)]))
}

/// Words of length `n` with weight `w`, `alpha` 0-runs and `beta` 1-runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunClass {
    pub n: usize,
    pub w: usize,
    pub alpha: usize,
    pub beta: usize,
}

impl RunClass {
    pub fn new(n: usize, w: usize, alpha: usize, beta: usize) -> Self {
        RunClass { n, w, alpha, beta }
    }

    pub fn contains(&self, x: &Word) -> bool {
        x.len() == self.n
            && hamming_weight(x) == self.w
            && run_count(x, 0) == self.alpha
            && run_count(x, 1) == self.beta
    }

    /// Classes that cannot have members: run counts of the two symbols
    /// alternate, and there are no more 1-runs than 1s.
    pub fn is_trivially_empty(&self) -> bool {
        self.alpha.abs_diff(self.beta) > 1 || self.beta > self.w
    }
}

pub fn run_class_members(rc: &RunClass) -> Result<WordSet> {
    if rc.n == 0 || rc.n > crate::bitseq::MAX_LEN {
        return Err(Error::UnsupportedN { n: rc.n, lo: 1, hi: crate::bitseq::MAX_LEN });
    }
    if rc.is_trivially_empty() {
        return Ok(WordSet::new(rc.n));
    }
    WordSet::from_words(rc.n, all_words(rc.n).filter(|x| rc.contains(x)))
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Run-counting rows, one per weight `w` in `0..n`.
///
/// A chosen word of weight `w` covers `r(x,0)` words of weight `w` and length
/// n-1; one of weight `w+1` covers `r(x,1)` of them. These surfaces are
/// disjoint, so the total cannot exceed `C(n-1, w)`.
///
/// With `with_fixed_ends` (C3 also selected) the `w = 1` row drops its
/// weight-1 terms: every weight-1 word conflicts with the all-zero word.
pub fn gen_c5(n: usize, with_fixed_ends: bool) -> Result<ConstraintFamily> {
    check_n(n)?;
    let mut family = ConstraintFamily::new(FamilyId::C5, Vec::new());
    for w in 0..n {
        let strengthened = with_fixed_ends && w == 1;
        let terms: Vec<(Word, i64)> = all_words(n)
            .filter_map(|x| {
                let weight = hamming_weight(&x);
                if weight == w && !strengthened {
                    Some((x, run_count(&x, 0) as i64))
                } else if weight == w + 1 {
                    Some((x, run_count(&x, 1) as i64))
                } else {
                    None
                }
            })
            .collect();
        let rhs = if strengthened { n as i64 - 1 } else { binomial(n as u64 - 1, w as u64) as i64 };
        let label = format!("c5_w{w}");
        let max_lhs: i64 = terms.iter().map(|t| t.1.max(0)).sum();
        if max_lhs <= rhs {
            family.vacuous.push(label);
            continue;
        }
        family.constraints.push(LinearConstraint::new(label, terms, Sense::Le, rhs));
    }
    Ok(family)
}

/// Subcube rows: for each prefix `u` of length `p` and suffix `v` of length
/// `q`, the middles of length `r = n - p - q` hold at most `M(r)` words.
pub fn gen_c6(n: usize, p: usize, q: usize) -> Result<ConstraintFamily> {
    check_n(n)?;
    let bad = |reason: &str| Error::BadSplit { p, q, reason: reason.to_string() };
    if p + q == 0 {
        return Err(bad("p + q must be positive"));
    }
    if p + q + 2 > n {
        return Err(bad("middle length r = n - p - q must be at least 2"));
    }
    let r = n - p - q;
    let bound = known_max(r).ok_or_else(|| bad(&format!("M({r}) is not known")))? as i64;
    let pairs: Vec<(u32, u32)> = (0..1u32 << p).flat_map(|u| (0..1u32 << q).map(move |v| (u, v))).collect();
    let rows = par::into_iter!(pairs)
        .map(|(u, v)| {
            let terms = (0..1u32 << r).map(|m| (concat_bits(u, p, m, r, v, q), 1)).collect();
            let label = format!("c6_p{p}q{q}_u{}_v{}", segment(u, p), segment(v, q));
            LinearConstraint::new(label, terms, Sense::Le, bound)
        })
        .collect();
    let mut family = ConstraintFamily::new(FamilyId::C6, rows);
    family.split = Some((p, q));
    Ok(family)
}

/// All `(p, q)` with `1 <= p + q <= 2` whose middle length has a known `M`.
pub fn c6_preset(n: usize) -> Vec<(usize, usize)> {
    [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
        .into_iter()
        .filter(|&(p, q)| n >= p + q + 2 && known_max(n - p - q).is_some())
        .collect()
}

/// Assembles a maximize-cardinality model from the selected families.
///
/// `C0` is always included. `C6` rows come from `c6_splits`; if `C6` is
/// selected with no splits, [`c6_preset`] supplies them, and any split given
/// implies `C6`.
pub fn build_model(n: usize, selected: &[FamilyId], c6_splits: &[(usize, usize)]) -> Result<IlpModel> {
    check_n(n)?;
    let mut families: Vec<FamilyId> = selected.to_vec();
    families.push(FamilyId::C0);
    if !c6_splits.is_empty() {
        families.push(FamilyId::C6);
    }
    families.sort();
    families.dedup();

    let mut splits: Vec<(usize, usize)> = c6_splits.to_vec();
    if families.contains(&FamilyId::C6) && splits.is_empty() {
        splits = c6_preset(n);
    }
    let mut seen = std::collections::HashSet::new();
    splits.retain(|s| seen.insert(*s));

    let mut constraints = Vec::new();
    for &id in &families {
        let generated = match id {
            FamilyId::C0 => vec![gen_c0(n)?],
            FamilyId::C1 => vec![gen_c1(n)?],
            FamilyId::C2 => vec![gen_c2(n)?],
            FamilyId::C3 => vec![gen_c3(n)?],
            FamilyId::C4 => vec![gen_c4(n)?],
            FamilyId::C5 => vec![gen_c5(n, families.contains(&FamilyId::C3))?],
            FamilyId::C6 => splits.iter().map(|&(p, q)| gen_c6(n, p, q)).collect::<Result<_>>()?,
        };
        constraints.extend(generated.into_iter().flat_map(|f| f.constraints));
    }
    let metadata = ModelMetadata { families, c6_splits: splits, version: crate::VERSION.to_string() };
    Ok(IlpModel::new(n, constraints, metadata))
}
