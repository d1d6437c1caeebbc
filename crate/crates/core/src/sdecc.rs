//! Validity, decoding, the conflict graph, bounds on `M(n)`, and an exact
//! branch-and-bound search for maximum single-deletion-correcting codes.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::bitseq::{enumerate_words, single_deletions, single_insertions, total_runs, Word};
use crate::cover::{BitSet, Budget, CliqueFamily, SearchOptions};
use crate::error::{Error, Result};
use crate::par;
#[allow(unused_imports)]
use crate::par::prelude::*;
use crate::vt::{vt0_size, vt_code, Code};

/// Outcome of [`is_sdecc`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// Two members whose surfaces share `shared`. `first < second`.
    Conflict {
        first: Word,
        second: Word,
        shared: Word,
    },
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Checks that no two members share a single-deletion result.
///
/// Members are scanned in canonical order; the reported conflict is the first
/// surface element claimed twice.
pub fn is_sdecc(c: &Code) -> Result<Validity> {
    let n = c.length();
    if n < 2 {
        return Err(Error::UnsupportedN { n, lo: 2, hi: crate::bitseq::MAX_LEN });
    }
    let mut owner: HashMap<Word, Word> = HashMap::new();
    for x in c.iter() {
        for y in single_deletions(x) {
            if let Some(&first) = owner.get(&y) {
                return Ok(Validity::Conflict { first, second: *x, shared: y });
            }
            owner.insert(y, *x);
        }
    }
    Ok(Validity::Valid)
}

/// Recovers the codeword that produced `y` by one deletion, if any.
///
/// Errors if `y` has the wrong length or if more than one codeword covers it,
/// which only happens when `c` is not single-deletion correcting.
pub fn decode_single(c: &Code, y: &Word) -> Result<Option<Word>> {
    if y.len() + 1 != c.length() {
        return Err(Error::LengthMismatch { expected: c.length() - 1, found: y.len() });
    }
    let mut hits = single_insertions(y).into_iter().filter(|x| c.contains(x));
    let first = hits.next();
    let extra = hits.count();
    if extra > 0 {
        return Err(Error::AmbiguousDecode(extra + 1));
    }
    Ok(first)
}

/// Graph on all words of length n with an edge wherever two surfaces meet.
#[derive(Clone, Debug)]
pub struct ConflictGraph {
    n: usize,
    /// Indexed by center value; members sorted canonically.
    cliques: Vec<Vec<Word>>,
    /// Indexed by word value; neighbor values sorted ascending.
    adjacency: Vec<Vec<u32>>,
}

pub const CONFLICT_GRAPH_MAX_N: usize = 14;

pub fn conflict_graph(n: usize) -> Result<ConflictGraph> {
    if !(2..=CONFLICT_GRAPH_MAX_N).contains(&n) {
        return Err(Error::UnsupportedN { n, lo: 2, hi: CONFLICT_GRAPH_MAX_N });
    }
    let cliques: Vec<Vec<Word>> = par::into_iter!(0..1u32 << (n - 1))
        .map(|c| single_insertions(&Word::raw(c, n - 1)).into_iter().collect())
        .collect();
    let adjacency: Vec<Vec<u32>> = par::into_iter!(0..1u32 << n)
        .map(|v| {
            let x = Word::raw(v, n);
            let mut nb: Vec<u32> = single_deletions(&x)
                .flat_map(|y| cliques[y.index()].iter().map(Word::bits))
                .filter(|&u| u != v)
                .collect();
            nb.sort_unstable();
            nb.dedup();
            nb
        })
        .collect();
    Ok(ConflictGraph { n, cliques, adjacency })
}

impl ConflictGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Word> + '_ {
        enumerate_words(self.n).expect("n validated at construction")
    }

    pub fn neighbors(&self, x: &Word) -> impl Iterator<Item = Word> + '_ {
        let n = self.n;
        self.adjacency[x.index()].iter().map(move |&u| Word::raw(u, n))
    }

    pub fn degree(&self, x: &Word) -> usize {
        self.adjacency[x.index()].len()
    }

    pub fn is_edge(&self, x: &Word, y: &Word) -> bool {
        self.adjacency[x.index()].binary_search(&y.bits()).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Words whose surface contains `center`: a clique of the graph.
    pub fn clique(&self, center: &Word) -> &[Word] {
        &self.cliques[center.index()]
    }

    pub fn cliques(&self) -> impl Iterator<Item = (Word, &[Word])> + '_ {
        let n = self.n;
        self.cliques.iter().enumerate().map(move |(c, m)| (Word::raw(c as u32, n - 1), m.as_slice()))
    }

    /// True iff no two of `words` are adjacent.
    pub fn is_independent(&self, words: &[Word]) -> bool {
        words.iter().enumerate().all(|(i, x)| words[i + 1..].iter().all(|y| x != y && !self.is_edge(x, y)))
    }
}

/// Formula bounds on `M(n)` alongside the reference table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsRecord {
    pub n: usize,
    /// `ceil(2^n / (n+1))`.
    pub lower_ratio: u64,
    /// `|VT_0(n)|`.
    pub lower_vt: u64,
    /// `floor((2^n - 2) / (n - 2))`.
    pub upper_kk: u64,
    pub known_m: Option<u64>,
    pub known_upper: Option<u64>,
}

impl BoundsRecord {
    /// Checks the chain `lower_ratio <= lower_vt <= known_m <= known_upper <= upper_kk`
    /// over whichever entries are present.
    pub fn is_consistent(&self) -> bool {
        let chain: Vec<u64> =
            [Some(self.lower_ratio), Some(self.lower_vt), self.known_m, self.known_upper, Some(self.upper_kk)]
                .into_iter()
                .flatten()
                .collect();
        chain.windows(2).all(|w| w[0] <= w[1])
    }
}

// (n, |VT_0(n)|, M(n), best known upper bound) for n = 2..=15.
const REFERENCE: [(usize, u64, Option<u64>, u64); 14] = [
    (2, 2, Some(2), 2),
    (3, 2, Some(2), 2),
    (4, 4, Some(4), 4),
    (5, 6, Some(6), 6),
    (6, 10, Some(10), 10),
    (7, 16, Some(16), 16),
    (8, 30, Some(30), 30),
    (9, 52, Some(52), 52),
    (10, 94, Some(94), 94),
    (11, 172, Some(172), 172),
    (12, 316, None, 320),
    (13, 586, None, 593),
    (14, 1096, None, 1104),
    (15, 2048, None, 2184),
];

/// Reference `M(n)`. Both words of length 1 delete to the empty word, so `M(1) = 1`.
pub fn known_max(n: usize) -> Option<u64> {
    if n == 1 {
        return Some(1);
    }
    REFERENCE.iter().find(|r| r.0 == n).and_then(|r| r.2)
}

/// Best known upper bound on `M(n)` from the reference table.
pub fn known_upper(n: usize) -> Option<u64> {
    if n == 1 {
        return Some(1);
    }
    REFERENCE.iter().find(|r| r.0 == n).map(|r| r.3)
}

/// Tabulated `|VT_0(n)|` for the reference rows, used to cross-check the formula.
pub fn reference_vt0(n: usize) -> Option<u64> {
    REFERENCE.iter().find(|r| r.0 == n).map(|r| r.1)
}

pub fn bounds(n: usize) -> Result<BoundsRecord> {
    if !(3..=62).contains(&n) {
        return Err(Error::UnsupportedN { n, lo: 3, hi: 62 });
    }
    let total = 1u64 << n;
    let m = n as u64;
    Ok(BoundsRecord {
        n,
        lower_ratio: total.div_ceil(m + 1),
        lower_vt: vt0_size(n)?,
        upper_kk: (total - 2) / (m - 2),
        known_m: known_max(n),
        known_upper: known_upper(n),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProofStatus {
    Optimal,
    BoundLimited,
}

impl std::fmt::Display for ProofStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProofStatus::Optimal => "optimal",
            ProofStatus::BoundLimited => "bound-limited",
        })
    }
}

/// Options for [`max_sdecc_exact`].
#[derive(Debug, Clone, Default)]
pub struct ExactOptions {
    pub search: SearchOptions,
    /// Starting code; used instead of `VT_0(n)` when it is valid and larger.
    pub incumbent: Option<Code>,
}

#[derive(Debug, Clone)]
pub struct ExactResult {
    pub n: usize,
    pub size: usize,
    pub witness: Code,
    pub status: ProofStatus,
    pub nodes: u64,
}

/// Largest length the exact search accepts. Anything past 11 is hopeless on a
/// desktop; the limit only guards memory.
pub const EXACT_MAX_N: usize = 12;

/// Computes `M(n)` by maximum independent set search on the conflict graph.
///
/// Vertices are ordered by ascending surface size, ties canonical. Each node
/// partitions its candidates greedily into center cliques; candidates are
/// branched on from the highest class down, and a branch whose
/// `chosen + class` cannot beat the incumbent ends the node.
pub fn max_sdecc_exact(n: usize, options: &ExactOptions) -> Result<ExactResult> {
    if n == 1 {
        return Ok(ExactResult { n, size: 1, witness: vt_code(1, 0)?, status: ProofStatus::Optimal, nodes: 0 });
    }
    if !(2..=EXACT_MAX_N).contains(&n) {
        return Err(Error::UnsupportedN { n, lo: 1, hi: EXACT_MAX_N });
    }
    let graph = conflict_graph(n)?;
    let search = MisSearch::new(&graph);

    let mut incumbent = vt_code(n, 0)?;
    if let Some(c) = &options.incumbent {
        if c.length() != n {
            return Err(Error::LengthMismatch { expected: n, found: c.length() });
        }
        if c.len() > incumbent.len() && is_sdecc(c)?.is_valid() {
            incumbent = c.clone();
        }
    }

    let budget = Budget::new(&options.search);
    let outcome = search.run(incumbent.len(), None, &budget);
    let complete = !outcome.stopped;

    let mut nodes = outcome.nodes;
    let witness = match outcome.found {
        None => incumbent,
        Some(labels) => {
            let labels = if par::is_parallel() && complete {
                // Concurrent branches race to report equal-size codes; a
                // sequential search targeting the proven size picks one
                // deterministically.
                let rerun = search.run_sequential(
                    outcome.best - 1,
                    Some(outcome.best),
                    &Budget::new(&SearchOptions::unlimited()),
                );
                nodes += rerun.nodes;
                rerun.found.expect("a code of the proven size exists")
            } else {
                labels
            };
            search.to_code(&labels)?
        }
    };
    debug_assert!(is_sdecc(&witness)?.is_valid());
    Ok(ExactResult {
        n,
        size: witness.len(),
        witness,
        status: if complete { ProofStatus::Optimal } else { ProofStatus::BoundLimited },
        nodes,
    })
}

/// The conflict graph relabelled into branching order, as dense bitsets.
struct MisSearch {
    n: usize,
    /// Label -> word value.
    words: Vec<u32>,
    /// Label -> candidates that stay after choosing it (outside its closed neighborhood).
    keep: Vec<BitSet>,
    family: CliqueFamily,
}

struct Outcome {
    best: usize,
    found: Option<Vec<u32>>,
    nodes: u64,
    stopped: bool,
}

struct Shared<'a> {
    best: AtomicUsize,
    found: Mutex<Option<Vec<u32>>>,
    nodes: AtomicU64,
    stop: AtomicBool,
    target: Option<usize>,
    budget: &'a Budget,
}

impl Shared<'_> {
    fn record(&self, chosen: &[u32]) {
        let mut found = self.found.lock().expect("poisoned");
        if chosen.len() > self.best.load(Ordering::SeqCst) {
            self.best.store(chosen.len(), Ordering::SeqCst);
            *found = Some(chosen.to_vec());
            if self.target.is_some_and(|t| chosen.len() >= t) {
                self.stop.store(true, Ordering::SeqCst);
            }
        }
    }
}

struct Level {
    candidates: BitSet,
    rest: BitSet,
    order: Vec<(u32, u32)>,
}

impl Level {
    fn new(size: usize) -> Self {
        Level { candidates: BitSet::new(size), rest: BitSet::new(size), order: Vec::new() }
    }
}

impl MisSearch {
    fn new(g: &ConflictGraph) -> Self {
        let n = g.n();
        let count = g.vertex_count();
        let mut words: Vec<u32> = (0..count as u32).collect();
        words.sort_by_key(|&v| (total_runs(&Word::raw(v, n)), v));
        let mut label = vec![0usize; count];
        for (l, &v) in words.iter().enumerate() {
            label[v as usize] = l;
        }
        let keep = words
            .iter()
            .map(|&v| {
                let mut s = BitSet::full(count);
                s.remove(label[v as usize]);
                for &u in &g.adjacency[v as usize] {
                    s.remove(label[u as usize]);
                }
                s
            })
            .collect();
        let cliques = g.cliques.iter().map(|m| m.iter().map(|w| label[w.index()]).collect()).collect();
        MisSearch { n, words, keep, family: CliqueFamily::new(count, cliques) }
    }

    fn size(&self) -> usize {
        self.words.len()
    }

    fn to_code(&self, labels: &[u32]) -> Result<Code> {
        Code::from_words(self.n, labels.iter().map(|&l| Word::raw(self.words[l as usize], self.n)))
    }

    /// Searches for an independent set larger than `best`. With `target`, stops
    /// at the first set of at least that size.
    fn run(&self, best: usize, target: Option<usize>, budget: &Budget) -> Outcome {
        if par::is_parallel() {
            self.run_split(best, target, budget)
        } else {
            self.run_sequential(best, target, budget)
        }
    }

    fn shared<'a>(&self, best: usize, target: Option<usize>, budget: &'a Budget) -> Shared<'a> {
        Shared {
            best: AtomicUsize::new(best),
            found: Mutex::new(None),
            nodes: AtomicU64::new(0),
            stop: AtomicBool::new(false),
            target,
            budget,
        }
    }

    fn finish(shared: Shared<'_>) -> Outcome {
        Outcome {
            best: shared.best.load(Ordering::SeqCst),
            found: shared.found.into_inner().expect("poisoned"),
            nodes: shared.nodes.load(Ordering::SeqCst),
            stopped: shared.stop.load(Ordering::SeqCst) && shared.target.is_none(),
        }
    }

    fn levels(&self) -> Vec<Level> {
        // Depth never exceeds the root cover size, which bounds any independent set.
        let size = self.size();
        let mut rest = BitSet::new(size);
        let depth = self.family.cover_size(&BitSet::full(size), &mut rest) as usize + 2;
        (0..depth).map(|_| Level::new(size)).collect()
    }

    fn run_sequential(&self, best: usize, target: Option<usize>, budget: &Budget) -> Outcome {
        let shared = self.shared(best, target, budget);
        let mut levels = self.levels();
        levels[0].candidates = BitSet::full(self.size());
        self.expand(&shared, &mut levels, &mut Vec::new());
        Self::finish(shared)
    }

    /// Splits the root node into independent subtrees run on the rayon pool.
    fn run_split(&self, best: usize, target: Option<usize>, budget: &Budget) -> Outcome {
        let shared = self.shared(best, target, budget);
        let size = self.size();
        let full = BitSet::full(size);
        let mut root = Level::new(size);
        self.family.cover(&full, &mut root.rest, &mut root.order);
        shared.nodes.fetch_add(1, Ordering::SeqCst);
        let order = root.order;
        let tasks: Vec<usize> = (0..order.len()).rev().collect();
        par::into_iter!(tasks).for_each(|idx| {
            let (v, class) = order[idx];
            if class as usize <= shared.best.load(Ordering::SeqCst) || shared.stop.load(Ordering::SeqCst) {
                return;
            }
            // Vertices branched on before this one (higher positions) are excluded.
            let mut levels = self.levels();
            let mut cand = BitSet::new(size);
            for &(u, _) in &order[..idx] {
                cand.insert(u as usize);
            }
            cand.intersect_with(&self.keep[v as usize]);
            let mut chosen = vec![v];
            if cand.is_empty() {
                shared.record(&chosen);
                return;
            }
            levels[0].candidates = cand;
            self.expand(&shared, &mut levels, &mut chosen);
        });
        Self::finish(shared)
    }

    fn expand(&self, shared: &Shared<'_>, levels: &mut [Level], chosen: &mut Vec<u32>) {
        let nodes = shared.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if shared.budget.exhausted(nodes) {
            shared.stop.store(true, Ordering::SeqCst);
            return;
        }
        let (level, deeper) = levels.split_first_mut().expect("depth bound");
        level.order.clear();
        self.family.cover(&level.candidates, &mut level.rest, &mut level.order);
        for idx in (0..level.order.len()).rev() {
            let (v, class) = level.order[idx];
            if chosen.len() + class as usize <= shared.best.load(Ordering::Relaxed)
                || shared.stop.load(Ordering::Relaxed)
            {
                return;
            }
            chosen.push(v);
            let next = &mut deeper[0];
            next.candidates.copy_from(&level.candidates);
            next.candidates.intersect_with(&self.keep[v as usize]);
            if next.candidates.is_empty() {
                if chosen.len() > shared.best.load(Ordering::Relaxed) {
                    shared.record(chosen);
                }
            } else {
                self.expand(shared, deeper, chosen);
            }
            chosen.pop();
            level.candidates.remove(v as usize);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn listed_code_is_valid() {
        let c = Code::parse_list("00000 10001 01010 11011 11100 00111").unwrap();
        assert!(is_sdecc(&c).unwrap().is_valid());
        assert!(is_sdecc(&Code::parse_list("0110").unwrap()).unwrap().is_valid());
    }

    #[test]
    fn conflict_witness() {
        let c = Code::parse_list("00000 10000").unwrap();
        assert_eq!(
            is_sdecc(&c).unwrap(),
            Validity::Conflict { first: w("00000"), second: w("10000"), shared: w("0000") }
        );
        assert!(is_sdecc(&Code::parse_list("0 1").unwrap()).is_err());
    }

    #[test]
    fn decoding() {
        let c = vt_code(5, 0).unwrap();
        assert_eq!(decode_single(&c, &w("1001")).unwrap(), Some(w("10001")));
        assert_eq!(decode_single(&c, &w("0000")).unwrap(), Some(w("00000")));
        let c = Code::parse_list("00000 11111").unwrap();
        assert_eq!(decode_single(&c, &w("1010")).unwrap(), None);
        assert!(decode_single(&c, &w("101")).is_err());
        let bad = Code::parse_list("00000 10000").unwrap();
        assert_eq!(decode_single(&bad, &w("0000")), Err(Error::AmbiguousDecode(2)));
    }

    #[test]
    fn graph_for_two() {
        let g = conflict_graph(2).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert!(g.is_edge(&w("01"), &w("10")));
        assert!(g.is_edge(&w("00"), &w("01")));
        assert!(g.is_edge(&w("00"), &w("10")));
        assert!(!g.is_edge(&w("00"), &w("11")));
        assert_eq!(g.clique(&w("0")), &[w("00"), w("01"), w("10")]);
        assert_eq!(g.edge_count(), 5);
        assert!(conflict_graph(1).is_err());
        assert!(conflict_graph(15).is_err());
    }

    #[test]
    fn bounds_rows() {
        let b = bounds(11).unwrap();
        assert_eq!(
            (b.lower_ratio, b.lower_vt, b.known_m, b.known_upper, b.upper_kk),
            (171, 172, Some(172), Some(172), 227)
        );
        let b = bounds(12).unwrap();
        assert_eq!((b.lower_vt, b.known_m, b.known_upper), (316, None, Some(320)));
        assert_eq!(bounds(8).unwrap().known_m, Some(30));
        assert!(bounds(2).is_err());
        assert!(bounds(40).unwrap().is_consistent());
    }

    #[test]
    fn small_exact_values() {
        for (n, m) in [(1, 1), (2, 2), (3, 2), (4, 4), (5, 6), (6, 10)] {
            let r = max_sdecc_exact(n, &ExactOptions::default()).unwrap();
            assert_eq!(r.size, m, "n={n}");
            assert_eq!(r.status, ProofStatus::Optimal);
            if n >= 2 {
                assert!(is_sdecc(&r.witness).unwrap().is_valid());
            }
        }
    }

    #[test]
    fn node_budget_reports_bound_limited() {
        let opts = ExactOptions { search: SearchOptions::unlimited().with_node_limit(3), incumbent: None };
        let r = max_sdecc_exact(7, &opts).unwrap();
        assert_eq!(r.status, ProofStatus::BoundLimited);
        assert!(is_sdecc(&r.witness).unwrap().is_valid());
        assert!(r.size >= 16);
    }

    #[test]
    fn weak_incumbent_is_ignored() {
        let opts =
            ExactOptions { search: SearchOptions::unlimited(), incumbent: Some(Code::parse_list("000").unwrap()) };
        assert_eq!(max_sdecc_exact(3, &opts).unwrap().size, 2);
        let opts =
            ExactOptions { search: SearchOptions::unlimited(), incumbent: Some(Code::parse_list("0000").unwrap()) };
        assert!(max_sdecc_exact(3, &opts).is_err());
    }
}
