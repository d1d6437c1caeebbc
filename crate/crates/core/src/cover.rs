//! Dense bitsets and the greedy clique-cover bound shared by both exact
//! solvers.
//!
//! A clique family is a list of vertex sets, each pairwise conflicting. At
//! most one vertex of a clique can be chosen, so covering a candidate set
//! with `k` cliques bounds the independent set inside it by `k`.

use std::time::{Duration, Instant};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) struct BitSet {
    blocks: Vec<u64>,
}

impl BitSet {
    pub fn new(capacity: usize) -> Self {
        BitSet { blocks: vec![0; capacity.div_ceil(64)] }
    }

    pub fn full(capacity: usize) -> Self {
        let mut s = BitSet::new(capacity);
        for i in 0..capacity {
            s.insert(i);
        }
        s
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.blocks[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.blocks[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.blocks[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    #[inline]
    pub fn first(&self) -> Option<usize> {
        self.blocks.iter().enumerate().find(|(_, &b)| b != 0).map(|(k, b)| k * 64 + b.trailing_zeros() as usize)
    }

    #[inline]
    pub fn intersection_count(&self, other: &BitSet) -> usize {
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    #[inline]
    pub fn copy_from(&mut self, other: &BitSet) {
        self.blocks.copy_from_slice(&other.blocks);
    }

    #[inline]
    pub fn intersect_with(&mut self, other: &BitSet) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= b;
        }
    }

    #[inline]
    pub fn difference_with(&mut self, other: &BitSet) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= !b;
        }
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(k, &b)| {
            let mut rest = b;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let t = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(k * 64 + t)
            })
        })
    }

    /// Calls `f` on each element of `self & other` in increasing order.
    #[inline]
    pub fn for_each_common(&self, other: &BitSet, mut f: impl FnMut(usize)) {
        for (k, (a, b)) in self.blocks.iter().zip(&other.blocks).enumerate() {
            let mut rest = a & b;
            while rest != 0 {
                f(k * 64 + rest.trailing_zeros() as usize);
                rest &= rest - 1;
            }
        }
    }
}

/// Cliques over a fixed vertex set with the reverse incidence.
#[derive(Clone, Debug)]
pub(crate) struct CliqueFamily {
    pub cliques: Vec<BitSet>,
    /// Clique ids containing each vertex.
    pub member_of: Vec<Vec<u32>>,
}

impl CliqueFamily {
    pub fn new(vertex_count: usize, cliques: Vec<Vec<usize>>) -> Self {
        let mut member_of = vec![Vec::new(); vertex_count];
        let sets = cliques
            .iter()
            .enumerate()
            .map(|(c, members)| {
                let mut s = BitSet::new(vertex_count);
                for &v in members {
                    s.insert(v);
                    member_of[v].push(c as u32);
                }
                s
            })
            .collect();
        CliqueFamily { cliques: sets, member_of }
    }

    /// Greedily covers `candidates`. The lowest remaining vertex seeds each
    /// clique, and among that vertex's cliques the one covering the most
    /// remaining candidates is used. Pushes `(vertex, class)` with classes
    /// numbered from 1 in nondecreasing order and returns the class count.
    ///
    /// Every candidate must belong to at least one clique.
    pub fn cover(&self, candidates: &BitSet, rest: &mut BitSet, out: &mut Vec<(u32, u32)>) -> u32 {
        rest.copy_from(candidates);
        let mut class = 0;
        while let Some(v) = rest.first() {
            let best = self.member_of[v]
                .iter()
                .map(|&c| &self.cliques[c as usize])
                .max_by_key(|c| c.intersection_count(rest))
                .expect("candidate without a covering clique");
            class += 1;
            rest.for_each_common(best, |u| out.push((u as u32, class)));
            rest.difference_with(best);
        }
        class
    }

    /// Class count of the greedy cover, without the per-vertex listing.
    pub fn cover_size(&self, candidates: &BitSet, rest: &mut BitSet) -> u32 {
        rest.copy_from(candidates);
        let mut class = 0;
        while let Some(v) = rest.first() {
            let best = self.member_of[v]
                .iter()
                .map(|&c| &self.cliques[c as usize])
                .max_by_key(|c| c.intersection_count(rest))
                .expect("candidate without a covering clique");
            class += 1;
            rest.difference_with(best);
        }
        class
    }
}

/// Node and wall-clock limits for the exact searches.
#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl SearchOptions {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn with_node_limit(mut self, nodes: u64) -> Self {
        self.node_limit = Some(nodes);
        self
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }
}

/// Budget check performed once per node; the clock is read every 256 nodes.
pub(crate) struct Budget {
    node_limit: u64,
    deadline: Option<Instant>,
}

impl Budget {
    pub fn new(opts: &SearchOptions) -> Self {
        Budget {
            node_limit: opts.node_limit.unwrap_or(u64::MAX),
            deadline: opts.time_limit.map(|d| Instant::now() + d),
        }
    }

    /// `nodes` is the total visited so far, including this one.
    #[inline]
    pub fn exhausted(&self, nodes: u64) -> bool {
        if nodes > self.node_limit {
            return true;
        }
        match self.deadline {
            Some(d) if nodes.is_multiple_of(256) => Instant::now() >= d,
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitset_basics() {
        let mut s = BitSet::new(130);
        assert!(s.is_empty());
        s.insert(3);
        s.insert(64);
        s.insert(129);
        assert_eq!(s.count(), 3);
        assert_eq!(s.first(), Some(3));
        assert_eq!(s.ones().collect::<Vec<_>>(), vec![3, 64, 129]);
        s.remove(3);
        assert_eq!(s.first(), Some(64));
        let mut t = BitSet::new(130);
        t.insert(129);
        assert_eq!(s.intersection_count(&t), 1);
        s.difference_with(&t);
        assert_eq!(s.ones().collect::<Vec<_>>(), vec![64]);
        assert_eq!(s.intersection_count(&t), 0);
        assert_eq!(BitSet::full(70).count(), 70);
    }

    #[test]
    fn cover_classes_are_cliques() {
        // Two triangles sharing vertex 2, plus a separate edge.
        let fam = CliqueFamily::new(6, vec![vec![0, 1, 2], vec![2, 3, 4], vec![4, 5]]);
        let cand = BitSet::full(6);
        let mut rest = BitSet::new(6);
        let mut out = Vec::new();
        let k = fam.cover(&cand, &mut rest, &mut out);
        assert_eq!(k, 3);
        assert_eq!(out.len(), 6);
        assert!(out.windows(2).all(|w| w[0].1 <= w[1].1));
        assert_eq!(fam.cover_size(&cand, &mut rest), 3);
    }
}
