//! Binary words of bounded length and the combinatorics of single deletions.
//!
//! A [`Word`] packs `x1 x2 ... xn` into a `u32` so that `x1` is the most
//! significant of the `n` low bits. The numeric value of the packed bits is
//! therefore the rendered string read as a binary number, and the derived
//! ordering on words of one length is the canonical order.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Longest word the packed representation supports.
pub const MAX_LEN: usize = 24;

/// A binary word `x1 x2 ... xn` with `1 <= n <= MAX_LEN`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    // Field order matters for the derived `Ord`: length first, then value.
    len: u8,
    bits: u32,
}

impl Word {
    /// Builds a word from its numeric value (first symbol most significant).
    pub fn from_bits(bits: u32, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_LEN {
            return Err(Error::LengthOutOfRange { len, max: MAX_LEN });
        }
        if bits >> len != 0 {
            return Err(Error::BitsOverflow { bits, len });
        }
        Ok(Word { len: len as u8, bits })
    }

    /// Unchecked constructor for internal loops whose arguments are in range.
    #[inline]
    pub(crate) fn raw(bits: u32, len: usize) -> Self {
        debug_assert!((1..=MAX_LEN).contains(&len) && bits >> len == 0);
        Word { len: len as u8, bits }
    }

    /// The all-zero word of length `len`.
    pub fn zeros(len: usize) -> Result<Self> {
        Word::from_bits(0, len)
    }

    /// The all-one word of length `len`.
    pub fn ones(len: usize) -> Result<Self> {
        Word::zeros(len).map(|w| Word::raw(w.mask(), len))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    /// Words are never empty; provided for API symmetry with `len`.
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Packed value; also the word's index among words of its length.
    #[inline]
    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    #[inline]
    fn mask(&self) -> u32 {
        mask(self.len())
    }

    /// Symbol at 1-based position `i`.
    #[inline]
    pub fn symbol(&self, i: usize) -> u8 {
        assert!(i >= 1 && i <= self.len(), "position {i} outside 1..={}", self.len());
        ((self.bits >> (self.len() - i)) & 1) as u8
    }

    /// Iterates the symbols `x1, ..., xn`.
    pub fn symbols(&self) -> impl Iterator<Item = u8> + '_ {
        (1..=self.len()).map(move |i| self.symbol(i))
    }

    /// Removes the symbol at 1-based position `i`. Requires `len >= 2`.
    #[inline]
    pub fn delete_at(&self, i: usize) -> Word {
        let n = self.len();
        debug_assert!(n >= 2 && i >= 1 && i <= n);
        let tail = n - i;
        let high = self.bits >> (tail + 1);
        let low = self.bits & mask(tail);
        Word::raw((high << tail) | low, n - 1)
    }

    /// Inserts `symbol` so it lands at 1-based position `i` (1..=len+1).
    #[inline]
    pub(crate) fn insert_at(&self, i: usize, symbol: u8) -> Word {
        let n = self.len();
        debug_assert!(i >= 1 && i <= n + 1 && n < MAX_LEN);
        let tail = n + 1 - i;
        let high = self.bits >> tail;
        let low = self.bits & mask(tail);
        Word::raw((((high << 1) | symbol as u32) << tail) | low, n + 1)
    }
}

#[inline]
fn mask(len: usize) -> u32 {
    if len >= 32 {
        u32::MAX
    } else {
        (1u32 << len) - 1
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.symbols() {
            f.write_str(if s == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let len = s.len();
        if len == 0 || len > MAX_LEN {
            return Err(Error::LengthOutOfRange { len, max: MAX_LEN });
        }
        let mut bits = 0u32;
        for c in s.chars() {
            bits = (bits << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Error::BadWord(s.to_string())),
                };
        }
        Ok(Word::raw(bits, len))
    }
}

/// An ordered, duplicate-free set of words of a single length.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WordSet {
    len: usize,
    members: BTreeSet<Word>,
}

impl WordSet {
    pub fn new(len: usize) -> Self {
        WordSet { len, members: BTreeSet::new() }
    }

    /// Collects words, rejecting any whose length differs from `len`.
    pub fn from_words<I: IntoIterator<Item = Word>>(len: usize, words: I) -> Result<Self> {
        let mut set = WordSet::new(len);
        for w in words {
            set.insert(w)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, w: Word) -> Result<bool> {
        if w.len() != self.len {
            return Err(Error::LengthMismatch { expected: self.len, found: w.len() });
        }
        Ok(self.members.insert(w))
    }

    pub fn word_len(&self) -> usize {
        self.len
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.members.contains(w)
    }

    /// Members in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = &Word> + '_ {
        self.members.iter()
    }

    pub fn is_disjoint(&self, other: &WordSet) -> bool {
        self.members.is_disjoint(&other.members)
    }

    pub fn is_subset(&self, other: &WordSet) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn intersection<'a>(&'a self, other: &'a WordSet) -> impl Iterator<Item = &'a Word> + 'a {
        self.members.intersection(&other.members)
    }
}

impl fmt::Debug for WordSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members.iter().map(|w| w.to_string())).finish()
    }
}

impl<'a> IntoIterator for &'a WordSet {
    type Item = &'a Word;
    type IntoIter = std::collections::btree_set::Iter<'a, Word>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

pub fn hamming_weight(x: &Word) -> usize {
    x.bits().count_ones() as usize
}

/// Number of maximal blocks of `b` in `x`.
pub fn run_count(x: &Word, b: u8) -> usize {
    let n = x.len();
    let v = if b == 1 { x.bits() } else { !x.bits() & x.mask() };
    // Position 1 sits at bit n-1. A block begins at bit k when bit k is set and
    // bit k+1 (the previous position) is clear or absent.
    debug_assert!(v >> n == 0);
    (v & !(v >> 1)).count_ones() as usize
}

/// Total number of runs, which equals `|dS(x)|` for `len >= 2`.
pub fn total_runs(x: &Word) -> usize {
    run_count(x, 0) + run_count(x, 1)
}

/// Insertion/deletion distance: `len(x) + len(y) - 2 * lcs(x, y)`.
pub fn levenshtein_id(x: &Word, y: &Word) -> usize {
    x.len() + y.len() - 2 * lcs_len(x, y)
}

fn lcs_len(x: &Word, y: &Word) -> usize {
    let (m, n) = (x.len(), y.len());
    let mut prev = vec![0usize; n + 1];
    let mut cur = vec![0usize; n + 1];
    for i in 1..=m {
        let xi = x.symbol(i);
        for j in 1..=n {
            cur[j] = if xi == y.symbol(j) { prev[j - 1] + 1 } else { prev[j].max(cur[j - 1]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[n]
}

/// Distinct single-deletion results of `x`, in canonical order.
///
/// Deleting any symbol of a run gives the same word, so one deletion per run
/// suffices. Requires `len >= 2`.
pub(crate) fn single_deletions(x: &Word) -> impl Iterator<Item = Word> + '_ {
    let n = x.len();
    // The last position of each run; deleting there is representative.
    (1..=n).filter(move |&i| i == n || x.symbol(i) != x.symbol(i + 1)).map(move |i| x.delete_at(i))
}

/// `dS_t(x)`: all words of length `n - t` reachable by exactly `t` deletions.
pub fn deletion_surface(x: &Word, t: usize) -> Result<WordSet> {
    if t == 0 || t >= x.len() {
        return Err(Error::RadiusOutOfRange { t, len: x.len() });
    }
    let mut frontier: BTreeSet<Word> = BTreeSet::from([*x]);
    for _ in 0..t {
        frontier = frontier.iter().flat_map(|w| single_deletions(w).collect::<Vec<_>>()).collect();
    }
    WordSet::from_words(x.len() - t, frontier)
}

/// Distinct words of length `len + 1` whose surface contains `y`.
pub(crate) fn single_insertions(y: &Word) -> BTreeSet<Word> {
    let n = y.len();
    let mut out = BTreeSet::new();
    for i in 1..=n + 1 {
        for s in 0..=1u8 {
            out.insert(y.insert_at(i, s));
        }
    }
    out
}

/// Concatenates the parts left to right.
pub fn concat(parts: &[Word]) -> Result<Word> {
    let len: usize = parts.iter().map(Word::len).sum();
    if parts.is_empty() || len > MAX_LEN {
        return Err(Error::LengthOutOfRange { len, max: MAX_LEN });
    }
    let bits = parts.iter().fold(0u32, |acc, p| (acc << p.len()) | p.bits());
    Ok(Word::raw(bits, len))
}

/// Concatenation where the outer parts may be empty (`u` or `v` of length 0).
pub(crate) fn concat_bits(u: u32, p: usize, mid: u32, r: usize, v: u32, q: usize) -> Word {
    Word::raw((((u << r) | mid) << q) | v, p + r + q)
}

/// Bitwise complement `1 - x`.
pub fn complement(x: &Word) -> Word {
    Word::raw(!x.bits() & x.mask(), x.len())
}

/// Reversal `xn ... x1`.
pub fn reverse(x: &Word) -> Word {
    let n = x.len();
    Word::raw(x.bits().reverse_bits() >> (32 - n), n)
}

/// All `2^n` words of length `n` in canonical order.
pub fn enumerate_words(n: usize) -> Result<impl Iterator<Item = Word> + Clone> {
    if n == 0 || n > MAX_LEN {
        return Err(Error::LengthOutOfRange { len: n, max: MAX_LEN });
    }
    Ok((0..1u32 << n).map(move |b| Word::raw(b, n)))
}
