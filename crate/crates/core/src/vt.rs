//! Varshamov-Tenengolts codes, their closed-form sizes, and perfectness.

use std::collections::BTreeSet;
use std::fmt;
use std::io::BufRead;

use crate::bitseq::{deletion_surface, enumerate_words, single_deletions, Word, WordSet, MAX_LEN};
use crate::error::{Error, Result};

/// A set of words sharing one length.
#[derive(Clone, PartialEq, Eq)]
pub struct Code {
    words: WordSet,
}

impl Code {
    pub fn new(words: WordSet) -> Self {
        Code { words }
    }

    pub fn empty(n: usize) -> Self {
        Code { words: WordSet::new(n) }
    }

    pub fn from_words<I: IntoIterator<Item = Word>>(n: usize, words: I) -> Result<Self> {
        WordSet::from_words(n, words).map(Code::new)
    }

    /// Parses whitespace-separated word strings; used mostly by tests.
    pub fn parse_list(s: &str) -> Result<Self> {
        Self::read(s.as_bytes())
    }

    /// Reads the exchange format: one word per line, blank lines and lines
    /// starting with `#` ignored. All words must share a length.
    pub fn read<R: BufRead>(input: R) -> Result<Self> {
        let mut words: Option<WordSet> = None;
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            for tok in line.split_whitespace() {
                let parse_err = |e: Error| Error::Parse { line: lineno + 1, msg: e.to_string() };
                let w: Word = tok.parse().map_err(parse_err)?;
                let set = words.get_or_insert_with(|| WordSet::new(w.len()));
                set.insert(w).map_err(parse_err)?;
            }
        }
        words.map(Code::new).ok_or(Error::Format("no codewords found".into()))
    }

    /// Writes the exchange format, one word per line in canonical order.
    pub fn write<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        for w in self.iter() {
            writeln!(out, "{w}")?;
        }
        Ok(())
    }

    /// Word length n.
    pub fn length(&self) -> usize {
        self.words.word_len()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Membership indicator `V(x, C)`.
    pub fn contains(&self, x: &Word) -> bool {
        self.words.contains(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Word> + '_ {
        self.words.iter()
    }

    pub fn words(&self) -> &WordSet {
        &self.words
    }
}

impl fmt::Debug for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Code(n={}, {:?})", self.length(), self.words)
    }
}

fn check_n(n: usize, hi: usize) -> Result<()> {
    if n == 0 || n > hi {
        return Err(Error::UnsupportedN { n, lo: 1, hi });
    }
    Ok(())
}

/// Checksum `x1 + 2 x2 + ... + n xn` reduced mod n+1.
pub fn vt_syndrome(x: &Word) -> usize {
    let n = x.len();
    x.symbols().enumerate().map(|(i, s)| (i + 1) * s as usize).sum::<usize>() % (n + 1)
}

/// `VT_a(n)`; `a` is reduced mod n+1 first.
pub fn vt_code(n: usize, a: i64) -> Result<Code> {
    check_n(n, MAX_LEN)?;
    let a = a.rem_euclid(n as i64 + 1) as usize;
    let words = enumerate_words(n)?.filter(|x| vt_syndrome(x) == a);
    Code::from_words(n, words)
}

/// Sizes of all `VT_a(n)`, indexed by `a`, from one pass over the words.
pub fn vt_class_sizes(n: usize) -> Result<Vec<usize>> {
    check_n(n, MAX_LEN)?;
    let mut sizes = vec![0; n + 1];
    for x in enumerate_words(n)? {
        sizes[vt_syndrome(&x)] += 1;
    }
    Ok(sizes)
}

fn prime_factors(mut d: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= d {
        if d.is_multiple_of(p) {
            out.push(p);
            while d.is_multiple_of(p) {
                d /= p;
            }
        }
        p += 1;
    }
    if d > 1 {
        out.push(d);
    }
    out
}

/// Euler's totient. `euler_phi(0)` is defined as 0.
pub fn euler_phi(d: u64) -> u64 {
    prime_factors(d).into_iter().fold(d, |acc, p| acc / p * (p - 1))
}

/// Möbius function.
pub fn moebius(d: u64) -> i8 {
    assert!(d >= 1, "moebius is defined for d >= 1");
    let mut rest = d;
    let mut sign = 1i8;
    for p in prime_factors(d) {
        rest /= p;
        if rest.is_multiple_of(p) {
            return 0;
        }
        sign = -sign;
    }
    sign
}

/// `(1 / 2(n+1)) * sum over odd d | n+1 of weight(d) * 2^((n+1)/d)`, exactly.
fn odd_divisor_sum(n: usize, weight: impl Fn(u64) -> i128) -> Result<u128> {
    check_n(n, 62)?;
    let m = n as u64 + 1;
    let sum: i128 =
        (1..=m).filter(|d| d % 2 == 1 && m.is_multiple_of(*d)).map(|d| weight(d) * (1i128 << (m / d))).sum();
    let divisor = 2 * m as u128;
    let sum = u128::try_from(sum).map_err(|_| Error::InexactDivision { n, sum: 0, divisor })?;
    if sum % divisor != 0 {
        return Err(Error::InexactDivision { n, sum, divisor });
    }
    Ok(sum / divisor)
}

/// `|VT_0(n)|` from the totient formula, for 1 <= n <= 62.
pub fn vt0_size(n: usize) -> Result<u64> {
    odd_divisor_sum(n, |d| euler_phi(d) as i128).map(|v| v as u64)
}

/// `|VT_1(n)|` from the Möbius formula, for 1 <= n <= 62.
pub fn vt1_size(n: usize) -> Result<u64> {
    odd_divisor_sum(n, |d| moebius(d) as i128).map(|v| v as u64)
}

/// Result of the two perfectness conditions for a code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Perfectness {
    /// Words of length n-1 covered by no member.
    pub uncovered: usize,
    /// Number of (member, surface element) incidences landing on an element
    /// already claimed by an earlier member.
    pub overlaps: usize,
    /// `|dS(x)|` for each member in canonical order.
    pub surface_sizes: Vec<usize>,
}

impl Perfectness {
    pub fn is_perfect(&self) -> bool {
        self.uncovered == 0 && self.overlaps == 0
    }
}

/// Checks covering and disjointness of the radius-1 surfaces separately.
pub fn perfectness(c: &Code) -> Result<Perfectness> {
    let n = c.length();
    if n < 2 {
        return Err(Error::UnsupportedN { n, lo: 2, hi: MAX_LEN });
    }
    let mut seen: BTreeSet<Word> = BTreeSet::new();
    let mut overlaps = 0;
    let mut surface_sizes = Vec::with_capacity(c.len());
    for x in c.iter() {
        let s = deletion_surface(x, 1)?;
        surface_sizes.push(s.len());
        for y in s.iter() {
            if !seen.insert(*y) {
                overlaps += 1;
            }
        }
    }
    let uncovered = (1usize << (n - 1)) - seen.len();
    Ok(Perfectness { uncovered, overlaps, surface_sizes })
}

/// True iff the surfaces of the members partition all words of length n-1.
pub fn is_perfect(c: &Code) -> bool {
    if c.length() < 2 {
        return false;
    }
    // Counting shortcut first: disjoint surfaces covering 2^(n-1) words must
    // have sizes summing to exactly 2^(n-1).
    let total: usize = c.iter().map(|x| single_deletions(x).count()).sum();
    if total != 1 << (c.length() - 1) {
        return false;
    }
    perfectness(c).map(|p| p.is_perfect()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vt0_of_five_is_the_listed_code() {
        let c = vt_code(5, 0).unwrap();
        let expected = Code::parse_list("00000 10001 01010 11011 11100 00111").unwrap();
        assert_eq!(c, expected);
        assert_eq!(vt_code(5, 3).unwrap().len(), 6);
        assert_eq!(vt_code(5, 6).unwrap(), c);
        assert_eq!(vt_code(5, -6).unwrap(), c);
    }

    #[test]
    fn length_one_codes() {
        assert_eq!(vt_code(1, 0).unwrap(), Code::parse_list("0").unwrap());
        assert_eq!(vt_code(1, 1).unwrap(), Code::parse_list("1").unwrap());
        assert!(vt_code(0, 0).is_err());
        assert!(vt_code(25, 0).is_err());
    }

    #[test]
    fn number_theory() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(9), 6);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(13), 12);
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(9), 0);
        assert_eq!(moebius(6), 1);
        assert_eq!(moebius(30), -1);
        assert_eq!(moebius(7), -1);
    }

    #[test]
    fn totient_against_gcd_count() {
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        for d in 1..200u64 {
            assert_eq!(euler_phi(d), (1..=d).filter(|&k| gcd(k, d) == 1).count() as u64, "{d}");
        }
    }

    #[test]
    fn size_formulas() {
        assert_eq!(vt0_size(8).unwrap(), 30);
        assert_eq!(vt0_size(11).unwrap(), 172);
        assert_eq!(vt0_size(15).unwrap(), 2048);
        assert_eq!(vt1_size(8).unwrap(), 28);
        assert_eq!(vt1_size(5).unwrap(), 5);
        assert_eq!(vt1_size(2).unwrap(), 1);
        for n in 1..=62 {
            assert!(vt0_size(n).unwrap() >= vt1_size(n).unwrap());
        }
        assert!(vt0_size(63).is_err());
        assert!(vt0_size(0).is_err());
    }

    #[test]
    fn perfect_codes() {
        assert!(is_perfect(&vt_code(5, 0).unwrap()));
        assert!(is_perfect(&vt_code(8, 0).unwrap()));
        assert!(!is_perfect(&Code::parse_list("00000 10001").unwrap()));
        let p = perfectness(&Code::parse_list("00000 10001").unwrap()).unwrap();
        assert_eq!(p.uncovered, 12);
        assert_eq!(p.overlaps, 0);
        // Covering but overlapping
        let all = Code::from_words(3, enumerate_words(3).unwrap()).unwrap();
        assert!(!is_perfect(&all));
    }

    #[test]
    fn exchange_format() {
        let text = "# a comment\n00000\n\n10001\n  01010  \n";
        let c = Code::read(text.as_bytes()).unwrap();
        assert_eq!(c.len(), 3);
        let mut buf = Vec::new();
        c.write(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "00000\n01010\n10001\n");
        assert!(Code::read("000\n01\n".as_bytes()).is_err());
        assert!(Code::read("# nothing\n".as_bytes()).is_err());
        assert!(matches!(Code::read("0x1\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
    }
}
