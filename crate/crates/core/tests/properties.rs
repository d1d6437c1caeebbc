use std::collections::{BTreeMap, BTreeSet};

use proptest::collection::vec;
use proptest::prelude::*;
use proptest::sample::subsequence;

use sdecc_core::bitseq::{
    complement, deletion_surface, enumerate_words, hamming_weight, levenshtein_id, reverse, run_count, total_runs,
};
use sdecc_core::constraints::{build_model, gen_c0, gen_c6, FamilyId};
use sdecc_core::ilp::{read_lp, solve_builtin, verify_solution, write_lp_string, SolverStatus};
use sdecc_core::sdecc::{conflict_graph, decode_single, is_sdecc, max_sdecc_exact, ExactOptions};
use sdecc_core::vt::{vt0_size, vt_class_sizes, vt_code};
use sdecc_core::{Code, SearchOptions, Word};

fn word_of_len(max: usize) -> impl Strategy<Value = Word> {
    (2..=max).prop_flat_map(|n| (0..1u32 << n).prop_map(move |b| Word::from_bits(b, n).unwrap()))
}

fn word_pair(max: usize) -> impl Strategy<Value = (Word, Word)> {
    (2..=max).prop_flat_map(|n| {
        let w = move |b| Word::from_bits(b, n).unwrap();
        (0..1u32 << n, 0..1u32 << n).prop_map(move |(a, b)| (w(a), w(b)))
    })
}

fn text(x: &Word) -> String {
    x.to_string()
}

fn naive_deletions(x: &Word) -> BTreeSet<String> {
    let s = text(x);
    (0..s.len()).map(|i| format!("{}{}", &s[..i], &s[i + 1..])).collect()
}

fn surface_text(x: &Word) -> BTreeSet<String> {
    deletion_surface(x, 1).unwrap().iter().map(text).collect()
}

fn all_words(n: usize) -> Vec<Word> {
    enumerate_words(n).unwrap().collect()
}

/// Rows as sets of member bit patterns, ignoring labels.
fn row_sets(rows: &[sdecc_core::constraints::LinearConstraint], f: impl Fn(&Word) -> Word) -> BTreeSet<Vec<u32>> {
    rows.iter()
        .map(|c| {
            let mut v: Vec<u32> = c.terms.iter().map(|t| f(&t.0).bits()).collect();
            v.sort_unstable();
            v
        })
        .collect()
}

proptest! {
    #[test]
    fn surface_size_is_run_count(x in word_of_len(16)) {
        let s = deletion_surface(&x, 1).unwrap();
        prop_assert_eq!(s.len(), total_runs(&x));
        prop_assert_eq!(surface_text(&x), naive_deletions(&x));
    }

    #[test]
    fn levenshtein_is_symmetric_and_even((x, y) in word_pair(10)) {
        let d = levenshtein_id(&x, &y);
        prop_assert_eq!(d, levenshtein_id(&y, &x));
        prop_assert_eq!(d % 2, 0);
        prop_assert_eq!(d == 0, x == y);
        // Nonempty common single-deletion surfaces are exactly distance 2.
        let shared = !surface_text(&x).is_disjoint(&surface_text(&y));
        prop_assert_eq!(shared && x != y, d == 2);
    }

    #[test]
    fn complement_and_reverse_commute_with_deletion(x in word_of_len(14)) {
        let via_complement: BTreeSet<String> =
            deletion_surface(&x, 1).unwrap().iter().map(|y| text(&complement(y))).collect();
        prop_assert_eq!(via_complement, surface_text(&complement(&x)));
        let via_reverse: BTreeSet<String> =
            deletion_surface(&x, 1).unwrap().iter().map(|y| text(&reverse(y))).collect();
        prop_assert_eq!(via_reverse, surface_text(&reverse(&x)));
    }

    #[test]
    fn run_counts_are_balanced(x in word_of_len(20)) {
        let (zeros, ones) = (run_count(&x, 0), run_count(&x, 1));
        prop_assert!(zeros.abs_diff(ones) <= 1);
        prop_assert!(ones <= hamming_weight(&x));
        prop_assert!(zeros <= x.len() - hamming_weight(&x));
        prop_assert_eq!(zeros + ones, total_runs(&x));
    }

    #[test]
    fn display_and_parse_round_trip(x in word_of_len(24)) {
        let back: Word = text(&x).parse().unwrap();
        prop_assert_eq!(back, x);
        prop_assert_eq!(complement(&complement(&x)), x);
        prop_assert_eq!(reverse(&reverse(&x)), x);
    }

    #[test]
    fn decoding_recovers_any_single_deletion(n in 2usize..=10, a_raw in 0i64..11, pick in any::<prop::sample::Index>(), pos in any::<prop::sample::Index>()) {
        let a = a_raw % (n as i64 + 1);
        let code = vt_code(n, a).unwrap();
        let words: Vec<Word> = code.iter().copied().collect();
        prop_assume!(!words.is_empty());
        let x = *pick.get(&words);
        let y = x.delete_at(pos.index(n) + 1);
        prop_assert_eq!(decode_single(&code, &y).unwrap(), Some(x));
    }

    #[test]
    fn independent_sets_are_exactly_codes(n in 2usize..=6, picks in vec(any::<prop::sample::Index>(), 0..12)) {
        let words = all_words(n);
        let chosen: BTreeSet<Word> = picks.iter().map(|i| *i.get(&words)).collect();
        let list: Vec<Word> = chosen.iter().copied().collect();
        let g = conflict_graph(n).unwrap();
        let code = Code::from_words(n, list.iter().copied()).unwrap();
        prop_assert_eq!(g.is_independent(&list), is_sdecc(&code).unwrap().is_valid());
    }

    #[test]
    fn subsets_of_codes_are_codes(n in 2usize..=9, a_raw in 0i64..10, keep in subsequence((0..60usize).collect::<Vec<_>>(), 0..20)) {
        let a = a_raw % (n as i64 + 1);
        let code = vt_code(n, a).unwrap();
        let words: Vec<Word> = code.iter().copied().collect();
        let sub = keep.iter().filter(|&&i| i < words.len()).map(|&i| words[i]);
        prop_assert!(is_sdecc(&Code::from_words(n, sub).unwrap()).unwrap().is_valid());
    }
}

#[test]
fn vt0_size_matches_enumeration() {
    for n in 1..=16 {
        let sizes = vt_class_sizes(n).unwrap();
        assert_eq!(sizes.iter().sum::<usize>(), 1 << n);
        assert_eq!(vt0_size(n).unwrap() as usize, sizes[0]);
        assert_eq!(sizes.iter().max(), Some(&sizes[0]), "VT_0 is a largest class at {n}");
    }
}

#[test]
fn every_vt_class_is_a_code() {
    for n in 2..=10 {
        for a in 0..=n as i64 {
            let c = vt_code(n, a).unwrap();
            assert!(is_sdecc(&c).unwrap().is_valid(), "VT_{a}({n})");
            assert_eq!(vt_code(n, a + n as i64 + 1).unwrap(), c);
        }
    }
}

#[test]
fn exact_witnesses_are_codes() {
    for n in 1..=7 {
        let r = max_sdecc_exact(n, &ExactOptions::default()).unwrap();
        assert_eq!(r.witness.len(), r.size);
        if n >= 2 {
            assert!(is_sdecc(&r.witness).unwrap().is_valid());
        }
    }
}

#[test]
fn exact_search_keeps_a_larger_valid_incumbent() {
    // A valid code smaller than VT_0 is ignored; one of the wrong length is an error.
    let small = Code::parse_list("000000 111111").unwrap();
    let opts = ExactOptions { incumbent: Some(small), ..Default::default() };
    assert_eq!(max_sdecc_exact(6, &opts).unwrap().size, 10);
    let wrong = Code::parse_list("00000").unwrap();
    let opts = ExactOptions { incumbent: Some(wrong), ..Default::default() };
    assert!(max_sdecc_exact(6, &opts).is_err());
}

#[test]
fn c0_variable_appears_once_per_surface_word() {
    for n in 2..=10 {
        let fam = gen_c0(n).unwrap();
        assert_eq!(fam.len(), 1 << (n - 1));
        let mut appearances: BTreeMap<Word, usize> = BTreeMap::new();
        for c in &fam.constraints {
            for (w, coef) in &c.terms {
                assert_eq!(*coef, 1);
                *appearances.entry(*w).or_default() += 1;
            }
        }
        assert_eq!(appearances.len(), 1 << n, "every variable appears at n = {n}");
        for (x, k) in appearances {
            assert_eq!(k, naive_deletions(&x).len());
        }
    }
}

#[test]
fn c0_and_c6_are_complement_symmetric() {
    for n in 2..=8 {
        let rows = gen_c0(n).unwrap().constraints;
        assert_eq!(row_sets(&rows, |w| *w), row_sets(&rows, complement));
        for (p, q) in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1)] {
            let Ok(fam) = gen_c6(n, p, q) else { continue };
            assert_eq!(row_sets(&fam.constraints, |w| *w), row_sets(&fam.constraints, complement));
            // The row for (u, v) maps onto the row for the complemented segments.
            let by_label: BTreeMap<&str, Vec<u32>> = fam
                .constraints
                .iter()
                .map(|c| {
                    let mut v: Vec<u32> = c.terms.iter().map(|t| t.0.bits()).collect();
                    v.sort_unstable();
                    (c.label.as_str(), v)
                })
                .collect();
            let flip = |s: &str| {
                s.chars()
                    .map(|c| match c {
                        '0' => '1',
                        '1' => '0',
                        o => o,
                    })
                    .collect::<String>()
            };
            for c in &fam.constraints {
                let (head, segs) = c.label.split_once("_u").unwrap();
                let (u, v) = segs.split_once("_v").unwrap();
                let mirror = format!("{head}_u{}_v{}", flip(u), flip(v));
                let mut comp: Vec<u32> = c.terms.iter().map(|t| complement(&t.0).bits()).collect();
                comp.sort_unstable();
                assert_eq!(by_label[mirror.as_str()], comp, "{} at n = {n}", c.label);
            }
        }
    }
}

fn family_subsets() -> Vec<Vec<FamilyId>> {
    use FamilyId::*;
    let extra = [C1, C2, C3, C4, C5, C6];
    (0..1u32 << extra.len())
        .map(|mask| {
            let mut f = vec![C0];
            f.extend((0..extra.len()).filter(|i| mask >> i & 1 == 1).map(|i| extra[i]));
            f
        })
        .collect()
}

#[test]
fn lp_round_trip() {
    for n in 2..=6 {
        for families in family_subsets() {
            let model = build_model(n, &families, &[]).unwrap();
            let text = write_lp_string(&model);
            let back = read_lp(text.as_bytes()).unwrap();
            assert_eq!(back, model, "n = {n}, {families:?}");
            assert_eq!(write_lp_string(&back), text);
        }
    }
}

#[test]
fn verification_accepts_solver_output() {
    for n in 2..=6 {
        for families in family_subsets() {
            let model = build_model(n, &families, &[]).unwrap();
            let s = solve_builtin(&model, &SearchOptions::unlimited()).unwrap();
            assert_eq!(s.status, SolverStatus::Optimal);
            let r = verify_solution(&model, &s);
            assert!(r.passed(), "n = {n}, {families:?}\n{r}");
        }
    }
}
