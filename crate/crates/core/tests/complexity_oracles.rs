use std::collections::HashSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use patcx::complexity::{check_pattern_sturmian, periodicity_scan, pstar, SearchBounds, SturmianVerdict};
use patcx::rotation::code;
use patcx::seqcore::{SequenceSource, SourceKind};
use patcx::RotationSpec;

/// Max over all canonical windows `{0} ∪ rest`, `rest ⊆ [1, d]`, `|rest| = n − 1`,
/// of the number of distinct words read at shifts `0..=s`.
fn brute_force(bits: &[bool], n: usize, d: usize, s: usize) -> usize {
    fn rec(bits: &[bool], window: &mut Vec<usize>, next: usize, n: usize, d: usize, s: usize, best: &mut usize) {
        if window.len() == n {
            let words: HashSet<Vec<bool>> = (0..=s).map(|m| window.iter().map(|&t| bits[m + t]).collect()).collect();
            *best = (*best).max(words.len());
            return;
        }
        for t in next..=d {
            window.push(t);
            rec(bits, window, t + 1, n, d, s, best);
            window.pop();
        }
    }
    let mut best = 0;
    rec(bits, &mut vec![0], 1, n, d, s, &mut best);
    best
}

fn source(bits: &[bool]) -> SequenceSource {
    let s: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
    SequenceSource::from_bit_str(&s).unwrap()
}

#[test]
fn engine_matches_exhaustive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..100 {
        // Mix of uniform and biased prefixes so that counts vary.
        let p = [0.5, 0.2, 0.08][case % 3];
        let bits: Vec<bool> = (0..200).map(|_| rng.gen_bool(p)).collect();
        let d = rng.gen_range(3..=12);
        let b = SearchBounds::for_prefix(200, 4, d, 1_000_000).unwrap();
        let cert = pstar(&source(&bits), &b).unwrap();
        assert!(cert.exhaustive);
        for n in 1..=4 {
            assert_eq!(
                cert.best_count(n).unwrap(),
                brute_force(&bits, n, d, b.shift_bound),
                "case {case}, n = {n}, d = {d}"
            );
        }
    }
}

#[test]
fn intro_example_window() {
    let x = SequenceSource::from_bit_str(&format!("010110{}", "1001010010".repeat(30))).unwrap();
    let cert = pstar(&x, &SearchBounds::new(2, 2, 3, 100).unwrap()).unwrap();
    assert_eq!(cert.best_count(2), Some(4));
    assert_eq!(cert.row(2).unwrap().best_window.offsets(), &[0, 2]);
}

fn complement_of(excluded: &'static [usize]) -> SequenceSource {
    SequenceSource::generator(SourceKind::AlmostConstant, "complement", move |n| Ok(!excluded.contains(&n)))
}

#[test]
fn finite_exceptions_are_refuted_on_consecutive_window() {
    let x = complement_of(&[0, 1, 2, 3, 5, 9, 10]);
    assert!(x.prefix(11).unwrap().to_bit_string().starts_with("00001011100"));
    let check = check_pattern_sturmian(&x, &SearchBounds::new(3, 12, 2000, 100_000).unwrap()).unwrap();
    assert_eq!(check.verdict, SturmianVerdict::Refuted);
    assert_eq!(check.refuting_n, Some(3));
    assert_eq!(check.refuting_window.unwrap().offsets(), &[0, 1, 2]);
    assert_eq!(check.refuting_count, Some(8));
}

#[test]
fn fibonacci_reaches_two_n_quickly() {
    let x = code(&RotationSpec::fibonacci());
    let cert = pstar(&x, &SearchBounds::new(6, 60, 5000, 20_000).unwrap()).unwrap();
    for n in 1..=6 {
        assert_eq!(cert.best_count(n), Some(2 * n), "n = {n}");
    }
    assert!(periodicity_scan(&x, 10_000).unwrap().is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn pruning_only_changes_explored_nodes(seed in 0u64..10_000, d in 3usize..10, p in 0.05f64..0.6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits: Vec<bool> = (0..160).map(|_| rng.gen_bool(p)).collect();
        let x = source(&bits);
        let b = SearchBounds::for_prefix(160, 4, d, 1_000_000).unwrap();
        let pruned = pstar(&x, &b).unwrap();
        let full = pstar(&x, &b.without_pruning()).unwrap();
        for n in 1..=4 {
            prop_assert_eq!(pruned.best_count(n), full.best_count(n));
        }
        prop_assert!(pruned.explored_nodes <= full.explored_nodes);
        prop_assert!(pruned.is_monotone());
    }

    #[test]
    fn certificates_are_monotone_under_tight_budgets(seed in 0u64..10_000, budget in 1usize..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits: Vec<bool> = (0..300).map(|_| rng.gen_bool(0.3)).collect();
        let b = SearchBounds::for_prefix(300, 5, 30, budget).unwrap();
        let cert = pstar(&source(&bits), &b).unwrap();
        prop_assert!(cert.is_monotone());
        for r in &cert.rows {
            prop_assert_eq!(r.best_window.size(), r.n);
            prop_assert_eq!(r.best_window.offsets()[0], 0);
            prop_assert!(r.best_window.diameter() <= 30);
        }
    }

    #[test]
    fn shifted_windows_see_no_new_patterns(t in 1usize..40, seed in 0u64..500) {
        // Translation containment on an unbounded generator: reading τ + t at
        // shifts ≤ S is reading τ at shifts in [t, S + t].
        let x = code(&RotationSpec::fibonacci());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut offs: Vec<usize> = (0..3).map(|_| rng.gen_range(1..30)).collect();
        offs.push(0);
        offs.sort_unstable();
        offs.dedup();
        let s = 3000;
        let canon = patcx::seqcore::pattern_set(&x, &offs, 0..=s + t).unwrap();
        let moved: Vec<usize> = offs.iter().map(|o| o + t).collect();
        let shifted = patcx::seqcore::pattern_set(&x, &moved, 0..=s).unwrap();
        prop_assert!(shifted.is_subset(&canon));
    }
}
