use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use patcx::complexity::{pstar, SearchBounds};
use patcx::seqcore::Word;
use patcx::toeplitz::{
    build_mef_partition, generate, hole_count, mef_code, nearly_simple, odometer_add, three_window, FillRule,
    HolePolicy, OdometerPoint, PeriodStructure, SimpleToeplitzSpec, Stream, ToeplitzSpec,
};
use patcx::Error;

/// `x(n) = (s mod 3) − 1` for `n + 1 = 3^r·s`, `3 ∤ s`.
fn ternary_formula(n: usize) -> bool {
    let mut m = n + 1;
    while m % 3 == 0 {
        m /= 3;
    }
    m % 3 == 2
}

#[test]
fn ternary_spec_matches_closed_formula() {
    let x = generate(&ToeplitzSpec::ternary_example(), HolePolicy::default());
    let tape = x.prefix(20_000).unwrap();
    for n in 0..20_000 {
        assert_eq!(tape.get(n), ternary_formula(n), "n = {n}");
    }
}

/// Periods `2^k`, hole 0 at every level, letter `a_k` at level `k`: the
/// letter at `m ≥ 1` is decided at level `v₂(m) + 1`.
#[test]
fn two_adic_valuation_oracle() {
    let letters = vec![0u8, 1, 1, 0, 1, 0, 0, 0, 1];
    let spec = SimpleToeplitzSpec::new(
        PeriodStructure::geometric(2).unwrap(),
        Stream::cycle(letters.clone()),
        Stream::cycle(vec![0]),
    )
    .unwrap();
    let x = generate(&spec.to_spec().unwrap(), HolePolicy::Bit(false));
    for m in 1..5000usize {
        let k = m.trailing_zeros() as usize;
        assert_eq!(x.eval(m).unwrap(), letters[k % letters.len()] == 1, "m = {m}");
    }
}

/// A finite spec with random periods, random kept holes and random fills.
fn random_spec(rng: &mut ChaCha8Rng) -> ToeplitzSpec {
    let depth = rng.gen_range(4..=7);
    let mut list = Vec::new();
    let mut n = 1u64;
    for _ in 0..depth {
        n *= rng.gen_range(2..=3);
        list.push(n);
    }
    let periods = PeriodStructure::new(list.clone(), None).unwrap();
    let mut holes = vec![0u64];
    let mut prev = 1u64;
    let mut levels = Vec::new();
    for &period in &list {
        let mut lifts: Vec<u64> = holes
            .iter()
            .flat_map(|&h| (0..period / prev).map(move |j| h + j * prev))
            .collect();
        lifts.sort_unstable();
        let keep = rng.gen_range(1..=2usize.min(lifts.len() - 1));
        let mut kept = Vec::new();
        while kept.len() < keep {
            let r = lifts[rng.gen_range(0..lifts.len())];
            if !kept.contains(&r) {
                kept.push(r);
            }
        }
        let map: BTreeMap<u64, u8> = lifts
            .iter()
            .filter(|r| !kept.contains(r))
            .map(|&r| (r, rng.gen_range(0..=1)))
            .collect();
        levels.push(map);
        holes = kept;
        prev = period;
    }
    ToeplitzSpec::new(periods, FillRule::Levels(levels)).unwrap()
}

#[test]
fn generator_and_odometer_coding_agree_on_random_specs() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for case in 0..10 {
        let spec = random_spec(&mut rng);
        let partition = build_mef_partition(&spec).unwrap();
        assert_eq!(partition.boundary().len() as u64, hole_count(&spec, spec.depth()).unwrap());
        let zero = OdometerPoint::zero(partition.periods().to_vec());
        let coded = mef_code(&partition, &zero, &BTreeMap::new()).unwrap();
        let direct = generate(&spec, HolePolicy::Error);
        let mut boundary_hits = 0;
        for n in 0..10_000 {
            match (direct.eval(n), coded.eval(n)) {
                (Ok(a), Ok(b)) => assert_eq!(a, b, "case {case}, n = {n}"),
                (Err(Error::Unfilled { .. }), Err(Error::BoundaryHit { .. })) => boundary_hits += 1,
                other => panic!("case {case}, n = {n}: {other:?}"),
            }
        }
        // Fill every boundary point with 1 and compare with the Bit(true) policy.
        let ones: BTreeMap<usize, bool> = (0..partition.boundary().len()).map(|i| (i, true)).collect();
        let filled = mef_code(&partition, &zero, &ones).unwrap();
        let bit = generate(&spec, HolePolicy::Bit(true));
        assert_eq!(filled.prefix(10_000).unwrap(), bit.prefix(10_000).unwrap());
        let expected_hits: usize = (0..10_000u64)
            .filter(|&n| partition.boundary().iter().any(|b| n % b.periods().last().unwrap() == *b.residues().last().unwrap()))
            .count();
        assert_eq!(boundary_hits, expected_hits);
    }
}

#[test]
fn filled_classes_are_constant_and_disjoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let spec = random_spec(&mut rng);
        let x = generate(&spec, HolePolicy::Bit(false)).prefix(6000).unwrap();
        let mut owner = vec![None::<usize>; 6000];
        for k in 1..=spec.depth() {
            let level = spec.level(k).unwrap();
            for &(r, b) in &level.filled {
                for m in (r as usize..6000).step_by(level.period as usize) {
                    assert_eq!(x.get(m), b);
                    assert!(owner[m].is_none(), "position {m} filled twice");
                    owner[m] = Some(k);
                }
            }
        }
    }
}

#[test]
fn two_hole_spec_has_two_boundary_points() {
    // Level 1 keeps both residues 0 and 2 of 3; level k ≥ 2 keeps 0 and −1
    // among the six lifts and fills the other four.
    let spec = ToeplitzSpec::new(
        PeriodStructure::geometric(3).unwrap(),
        FillRule::Lifted {
            holes: Stream::cycle(vec![vec![0, -1]]),
            fills: Stream::new(vec!["1".parse().unwrap()], vec!["0110".parse().unwrap()]),
        },
    )
    .unwrap()
    .with_depth(6)
    .unwrap();
    for k in 1..=6 {
        assert_eq!(hole_count(&spec, k).unwrap(), 2);
        assert_eq!(spec.level(k).unwrap().holes.len(), 2);
    }
    let p = build_mef_partition(&spec).unwrap();
    assert_eq!(p.boundary().len(), 2);
    let signed: Vec<Vec<i64>> = p.boundary().iter().map(|b| b.signed_residues()).collect();
    assert!(signed.contains(&vec![0; 6]));
    assert!(signed.contains(&vec![-1; 6]));
}

#[test]
fn simple_specs_stay_under_two_n() {
    let specs = [
        SimpleToeplitzSpec::lemma_instance().unwrap(),
        SimpleToeplitzSpec::new(
            PeriodStructure::geometric(3).unwrap(),
            Stream::cycle(vec![1, 0, 0]),
            Stream::cycle(vec![-1]),
        )
        .unwrap(),
    ];
    for spec in &specs {
        let x = generate(&spec.to_spec().unwrap(), HolePolicy::Bit(false));
        let cert = pstar(&x, &SearchBounds::new(4, 24, 4000, 20_000).unwrap()).unwrap();
        for r in &cert.rows {
            assert!(r.best_count <= 2 * r.n, "n = {}: {} via {}", r.n, r.best_count, r.best_window);
        }
    }
}

#[test]
fn lemma_instance_window_language() {
    let r = three_window(&SimpleToeplitzSpec::lemma_instance().unwrap(), [1, 2, 3, 4, 5, 6], None).unwrap();
    let expected: Vec<Word> = ["000", "001", "010", "100", "101", "111"].iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(r.language.iter().cloned().collect::<Vec<_>>(), expected);
    assert_eq!(r.window.offsets(), &[0, 8, 16]);
    let shifts: Vec<usize> = r.witnesses.iter().map(|w| w.shift).collect();
    assert_eq!(shifts, vec![2, 4, 8, 32, 16, 48]);
}

#[test]
fn nearly_simple_reads_the_simple_sequence_on_a_progression() {
    let spec = SimpleToeplitzSpec::lemma_instance().unwrap();
    let y = generate(&spec.to_spec().unwrap(), HolePolicy::Bit(false));
    let w: Word = "01".parse().unwrap();
    for shift in 0..3 {
        let x = nearly_simple(&spec, &w, shift).unwrap();
        // Positions ≡ 2 − shift (mod 3) carry y; the others carry w.
        let r = (2 + 3 - shift) % 3;
        let sub = x.subsequence(r, 3).unwrap();
        assert_eq!(sub.prefix(500).unwrap(), y.shifted((r + shift) / 3).prefix(500).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn odometer_addition_is_associative(a in -10_000i128..10_000, b in -10_000i128..10_000, y0 in 0i128..100_000) {
        let periods: Vec<u64> = (1..=7).map(|k| 3u64.pow(k)).collect();
        let y = OdometerPoint::from_integer(periods.clone(), y0);
        let left = odometer_add(&odometer_add(&y, a, 7).unwrap(), b, 7).unwrap();
        let right = odometer_add(&y, a + b, 7).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(left, OdometerPoint::from_integer(periods, y0 + a + b));
    }
}
