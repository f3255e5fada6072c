//! The reproduction suite: each criterion runs end to end and reports a
//! verdict, a one-line detail and its wall time.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use patcx::bits::BitTape;
use patcx::complexity::{check_pattern_sturmian, morse_hedlund_check, pstar, pstar_on, SearchBounds, SturmianVerdict};
use patcx::rotation::{code, nonrecurrence_witness, partition_cell_count, IrrationalAngle, RotationCodingSpec};
use patcx::seqcore::{SequenceSource, Word};
use patcx::toeplitz::{
    build_mef_partition, generate, mef_code, three_window, FillRule, HolePolicy, OdometerPoint, PeriodStructure,
    SimpleToeplitzSpec, ToeplitzSpec,
};
use patcx::witnesses::{block_doubling_defect, bundled_nonperiodic, cofinite, doubling_lower_bound, powers_plus_index};
use patcx::{Error, Result, RotationSpec};

pub const ALL: [usize; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_secs: f64,
    /// Wall-time limit included in the verdict, if any.
    pub limit_secs: Option<f64>,
}

struct Check {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: impl Into<String>) -> Result<Check> {
    Ok(Check { passed, detail: detail.into() })
}

pub fn title(id: usize) -> &'static str {
    match id {
        1 => "prefix 010110 gives p*(2) >= 4 via {0,2}",
        2 => "cofinite example refuted at n = 3",
        3 => "ternary Toeplitz prefix, 27 bits",
        4 => "three-window language on periods 2^k",
        5 => "Fibonacci coding reaches 2n, cell count 2n",
        6 => "window doubling bound through k = 5",
        7 => "non-periodic carriers reach 2n",
        8 => "Toeplitz and engine round trips",
        9 => "closed-cell coding: 00 only at shift 0",
        10 => "2^k + k indicator consistent with 2n",
        _ => "unknown criterion",
    }
}

fn limit(id: usize) -> Option<f64> {
    match id {
        1 | 2 | 4 => Some(1.0),
        5 => Some(300.0),
        6 => Some(120.0),
        _ => None,
    }
}

pub fn run_criterion(id: usize, seed: u64) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => intro_example(),
        2 => cofinite_refuted(),
        3 => ternary_prefix(),
        4 => three_window_instance(),
        5 => fibonacci_ceiling(),
        6 => doubling_bound(),
        7 => floor_on_carriers(),
        8 => round_trips(seed),
        9 => nonrecurrence(),
        10 => almost_constant(),
        _ => Err(Error::InvalidArgument(format!("no criterion {id}"))),
    };
    let elapsed_secs = start.elapsed().as_secs_f64();
    let limit_secs = limit(id);
    let (mut passed, mut detail) = match outcome {
        Ok(c) => (c.passed, c.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(l) = limit_secs {
        if elapsed_secs > l {
            passed = false;
            detail.push_str(&format!("; took {elapsed_secs:.1} s, limit {l} s"));
        }
    }
    CriterionResult { id, title: title(id), passed, detail, elapsed_secs, limit_secs }
}

pub fn run_suite(ids: &[usize], seed: u64) -> Vec<CriterionResult> {
    ids.iter().map(|&id| run_criterion(id, seed)).collect()
}

fn intro_example() -> Result<Check> {
    let x = SequenceSource::from_bit_str("010110")?;
    let cert = pstar(&x, &SearchBounds::new(2, 2, 3, 100)?)?;
    let row = cert.row(2).expect("n = 2 row");
    check(
        row.best_count == 4 && row.best_window.offsets() == [0, 2] && cert.exhaustive,
        format!("p*(2) >= {} via {}", row.best_count, row.best_window),
    )
}

fn cofinite_refuted() -> Result<Check> {
    let x = cofinite(&[0, 1, 2, 3, 5, 9, 10]);
    let c = check_pattern_sturmian(&x, &SearchBounds::new(3, 16, 10_000, 200_000)?)?;
    let window = c.refuting_window.as_ref().map(|w| w.to_string()).unwrap_or_else(|| "-".into());
    check(
        c.verdict == SturmianVerdict::Refuted
            && c.refuting_n == Some(3)
            && c.refuting_window.as_ref().map(|w| w.offsets().to_vec()) == Some(vec![0, 1, 2])
            && c.refuting_count == Some(8),
        match (c.refuting_n, c.refuting_count) {
            (Some(n), Some(k)) => format!("{} at n = {n} via {window} with {k} patterns", c.verdict),
            _ => format!("{}: no window exceeds 2n", c.verdict),
        },
    )
}

/// `x(n) = (s mod 3) − 1` for `n + 1 = 3^r·s`, `3 ∤ s`.
fn ternary_formula(n: usize) -> bool {
    let mut m = n + 1;
    while m % 3 == 0 {
        m /= 3;
    }
    m % 3 == 2
}

const TERNARY_LITERAL: &str = "010011010010011010010011011";

fn ternary_prefix() -> Result<Check> {
    let got = generate(&ToeplitzSpec::ternary_example(), HolePolicy::default()).prefix(27)?.to_bit_string();
    let formula: String = (0..27).map(|n| if ternary_formula(n) { '1' } else { '0' }).collect();
    let diffs: Vec<usize> = got.chars().zip(TERNARY_LITERAL.chars()).enumerate().filter(|(_, (a, b))| a != b).map(|(i, _)| i).collect();
    check(
        got == TERNARY_LITERAL,
        format!(
            "generated {got}, expected {TERNARY_LITERAL}, differing at {diffs:?}; closed formula gives {formula} ({})",
            if formula == got { "matches the generator" } else { "differs from the generator" }
        ),
    )
}

fn three_window_instance() -> Result<Check> {
    let r = three_window(&SimpleToeplitzSpec::lemma_instance()?, [1, 2, 3, 4, 5, 6], None)?;
    let expected: BTreeSet<Word> =
        ["000", "001", "010", "100", "101", "111"].iter().map(|s| s.parse().expect("literal")).collect();
    let replayed = r.witnesses.iter().all(|w| w.read == w.expected);
    let words: BTreeSet<&Word> = r.witnesses.iter().map(|w| &w.read).collect();
    let shifts: Vec<usize> = r.witnesses.iter().map(|w| w.shift).collect();
    let lang: Vec<String> = r.language.iter().map(|w| w.to_string()).collect();
    check(
        r.window.offsets() == [0, 8, 16] && r.language == expected && replayed && words.len() == 6 && r.matches_lemma,
        format!("window {}: {{{}}}; shifts {shifts:?} read the six words: {replayed}", r.window, lang.join(", ")),
    )
}

fn fibonacci_ceiling() -> Result<Check> {
    let spec = RotationSpec::fibonacci();
    let cert = pstar(&code(&spec), &SearchBounds::new(7, 500, 100_000, 200_000)?)?;
    let mut ok = cert.rows.len() == 7;
    let mut parts = Vec::new();
    for r in &cert.rows {
        let cells = partition_cell_count(&spec, &r.best_window)?.cell_count;
        ok &= r.best_count == 2 * r.n && cells == 2 * r.n;
        parts.push(format!("{}:{}/{}", r.n, r.best_count, cells));
    }
    let last = cert.rows.last().map(|r| r.best_window.to_string()).unwrap_or_default();
    check(
        ok,
        format!("n:count/cells {}; best window at n = 7: {last}; {} windows counted", parts.join(" "), cert.explored_nodes),
    )
}

fn doubling_bound() -> Result<Check> {
    let horizon = 1 << 20;
    let carrier = block_doubling_defect(2, horizon)?;
    let trace = doubling_lower_bound(&carrier.source, 5, horizon)?;
    let counts = trace.counts();
    let literal = [6usize, 16, 40, 96, 224];
    let literal_met: Vec<bool> = (1..=5).map(|k| counts.get(k).is_some_and(|&c| c >= literal[k - 1])).collect();
    check(
        trace.certified_through == Some(5),
        format!(
            "counts {counts:?} vs (k+2)2^(k-1) = [1, 3, 8, 20, 48, 112]; certified through {:?}; \
             against 6, 16, 40, 96, 224: {literal_met:?}",
            trace.certified_through
        ),
    )
}

fn floor_on_carriers() -> Result<Check> {
    let bounds = SearchBounds::default();
    let mut failed = Vec::new();
    let sources = bundled_nonperiodic()?;
    for x in &sources {
        let report = morse_hedlund_check(x, &bounds)?;
        if !report.all_attained() {
            let why = report.skipped.clone().unwrap_or_else(|| {
                let rows: Vec<String> = report.rows.iter().filter(|r| !r.attained).map(|r| format!("n={} got {}", r.n, r.best_count)).collect();
                rows.join(", ")
            });
            failed.push(format!("{}: {why}", x.label()));
        }
    }
    check(
        failed.is_empty(),
        if failed.is_empty() {
            format!("{} carriers reach 2n for n <= {}", sources.len(), bounds.max_n)
        } else {
            failed.join("; ")
        },
    )
}

/// A finite spec with random periods, one or two kept holes per level and
/// random fills.
pub fn random_toeplitz_spec(rng: &mut ChaCha8Rng) -> Result<ToeplitzSpec> {
    let depth = rng.gen_range(4..=7);
    let mut list = Vec::new();
    let mut n = 1u64;
    for _ in 0..depth {
        n *= rng.gen_range(2..=3);
        list.push(n);
    }
    let periods = PeriodStructure::new(list.clone(), None)?;
    let mut holes = vec![0u64];
    let mut prev = 1u64;
    let mut levels = Vec::new();
    for &period in &list {
        let mut lifts: Vec<u64> = holes.iter().flat_map(|&h| (0..period / prev).map(move |j| h + j * prev)).collect();
        lifts.sort_unstable();
        let keep = rng.gen_range(1..=2usize.min(lifts.len() - 1));
        let mut kept = Vec::new();
        while kept.len() < keep {
            let r = lifts[rng.gen_range(0..lifts.len())];
            if !kept.contains(&r) {
                kept.push(r);
            }
        }
        let map: BTreeMap<u64, u8> =
            lifts.iter().filter(|r| !kept.contains(r)).map(|&r| (r, rng.gen_range(0..=1))).collect();
        levels.push(map);
        holes = kept;
        prev = period;
    }
    ToeplitzSpec::new(periods, FillRule::Levels(levels))
}

/// `max` over canonical windows of size `n` and diameter `≤ d` of the number
/// of distinct words read at shifts `0..=s`.
pub fn brute_force_pstar(tape: &BitTape, n: usize, d: usize, s: usize) -> usize {
    fn rec(tape: &BitTape, s: usize, d: usize, need: usize, next: usize, window: &mut Vec<usize>, best: &mut usize) {
        if need == 0 {
            let words: HashSet<Vec<bool>> =
                (0..=s).map(|m| window.iter().map(|&t| tape.get(m + t)).collect()).collect();
            *best = (*best).max(words.len());
            return;
        }
        for t in next..=d {
            window.push(t);
            rec(tape, s, d, need - 1, t + 1, window, best);
            window.pop();
        }
    }
    let mut best = 0;
    rec(tape, s, d, n - 1, 1, &mut vec![0], &mut best);
    best
}

fn round_trips(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut toeplitz_mismatches = 0;
    for _ in 0..10 {
        let spec = random_toeplitz_spec(&mut rng)?;
        let partition = build_mef_partition(&spec)?;
        let zero = OdometerPoint::zero(partition.periods().to_vec());
        let coded = mef_code(&partition, &zero, &BTreeMap::new())?;
        let direct = generate(&spec, HolePolicy::Error);
        for n in 0..10_000 {
            let agree = match (direct.eval(n), coded.eval(n)) {
                (Ok(a), Ok(b)) => a == b,
                (Err(Error::Unfilled { .. }), Err(Error::BoundaryHit { .. })) => true,
                _ => false,
            };
            toeplitz_mismatches += usize::from(!agree);
        }
    }
    let mut engine_mismatches = 0;
    for _ in 0..100 {
        let tape = BitTape::from_bools((0..200).map(|_| rng.gen::<bool>()));
        let d = rng.gen_range(3..=12);
        let bounds = SearchBounds::for_prefix(200, 4, d, 1_000_000)?;
        let cert = pstar_on(&Arc::new(tape.clone()), &bounds)?;
        for n in 1..=4 {
            if cert.best_count(n) != Some(brute_force_pstar(&tape, n, d, bounds.shift_bound)) {
                engine_mismatches += 1;
            }
        }
    }
    check(
        toeplitz_mismatches == 0 && engine_mismatches == 0,
        format!(
            "generator vs odometer coding: {toeplitz_mismatches} mismatches over 10 specs x 10^4 positions; \
             engine vs enumeration: {engine_mismatches} mismatches over 100 prefixes x n <= 4 (seed {seed})"
        ),
    )
}

fn describe_nonrecurrence(spec: &RotationSpec, horizon: usize) -> Result<(bool, String)> {
    Ok(match nonrecurrence_witness(spec, horizon)? {
        Some(w) => (
            w.window.offsets() == [0, 1] && w.unique_shift == 0 && !w.letter && w.confirmed,
            format!(
                "window {}, constant {} at shift {} ({} occurrence(s) within {horizon}{})",
                w.window,
                w.letter as u8,
                w.unique_shift,
                w.occurrence_count,
                if w.confirmed { ", unique" } else { "" }
            ),
        ),
        None => (false, "no witness".to_string()),
    })
}

fn nonrecurrence() -> Result<Check> {
    let horizon = 100_000;
    let golden = RotationCodingSpec::closed_initial(IrrationalAngle::golden());
    let (passed, detail) = describe_nonrecurrence(&golden, horizon)?;
    let tape = code(&golden).prefix(horizon + 2)?;
    let zeros: Vec<usize> = (0..=horizon).filter(|&m| !tape.get(m) && !tape.get(m + 1)).take(4).collect();
    let zero_count = (0..=horizon).filter(|&m| !tape.get(m) && !tape.get(m + 1)).count();
    let small = RotationCodingSpec::closed_initial(IrrationalAngle::golden_complement());
    let (small_ok, small_detail) = describe_nonrecurrence(&small, horizon)?;
    check(
        passed,
        format!(
            "α = (√5 − 1)/2: {detail}, 00 read at {zero_count} shifts (first {zeros:?}); with α = (3 − √5)/2 < 1/2: {small_detail}{}",
            if small_ok { " as stated" } else { "" }
        ),
    )
}

fn almost_constant() -> Result<Check> {
    let c = check_pattern_sturmian(&powers_plus_index(), &SearchBounds::default())?;
    let counts: Vec<String> = c.certificate.rows.iter().map(|r| r.best_count.to_string()).collect();
    let refutation = match (c.refuting_n, &c.refuting_window, c.refuting_count) {
        (Some(n), Some(w), Some(k)) => format!("; window {w} reads {k} > {} patterns at n = {n}", 2 * n),
        _ => String::new(),
    };
    check(
        c.verdict == SturmianVerdict::Consistent,
        format!("{}: best counts [{}]{refutation}", c.verdict, counts.join(", ")),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_on_the_intro_prefix() {
        let tape = patcx::seqcore::parse_bits("010110").unwrap();
        assert_eq!(brute_force_pstar(&tape, 2, 2, 3), 4);
        assert_eq!(brute_force_pstar(&tape, 1, 2, 3), 2);
    }

    #[test]
    fn unknown_criterion_fails_cleanly() {
        let r = run_criterion(99, 0);
        assert!(!r.passed);
        assert!(r.detail.starts_with("error"));
    }
}
