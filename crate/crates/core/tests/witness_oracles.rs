use std::collections::BTreeSet;

use patcx::rotation::code;
use patcx::seqcore::{pattern_set, recurrence_probe, SequenceSource, SourceKind, Word};
use patcx::witnesses::{
    banach_density_estimate, block_doubling, block_doubling_defect, block_doubling_word, doubling_lower_bound,
    gap_window_witness, growing_runs, long_blocks_witness, minimality_defect_code, powers_of_two, progression,
    squares, support, GapProfile,
};
use patcx::RotationSpec;

#[test]
fn defect_code_marks_zero_blocks() {
    let w: Vec<char> = block_doubling_word(12).chars().collect();
    let d = block_doubling_defect(2, 5000).unwrap();
    assert!(!d.degenerate);
    let xp = d.source.prefix(3000).unwrap();
    for i in 0..3000 {
        assert_eq!(xp.get(i), w[i] == '0' && w[i + 1] == '0', "i = {i}");
    }
}

#[test]
fn defect_code_has_long_ones_on_both_sides_of_a_zero() {
    let d = block_doubling_defect(2, 1 << 16).unwrap();
    let s = d.source.prefix(1 << 16).unwrap().to_bit_string();
    for n in 1..=10 {
        assert!(s.contains(&format!("0{}", "1".repeat(n))), "01^{n}");
        assert!(s.contains(&format!("{}0", "1".repeat(n))), "1^{n}0");
    }
}

#[test]
fn sliding_block_code_inherits_recurrence() {
    let x = block_doubling();
    let n = 2;
    let d = block_doubling_defect(n, 1 << 14).unwrap();
    let xt = x.prefix(1 << 14).unwrap();
    let xp = d.source.prefix((1 << 14) - n).unwrap();
    let report = recurrence_probe(&x, 40, 1 << 14).unwrap();
    for l in 1..=(40 - n + 1) {
        // A repeat of x[0, l + N − 1) at M forces x′[M, M + l) = x′[0, l).
        let Some(m) = report.row(l + n - 1).unwrap().second_occurrence else { continue };
        for i in 0..l {
            assert_eq!(xt.get(m + i), xt.get(i));
            assert_eq!(xp.get(m + i), xp.get(i), "l = {l}, M = {m}, i = {i}");
        }
    }
}

#[test]
fn everything_in_the_target_language_is_constant_one() {
    let all: BTreeSet<Word> = (0..8u8)
        .map(|v| Word((0..3).map(|i| v >> i & 1 == 1).collect()))
        .collect();
    let d = minimality_defect_code(&block_doubling(), &all, 3, 1000).unwrap();
    assert!(d.degenerate);
    assert!(d.source.prefix(500).unwrap().iter().all(|b| b));
    let bad: BTreeSet<Word> = ["01".parse().unwrap()].into_iter().collect();
    assert!(minimality_defect_code(&block_doubling(), &bad, 3, 1000).is_err());
}

#[test]
fn doubling_trace_certifies_five_steps() {
    let d = block_doubling_defect(2, 1 << 20).unwrap();
    let trace = doubling_lower_bound(&d.source, 5, 1 << 20).unwrap();
    assert_eq!(trace.certified_through, Some(5), "{:?}", trace.failure);
    let counts = trace.counts();
    assert_eq!(counts[0], 2);
    // Closed form checked directly.
    for (k, &c) in counts.iter().enumerate() {
        assert!(2 * c >= (k + 2) << k, "k = {k}, count {c}");
    }
    // Step inequality, and the closed form again by induction from it.
    let mut implied = counts[0] as i64;
    for k in 1..counts.len() {
        assert!(counts[k] as i64 >= 2 * counts[k - 1] as i64 + (1 << (k - 1)) - 1);
        implied = 2 * implied + (1 << (k - 1)) - 1;
        assert!(2 * implied >= ((k + 2) << k) as i64);
    }
    // Windows double and nest.
    let windows: Vec<_> = trace.windows().cloned().collect();
    for k in 1..windows.len() {
        assert_eq!(windows[k].size(), 2 * windows[k - 1].size());
        let kk = trace.steps[k - 1].recurrence_offset.unwrap();
        assert!(kk > windows[k - 1].diameter());
        for &t in windows[k - 1].offsets() {
            assert!(windows[k].contains(t) && windows[k].contains(t + kk));
        }
    }
    // Replay the small counts with a direct read.
    for step in &trace.steps[..4] {
        let direct = pattern_set(&d.source, step.window.offsets(), 0..=step.shift_bound).unwrap();
        assert_eq!(direct.len(), step.count, "k = {}", step.k);
    }
}

#[test]
fn doubling_needs_both_letters() {
    assert!(doubling_lower_bound(&SequenceSource::constant(true), 3, 1000).is_err());
}

#[test]
fn long_blocks() {
    let w = long_blocks_witness(&growing_runs(), 5000).unwrap().expect("witness");
    assert!(w.count > 2 * w.n);
    assert_eq!(w.window.size(), w.n);
    let direct = pattern_set(&growing_runs(), w.window.offsets(), 0..=5000 - w.n).unwrap();
    assert_eq!(direct.len(), w.count);
    assert!(long_blocks_witness(&code(&RotationSpec::fibonacci()), 20_000).unwrap().is_none());
    assert!(long_blocks_witness(&SequenceSource::constant(false), 2000).unwrap().is_none());
}

#[test]
fn two_periodic_orbits_reduce_to_long_blocks_on_a_residue() {
    // Blocks (01)^k 0^{2k}: the orbit closure holds (01)^∞ and 0^∞.
    let x = SequenceSource::generator(SourceKind::Custom, "(01)^k 0^2k", |n| {
        let mut start = 0;
        let mut k = 1;
        loop {
            let len = 4 * k;
            if n < start + len {
                let i = n - start;
                return Ok(i < 2 * k && i % 2 == 1);
            }
            start += len;
            k += 1;
        }
    });
    assert!(long_blocks_witness(&x, 20_000).unwrap().is_none());
    let odd = x.subsequence(1, 2).unwrap();
    let w = long_blocks_witness(&odd, 10_000).unwrap().expect("odd positions have long runs of both letters");
    assert!(w.count > 2 * w.n);
}

#[test]
fn gap_window_on_powers_of_two() {
    let w = gap_window_witness(&powers_of_two(), 1 << 12).unwrap().unwrap();
    assert_eq!(w.window.offsets(), &[0, 1, 2]);
    assert_eq!((w.s_n, w.s_next), (1, 2));
    assert_eq!(w.read_at_s_n.to_string(), "110");
    assert_eq!(w.read_at_s_next.to_string(), "101");
    let direct = pattern_set(&powers_of_two(), w.window.offsets(), 0..=w.shift_bound).unwrap();
    assert_eq!(direct, w.words_found);
}

#[test]
fn gap_window_needs_a_gap_increase() {
    assert!(gap_window_witness(&progression(3, 7), 5000).unwrap().is_none());
}

#[test]
fn gap_window_on_squares_also_reads_010() {
    let w = gap_window_witness(&squares(), 10_000).unwrap().unwrap();
    assert!(w.has_010);
    let m = w.witness_010.unwrap();
    let read: String = w.window.offsets().iter().map(|&t| if squares().eval(m + t).unwrap() { '1' } else { '0' }).collect();
    assert_eq!(read, "010");
    for word in ["110", "101", "000", "100", "001"] {
        assert!(w.words_found.contains(&word.parse().unwrap()), "{word}");
    }
    let profile = GapProfile::of(&squares().prefix(200).unwrap());
    assert_eq!(profile.s(1), 0);
    assert_eq!(profile.g(3), 5);
}

#[test]
fn banach_density_of_powers_of_two() {
    let s = support(&powers_of_two(), 1 << 16).unwrap();
    let rows = banach_density_estimate(&s, 1 << 16, &[64, 256, 4096]).unwrap();
    assert!(rows[0].max_count <= 7);
    assert!(rows.windows(2).all(|r| r[1].density <= r[0].density));
    let all: BTreeSet<usize> = (0..1000).collect();
    assert_eq!(banach_density_estimate(&all, 1000, &[50]).unwrap()[0].density, 1.0);
}
