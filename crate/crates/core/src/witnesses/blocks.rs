//! Witnesses read off runs and gaps of a finite prefix.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::bits::BitTape;
use crate::error::{Error, Result};
use crate::seqcore::{tau_language_on, LanguageReport, SequenceSource, Window, Word};

/// A maximal run `x[start, start + len)` of equal letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Run {
    pub letter: bool,
    pub start: usize,
    pub len: usize,
    /// Bounded by the other letter on both sides within the prefix.
    pub complete: bool,
}

pub fn runs(tape: &BitTape) -> Vec<Run> {
    let mut out: Vec<Run> = Vec::new();
    for (i, b) in tape.iter().enumerate() {
        match out.last_mut() {
            Some(r) if r.letter == b => r.len += 1,
            _ => out.push(Run { letter: b, start: i, len: 1, complete: false }),
        }
    }
    let last = out.len().saturating_sub(1);
    for (i, r) in out.iter_mut().enumerate() {
        r.complete = i > 0 && i < last;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LongBlocksWitness {
    /// A complete 0-run (or 1-run) of exactly this length occurs.
    pub threshold: usize,
    pub threshold_letter: bool,
    pub n: usize,
    pub window: Window,
    pub count: usize,
    /// Runs of each letter longer than `threshold`, ending before the
    /// horizon.
    pub zero_run: Run,
    pub one_run: Run,
    pub language: LanguageReport,
}

/// If the prefix has a complete `b`-run of length `ℓ` and both letters have
/// complete runs of length at least `ℓ + 2`, the interval window of size
/// `n = ℓ + 2` reads at least `2n + 1` patterns. Returns the first such `ℓ`
/// whose count is verified.
pub fn long_blocks_witness(x: &SequenceSource, horizon: usize) -> Result<Option<LongBlocksWitness>> {
    let tape = Arc::new(x.prefix(horizon)?);
    let rs = runs(&tape);
    let longest = |letter: bool| {
        rs.iter()
            .filter(|r| r.complete && r.letter == letter)
            .max_by_key(|r| (r.len, std::cmp::Reverse(r.start)))
            .copied()
    };
    let (Some(zero_run), Some(one_run)) = (longest(false), longest(true)) else {
        return Ok(None);
    };
    let mut candidates: Vec<(usize, bool)> = rs
        .iter()
        .filter(|r| r.complete)
        .map(|r| (r.len, r.letter))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    candidates.retain(|&(l, _)| l + 2 <= zero_run.len.min(one_run.len));
    for (l, letter) in candidates {
        let n = l + 2;
        if n >= horizon {
            break;
        }
        let window = Window::interval(n)?;
        let language = tau_language_on(&tape, &window, horizon - n)?;
        let count = language.count();
        if count > 2 * n {
            return Ok(Some(LongBlocksWitness {
                threshold: l,
                threshold_letter: letter,
                n,
                window,
                count,
                zero_run,
                one_run,
                language,
            }));
        }
    }
    Ok(None)
}

/// One-positions `s_1 < s_2 < …` and gaps `g_n = s_{n+1} − s_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapProfile {
    pub positions: Vec<usize>,
    pub gaps: Vec<usize>,
}

impl GapProfile {
    pub fn of(tape: &BitTape) -> Self {
        let positions: Vec<usize> = (0..tape.len()).filter(|&i| tape.get(i)).collect();
        let gaps = positions.windows(2).map(|p| p[1] - p[0]).collect();
        GapProfile { positions, gaps }
    }

    /// `s_n`, `n ≥ 1`.
    pub fn s(&self, n: usize) -> usize {
        self.positions[n - 1]
    }

    /// `g_n`, `n ≥ 1`.
    pub fn g(&self, n: usize) -> usize {
        self.gaps[n - 1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapWindowWitness {
    pub profile_len: usize,
    /// First `n` with `g_n < g_{n+1}`.
    pub n: usize,
    pub s_n: usize,
    pub s_next: usize,
    pub window: Window,
    /// Word read at `s_n` (110) and at `s_{n+1}` (101).
    pub read_at_s_n: Word,
    pub read_at_s_next: Word,
    pub has_010: bool,
    /// `None` when 010 does not occur.
    pub witness_010: Option<usize>,
    pub words_found: BTreeSet<Word>,
    pub shift_bound: usize,
}

/// `τ = {0, g_n, g_{n+1}}` at the first gap increase, with the words read at
/// `s_n` and `s_{n+1}` and the full τ-language over the horizon.
pub fn gap_window_witness(x_sparse: &SequenceSource, horizon: usize) -> Result<Option<GapWindowWitness>> {
    let tape = Arc::new(x_sparse.prefix(horizon)?);
    let profile = GapProfile::of(&tape);
    let Some(i) = profile.gaps.windows(2).position(|g| g[0] < g[1]) else {
        return Ok(None);
    };
    let n = i + 1;
    let (gn, gn1) = (profile.g(n), profile.g(n + 1));
    let window = Window::new(vec![0, gn, gn1])?;
    if gn1 >= horizon {
        return Ok(None);
    }
    let shift_bound = horizon - 1 - gn1;
    let read = |m: usize| -> Result<Word> {
        if m > shift_bound {
            return Err(Error::OutOfRange { index: m + gn1, valid_up_to: horizon });
        }
        Ok(Word(window.offsets().iter().map(|&t| tape.get(m + t)).collect()))
    };
    let (s_n, s_next) = (profile.s(n), profile.s(n + 1));
    let (Ok(read_at_s_n), Ok(read_at_s_next)) = (read(s_n), read(s_next)) else {
        return Ok(None);
    };
    let language = tau_language_on(&tape, &window, shift_bound)?;
    let words_found = language.words();
    if !words_found.contains(&read_at_s_n) || !words_found.contains(&read_at_s_next) {
        return Err(Error::Precondition("τ-language disagrees with direct reads".into()));
    }
    let w010: Word = "010".parse().expect("literal");
    let witness_010 = language.witness(&w010);
    Ok(Some(GapWindowWitness {
        profile_len: profile.positions.len(),
        n,
        s_n,
        s_next,
        window,
        read_at_s_n,
        read_at_s_next,
        has_010: witness_010.is_some(),
        witness_010,
        words_found,
        shift_bound,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    pub block: usize,
    pub max_count: usize,
    /// Least `M` attaining the maximum.
    pub argmax: usize,
    pub density: f64,
}

/// For each `N`, `max_M |S ∩ [M, M + N)| / N` over `M + N ≤ horizon`.
pub fn banach_density_estimate(positions: &BTreeSet<usize>, horizon: usize, blocks: &[usize]) -> Result<Vec<DensityRow>> {
    if let Some(&p) = positions.iter().next_back() {
        if p >= horizon {
            return Err(Error::InvalidArgument(format!("position {p} lies beyond the horizon {horizon}")));
        }
    }
    let mut prefix = vec![0usize; horizon + 1];
    for i in 0..horizon {
        prefix[i + 1] = prefix[i] + positions.contains(&i) as usize;
    }
    blocks
        .iter()
        .map(|&n| {
            if n == 0 || n > horizon {
                return Err(Error::InvalidArgument(format!("block length {n} must be in 1..={horizon}")));
            }
            let (argmax, max_count) = (0..=horizon - n)
                .map(|m| (m, prefix[m + n] - prefix[m]))
                .fold((0, 0), |best, cur| if cur.1 > best.1 { cur } else { best });
            Ok(DensityRow {
                block: n,
                max_count,
                argmax,
                density: max_count as f64 / n as f64,
            })
        })
        .collect()
}

/// One-positions of a prefix.
pub fn support(x: &SequenceSource, horizon: usize) -> Result<BTreeSet<usize>> {
    let tape = x.prefix(horizon)?;
    Ok((0..horizon).filter(|&i| tape.get(i)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::parse_bits;

    #[test]
    fn run_decomposition() {
        let rs = runs(&parse_bits("0011101").unwrap());
        assert_eq!(rs.len(), 4);
        assert_eq!((rs[1].letter, rs[1].start, rs[1].len, rs[1].complete), (true, 2, 3, true));
        assert!(!rs[0].complete && !rs[3].complete);
    }

    #[test]
    fn density_of_all_and_evens() {
        let all: BTreeSet<usize> = (0..100).collect();
        assert_eq!(banach_density_estimate(&all, 100, &[10]).unwrap()[0].density, 1.0);
        let evens: BTreeSet<usize> = (0..1000).step_by(2).collect();
        for row in banach_density_estimate(&evens, 1000, &[7, 10, 64]).unwrap() {
            assert!((row.density - 0.5).abs() <= 1.0 / row.block as f64);
        }
    }
}
