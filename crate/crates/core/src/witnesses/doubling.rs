//! Sliding block code onto a non-minimal part of an orbit closure, and the
//! window-doubling lower bound on its pattern complexity.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::bits::BitTape;
use crate::error::{Error, Result};
use crate::seqcore::{tau_language_scan, SequenceSource, SourceKind, Window, Word};

#[derive(Debug, Clone, Serialize)]
pub struct DefectCode {
    #[serde(skip)]
    pub source: SequenceSource,
    pub block_len: usize,
    pub y_language: BTreeSet<Word>,
    /// Length-`N` words of `x` seen within the horizon.
    pub observed: BTreeSet<Word>,
    /// `y_language` covers every observed word, so `x′` is constant 1 on the
    /// horizon.
    pub degenerate: bool,
}

/// `x′(i) = 1` iff `x[i, i + N) ∈ y_language`.
pub fn minimality_defect_code(
    x: &SequenceSource,
    y_language: &BTreeSet<Word>,
    block_len: usize,
    horizon: usize,
) -> Result<DefectCode> {
    if block_len == 0 {
        return Err(Error::InvalidArgument("block length must be at least 1".into()));
    }
    if y_language.is_empty() {
        return Err(Error::InvalidArgument("the target language is empty".into()));
    }
    if let Some(w) = y_language.iter().find(|w| w.len() != block_len) {
        return Err(Error::InvalidArgument(format!("word {w} does not have length {block_len}")));
    }
    if horizon < block_len {
        return Err(Error::InvalidArgument(format!("horizon {horizon} is shorter than the block length")));
    }
    let tape = x.prefix(horizon)?;
    let observed: BTreeSet<Word> = (0..=horizon - block_len)
        .map(|i| Word((i..i + block_len).map(|j| tape.get(j)).collect()))
        .collect();
    let degenerate = observed.is_subset(y_language);
    let inner = x.clone();
    let lang = y_language.clone();
    let label = format!("defect code of [{}], N = {block_len}", x.label());
    let source = SequenceSource::generator(SourceKind::Custom, label, move |i| {
        let w = Word((i..i + block_len).map(|j| inner.eval(j)).collect::<Result<_>>()?);
        Ok(lang.contains(&w))
    });
    Ok(DefectCode {
        source,
        block_len,
        y_language: y_language.clone(),
        observed,
        degenerate,
    })
}

/// The block-doubling sequence coded by `x′(i) = 1` iff `x[i, i + N) = 0^N`:
/// the orbit closure contains the fixed point `0^∞`, whose language is
/// `{0^N}`.
pub fn block_doubling_defect(block_len: usize, horizon: usize) -> Result<DefectCode> {
    let y: BTreeSet<Word> = [Word::constant(false, block_len)].into_iter().collect();
    minimality_defect_code(&super::block_doubling(), &y, block_len, horizon)
}

/// `z[p]` = length of the longest common prefix of `x[p..]` and `x[0..]`.
fn z_array(tape: &BitTape) -> Vec<u32> {
    let n = tape.len();
    let mut z = vec![0u32; n];
    if n == 0 {
        return z;
    }
    z[0] = n as u32;
    let (mut l, mut r) = (0usize, 0usize);
    for i in 1..n {
        let mut k = if i < r { (z[i - l] as usize).min(r - i) } else { 0 };
        while i + k < n && tape.get(k) == tape.get(i + k) {
            k += 1;
        }
        z[i] = k as u32;
        if i + k > r {
            l = i;
            r = i + k;
        }
    }
    z
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoublingStep {
    pub k: usize,
    pub window: Window,
    pub shift_bound: usize,
    pub count: usize,
    /// `(k + 2)·2^{k−1}`, rounded up at `k = 0`.
    pub closed_form_bound: usize,
    pub meets_closed_form: bool,
    /// `count_k ≥ 2·count_{k−1} + 2^{k−1} − 1`; `None` at `k = 0`.
    pub meets_step_inequality: Option<bool>,
    /// `M`: the recurring prefix is `x′[0, M]`; `None` at the last step.
    pub prefix_len: Option<usize>,
    /// `x′[0, M]` holds every pattern of this window seen within the
    /// horizon. False when `M` was capped.
    pub prefix_covers_all: Option<bool>,
    /// Recurrence offset used to build the next window.
    pub recurrence_offset: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoublingTrace {
    pub horizon: usize,
    pub steps: Vec<DoublingStep>,
    /// Largest `k` such that every step up to `k` meets both inequalities.
    pub certified_through: Option<usize>,
    pub failure: Option<String>,
}

impl DoublingTrace {
    pub fn windows(&self) -> impl Iterator<Item = &Window> {
        self.steps.iter().map(|s| &s.window)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.count).collect()
    }
}

fn closed_form(k: usize) -> usize {
    if k == 0 {
        1
    } else {
        (k + 2) << (k - 1)
    }
}

/// Build `τ_0 = {0}`, `τ_{k+1} = τ_k ∪ (K_k + τ_k)` where `K_k > max τ_k` is
/// the least offset at which `x′[0, M_k]` recurs and `x′[0, M_k]` holds every
/// `τ_k`-pattern seen within the horizon; count `|L(τ_k)|` at each step.
///
/// `M_k` is capped at `horizon / 2^{k_max + 2}` (or the current diameter,
/// if larger) so that a recurrence can still be found
/// when some pattern first appears late; each step records whether the cap
/// was hit. The inequalities are always checked on measured counts.
pub fn doubling_lower_bound(xprime: &SequenceSource, k_max: usize, horizon: usize) -> Result<DoublingTrace> {
    let prefix_cap = horizon.checked_shr(k_max as u32 + 2).unwrap_or(0);
    let tape = xprime.prefix(horizon)?;
    let ones = tape.count_ones();
    if ones == 0 || ones == tape.len() {
        return Err(Error::Precondition("x′ must contain both letters within the horizon".into()));
    }
    let z = z_array(&tape);
    let mut window = Window::singleton();
    let mut steps: Vec<DoublingStep> = Vec::new();
    let mut failure = None;
    for k in 0..=k_max {
        let diameter = window.diameter();
        if diameter + 1 >= horizon {
            failure = Some(format!("window τ_{k} does not fit in the horizon"));
            break;
        }
        let shift_bound = horizon - 1 - diameter;
        let report = tau_language_scan(&tape, &window, shift_bound)?;
        let count = report.count();
        let bound = closed_form(k);
        let step_ok = steps
            .last()
            .map(|prev| count + 1 >= 2 * prev.count + (1usize << (k - 1)));
        steps.push(DoublingStep {
            k,
            window: window.clone(),
            shift_bound,
            count,
            closed_form_bound: bound,
            meets_closed_form: count >= bound,
            meets_step_inequality: step_ok,
            prefix_len: None,
            prefix_covers_all: None,
            recurrence_offset: None,
        });
        if k == k_max {
            break;
        }
        let full = report.patterns.iter().map(|p| p.witness_shift).max().unwrap_or(0) + diameter;
        let m = full.min(prefix_cap.max(diameter));
        let found = (diameter + 1..horizon.saturating_sub(m)).find(|&p| z[p] as usize > m);
        let step = steps.last_mut().expect("just pushed");
        step.prefix_len = Some(m);
        step.prefix_covers_all = Some(m == full);
        let Some(offset) = found else {
            failure = Some(format!(
                "x′[0, {m}] does not recur beyond offset {diameter} within the horizon (step {k})"
            ));
            break;
        };
        step.recurrence_offset = Some(offset);
        let mut offsets = window.offsets().to_vec();
        offsets.extend(window.offsets().iter().map(|t| t + offset));
        window = Window::new(offsets)?;
    }
    let certified_through = steps
        .iter()
        .take_while(|s| s.meets_closed_form && s.meets_step_inequality != Some(false))
        .last()
        .map(|s| s.k);
    Ok(DoublingTrace {
        horizon,
        steps,
        certified_through,
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::parse_bits;
    use crate::witnesses::block_doubling;

    #[test]
    fn z_array_small() {
        let t = parse_bits("0100101").unwrap();
        assert_eq!(z_array(&t), vec![7, 0, 1, 3, 0, 2, 0]);
    }

    #[test]
    fn full_language_is_degenerate() {
        let all: BTreeSet<Word> = ["00", "01", "10", "11"].iter().map(|s| s.parse().unwrap()).collect();
        let d = minimality_defect_code(&block_doubling(), &all, 2, 500).unwrap();
        assert!(d.degenerate);
        assert!(d.source.prefix(200).unwrap().iter().all(|b| b));
    }

    #[test]
    fn closed_form_values() {
        assert_eq!((1..=5).map(closed_form).collect::<Vec<_>>(), vec![3, 8, 20, 48, 112]);
    }
}
