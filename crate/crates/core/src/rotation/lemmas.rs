use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::angle::{AngleSpec, ExactAngle};
use super::coding::{code, RotationCodingSpec};
use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};
use crate::seqcore::{tape_for, tau_language, tau_language_on, Window, Word};

/// Nonempty atoms of the partition `⋁_{j∈τ} (ξ − jα)` of a two-cell coding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellCount {
    pub window: Window,
    pub cell_count: usize,
    /// Atoms containing an open arc.
    pub interval_cells: usize,
    /// Atoms consisting of isolated endpoints only.
    pub singleton_cells: usize,
    /// Distinct endpoints `e − jα` on the circle.
    pub endpoints: usize,
}

fn require_simple<T: Scalar>(spec: &RotationCodingSpec<T>) -> Result<()> {
    if spec.is_simple() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "only two-cell codings are supported here, got {} cells",
            spec.cells().len()
        )))
    }
}

fn small<T: Scalar>(v: usize) -> Result<T> {
    scalar::from_u64(v as u64)
}

/// The letters read at `p + jα` for `j ∈ τ`.
fn signature<T: Scalar>(spec: &RotationCodingSpec<T>, p: &ExactAngle<T>, tau: &Window) -> Result<Vec<bool>> {
    tau.offsets()
        .iter()
        .map(|&j| spec.letter_at(&p.add_multiple(&small(j)?)))
        .collect()
}

/// Count the atoms exactly: sort the endpoints `e − jα` around the circle
/// and evaluate the letter signature at every endpoint and at the midpoint
/// of every arc between neighbours.
pub fn partition_cell_count<T: Scalar>(spec: &RotationCodingSpec<T>, tau: &Window) -> Result<CellCount> {
    require_simple(spec)?;
    let alpha = spec.alpha();
    let mut points: Vec<ExactAngle<T>> = Vec::new();
    for cell in spec.cells() {
        for &j in tau.offsets() {
            let k: T = small(j)?;
            let p = cell.interval.lo.add_multiple(&-k).frac(alpha)?;
            if !points.iter().any(|q| q.congruent(&p)) {
                points.push(p);
            }
        }
    }
    let mut cmp_err = None;
    points.sort_by(|a, b| {
        a.cmp_real(b, alpha).unwrap_or_else(|e| {
            cmp_err.get_or_insert(e);
            Ordering::Equal
        })
    });
    if let Some(e) = cmp_err {
        return Err(e);
    }

    let two = Ratio::from_integer(small::<T>(2)?);
    let mut at_points = BTreeSet::new();
    let mut on_arcs = BTreeSet::new();
    for (i, p) in points.iter().enumerate() {
        at_points.insert(signature(spec, p, tau)?);
        let next = if i + 1 < points.len() {
            points[i + 1].clone()
        } else {
            points[0].add(&ExactAngle::rational(Ratio::one()))
        };
        let mid = ExactAngle::new(
            (p.c.clone() + next.c.clone()) / two.clone(),
            (p.d.clone() + next.d.clone()) / two.clone(),
        );
        on_arcs.insert(signature(spec, &mid, tau)?);
    }
    let singleton_cells = at_points.difference(&on_arcs).count();
    Ok(CellCount {
        window: tau.clone(),
        cell_count: on_arcs.len() + singleton_cells,
        interval_cells: on_arcs.len(),
        singleton_cells,
        endpoints: points.len(),
    })
}

/// Observed language size against the exact atom count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleComparison {
    pub window: Window,
    pub shift_bound: usize,
    pub refinement_count: usize,
    pub cell_count: usize,
    /// `refinement_count ≤ cell_count`.
    pub consistent: bool,
    /// For all-half-open codings, whether the observed count reached the
    /// atom count; `None` otherwise.
    pub reached_equality: Option<bool>,
}

pub fn oracle_language_bound<T: Scalar>(
    spec: &RotationCodingSpec<T>,
    tau: &Window,
    shift_bound: usize,
) -> Result<OracleComparison> {
    let cells = partition_cell_count(spec, tau)?;
    let report = tau_language(&code(spec), tau, shift_bound)?;
    let half_open = spec.cells().iter().all(|c| c.interval.is_half_open());
    Ok(OracleComparison {
        window: tau.clone(),
        shift_bound,
        refinement_count: report.count(),
        cell_count: cells.cell_count,
        consistent: report.count() <= cells.cell_count,
        reached_equality: half_open.then_some(report.count() == cells.cell_count),
    })
}

/// An arithmetic window `{0, k, …, (n−1)k}` along which the coding has no
/// constant word.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantFreeWindow {
    pub k: usize,
    pub window: Window,
    /// `kα mod 1`.
    pub theta: AngleSpec,
    pub shift_bound: usize,
    pub language_count: usize,
    pub has_constant_word: bool,
    /// Language size is `2n` and neither constant word was seen.
    pub verified: bool,
}

/// Search `k` among convergent denominators of α, then `1..=max_k`, for
/// `θ = kα mod 1` shorter than both cells and with `|I₁| ≢ mθ` for every
/// integer `m`. The first candidate whose window verifies is returned; if
/// none verifies, the first admissible one is returned unverified.
pub fn find_constant_free_window<T: Scalar>(
    spec: &RotationCodingSpec<T>,
    n: usize,
    max_k: usize,
    shift_bound: usize,
) -> Result<ConstantFreeWindow> {
    require_simple(spec)?;
    if n < 2 {
        return Err(Error::InvalidArgument(
            "a window with fewer than two offsets always reads a constant word".into(),
        ));
    }
    if !spec.cells().iter().all(|c| c.interval.is_half_open()) {
        return Err(Error::Precondition("both cells must be half-open".into()));
    }
    let alpha = spec.alpha();
    let shortest = {
        let (a, b) = (spec.cells()[0].length(), spec.cells()[1].length());
        if a.cmp_real(b, alpha)? == Ordering::Less { a.clone() } else { b.clone() }
    };
    let ones = spec.cells().iter().find(|c| c.letter).expect("two letters").length().clone();

    let mut candidates = Vec::new();
    for i in 1.. {
        let q = match alpha.convergent(i) {
            Ok((_, q)) => q.to_usize().unwrap_or(usize::MAX),
            Err(_) => break,
        };
        if q > max_k {
            break;
        }
        if !candidates.contains(&q) {
            candidates.push(q);
        }
    }
    for k in 1..=max_k {
        if !candidates.contains(&k) {
            candidates.push(k);
        }
    }

    let x = code(spec);
    let mut fallback = None;
    for k in candidates {
        let kt: T = small(k)?;
        let theta = ExactAngle::multiple(1)?.scale(&Ratio::from_integer(kt.clone())).frac(alpha)?;
        if theta.cmp_real(&shortest, alpha)? != Ordering::Less {
            continue;
        }
        if ones.c.is_integer() && ones.d.is_integer() && !ones.d.is_zero() {
            let d = ones.d.to_integer();
            if (d % kt).is_zero() {
                continue;
            }
        }
        let window = Window::progression(k, n)?;
        let report = tau_language(&x, &window, shift_bound)?;
        let has_constant_word = report.contains(&Word::constant(false, n)) || report.contains(&Word::constant(true, n));
        let found = ConstantFreeWindow {
            k,
            window,
            theta: theta.to_spec(),
            shift_bound,
            language_count: report.count(),
            has_constant_word,
            verified: report.count() == 2 * n && !has_constant_word,
        };
        if found.verified {
            return Ok(found);
        }
        fallback.get_or_insert(found);
    }
    fallback.ok_or_else(|| {
        Error::SearchFailure(format!("no admissible k ≤ {max_k} for n = {n}"))
    })
}

/// A window whose constant pattern occurs at exactly one shift.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonrecurrenceWitness {
    pub window: Window,
    pub letter: bool,
    pub cell_index: usize,
    pub k1: usize,
    pub k2: usize,
    /// `min(k1, k2)`: the shift the constant pattern is expected at.
    pub unique_shift: usize,
    pub horizon: usize,
    /// Shifts `≤ horizon` where the constant pattern was read (first few).
    pub occurrences: Vec<usize>,
    pub occurrence_count: usize,
    /// The pattern was seen at `unique_shift` and nowhere else.
    pub confirmed: bool,
}

const MAX_LISTED_OCCURRENCES: usize = 32;

/// Nonnegative integer `k` with `p − base ≡ kα`, if any.
fn orbit_index<T: Scalar>(p: &ExactAngle<T>, base: &ExactAngle<T>) -> Option<usize> {
    let rel = p.sub(base);
    if !rel.c.is_integer() || !rel.d.is_integer() || rel.d.is_negative() {
        return None;
    }
    rel.d.to_integer().to_usize()
}

/// For a two-cell coding with a closed cell `[k₁α, k₂α]`, the window
/// `{0, Δ, …, ⌊1/(1 − L)⌋Δ}` with `Δ = |k₂ − k₁|` and `L` the cell length,
/// and a scan of shifts `0..=horizon` for its constant pattern. `None` when
/// no closed cell has both endpoints on the orbit of the base point.
pub fn nonrecurrence_witness<T: Scalar>(
    spec: &RotationCodingSpec<T>,
    horizon: usize,
) -> Result<Option<NonrecurrenceWitness>> {
    require_simple(spec)?;
    let alpha = spec.alpha();
    for (i, cell) in spec.cells().iter().enumerate() {
        if !(cell.interval.closed_lo && cell.interval.closed_hi) {
            continue;
        }
        let (Some(k1), Some(k2)) = (
            orbit_index(&cell.interval.lo, spec.base_point()),
            orbit_index(&cell.interval.hi, spec.base_point()),
        ) else {
            continue;
        };
        if k1 == k2 {
            continue;
        }
        let start = k1.min(k2);
        let step = k1.abs_diff(k2);
        // Largest m with m·(1 − L) ≤ 1.
        let gap = ExactAngle::rational(Ratio::one()).sub(cell.length());
        let one = ExactAngle::rational(Ratio::one());
        let mut m = 1usize;
        loop {
            let next = gap.scale(&Ratio::from_integer(small::<T>(m + 1)?));
            if next.cmp_real(&one, alpha)? == Ordering::Greater {
                break;
            }
            m += 1;
        }
        let window = Window::progression(step, m + 1)?;
        let tape = tape_for(&code(spec), horizon, window.diameter())?;
        let report = tau_language_on(&tape, &window, horizon)?;
        let pattern = Word::constant(cell.letter, window.size());
        let mut occurrences = Vec::new();
        let mut occurrence_count = 0;
        if report.contains(&pattern) {
            for s in 0..=horizon {
                if window.offsets().iter().all(|&t| tape.get(s + t) == cell.letter) {
                    occurrence_count += 1;
                    if occurrences.len() < MAX_LISTED_OCCURRENCES {
                        occurrences.push(s);
                    }
                }
            }
        }
        return Ok(Some(NonrecurrenceWitness {
            confirmed: occurrence_count == 1 && occurrences == [start],
            window,
            letter: cell.letter,
            cell_index: i,
            k1,
            k2,
            unique_shift: start,
            horizon,
            occurrences,
            occurrence_count,
        }));
    }
    Ok(None)
}
