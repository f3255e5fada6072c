use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::angle::{AngleSpec, ContinuedFractionSpec, ExactAngle, IrrationalAngle};
use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};
use crate::seqcore::{SequenceSource, SourceKind};

/// An arc of the circle, traversed counterclockwise from `lo` to `hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSpec<T: Scalar> {
    pub lo: ExactAngle<T>,
    pub hi: ExactAngle<T>,
    pub closed_lo: bool,
    pub closed_hi: bool,
    /// The whole circle; `lo`/`hi` are ignored.
    pub full: bool,
}

impl<T: Scalar> IntervalSpec<T> {
    pub fn new(lo: ExactAngle<T>, hi: ExactAngle<T>, closed_lo: bool, closed_hi: bool) -> Self {
        IntervalSpec { lo, hi, closed_lo, closed_hi, full: false }
    }

    /// `[lo, hi)`.
    pub fn half_open(lo: ExactAngle<T>, hi: ExactAngle<T>) -> Self {
        Self::new(lo, hi, true, false)
    }

    pub fn closed(lo: ExactAngle<T>, hi: ExactAngle<T>) -> Self {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: ExactAngle<T>, hi: ExactAngle<T>) -> Self {
        Self::new(lo, hi, false, false)
    }

    pub fn full_circle() -> Self {
        IntervalSpec {
            lo: ExactAngle::zero(),
            hi: ExactAngle::zero(),
            closed_lo: true,
            closed_hi: true,
            full: true,
        }
    }

    pub fn is_half_open(&self) -> bool {
        !self.full && self.closed_lo != self.closed_hi
    }

    /// Arc length `(hi − lo) mod 1`, as an exact angle in (0, 1).
    pub fn length(&self, alpha: &IrrationalAngle<T>) -> Result<ExactAngle<T>> {
        if self.full {
            return Ok(ExactAngle::rational(Ratio::one()));
        }
        self.hi.sub(&self.lo).frac(alpha)
    }

    /// Exact membership; `length` must be `self.length(alpha)`.
    pub(crate) fn contains_with_length(
        &self,
        p: &ExactAngle<T>,
        length: &ExactAngle<T>,
        alpha: &IrrationalAngle<T>,
    ) -> Result<bool> {
        if self.full {
            return Ok(true);
        }
        if p.congruent(&self.lo) {
            return Ok(self.closed_lo);
        }
        if p.congruent(&self.hi) {
            return Ok(self.closed_hi);
        }
        let rel = p.sub(&self.lo).frac(alpha)?;
        Ok(rel.cmp_real(length, alpha)? == Ordering::Less)
    }

    pub fn contains(&self, p: &ExactAngle<T>, alpha: &IrrationalAngle<T>) -> Result<bool> {
        let len = self.length(alpha)?;
        self.contains_with_length(p, &len, alpha)
    }
}

/// One coding cell: an arc and the letter it emits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell<T: Scalar> {
    pub interval: IntervalSpec<T>,
    pub letter: bool,
    length: ExactAngle<T>,
}

impl<T: Scalar> Cell<T> {
    pub fn length(&self) -> &ExactAngle<T> {
        &self.length
    }
}

/// A circle-rotation interval coding: `x(n)` is the letter of the cell
/// containing `base_point + n·α`.
///
/// Construction verifies exactly that the cells partition the circle and
/// that both letters occur.
#[derive(Debug, Clone)]
pub struct RotationCodingSpec<T: Scalar> {
    alpha: Arc<IrrationalAngle<T>>,
    cells: Vec<Cell<T>>,
    base_point: ExactAngle<T>,
}

impl<T: Scalar> RotationCodingSpec<T> {
    pub fn new(
        alpha: Arc<IrrationalAngle<T>>,
        cells: Vec<(IntervalSpec<T>, bool)>,
        base_point: ExactAngle<T>,
    ) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidSpec("a coding needs at least one cell".into()));
        }
        let first = cells[0].1;
        if cells.iter().all(|(_, l)| *l == first) {
            return Err(Error::InvalidSpec(
                "cell letters must not all be equal".into(),
            ));
        }
        let mut built = Vec::with_capacity(cells.len());
        for (interval, letter) in cells {
            if interval.full {
                return Err(Error::InvalidSpec(
                    "a full-circle cell cannot share the circle with other cells".into(),
                ));
            }
            if interval.lo.congruent(&interval.hi) {
                return Err(Error::InvalidSpec(format!(
                    "degenerate cell with lo = hi = {}",
                    interval.lo
                )));
            }
            let length = interval.length(&alpha)?;
            built.push(Cell { interval, letter, length });
        }
        validate_partition(&built)?;
        Ok(RotationCodingSpec { alpha, cells: built, base_point })
    }

    /// Two cells: `I₁ = [0, α)` coded 1, `I₀ = [α, 1)` coded 0.
    pub fn fibonacci() -> Self {
        let alpha = Arc::new(IrrationalAngle::golden());
        let zero = ExactAngle::zero();
        let a = ExactAngle::multiple(1).expect("small");
        Self::new(
            alpha,
            vec![
                (IntervalSpec::half_open(zero.clone(), a.clone()), true),
                (IntervalSpec::half_open(a, zero), false),
            ],
            ExactAngle::zero(),
        )
        .expect("valid spec")
    }

    /// Two cells `I₀ = [0, α]` coded 0 and `I₁ = (α, 1)` coded 1.
    pub fn closed_initial(alpha: IrrationalAngle<T>) -> Self {
        let zero = ExactAngle::zero();
        let a = ExactAngle::multiple(1).expect("small");
        Self::new(
            Arc::new(alpha),
            vec![
                (IntervalSpec::closed(zero.clone(), a.clone()), false),
                (IntervalSpec::open(a, zero), true),
            ],
            ExactAngle::zero(),
        )
        .expect("valid spec")
    }

    /// Two cells: `[lo, hi)` coded 1 and the complementary `[hi, lo)` coded 0.
    pub fn two_interval(alpha: Arc<IrrationalAngle<T>>, lo: ExactAngle<T>, hi: ExactAngle<T>) -> Result<Self> {
        Self::new(
            alpha,
            vec![
                (IntervalSpec::half_open(lo.clone(), hi.clone()), true),
                (IntervalSpec::half_open(hi, lo), false),
            ],
            ExactAngle::zero(),
        )
    }

    pub fn alpha(&self) -> &Arc<IrrationalAngle<T>> {
        &self.alpha
    }

    pub fn cells(&self) -> &[Cell<T>] {
        &self.cells
    }

    pub fn base_point(&self) -> &ExactAngle<T> {
        &self.base_point
    }

    pub fn is_simple(&self) -> bool {
        self.cells.len() == 2
    }

    /// Index of the cell containing `p`.
    pub fn cell_of(&self, p: &ExactAngle<T>) -> Result<usize> {
        for (i, c) in self.cells.iter().enumerate() {
            if c.interval.contains_with_length(p, &c.length, &self.alpha)? {
                return Ok(i);
            }
        }
        // Unreachable for a validated partition.
        Err(Error::InvalidSpec(format!("point {p} lies in no cell")))
    }

    /// All cells containing `p`; exactly one for a valid spec.
    pub fn cells_containing(&self, p: &ExactAngle<T>) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, c) in self.cells.iter().enumerate() {
            if c.interval.contains_with_length(p, &c.length, &self.alpha)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    pub fn letter_at(&self, p: &ExactAngle<T>) -> Result<bool> {
        Ok(self.cells[self.cell_of(p)?].letter)
    }

    /// The orbit point `base_point + n·α`.
    pub fn orbit_point(&self, n: usize) -> Result<ExactAngle<T>> {
        let k: T = scalar::from_u64(n as u64)?;
        Ok(self.base_point.add_multiple(&k))
    }

    pub fn eval(&self, n: usize) -> Result<bool> {
        self.letter_at(&self.orbit_point(n)?)
    }

    pub fn to_file(&self) -> RotationSpecFile {
        RotationSpecFile {
            alpha: self.alpha.to_spec(),
            cells: self
                .cells
                .iter()
                .map(|c| CellSpec {
                    lo: c.interval.lo.to_spec(),
                    hi: c.interval.hi.to_spec(),
                    closed_lo: c.interval.closed_lo,
                    closed_hi: c.interval.closed_hi,
                    letter: c.letter as u8,
                })
                .collect(),
            base_point: Some(self.base_point.to_spec()),
        }
    }

    pub fn from_file(file: &RotationSpecFile) -> Result<Self> {
        let alpha = Arc::new(IrrationalAngle::from_spec(&file.alpha)?);
        let cells = file
            .cells
            .iter()
            .map(|c| {
                let letter = match c.letter {
                    0 => false,
                    1 => true,
                    l => return Err(Error::InvalidSpec(format!("letter must be 0 or 1, got {l}"))),
                };
                Ok((
                    IntervalSpec::new(
                        ExactAngle::from_spec(&c.lo)?,
                        ExactAngle::from_spec(&c.hi)?,
                        c.closed_lo,
                        c.closed_hi,
                    ),
                    letter,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let base = match &file.base_point {
            Some(b) => ExactAngle::from_spec(b)?,
            None => ExactAngle::zero(),
        };
        Self::new(alpha, cells, base)
    }
}

/// Cells tile the circle iff their lengths sum to exactly 1 and each cell's
/// upper endpoint is the lower endpoint of exactly one other cell, with the
/// shared point owned by exactly one of the two.
fn validate_partition<T: Scalar>(cells: &[Cell<T>]) -> Result<()> {
    let mut total = ExactAngle::<T>::zero();
    for c in cells {
        total = total.add(&c.length);
    }
    if !(total.d.is_zero() && total.c == Ratio::one()) {
        return Err(Error::InvalidSpec(format!(
            "cell lengths sum to {total}, not 1: cells overlap or leave gaps"
        )));
    }
    let mut visited = vec![false; cells.len()];
    let mut i = 0;
    for _ in 0..cells.len() {
        if visited[i] {
            return Err(Error::InvalidSpec("cells do not form a single cycle".into()));
        }
        visited[i] = true;
        let next: Vec<usize> = (0..cells.len())
            .filter(|&j| cells[j].interval.lo.congruent(&cells[i].interval.hi))
            .collect();
        let j = match next.as_slice() {
            [j] => *j,
            [] => {
                return Err(Error::InvalidSpec(format!(
                    "no cell starts where cell {i} ends ({})",
                    cells[i].interval.hi
                )))
            }
            _ => {
                return Err(Error::InvalidSpec(format!(
                    "several cells start at {}",
                    cells[i].interval.hi
                )))
            }
        };
        if cells[i].interval.closed_hi == cells[j].interval.closed_lo {
            return Err(Error::InvalidSpec(format!(
                "endpoint {} must belong to exactly one of cells {i} and {j}",
                cells[i].interval.hi
            )));
        }
        i = j;
    }
    if i != 0 || visited.iter().any(|v| !v) {
        return Err(Error::InvalidSpec("cells do not form a single cycle".into()));
    }
    Ok(())
}

/// The coding sequence `n ↦ letter of the cell containing base + n·α`.
pub fn code<T: Scalar>(spec: &RotationCodingSpec<T>) -> SequenceSource {
    let spec = spec.clone();
    let label = format!(
        "rotation coding, α = {}, {} cells",
        spec.alpha.cf_string(),
        spec.cells.len()
    );
    SequenceSource::generator(SourceKind::RotationCoding, label, move |n| spec.eval(n))
}

/// The rotation spec file format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationSpecFile {
    pub alpha: ContinuedFractionSpec,
    pub cells: Vec<CellSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<AngleSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSpec {
    pub lo: AngleSpec,
    pub hi: AngleSpec,
    pub closed_lo: bool,
    pub closed_hi: bool,
    pub letter: u8,
}

/// Convert a spec to a wider scalar.
pub fn widen<T: Scalar>(spec: &RotationCodingSpec<T>) -> Result<RotationCodingSpec<BigInt>> {
    RotationCodingSpec::from_file(&spec.to_file())
}

#[cfg(test)]
mod tests {
    use super::*;

    type Spec = RotationCodingSpec<i128>;

    fn angle(c: i64, d: i64) -> ExactAngle<i128> {
        ExactAngle::int(c, d).unwrap()
    }

    #[test]
    fn fibonacci_prefix() {
        let x = code(&Spec::fibonacci());
        let p = x.prefix(20).unwrap().to_bit_string();
        assert!(p.starts_with("10"));
        // No two consecutive zeros in a coding with |I₀| = 1 − α < α.
        assert!(!p.contains("00"));
    }

    #[test]
    fn full_circle_single_cell_rejected() {
        let alpha = Arc::new(IrrationalAngle::<i128>::golden());
        let err = Spec::new(alpha.clone(), vec![(IntervalSpec::full_circle(), true)], ExactAngle::zero());
        assert!(matches!(err, Err(Error::InvalidSpec(_))));
        let same_letters = Spec::new(
            alpha,
            vec![
                (IntervalSpec::half_open(angle(0, 0), angle(0, 1)), true),
                (IntervalSpec::half_open(angle(0, 1), angle(0, 0)), true),
            ],
            ExactAngle::zero(),
        );
        assert!(same_letters.is_err());
    }

    #[test]
    fn overlapping_or_gapped_cells_rejected() {
        let alpha = Arc::new(IrrationalAngle::<i128>::golden());
        // Both cells contain α.
        let overlap = Spec::new(
            alpha.clone(),
            vec![
                (IntervalSpec::closed(angle(0, 0), angle(0, 1)), true),
                (IntervalSpec::closed(angle(0, 1), angle(0, 0)), false),
            ],
            ExactAngle::zero(),
        );
        assert!(overlap.is_err());
        let gap = Spec::new(
            alpha,
            vec![
                (IntervalSpec::half_open(angle(0, 0), angle(0, 1)), true),
                (IntervalSpec::half_open(angle(0, 2), angle(0, 0)), false),
            ],
            ExactAngle::zero(),
        );
        assert!(gap.is_err());
    }

    #[test]
    fn closed_initial_cell_with_small_alpha_begins_00_then_never_again() {
        let spec = Spec::closed_initial(IrrationalAngle::golden_complement());
        let bits = code(&spec).prefix(5000).unwrap().to_bit_string();
        assert!(bits.starts_with("00"));
        assert_eq!(bits.matches("00").count(), 1);
    }

    #[test]
    fn three_cell_coding_is_total() {
        let alpha = Arc::new(IrrationalAngle::<i128>::silver());
        let third = ExactAngle::rational(Ratio::new(1, 3));
        let two_thirds = ExactAngle::rational(Ratio::new(2, 3));
        let spec = Spec::new(
            alpha,
            vec![
                (IntervalSpec::half_open(ExactAngle::zero(), third.clone()), true),
                (IntervalSpec::half_open(third, two_thirds.clone()), false),
                (IntervalSpec::half_open(two_thirds, ExactAngle::zero()), true),
            ],
            ExactAngle::zero(),
        )
        .unwrap();
        for n in 0..500 {
            assert_eq!(spec.cells_containing(&spec.orbit_point(n).unwrap()).unwrap().len(), 1);
        }
    }

    #[test]
    fn spec_file_round_trip() {
        let spec = Spec::closed_initial(IrrationalAngle::golden_complement());
        let json = serde_json::to_string(&spec.to_file()).unwrap();
        let back = Spec::from_file(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(
            code(&back).prefix(300).unwrap(),
            code(&spec).prefix(300).unwrap()
        );
        let big = widen(&spec).unwrap();
        assert_eq!(code(&big).prefix(300).unwrap(), code(&spec).prefix(300).unwrap());
    }
}
