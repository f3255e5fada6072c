use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::spec::{hole_count, ToeplitzSpec};
use crate::error::{Error, Result};
use crate::seqcore::{SequenceSource, SourceKind};

/// A point of the odometer `lim ℤ/n_kℤ`, materialized through level
/// `depth`: `residues[k − 1] = y_k mod n_k`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct OdometerPoint {
    periods: Vec<u64>,
    residues: Vec<u64>,
}

impl fmt::Debug for OdometerPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Odometer{:?}", self.residues)
    }
}

impl OdometerPoint {
    /// Checks `0 ≤ y_k < n_k` and `y_{k+1} ≡ y_k (mod n_k)`.
    pub fn new(periods: Vec<u64>, residues: Vec<u64>) -> Result<Self> {
        if periods.len() != residues.len() || periods.is_empty() {
            return Err(Error::InvalidArgument(
                "an odometer point needs one residue per period".into(),
            ));
        }
        for (k, (&y, &n)) in residues.iter().zip(&periods).enumerate() {
            if y >= n {
                return Err(Error::InvalidArgument(format!("residue {y} is not below n_{} = {n}", k + 1)));
            }
            if k > 0 && y % periods[k - 1] != residues[k - 1] {
                return Err(Error::InvalidArgument(format!(
                    "residues {} and {y} at levels {k}, {} are incompatible",
                    residues[k - 1],
                    k + 1
                )));
            }
        }
        Ok(OdometerPoint { periods, residues })
    }

    /// The image of the integer `t`.
    pub fn from_integer(periods: Vec<u64>, t: i128) -> Self {
        let residues = periods.iter().map(|&n| t.rem_euclid(n as i128) as u64).collect();
        OdometerPoint { periods, residues }
    }

    pub fn zero(periods: Vec<u64>) -> Self {
        Self::from_integer(periods, 0)
    }

    pub fn depth(&self) -> usize {
        self.residues.len()
    }

    pub fn periods(&self) -> &[u64] {
        &self.periods
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    /// `y_k`, `k ≥ 1`.
    pub fn residue(&self, k: usize) -> u64 {
        self.residues[k - 1]
    }

    /// Residues as signed representatives in `(−n_k/2, n_k/2]`.
    pub fn signed_residues(&self) -> Vec<i64> {
        self.residues
            .iter()
            .zip(&self.periods)
            .map(|(&y, &n)| if 2 * y > n { y as i64 - n as i64 } else { y as i64 })
            .collect()
    }

    /// The point truncated to its first `depth` levels.
    pub fn truncated(&self, depth: usize) -> Result<Self> {
        if depth == 0 || depth > self.depth() {
            return Err(Error::InvalidArgument(format!(
                "depth must be in 1..={}, got {depth}",
                self.depth()
            )));
        }
        Ok(OdometerPoint {
            periods: self.periods[..depth].to_vec(),
            residues: self.residues[..depth].to_vec(),
        })
    }
}

/// `y + t` through level `depth`.
pub fn odometer_add(y: &OdometerPoint, t: i128, depth: usize) -> Result<OdometerPoint> {
    let y = y.truncated(depth)?;
    let residues = y
        .residues
        .iter()
        .zip(&y.periods)
        .map(|(&r, &n)| (r as i128 + t).rem_euclid(n as i128) as u64)
        .collect();
    Ok(OdometerPoint { periods: y.periods, residues })
}

/// Where a point of the odometer falls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MefCell {
    /// In `U_b`, first decided at `level`.
    Open { letter: bool, level: usize },
    /// In the boundary at the materialized depth.
    Boundary(usize),
}

/// The partition `{U₀, U₁, B}` of the odometer induced by a Toeplitz spec,
/// materialized through `depth` levels.
#[derive(Debug, Clone, Serialize)]
pub struct OdometerMEFPartition {
    periods: Vec<u64>,
    /// Per level, filled residue → letter: the cylinder `{y : y_k = r}`
    /// lies in `U_letter`.
    assignment: Vec<BTreeMap<u64, bool>>,
    /// Limits of the hole streams, truncated at `depth`.
    boundary: Vec<OdometerPoint>,
}

impl OdometerMEFPartition {
    pub fn depth(&self) -> usize {
        self.periods.len()
    }

    pub fn periods(&self) -> &[u64] {
        &self.periods
    }

    pub fn assignment(&self, k: usize) -> &BTreeMap<u64, bool> {
        &self.assignment[k - 1]
    }

    pub fn boundary(&self) -> &[OdometerPoint] {
        &self.boundary
    }

    /// The cylinder in `U_letter` fixed by `y_k = r`, written as the residues
    /// it forces at levels `1..=k`.
    pub fn cylinder(&self, k: usize, r: u64) -> Option<(Vec<u64>, bool)> {
        let letter = *self.assignment.get(k.checked_sub(1)?)?.get(&r)?;
        Some((self.periods[..k].iter().map(|&n| r % n).collect(), letter))
    }

    pub fn classify(&self, y: &OdometerPoint) -> Result<MefCell> {
        if y.depth() < self.depth() {
            return Err(Error::InvalidArgument(format!(
                "point has depth {}, partition needs {}",
                y.depth(),
                self.depth()
            )));
        }
        for (k, level) in self.assignment.iter().enumerate() {
            if let Some(&letter) = level.get(&y.residues[k]) {
                return Ok(MefCell::Open { letter, level: k + 1 });
            }
        }
        let d = self.depth();
        self.boundary
            .iter()
            .position(|b| b.residues[d - 1] == y.residues[d - 1])
            .map(MefCell::Boundary)
            .ok_or_else(|| Error::InvalidSpec("point lies in no cell of the partition".into()))
    }
}

/// Cylinders of filled residues go to `U₀`/`U₁` by their letter; the
/// boundary is the set of hole streams at the spec's depth.
pub fn build_mef_partition(spec: &ToeplitzSpec) -> Result<OdometerMEFPartition> {
    let depth = spec.depth();
    let mut periods = Vec::with_capacity(depth);
    let mut assignment = Vec::with_capacity(depth);
    for k in 1..=depth {
        let level = spec.level(k)?;
        periods.push(level.period);
        assignment.push(level.filled.iter().copied().collect());
    }
    let last = spec.level(depth)?;
    if last.holes.is_empty() {
        return Err(Error::Precondition(
            "spec has no holes: the sequence is periodic, not a Toeplitz subshift point".into(),
        ));
    }
    debug_assert_eq!(hole_count(spec, depth)?, last.holes.len() as u64);
    let boundary = last
        .holes
        .iter()
        .map(|&h| OdometerPoint::from_integer(periods.clone(), h as i128))
        .collect();
    Ok(OdometerMEFPartition { periods, assignment, boundary })
}

/// Code the orbit `start + n` by the partition. Orbit points in the
/// boundary take the bit assigned to that boundary point, if any.
pub fn mef_code(
    partition: &OdometerMEFPartition,
    start: &OdometerPoint,
    boundary_bits: &BTreeMap<usize, bool>,
) -> Result<SequenceSource> {
    let start = start.truncated(partition.depth())?;
    let p = partition.clone();
    let bits = boundary_bits.clone();
    let label = format!("odometer coding from {:?}", start.residues);
    Ok(SequenceSource::generator(SourceKind::Toeplitz, label, move |n| {
        let y = odometer_add(&start, n as i128, p.depth())?;
        match p.classify(&y)? {
            MefCell::Open { letter, .. } => Ok(letter),
            MefCell::Boundary(i) => bits
                .get(&i)
                .copied()
                .ok_or(Error::BoundaryHit { n, boundary_index: i }),
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toeplitz::{generate, HolePolicy};

    #[test]
    fn minus_one_plus_one_is_zero() {
        let periods: Vec<u64> = (1..=8).map(|k| 3u64.pow(k)).collect();
        let y = OdometerPoint::from_integer(periods.clone(), -1);
        assert!(y.signed_residues().iter().all(|&r| r == -1));
        let z = odometer_add(&y, 1, 8).unwrap();
        assert_eq!(z, OdometerPoint::zero(periods.clone()));
        let w = odometer_add(&OdometerPoint::zero(periods), 27, 8).unwrap();
        assert_eq!(w.residue(3), 0);
    }

    #[test]
    fn incompatible_residues_are_rejected() {
        assert!(OdometerPoint::new(vec![2, 4], vec![1, 2]).is_err());
        assert!(OdometerPoint::new(vec![2, 4], vec![1, 3]).is_ok());
    }

    #[test]
    fn ternary_partition_matches_description() {
        let spec = ToeplitzSpec::ternary_example().with_depth(6).unwrap();
        let p = build_mef_partition(&spec).unwrap();
        assert_eq!(p.boundary().len(), 1);
        assert!(p.boundary()[0].signed_residues().iter().all(|&r| r == -1));
        for k in 1..=6 {
            let a = 3u64.pow(k as u32 - 1);
            let (pre0, l0) = p.cylinder(k, a - 1).unwrap();
            let (pre1, l1) = p.cylinder(k, 2 * a - 1).unwrap();
            assert!(!l0 && l1);
            let periods = &p.periods()[..k];
            for (j, (&r, &n)) in pre0.iter().zip(periods).enumerate().take(k - 1) {
                assert_eq!(r, n - 1, "level {}", j + 1);
            }
            assert_eq!(pre1[k - 1], 2 * a - 1);
            assert_eq!(p.assignment(k).len(), 2);
        }
        let x = mef_code(&p, &OdometerPoint::zero(p.periods().to_vec()), &BTreeMap::new()).unwrap();
        let direct = generate(&spec, HolePolicy::Error);
        assert_eq!(x.prefix(700).unwrap(), direct.prefix(700).unwrap());
    }

    #[test]
    fn boundary_hit_is_reported() {
        let spec = ToeplitzSpec::ternary_example().with_depth(3).unwrap();
        let p = build_mef_partition(&spec).unwrap();
        let x = mef_code(&p, &OdometerPoint::zero(p.periods().to_vec()), &BTreeMap::new()).unwrap();
        assert_eq!(x.eval(26), Err(Error::BoundaryHit { n: 26, boundary_index: 0 }));
        let g = generate(&spec, HolePolicy::Error);
        assert!(matches!(g.eval(26), Err(Error::Unfilled { position: 26, .. })));
    }
}
