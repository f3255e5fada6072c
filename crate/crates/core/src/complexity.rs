//! Search for maximal pattern complexity `p*_x(n)`.
//!
//! Windows are explored as a tree: the children of a canonical window `τ`
//! are `τ ∪ {t}` for `max τ < t ≤ D`, so every canonical window of diameter
//! at most `D` has exactly one parent. Nodes are expanded best first and a
//! node is pruned when `|L(τ)|·2^{n−|τ|}` cannot beat the best count for any
//! larger `n`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{BitTape, ShiftSet};
use crate::error::{Error, Result};
use crate::seqcore::{tape_for, tau_language_on, SequenceSource, ShiftPartition, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub max_n: usize,
    /// Largest offset allowed in a window.
    pub diameter_cap: usize,
    /// Shifts `0..=shift_bound` are read.
    pub shift_bound: usize,
    /// Maximum number of windows whose class count is computed.
    pub node_budget: usize,
    /// Disable to check that pruning never changes a count.
    #[serde(default = "default_pruning")]
    pub pruning: bool,
}

fn default_pruning() -> bool {
    true
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_n: 5,
            diameter_cap: 64,
            shift_bound: 20_000,
            node_budget: 200_000,
            pruning: true,
        }
    }
}

impl SearchBounds {
    pub fn new(max_n: usize, diameter_cap: usize, shift_bound: usize, node_budget: usize) -> Result<Self> {
        let b = SearchBounds {
            max_n,
            diameter_cap,
            shift_bound,
            node_budget,
            pruning: true,
        };
        b.validate()?;
        Ok(b)
    }

    /// Largest bounds readable from a prefix of `len` bits with the given
    /// diameter cap.
    pub fn for_prefix(len: usize, max_n: usize, diameter_cap: usize, node_budget: usize) -> Result<Self> {
        if len <= diameter_cap {
            return Err(Error::InvalidArgument(format!(
                "a prefix of {len} bits cannot hold windows of diameter {diameter_cap}"
            )));
        }
        Self::new(max_n, diameter_cap, len - diameter_cap - 1, node_budget)
    }

    pub fn without_pruning(mut self) -> Self {
        self.pruning = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_n == 0 {
            return Err(Error::InvalidArgument("max_n must be at least 1".into()));
        }
        if self.diameter_cap + 1 < self.max_n {
            return Err(Error::InvalidArgument(format!(
                "diameter cap {} leaves no window of size {}",
                self.diameter_cap, self.max_n
            )));
        }
        if self.node_budget == 0 {
            return Err(Error::InvalidArgument("node budget must be positive".into()));
        }
        Ok(())
    }

    /// Prefix length the search reads.
    pub fn readable_len(&self) -> usize {
        self.shift_bound + self.diameter_cap + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    LowerBound,
    /// The best window's pattern set stopped growing over the last part of
    /// the shift range.
    SaturatedLowerBound,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::LowerBound => "lower_bound",
            Verdict::SaturatedLowerBound => "saturated_lower_bound",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRow {
    pub n: usize,
    pub best_window: Window,
    pub best_count: usize,
    /// Windows of size `n` whose count was computed.
    pub explored_nodes: usize,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityCertificate {
    pub bounds: SearchBounds,
    pub rows: Vec<CertificateRow>,
    pub explored_nodes: usize,
    pub budget_exhausted: bool,
    /// Every canonical window within the bounds was either counted or
    /// pruned by the admissible bound.
    pub exhaustive: bool,
}

impl ComplexityCertificate {
    pub fn row(&self, n: usize) -> Option<&CertificateRow> {
        n.checked_sub(1).and_then(|i| self.rows.get(i))
    }

    pub fn best_count(&self, n: usize) -> Option<usize> {
        self.row(n).map(|r| r.best_count)
    }

    /// `best(n) ≤ best(n+1) ≤ 2·best(n)` for consecutive rows.
    pub fn is_monotone(&self) -> bool {
        self.rows
            .windows(2)
            .all(|p| p[0].best_count <= p[1].best_count && p[1].best_count <= 2 * p[0].best_count)
    }
}

/// Columns `m ↦ x(m + t)` for every `t ≤ D`, shared by all nodes.
struct Columns {
    tape: Arc<BitTape>,
    shift_bound: usize,
    cols: Vec<ShiftSet>,
}

impl Columns {
    fn new(tape: Arc<BitTape>, shift_bound: usize, diameter_cap: usize) -> Self {
        let cols = (0..=diameter_cap)
            .into_par_iter()
            .map(|t| tape.column(t, shift_bound + 1))
            .collect();
        Columns { tape, shift_bound, cols }
    }

    fn partition(&self, offsets: &[usize]) -> ShiftPartition {
        let mut p = ShiftPartition::root(Arc::clone(&self.tape), self.shift_bound).expect("tape covers the shift bound");
        for &t in &offsets[1..] {
            p = p.refine_with_column(t, &self.cols[t]);
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    count: usize,
    offsets: Vec<usize>,
}

impl Node {
    fn diameter(&self) -> usize {
        *self.offsets.last().expect("windows are nonempty")
    }
}

/// Larger count first, then smaller diameter, then lexicographically
/// smaller offsets.
fn preference(a: &Node, b: &Node) -> Ordering {
    a.count
        .cmp(&b.count)
        .then_with(|| b.diameter().cmp(&a.diameter()))
        .then_with(|| b.offsets.cmp(&a.offsets))
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        preference(self, other)
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Search<'a> {
    bounds: &'a SearchBounds,
    columns: Columns,
    /// `best[j]` for windows of size `j + 1`.
    best: Vec<Node>,
    per_size: Vec<usize>,
    explored: usize,
}

impl Search<'_> {
    fn record(&mut self, node: &Node) {
        let slot = &mut self.best[node.offsets.len() - 1];
        if preference(node, slot) == Ordering::Greater {
            *slot = node.clone();
        }
    }

    /// True when no descendant of a node of this size and count can beat a
    /// current best.
    fn prunable(&self, size: usize, count: usize) -> bool {
        if !self.bounds.pruning {
            return false;
        }
        let cap = self.bounds.shift_bound + 1;
        (size + 1..=self.bounds.max_n).all(|n| {
            let bound = u32::try_from(n - size)
                .ok()
                .and_then(|e| count.checked_shl(e))
                .filter(|&v| v >> (n - size) == count)
                .map_or(cap, |v| v.min(cap));
            bound <= self.best[n - 1].count
        })
    }

    fn run(&mut self) -> bool {
        let root_offsets = vec![0];
        let root = Node {
            count: self.columns.partition(&root_offsets).class_count(),
            offsets: root_offsets,
        };
        self.explored = 1;
        self.per_size[0] = 1;
        self.best[0] = root.clone();
        let mut frontier = BinaryHeap::new();
        if self.bounds.max_n > 1 {
            frontier.push(root);
        }
        while let Some(node) = frontier.pop() {
            let size = node.offsets.len();
            if self.prunable(size, node.count) {
                continue;
            }
            let remaining = self.bounds.node_budget - self.explored;
            let candidates: Vec<usize> = (node.diameter() + 1..=self.bounds.diameter_cap).collect();
            if candidates.is_empty() {
                continue;
            }
            let exhausted = candidates.len() > remaining;
            let candidates = &candidates[..candidates.len().min(remaining)];
            let partition = self.columns.partition(&node.offsets);
            let counts: Vec<usize> = candidates
                .par_iter()
                .map(|&t| partition.refined_count_with_column(&self.columns.cols[t]))
                .collect();
            self.explored += counts.len();
            self.per_size[size] += counts.len();
            for (&t, &count) in candidates.iter().zip(&counts) {
                let mut offsets = node.offsets.clone();
                offsets.push(t);
                let child = Node { count, offsets };
                self.record(&child);
                if size + 1 < self.bounds.max_n && !self.prunable(size + 1, child.count) {
                    frontier.push(child);
                }
            }
            if exhausted {
                return true;
            }
            if self.explored >= self.bounds.node_budget && !frontier.is_empty() {
                return true;
            }
        }
        false
    }

    /// Make `best(n) ≤ best(n + 1)` hold even when the budget stopped the
    /// search early, by extending the best window of size `n`.
    fn complete(&mut self) {
        for j in 0..self.best.len() - 1 {
            if self.best[j + 1].count >= self.best[j].count {
                continue;
            }
            let base = &self.best[j].offsets;
            let t = (1..=self.bounds.diameter_cap)
                .find(|t| !base.contains(t))
                .expect("diameter cap leaves room for every size");
            let mut offsets = base.clone();
            offsets.push(t);
            offsets.sort_unstable();
            let count = self.columns.partition(&offsets).class_count();
            self.explored += 1;
            self.per_size[j + 1] += 1;
            self.record(&Node { count, offsets });
        }
    }
}

/// Lower bounds for `p*_x(n)`, `n ≤ max_n`, over canonical windows of
/// diameter at most `D` and shifts at most `S`.
pub fn pstar(x: &SequenceSource, bounds: &SearchBounds) -> Result<ComplexityCertificate> {
    bounds.validate()?;
    let tape = tape_for(x, bounds.shift_bound, bounds.diameter_cap)?;
    pstar_on(&tape, bounds)
}

/// Same as [`pstar`] on a materialized prefix of length at least
/// `S + D + 1`.
pub fn pstar_on(tape: &Arc<BitTape>, bounds: &SearchBounds) -> Result<ComplexityCertificate> {
    bounds.validate()?;
    if tape.len() < bounds.readable_len() {
        return Err(Error::OutOfRange {
            index: bounds.readable_len() - 1,
            valid_up_to: tape.len(),
        });
    }
    let empty = Node { count: 0, offsets: Vec::new() };
    let mut search = Search {
        bounds,
        columns: Columns::new(Arc::clone(tape), bounds.shift_bound, bounds.diameter_cap),
        best: vec![empty; bounds.max_n],
        per_size: vec![0; bounds.max_n],
        explored: 0,
    };
    let budget_exhausted = search.run();
    search.complete();
    let rows = search
        .best
        .iter()
        .zip(&search.per_size)
        .enumerate()
        .map(|(j, (node, &explored))| {
            let window = Window::new(node.offsets.clone())?;
            let report = tau_language_on(tape, &window, bounds.shift_bound)?;
            debug_assert_eq!(report.count(), node.count);
            Ok(CertificateRow {
                n: j + 1,
                best_window: window,
                best_count: node.count,
                explored_nodes: explored,
                verdict: if report.saturated {
                    Verdict::SaturatedLowerBound
                } else {
                    Verdict::LowerBound
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComplexityCertificate {
        bounds: *bounds,
        rows,
        explored_nodes: search.explored,
        budget_exhausted,
        exhaustive: !budget_exhausted,
    })
}

/// `x(n) = x(n + t)` for all `s < n ≤ horizon − t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Periodicity {
    pub period: usize,
    /// Last index where the relation fails, 0 if it never does.
    pub preperiod: usize,
}

/// Least period `t` (then least `s`) holding across `x[0, horizon]`. Only
/// `t, s ≤ horizon / 4` are accepted, so the relation is confirmed on at
/// least half of the scanned range.
pub fn periodicity_scan(x: &SequenceSource, horizon: usize) -> Result<Option<Periodicity>> {
    if horizon < 4 {
        return Err(Error::InvalidArgument(format!("horizon must be at least 4, got {horizon}")));
    }
    let tape = x.prefix(horizon + 1)?;
    let limit = horizon / 4;
    for t in 1..=limit {
        let count = horizon + 1 - t;
        let diff = tape.column(0, count).xor(&tape.column(t, count));
        let s = diff.last().unwrap_or(0);
        if s <= limit {
            return Ok(Some(Periodicity { period: t, preperiod: s }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SturmianVerdict {
    /// No window within bounds exceeds `2n` patterns. Never a proof.
    Consistent,
    Refuted,
}

impl fmt::Display for SturmianVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SturmianVerdict::Consistent => "consistent",
            SturmianVerdict::Refuted => "refuted",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SturmianCheck {
    pub verdict: SturmianVerdict,
    pub refuting_n: Option<usize>,
    pub refuting_window: Option<Window>,
    pub refuting_count: Option<usize>,
    /// Set when the scan found the input eventually periodic, in which case
    /// `p*` is bounded and a consistent verdict says little.
    pub periodicity: Option<Periodicity>,
    pub certificate: ComplexityCertificate,
}

/// Refute `p*_x(n) = 2n` by a window with more than `2n` patterns at the
/// smallest such `n`.
pub fn check_pattern_sturmian(x: &SequenceSource, bounds: &SearchBounds) -> Result<SturmianCheck> {
    let certificate = pstar(x, bounds)?;
    let periodicity = periodicity_scan(x, bounds.readable_len() - 1)?;
    let refuting = certificate.rows.iter().find(|r| r.best_count > 2 * r.n);
    Ok(SturmianCheck {
        verdict: if refuting.is_some() {
            SturmianVerdict::Refuted
        } else {
            SturmianVerdict::Consistent
        },
        refuting_n: refuting.map(|r| r.n),
        refuting_window: refuting.map(|r| r.best_window.clone()),
        refuting_count: refuting.map(|r| r.best_count),
        periodicity,
        certificate,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloorRow {
    pub n: usize,
    pub best_count: usize,
    /// `best_count ≥ 2n`; false means inconclusive within bounds.
    pub attained: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorseHedlundReport {
    /// Why the check was not run, if it was skipped.
    pub skipped: Option<String>,
    pub rows: Vec<FloorRow>,
}

impl MorseHedlundReport {
    pub fn all_attained(&self) -> bool {
        self.skipped.is_none() && self.rows.iter().all(|r| r.attained)
    }
}

/// Whether the search attains the floor `p*_x(n) ≥ 2n` that holds for every
/// non-eventually-periodic sequence.
pub fn morse_hedlund_check(x: &SequenceSource, bounds: &SearchBounds) -> Result<MorseHedlundReport> {
    bounds.validate()?;
    if let Some(p) = periodicity_scan(x, bounds.readable_len() - 1)? {
        return Ok(MorseHedlundReport {
            skipped: Some(format!(
                "eventually periodic within the horizon: period {}, preperiod {}",
                p.period, p.preperiod
            )),
            rows: Vec::new(),
        });
    }
    let cert = pstar(x, bounds)?;
    Ok(MorseHedlundReport {
        skipped: None,
        rows: cert
            .rows
            .iter()
            .map(|r| FloorRow {
                n: r.n,
                best_count: r.best_count,
                attained: r.best_count >= 2 * r.n,
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(max_n: usize, d: usize, s: usize) -> SearchBounds {
        SearchBounds::new(max_n, d, s, 1_000_000).unwrap()
    }

    #[test]
    fn constant_sequence_has_one_pattern() {
        let cert = pstar(&SequenceSource::constant(true), &small(4, 10, 500)).unwrap();
        assert!(cert.rows.iter().all(|r| r.best_count == 1));
        assert!(cert.exhaustive);
    }

    #[test]
    fn intro_prefix_gives_four_at_two() {
        let x = SequenceSource::from_bit_str("010110").unwrap();
        let cert = pstar(&x, &small(2, 2, 3)).unwrap();
        assert_eq!(cert.best_count(2), Some(4));
        assert_eq!(cert.rows[1].best_window.offsets(), &[0, 2]);
    }

    #[test]
    fn periodic_scan() {
        let x = SequenceSource::eventually_periodic("", "01").unwrap();
        assert_eq!(periodicity_scan(&x, 1000).unwrap(), Some(Periodicity { period: 2, preperiod: 0 }));
        let y = SequenceSource::eventually_periodic("10", "01").unwrap();
        assert_eq!(periodicity_scan(&y, 1000).unwrap(), Some(Periodicity { period: 2, preperiod: 1 }));
        let z = SequenceSource::eventually_periodic("1101", "001").unwrap();
        assert_eq!(periodicity_scan(&z, 1000).unwrap().unwrap().period, 3);
    }

    #[test]
    fn periodic_input_skips_floor_check() {
        let x = SequenceSource::eventually_periodic("1", "011").unwrap();
        let r = morse_hedlund_check(&x, &small(3, 8, 200)).unwrap();
        assert!(r.skipped.is_some());
        let c = check_pattern_sturmian(&x, &small(3, 8, 200)).unwrap();
        assert_eq!(c.verdict, SturmianVerdict::Consistent);
        assert!(c.periodicity.is_some());
    }

    #[test]
    fn tiny_budget_is_recorded() {
        let x = SequenceSource::from_bit_str(&"0110100110010110".repeat(20)).unwrap();
        let b = SearchBounds::new(4, 20, 200, 30).unwrap();
        let cert = pstar(&x, &b).unwrap();
        assert!(cert.budget_exhausted);
        assert!(cert.is_monotone());
    }

    #[test]
    fn bounds_are_validated() {
        assert!(SearchBounds::new(0, 4, 10, 10).is_err());
        assert!(SearchBounds::new(5, 3, 10, 10).is_err());
        let x = SequenceSource::from_bit_str("0101").unwrap();
        assert!(pstar(&x, &small(2, 3, 5)).is_err());
    }
}
