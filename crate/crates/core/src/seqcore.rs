//! Sequences, windows, τ-languages and the partition-refinement engine.
//!
//! Every analysis in this crate consumes a [`SequenceSource`], materializes
//! the prefix it needs into a [`BitTape`], and counts patterns by refining a
//! [`ShiftPartition`]: shifts `m` are grouped by the word `x(m + τ)`, one
//! offset at a time.
//!
//! All language sizes computed here are over a finite shift range `0..=S`
//! and are therefore lower bounds for `|L_x(τ)|`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits::{BitTape, ShiftSet};
use crate::error::{Error, Result};

/// Where a sequence came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    FilePrefix,
    RotationCoding,
    Toeplitz,
    AlmostConstant,
    BlockDoubling,
    Custom,
}

type BitRule = dyn Fn(usize) -> Result<bool> + Send + Sync;

/// A random-access binary sequence `n ↦ x(n)`.
///
/// Generators are unbounded; file prefixes are readable only below their
/// length.
#[derive(Clone)]
pub struct SequenceSource {
    rule: Arc<BitRule>,
    valid_up_to: Option<usize>,
    kind: SourceKind,
    label: String,
}

impl fmt::Debug for SequenceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SequenceSource")
            .field("kind", &self.kind)
            .field("label", &self.label)
            .field("valid_up_to", &self.valid_up_to)
            .finish()
    }
}

impl SequenceSource {
    /// An unbounded generator.
    pub fn generator<F>(kind: SourceKind, label: impl Into<String>, rule: F) -> Self
    where
        F: Fn(usize) -> Result<bool> + Send + Sync + 'static,
    {
        SequenceSource {
            rule: Arc::new(rule),
            valid_up_to: None,
            kind,
            label: label.into(),
        }
    }

    /// A finite prefix; reads at or past `tape.len()` fail.
    pub fn from_tape(tape: BitTape, label: impl Into<String>) -> Self {
        let len = tape.len();
        let tape = Arc::new(tape);
        SequenceSource {
            rule: Arc::new(move |n| {
                if n < len {
                    Ok(tape.get(n))
                } else {
                    Err(Error::OutOfRange {
                        index: n,
                        valid_up_to: len,
                    })
                }
            }),
            valid_up_to: Some(len),
            kind: SourceKind::FilePrefix,
            label: label.into(),
        }
    }

    /// A finite prefix given as a `'0'`/`'1'` string (whitespace ignored).
    pub fn from_bit_str(bits: &str) -> Result<Self> {
        let tape = parse_bits(bits)?;
        Ok(Self::from_tape(tape, format!("prefix {bits}")))
    }

    pub fn constant(bit: bool) -> Self {
        Self::generator(SourceKind::Custom, format!("constant {}", bit as u8), move |_| {
            Ok(bit)
        })
    }

    /// A finite word followed by an infinitely repeated nonempty word.
    pub fn eventually_periodic(prefix: &str, period: &str) -> Result<Self> {
        let pre: Vec<bool> = parse_bits(prefix)?.iter().collect();
        let per: Vec<bool> = parse_bits(period)?.iter().collect();
        if per.is_empty() {
            return Err(Error::InvalidArgument("period word must be nonempty".into()));
        }
        let label = format!("{prefix}({period})^inf");
        Ok(Self::generator(SourceKind::Custom, label, move |n| {
            Ok(if n < pre.len() {
                pre[n]
            } else {
                per[(n - pre.len()) % per.len()]
            })
        }))
    }

    pub fn eval(&self, n: usize) -> Result<bool> {
        if let Some(v) = self.valid_up_to {
            if n >= v {
                return Err(Error::OutOfRange {
                    index: n,
                    valid_up_to: v,
                });
            }
        }
        (self.rule)(n)
    }

    pub fn valid_up_to(&self) -> Option<usize> {
        self.valid_up_to
    }

    pub fn kind(&self) -> SourceKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Fails with the first unreadable index if `len` positions are not all
    /// readable.
    pub fn ensure_readable(&self, len: usize) -> Result<()> {
        match self.valid_up_to {
            Some(v) if len > v => Err(Error::OutOfRange {
                index: v,
                valid_up_to: v,
            }),
            _ => Ok(()),
        }
    }

    /// Materialize `x(0), …, x(len - 1)`.
    pub fn prefix(&self, len: usize) -> Result<BitTape> {
        self.ensure_readable(len)?;
        let mut tape = BitTape::zeros(len);
        for n in 0..len {
            if (self.rule)(n)? {
                tape.set(n, true);
            }
        }
        Ok(tape)
    }

    /// The shifted sequence `n ↦ x(n + s)`.
    pub fn shifted(&self, s: usize) -> Self {
        let inner = self.clone();
        SequenceSource {
            rule: Arc::new(move |n| inner.eval(n + s)),
            valid_up_to: self.valid_up_to.map(|v| v.saturating_sub(s)),
            kind: self.kind,
            label: format!("shift {s} of {}", self.label),
        }
    }

    /// The arithmetic subsequence `n ↦ x(residue + step·n)`.
    pub fn subsequence(&self, residue: usize, step: usize) -> Result<Self> {
        if step == 0 {
            return Err(Error::InvalidArgument("subsequence step must be positive".into()));
        }
        let inner = self.clone();
        let valid = self
            .valid_up_to
            .map(|v| if v > residue { (v - residue).div_ceil(step) } else { 0 });
        Ok(SequenceSource {
            rule: Arc::new(move |n| inner.eval(residue + step * n)),
            valid_up_to: valid,
            kind: self.kind,
            label: format!("x({residue} + {step}n) of {}", self.label),
        })
    }

    /// Bitwise complement `n ↦ 1 − x(n)`.
    pub fn complement(&self) -> Self {
        let inner = self.clone();
        SequenceSource {
            rule: Arc::new(move |n| inner.eval(n).map(|b| !b)),
            valid_up_to: self.valid_up_to,
            kind: self.kind,
            label: format!("complement of {}", self.label),
        }
    }
}

/// Parse the body of a `.bits` file: `#` comment lines, then `0`/`1`
/// characters with whitespace ignored.
pub fn parse_bits(text: &str) -> Result<BitTape> {
    let mut tape = BitTape::zeros(0);
    for (lineno, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        for ch in line.chars() {
            match ch {
                '0' => tape.push(false),
                '1' => tape.push(true),
                c if c.is_whitespace() => {}
                c => {
                    return Err(Error::Parse(format!(
                        "unexpected character {c:?} on line {}",
                        lineno + 1
                    )))
                }
            }
        }
    }
    Ok(tape)
}

/// A canonical window: strictly increasing offsets starting at 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Window {
    offsets: Vec<usize>,
}

impl Window {
    pub fn new(offsets: Vec<usize>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::InvalidWindow("window must be nonempty".into()));
        }
        if offsets[0] != 0 {
            return Err(Error::InvalidWindow(format!(
                "canonical windows start at 0, got {offsets:?}"
            )));
        }
        if offsets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidWindow(format!(
                "offsets must be strictly increasing, got {offsets:?}"
            )));
        }
        Ok(Window { offsets })
    }

    /// Translate an arbitrary finite offset set so its minimum is 0.
    pub fn normalized(mut offsets: Vec<usize>) -> Result<Self> {
        offsets.sort_unstable();
        offsets.dedup();
        let base = *offsets
            .first()
            .ok_or_else(|| Error::InvalidWindow("window must be nonempty".into()))?;
        Window::new(offsets.into_iter().map(|t| t - base).collect())
    }

    /// `{0, 1, …, n − 1}`.
    pub fn interval(n: usize) -> Result<Self> {
        Window::new((0..n).collect())
    }

    /// `{0, step, 2·step, …, (n − 1)·step}`.
    pub fn progression(step: usize, n: usize) -> Result<Self> {
        if step == 0 && n > 1 {
            return Err(Error::InvalidWindow("progression step must be positive".into()));
        }
        Window::new((0..n).map(|i| i * step).collect())
    }

    pub fn singleton() -> Self {
        Window { offsets: vec![0] }
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn size(&self) -> usize {
        self.offsets.len()
    }

    pub fn diameter(&self) -> usize {
        *self.offsets.last().expect("windows are nonempty")
    }

    /// `τ ∪ {t}` for `t > max τ`.
    pub fn extended(&self, t: usize) -> Result<Self> {
        if t <= self.diameter() {
            return Err(Error::InvalidWindow(format!(
                "extension offset {t} must exceed the diameter {}",
                self.diameter()
            )));
        }
        let mut offsets = self.offsets.clone();
        offsets.push(t);
        Ok(Window { offsets })
    }

    pub fn contains(&self, t: usize) -> bool {
        self.offsets.binary_search(&t).is_ok()
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.offsets.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "}}")
    }
}

impl<'de> Deserialize<'de> for Window {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            offsets: Vec<usize>,
        }
        let raw = Raw::deserialize(d)?;
        Window::new(raw.offsets).map_err(serde::de::Error::custom)
    }
}

/// A binary word, serialized as a `"0101"` string.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<bool>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn constant(bit: bool, len: usize) -> Self {
        Word(vec![bit; len])
    }

    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    pub fn flipped(&self) -> Self {
        Word(self.0.iter().map(|b| !b).collect())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                c => Err(Error::Parse(format!("invalid bit {c:?} in word {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Word set from string literals; panics on malformed input.
pub fn words<'a>(items: impl IntoIterator<Item = &'a str>) -> BTreeSet<Word> {
    items
        .into_iter()
        .map(|s| s.parse().expect("literal word"))
        .collect()
}

/// A τ-word with the least shift at which it was observed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    pub bits: Word,
    pub witness_shift: usize,
}

/// Shifts `0..=shift_bound` grouped by their τ-word.
///
/// Each class is a bit-vector over shift positions; classes are kept in
/// order of their least member, which makes the partition deterministic.
#[derive(Debug, Clone)]
pub struct ShiftPartition {
    tape: Arc<BitTape>,
    window: Window,
    shift_bound: usize,
    classes: Vec<ShiftSet>,
}

impl ShiftPartition {
    /// Partition for `τ = {0}`.
    pub fn root(tape: Arc<BitTape>, shift_bound: usize) -> Result<Self> {
        if shift_bound >= tape.len() {
            return Err(Error::OutOfRange {
                index: tape.len(),
                valid_up_to: tape.len(),
            });
        }
        let all = ShiftSet::full(shift_bound + 1);
        let col = tape.column(0, shift_bound + 1);
        let (ones, zeros) = all.split(&col);
        let mut classes: Vec<ShiftSet> = [zeros, ones].into_iter().filter(|c| !c.is_empty()).collect();
        classes.sort_by_key(|c| c.first());
        Ok(ShiftPartition {
            tape,
            window: Window::singleton(),
            shift_bound,
            classes,
        })
    }

    /// Partition for an arbitrary window by a chain of refinements.
    pub fn build(tape: Arc<BitTape>, window: &Window, shift_bound: usize) -> Result<Self> {
        let mut p = Self::root(tape, shift_bound)?;
        for &t in &window.offsets()[1..] {
            p = p.refine(t)?;
        }
        Ok(p)
    }

    fn check_offset(&self, offset: usize) -> Result<()> {
        if offset <= self.window.diameter() {
            return Err(Error::InvalidWindow(format!(
                "refinement offset {offset} must exceed the window diameter {}",
                self.window.diameter()
            )));
        }
        let needed = self.shift_bound + offset + 1;
        if needed > self.tape.len() {
            return Err(Error::OutOfRange {
                index: self.tape.len(),
                valid_up_to: self.tape.len(),
            });
        }
        Ok(())
    }

    /// Split every class by the bit `x(m + offset)`.
    pub fn refine(&self, offset: usize) -> Result<Self> {
        self.check_offset(offset)?;
        let col = self.tape.column(offset, self.shift_bound + 1);
        Ok(self.refine_with_column(offset, &col))
    }

    pub(crate) fn refine_with_column(&self, offset: usize, col: &ShiftSet) -> Self {
        let mut classes = Vec::with_capacity(self.classes.len() * 2);
        for c in &self.classes {
            let (ones, zeros) = c.split(col);
            let zf = zeros.first();
            let of = ones.first();
            match (zf, of) {
                (Some(a), Some(b)) if a < b => {
                    classes.push(zeros);
                    classes.push(ones);
                }
                (Some(_), Some(_)) => {
                    classes.push(ones);
                    classes.push(zeros);
                }
                (Some(_), None) => classes.push(zeros),
                (None, Some(_)) => classes.push(ones),
                (None, None) => {}
            }
        }
        classes.sort_by_key(|c| c.first());
        ShiftPartition {
            tape: Arc::clone(&self.tape),
            window: Window {
                offsets: self
                    .window
                    .offsets
                    .iter()
                    .copied()
                    .chain(std::iter::once(offset))
                    .collect(),
            },
            shift_bound: self.shift_bound,
            classes,
        }
    }

    /// Class count after refining by `offset`, without building the classes.
    pub fn refined_count(&self, offset: usize) -> Result<usize> {
        self.check_offset(offset)?;
        let col = self.tape.column(offset, self.shift_bound + 1);
        Ok(self.refined_count_with_column(&col))
    }

    #[inline]
    pub(crate) fn refined_count_with_column(&self, col: &ShiftSet) -> usize {
        self.classes.iter().map(|c| c.split_count(col)).sum()
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn shift_bound(&self) -> usize {
        self.shift_bound
    }

    pub fn classes(&self) -> &[ShiftSet] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// One pattern per class, with its least witness shift.
    pub fn patterns(&self) -> Vec<Pattern> {
        self.classes
            .iter()
            .map(|c| {
                let m = c.first().expect("classes are nonempty");
                Pattern {
                    bits: Word(self.window.offsets.iter().map(|&t| self.tape.get(m + t)).collect()),
                    witness_shift: m,
                }
            })
            .collect()
    }
}

/// The observed τ-language over shifts `0..=shift_bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageReport {
    pub window: Window,
    pub shift_bound: usize,
    pub patterns: Vec<Pattern>,
    pub saturated: bool,
}

impl LanguageReport {
    pub fn count(&self) -> usize {
        self.patterns.len()
    }

    pub fn words(&self) -> BTreeSet<Word> {
        self.patterns.iter().map(|p| p.bits.clone()).collect()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.patterns.iter().any(|p| &p.bits == w)
    }

    pub fn witness(&self, w: &Word) -> Option<usize> {
        self.patterns.iter().find(|p| &p.bits == w).map(|p| p.witness_shift)
    }
}

/// Minimum length of the tail span used by the saturation rule.
pub const MIN_STABILIZATION_SPAN: usize = 1000;

/// Length of the final shift span over which the pattern set must not grow
/// for a report to count as saturated: a quarter of the shifts, at least
/// [`MIN_STABILIZATION_SPAN`].
pub fn stabilization_span(shift_bound: usize) -> usize {
    (shift_bound + 1).div_ceil(4).max(MIN_STABILIZATION_SPAN)
}

/// True when no pattern was first seen within the final stabilization span.
pub fn is_saturated(shift_bound: usize, last_new_witness: usize) -> bool {
    let shifts = shift_bound + 1;
    let span = stabilization_span(shift_bound);
    shifts > span && last_new_witness < shifts - span
}

impl From<&ShiftPartition> for LanguageReport {
    fn from(p: &ShiftPartition) -> Self {
        let mut patterns = p.patterns();
        let last = patterns.iter().map(|q| q.witness_shift).max().unwrap_or(0);
        patterns.sort_by(|a, b| a.bits.cmp(&b.bits));
        LanguageReport {
            window: p.window.clone(),
            shift_bound: p.shift_bound,
            patterns,
            saturated: is_saturated(p.shift_bound, last),
        }
    }
}

/// Materialize exactly the prefix needed to read `x(m + t)` for all
/// `m ≤ shift_bound`, `t ≤ diameter`.
pub fn tape_for(x: &SequenceSource, shift_bound: usize, diameter: usize) -> Result<Arc<BitTape>> {
    let len = shift_bound
        .checked_add(diameter)
        .and_then(|v| v.checked_add(1))
        .ok_or_else(|| Error::InvalidArgument("shift bound overflows".into()))?;
    Ok(Arc::new(x.prefix(len)?))
}

/// `{ x(m + τ) : 0 ≤ m ≤ shift_bound }` with least witnesses.
pub fn tau_language(x: &SequenceSource, tau: &Window, shift_bound: usize) -> Result<LanguageReport> {
    let tape = tape_for(x, shift_bound, tau.diameter())?;
    let p = ShiftPartition::build(tape, tau, shift_bound)?;
    Ok(LanguageReport::from(&p))
}

/// Same as [`tau_language`] on an already materialized prefix.
pub fn tau_language_on(tape: &Arc<BitTape>, tau: &Window, shift_bound: usize) -> Result<LanguageReport> {
    let p = ShiftPartition::build(Arc::clone(tape), tau, shift_bound)?;
    Ok(LanguageReport::from(&p))
}

/// Same report as [`tau_language_on`], computed by reading every shift
/// into a hash map instead of refining classes. Memory grows with the
/// number of patterns rather than with patterns × shifts, which suits wide
/// windows over long ranges.
pub fn tau_language_scan(tape: &BitTape, tau: &Window, shift_bound: usize) -> Result<LanguageReport> {
    if shift_bound + tau.diameter() >= tape.len() {
        return Err(Error::OutOfRange {
            index: shift_bound + tau.diameter(),
            valid_up_to: tape.len(),
        });
    }
    let mut first: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut buf = Vec::with_capacity(tau.size());
    for m in 0..=shift_bound {
        buf.clear();
        buf.extend(tau.offsets().iter().map(|&t| tape.get(m + t)));
        if !first.contains_key(&buf) {
            first.insert(buf.clone(), m);
        }
    }
    let last = first.values().copied().max().unwrap_or(0);
    let mut patterns: Vec<Pattern> = first
        .into_iter()
        .map(|(bits, witness_shift)| Pattern { bits: Word(bits), witness_shift })
        .collect();
    patterns.sort_by(|a, b| a.bits.cmp(&b.bits));
    Ok(LanguageReport {
        window: tau.clone(),
        shift_bound,
        patterns,
        saturated: is_saturated(shift_bound, last),
    })
}

/// Pattern set for an arbitrary (not necessarily canonical) offset list
/// over shifts `shifts`. Reads directly, without the refinement engine.
pub fn pattern_set(
    x: &SequenceSource,
    offsets: &[usize],
    shifts: std::ops::RangeInclusive<usize>,
) -> Result<BTreeSet<Word>> {
    let max_t = offsets.iter().copied().max().unwrap_or(0);
    let tape = x.prefix(shifts.end() + max_t + 1)?;
    Ok(shifts
        .map(|m| Word(offsets.iter().map(|&t| tape.get(m + t)).collect()))
        .collect())
}

/// `|L_x(n)|` restricted to shifts `≤ shift_bound`.
pub fn word_complexity(x: &SequenceSource, n: usize, shift_bound: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidArgument("word length must be at least 1".into()));
    }
    Ok(tau_language(x, &Window::interval(n)?, shift_bound)?.count())
}

/// Recurrence data for the length-`length` prefix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceRow {
    pub length: usize,
    /// Least `M ≥ 1` with `x[M, M + L) = x[0, L)`.
    pub second_occurrence: Option<usize>,
    pub occurrences: usize,
    /// Largest gap between consecutive occurrences (including the one at 0).
    pub max_gap_observed: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub horizon: usize,
    pub rows: Vec<RecurrenceRow>,
}

impl RecurrenceReport {
    pub fn row(&self, length: usize) -> Option<&RecurrenceRow> {
        self.rows.iter().find(|r| r.length == length)
    }
}

/// Scan `x[0, horizon)` for repeats of each prefix of length `1..=max_len`.
pub fn recurrence_probe(x: &SequenceSource, max_len: usize, horizon: usize) -> Result<RecurrenceReport> {
    let tape = x.prefix(horizon)?;
    recurrence_probe_on(&tape, max_len)
}

pub fn recurrence_probe_on(tape: &BitTape, max_len: usize) -> Result<RecurrenceReport> {
    let horizon = tape.len();
    if max_len == 0 || max_len > horizon {
        return Err(Error::InvalidArgument(format!(
            "prefix length must be in 1..={horizon}, got {max_len}"
        )));
    }
    // `matched[p]` = length of the longest common prefix of x[p..] and x[0..],
    // capped at max_len.
    let mut matched = vec![0usize; horizon];
    for (p, slot) in matched.iter_mut().enumerate() {
        let cap = max_len.min(horizon - p);
        let mut l = 0;
        while l < cap && tape.get(p + l) == tape.get(l) {
            l += 1;
        }
        *slot = l;
    }
    let rows = (1..=max_len)
        .map(|len| {
            let mut prev = 0usize;
            let mut second = None;
            let mut occurrences = 1;
            let mut max_gap = None::<usize>;
            for (p, &m) in matched.iter().enumerate().skip(1) {
                if m >= len {
                    occurrences += 1;
                    second.get_or_insert(p);
                    max_gap = Some(max_gap.map_or(p - prev, |g| g.max(p - prev)));
                    prev = p;
                }
            }
            RecurrenceRow {
                length: len,
                second_occurrence: second,
                occurrences,
                max_gap_observed: max_gap,
            }
        })
        .collect();
    Ok(RecurrenceReport { horizon, rows })
}
