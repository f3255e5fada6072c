use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqcore::{SequenceSource, SourceKind, Word};

/// Periods must stay below this so that residue arithmetic never overflows.
const PERIOD_LIMIT: u64 = 1 << 62;

/// A finite prefix followed by an optional forever-repeated block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de>"))]
pub struct Stream<T> {
    #[serde(default)]
    pub prefix: Vec<T>,
    #[serde(default)]
    pub repeat: Vec<T>,
}

impl<T> Stream<T> {
    pub fn new(prefix: Vec<T>, repeat: Vec<T>) -> Self {
        Stream { prefix, repeat }
    }

    pub fn finite(items: Vec<T>) -> Self {
        Stream::new(items, Vec::new())
    }

    pub fn cycle(items: Vec<T>) -> Self {
        Stream::new(Vec::new(), items)
    }

    /// Item `i` (0-based), or `None` past the end of a finite stream.
    pub fn get(&self, i: usize) -> Option<&T> {
        if i < self.prefix.len() {
            self.prefix.get(i)
        } else if self.repeat.is_empty() {
            None
        } else {
            self.repeat.get((i - self.prefix.len()) % self.repeat.len())
        }
    }

    /// Length of a finite stream, `None` if it repeats forever.
    pub fn len(&self) -> Option<usize> {
        self.repeat.is_empty().then_some(self.prefix.len())
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty() && self.repeat.is_empty()
    }
}

/// Period structure `n₁ | n₂ | …` given by a list, optionally continued
/// geometrically with a fixed ratio.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodStructure {
    pub list: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<u64>,
}

impl PeriodStructure {
    pub fn new(list: Vec<u64>, ratio: Option<u64>) -> Result<Self> {
        let Some(&first) = list.first() else {
            return Err(Error::InvalidSpec("period list is empty".into()));
        };
        if first < 2 {
            return Err(Error::InvalidSpec(format!("n₁ must be at least 2, got {first}")));
        }
        for w in list.windows(2) {
            if w[1] <= w[0] || w[1] % w[0] != 0 {
                return Err(Error::InvalidSpec(format!(
                    "period {} does not properly divide {}",
                    w[0], w[1]
                )));
            }
        }
        if let Some(r) = ratio {
            if r < 2 {
                return Err(Error::InvalidSpec(format!("period ratio must be at least 2, got {r}")));
            }
        }
        if list.iter().any(|&n| n > PERIOD_LIMIT) {
            return Err(Error::InvalidSpec("period exceeds 2^62".into()));
        }
        Ok(PeriodStructure { list, ratio })
    }

    /// `n_k = r^k`.
    pub fn geometric(r: u64) -> Result<Self> {
        Self::new(vec![r], Some(r))
    }

    /// `n_k` for `k ≥ 1`, or `None` past the last representable level.
    pub fn period(&self, k: usize) -> Option<u64> {
        if k == 0 {
            return Some(1);
        }
        if k <= self.list.len() {
            return Some(self.list[k - 1]);
        }
        let r = self.ratio?;
        let mut n = *self.list.last()?;
        for _ in self.list.len()..k {
            n = n.checked_mul(r).filter(|&v| v <= PERIOD_LIMIT)?;
        }
        Some(n)
    }

    /// Number of levels with a representable period.
    pub fn levels(&self) -> usize {
        match self.ratio {
            None => self.list.len(),
            Some(_) => {
                let mut k = self.list.len();
                while self.period(k + 1).is_some() {
                    k += 1;
                }
                k
            }
        }
    }
}

/// How each level's residues are filled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillRule {
    /// Level `k` (list index `k − 1`) maps residues mod `n_k` to bits.
    Levels(Vec<BTreeMap<u64, u8>>),
    /// Level `k` keeps the listed residues (signed, taken mod `n_k`) as holes
    /// and fills the remaining lifts of the previous holes, in increasing
    /// order, with the bits of the level's word.
    Lifted { holes: Stream<Vec<i64>>, fills: Stream<Word> },
    /// One hole per level; every other lift gets the level's letter.
    Simple { letters: Stream<u8>, holes: Stream<i64> },
}

/// Residue data for one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub period: u64,
    /// Residues mod `period` not filled at this level or above, sorted.
    pub holes: Vec<u64>,
    /// Residues filled at this level, sorted.
    pub filled: Vec<(u64, bool)>,
}

impl Level {
    fn root() -> Self {
        Level { period: 1, holes: vec![0], filled: Vec::new() }
    }

    pub fn fill(&self, r: u64) -> Option<bool> {
        self.filled
            .binary_search_by_key(&r, |&(res, _)| res)
            .ok()
            .map(|i| self.filled[i].1)
    }

    pub fn is_hole(&self, r: u64) -> bool {
        self.holes.binary_search(&r).is_ok()
    }
}

/// What to emit at a position no level fills.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HolePolicy {
    /// Keep descending past the materialized depth while levels exist;
    /// error if still unfilled.
    #[default]
    DeeperLevel,
    /// Descend through every level, then emit this bit.
    Bit(bool),
    /// Error unless filled within the materialized depth.
    Error,
}

struct Inner {
    periods: PeriodStructure,
    rule: FillRule,
    max_levels: usize,
    cache: RwLock<Vec<Arc<Level>>>,
}

/// A Toeplitz sequence description: a period structure plus a fill rule,
/// certified to a materialized depth.
#[derive(Clone)]
pub struct ToeplitzSpec {
    inner: Arc<Inner>,
    depth: usize,
}

impl std::fmt::Debug for ToeplitzSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ToeplitzSpec")
            .field("periods", &self.inner.periods)
            .field("rule", &self.inner.rule)
            .field("depth", &self.depth)
            .finish()
    }
}

impl ToeplitzSpec {
    /// Validates every level up to the default depth: the number of levels
    /// the rule and periods define, capped at 24 for unbounded rules.
    pub fn new(periods: PeriodStructure, rule: FillRule) -> Result<Self> {
        let rule_levels = match &rule {
            FillRule::Levels(l) => Some(l.len()),
            FillRule::Lifted { holes, fills } => min_opt(holes.len(), fills.len()),
            FillRule::Simple { letters, holes } => min_opt(letters.len(), holes.len()),
        };
        if rule_levels == Some(0) {
            return Err(Error::InvalidSpec("fill rule defines no levels".into()));
        }
        let max_levels = rule_levels.map_or(periods.levels(), |l| l.min(periods.levels()));
        if max_levels == 0 {
            return Err(Error::InvalidSpec("no levels".into()));
        }
        let spec = ToeplitzSpec {
            inner: Arc::new(Inner {
                periods,
                rule,
                max_levels,
                cache: RwLock::new(vec![Arc::new(Level::root())]),
            }),
            depth: 0,
        };
        let depth = if rule_levels.is_some() { max_levels } else { max_levels.min(24) };
        spec.with_depth(depth)
    }

    /// The ternary example: `n_k = 3^k`, residue `3^{k−1} − 1`
    /// filled with 0 and `2·3^{k−1} − 1` with 1, hole `3^k − 1`.
    pub fn ternary_example() -> Self {
        Self::new(
            PeriodStructure::geometric(3).expect("valid"),
            FillRule::Lifted {
                holes: Stream::cycle(vec![vec![-1]]),
                fills: Stream::cycle(vec!["01".parse().expect("word")]),
            },
        )
        .expect("valid spec")
    }

    /// Same rule, validated and certified through level `depth`.
    pub fn with_depth(&self, depth: usize) -> Result<Self> {
        if depth == 0 || depth > self.inner.max_levels {
            return Err(Error::InvalidSpec(format!(
                "depth must be in 1..={}, got {depth}",
                self.inner.max_levels
            )));
        }
        self.level(depth)?;
        Ok(ToeplitzSpec { inner: Arc::clone(&self.inner), depth })
    }

    pub fn periods(&self) -> &PeriodStructure {
        &self.inner.periods
    }

    pub fn rule(&self) -> &FillRule {
        &self.inner.rule
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Deepest level the rule and periods define.
    pub fn max_levels(&self) -> usize {
        self.inner.max_levels
    }

    /// Level `k` (`k = 0` is the trivial level with period 1).
    pub fn level(&self, k: usize) -> Result<Arc<Level>> {
        if k > self.inner.max_levels {
            return Err(Error::InvalidSpec(format!(
                "level {k} is beyond the last defined level {}",
                self.inner.max_levels
            )));
        }
        if let Some(l) = self.inner.cache.read().expect("cache lock").get(k) {
            return Ok(Arc::clone(l));
        }
        let mut cache = self.inner.cache.write().expect("cache lock");
        while cache.len() <= k {
            let prev = Arc::clone(cache.last().expect("root level"));
            let next = self.build_level(cache.len(), &prev)?;
            cache.push(Arc::new(next));
        }
        Ok(Arc::clone(&cache[k]))
    }

    fn build_level(&self, k: usize, prev: &Level) -> Result<Level> {
        let period = self.inner.periods.period(k).expect("level within range");
        let step = prev.period;
        let ratio = period / step;
        let mut lifts: Vec<u64> = prev
            .holes
            .iter()
            .flat_map(|&h| (0..ratio).map(move |j| h + j * step))
            .collect();
        lifts.sort_unstable();
        let signed = |v: i64| v.rem_euclid(period as i64) as u64;
        let not_a_lift = |r: u64| {
            Error::InvalidSpec(format!(
                "level {k}: residue {r} mod {period} does not lie in a hole of level {}",
                k - 1
            ))
        };
        let filled: Vec<(u64, bool)> = match &self.inner.rule {
            FillRule::Levels(levels) => {
                let map = &levels[k - 1];
                let mut out = Vec::with_capacity(map.len());
                for (&r, &b) in map {
                    if r >= period {
                        return Err(Error::InvalidSpec(format!(
                            "level {k}: residue {r} is not below {period}"
                        )));
                    }
                    if lifts.binary_search(&r).is_err() {
                        return Err(not_a_lift(r));
                    }
                    out.push((r, bit(b)?));
                }
                out
            }
            FillRule::Lifted { holes, fills } => {
                let mut hs: Vec<u64> = holes.get(k - 1).expect("within levels").iter().map(|&h| signed(h)).collect();
                hs.sort_unstable();
                hs.dedup();
                if let Some(&r) = hs.iter().find(|r| lifts.binary_search(r).is_err()) {
                    return Err(not_a_lift(r));
                }
                let word = fills.get(k - 1).expect("within levels");
                let open: Vec<u64> = lifts.iter().copied().filter(|r| hs.binary_search(r).is_err()).collect();
                if word.len() != open.len() {
                    return Err(Error::InvalidSpec(format!(
                        "level {k}: fill word {word} has length {}, but {} residues need filling",
                        word.len(),
                        open.len()
                    )));
                }
                open.into_iter().zip(word.0.iter().copied()).collect()
            }
            FillRule::Simple { letters, holes } => {
                let h = signed(*holes.get(k - 1).expect("within levels"));
                if lifts.binary_search(&h).is_err() {
                    return Err(not_a_lift(h));
                }
                let a = bit(*letters.get(k - 1).expect("within levels"))?;
                lifts.iter().filter(|&&r| r != h).map(|&r| (r, a)).collect()
            }
        };
        let holes = lifts
            .iter()
            .copied()
            .filter(|r| filled.binary_search_by_key(r, |&(res, _)| res).is_err())
            .collect();
        Ok(Level { period, holes, filled })
    }

    /// `x(n)` under the given policy.
    pub fn eval(&self, n: usize, policy: HolePolicy) -> Result<bool> {
        let n = n as u64;
        let mut trace = Vec::new();
        let limit = match policy {
            HolePolicy::Error => self.depth,
            _ => self.inner.max_levels,
        };
        for k in 1..=limit {
            let level = self.level(k)?;
            let r = n % level.period;
            if let Some(b) = level.fill(r) {
                return Ok(b);
            }
            trace.push(r);
        }
        match policy {
            HolePolicy::Bit(b) => Ok(b),
            _ => Err(Error::Unfilled { position: n as usize, level: limit, trace }),
        }
    }

    /// Smallest level filling `n`, or `None` if no defined level does.
    pub fn filling_level(&self, n: usize) -> Result<Option<usize>> {
        let n = n as u64;
        for k in 1..=self.inner.max_levels {
            let level = self.level(k)?;
            if level.fill(n % level.period).is_some() {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    /// Deepest level consulted when reading `x(0), …, x(len − 1)`.
    pub fn depth_consumed(&self, len: usize) -> Result<usize> {
        let mut deepest = 0;
        for n in 0..len {
            deepest = deepest.max(self.filling_level(n)?.unwrap_or(self.inner.max_levels));
        }
        Ok(deepest)
    }

    pub fn to_file(&self) -> ToeplitzSpecFile {
        ToeplitzSpecFile {
            periods: self.inner.periods.clone(),
            rule: self.inner.rule.clone(),
            depth: Some(self.depth),
        }
    }

    pub fn from_file(file: &ToeplitzSpecFile) -> Result<Self> {
        let periods = PeriodStructure::new(file.periods.list.clone(), file.periods.ratio)?;
        let spec = Self::new(periods, file.rule.clone())?;
        match file.depth {
            Some(d) => spec.with_depth(d),
            None => Ok(spec),
        }
    }
}

fn min_opt(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn bit(b: u8) -> Result<bool> {
    match b {
        0 => Ok(false),
        1 => Ok(true),
        _ => Err(Error::InvalidSpec(format!("bit must be 0 or 1, got {b}"))),
    }
}

/// JSON form: `{"periods": {"list": [3], "ratio": 3}, "rule": {...}, "depth": 12}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToeplitzSpecFile {
    pub periods: PeriodStructure,
    pub rule: FillRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

/// One hole per level, all filled residues of a level sharing its letter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleToeplitzSpec {
    pub periods: PeriodStructure,
    pub letters: Stream<u8>,
    pub holes: Stream<i64>,
}

impl SimpleToeplitzSpec {
    pub fn new(periods: PeriodStructure, letters: Stream<u8>, holes: Stream<i64>) -> Result<Self> {
        let s = SimpleToeplitzSpec { periods, letters, holes };
        s.to_spec()?;
        Ok(s)
    }

    /// Periods `2^k`, hole at residue 0, letters 1, 0, 1, 0, … at levels
    /// 1, 2, …: the multiples of `2^k` that are not multiples of `2^{k+1}`
    /// alternate 0, 1, 0, 1, … for `k = 1, 2, …`.
    pub fn lemma_instance() -> Result<Self> {
        Self::new(PeriodStructure::geometric(2)?, Stream::cycle(vec![1, 0]), Stream::cycle(vec![0]))
    }

    /// Letter `a_k`, `k ≥ 1`.
    pub fn letter(&self, k: usize) -> Option<bool> {
        self.letters.get(k.checked_sub(1)?).map(|&b| b == 1)
    }

    pub fn to_spec(&self) -> Result<ToeplitzSpec> {
        ToeplitzSpec::new(
            self.periods.clone(),
            FillRule::Simple { letters: self.letters.clone(), holes: self.holes.clone() },
        )
    }

    /// Swap the letters 0 and 1.
    pub fn flipped(&self) -> Self {
        let flip = |v: &Vec<u8>| v.iter().map(|&b| 1 - b.min(1)).collect();
        SimpleToeplitzSpec {
            periods: self.periods.clone(),
            letters: Stream::new(flip(&self.letters.prefix), flip(&self.letters.repeat)),
            holes: self.holes.clone(),
        }
    }
}

/// The sequence defined by `spec`, read under `policy`.
pub fn generate(spec: &ToeplitzSpec, policy: HolePolicy) -> SequenceSource {
    let s = spec.clone();
    let label = format!("toeplitz periods {:?} depth {}", spec.periods().list, spec.depth());
    SequenceSource::generator(SourceKind::Toeplitz, label, move |n| s.eval(n, policy))
}

/// Holes at level `k` by the counting formula `n_k(1 − Σ_{j≤k} f_j/n_j)`,
/// where `f_j` is the number of residues filled at level `j`.
pub fn hole_count(spec: &ToeplitzSpec, k: usize) -> Result<u64> {
    let nk = spec.level(k)?.period;
    let mut filled = 0u64;
    for j in 1..=k {
        let level = spec.level(j)?;
        filled += level.filled.len() as u64 * (nk / level.period);
    }
    nk.checked_sub(filled).ok_or_else(|| Error::InvalidSpec(format!("level {k} is overfilled")))
}
