use std::cmp::Ordering;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{self, format_rational, parse_rational, ratio_to_f64, Rational, Scalar};

/// Upper bound on convergent steps taken by a single sign decision.
const MAX_SIGN_STEPS: usize = 4096;

/// An irrational α ∈ (0, 1) given by its continued fraction
/// `[0; a₁, a₂, …]`: a finite list followed by a nonempty repeating block.
///
/// Convergents `p_k/q_k` are computed lazily and cached behind a lock, so a
/// shared `IrrationalAngle` can be used from several threads.
pub struct IrrationalAngle<T: Scalar> {
    head: Vec<u64>,
    repeat: Vec<u64>,
    convergents: RwLock<Vec<(T, T)>>,
    approx: OnceLock<f64>,
}

impl<T: Scalar> Clone for IrrationalAngle<T> {
    fn clone(&self) -> Self {
        IrrationalAngle {
            head: self.head.clone(),
            repeat: self.repeat.clone(),
            convergents: RwLock::new(self.convergents.read().expect("convergent cache").clone()),
            approx: self.approx.clone(),
        }
    }
}

impl<T: Scalar> fmt::Debug for IrrationalAngle<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IrrationalAngle({})", self.cf_string())
    }
}

impl<T: Scalar> PartialEq for IrrationalAngle<T> {
    fn eq(&self, other: &Self) -> bool {
        // Equal streams; representations may differ in how much is unrolled.
        (0..self.head.len().max(other.head.len()) + 2 * self.repeat.len() * other.repeat.len())
            .all(|i| self.coefficient(i) == other.coefficient(i))
    }
}

/// Serialized continued fraction: `{"cf": [0, 2], "repeat": [1]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuedFractionSpec {
    pub cf: Vec<u64>,
    pub repeat: Vec<u64>,
}

impl<T: Scalar> IrrationalAngle<T> {
    fn coefficient(&self, i: usize) -> u64 {
        if i < self.head.len() {
            self.head[i]
        } else {
            self.repeat[(i - self.head.len()) % self.repeat.len()]
        }
    }

    pub fn cf_string(&self) -> String {
        let head: Vec<String> = self.head.iter().map(|a| a.to_string()).collect();
        let rep: Vec<String> = self.repeat.iter().map(|a| a.to_string()).collect();
        format!("[{}; ({})^inf]", head.join(","), rep.join(","))
    }

    pub fn to_spec(&self) -> ContinuedFractionSpec {
        ContinuedFractionSpec {
            cf: self.head.clone(),
            repeat: self.repeat.clone(),
        }
    }
}

impl<T: Scalar> IrrationalAngle<T> {
    /// `head` must start with `a₀ = 0`; every later coefficient is ≥ 1 and
    /// `repeat` is nonempty, so α is irrational and lies in (0, 1).
    pub fn new(head: Vec<u64>, repeat: Vec<u64>) -> Result<Self> {
        if head.first() != Some(&0) {
            return Err(Error::InvalidSpec(
                "continued fraction must start with a0 = 0".into(),
            ));
        }
        if repeat.is_empty() {
            return Err(Error::InvalidSpec(
                "continued fraction needs a nonempty repeating tail (α must be irrational)".into(),
            ));
        }
        if head[1..].iter().chain(&repeat).any(|&a| a == 0) {
            return Err(Error::InvalidSpec(
                "partial quotients after a0 must be at least 1".into(),
            ));
        }
        Ok(IrrationalAngle {
            head,
            repeat,
            convergents: RwLock::new(Vec::new()),
            approx: OnceLock::new(),
        })
    }

    pub fn from_spec(spec: &ContinuedFractionSpec) -> Result<Self> {
        Self::new(spec.cf.clone(), spec.repeat.clone())
    }

    /// (√5 − 1)/2 = [0; 1, 1, 1, …] ≈ 0.618.
    pub fn golden() -> Self {
        Self::new(vec![0], vec![1]).expect("valid")
    }

    /// (3 − √5)/2 = [0; 2, 1, 1, …] ≈ 0.382.
    pub fn golden_complement() -> Self {
        Self::new(vec![0, 2], vec![1]).expect("valid")
    }

    /// √2 − 1 = [0; 2, 2, 2, …].
    pub fn silver() -> Self {
        Self::new(vec![0], vec![2]).expect("valid")
    }

    /// The k-th convergent `(p_k, q_k)`.
    pub fn convergent(&self, k: usize) -> Result<(T, T)> {
        {
            let cache = self.convergents.read().expect("convergent cache");
            if let Some(c) = cache.get(k) {
                return Ok(c.clone());
            }
        }
        let mut cache = self.convergents.write().expect("convergent cache");
        while cache.len() <= k {
            let i = cache.len();
            let a: T = scalar::from_u64(self.coefficient(i))?;
            let (p2, q2, p1, q1) = match i {
                0 => (T::zero(), T::one(), T::one(), T::zero()),
                1 => (T::one(), T::zero(), cache[0].0.clone(), cache[0].1.clone()),
                _ => (
                    cache[i - 2].0.clone(),
                    cache[i - 2].1.clone(),
                    cache[i - 1].0.clone(),
                    cache[i - 1].1.clone(),
                ),
            };
            // p_{-1} = 1, q_{-1} = 0, p_{-2} = 0, q_{-2} = 1
            let p = scalar::add(&scalar::mul(&a, &p1)?, &p2)?;
            let q = scalar::add(&scalar::mul(&a, &q1)?, &q2)?;
            cache.push((p, q));
        }
        Ok(cache[k].clone())
    }

    /// Floating-point estimate of α, for ordering heuristics only.
    pub fn approx(&self) -> f64 {
        *self.approx.get_or_init(|| self.compute_approx())
    }

    fn compute_approx(&self) -> f64 {
        let mut k = 1;
        loop {
            match (self.convergent(k), self.convergent(k + 1)) {
                (Ok((p, q)), Ok(_)) if q.to_f64().unwrap_or(0.0) > 1e9 || k > 60 => {
                    return p.to_f64().unwrap_or(f64::NAN) / q.to_f64().unwrap_or(f64::NAN);
                }
                (Ok(_), Ok(_)) => k += 1,
                _ => {
                    let (p, q) = self.convergent(k).unwrap_or((T::zero(), T::one()));
                    return p.to_f64().unwrap_or(f64::NAN) / q.to_f64().unwrap_or(f64::NAN);
                }
            }
        }
    }

    /// Exact sign of `a + b·α` for integers `a`, `b`.
    ///
    /// Consecutive convergents bracket α, so once `a + b·p_k/q_k` and
    /// `a + b·p_{k+1}/q_{k+1}` agree in strict sign, that sign is the answer.
    /// For `b ≠ 0` the value is nonzero and the loop terminates.
    pub fn sign_linear(&self, a: &T, b: &T) -> Result<Ordering> {
        if b.is_zero() {
            return Ok(sign_of(a));
        }
        let eval = |k: usize| -> Result<Ordering> {
            let (p, q) = self.convergent(k)?;
            let v = scalar::add(&scalar::mul(a, &q)?, &scalar::mul(b, &p)?)?;
            Ok(sign_of(&v))
        };
        let mut prev = eval(0)?;
        for k in 1..MAX_SIGN_STEPS {
            let cur = eval(k)?;
            if cur == prev && cur != Ordering::Equal {
                return Ok(cur);
            }
            prev = cur;
        }
        Err(Error::Overflow)
    }

    /// Exact sign of `c + d·α` for rationals `c`, `d`.
    pub fn sign(&self, c: &Rational<T>, d: &Rational<T>) -> Result<Ordering> {
        // Clear the (positive) denominators.
        let a = scalar::mul(c.numer(), d.denom())?;
        let b = scalar::mul(d.numer(), c.denom())?;
        self.sign_linear(&a, &b)
    }
}

fn sign_of<T: Scalar>(v: &T) -> Ordering {
    if v.is_positive() {
        Ordering::Greater
    } else if v.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// The circle point `c + d·α (mod 1)` with rational `c`, `d`.
///
/// The representation is not reduced mod 1; use [`ExactAngle::frac`] for the
/// canonical representative in [0, 1). Congruence is decided algebraically:
/// since α is irrational, `c₁ + d₁α ≡ c₂ + d₂α` iff `d₁ = d₂` and
/// `c₁ − c₂ ∈ ℤ`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactAngle<T: Scalar> {
    pub c: Rational<T>,
    pub d: Rational<T>,
}

impl<T: Scalar> fmt::Debug for ExactAngle<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<T: Scalar> fmt::Display for ExactAngle<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}·α", format_rational(&self.c), format_rational(&self.d))
    }
}

/// Serialized form `{"c": "1/3", "d": "2"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngleSpec {
    pub c: String,
    pub d: String,
}

impl<T: Scalar> ExactAngle<T> {
    pub fn new(c: Rational<T>, d: Rational<T>) -> Self {
        ExactAngle { c, d }
    }

    pub fn zero() -> Self {
        ExactAngle::new(Ratio::zero(), Ratio::zero())
    }

    /// The rational point `c`.
    pub fn rational(c: Rational<T>) -> Self {
        ExactAngle::new(c, Ratio::zero())
    }

    /// `k·α` for integer `k`.
    pub fn multiple(k: i64) -> Result<Self> {
        Ok(ExactAngle::new(Ratio::zero(), Ratio::from_integer(scalar::from_i64(k)?)))
    }

    /// `c + k·α` for integers `c`, `k`.
    pub fn int(c: i64, k: i64) -> Result<Self> {
        Ok(ExactAngle::new(
            Ratio::from_integer(scalar::from_i64(c)?),
            Ratio::from_integer(scalar::from_i64(k)?),
        ))
    }

    pub fn from_spec(spec: &AngleSpec) -> Result<Self> {
        Ok(ExactAngle::new(parse_rational(&spec.c)?, parse_rational(&spec.d)?))
    }

    pub fn to_spec(&self) -> AngleSpec {
        AngleSpec {
            c: format_rational(&self.c),
            d: format_rational(&self.d),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        ExactAngle::new(self.c.clone() + other.c.clone(), self.d.clone() + other.d.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        ExactAngle::new(self.c.clone() - other.c.clone(), self.d.clone() - other.d.clone())
    }

    pub fn neg(&self) -> Self {
        ExactAngle::new(-self.c.clone(), -self.d.clone())
    }

    /// Add `k·α`.
    pub fn add_multiple(&self, k: &T) -> Self {
        ExactAngle::new(self.c.clone(), self.d.clone() + Ratio::from_integer(k.clone()))
    }

    pub fn scale(&self, r: &Rational<T>) -> Self {
        ExactAngle::new(self.c.clone() * r.clone(), self.d.clone() * r.clone())
    }

    /// True iff the two points coincide on the circle.
    pub fn congruent(&self, other: &Self) -> bool {
        self.d == other.d && (self.c.clone() - other.c.clone()).is_integer()
    }

    pub fn is_zero_mod_one(&self) -> bool {
        self.d.is_zero() && self.c.is_integer()
    }

    /// `⌊c + d·α⌋`, exactly.
    pub fn floor(&self, alpha: &IrrationalAngle<T>) -> Result<T> {
        if self.d.is_zero() {
            return Ok(self.c.floor().to_integer());
        }
        let est = ratio_to_f64(&self.c) + ratio_to_f64(&self.d) * alpha.approx();
        let mut n: T = if est.is_finite() && est.abs() < 1e15 {
            scalar::from_i64(est.floor() as i64)?
        } else {
            // Far out of f64 range for the estimate: start from the rational
            // part alone and walk.
            self.c.floor().to_integer()
        };
        // Move n until n ≤ value < n + 1; value is irrational, never an integer.
        let below = |n: &T| -> Result<bool> {
            let shifted = self.c.clone() - Ratio::from_integer(n.clone());
            Ok(alpha.sign(&shifted, &self.d)? == Ordering::Greater)
        };
        let mut guard = 0usize;
        while !below(&n)? {
            n = n - T::one();
            guard += 1;
            if guard > 1 << 20 {
                return Err(Error::Overflow);
            }
        }
        loop {
            let next = n.clone() + T::one();
            if below(&next)? {
                n = next;
                guard += 1;
                if guard > 1 << 20 {
                    return Err(Error::Overflow);
                }
            } else {
                return Ok(n);
            }
        }
    }

    /// The representative of this point in [0, 1).
    pub fn frac(&self, alpha: &IrrationalAngle<T>) -> Result<Self> {
        let f = self.floor(alpha)?;
        Ok(ExactAngle::new(self.c.clone() - Ratio::from_integer(f), self.d.clone()))
    }

    /// Compare the real numbers `self` and `other` (not reduced mod 1).
    pub fn cmp_real(&self, other: &Self, alpha: &IrrationalAngle<T>) -> Result<Ordering> {
        let diff = self.sub(other);
        alpha.sign(&diff.c, &diff.d)
    }

    /// Compare positions in [0, 1) after reduction mod 1.
    pub fn cmp_on_circle(&self, other: &Self, alpha: &IrrationalAngle<T>) -> Result<Ordering> {
        if self.congruent(other) {
            return Ok(Ordering::Equal);
        }
        self.frac(alpha)?.cmp_real(&other.frac(alpha)?, alpha)
    }

    /// Floating-point estimate of the position in [0, 1).
    pub fn approx(&self, alpha: &IrrationalAngle<T>) -> f64 {
        let v = ratio_to_f64(&self.c) + ratio_to_f64(&self.d) * alpha.approx();
        v - v.floor()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i128, d: i128) -> Rational<i128> {
        Ratio::new(n, d)
    }

    #[test]
    fn golden_convergents_are_fibonacci_ratios() {
        let a = IrrationalAngle::<i128>::golden();
        let got: Vec<_> = (0..8).map(|k| a.convergent(k).unwrap()).collect();
        assert_eq!(
            got,
            vec![(0, 1), (1, 1), (1, 2), (2, 3), (3, 5), (5, 8), (8, 13), (13, 21)]
        );
    }

    #[test]
    fn signs_near_golden() {
        let a = IrrationalAngle::<i128>::golden();
        // α − 0.618 > 0, α − 0.6181 < 0
        assert_eq!(a.sign(&r(-618, 1000), &r(1, 1)).unwrap(), Ordering::Greater);
        assert_eq!(a.sign(&r(-6181, 10000), &r(1, 1)).unwrap(), Ordering::Less);
        // α² = 1 − α, so α + α − 1 ... 2α − 1 > 0
        assert_eq!(a.sign(&r(-1, 1), &r(2, 1)).unwrap(), Ordering::Greater);
        assert_eq!(a.sign(&r(0, 1), &r(0, 1)).unwrap(), Ordering::Equal);
    }

    #[test]
    fn floor_and_frac() {
        let a = IrrationalAngle::<i128>::golden();
        let p = ExactAngle::<i128>::int(0, 7).unwrap(); // 7α ≈ 4.326
        assert_eq!(p.floor(&a).unwrap(), 4);
        let f = p.frac(&a).unwrap();
        assert_eq!(f.c, r(-4, 1));
        let q = ExactAngle::<i128>::int(0, -3).unwrap(); // −3α ≈ −1.854
        assert_eq!(q.floor(&a).unwrap(), -2);
        assert!((q.approx(&a) - 0.1459).abs() < 1e-3);
    }

    #[test]
    fn congruence_is_algebraic() {
        let x = ExactAngle::<i128>::new(r(1, 3), r(2, 1));
        let y = ExactAngle::<i128>::new(r(-5, 3), r(2, 1));
        let z = ExactAngle::<i128>::new(r(1, 3), r(3, 1));
        assert!(x.congruent(&y));
        assert!(!x.congruent(&z));
        let a = IrrationalAngle::<i128>::silver();
        assert_eq!(x.cmp_on_circle(&y, &a).unwrap(), Ordering::Equal);
    }

    #[test]
    fn fixed_width_overflow_is_reported() {
        let a = IrrationalAngle::<i64>::golden();
        // A value too close to zero for i64 convergents: F_90 - F_91·α ≈ 1e-19.
        let (p, q) = {
            let b = IrrationalAngle::<i128>::golden();
            b.convergent(90).unwrap()
        };
        let res = a.sign_linear(&(p as i64), &-(q as i64));
        assert_eq!(res, Err(Error::Overflow));
        let big = IrrationalAngle::<BigInt>::golden();
        let s = big.sign_linear(&BigInt::from(p), &BigInt::from(-q)).unwrap();
        // p_90/q_90 > α for even index? convergents alternate: even k below α.
        assert_eq!(s, Ordering::Less);
    }

    #[test]
    fn rejects_bad_continued_fractions() {
        assert!(IrrationalAngle::<i64>::new(vec![1], vec![1]).is_err());
        assert!(IrrationalAngle::<i64>::new(vec![0], vec![]).is_err());
        assert!(IrrationalAngle::<i64>::new(vec![0, 0], vec![1]).is_err());
    }
}
