//! Concrete sequences used as inputs for the witnesses.

use std::sync::Arc;

use crate::error::Result;
use crate::seqcore::{SequenceSource, SourceKind};

/// Lengths `L_k = |w_k|` for `w_{k+1} = w_k 0^k w_k`, `w_0 = 1`.
fn doubling_lengths(n: usize) -> ([usize; 64], usize) {
    let mut lens = [0usize; 64];
    lens[0] = 1;
    let mut k = 0;
    while lens[k] <= n {
        lens[k + 1] = 2 * lens[k] + k;
        k += 1;
    }
    (lens, k)
}

/// The limit of `w_{k+1} = w_k 0^k w_k`, `w_0 = 1`: recurrent, but the
/// 0-blocks grow so it is not uniformly recurrent.
pub fn block_doubling() -> SequenceSource {
    SequenceSource::generator(SourceKind::BlockDoubling, "block doubling w_{k+1} = w_k 0^k w_k", |n| {
        let (lens, mut k) = doubling_lengths(n);
        let mut n = n;
        // Invariant: n < L_k, reading inside w_k.
        while k > 0 {
            let half = lens[k - 1];
            let gap = k - 1;
            if n < half {
            } else if n < half + gap {
                return Ok(false);
            } else {
                n -= half + gap;
            }
            k -= 1;
        }
        debug_assert_eq!(n, 0);
        Ok(true)
    })
}

/// The prefix `w_k` itself.
pub fn block_doubling_word(k: usize) -> String {
    let mut w = String::from("1");
    for j in 0..k {
        w = format!("{w}{}{w}", "0".repeat(j));
    }
    w
}

/// Indicator of `{s(0) < s(1) < …}` for a strictly increasing `s`.
pub fn indicator<F>(label: impl Into<String>, s: F) -> SequenceSource
where
    F: Fn(u64) -> u128 + Send + Sync + 'static,
{
    let s = Arc::new(s);
    SequenceSource::generator(SourceKind::AlmostConstant, label, move |n| {
        let n = n as u128;
        // Least k with s(k) ≥ n, by galloping then bisection.
        let mut hi = 1u64;
        while s(hi) < n {
            hi *= 2;
        }
        let mut lo = 0u64;
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if s(mid) < n {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        Ok(s(lo) == n)
    })
}

/// 1s at `2^k`, `k ≥ 0`.
pub fn powers_of_two() -> SequenceSource {
    indicator("1s at 2^k", |k| 1u128.checked_shl(k as u32).unwrap_or(u128::MAX))
}

/// 1s at `2^k + k`, `k ≥ 0`.
pub fn powers_plus_index() -> SequenceSource {
    indicator("1s at 2^k + k", |k| {
        1u128.checked_shl(k as u32).map_or(u128::MAX, |p| p.saturating_add(k as u128))
    })
}

/// 1s at `k²`, `k ≥ 0`.
pub fn squares() -> SequenceSource {
    indicator("1s at k^2", |k| (k as u128) * (k as u128))
}

/// 1s at `r + k·step`.
pub fn progression(r: u64, step: u64) -> SequenceSource {
    indicator(format!("1s at {r} + {step}k"), move |k| r as u128 + k as u128 * step as u128)
}

/// Indicator of `ℕ₀ ∖ excluded`.
pub fn cofinite(excluded: &[usize]) -> SequenceSource {
    let excluded: Vec<usize> = excluded.to_vec();
    let label = format!("complement of {excluded:?}");
    SequenceSource::generator(SourceKind::AlmostConstant, label, move |n| Ok(!excluded.contains(&n)))
}

/// `0 1 00 11 000 111 …`: runs `0^k 1^k` for `k = 1, 2, …`.
pub fn growing_runs() -> SequenceSource {
    SequenceSource::generator(SourceKind::Custom, "runs 0^k 1^k", |n| {
        // Block k occupies [k(k−1), k(k+1)).
        let mut k = ((n as f64).sqrt() as usize).max(1);
        while k * (k + 1) <= n {
            k += 1;
        }
        while k > 1 && (k - 1) * k > n {
            k -= 1;
        }
        Ok(n - (k - 1) * k >= k)
    })
}

/// Every carrier bundled with the crate that is not eventually periodic.
pub fn bundled_nonperiodic() -> Result<Vec<SequenceSource>> {
    use crate::rotation::{code, RotationCodingSpec};
    use crate::toeplitz::{generate, HolePolicy, SimpleToeplitzSpec, ToeplitzSpec};
    let alternating = SimpleToeplitzSpec::lemma_instance()?.to_spec()?;
    Ok(vec![
        code(&RotationCodingSpec::<i128>::fibonacci()),
        code(&RotationCodingSpec::<i128>::closed_initial(crate::rotation::IrrationalAngle::golden())),
        code(&RotationCodingSpec::<i128>::closed_initial(
            crate::rotation::IrrationalAngle::golden_complement(),
        )),
        generate(&ToeplitzSpec::ternary_example(), HolePolicy::default()),
        generate(&alternating, HolePolicy::Bit(false)),
        powers_of_two(),
        powers_plus_index(),
        squares(),
        block_doubling(),
        growing_runs(),
    ])
}
