use std::collections::BTreeSet;

use serde::Serialize;

use super::spec::{generate, HolePolicy, SimpleToeplitzSpec};
use crate::error::{Error, Result};
use crate::seqcore::{tau_language, SequenceSource, SourceKind, Window, Word};

/// `σ^shift(θ(y))` for `θ: 0 ↦ w0, 1 ↦ w1` and `y` the simple Toeplitz
/// sequence of `spec`. Positions of `y` no level fills read as 0.
pub fn nearly_simple(spec: &SimpleToeplitzSpec, w: &Word, shift: usize) -> Result<SequenceSource> {
    let c = w.len() + 1;
    if shift >= c {
        return Err(Error::InvalidArgument(format!(
            "shift must be below |w| + 1 = {c}, got {shift}"
        )));
    }
    let y = generate(&spec.to_spec()?, HolePolicy::Bit(false));
    let w = w.0.clone();
    let label = format!("nearly simple Toeplitz, w = {}, shift {shift}", Word(w.clone()));
    Ok(SequenceSource::generator(SourceKind::Toeplitz, label, move |n| {
        let m = n + shift;
        let (q, r) = (m / c, m % c);
        if r < w.len() {
            Ok(w[r])
        } else {
            y.eval(q)
        }
    }))
}

/// The six shifts used to exhibit each word, with the word they read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftWitness {
    pub shift: usize,
    pub expected: Word,
    pub read: Word,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThreeWindowReport {
    pub window: Window,
    /// Shift applied so that the hole sits at residue 0 through level `h`.
    pub normalizing_shift: u64,
    pub shift_bound: usize,
    pub language: BTreeSet<Word>,
    pub expected: BTreeSet<Word>,
    pub matches_lemma: bool,
    pub witnesses: Vec<ShiftWitness>,
}

/// For indices `c < d < e < f < g < h` with `a_c = a_e = a_g ≠ a_d = a_f = a_h`,
/// compute the language of `{0, n_e, n_f}` on the spec shifted so its hole
/// sits at residue 0, and replay the six witness shifts
/// `n_c, n_d, n_f − n_e, n_g, n_g − n_f, n_h − n_f`.
///
/// Here `a_k` is the letter on multiples of `n_k` that are not multiples of
/// `n_{k+1}` after the shift, i.e. the letter filled at level `k + 1`.
pub fn three_window(
    spec: &SimpleToeplitzSpec,
    idx: [usize; 6],
    shift_bound: Option<usize>,
) -> Result<ThreeWindowReport> {
    let [c, d, e, f, g, h] = idx;
    if !idx.windows(2).all(|p| p[0] < p[1]) || c == 0 {
        return Err(Error::Precondition(format!(
            "indices must satisfy 1 ≤ c < d < e < f < g < h, got {idx:?}"
        )));
    }
    let letter = |k: usize| {
        spec.letter(k + 1)
            .ok_or_else(|| Error::Precondition(format!("no letter at level {}", k + 1)))
    };
    let low = letter(c)?;
    if [e, g].iter().any(|&k| letter(k).ok() != Some(low)) || [d, f, h].iter().any(|&k| letter(k).ok() != Some(!low)) {
        return Err(Error::Precondition(
            "need a_c = a_e = a_g and a_d = a_f = a_h with the two values different".into(),
        ));
    }
    let toeplitz = spec.to_spec()?;
    if toeplitz.max_levels() < h + 1 {
        return Err(Error::Precondition(format!("spec defines fewer than {} levels", h + 1)));
    }
    let n = |k: usize| -> Result<usize> { Ok(toeplitz.level(k)?.period as usize) };
    let hole = toeplitz.level(h)?.holes[0];
    let x = generate(&toeplitz, HolePolicy::Bit(false)).shifted(hole as usize);

    let window = Window::new(vec![0, n(e)?, n(f)?])?;
    let bound = shift_bound.unwrap_or(n(h)? + n(f)?).max(n(h)? + n(f)?);
    let language = tau_language(&x, &window, bound)?.words();

    let word = |s: &str| -> Word {
        let w: Word = s.parse().expect("literal word");
        if low { w.flipped() } else { w }
    };
    let plan = [
        (n(c)?, "000"),
        (n(d)?, "111"),
        (n(f)? - n(e)?, "010"),
        (n(g)?, "001"),
        (n(g)? - n(f)?, "100"),
        (n(h)? - n(f)?, "101"),
    ];
    let mut witnesses = Vec::new();
    for (shift, s) in plan {
        let read = Word(
            window
                .offsets()
                .iter()
                .map(|&t| x.eval(shift + t))
                .collect::<Result<_>>()?,
        );
        witnesses.push(ShiftWitness { shift, expected: word(s), read });
    }
    let expected: BTreeSet<Word> = ["000", "001", "010", "100", "101", "111"].iter().map(|s| word(s)).collect();
    Ok(ThreeWindowReport {
        matches_lemma: language == expected,
        window,
        normalizing_shift: hole,
        shift_bound: bound,
        language,
        expected,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alternating() -> SimpleToeplitzSpec {
        SimpleToeplitzSpec::lemma_instance().unwrap()
    }

    #[test]
    fn lemma_instance_gives_six_words() {
        let r = three_window(&alternating(), [1, 2, 3, 4, 5, 6], None).unwrap();
        assert_eq!(r.window.offsets(), &[0, 8, 16]);
        assert!(r.matches_lemma, "{:?}", r.language);
        for w in &r.witnesses {
            assert_eq!(w.read, w.expected, "shift {}", w.shift);
        }
        assert_eq!(r.witnesses[2].shift, 8);
        assert_eq!(r.witnesses[2].read.to_string(), "010");
    }

    #[test]
    fn flipped_spec_gives_flipped_words() {
        let r = three_window(&alternating().flipped(), [1, 2, 3, 4, 5, 6], None).unwrap();
        assert!(r.matches_lemma);
        assert!(r.language.contains(&"110".parse().unwrap()));
        assert!(!r.language.contains(&"001".parse().unwrap()));
    }

    #[test]
    fn wrong_letter_pattern_is_rejected() {
        let r = three_window(&alternating(), [1, 3, 4, 5, 6, 7], None);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn empty_morphism_word_is_identity() {
        let spec = alternating();
        let x = nearly_simple(&spec, &Word(vec![]), 0).unwrap();
        let y = generate(&spec.to_spec().unwrap(), HolePolicy::Bit(false));
        assert_eq!(x.prefix(300).unwrap(), y.prefix(300).unwrap());
    }

    #[test]
    fn one_letter_morphism_interleaves() {
        let spec = alternating();
        let x = nearly_simple(&spec, &"1".parse().unwrap(), 1).unwrap();
        let y = generate(&spec.to_spec().unwrap(), HolePolicy::Bit(false));
        // θ(y) = 1 y(0) 1 y(1) …, read from position 1.
        for n in 0..400 {
            let m = n + 1;
            let expect = if m % 2 == 0 { true } else { y.eval(m / 2).unwrap() };
            assert_eq!(x.eval(n).unwrap(), expect);
        }
        assert!(nearly_simple(&spec, &"1".parse().unwrap(), 2).is_err());
    }
}
