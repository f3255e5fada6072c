//! Packed bit storage used by the partition-refinement engine.
//!
//! `BitTape` holds a materialized prefix of a sequence; `ShiftSet` is a set
//! of shift positions `0..len`. Both pack 64 bits per word, least
//! significant bit first.

use std::fmt;

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[inline]
fn tail_mask(len: usize) -> u64 {
    match len % WORD {
        0 => !0,
        r => (1u64 << r) - 1,
    }
}

/// A materialized finite prefix `x(0), …, x(len - 1)`.
#[derive(Clone, PartialEq, Eq)]
pub struct BitTape {
    words: Vec<u64>,
    len: usize,
}

impl BitTape {
    pub fn zeros(len: usize) -> Self {
        BitTape { words: vec![0; words_for(len)], len }
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut tape = BitTape { words: Vec::new(), len: 0 };
        for b in bits {
            tape.push(b);
        }
        tape
    }

    pub fn push(&mut self, bit: bool) {
        if self.len % WORD == 0 {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / WORD] |= 1 << (self.len % WORD);
        }
        self.len += 1;
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let (w, b) = (i / WORD, i % WORD);
        if bit {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// The column `m ↦ x(m + offset)` for `m in 0..count`, as a shift set.
    ///
    /// Panics if `offset + count > len`.
    pub fn column(&self, offset: usize, count: usize) -> ShiftSet {
        assert!(
            offset + count <= self.len,
            "column [{offset}, {}) exceeds tape length {}",
            offset + count,
            self.len
        );
        let n = words_for(count);
        let q = offset / WORD;
        let r = offset % WORD;
        let mut words = Vec::with_capacity(n);
        for i in 0..n {
            let lo = self.words[q + i];
            let w = if r == 0 {
                lo
            } else {
                let hi = self.words.get(q + i + 1).copied().unwrap_or(0);
                (lo >> r) | (hi << (WORD - r))
            };
            words.push(w);
        }
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(count);
        }
        ShiftSet { words, len: count }
    }

    /// Render as a string of `'0'`/`'1'`.
    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }
}

impl fmt::Debug for BitTape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "BitTape({})", self.to_bit_string())
        } else {
            write!(f, "BitTape(len = {})", self.len)
        }
    }
}

/// A subset of the shift positions `0..len`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ShiftSet {
    words: Vec<u64>,
    len: usize,
}

impl ShiftSet {
    pub fn empty(len: usize) -> Self {
        ShiftSet { words: vec![0; words_for(len)], len }
    }

    pub fn full(len: usize) -> Self {
        let mut words = vec![!0u64; words_for(len)];
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        ShiftSet { words, len }
    }

    pub fn universe_len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * WORD + t)
                }
            })
        })
    }

    pub fn last(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + (WORD - 1 - w.leading_zeros() as usize))
    }

    /// Symmetric difference.
    pub fn xor(&self, other: &ShiftSet) -> ShiftSet {
        debug_assert_eq!(self.len, other.len);
        ShiftSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
            len: self.len,
        }
    }

    /// Split into `(self ∩ mask, self ∖ mask)`.
    pub fn split(&self, mask: &ShiftSet) -> (ShiftSet, ShiftSet) {
        debug_assert_eq!(self.len, mask.len);
        let mut inside = Vec::with_capacity(self.words.len());
        let mut outside = Vec::with_capacity(self.words.len());
        for (&a, &m) in self.words.iter().zip(&mask.words) {
            inside.push(a & m);
            outside.push(a & !m);
        }
        (
            ShiftSet { words: inside, len: self.len },
            ShiftSet { words: outside, len: self.len },
        )
    }

    /// Number of nonempty parts in `(self ∩ mask, self ∖ mask)`, without
    /// materializing them.
    #[inline]
    pub fn split_count(&self, mask: &ShiftSet) -> usize {
        let mut seen_in = false;
        let mut seen_out = false;
        for (&a, &m) in self.words.iter().zip(&mask.words) {
            seen_in |= a & m != 0;
            seen_out |= a & !m != 0;
            if seen_in && seen_out {
                return 2;
            }
        }
        seen_in as usize + seen_out as usize
    }
}

impl fmt::Debug for ShiftSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().take(32)).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_matches_direct_reads() {
        let bits: Vec<bool> = (0..300).map(|i| (i * 7 + i / 3) % 5 < 2).collect();
        let tape = BitTape::from_bools(bits.iter().copied());
        for offset in [0, 1, 63, 64, 65, 130] {
            let col = tape.column(offset, 150);
            for m in 0..150 {
                assert_eq!(col.contains(m), bits[m + offset], "offset {offset} m {m}");
            }
            assert!(!col.contains(150));
        }
    }

    #[test]
    fn split_partitions_the_set() {
        let a = ShiftSet::full(70);
        let mut mask = ShiftSet::empty(70);
        for i in (0..70).step_by(3) {
            mask.insert(i);
        }
        let (i, o) = a.split(&mask);
        assert_eq!(i.count() + o.count(), 70);
        assert_eq!(i.count(), 24);
        assert_eq!(a.split_count(&mask), 2);
        assert_eq!(i.split_count(&mask), 1);
        assert_eq!(o.first(), Some(1));
        assert_eq!(i.last(), Some(69));
        assert_eq!(i.xor(&a), o);
        assert_eq!(ShiftSet::empty(9).last(), None);
    }

    #[test]
    fn iter_lists_members() {
        let mut s = ShiftSet::empty(200);
        for i in [0, 5, 64, 199] {
            s.insert(i);
        }
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 5, 64, 199]);
    }
}
