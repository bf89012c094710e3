//! Bitset sumset engine for integer sets inside a bounded window.
//!
//! A set `{v}` with minimum `lo` is stored as bit `v - lo`. The sumset of
//! two windows is the OR of one window shifted by every set bit of the other.

/// Default maximal span (in integers) a bitset sumset may occupy.
pub const DEFAULT_WINDOW: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitWindow {
    offset: i64,
    width: usize,
    words: Vec<u64>,
}

impl BitWindow {
    /// Returns `None` for an empty slice.
    pub fn from_values(values: &[i64]) -> Option<Self> {
        let lo = *values.iter().min()?;
        let hi = *values.iter().max()?;
        let width = (hi - lo) as usize + 1;
        let mut words = vec![0u64; width.div_ceil(64)];
        for &v in values {
            let b = (v - lo) as usize;
            words[b / 64] |= 1 << (b % 64);
        }
        Some(BitWindow {
            offset: lo,
            width,
            words,
        })
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn contains(&self, v: i64) -> bool {
        if v < self.offset {
            return false;
        }
        let b = (v - self.offset) as usize;
        b < self.width && self.words[b / 64] >> (b % 64) & 1 == 1
    }

    /// Set bit positions relative to the offset, ascending.
    pub fn bits(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }

    pub fn values(&self) -> impl Iterator<Item = i64> + '_ {
        self.bits().map(move |b| self.offset + b as i64)
    }

    pub fn sum(&self, other: &BitWindow) -> BitWindow {
        // shift the wider operand by the bits of the sparser one
        let (base, shifts) = if self.count() >= other.count() {
            (self, other)
        } else {
            (other, self)
        };
        let width = base.width + shifts.width - 1;
        let mut words = vec![0u64; width.div_ceil(64)];
        for b in shifts.bits() {
            or_shifted(&mut words, &base.words, b);
        }
        BitWindow {
            offset: self.offset + other.offset,
            width,
            words,
        }
    }

    /// `|self + other|` without keeping the result around.
    pub fn sum_count(&self, other: &BitWindow) -> usize {
        self.sum(other).count()
    }

    pub fn union_with(&mut self, other: &BitWindow) {
        debug_assert_eq!(self.offset, other.offset);
        for (d, s) in self.words.iter_mut().zip(&other.words) {
            *d |= s;
        }
    }

    /// The window of `self` translated by `shift`, resized to `[offset, offset + width)`.
    pub fn translated_into(&self, shift: i64, offset: i64, width: usize) -> BitWindow {
        let mut words = vec![0u64; width.div_ceil(64)];
        let start = self.offset + shift - offset;
        debug_assert!(start >= 0 && start as usize + self.width <= width);
        or_shifted(&mut words, &self.words, start as usize);
        BitWindow { offset, width, words }
    }
}

fn or_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let ws = shift / 64;
    let bs = shift % 64;
    for (i, &w) in src.iter().enumerate() {
        if w == 0 {
            continue;
        }
        if let Some(d) = dst.get_mut(i + ws) {
            *d |= w << bs;
        }
        if bs > 0 {
            if let Some(d) = dst.get_mut(i + ws + 1) {
                *d |= w >> (64 - bs);
            }
        }
    }
}
