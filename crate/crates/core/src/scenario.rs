//! Fixed-width edge sets.
//!
//! A [`Scenario`] is the set of surviving edges of a network, stored as a
//! bitset over the canonical edge indices `1..=width`. The same type is reused
//! for decision vectors' supports and for position-indexed sets inside the BDD
//! compiler, where bit `k` stands for layer `k + 1`.

use std::cmp::Ordering;
use std::fmt;

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scenario {
    width: usize,
    words: Vec<u64>,
}

impl Scenario {
    /// The empty set over `width` edges.
    pub fn empty(width: usize) -> Self {
        Scenario {
            width,
            words: vec![0; width.div_ceil(WORD)],
        }
    }

    /// All `width` edges.
    pub fn full(width: usize) -> Self {
        let mut s = Self::empty(width);
        for bit in 0..width {
            s.set_bit(bit);
        }
        s
    }

    /// Builds a set from 1-based edge indices. Panics if an index is out of range.
    pub fn from_edges<I: IntoIterator<Item = usize>>(width: usize, edges: I) -> Self {
        let mut s = Self::empty(width);
        for e in edges {
            assert!(e >= 1 && e <= width, "edge index {e} outside 1..={width}");
            s.set_bit(e - 1);
        }
        s
    }

    /// Low `width` bits of `mask`; bit 0 is edge 1.
    pub fn from_mask(width: usize, mask: u64) -> Self {
        assert!(width <= WORD);
        let mut s = Self::empty(width);
        if width > 0 {
            let keep = if width == WORD { u64::MAX } else { (1u64 << width) - 1 };
            s.words[0] = mask & keep;
        }
        s
    }

    /// Inverse of [`Scenario::from_mask`] for widths up to 64.
    pub fn to_mask(&self) -> u64 {
        assert!(self.width <= WORD);
        self.words.first().copied().unwrap_or(0)
    }

    /// Parses a `{0,1}` string whose leftmost character is edge 1.
    pub fn from_bitstring(text: &str) -> Option<Self> {
        let mut s = Self::empty(text.chars().count());
        for (i, c) in text.chars().enumerate() {
            match c {
                '1' => s.set_bit(i),
                '0' => {}
                _ => return None,
            }
        }
        Some(s)
    }

    pub fn to_bitstring(&self) -> String {
        (0..self.width)
            .map(|b| if self.has_bit(b) { '1' } else { '0' })
            .collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Whether 1-based edge `e` is in the set.
    pub fn contains(&self, e: usize) -> bool {
        e >= 1 && e <= self.width && self.has_bit(e - 1)
    }

    pub fn insert(&mut self, e: usize) {
        assert!(e >= 1 && e <= self.width);
        self.set_bit(e - 1);
    }

    pub fn remove(&mut self, e: usize) {
        assert!(e >= 1 && e <= self.width);
        self.clear_bit(e - 1);
    }

    /// 1-based edge indices in increasing order.
    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits().map(|b| b + 1)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &Scenario) -> bool {
        debug_assert_eq!(self.width, other.width);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &Scenario) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn union(&self, other: &Scenario) -> Scenario {
        Scenario {
            width: self.width,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    /// Set complement within the width.
    pub fn complement(&self) -> Scenario {
        let mut out = Self::full(self.width);
        for (w, s) in out.words.iter_mut().zip(&self.words) {
            *w &= !s;
        }
        out
    }

    pub(crate) fn has_bit(&self, bit: usize) -> bool {
        self.words[bit / WORD] >> (bit % WORD) & 1 == 1
    }

    pub(crate) fn set_bit(&mut self, bit: usize) {
        self.words[bit / WORD] |= 1 << (bit % WORD);
    }

    pub(crate) fn clear_bit(&mut self, bit: usize) {
        self.words[bit / WORD] &= !(1 << (bit % WORD));
    }

    pub(crate) fn first_bit(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub(crate) fn bits(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(i * WORD + b)
                }
            })
        })
    }
}

/// Bitstring order: compares edge 1 first, a present edge sorts before an absent one.
impl Ord for Scenario {
    fn cmp(&self, other: &Self) -> Ordering {
        self.width.cmp(&other.width).then_with(|| {
            for (a, b) in self.words.iter().zip(&other.words) {
                if a != b {
                    let low = (a ^ b).trailing_zeros();
                    return if a >> low & 1 == 1 {
                        Ordering::Less
                    } else {
                        Ordering::Greater
                    };
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Scenario {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scenario({})", self.to_bitstring())
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

/// Removes duplicates and every set that strictly contains another member,
/// leaving a clutter in canonical (sorted) order.
pub fn minimize_family(mut family: Vec<Scenario>) -> Vec<Scenario> {
    family.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    family.dedup();
    let mut kept: Vec<Scenario> = Vec::with_capacity(family.len());
    for s in family {
        if !kept.iter().any(|k| k.is_subset(&s)) {
            kept.push(s);
        }
    }
    kept.sort();
    kept
}
