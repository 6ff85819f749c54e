use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest point index a [`Subset`] can hold.
pub const MAX_POINTS: usize = 32;

/// A subset of `{1, ..., 32}` stored as a bitmask (bit `i - 1` holds `i`).
///
/// The ordering is the one used to sort exceptional divisors: smaller sets
/// first; among sets of equal size, `I < J` when the least element of `I \ J`
/// is below the least element of `J \ I`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// `{1, ..., n}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_POINTS);
        if n == 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << n) - 1)
        }
    }

    /// `{lo, ..., hi}` (empty when `lo > hi`).
    pub fn range(lo: usize, hi: usize) -> Self {
        (lo..=hi).collect()
    }

    pub fn singleton(i: usize) -> Self {
        assert!((1..=MAX_POINTS).contains(&i), "point {i} out of range");
        Subset(1 << (i - 1))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=MAX_POINTS).contains(&i) && self.0 & (1 << (i - 1)) != 0
    }

    pub fn insert(&mut self, i: usize) {
        *self = *self | Subset::singleton(i);
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !Subset::singleton(i).0;
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 32 - self.0.leading_zeros() as usize)
    }

    pub fn is_subset(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: Subset) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn is_disjoint(self, other: Subset) -> bool {
        self.0 & other.0 == 0
    }

    /// True when the two sets are nested or disjoint.
    pub fn compatible(self, other: Subset) -> bool {
        self.is_subset(other) || other.is_subset(self) || self.is_disjoint(other)
    }

    pub fn iter(self) -> SubsetIter {
        SubsetIter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `{1..n}` with exactly `k` elements, in increasing bitmask order.
    pub fn of_size(n: usize, k: usize) -> Vec<Subset> {
        if k > n {
            return Vec::new();
        }
        let full = Subset::full(n).0 as u64;
        let mut out = Vec::new();
        if k == 0 {
            out.push(Subset::EMPTY);
            return out;
        }
        // Gosper's hack
        let mut x: u64 = (1u64 << k) - 1;
        while x <= full {
            out.push(Subset(x as u32));
            let c = x & x.wrapping_neg();
            let r = x + c;
            x = (((r ^ x) >> 2) / c) | r;
        }
        out
    }

    /// Subsets of `{1..n}` with at least three elements, sorted by the divisor order.
    pub fn divisor_sets(n: usize) -> Vec<Subset> {
        let mut v: Vec<Subset> = (3..=n).flat_map(|k| Subset::of_size(n, k)).collect();
        v.sort();
        v
    }
}

impl std::ops::BitOr for Subset {
    type Output = Subset;
    fn bitor(self, rhs: Subset) -> Subset {
        Subset(self.0 | rhs.0)
    }
}

impl std::ops::BitAnd for Subset {
    type Output = Subset;
    fn bitand(self, rhs: Subset) -> Subset {
        Subset(self.0 & rhs.0)
    }
}

impl std::ops::Sub for Subset {
    type Output = Subset;
    fn sub(self, rhs: Subset) -> Subset {
        Subset(self.0 & !rhs.0)
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = Subset::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

pub struct SubsetIter(u32);

impl Iterator for SubsetIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(i as usize + 1)
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            if self == other {
                return Ordering::Equal;
            }
            let mine = (*self - *other).min();
            let theirs = (*other - *self).min();
            mine.cmp(&theirs)
        })
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if let Some(bad) = v.iter().find(|&&i| i == 0 || i > MAX_POINTS) {
            return Err(serde::de::Error::custom(format!(
                "point {bad} outside 1..={MAX_POINTS}"
            )));
        }
        Ok(v.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[usize]) -> Subset {
        v.iter().copied().collect()
    }

    #[test]
    fn divisor_order() {
        assert!(s(&[1, 2, 3]) < s(&[1, 2, 4]));
        assert!(s(&[1, 2, 3]) < s(&[1, 2, 3, 4]));
        assert!(s(&[1, 5, 6]) < s(&[2, 3, 4]));
        assert!(!(s(&[1, 2, 3]) < s(&[1, 2, 3])));
    }

    #[test]
    fn sizes_and_iteration() {
        assert_eq!(Subset::of_size(5, 3).len(), 10);
        assert_eq!(Subset::divisor_sets(4).len(), 5);
        assert_eq!(s(&[4, 2, 9]).to_vec(), vec![2, 4, 9]);
        assert_eq!(Subset::full(20).len(), 20);
        assert_eq!(Subset::range(9, 12).to_vec(), vec![9, 10, 11, 12]);
        assert_eq!(s(&[3, 7]).max(), Some(7));
    }

    #[test]
    fn compatibility() {
        assert!(s(&[1, 2, 3]).compatible(s(&[1, 2, 3, 4])));
        assert!(s(&[1, 2, 3]).compatible(s(&[4, 5, 6])));
        assert!(!s(&[1, 2, 3]).compatible(s(&[1, 2, 4])));
    }
}
