//! Sets of hypercube coordinates.
//!
//! Coordinates are 1-based in every public API: coordinate `k` is stored as
//! bit `k - 1` of the mask, which is also the bit of the input index that
//! carries `x_k`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::MAX_DIMENSION;

/// A subset of `[n] = {1, ..., n}` stored as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoordSet(u32);

impl CoordSet {
    pub const EMPTY: CoordSet = CoordSet(0);

    /// The full set `[n]`.
    pub fn full(n: usize) -> CoordSet {
        debug_assert!(n <= MAX_DIMENSION);
        CoordSet(((1u64 << n) - 1) as u32)
    }

    pub fn from_mask(mask: u32) -> CoordSet {
        CoordSet(mask)
    }

    /// Builds a set from 1-based coordinate labels.
    pub fn from_coords(coords: &[usize]) -> Result<CoordSet> {
        let mut mask = 0u32;
        for &k in coords {
            if k == 0 || k > MAX_DIMENSION {
                return Err(Error::CoordinateOutOfRange { k, n: MAX_DIMENSION });
            }
            mask |= 1 << (k - 1);
        }
        Ok(CoordSet(mask))
    }

    /// The prefix `{1, ..., k}`.
    pub fn prefix(k: usize) -> CoordSet {
        CoordSet::full(k)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, k: usize) -> bool {
        (1..=32).contains(&k) && self.0 & (1 << (k - 1)) != 0
    }

    pub fn insert(self, k: usize) -> CoordSet {
        CoordSet(self.0 | (1 << (k - 1)))
    }

    pub fn remove(self, k: usize) -> CoordSet {
        CoordSet(self.0 & !(1 << (k - 1)))
    }

    pub fn union(self, other: CoordSet) -> CoordSet {
        CoordSet(self.0 | other.0)
    }

    /// `[n] \ self`.
    pub fn complement(self, n: usize) -> CoordSet {
        CoordSet(!self.0 & CoordSet::full(n).0)
    }

    pub fn is_subset_of(self, other: CoordSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Checks that every member lies in `[n]`.
    pub fn check_within(self, n: usize) -> Result<()> {
        if self.is_subset_of(CoordSet::full(n)) {
            Ok(())
        } else {
            let k = 32 - self.0.leading_zeros() as usize;
            Err(Error::CoordinateOutOfRange { k, n })
        }
    }

    /// Members in increasing order, 1-based.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(bit + 1)
            }
        })
    }
}

impl fmt::Debug for CoordSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for CoordSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, k) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_are_one_based() {
        let s = CoordSet::from_coords(&[1, 3]).unwrap();
        assert_eq!(s.mask(), 0b101);
        assert!(s.contains(1) && !s.contains(2) && s.contains(3));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(s.complement(4), CoordSet::from_coords(&[2, 4]).unwrap());
        assert_eq!(s.to_string(), "{1,3}");
    }

    #[test]
    fn rejects_zero_and_out_of_range() {
        assert!(CoordSet::from_coords(&[0]).is_err());
        assert!(CoordSet::from_coords(&[3]).unwrap().check_within(2).is_err());
        assert!(CoordSet::full(24).check_within(24).is_ok());
    }
}
