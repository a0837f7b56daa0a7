//! Non-negative dyadic rationals `num / 2^exp`.
//!
//! Influences, Lemma-style restricted sums and correlation numerators on the
//! hypercube all have power-of-two denominators, so they are carried exactly
//! in this form and compared without tolerance.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

/// A reduced non-negative dyadic rational.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: u128,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    /// `num / 2^exp`, reduced.
    pub fn new(num: u128, exp: u32) -> Dyadic {
        if num == 0 {
            return Dyadic::ZERO;
        }
        let shift = num.trailing_zeros().min(exp);
        Dyadic { num: num >> shift, exp: exp - shift }
    }

    pub fn integer(v: u128) -> Dyadic {
        Dyadic::new(v, 0)
    }

    pub fn numerator(self) -> u128 {
        self.num
    }

    /// log2 of the reduced denominator.
    pub fn log2_denominator(self) -> u32 {
        self.exp
    }

    pub fn denominator(self) -> u128 {
        1u128 << self.exp
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn to_f64(self) -> f64 {
        // exp <= 127 here, so the power is exact
        self.num as f64 / (self.exp as f64).exp2()
    }

    pub fn to_ratio(self) -> Ratio<i128> {
        Ratio::new(self.num as i128, 1i128 << self.exp)
    }

    /// Numerator over the common denominator `2^exp`, `exp >= self.exp`.
    fn scaled(self, exp: u32) -> u128 {
        self.num << (exp - self.exp)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        let exp = self.exp.max(rhs.exp);
        Dyadic::new(self.scaled(exp) + rhs.scaled(exp), exp)
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, |a, b| a + b)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Dyadic) -> Ordering {
        let exp = self.exp.max(other.exp);
        self.scaled(exp).cmp(&other.scaled(exp))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Dyadic) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.denominator())
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_compares() {
        assert_eq!(Dyadic::new(8, 4), Dyadic::new(1, 1));
        assert_eq!(Dyadic::new(8, 4).to_string(), "1/2");
        assert_eq!(Dyadic::new(12, 2).to_string(), "3");
        assert!(Dyadic::new(3, 2) < Dyadic::new(1, 0));
        assert_eq!(Dyadic::new(1, 1) + Dyadic::new(1, 1), Dyadic::ONE);
        assert_eq!(Dyadic::new(3, 1).to_f64(), 1.5);
        assert_eq!(Dyadic::new(0, 9), Dyadic::ZERO);
    }

    #[test]
    fn ratio_conversion() {
        assert_eq!(Dyadic::new(7, 2).to_ratio(), Ratio::new(7, 4));
    }
}
