//! Truth tables of boolean functions `f: {-1,1}^n -> {-1,1}`.
//!
//! Conventions, fixed everywhere in the crate:
//!
//! * input index `i` encodes the point `x(i)`: bit `k-1` of `i` is `0` when
//!   `x_k = +1` and `1` when `x_k = -1`;
//! * table bit `i` is `1` exactly when `f(x(i)) = -1`.
//!
//! Under these conventions the Walsh coefficient at subset mask `S` is
//! `sum_i f(x(i)) * (-1)^popcount(i & S)`.

use std::fmt;

use rand::Rng;

use crate::coords::CoordSet;
use crate::error::{Error, Result};
use crate::MAX_DIMENSION;

/// A boolean function on `{-1,1}^n`, `n <= 24`, stored as a packed truth table.
///
/// `n = 0` is accepted: it is the zero-dimensional function that restrictions
/// with no free coordinates produce.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    n: usize,
    table: Vec<u64>,
}

fn words_for(n: usize) -> usize {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n > MAX_DIMENSION {
        Err(Error::DimensionTooLarge { n, max: MAX_DIMENSION })
    } else {
        Ok(())
    }
}

fn low_mask(n: usize) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}

impl BooleanFunction {
    /// Wraps a packed table. Bits beyond `2^n` must be zero.
    pub fn from_words(n: usize, table: Vec<u64>) -> Result<BooleanFunction> {
        check_dimension(n)?;
        let expected = words_for(n);
        if table.len() != expected {
            return Err(Error::TableLength { expected, found: table.len() });
        }
        if table[0] & !low_mask(n) != 0 {
            return Err(Error::InvalidParameter(format!(
                "table bits set beyond 2^{n} points"
            )));
        }
        Ok(BooleanFunction { n, table })
    }

    /// The table packed in a single integer, for `n <= 6`.
    pub fn from_table_bits(n: usize, bits: u64) -> Result<BooleanFunction> {
        if n > 6 {
            return Err(Error::InvalidParameter(format!(
                "single-word tables need n <= 6, got {n}"
            )));
        }
        BooleanFunction::from_words(n, vec![bits])
    }

    /// Builds `f` from its value at each input index; negative values read as `-1`.
    pub fn from_fn(n: usize, mut value: impl FnMut(usize) -> i8) -> Result<BooleanFunction> {
        check_dimension(n)?;
        let mut table = vec![0u64; words_for(n)];
        for i in 0..1usize << n {
            if value(i) < 0 {
                table[i >> 6] |= 1 << (i & 63);
            }
        }
        Ok(BooleanFunction { n, table })
    }

    /// Builds `f` from an explicit list of `2^n` values in `{-1, +1}`.
    pub fn from_values(n: usize, values: &[i8]) -> Result<BooleanFunction> {
        check_dimension(n)?;
        if values.len() != 1 << n {
            return Err(Error::InvalidParameter(format!(
                "expected {} values, got {}",
                1usize << n,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| v.abs() != 1) {
            return Err(Error::InvalidParameter(format!("value {v} is not -1 or +1")));
        }
        BooleanFunction::from_fn(n, |i| values[i])
    }

    pub fn constant(n: usize, value: i8) -> Result<BooleanFunction> {
        BooleanFunction::from_fn(n, |_| value)
    }

    /// A uniformly random table: every output is an independent fair coin.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<BooleanFunction> {
        check_dimension(n)?;
        let mut table: Vec<u64> = (0..words_for(n)).map(|_| rng.gen()).collect();
        table[0] &= low_mask(n);
        Ok(BooleanFunction { n, table })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of points, `2^n`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.table
    }

    #[inline]
    pub(crate) fn bit(&self, i: usize) -> bool {
        (self.table[i >> 6] >> (i & 63)) & 1 == 1
    }

    /// `f(x(i))` without bounds checking beyond the slice index.
    #[inline]
    pub fn value(&self, i: usize) -> i8 {
        if self.bit(i) {
            -1
        } else {
            1
        }
    }

    pub fn evaluate(&self, i: usize) -> Result<i8> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange { index: i, len: self.len() });
        }
        Ok(self.value(i))
    }

    /// All values in input-index order.
    pub fn values(&self) -> impl Iterator<Item = i8> + '_ {
        (0..self.len()).map(move |i| self.value(i))
    }

    /// Number of points where `f = -1`.
    pub fn weight(&self) -> u64 {
        self.table.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_constant(&self) -> bool {
        let w = self.weight();
        w == 0 || w == self.len() as u64
    }

    /// `-f`.
    pub fn negate(&self) -> BooleanFunction {
        let mut table: Vec<u64> = self.table.iter().map(|w| !w).collect();
        table[0] &= low_mask(self.n);
        BooleanFunction { n: self.n, table }
    }

    fn check_coordinate(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n {
            Err(Error::CoordinateOutOfRange { k, n: self.n })
        } else {
            Ok(())
        }
    }

    /// `g(x) = f(mu_k(x))`, where `mu_k` flips coordinate `k`.
    pub fn flip(&self, k: usize) -> Result<BooleanFunction> {
        self.check_coordinate(k)?;
        let bit = 1usize << (k - 1);
        BooleanFunction::from_fn(self.n, |i| self.value(i ^ bit))
    }

    /// `g(x) = f(x_{perm[0]}, ..., x_{perm[n-1]})`: coordinate `j` of the
    /// argument of `f` is read from coordinate `perm[j-1]` of `x`.
    pub fn permute(&self, perm: &[usize]) -> Result<BooleanFunction> {
        check_permutation(perm, self.n)?;
        BooleanFunction::from_fn(self.n, |i| {
            let mut src = 0usize;
            for (j, &p) in perm.iter().enumerate() {
                if i >> (p - 1) & 1 == 1 {
                    src |= 1 << j;
                }
            }
            self.value(src)
        })
    }

    /// Restriction that keeps the coordinates in `free` and fixes the rest.
    ///
    /// `assignment` lists `(coordinate, value)` pairs and must cover exactly
    /// `[n] \ free`. The free coordinates become `y_1, ..., y_|free|` in
    /// increasing order.
    pub fn restrict(&self, free: CoordSet, assignment: &[(usize, i8)]) -> Result<BooleanFunction> {
        Ok(Restriction::new(self, free, assignment)?.function())
    }

    /// Lowercase hex, little-endian by input index: table bit `i` is bit
    /// `i mod 4` of hex digit `i div 4`.
    pub fn to_hex(&self) -> String {
        let digits = hex_digits(self.n);
        let mut out = String::with_capacity(digits);
        for d in 0..digits {
            let nibble = (self.table[(4 * d) >> 6] >> ((4 * d) & 63)) & 0xf;
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<BooleanFunction> {
        check_dimension(n)?;
        let expected = hex_digits(n);
        let hex = hex.trim();
        if hex.len() != expected {
            return Err(Error::HexLength { n, expected, found: hex.len() });
        }
        let mut table = vec![0u64; words_for(n)];
        for (d, c) in hex.chars().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::InvalidHex(format!("'{c}' is not a hex digit")))?
                as u64;
            table[(4 * d) >> 6] |= nibble << ((4 * d) & 63);
        }
        if table[0] & !low_mask(n) != 0 {
            return Err(Error::InvalidHex(format!(
                "digit sets table bits beyond 2^{n} points"
            )));
        }
        Ok(BooleanFunction { n, table })
    }
}

/// `ceil(2^n / 4)`.
pub fn hex_digits(n: usize) -> usize {
    (1usize << n).div_ceil(4)
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = 0u32;
    if perm.len() != n {
        return Err(Error::NotAPermutation { n });
    }
    for &p in perm {
        if p == 0 || p > n || seen & (1 << (p - 1)) != 0 {
            return Err(Error::NotAPermutation { n });
        }
        seen |= 1 << (p - 1);
    }
    Ok(())
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BooleanFunction(n={}, {})", self.n, self.to_hex())
    }
}

/// The restricted function `f_{J^c -> x}`: the coordinates in `J = free`
/// stay variable, the others are pinned to the values in the assignment.
#[derive(Clone, Debug)]
pub struct Restriction<'a> {
    base: &'a BooleanFunction,
    free: CoordSet,
    /// Input-index bits of the pinned coordinates (`1` means `-1`).
    fixed_bits: usize,
}

impl<'a> Restriction<'a> {
    pub fn new(
        base: &'a BooleanFunction,
        free: CoordSet,
        assignment: &[(usize, i8)],
    ) -> Result<Restriction<'a>> {
        free.check_within(base.n)?;
        let fixed = free.complement(base.n);
        let mut covered = CoordSet::EMPTY;
        let mut fixed_bits = 0usize;
        for &(k, v) in assignment {
            if !fixed.contains(k) {
                return Err(Error::AssignmentMismatch(format!(
                    "coordinate {k} is not a fixed coordinate"
                )));
            }
            if covered.contains(k) {
                return Err(Error::AssignmentMismatch(format!("coordinate {k} assigned twice")));
            }
            if v.abs() != 1 {
                return Err(Error::AssignmentMismatch(format!("value {v} for coordinate {k}")));
            }
            covered = covered.insert(k);
            if v < 0 {
                fixed_bits |= 1 << (k - 1);
            }
        }
        if covered != fixed {
            return Err(Error::AssignmentMismatch(format!(
                "missing values for {}",
                CoordSet::from_mask(fixed.mask() & !covered.mask())
            )));
        }
        Ok(Restriction { base, free, fixed_bits })
    }

    /// Pins the complement of `free` to the coordinates of the point `x(index)`.
    pub fn at_point(base: &'a BooleanFunction, free: CoordSet, index: usize) -> Result<Restriction<'a>> {
        free.check_within(base.n)?;
        if index >= base.len() {
            return Err(Error::IndexOutOfRange { index, len: base.len() });
        }
        let fixed = free.complement(base.n).mask() as usize;
        Ok(Restriction { base, free, fixed_bits: index & fixed })
    }

    pub fn base(&self) -> &BooleanFunction {
        self.base
    }

    pub fn free(&self) -> CoordSet {
        self.free
    }

    pub fn dimension(&self) -> usize {
        self.free.len()
    }

    /// The input index of `f` for local index `y` of the restricted function.
    pub fn lift(&self, y: usize) -> usize {
        let mut z = self.fixed_bits;
        for (r, k) in self.free.iter().enumerate() {
            if y >> r & 1 == 1 {
                z |= 1 << (k - 1);
            }
        }
        z
    }

    pub fn function(&self) -> BooleanFunction {
        BooleanFunction::from_fn(self.dimension(), |y| self.base.value(self.lift(y)))
            .expect("restriction dimension is within the cap")
    }
}
