//! Exact Walsh–Hadamard spectra and influences.
//!
//! Coefficients are kept unnormalized: `coeffs[S] = 2^n * f̂(S) = sum_x f(x) X_S(x)`,
//! so Parseval reads `sum_S coeffs[S]^2 = 4^n` as an integer identity.

use rayon::prelude::*;
use serde::Serialize;

use crate::boolfn::BooleanFunction;
use crate::coords::CoordSet;
use crate::dyadic::Dyadic;

/// All `2^n` unnormalized Walsh coefficients, indexed by subset mask.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Spectrum {
    n: usize,
    coeffs: Vec<i32>,
}

/// One in-place butterfly pass along input bit `bit`.
pub fn butterfly_pass(values: &mut [i32], bit: usize) {
    let h = 1usize << bit;
    for block in values.chunks_exact_mut(2 * h) {
        let (lo, hi) = block.split_at_mut(h);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = x + y;
            *b = x - y;
        }
    }
}

/// The table as `+1/-1` integers in input-index order.
pub fn signed_table(f: &BooleanFunction) -> Vec<i32> {
    f.values().map(i32::from).collect()
}

/// Transforms only along the coordinates in `along`.
///
/// Entry `i` of the result, with `T = i & along` and `x = i & !along`, equals
/// `2^|along| * f̂_{along^c -> x}(T)`: the unnormalized coefficient at `T` of
/// the restriction that pins the other coordinates to the bits of `x`.
pub fn partial_transform(f: &BooleanFunction, along: CoordSet) -> Vec<i32> {
    let mut values = signed_table(f);
    for k in along.iter() {
        butterfly_pass(&mut values, k - 1);
    }
    values
}

/// Fast Walsh–Hadamard transform, `n` integer butterfly passes.
pub fn wht(f: &BooleanFunction) -> Spectrum {
    let mut coeffs = signed_table(f);
    for bit in 0..f.n() {
        butterfly_pass(&mut coeffs, bit);
    }
    Spectrum { n: f.n(), coeffs }
}

/// Transforms many functions in parallel.
pub fn wht_batch(fs: &[BooleanFunction]) -> Vec<Spectrum> {
    fs.par_iter().map(wht).collect()
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[i32] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: usize) -> i32 {
        self.coeffs[mask]
    }

    /// `coeffs[S]^2 = 4^n * f̂(S)^2`.
    pub fn squared(&self, mask: usize) -> u64 {
        let c = self.coeffs[mask] as i64;
        (c * c) as u64
    }

    /// `f̂(S)^2` as a float (exact: a dyadic with a short numerator).
    pub fn weight(&self, mask: usize) -> f64 {
        self.squared(mask) as f64 / (2.0 * self.n as f64).exp2()
    }

    /// `sum_S coeffs[S]^2`, which equals `4^n` for boolean `f`.
    pub fn parseval_sum(&self) -> u128 {
        (0..self.coeffs.len()).map(|s| self.squared(s) as u128).sum()
    }

    pub fn parseval_ok(&self) -> bool {
        self.parseval_sum() == 1u128 << (2 * self.n)
    }

    /// `sum_S |S| coeffs[S]^2`, which equals `4^n * I(f)`.
    pub fn degree_weighted_sum(&self) -> u128 {
        (0..self.coeffs.len())
            .map(|s| s.count_ones() as u128 * self.squared(s) as u128)
            .sum()
    }

    /// Applies the butterfly again; the result is `2^n` times the signed table.
    pub fn inverse_scaled(&self) -> Vec<i32> {
        let mut values = self.coeffs.clone();
        for bit in 0..self.n {
            butterfly_pass(&mut values, bit);
        }
        values
    }
}

/// Per-coordinate influences and their total, exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InfluenceProfile {
    pub per_coord: Vec<Dyadic>,
    pub total: Dyadic,
}

impl InfluenceProfile {
    pub fn from_per_coord(per_coord: Vec<Dyadic>) -> InfluenceProfile {
        let total = per_coord.iter().copied().sum();
        InfluenceProfile { per_coord, total }
    }

    pub fn n(&self) -> usize {
        self.per_coord.len()
    }

    /// `I_k` for a 1-based coordinate.
    pub fn get(&self, k: usize) -> Dyadic {
        self.per_coord[k - 1]
    }
}

// bits of a word whose index has bit `s` clear, for s < 6
const LOW_HALF: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// Number of edges `{i, i ^ 2^bit}` of the cube along which `f` changes.
fn sensitive_edges(f: &BooleanFunction, bit: usize) -> u64 {
    let words = f.words();
    if bit < 6 {
        let shift = 1 << bit;
        words
            .iter()
            .map(|&w| ((w ^ (w >> shift)) & LOW_HALF[bit]).count_ones() as u64)
            .sum()
    } else {
        let stride = 1 << (bit - 6);
        (0..words.len())
            .filter(|j| j & stride == 0)
            .map(|j| (words[j] ^ words[j + stride]).count_ones() as u64)
            .sum()
    }
}

/// `I_k = P_x[f(x) != f(mu_k(x))]`, counted edge by edge.
pub fn influences_combinatorial(f: &BooleanFunction) -> InfluenceProfile {
    let n = f.n();
    // each sensitive edge contributes two sensitive points out of 2^n
    let per_coord = (0..n)
        .map(|bit| Dyadic::new(2 * sensitive_edges(f, bit) as u128, n as u32))
        .collect();
    InfluenceProfile::from_per_coord(per_coord)
}

/// `I_k = sum_{S contains k} f̂(S)^2`.
pub fn influences_spectral(s: &Spectrum) -> InfluenceProfile {
    let n = s.n();
    let mut sums = vec![0u128; n];
    for mask in 0..s.coeffs().len() {
        let sq = s.squared(mask) as u128;
        if sq == 0 {
            continue;
        }
        let mut rest = mask;
        while rest != 0 {
            sums[rest.trailing_zeros() as usize] += sq;
            rest &= rest - 1;
        }
    }
    let per_coord = sums.into_iter().map(|v| Dyadic::new(v, 2 * n as u32)).collect();
    InfluenceProfile::from_per_coord(per_coord)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::make_family;

    fn fam(s: &str) -> BooleanFunction {
        make_family(&s.parse().unwrap()).unwrap()
    }

    /// Direct O(4^n) evaluation of every coefficient.
    fn brute_coeffs(f: &BooleanFunction) -> Vec<i64> {
        (0..f.len())
            .map(|s| {
                (0..f.len())
                    .map(|x| {
                        let chi = if (x & s).count_ones() % 2 == 0 { 1 } else { -1 };
                        f.value(x) as i64 * chi
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn small_spectra() {
        assert_eq!(wht(&fam("dictator:n=1")).coeffs(), &[0, 2]);
        assert_eq!(wht(&fam("parity:s=2,n=2")).coeffs(), &[0, 0, 0, 4]);
        // majority-of-3: f̂({i}) = 1/2, f̂({1,2,3}) = -1/2, scaled by 8
        let maj = fam("majority:n=3");
        let expected = brute_coeffs(&maj);
        assert_eq!(expected, vec![0, 4, 4, 0, 4, 0, 0, -4]);
        let got: Vec<i64> = wht(&maj).coeffs().iter().map(|&c| c as i64).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn wht_matches_direct_sum() {
        for bits in [0x0u64, 0x96, 0xe8, 0x17, 0xffff, 0x1234] {
            let n = if bits > 0xff { 4 } else { 3 };
            let f = BooleanFunction::from_table_bits(n, bits).unwrap();
            let got: Vec<i64> = wht(&f).coeffs().iter().map(|&c| c as i64).collect();
            assert_eq!(got, brute_coeffs(&f));
        }
    }

    #[test]
    fn influence_examples() {
        let d = influences_combinatorial(&fam("dictator:n=1"));
        assert_eq!(d.per_coord, vec![Dyadic::ONE]);

        let and = influences_combinatorial(&fam("and:n=2"));
        assert_eq!(and.per_coord, vec![Dyadic::new(1, 1); 2]);

        let mb = influences_combinatorial(&fam("minblock:s=3,t=2"));
        assert!(mb.per_coord.iter().all(|&ik| ik == Dyadic::new(1, 2)));

        let par = influences_spectral(&wht(&fam("parity:s=3,n=3")));
        assert_eq!(par.per_coord, vec![Dyadic::ONE; 3]);
        assert_eq!(par.total, Dyadic::integer(3));

        let c = influences_spectral(&wht(&BooleanFunction::constant(4, -1).unwrap()));
        assert!(c.per_coord.iter().all(|ik| ik.is_zero()));

        let maj = influences_spectral(&wht(&fam("majority:n=3")));
        assert_eq!(maj.per_coord, vec![Dyadic::new(1, 1); 3]);
        assert_eq!(maj.total, Dyadic::new(3, 1));
    }

    #[test]
    fn word_level_counting_crosses_word_boundaries() {
        // dictator on the 8th coordinate: bit 7, stride across words
        let f = fam("dictator:n=8,k=8");
        let p = influences_combinatorial(&f);
        assert_eq!(p.get(8), Dyadic::ONE);
        assert!((1..8).all(|k| p.get(k).is_zero()));
    }

    #[test]
    fn partial_transform_gives_restricted_coefficients() {
        let f = fam("majority:n=3");
        let along = CoordSet::from_coords(&[1, 3]).unwrap();
        let values = partial_transform(&f, along);
        for x in [0usize, 2] {
            let r = crate::boolfn::Restriction::at_point(&f, along, x).unwrap();
            let g = wht(&r.function());
            for t in 0..4usize {
                // local mask t -> global mask on coordinates {1,3}
                let global = (t & 1) | ((t >> 1) << 2);
                assert_eq!(values[global | x], g.coeff(t));
            }
        }
    }
}
