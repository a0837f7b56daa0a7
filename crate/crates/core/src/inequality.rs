//! Scalar inequality checks and the correlation functionals built on
//! neighbouring Fourier coefficients.
//!
//! The scalar side compares, for `0 <= a <= b <= 1` and `ε ∈ (0, 1/2)`,
//!
//! ```text
//! L(a, b, ε) = ((√b + √a)^(2+2ε) + (√b - √a)^(2+2ε)) / 2 - a^(1+ε) - b^(1+ε)
//! ```
//!
//! against the upper bound `(3ε + 2ε²) a + (b^ε - a^ε) a` and the lower bound
//! `(b^ε - a^ε) a`. Both gaps are summed with compensation so that a
//! `-1e-12` violation threshold is meaningful near `ε -> 0` and `a -> b`.

use std::f64::consts::E;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::boolfn::BooleanFunction;
use crate::coords::CoordSet;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, serialize_real, CompensatedSum};
use crate::spectrum::{partial_transform, Spectrum};

/// Gaps below this count as violations.
pub const SCALAR_TOLERANCE: f64 = 1e-12;

fn check_scalar_args(a: f64, b: f64, eps: f64) -> Result<()> {
    if !(0.0 <= a && a <= b && b <= 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 <= a <= b <= 1, got a={a}, b={b}")));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::EpsilonOutOfRange { eps, range: "(0, 1/2)" });
    }
    Ok(())
}

/// The four terms of `L(a, b, ε)`, signed.
fn lhs_terms(a: f64, b: f64, eps: f64) -> [f64; 4] {
    let p = 2.0 * (1.0 + eps);
    let (ra, rb) = (a.sqrt(), b.sqrt());
    [
        0.5 * (rb + ra).powf(p),
        0.5 * (rb - ra).powf(p),
        -a.powf(1.0 + eps),
        -b.powf(1.0 + eps),
    ]
}

/// `L(a, b, ε)`.
pub fn binomial_lhs(a: f64, b: f64, eps: f64) -> Result<f64> {
    check_scalar_args(a, b, eps)?;
    if a == 0.0 {
        return Ok(0.0);
    }
    Ok(compensated_sum(lhs_terms(a, b, eps)))
}

/// `(3ε + 2ε²) a + (b^ε - a^ε) a - L(a, b, ε)`; non-negative by the upper bound.
pub fn lemma24_gap(a: f64, b: f64, eps: f64) -> Result<f64> {
    check_scalar_args(a, b, eps)?;
    if a == 0.0 {
        // both sides vanish
        return Ok(0.0);
    }
    let rhs = [(3.0 * eps + 2.0 * eps * eps) * a, b.powf(eps) * a, -a.powf(eps) * a];
    let lhs = lhs_terms(a, b, eps);
    Ok(compensated_sum(rhs.into_iter().chain(lhs.into_iter().map(|t| -t))))
}

/// `L(a, b, ε) - (b^ε - a^ε) a`; non-negative by the lower bound.
pub fn eq27_gap(a: f64, b: f64, eps: f64) -> Result<f64> {
    check_scalar_args(a, b, eps)?;
    if a == 0.0 {
        return Ok(0.0);
    }
    let bound = [-b.powf(eps) * a, a.powf(eps) * a];
    Ok(compensated_sum(lhs_terms(a, b, eps).into_iter().chain(bound)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarInequality {
    /// Upper bound on `L(a, b, ε)`.
    Lemma24,
    /// Lower bound on `L(a, b, ε)`.
    Eq27,
}

impl ScalarInequality {
    pub fn gap(self, a: f64, b: f64, eps: f64) -> Result<f64> {
        match self {
            ScalarInequality::Lemma24 => lemma24_gap(a, b, eps),
            ScalarInequality::Eq27 => eq27_gap(a, b, eps),
        }
    }
}

/// An `(a, b)` grid on `a <= b` crossed with a list of ε values.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarGridSpec {
    /// Number of grid points for `a` on `[0, 1]`, endpoints included.
    pub a_steps: usize,
    pub b_steps: usize,
    pub eps_list: Vec<f64>,
}

impl ScalarGridSpec {
    pub fn square(points: usize, eps_list: Vec<f64>) -> ScalarGridSpec {
        ScalarGridSpec { a_steps: points, b_steps: points, eps_list }
    }

    /// Grid pairs with `a <= b`. Every `b` also gets `a = 0` and `a = b`,
    /// and `b = 1` is always present.
    pub fn pairs(&self) -> Result<Vec<(f64, f64)>> {
        if self.a_steps < 2 || self.b_steps < 2 {
            return Err(Error::InvalidParameter("grids need at least 2 points".into()));
        }
        let a_grid: Vec<f64> = (0..self.a_steps).map(|i| i as f64 / (self.a_steps - 1) as f64).collect();
        let mut pairs = Vec::new();
        for j in 0..self.b_steps {
            let b = j as f64 / (self.b_steps - 1) as f64;
            let mut has_diagonal = false;
            for &a in a_grid.iter().take_while(|&&a| a <= b) {
                has_diagonal |= a == b;
                pairs.push((a, b));
            }
            if !has_diagonal {
                pairs.push((b, b));
            }
        }
        Ok(pairs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalarPoint {
    #[serde(serialize_with = "serialize_real")]
    pub a: f64,
    #[serde(serialize_with = "serialize_real")]
    pub b: f64,
    #[serde(serialize_with = "serialize_real")]
    pub eps: f64,
    #[serde(serialize_with = "serialize_real")]
    pub gap: f64,
}

/// Outcome of a scalar sweep. Only the first few violations are kept.
#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub inequality: ScalarInequality,
    pub checked: u64,
    pub violation_count: u64,
    pub violations: Vec<ScalarPoint>,
    /// Point with the smallest gap.
    pub tightest: Option<ScalarPoint>,
}

const KEPT_VIOLATIONS: usize = 16;

impl SweepReport {
    fn empty(inequality: ScalarInequality) -> SweepReport {
        SweepReport { inequality, checked: 0, violation_count: 0, violations: Vec::new(), tightest: None }
    }

    fn record(&mut self, point: ScalarPoint) {
        self.checked += 1;
        if point.gap < -SCALAR_TOLERANCE {
            self.violation_count += 1;
            if self.violations.len() < KEPT_VIOLATIONS {
                self.violations.push(point);
            }
        }
        if self.tightest.is_none_or(|t| point.gap < t.gap) {
            self.tightest = Some(point);
        }
    }

    fn merge(mut self, other: SweepReport) -> SweepReport {
        self.checked += other.checked;
        self.violation_count += other.violation_count;
        for v in other.violations {
            if self.violations.len() < KEPT_VIOLATIONS {
                self.violations.push(v);
            }
        }
        if let Some(t) = other.tightest {
            if self.tightest.is_none_or(|s| t.gap < s.gap) {
                self.tightest = Some(t);
            }
        }
        self
    }

    pub fn ok(&self) -> bool {
        self.violation_count == 0
    }
}

/// Checks an inequality on every grid point; ε values run in parallel and
/// are merged in list order.
pub fn grid_sweep(inequality: ScalarInequality, spec: &ScalarGridSpec) -> Result<SweepReport> {
    let pairs = spec.pairs()?;
    let parts = spec
        .eps_list
        .par_iter()
        .map(|&eps| {
            let mut report = SweepReport::empty(inequality);
            for &(a, b) in &pairs {
                let gap = inequality.gap(a, b, eps)?;
                report.record(ScalarPoint { a, b, eps, gap });
            }
            Ok(report)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().fold(SweepReport::empty(inequality), SweepReport::merge))
}

/// Checks `count` random triples: `a, b` uniform on `[0, 1]` (sorted) and ε
/// uniform on `(0, 1/2)`.
pub fn random_sweep(inequality: ScalarInequality, count: u64, seed: u64) -> Result<SweepReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SweepReport::empty(inequality);
    for _ in 0..count {
        let (x, y): (f64, f64) = (rng.gen(), rng.gen());
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        let eps = loop {
            let e: f64 = rng.gen_range(0.0..0.5);
            if e > 0.0 {
                break e;
            }
        };
        let gap = inequality.gap(a, b, eps)?;
        report.record(ScalarPoint { a, b, eps, gap });
    }
    Ok(report)
}

fn serialize_ratio<S: Serializer>(r: &Option<Ratio<i128>>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.collect_str(r),
        None => s.serialize_none(),
    }
}

fn ratio_to_f64(r: &Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Per-coordinate entry of a [`Q31Report`].
#[derive(Clone, Debug, Serialize)]
pub struct Q31Coord {
    pub k: usize,
    /// `N_k = sum_{S not containing k} |f̂(S) f̂(S ∪ {k})|`.
    pub numerator: Dyadic,
    pub influence: Dyadic,
    /// `N_k / I_k`, absent when `I_k = 0`.
    #[serde(serialize_with = "serialize_ratio")]
    pub ratio: Option<Ratio<i128>>,
    #[serde(serialize_with = "crate::numeric::serialize_opt_real")]
    pub ratio_f64: Option<f64>,
    /// `N_k^2 <= I_k * sum_{S not containing k} f̂(S)^2`, checked exactly.
    pub cauchy_schwarz_ok: bool,
}

/// Neighbouring-coefficient correlations against influences, per coordinate.
#[derive(Clone, Debug, Serialize)]
pub struct Q31Report {
    pub n: usize,
    pub per_coord: Vec<Q31Coord>,
    /// Smallest ratio over coordinates with `I_k > 0`.
    #[serde(serialize_with = "serialize_ratio")]
    pub best: Option<Ratio<i128>>,
    #[serde(serialize_with = "serialize_ratio")]
    pub worst: Option<Ratio<i128>>,
}

impl Q31Report {
    pub fn best_f64(&self) -> Option<f64> {
        self.best.as_ref().map(ratio_to_f64)
    }

    pub fn worst_f64(&self) -> Option<f64> {
        self.worst.as_ref().map(ratio_to_f64)
    }
}

pub fn q31_report(s: &Spectrum) -> Q31Report {
    let n = s.n();
    let coeffs = s.coeffs();
    let per_coord: Vec<Q31Coord> = (1..=n)
        .map(|k| {
            let bit = 1usize << (k - 1);
            let (mut cross, mut inside, mut outside) = (0u128, 0u128, 0u128);
            for mask in (0..coeffs.len()).filter(|m| m & bit == 0) {
                let (lo, hi) = (coeffs[mask] as i64, coeffs[mask | bit] as i64);
                cross += (lo * hi).unsigned_abs() as u128;
                outside += (lo * lo) as u128;
                inside += (hi * hi) as u128;
            }
            let ratio = (inside != 0).then(|| Ratio::new(cross as i128, inside as i128));
            Q31Coord {
                k,
                numerator: Dyadic::new(cross, 2 * n as u32),
                influence: Dyadic::new(inside, 2 * n as u32),
                ratio_f64: ratio.as_ref().map(ratio_to_f64),
                ratio,
                cauchy_schwarz_ok: cross * cross <= inside * outside,
            }
        })
        .collect();
    let ratios = || per_coord.iter().filter_map(|c| c.ratio);
    Q31Report { n, best: ratios().min(), worst: ratios().max(), per_coord }
}

/// The log-ratio functional `E_x sum_{S ⊆ V1} a log(b / a)` for one
/// coordinate `k`, with the quantities it is compared against.
#[derive(Clone, Debug, Serialize)]
pub struct LogRatioReport {
    pub v1: CoordSet,
    pub k: usize,
    /// The functional itself (natural log; terms with `a = 0` or `b = 0` are 0).
    #[serde(serialize_with = "serialize_real")]
    pub value: f64,
    /// `E_x sum sqrt(a b)`, which dominates `value` termwise.
    #[serde(serialize_with = "serialize_real")]
    pub sqrt_majorant: f64,
    pub sqrt_majorant_exact: Dyadic,
    #[serde(serialize_with = "serialize_real")]
    pub sum_a: f64,
    #[serde(serialize_with = "serialize_real")]
    pub sum_b: f64,
    pub influence: Dyadic,
    /// `I_k ln(e / I_k)` (0 when `I_k = 0`).
    #[serde(serialize_with = "serialize_real")]
    pub jensen_cap: f64,
}

/// Evaluates the log-ratio functional by enumerating every restriction to
/// `V2 = V1 ∪ {k}`; `a` and `b` are the smaller and larger of the squared
/// coefficients at `S` and `S ∪ {k}`.
pub fn log_ratio_functional(f: &BooleanFunction, v1: CoordSet, k: usize) -> Result<LogRatioReport> {
    let n = f.n();
    if k == 0 || k > n {
        return Err(Error::CoordinateOutOfRange { k, n });
    }
    if v1.contains(k) {
        return Err(Error::InvalidParameter(format!("coordinate {k} already in V1 = {v1}")));
    }
    v1.check_within(n)?;
    let v2 = v1.insert(k);
    let values = partial_transform(f, v2);
    let dim = v2.len();
    let bit = 1usize << (k - 1);
    let scale = (2.0 * dim as f64).exp2();
    let (mut value, mut sum_a, mut sum_b) =
        (CompensatedSum::default(), CompensatedSum::default(), CompensatedSum::default());
    let mut cross = 0u128;
    for i in (0..values.len()).filter(|i| i & bit == 0) {
        let (lo, hi) = (values[i] as i64, values[i | bit] as i64);
        let (sq_lo, sq_hi) = ((lo * lo) as u64, (hi * hi) as u64);
        let (a, b) = (sq_lo.min(sq_hi), sq_lo.max(sq_hi));
        cross += (lo * hi).unsigned_abs() as u128;
        let (a, b) = (a as f64 / scale, b as f64 / scale);
        sum_a.add(a);
        sum_b.add(b);
        if a > 0.0 {
            value.add(a * (b / a).ln());
        }
    }
    let assignments = ((n - dim) as f64).exp2();
    let sqrt_majorant_exact = Dyadic::new(cross, (n + dim) as u32);
    let influence = crate::spectrum::influences_combinatorial(f).get(k);
    let ik = influence.to_f64();
    Ok(LogRatioReport {
        v1,
        k,
        value: value.value() / assignments,
        sqrt_majorant: sqrt_majorant_exact.to_f64(),
        sqrt_majorant_exact,
        sum_a: sum_a.value() / assignments,
        sum_b: sum_b.value() / assignments,
        influence,
        jensen_cap: if ik == 0.0 { 0.0 } else { ik * (E / ik).ln() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::make_family;
    use crate::spectrum::wht;

    fn fam(s: &str) -> BooleanFunction {
        make_family(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn lemma24_examples() {
        assert_eq!(lemma24_gap(0.0, 0.7, 0.3).unwrap(), 0.0);
        assert_eq!(binomial_lhs(0.0, 0.7, 0.3).unwrap(), 0.0);
        let lhs = binomial_lhs(1.0, 1.0, 0.1).unwrap();
        assert!((lhs - (2f64.powf(1.2) - 2.0)).abs() < 1e-15);
        assert!((lhs - 0.29739).abs() < 1e-5);
        let gap = lemma24_gap(1.0, 1.0, 0.1).unwrap();
        assert!((gap - (0.32 - lhs)).abs() < 1e-15);
        assert!((gap - 0.02261).abs() < 1e-5);
        let tiny = lemma24_gap(1.0, 1.0, 1e-9).unwrap();
        assert!((0.0..1e-8).contains(&tiny), "{tiny}");
    }

    #[test]
    fn eq27_examples() {
        assert_eq!(eq27_gap(0.0, 0.4, 0.2).unwrap(), 0.0);
        let g = eq27_gap(1.0, 1.0, 0.25).unwrap();
        assert!((g - (2f64.powf(1.5) - 2.0)).abs() < 1e-15);
        assert!((g - 0.82843).abs() < 1e-5);
        assert!(eq27_gap(0.25, 1.0, 0.1).unwrap() >= 0.0);
    }

    #[test]
    fn scalar_argument_checks() {
        assert!(lemma24_gap(0.5, 0.4, 0.1).is_err());
        assert!(lemma24_gap(0.1, 1.1, 0.1).is_err());
        assert!(lemma24_gap(-0.1, 0.4, 0.1).is_err());
        assert!(eq27_gap(0.1, 0.4, 0.0).is_err());
        assert!(eq27_gap(0.1, 0.4, 0.5).is_err());
        assert!(eq27_gap(f64::NAN, 0.4, 0.1).is_err());
    }

    #[test]
    fn grid_contains_boundaries() {
        let spec = ScalarGridSpec { a_steps: 3, b_steps: 4, eps_list: vec![0.1] };
        let pairs = spec.pairs().unwrap();
        assert!(pairs.contains(&(0.0, 1.0)));
        assert!(pairs.contains(&(1.0, 1.0)));
        assert!(pairs.contains(&(1.0 / 3.0, 1.0 / 3.0)));
        assert!(pairs.iter().all(|&(a, b)| a <= b));
        assert!(ScalarGridSpec::square(1, vec![0.1]).pairs().is_err());
    }

    #[test]
    fn small_sweeps_pass() {
        let spec = ScalarGridSpec::square(21, vec![0.01, 0.25, 0.49]);
        for ineq in [ScalarInequality::Lemma24, ScalarInequality::Eq27] {
            let r = grid_sweep(ineq, &spec).unwrap();
            assert!(r.ok(), "{r:?}");
            assert_eq!(r.checked, 3 * 231);
            assert!(random_sweep(ineq, 500, 3).unwrap().ok());
        }
    }

    #[test]
    fn q31_and_examples() {
        let two = q31_report(&wht(&fam("and:n=2")));
        for c in &two.per_coord {
            assert_eq!(c.numerator, Dyadic::new(1, 1));
            assert_eq!(c.influence, Dyadic::new(1, 1));
            assert_eq!(c.ratio, Some(Ratio::from_integer(1)));
        }
        let four = q31_report(&wht(&fam("and:n=4")));
        assert!(four.per_coord.iter().all(|c| c.ratio == Some(Ratio::new(7, 4))));
        assert_eq!(four.best, Some(Ratio::new(7, 4)));
    }

    #[test]
    fn q31_and_matches_hand_count() {
        // f̂(∅) = -1 + 2^(1-n), f̂(S) = 2^(1-n) otherwise, n = 3, scaled by 8
        let r = q31_report(&wht(&fam("and:n=3")));
        let (empty, other) = (6i64, 2i64);
        // pairs (S, S+k): one pair with S = ∅, three with S nonempty
        let cross = (empty * other + 3 * other * other) as u128;
        let inside = 4 * (other * other) as u128;
        assert!(r.per_coord.iter().all(|c| c.ratio == Some(Ratio::new(cross as i128, inside as i128))));
        assert_eq!(r.best, Some(Ratio::new(3, 2)));
    }

    #[test]
    fn q31_parity_has_zero_ratio() {
        let r = q31_report(&wht(&fam("parity:s=3,n=3")));
        for c in &r.per_coord {
            assert!(c.numerator.is_zero());
            assert_eq!(c.ratio, Some(Ratio::from_integer(0)));
        }
        let c = q31_report(&wht(&BooleanFunction::constant(2, 1).unwrap()));
        assert!(c.best.is_none() && c.per_coord.iter().all(|c| c.ratio.is_none()));
    }

    #[test]
    fn log_ratio_examples() {
        let p = fam("parity:s=3,n=3");
        for k in 1..=3 {
            let v1 = CoordSet::full(3).remove(k);
            let r = log_ratio_functional(&p, v1, k).unwrap();
            assert_eq!(r.value, 0.0);
        }
        let c = BooleanFunction::constant(3, 1).unwrap();
        assert_eq!(log_ratio_functional(&c, CoordSet::EMPTY, 2).unwrap().value, 0.0);

        let maj = fam("majority:n=3");
        let v1 = CoordSet::from_coords(&[1]).unwrap();
        let r = log_ratio_functional(&maj, v1, 2).unwrap();
        assert!(r.value <= r.sqrt_majorant);
        assert!((r.value - brute_log_ratio(&maj, v1, 2)).abs() < 1e-14);
        assert!(r.value <= r.jensen_cap + 1e-9);
        assert!(log_ratio_functional(&maj, v1, 1).is_err());
        assert!(log_ratio_functional(&maj, v1, 4).is_err());
    }

    /// Enumerates explicit restrictions with per-restriction transforms.
    fn brute_log_ratio(f: &BooleanFunction, v1: CoordSet, k: usize) -> f64 {
        let v2 = v1.insert(k);
        let free: Vec<usize> = v2.iter().collect();
        let local_k = free.iter().position(|&c| c == k).unwrap();
        let mut total = 0.0;
        let mut count = 0.0;
        for x in (0..f.len()).filter(|x| x & v2.mask() as usize == 0) {
            count += 1.0;
            let g = crate::boolfn::Restriction::at_point(f, v2, x).unwrap().function();
            let s = wht(&g);
            for t in (0..g.len()).filter(|t| t >> local_k & 1 == 0) {
                let (x1, x2) = (s.weight(t), s.weight(t | 1 << local_k));
                let (a, b) = (x1.min(x2), x1.max(x2));
                if a > 0.0 {
                    total += a * (b / a).ln();
                }
            }
        }
        total / count
    }

    #[test]
    fn full_v1_majorant_is_q31_numerator() {
        let f = BooleanFunction::from_table_bits(4, 0x3c5a).unwrap();
        let q = q31_report(&wht(&f));
        for k in 1..=4 {
            let r = log_ratio_functional(&f, CoordSet::full(4).remove(k), k).unwrap();
            assert_eq!(r.sqrt_majorant_exact, q.per_coord[k - 1].numerator);
        }
    }
}
