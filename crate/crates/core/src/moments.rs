//! Restricted-Fourier ε-moments and the telescoping moment chain.
//!
//! `M_{V,ε}(f) = E_x sum_{S ⊆ V} |f̂_{V^c -> x}(S)|^{2(1+ε)}`. All restricted
//! coefficients for every assignment `x` come out of a single partial
//! transform along `V` (see [`partial_transform`]), so one moment costs
//! `O(2^n (|V| + 1))` integer work plus one `exp`/`ln` per nonzero entry.
//! The chain adds one coordinate at a time and therefore needs a single
//! butterfly pass per step.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::boolfn::{check_permutation, BooleanFunction};
use crate::coords::CoordSet;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, serialize_real, serialize_reals, CompensatedSum};
use crate::spectrum::{
    butterfly_pass, influences_combinatorial, partial_transform, signed_table, wht, InfluenceProfile,
};

/// Largest dimension [`chain`] accepts without an explicit cap.
pub const DEFAULT_CHAIN_MAX_N: usize = 16;

/// Default step for [`entropy_via_derivative`].
pub const DEFAULT_DERIVATIVE_STEP: f64 = 1e-5;

/// `{0.01 k : k = 1..49}`.
pub fn default_eps_grid() -> Vec<f64> {
    (1..=49).map(|k| k as f64 / 100.0).collect()
}

fn check_eps(eps: f64) -> Result<()> {
    if (0.0..0.5).contains(&eps) {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange { eps, range: "[0, 1/2)" })
    }
}

fn check_eps_open(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 0.5 {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange { eps, range: "(0, 1/2)" })
    }
}

/// Moment from partially transformed values: `values` are `2^dim` times the
/// restricted coefficients, one block of `2^dim` entries per assignment.
fn moment_from_values(values: &[i32], n: usize, dim: usize, eps: f64) -> f64 {
    let scale = (-2.0 * dim as f64).exp2();
    let sum: CompensatedSum = values
        .iter()
        .filter(|&&c| c != 0)
        .map(|&c| {
            // c^2 < 2^53, so w is the exact squared coefficient
            let w = (c as i64 * c as i64) as f64 * scale;
            w * w.powf(eps)
        })
        .collect();
    sum.value() / ((n - dim) as f64).exp2()
}

fn check_subset(f: &BooleanFunction, v: CoordSet) -> Result<()> {
    v.check_within(f.n())
}

/// `M_{V,ε}(f)` by exact enumeration of all restrictions to `V`.
pub fn moment(f: &BooleanFunction, v: CoordSet, eps: f64) -> Result<f64> {
    check_subset(f, v)?;
    check_eps(eps)?;
    let values = partial_transform(f, v);
    Ok(moment_from_values(&values, f.n(), v.len(), eps))
}

/// `M_{V,ε}` sampled over an ε grid.
#[derive(Clone, Debug, Serialize)]
pub struct MomentCurve {
    pub v: CoordSet,
    #[serde(serialize_with = "serialize_reals")]
    pub eps_grid: Vec<f64>,
    #[serde(serialize_with = "serialize_reals")]
    pub values: Vec<f64>,
}

pub fn moment_curve(f: &BooleanFunction, v: CoordSet, eps_grid: &[f64]) -> Result<MomentCurve> {
    check_subset(f, v)?;
    for &eps in eps_grid {
        check_eps(eps)?;
    }
    if eps_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("ε grid must be strictly increasing".into()));
    }
    let values = partial_transform(f, v);
    let curve = eps_grid.iter().map(|&eps| moment_from_values(&values, f.n(), v.len(), eps)).collect();
    Ok(MomentCurve { v, eps_grid: eps_grid.to_vec(), values: curve })
}

/// Both sides of the restricted-influence identity
/// `E_x sum_{k ∈ S ⊆ J} f̂_{J^c -> x}(S)^2 = I_k(f)`, each computed exactly.
pub fn verify_lemma22(f: &BooleanFunction, j: CoordSet, k: usize) -> Result<(Dyadic, Dyadic)> {
    check_subset(f, j)?;
    if !j.contains(k) {
        return Err(Error::InvalidParameter(format!("coordinate {k} is not in J = {j}")));
    }
    let values = partial_transform(f, j);
    let bit = 1usize << (k - 1);
    let sum: u128 = values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i & bit != 0)
        .map(|(_, &c)| (c as i64 * c as i64) as u128)
        .sum();
    // each value is 2^|J| f̂, averaged over 2^(n-|J|) assignments
    let lhs = Dyadic::new(sum, (f.n() + j.len()) as u32);
    let rhs = influences_combinatorial(f).get(k);
    Ok((lhs, rhs))
}

/// The per-step lower bound `-I_k (3ε + 2ε² + (I_k/4)^(-ε) - 1)`, `0` when `I_k = 0`.
pub fn step_floor(influence: f64, eps: f64) -> f64 {
    if influence == 0.0 {
        0.0
    } else {
        -influence * (3.0 * eps + 2.0 * eps * eps + (influence / 4.0).powf(-eps) - 1.0)
    }
}

/// `1 - (3ε + 2ε²) I - sum_k ((I_k/4)^(-ε) - 1) I_k`.
pub fn telescoped_floor(profile: &InfluenceProfile, eps: f64) -> f64 {
    let linear = (3.0 * eps + 2.0 * eps * eps) * profile.total.to_f64();
    let tail = compensated_sum(profile.per_coord.iter().map(|ik| {
        let v = ik.to_f64();
        if v == 0.0 {
            0.0
        } else {
            ((v / 4.0).powf(-eps) - 1.0) * v
        }
    }));
    1.0 - linear - tail
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainStep {
    /// Coordinate added at this step.
    pub coordinate: usize,
    #[serde(serialize_with = "serialize_real")]
    pub moment: f64,
    #[serde(serialize_with = "serialize_real")]
    pub delta: f64,
    #[serde(serialize_with = "serialize_real")]
    pub floor: f64,
}

impl ChainStep {
    pub fn margin(&self) -> f64 {
        self.delta - self.floor
    }
}

/// Moments along `∅ ⊂ {σ(1)} ⊂ {σ(1), σ(2)} ⊂ ...` with their per-step floors.
#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    #[serde(serialize_with = "serialize_real")]
    pub eps: f64,
    pub order: Vec<usize>,
    pub steps: Vec<ChainStep>,
    #[serde(rename = "final", serialize_with = "serialize_real")]
    pub final_moment: f64,
    #[serde(serialize_with = "serialize_real")]
    pub telescoped_floor: f64,
}

impl ChainReport {
    /// Steps (1-based positions in the chain) where `delta < floor - tol`.
    pub fn violations(&self, tol: f64) -> Vec<usize> {
        self.steps
            .iter()
            .enumerate()
            .filter(|(_, s)| s.margin() < -tol)
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn final_holds(&self, tol: f64) -> bool {
        self.final_moment >= self.telescoped_floor - tol
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.violations(tol).is_empty() && self.final_holds(tol)
    }
}

/// The moment chain with the default dimension cap.
pub fn chain(f: &BooleanFunction, eps: f64, order: Option<&[usize]>) -> Result<ChainReport> {
    chain_with_cap(f, eps, order, DEFAULT_CHAIN_MAX_N)
}

pub fn chain_with_cap(
    f: &BooleanFunction,
    eps: f64,
    order: Option<&[usize]>,
    cap: usize,
) -> Result<ChainReport> {
    check_eps_open(eps)?;
    let n = f.n();
    if n > cap {
        return Err(Error::ChainTooLarge { n, cap });
    }
    let order: Vec<usize> = match order {
        Some(o) => {
            check_permutation(o, n)?;
            o.to_vec()
        }
        None => (1..=n).collect(),
    };
    let profile = influences_combinatorial(f);
    let mut values = signed_table(f);
    let mut prev = moment_from_values(&values, n, 0, eps);
    let mut steps = Vec::with_capacity(n);
    for (dim, &k) in order.iter().enumerate() {
        butterfly_pass(&mut values, k - 1);
        let m = moment_from_values(&values, n, dim + 1, eps);
        steps.push(ChainStep {
            coordinate: k,
            moment: m,
            delta: m - prev,
            floor: step_floor(profile.get(k).to_f64(), eps),
        });
        prev = m;
    }
    Ok(ChainReport {
        eps,
        order,
        steps,
        final_moment: prev,
        telescoped_floor: telescoped_floor(&profile, eps),
    })
}

/// `(M_{[n],h} - M_{[n],0}) / h`, summed as `sum_S w (w^h - 1) / h` so the
/// difference never cancels.
fn forward_difference(weights: &[f64], h: f64) -> f64 {
    compensated_sum(weights.iter().map(|&w| w * (h * w.ln()).exp_m1())) / h
}

/// Entropy in bits from `-(1/ln 2) dM_{[n],ε}/dε` at `ε = 0`.
///
/// One-sided differences at `h` and `h/2` combined by one Richardson step,
/// which leaves an `O(h^2 ln^3 w_min)` error where `w_min` is the smallest
/// nonzero squared coefficient (at least `4^-n` for functions with nonzero
/// coefficients on that scale).
pub fn entropy_via_derivative(f: &BooleanFunction, h: f64) -> Result<f64> {
    if !(h > 0.0 && h <= 1e-3) {
        return Err(Error::StepOutOfRange(h));
    }
    let s = wht(f);
    let weights: Vec<f64> = (0..s.coeffs().len())
        .filter(|&m| s.squared(m) != 0)
        .map(|m| s.weight(m))
        .collect();
    let coarse = forward_difference(&weights, h);
    let fine = forward_difference(&weights, h / 2.0);
    let derivative = 2.0 * fine - coarse;
    Ok(-derivative / LN_2)
}
