//! Fourier entropy, min-entropy, spectral concentration and the explicit
//! influence bounds.
//!
//! Entropies, the influence term sum and the Jensen cap are in bits. The
//! theorem bound keeps natural logarithms inside and converts once:
//! `(3 I + sum_k I_k ln(4 / I_k)) / ln 2`. Every `0 * log(1/0)` is `0`.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::boolfn::BooleanFunction;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, serialize_opt_real, serialize_real};
use crate::spectrum::{influences_spectral, wht, InfluenceProfile, Spectrum};

/// `Ent(f) = sum_S f̂(S)^2 log2(1 / f̂(S)^2)`, over nonzero coefficients.
pub fn fourier_entropy(s: &Spectrum) -> f64 {
    let two_n = 2.0 * s.n() as f64;
    compensated_sum((0..s.coeffs().len()).filter_map(|mask| {
        let sq = s.squared(mask);
        (sq != 0).then(|| {
            let sq = sq as f64;
            // f̂^2 = sq / 4^n, so log2(1/f̂^2) = 2n - log2(sq)
            sq / two_n.exp2() * (two_n - sq.log2())
        })
    }))
}

/// `log2(1 / max_S f̂(S)^2)`.
pub fn min_entropy(s: &Spectrum) -> f64 {
    let max_sq = (0..s.coeffs().len()).map(|m| s.squared(m)).max().unwrap_or(0);
    2.0 * s.n() as f64 - (max_sq as f64).log2()
}

/// Smallest `m` such that the `m` largest squared coefficients carry at least
/// `1 - delta` of the mass. Ties sort by mask, smaller first.
pub fn concentration_count(s: &Spectrum, delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    let mut order: Vec<(u64, usize)> = (0..s.coeffs().len())
        .map(|m| (s.squared(m), m))
        .filter(|&(sq, _)| sq != 0)
        .collect();
    order.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let target = (1.0 - delta) * (2.0 * s.n() as f64).exp2();
    let mut acc = 0u128;
    for (m, &(sq, _)) in order.iter().enumerate() {
        acc += sq as u128;
        if acc as f64 >= target {
            return Ok(m + 1);
        }
    }
    Ok(order.len())
}

fn plogp_terms(p: &InfluenceProfile, scale: f64) -> impl Iterator<Item = f64> + '_ {
    p.per_coord.iter().map(move |ik| {
        let v = ik.to_f64();
        if v == 0.0 {
            0.0
        } else {
            v * (scale / v).ln()
        }
    })
}

/// `sum_k I_k log2(1 / I_k)`.
pub fn term_sum_bits(p: &InfluenceProfile) -> f64 {
    compensated_sum(plogp_terms(p, 1.0)) / LN_2
}

/// `(3 I + sum_k I_k ln(4 / I_k)) / ln 2`.
pub fn theorem_bound(p: &InfluenceProfile) -> f64 {
    let sum = compensated_sum(plogp_terms(p, 4.0));
    (3.0 * p.total.to_f64() + sum) / LN_2
}

/// The theorem bound with its single largest `I_k ln(4 / I_k)` term removed.
pub fn drop_one_bound(p: &InfluenceProfile) -> f64 {
    let terms: Vec<f64> = plogp_terms(p, 4.0).collect();
    let largest = terms
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i);
    let kept = terms.iter().enumerate().filter(|&(i, _)| Some(i) != largest).map(|(_, &t)| t);
    (3.0 * p.total.to_f64() + compensated_sum(kept)) / LN_2
}

/// `I log2(n / I)`; `None` for constant functions.
pub fn jensen_cap(p: &InfluenceProfile, n: usize) -> Option<f64> {
    (!p.total.is_zero()).then(|| {
        let total = p.total.to_f64();
        total * (n as f64 / total).log2()
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationRow {
    #[serde(serialize_with = "serialize_real")]
    pub delta: f64,
    pub count: usize,
}

/// Spectral summary of one function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub n: usize,
    #[serde(serialize_with = "serialize_real")]
    pub entropy_bits: f64,
    #[serde(serialize_with = "serialize_real")]
    pub min_entropy_bits: f64,
    pub influence_total: Dyadic,
    pub influences: Vec<Dyadic>,
    #[serde(serialize_with = "serialize_real")]
    pub term_sum_bits: f64,
    #[serde(serialize_with = "serialize_real")]
    pub bound_bits: f64,
    #[serde(serialize_with = "serialize_real")]
    pub bound_drop_one_bits: f64,
    #[serde(serialize_with = "serialize_opt_real")]
    pub jensen_cap_bits: Option<f64>,
    pub concentration: Vec<ConcentrationRow>,
}

impl AnalysisReport {
    pub fn from_spectrum(s: &Spectrum, deltas: &[f64]) -> Result<AnalysisReport> {
        let profile = influences_spectral(s);
        let concentration = deltas
            .iter()
            .map(|&delta| Ok(ConcentrationRow { delta, count: concentration_count(s, delta)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(AnalysisReport {
            n: s.n(),
            entropy_bits: fourier_entropy(s),
            min_entropy_bits: min_entropy(s),
            influence_total: profile.total,
            term_sum_bits: term_sum_bits(&profile),
            bound_bits: theorem_bound(&profile),
            bound_drop_one_bits: drop_one_bound(&profile),
            jensen_cap_bits: jensen_cap(&profile, s.n()),
            influences: profile.per_coord,
            concentration,
        })
    }

    /// `bound_bits - entropy_bits`.
    pub fn slack_bits(&self) -> f64 {
        self.bound_bits - self.entropy_bits
    }
}

pub fn analyze(f: &BooleanFunction, deltas: &[f64]) -> Result<AnalysisReport> {
    AnalysisReport::from_spectrum(&wht(f), deltas)
}
