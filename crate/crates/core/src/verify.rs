//! Seeded random and exhaustive harnesses for the identities and
//! inequalities behind the entropy bound.
//!
//! Instance `i` of every random harness draws from its own ChaCha8 stream, so
//! results are identical for any worker count.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::boolfn::BooleanFunction;
use crate::coords::CoordSet;
use crate::dyadic::Dyadic;
use crate::entropy::{drop_one_bound, fourier_entropy, min_entropy, theorem_bound};
use crate::error::{Error, Result};
use crate::moments::chain;
use crate::numeric::{serialize_opt_real, serialize_real, serialize_reals};
use crate::spectrum::{influences_combinatorial, influences_spectral, wht};

/// Tolerance for the chain inequalities.
pub const CHAIN_TOLERANCE: f64 = 1e-9;
/// Tolerance for the entropy bounds.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// The ε values used by [`lemma31_random`] by default.
pub const LEMMA31_EPS: [f64; 7] = [0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.49];

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionRef {
    pub n: usize,
    pub hex: String,
}

impl From<&BooleanFunction> for FunctionRef {
    fn from(f: &BooleanFunction) -> FunctionRef {
        FunctionRef { n: f.n(), hex: f.to_hex() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma22Case {
    pub function: FunctionRef,
    pub j: CoordSet,
    pub k: usize,
    pub lhs: Dyadic,
    pub rhs: Dyadic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma22Summary {
    pub instances: u64,
    pub mismatches: u64,
    pub first_mismatch: Option<Lemma22Case>,
}

impl Lemma22Summary {
    pub fn ok(&self) -> bool {
        self.mismatches == 0
    }
}

/// Random `(f, J, k)` with `n` uniform in `1..=max_n`, `k` uniform and `J`
/// a uniform subset containing `k`. Both sides are compared exactly.
pub fn lemma22_random(count: u64, max_n: usize, seed: u64) -> Result<Lemma22Summary> {
    check_max_n(max_n, crate::MAX_DIMENSION)?;
    let cases = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let n = rng.gen_range(1..=max_n);
            let f = BooleanFunction::random(n, &mut rng)?;
            let k = rng.gen_range(1..=n);
            let others: u32 = rng.gen_range(0..1u32 << n) & CoordSet::full(n).mask();
            let j = CoordSet::from_mask(others).insert(k);
            let (lhs, rhs) = crate::moments::verify_lemma22(&f, j, k)?;
            Ok((lhs != rhs).then(|| Lemma22Case { function: (&f).into(), j, k, lhs, rhs }))
        })
        .collect::<Result<Vec<_>>>()?;
    let mismatches: Vec<_> = cases.into_iter().flatten().collect();
    Ok(Lemma22Summary {
        instances: count,
        mismatches: mismatches.len() as u64,
        first_mismatch: mismatches.into_iter().next(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma31Case {
    pub function: FunctionRef,
    #[serde(serialize_with = "serialize_real")]
    pub eps: f64,
    pub order: Vec<usize>,
    /// 1-based chain positions below their floor; empty when only the final bound failed.
    pub steps: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma31Summary {
    pub functions: u64,
    #[serde(serialize_with = "serialize_reals")]
    pub eps: Vec<f64>,
    pub chains: u64,
    pub violations: u64,
    /// Smallest `delta - floor` over all steps of all chains.
    #[serde(serialize_with = "serialize_opt_real")]
    pub worst_margin: Option<f64>,
    pub first_violation: Option<Lemma31Case>,
}

impl Lemma31Summary {
    pub fn ok(&self) -> bool {
        self.violations == 0
    }
}

/// Random `f` with `n` uniform in `1..=max_n`; every ε gets its own uniformly
/// random chain order.
pub fn lemma31_random(count: u64, max_n: usize, eps: &[f64], seed: u64) -> Result<Lemma31Summary> {
    check_max_n(max_n, crate::moments::DEFAULT_CHAIN_MAX_N)?;
    let per_fn = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let n = rng.gen_range(1..=max_n);
            let f = BooleanFunction::random(n, &mut rng)?;
            let mut worst: Option<f64> = None;
            let mut failures = Vec::new();
            for &e in eps {
                let mut order: Vec<usize> = (1..=n).collect();
                order.shuffle(&mut rng);
                let report = chain(&f, e, Some(&order))?;
                for step in &report.steps {
                    worst = Some(worst.map_or(step.margin(), |w| w.min(step.margin())));
                }
                if !report.holds(CHAIN_TOLERANCE) {
                    failures.push(Lemma31Case {
                        function: (&f).into(),
                        eps: e,
                        order,
                        steps: report.violations(CHAIN_TOLERANCE),
                    });
                }
            }
            Ok((worst, failures))
        })
        .collect::<Result<Vec<_>>>()?;
    let worst_margin = per_fn.iter().filter_map(|(w, _)| *w).reduce(f64::min);
    let failures: Vec<_> = per_fn.into_iter().flat_map(|(_, f)| f).collect();
    Ok(Lemma31Summary {
        functions: count,
        eps: eps.to_vec(),
        chains: count * eps.len() as u64,
        violations: failures.len() as u64,
        worst_margin,
        first_violation: failures.into_iter().next(),
    })
}

fn check_max_n(max_n: usize, cap: usize) -> Result<()> {
    if max_n == 0 || max_n > cap {
        return Err(Error::InvalidParameter(format!("maximum dimension must be in 1..={cap}")));
    }
    Ok(())
}

/// Slack and identity checks for one function.
#[derive(Clone, Copy, Debug)]
struct Checked {
    slack: f64,
    drop_one_slack: f64,
    identities_ok: bool,
}

fn check_function(f: &BooleanFunction) -> Checked {
    let s = wht(f);
    let profile = influences_spectral(&s);
    let entropy = fourier_entropy(&s);
    let identities_ok = s.parseval_ok()
        && Dyadic::new(s.degree_weighted_sum(), 2 * f.n() as u32) == profile.total
        && influences_combinatorial(f) == profile
        && min_entropy(&s) <= entropy + 1e-12;
    Checked {
        slack: theorem_bound(&profile) - entropy,
        drop_one_slack: drop_one_bound(&profile) - entropy,
        identities_ok,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundTally {
    pub functions: u64,
    pub violations: u64,
    pub drop_one_violations: u64,
    /// Functions failing Parseval, the degree-weighted identity, the
    /// spectral/combinatorial influence match or `min-entropy <= entropy`.
    pub identity_failures: u64,
    #[serde(serialize_with = "serialize_opt_real")]
    pub min_slack: Option<f64>,
    #[serde(serialize_with = "serialize_opt_real")]
    pub min_drop_one_slack: Option<f64>,
    pub tightest: Option<FunctionRef>,
}

impl BoundTally {
    fn empty() -> BoundTally {
        BoundTally {
            functions: 0,
            violations: 0,
            drop_one_violations: 0,
            identity_failures: 0,
            min_slack: None,
            min_drop_one_slack: None,
            tightest: None,
        }
    }

    fn single(f: &BooleanFunction) -> BoundTally {
        let c = check_function(f);
        BoundTally {
            functions: 1,
            violations: (c.slack < -BOUND_TOLERANCE) as u64,
            drop_one_violations: (c.drop_one_slack < -BOUND_TOLERANCE) as u64,
            identity_failures: (!c.identities_ok) as u64,
            min_slack: Some(c.slack),
            min_drop_one_slack: Some(c.drop_one_slack),
            tightest: Some(f.into()),
        }
    }

    fn merge(self, other: BoundTally) -> BoundTally {
        let take_other = match (self.min_slack, other.min_slack) {
            (Some(a), Some(b)) => {
                b < a || b == a && other.tightest.as_ref().map(|t| (t.n, &t.hex)) < self.tightest.as_ref().map(|t| (t.n, &t.hex))
            }
            (None, _) => true,
            (_, None) => false,
        };
        let min = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        BoundTally {
            functions: self.functions + other.functions,
            violations: self.violations + other.violations,
            drop_one_violations: self.drop_one_violations + other.drop_one_violations,
            identity_failures: self.identity_failures + other.identity_failures,
            min_slack: min(self.min_slack, other.min_slack),
            min_drop_one_slack: min(self.min_drop_one_slack, other.min_drop_one_slack),
            tightest: if take_other { other.tightest } else { self.tightest },
        }
    }

    pub fn ok(&self) -> bool {
        self.violations == 0 && self.drop_one_violations == 0 && self.identity_failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremSummary {
    /// Every table for `n = 1..=exhaustive_max_n`.
    pub exhaustive_max_n: usize,
    pub exhaustive: BoundTally,
    pub random_n: usize,
    pub random: BoundTally,
}

impl TheoremSummary {
    pub fn ok(&self) -> bool {
        self.exhaustive.ok() && self.random.ok()
    }
}

/// Every table of dimension `n`, checked against both entropy bounds.
pub fn theorem_exhaustive(n: usize) -> Result<BoundTally> {
    if n > 4 {
        return Err(Error::InvalidParameter(format!("exhaustive bound sweeps support n <= 4, got {n}")));
    }
    let tables = 1u64 << (1u32 << n);
    Ok((0..tables)
        .into_par_iter()
        .map(|t| BoundTally::single(&BooleanFunction::from_table_bits(n, t).expect("n <= 4")))
        .reduce(BoundTally::empty, BoundTally::merge))
}

/// `count` uniform random tables of dimension `n`.
pub fn theorem_random(n: usize, count: u64, seed: u64) -> Result<BoundTally> {
    if n > crate::MAX_DIMENSION {
        return Err(Error::DimensionTooLarge { n, max: crate::MAX_DIMENSION });
    }
    (0..count)
        .into_par_iter()
        .map(|i| Ok(BoundTally::single(&BooleanFunction::random(n, &mut rng_for(seed, i))?)))
        .try_reduce(BoundTally::empty, |a, b| Ok(a.merge(b)))
}

/// Exhaustive sweeps for `n = 1..=exhaustive_max_n` plus a random sweep.
pub fn theorem_sweep(exhaustive_max_n: usize, random_n: usize, count: u64, seed: u64) -> Result<TheoremSummary> {
    let mut exhaustive = BoundTally::empty();
    for n in 1..=exhaustive_max_n {
        exhaustive = exhaustive.merge(theorem_exhaustive(n)?);
    }
    Ok(TheoremSummary { exhaustive_max_n, exhaustive, random_n, random: theorem_random(random_n, count, seed)? })
}
