//! Named example families and their finite-parameter reports.
//!
//! A family spec is written `name:key=val,key=val`, for example
//! `minblock:s=3,t=2` or `first-even-group:s=3,t=6`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::boolfn::BooleanFunction;
use crate::dyadic::Dyadic;
use crate::entropy::term_sum_bits;
use crate::error::{Error, Result};
use crate::numeric::{serialize_opt_real, serialize_real};
use crate::spectrum::{influences_combinatorial, InfluenceProfile};
use crate::MAX_DIMENSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `prod_{k <= s} x_k` on `n` coordinates.
    Parity,
    /// `+1` iff every coordinate is `+1`.
    And,
    /// `x_k`.
    Dictator,
    /// Sign of the coordinate sum, odd `n`.
    Majority,
    /// Product over `t` blocks of width `s` of the block minimum.
    Minblock,
    /// OR of `s` disjoint ANDs of width `w`, `+1` read as TRUE.
    Tribes,
    /// `+1` iff the first block (of `t` blocks of width `s`) whose product is
    /// `+1` has an even label.
    FirstEvenGroup,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Parity,
        Family::And,
        Family::Dictator,
        Family::Majority,
        Family::Minblock,
        Family::Tribes,
        Family::FirstEvenGroup,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Parity => "parity",
            Family::And => "and",
            Family::Dictator => "dictator",
            Family::Majority => "majority",
            Family::Minblock => "minblock",
            Family::Tribes => "tribes",
            Family::FirstEvenGroup => "first-even-group",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Family::Parity => &["s", "n"],
            Family::And | Family::Majority => &["n"],
            Family::Dictator => &["n", "k"],
            Family::Minblock => &["s", "t"],
            Family::Tribes => &["w", "s"],
            Family::FirstEvenGroup => &["s", "t", "fallback"],
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidFamily(format!("unknown family '{s}'")))
    }
}

/// A family name with its integer parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    pub params: BTreeMap<String, u64>,
}

impl FamilySpec {
    pub fn new(family: Family, params: &[(&str, u64)]) -> FamilySpec {
        FamilySpec {
            family,
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        }
    }

    fn get(&self, key: &str) -> Option<u64> {
        self.params.get(key).copied()
    }

    fn require(&self, key: &str) -> Result<usize> {
        self.get(key).map(|v| v as usize).ok_or_else(|| {
            Error::InvalidFamily(format!("{} needs parameter '{key}'", self.family.name()))
        })
    }

    fn positive(&self, key: &str) -> Result<usize> {
        let v = self.require(key)?;
        if v == 0 {
            return Err(Error::InvalidFamily(format!("{key} must be at least 1")));
        }
        Ok(v)
    }

    /// Dimension of the function this spec builds; validates every parameter.
    pub fn dimension(&self) -> Result<usize> {
        for key in self.params.keys() {
            if !self.family.keys().contains(&key.as_str()) {
                return Err(Error::InvalidFamily(format!(
                    "{} has no parameter '{key}' (accepted: {})",
                    self.family.name(),
                    self.family.keys().join(", ")
                )));
            }
        }
        let n = match self.family {
            Family::Parity => {
                let s = self.positive("s")?;
                let n = self.get("n").map_or(s, |v| v as usize);
                if s > n {
                    return Err(Error::InvalidFamily(format!("parity needs s <= n ({s} > {n})")));
                }
                n
            }
            Family::And => self.positive("n")?,
            Family::Dictator => {
                let n = self.positive("n")?;
                let k = self.get("k").unwrap_or(1) as usize;
                if k == 0 || k > n {
                    return Err(Error::InvalidFamily(format!("dictator needs 1 <= k <= n, got k={k}")));
                }
                n
            }
            Family::Majority => {
                let n = self.positive("n")?;
                if n % 2 == 0 {
                    return Err(Error::InvalidFamily(format!("majority needs odd n, got {n}")));
                }
                n
            }
            Family::Minblock => self.positive("s")?.saturating_mul(self.positive("t")?),
            Family::Tribes => self.positive("w")?.saturating_mul(self.positive("s")?),
            Family::FirstEvenGroup => {
                let t = self.positive("t")?;
                let n = self.positive("s")?.saturating_mul(t);
                if self.get("fallback").is_some_and(|fb| (fb as usize) < t) {
                    return Err(Error::InvalidFamily(format!("fallback must be at least t = {t}")));
                }
                n
            }
        };
        if n > MAX_DIMENSION {
            return Err(Error::DimensionTooLarge { n, max: MAX_DIMENSION });
        }
        Ok(n)
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<FamilySpec> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let family: Family = name.trim().parse()?;
        let mut params = BTreeMap::new();
        for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, val) = pair
                .split_once('=')
                .ok_or_else(|| Error::InvalidFamily(format!("expected key=val, got '{pair}'")))?;
            let val: u64 = val
                .trim()
                .parse()
                .map_err(|_| Error::InvalidFamily(format!("'{val}' is not a non-negative integer")))?;
            if params.insert(key.trim().to_string(), val).is_some() {
                return Err(Error::InvalidFamily(format!("parameter '{key}' given twice")));
            }
        }
        Ok(FamilySpec { family, params })
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family.name())?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

fn block_bits(i: usize, block: usize, width: usize) -> usize {
    (i >> (block * width)) & ((1 << width) - 1)
}

/// Builds the exact truth table of a family member.
pub fn make_family(spec: &FamilySpec) -> Result<BooleanFunction> {
    let n = spec.dimension()?;
    let sign = |negative: bool| if negative { -1 } else { 1 };
    match spec.family {
        Family::Parity => {
            let s = spec.require("s")?;
            let mask = (1usize << s) - 1;
            BooleanFunction::from_fn(n, |i| sign((i & mask).count_ones() % 2 == 1))
        }
        Family::And => BooleanFunction::from_fn(n, |i| sign(i != 0)),
        Family::Dictator => {
            let k = spec.get("k").unwrap_or(1) as usize;
            BooleanFunction::from_fn(n, |i| sign(i >> (k - 1) & 1 == 1))
        }
        Family::Majority => BooleanFunction::from_fn(n, |i| sign(2 * i.count_ones() as usize > n)),
        Family::Minblock => {
            let (s, t) = (spec.require("s")?, spec.require("t")?);
            // a block minimum is -1 as soon as one coordinate is -1
            BooleanFunction::from_fn(n, |i| {
                let negative_blocks = (0..t).filter(|&p| block_bits(i, p, s) != 0).count();
                sign(negative_blocks % 2 == 1)
            })
        }
        Family::Tribes => {
            let (w, s) = (spec.require("w")?, spec.require("s")?);
            BooleanFunction::from_fn(n, |i| sign(!(0..s).any(|p| block_bits(i, p, w) == 0)))
        }
        Family::FirstEvenGroup => {
            let (s, t) = (spec.require("s")?, spec.require("t")?);
            let fallback = spec.get("fallback").unwrap_or(t as u64) as usize;
            BooleanFunction::from_fn(n, |i| {
                // u(p) = +1 iff block p has an even number of -1 coordinates
                let p0 = (0..t)
                    .find(|&p| block_bits(i, p, s).count_ones().is_multiple_of(2))
                    .map_or(fallback, |p| p + 1);
                sign(p0 % 2 == 1)
            })
        }
    }
}

/// One observed-versus-target comparison in a [`FamilyReport`].
#[derive(Clone, Debug, Serialize)]
pub struct FamilyCheck {
    pub name: String,
    #[serde(serialize_with = "serialize_real")]
    pub observed: f64,
    #[serde(serialize_with = "serialize_real")]
    pub target: f64,
    #[serde(serialize_with = "serialize_real")]
    pub deviation: f64,
    /// Bound the deviation must respect, when the family proves one at finite size.
    #[serde(serialize_with = "serialize_opt_real")]
    pub bound: Option<f64>,
    pub holds: Option<bool>,
}

impl FamilyCheck {
    fn new(name: impl Into<String>, observed: f64, target: f64, bound: Option<f64>) -> FamilyCheck {
        let deviation = (observed - target).abs();
        FamilyCheck {
            name: name.into(),
            observed,
            target,
            deviation,
            bound,
            holds: bound.map(|b| deviation <= b),
        }
    }

    fn exact(name: impl Into<String>, observed: f64, target: f64, holds: bool) -> FamilyCheck {
        FamilyCheck {
            name: name.into(),
            observed,
            target,
            deviation: (observed - target).abs(),
            bound: Some(0.0),
            holds: Some(holds),
        }
    }
}

/// Influences of a family member compared against the values and limits the
/// family is known to satisfy.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub spec: String,
    pub n: usize,
    pub influences: Vec<Dyadic>,
    pub influence_total: Dyadic,
    #[serde(serialize_with = "serialize_real")]
    pub term_sum_bits: f64,
    pub checks: Vec<FamilyCheck>,
}

impl FamilyReport {
    /// False if any check with a bound fails.
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds != Some(false))
    }
}

pub fn family_report(spec: &FamilySpec) -> Result<FamilyReport> {
    let f = make_family(spec)?;
    let n = f.n();
    let profile: InfluenceProfile = influences_combinatorial(&f);
    let total = profile.total.to_f64();
    let term_sum = term_sum_bits(&profile);
    let mut checks = Vec::new();
    match spec.family {
        Family::FirstEvenGroup => {
            let (s, t) = (spec.require("s")?, spec.require("t")?);
            let bound = 2f64.powi(1 - t as i32);
            for (idx, ik) in profile.per_coord.iter().enumerate() {
                let p = idx / s + 1;
                let target = 2f64.powi(2 - p as i32) / 3.0;
                checks.push(FamilyCheck::new(
                    format!("I_{} (block {p}) vs 2^(2-p)/3", idx + 1),
                    ik.to_f64(),
                    target,
                    Some(bound),
                ));
            }
            checks.push(FamilyCheck::new("I vs limit 4s/3", total, 4.0 * s as f64 / 3.0, None));
            let limit = 4.0 / 3.0 * 3f64.log2() * s as f64;
            let printed_form = 4.0 / 3.0 * (2.0 - (4.0f64 / 3.0).log2()) * s as f64;
            checks.push(FamilyCheck::new("term_sum vs limit (4/3)log2(3)s", term_sum, limit, None));
            checks.push(FamilyCheck::new(
                "term_sum vs limit (4/3)(2-log2(4/3))s",
                term_sum,
                printed_form,
                None,
            ));
        }
        Family::Minblock => {
            let s = spec.require("s")?;
            let target = Dyadic::new(1, s as u32 - 1);
            for (idx, ik) in profile.per_coord.iter().enumerate() {
                checks.push(FamilyCheck::exact(
                    format!("I_{} vs 2^(1-s)", idx + 1),
                    ik.to_f64(),
                    target.to_f64(),
                    *ik == target,
                ));
            }
            let cap = total * (n as f64 / total).log2();
            checks.push(FamilyCheck::new("term_sum vs I*log2(n/I)", term_sum, cap, Some(1e-9)));
        }
        Family::Parity => {
            let s = spec.require("s")?;
            checks.push(FamilyCheck::exact(
                "I vs s",
                total,
                s as f64,
                profile.total == Dyadic::integer(s as u128),
            ));
            checks.push(FamilyCheck::exact("term_sum vs 0", term_sum, 0.0, term_sum == 0.0));
        }
        _ => {}
    }
    Ok(FamilyReport {
        spec: spec.to_string(),
        n,
        influences: profile.per_coord,
        influence_total: profile.total,
        term_sum_bits: term_sum,
        checks,
    })
}
