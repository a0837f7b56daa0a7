//! Exhaustive and sampled sweeps over truth-table space.
//!
//! Items are numbered `0..total`. In exhaustive mode item `i` is the table
//! whose packed bits equal `i`; in sample mode it is drawn from a ChaCha8
//! stream keyed by `(seed, i)`. Each item is evaluated independently and
//! the per-metric extrema are merged with a total order (value first, then
//! the smaller hex witness), so results do not depend on how the index range
//! is split across workers or across checkpoints.
//!
//! Checkpoint files hold one JSON header line, the cursor as 8 little-endian
//! bytes, then the JSON accumulator state.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::boolfn::BooleanFunction;
use crate::entropy::{
    analyze, fourier_entropy, jensen_cap, min_entropy, term_sum_bits, theorem_bound, AnalysisReport,
};
use crate::error::{Error, Result};
use crate::inequality::q31_report;
use crate::numeric::serialize_real;
use crate::spectrum::{influences_spectral, wht};
use crate::MAX_DIMENSION;

/// Entropy may exceed the theorem bound by at most this much before it counts as a violation.
pub const THEOREM_TOLERANCE: f64 = 1e-9;

/// Default cap on the number of tables an exhaustive job may enumerate.
pub const DEFAULT_BUDGET: u64 = 1 << 16;

/// Largest dimension for exhaustive enumeration.
pub const MAX_EXHAUSTIVE_N: usize = 5;

/// Concentration rows attached to every record's context report.
pub const CONTEXT_DELTAS: [f64; 3] = [0.5, 0.1, 0.01];

const CHUNK: u64 = 1 << 12;
const CHECKPOINT_FORMAT: &str = "hypercube-spectra-checkpoint/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    /// `Ent / I`, maximized.
    #[serde(rename = "ent_over_I")]
    EntOverI,
    /// `Ent / theorem_bound`, maximized; stays below 1 if the bound holds.
    #[serde(rename = "ent_over_bound")]
    EntOverBound,
    /// `min-entropy / I`, maximized.
    #[serde(rename = "minent_over_I")]
    MinentOverI,
    /// Per function the best coordinate ratio `min_k N_k / I_k`; the sweep
    /// keeps the largest, which lower-bounds any admissible constant.
    #[serde(rename = "q31_worst")]
    Q31Worst,
    /// `I log2(n/I) - sum_k I_k log2(1/I_k)`, minimized.
    #[serde(rename = "jensen_slack")]
    JensenSlack,
}

impl Metric {
    pub const ALL: [Metric; 5] =
        [Metric::EntOverI, Metric::EntOverBound, Metric::MinentOverI, Metric::Q31Worst, Metric::JensenSlack];

    pub fn name(self) -> &'static str {
        match self {
            Metric::EntOverI => "ent_over_I",
            Metric::EntOverBound => "ent_over_bound",
            Metric::MinentOverI => "minent_over_I",
            Metric::Q31Worst => "q31_worst",
            Metric::JensenSlack => "jensen_slack",
        }
    }

    pub fn maximize(self) -> bool {
        self != Metric::JensenSlack
    }

    /// Metric value from the per-function quantities; `None` for constants.
    fn value(self, m: &FunctionMetrics) -> Option<f64> {
        if m.influence == 0.0 {
            return None;
        }
        match self {
            Metric::EntOverI => Some(m.entropy / m.influence),
            Metric::EntOverBound => Some(m.entropy / m.bound),
            Metric::MinentOverI => Some(m.min_entropy / m.influence),
            Metric::Q31Worst => m.q31_best,
            Metric::JensenSlack => m.jensen_cap.map(|cap| cap - m.term_sum),
        }
    }

    /// Recomputes the metric for `f` through [`analyze`] and [`q31_report`].
    pub fn reanalyze(self, f: &BooleanFunction) -> Result<Option<f64>> {
        let report = analyze(f, &[])?;
        let influence = report.influence_total.to_f64();
        let q31_best = if self == Metric::Q31Worst { q31_report(&wht(f)).best_f64() } else { None };
        let m = FunctionMetrics {
            entropy: report.entropy_bits,
            min_entropy: report.min_entropy_bits,
            influence,
            term_sum: report.term_sum_bits,
            bound: report.bound_bits,
            jensen_cap: report.jensen_cap_bits,
            q31_best,
        };
        Ok(self.value(&m))
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Metric> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown metric '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SearchMode {
    /// Every table of dimension `n`; with `symmetry`, only the smallest table
    /// of each orbit under coordinate permutations, input negations and output
    /// negation.
    Exhaustive { symmetry: bool, budget: u64 },
    /// `count` uniform random tables.
    Sample { count: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchJob {
    pub n: usize,
    pub mode: SearchMode,
    pub metrics: Vec<Metric>,
    /// Items per checkpoint batch; `0` runs everything in one batch.
    pub checkpoint_every: u64,
}

impl SearchJob {
    pub fn exhaustive(n: usize, metrics: &[Metric]) -> SearchJob {
        SearchJob {
            n,
            mode: SearchMode::Exhaustive { symmetry: false, budget: DEFAULT_BUDGET },
            metrics: metrics.to_vec(),
            checkpoint_every: 0,
        }
    }

    pub fn sample(n: usize, count: u64, seed: u64, metrics: &[Metric]) -> SearchJob {
        SearchJob { n, mode: SearchMode::Sample { count, seed }, metrics: metrics.to_vec(), checkpoint_every: 0 }
    }

    fn normalized_metrics(&self) -> Vec<Metric> {
        let mut m = self.metrics.clone();
        m.sort();
        m.dedup();
        m
    }

    pub fn validate(&self) -> Result<()> {
        match &self.mode {
            SearchMode::Exhaustive { budget, .. } => {
                if self.n > MAX_EXHAUSTIVE_N {
                    return Err(Error::InvalidParameter(format!(
                        "exhaustive search supports n <= {MAX_EXHAUSTIVE_N}, got {}",
                        self.n
                    )));
                }
                let tables = 1u128 << (1u32 << self.n);
                if tables > *budget as u128 {
                    return Err(Error::BudgetExceeded { tables, budget: *budget });
                }
            }
            SearchMode::Sample { .. } => {
                if self.n > MAX_DIMENSION {
                    return Err(Error::DimensionTooLarge { n: self.n, max: MAX_DIMENSION });
                }
            }
        }
        Ok(())
    }

    /// Number of items the job enumerates.
    pub fn total(&self) -> u64 {
        match self.mode {
            SearchMode::Exhaustive { .. } => 1u64 << (1u32 << self.n),
            SearchMode::Sample { count, .. } => count,
        }
    }

    /// Hex digest over dimension, mode and metric set.
    pub fn hash(&self) -> String {
        #[derive(Serialize)]
        struct Hashed<'a> {
            n: usize,
            mode: &'a SearchMode,
            metrics: Vec<Metric>,
        }
        let canonical = serde_json::to_vec(&Hashed { n: self.n, mode: &self.mode, metrics: self.normalized_metrics() })
            .expect("job serializes");
        Sha256::digest(&canonical)[..16].iter().map(|b| format!("{b:02x}")).collect()
    }

    fn function(&self, item: u64) -> BooleanFunction {
        match self.mode {
            SearchMode::Exhaustive { .. } => {
                BooleanFunction::from_table_bits(self.n, item).expect("exhaustive dimension is at most 5")
            }
            SearchMode::Sample { seed, .. } => sample_function(self.n, seed, item),
        }
    }
}

/// The `item`-th table of a seeded sample.
pub fn sample_function(n: usize, seed: u64, item: u64) -> BooleanFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(item);
    let words = if n <= 6 { 1 } else { 1usize << (n - 6) };
    let mut table: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
    if n < 6 {
        table[0] &= (1u64 << (1 << n)) - 1;
    }
    BooleanFunction::from_words(n, table).expect("sample tables are well formed")
}

struct FunctionMetrics {
    entropy: f64,
    min_entropy: f64,
    influence: f64,
    term_sum: f64,
    bound: f64,
    jensen_cap: Option<f64>,
    q31_best: Option<f64>,
}

impl FunctionMetrics {
    fn compute(f: &BooleanFunction, with_q31: bool) -> FunctionMetrics {
        let s = wht(f);
        let profile = influences_spectral(&s);
        FunctionMetrics {
            entropy: fourier_entropy(&s),
            min_entropy: min_entropy(&s),
            influence: profile.total.to_f64(),
            term_sum: term_sum_bits(&profile),
            bound: theorem_bound(&profile),
            jensen_cap: jensen_cap(&profile, f.n()),
            q31_best: if with_q31 { q31_report(&s).best_f64() } else { None },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Candidate {
    value_bits: u64,
    hex: String,
}

impl Candidate {
    fn new(value: f64, f: &BooleanFunction) -> Candidate {
        Candidate { value_bits: value.to_bits(), hex: f.to_hex() }
    }

    fn value(&self) -> f64 {
        f64::from_bits(self.value_bits)
    }

    /// Whether `self` beats `other` under the metric direction; ties go to the smaller hex.
    fn beats(&self, other: &Candidate, maximize: bool) -> bool {
        let ord = self.value().total_cmp(&other.value());
        let ord = if maximize { ord } else { ord.reverse() };
        ord.then_with(|| other.hex.cmp(&self.hex)).is_gt()
    }
}

fn merge_best(a: Option<Candidate>, b: Option<Candidate>, maximize: bool) -> Option<Candidate> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.beats(&a, maximize) { b } else { a }),
        (a, b) => a.or(b),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Accumulator {
    visited: u64,
    theorem_violations: u64,
    /// Largest `entropy - bound` among violations.
    worst_violation: Option<Candidate>,
    best: Vec<Option<Candidate>>,
}

impl Accumulator {
    fn empty(metrics: usize) -> Accumulator {
        Accumulator { visited: 0, theorem_violations: 0, worst_violation: None, best: vec![None; metrics] }
    }

    fn merge(self, other: Accumulator, metrics: &[Metric]) -> Accumulator {
        Accumulator {
            visited: self.visited + other.visited,
            theorem_violations: self.theorem_violations + other.theorem_violations,
            worst_violation: merge_best(self.worst_violation, other.worst_violation, true),
            best: self
                .best
                .into_iter()
                .zip(other.best)
                .zip(metrics)
                .map(|((a, b), m)| merge_best(a, b, m.maximize()))
                .collect(),
        }
    }
}

/// Precomputed index maps for the hyperoctahedral group, plus output negation.
struct Symmetry {
    maps: Vec<Vec<usize>>,
    full: u64,
}

impl Symmetry {
    fn new(n: usize) -> Symmetry {
        let mut perms: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..n {
            let mut next = Vec::new();
            for p in &perms {
                for c in (0..n).filter(|c| !p.contains(c)) {
                    let mut q = p.clone();
                    q.push(c);
                    next.push(q);
                }
            }
            perms = next;
        }
        let mut maps = Vec::new();
        for perm in &perms {
            for neg in 0..1usize << n {
                let map = (0..1usize << n)
                    .map(|i| {
                        let mut j = 0;
                        for (bit, &dst) in perm.iter().enumerate() {
                            j |= (i >> bit & 1) << dst;
                        }
                        j ^ neg
                    })
                    .collect();
                maps.push(map);
            }
        }
        let full = if n == 6 { u64::MAX } else { (1u64 << (1 << n)) - 1 };
        Symmetry { maps, full }
    }

    /// True when `table` is the smallest member of its orbit.
    fn is_canonical(&self, table: u64) -> bool {
        self.maps.iter().all(|map| {
            let mut image = 0u64;
            for (i, &j) in map.iter().enumerate() {
                image |= (table >> j & 1) << i;
            }
            image >= table && image ^ self.full >= table
        })
    }
}

fn evaluate_range(job: &SearchJob, metrics: &[Metric], symmetry: Option<&Symmetry>, start: u64, end: u64) -> Accumulator {
    let with_q31 = metrics.contains(&Metric::Q31Worst);
    let mut acc = Accumulator::empty(metrics.len());
    for item in start..end {
        if let Some(sym) = symmetry {
            if !sym.is_canonical(item) {
                continue;
            }
        }
        let f = job.function(item);
        let m = FunctionMetrics::compute(&f, with_q31);
        let excess = m.entropy - m.bound;
        if excess > THEOREM_TOLERANCE {
            acc.theorem_violations += 1;
            acc.worst_violation = merge_best(acc.worst_violation.take(), Some(Candidate::new(excess, &f)), true);
        }
        if m.influence == 0.0 {
            continue;
        }
        acc.visited += 1;
        for (slot, metric) in acc.best.iter_mut().zip(metrics) {
            if let Some(v) = metric.value(&m) {
                *slot = merge_best(slot.take(), Some(Candidate::new(v, &f)), metric.maximize());
            }
        }
    }
    acc
}

fn evaluate_parallel(job: &SearchJob, metrics: &[Metric], symmetry: Option<&Symmetry>, start: u64, end: u64) -> Accumulator {
    let chunks = (end - start).div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = start + c * CHUNK;
            evaluate_range(job, metrics, symmetry, lo, (lo + CHUNK).min(end))
        })
        .reduce(|| Accumulator::empty(metrics.len()), |a, b| a.merge(b, metrics))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub n: usize,
    pub hex: String,
}

impl Witness {
    pub fn function(&self) -> Result<BooleanFunction> {
        BooleanFunction::from_hex(self.n, &self.hex)
    }
}

/// The extremal function for one metric.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremalRecord {
    pub metric: Metric,
    #[serde(serialize_with = "serialize_real")]
    pub value: f64,
    pub witness: Witness,
    pub context: AnalysisReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremViolation {
    #[serde(serialize_with = "serialize_real")]
    pub excess_bits: f64,
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub job_hash: String,
    /// Items processed so far.
    pub cursor: u64,
    pub total: u64,
    pub complete: bool,
    /// Non-constant functions evaluated (orbit representatives under symmetry).
    pub visited: u64,
    pub theorem_violations: u64,
    pub worst_violation: Option<TheoremViolation>,
    pub records: Vec<ExtremalRecord>,
}

fn outcome(job: &SearchJob, metrics: &[Metric], acc: &Accumulator, cursor: u64) -> Result<SearchOutcome> {
    let witness = |c: &Candidate| Witness { n: job.n, hex: c.hex.clone() };
    let records = metrics
        .iter()
        .zip(&acc.best)
        .filter_map(|(m, c)| c.as_ref().map(|c| (m, c)))
        .map(|(&metric, c)| {
            let w = witness(c);
            Ok(ExtremalRecord { metric, value: c.value(), context: analyze(&w.function()?, &CONTEXT_DELTAS)?, witness: w })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SearchOutcome {
        job_hash: job.hash(),
        cursor,
        total: job.total(),
        complete: cursor == job.total(),
        visited: acc.visited,
        theorem_violations: acc.theorem_violations,
        worst_violation: acc
            .worst_violation
            .as_ref()
            .map(|c| TheoremViolation { excess_bits: c.value(), witness: witness(c) }),
        records,
    })
}

#[derive(Serialize, Deserialize)]
struct CheckpointHeader {
    format: String,
    job_hash: String,
    n: usize,
    mode: SearchMode,
    job: SearchJob,
}

fn write_checkpoint(path: &Path, job: &SearchJob, cursor: u64, acc: &Accumulator) -> Result<()> {
    let header = CheckpointHeader {
        format: CHECKPOINT_FORMAT.to_string(),
        job_hash: job.hash(),
        n: job.n,
        mode: job.mode.clone(),
        job: job.clone(),
    };
    let mut bytes = serde_json::to_vec(&header)?;
    bytes.push(b'\n');
    bytes.extend_from_slice(&cursor.to_le_bytes());
    bytes.extend_from_slice(&serde_json::to_vec(acc)?);
    let tmp = path.with_extension("tmp");
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(&bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn read_checkpoint(path: &Path) -> Result<(SearchJob, u64, Accumulator)> {
    let bytes = fs::read(path)?;
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::CheckpointCorrupt("missing header line".into()))?;
    let header: CheckpointHeader = serde_json::from_slice(&bytes[..newline])
        .map_err(|e| Error::CheckpointCorrupt(format!("header: {e}")))?;
    if header.format != CHECKPOINT_FORMAT {
        return Err(Error::CheckpointCorrupt(format!("unknown format '{}'", header.format)));
    }
    let rest = &bytes[newline + 1..];
    if rest.len() < 8 {
        return Err(Error::CheckpointCorrupt("truncated cursor".into()));
    }
    let cursor = u64::from_le_bytes(rest[..8].try_into().expect("8 bytes"));
    let acc: Accumulator =
        serde_json::from_slice(&rest[8..]).map_err(|e| Error::CheckpointCorrupt(format!("state: {e}")))?;
    let job = header.job;
    let found = job.hash();
    if found != header.job_hash || job.n != header.n || job.mode != header.mode {
        return Err(Error::CheckpointMismatch { expected: header.job_hash, found });
    }
    if cursor > job.total() || acc.best.len() != job.normalized_metrics().len() {
        return Err(Error::CheckpointCorrupt("cursor or record count out of range".into()));
    }
    Ok((job, cursor, acc))
}

fn drive(
    job: &SearchJob,
    mut cursor: u64,
    mut acc: Accumulator,
    checkpoint: Option<&Path>,
    stop_after: Option<u64>,
) -> Result<SearchOutcome> {
    let metrics = job.normalized_metrics();
    let symmetry = match job.mode {
        SearchMode::Exhaustive { symmetry: true, .. } => Some(Symmetry::new(job.n)),
        _ => None,
    };
    let total = job.total();
    let limit = stop_after.map_or(total, |s| (cursor + s).min(total));
    let batch = if job.checkpoint_every == 0 { total.max(1) } else { job.checkpoint_every };
    if let Some(path) = checkpoint {
        write_checkpoint(path, job, cursor, &acc)?;
    }
    while cursor < limit {
        let end = (cursor + batch).min(limit);
        let part = evaluate_parallel(job, &metrics, symmetry.as_ref(), cursor, end);
        acc = acc.merge(part, &metrics);
        cursor = end;
        if let Some(path) = checkpoint {
            write_checkpoint(path, job, cursor, &acc)?;
        }
    }
    outcome(job, &metrics, &acc, cursor)
}

/// Runs a job to completion without persisting anything.
pub fn run(job: &SearchJob) -> Result<SearchOutcome> {
    run_with_checkpoint(job, None, None)
}

/// Runs a job from the start, writing a checkpoint after every batch. With
/// `stop_after`, processing halts after that many items (the checkpoint then
/// records the partial state).
pub fn run_with_checkpoint(job: &SearchJob, checkpoint: Option<&Path>, stop_after: Option<u64>) -> Result<SearchOutcome> {
    job.validate()?;
    let metrics = job.normalized_metrics();
    drive(job, 0, Accumulator::empty(metrics.len()), checkpoint, stop_after)
}

/// Continues the job stored in a checkpoint. If `expected` is given, its hash
/// must match the stored job. A completed checkpoint is returned as is.
pub fn resume(checkpoint: &Path, expected: Option<&SearchJob>, stop_after: Option<u64>) -> Result<SearchOutcome> {
    let (mut job, cursor, acc) = read_checkpoint(checkpoint)?;
    if let Some(expected) = expected {
        let found = expected.hash();
        if found != job.hash() {
            return Err(Error::CheckpointMismatch { expected: job.hash(), found });
        }
        // batch size is not part of the job identity
        job.checkpoint_every = expected.checkpoint_every;
    }
    job.validate()?;
    if cursor == job.total() {
        return outcome(&job, &job.normalized_metrics(), &acc, cursor);
    }
    drive(&job, cursor, acc, Some(checkpoint), stop_after)
}
