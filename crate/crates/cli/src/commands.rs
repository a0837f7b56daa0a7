use std::fmt::Write as _;

use hypercube_spectra::entropy::AnalysisReport;
use hypercube_spectra::inequality::{grid_sweep, q31_report, random_sweep, ScalarGridSpec, ScalarInequality, SweepReport};
use hypercube_spectra::moments::{chain_with_cap, moment_curve, DEFAULT_CHAIN_MAX_N};
use hypercube_spectra::numeric::format_real;
use hypercube_spectra::search::{self, Metric, SearchJob, SearchMode, SearchOutcome, THEOREM_TOLERANCE};
use hypercube_spectra::verify::{self, CHAIN_TOLERANCE};
use hypercube_spectra::{analyze, family_report, make_family, wht, Error, FamilySpec, Result, MAX_DIMENSION};
use serde::Serialize;
use serde_json::value::{to_raw_value, RawValue};

use crate::args::{AnalyzeFormat, Command, DataFormat, ScalarArgs, SearchArgs, SearchModeArg, VerifyTarget};
use crate::envelope::{Fingerprint, Status};
use crate::input::{load, parse_coords, parse_list, parse_reals};

pub enum Body {
    /// A JSON envelope, optionally preceded by bare JSON lines.
    Envelope { input: Option<Fingerprint>, payload: Box<RawValue>, lines: Vec<String> },
    Text(String),
}

pub struct Output {
    pub status: Status,
    pub body: Body,
}

fn raw(value: &impl Serialize) -> Result<Box<RawValue>> {
    Ok(to_raw_value(value)?)
}

fn report(status: Status, input: Option<Fingerprint>, payload: &impl Serialize) -> Result<Output> {
    Ok(Output { status, body: Body::Envelope { input, payload: raw(payload)?, lines: Vec::new() } })
}

fn text(status: Status, text: String) -> Output {
    Output { status, body: Body::Text(text) }
}

fn bounds_hold(r: &AnalysisReport) -> bool {
    r.entropy_bits <= r.bound_bits + THEOREM_TOLERANCE && r.entropy_bits <= r.bound_drop_one_bits + THEOREM_TOLERANCE
}

pub fn run(command: &Command) -> Result<Output> {
    match command {
        Command::Analyze { input, deltas, format } => {
            let f = load(input)?;
            let r = analyze(&f, deltas)?;
            let status = Status::from_ok(bounds_hold(&r));
            match format {
                AnalyzeFormat::Json => report(status, Some(Fingerprint::of(&f)), &r),
                AnalyzeFormat::Table => Ok(text(status, analysis_table(&r))),
            }
        }
        Command::Spectrum { input, format } => {
            let f = load(input)?;
            let s = wht(&f);
            match format {
                DataFormat::Json => {
                    #[derive(Serialize)]
                    struct Payload<'a> {
                        n: usize,
                        coeffs: &'a [i32],
                        parseval_ok: bool,
                    }
                    let payload = Payload { n: s.n(), coeffs: s.coeffs(), parseval_ok: s.parseval_ok() };
                    report(Status::from_ok(payload.parseval_ok), Some(Fingerprint::of(&f)), &payload)
                }
                DataFormat::Csv => {
                    let mut out = String::from("mask,coeff\n");
                    for (mask, c) in s.coeffs().iter().enumerate() {
                        writeln!(out, "{mask},{c}").unwrap();
                    }
                    Ok(text(Status::from_ok(s.parseval_ok()), out))
                }
            }
        }
        Command::Moments { input, v, eps, format } => {
            let f = load(input)?;
            let curve = moment_curve(&f, parse_coords(v, f.n())?, &parse_reals(eps)?)?;
            match format {
                DataFormat::Json => report(Status::Ok, Some(Fingerprint::of(&f)), &curve),
                DataFormat::Csv => {
                    let mut out = String::from("eps,value\n");
                    for (e, m) in curve.eps_grid.iter().zip(&curve.values) {
                        writeln!(out, "{},{}", format_real(*e), format_real(*m)).unwrap();
                    }
                    Ok(text(Status::Ok, out))
                }
            }
        }
        Command::Chain { input, eps, order, allow_large } => {
            let f = load(input)?;
            let order = order.as_deref().map(parse_list).transpose()?;
            let cap = if *allow_large { MAX_DIMENSION } else { DEFAULT_CHAIN_MAX_N };
            let r = chain_with_cap(&f, *eps, order.as_deref(), cap)?;
            report(Status::from_ok(r.holds(CHAIN_TOLERANCE)), Some(Fingerprint::of(&f)), &r)
        }
        Command::Verify { target } => run_verify(target),
        Command::Q31 { input } => {
            let f = load(input)?;
            let r = q31_report(&wht(&f));
            let status = Status::from_ok(r.per_coord.iter().all(|c| c.cauchy_schwarz_ok));
            report(status, Some(Fingerprint::of(&f)), &r)
        }
        Command::Search(args) => run_search(args),
        Command::Family { spec, emit_hex } => {
            let spec: FamilySpec = spec.parse()?;
            if *emit_hex {
                return Ok(text(Status::Ok, make_family(&spec)?.to_hex() + "\n"));
            }
            let f = make_family(&spec)?;
            let r = family_report(&spec)?;
            report(Status::from_ok(r.all_hold()), Some(Fingerprint::of(&f)), &r)
        }
    }
}

fn analysis_table(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let mut row = |k: &str, v: String| writeln!(out, "{k:<22} {v}").unwrap();
    row("n", r.n.to_string());
    row("entropy_bits", format_real(r.entropy_bits));
    row("min_entropy_bits", format_real(r.min_entropy_bits));
    row("influence_total", r.influence_total.to_string());
    row("term_sum_bits", format_real(r.term_sum_bits));
    row("bound_bits", format_real(r.bound_bits));
    row("bound_drop_one_bits", format_real(r.bound_drop_one_bits));
    row("jensen_cap_bits", r.jensen_cap_bits.map_or("-".into(), format_real));
    for (k, i) in r.influences.iter().enumerate() {
        row(&format!("I_{}", k + 1), i.to_string());
    }
    for c in &r.concentration {
        row(&format!("concentration({})", format_real(c.delta)), c.count.to_string());
    }
    out
}

fn scalar(ineq: ScalarInequality, args: &ScalarArgs) -> Result<Output> {
    #[derive(Serialize)]
    struct Payload {
        grid: Option<SweepReport>,
        random: Option<SweepReport>,
    }
    let grid_points = match (args.grid, args.random) {
        (None, None) => Some(200),
        (g, _) => g,
    };
    let grid = grid_points
        .map(|points| grid_sweep(ineq, &ScalarGridSpec::square(points, parse_reals(&args.eps)?)))
        .transpose()?;
    let random = args.random.map(|count| random_sweep(ineq, count, args.seed)).transpose()?;
    let ok = grid.iter().chain(&random).all(SweepReport::ok);
    report(Status::from_ok(ok), None, &Payload { grid, random })
}

fn run_verify(target: &VerifyTarget) -> Result<Output> {
    match target {
        VerifyTarget::Lemma24(args) => scalar(ScalarInequality::Lemma24, args),
        VerifyTarget::Eq27(args) => scalar(ScalarInequality::Eq27, args),
        VerifyTarget::Lemma22 { count, max_n, seed } => {
            let s = verify::lemma22_random(*count, *max_n, *seed)?;
            report(Status::from_ok(s.ok()), None, &s)
        }
        VerifyTarget::Lemma31 { count, max_n, eps, seed } => {
            let s = verify::lemma31_random(*count, *max_n, &parse_reals(eps)?, *seed)?;
            report(Status::from_ok(s.ok()), None, &s)
        }
        VerifyTarget::Theorem { exhaustive_max_n, count, n, seed } => {
            let s = verify::theorem_sweep(*exhaustive_max_n, *n, *count, *seed)?;
            report(Status::from_ok(s.ok()), None, &s)
        }
    }
}

fn search_job(args: &SearchArgs, n: usize) -> Result<SearchJob> {
    let metrics = args
        .metrics
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse::<Metric>)
        .collect::<Result<Vec<_>>>()?;
    let mode = match args.mode {
        SearchModeArg::Exhaustive => SearchMode::Exhaustive { symmetry: args.symmetry, budget: args.budget },
        SearchModeArg::Sample => {
            let missing = |flag: &str| Error::InvalidParameter(format!("sample mode needs {flag}"));
            SearchMode::Sample {
                count: args.count.ok_or_else(|| missing("--count"))?,
                seed: args.seed.ok_or_else(|| missing("--seed"))?,
            }
        }
    };
    Ok(SearchJob { n, mode, metrics, checkpoint_every: args.checkpoint_every })
}

fn run_search(args: &SearchArgs) -> Result<Output> {
    let job = args.n.map(|n| search_job(args, n)).transpose()?;
    let outcome = match (&args.checkpoint, args.resume, &job) {
        (Some(path), true, _) => search::resume(path, job.as_ref(), args.stop_after)?,
        (path, false, Some(job)) => search::run_with_checkpoint(job, path.as_deref(), args.stop_after)?,
        _ => return Err(Error::InvalidParameter("search needs --n, or --checkpoint with --resume".into())),
    };
    search_output(&outcome)
}

fn search_output(outcome: &SearchOutcome) -> Result<Output> {
    #[derive(Serialize)]
    struct Summary<'a> {
        job_hash: &'a str,
        cursor: u64,
        total: u64,
        complete: bool,
        visited: u64,
        theorem_violations: u64,
        worst_violation: &'a Option<search::TheoremViolation>,
        metrics: Vec<Metric>,
    }
    let lines = outcome
        .records
        .iter()
        .map(serde_json::to_string)
        .collect::<serde_json::Result<Vec<_>>>()?;
    let summary = Summary {
        job_hash: &outcome.job_hash,
        cursor: outcome.cursor,
        total: outcome.total,
        complete: outcome.complete,
        visited: outcome.visited,
        theorem_violations: outcome.theorem_violations,
        worst_violation: &outcome.worst_violation,
        metrics: outcome.records.iter().map(|r| r.metric).collect(),
    };
    let n = outcome.records.first().map(|r| r.witness.n);
    Ok(Output {
        status: Status::from_ok(outcome.theorem_violations == 0),
        body: Body::Envelope { input: n.map(Fingerprint::dimension), payload: raw(&summary)?, lines },
    })
}
