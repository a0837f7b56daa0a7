use hypercube_spectra::search::{resume, run, run_with_checkpoint, Metric, SearchJob, SearchMode};
use hypercube_spectra::{BooleanFunction, Error};

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().unwrap().install(f)
}

#[test]
fn exhaustive_n4_bound_ratio_below_one() {
    let out = run(&SearchJob::exhaustive(4, &[Metric::EntOverBound])).unwrap();
    assert_eq!(out.visited, 65534);
    assert_eq!(out.theorem_violations, 0);
    assert!(out.records[0].value < 1.0);
}

#[test]
fn sample_is_seed_and_worker_deterministic() {
    let job = SearchJob::sample(8, 2000, 7, &[Metric::Q31Worst, Metric::EntOverI]);
    let a = in_pool(1, || run(&job).unwrap());
    let b = in_pool(4, || run(&job).unwrap());
    assert_eq!(a, b);
    let other = SearchJob::sample(8, 2000, 8, &job.metrics);
    assert_ne!(a.records, run(&other).unwrap().records);
}

#[test]
fn witnesses_reproduce_metric_values() {
    let out = run(&SearchJob::exhaustive(3, &Metric::ALL)).unwrap();
    assert_eq!(out.records.len(), Metric::ALL.len());
    for rec in &out.records {
        let f = rec.witness.function().unwrap();
        let again = rec.metric.reanalyze(&f).unwrap().unwrap();
        assert!((again - rec.value).abs() <= 1e-9, "{}: {again} vs {}", rec.metric, rec.value);
    }
}

#[test]
fn symmetry_reduction_preserves_extremal_values() {
    let full = run(&SearchJob::exhaustive(3, &Metric::ALL)).unwrap();
    let mut job = SearchJob::exhaustive(3, &Metric::ALL);
    job.mode = SearchMode::Exhaustive { symmetry: true, budget: 1 << 16 };
    let reduced = run(&job).unwrap();
    // 14 NPN classes of 3-variable functions, minus the constants
    assert_eq!(reduced.visited, 13);
    for (a, b) in full.records.iter().zip(&reduced.records) {
        assert_eq!(a.metric, b.metric);
        assert!((a.value - b.value).abs() <= 1e-12, "{}", a.metric);
    }
}

#[test]
fn interrupted_run_resumes_to_identical_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n4.ckpt");
    let mut job = SearchJob::exhaustive(4, &[Metric::EntOverBound, Metric::JensenSlack]);
    job.checkpoint_every = 4096;
    let uninterrupted = run(&job).unwrap();

    let partial = run_with_checkpoint(&job, Some(&path), Some(1 << 15)).unwrap();
    assert!(!partial.complete);
    assert_eq!(partial.cursor, 1 << 15);
    let resumed = in_pool(3, || resume(&path, Some(&job), None).unwrap());
    assert_eq!(resumed, uninterrupted);

    // a completed checkpoint is returned without further work
    let before = std::fs::read(&path).unwrap();
    assert_eq!(resume(&path, None, None).unwrap(), uninterrupted);
    assert_eq!(std::fs::read(&path).unwrap(), before);
}

#[test]
fn resume_rejects_altered_job_and_corrupt_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n3.ckpt");
    let job = SearchJob::exhaustive(3, &[Metric::EntOverI]);
    run_with_checkpoint(&job, Some(&path), Some(10)).unwrap();

    let altered = SearchJob::exhaustive(2, &[Metric::EntOverI]);
    assert!(matches!(resume(&path, Some(&altered), None), Err(Error::CheckpointMismatch { .. })));

    let mut bytes = std::fs::read(&path).unwrap();
    let text = String::from_utf8_lossy(&bytes).into_owned();
    let tampered = text.replacen("\"n\":3", "\"n\":2", 1);
    std::fs::write(&path, tampered.as_bytes()).unwrap();
    assert!(resume(&path, None, None).is_err());

    bytes.truncate(bytes.iter().position(|&b| b == b'\n').unwrap() + 3);
    std::fs::write(&path, &bytes).unwrap();
    assert!(matches!(resume(&path, None, None), Err(Error::CheckpointCorrupt(_))));
    assert!(matches!(resume(&dir.path().join("missing"), None, None), Err(Error::Io(_))));
}

#[test]
fn and_function_is_the_q31_witness_shape_at_n3() {
    let out = run(&SearchJob::exhaustive(3, &[Metric::Q31Worst])).unwrap();
    let rec = &out.records[0];
    let f = BooleanFunction::from_hex(3, &rec.witness.hex).unwrap();
    assert!(rec.value >= 1.5 - 1e-12, "And gives 3/2, the sweep max is at least that: {}", rec.value);
    assert_eq!(rec.context.n, 3);
    assert!(!f.is_constant());
}
