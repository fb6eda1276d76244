use std::path::Path;
use std::process::{Command, Output};

use ttdmd::io;
use ttdmd::sweep::SweepReport;
use ttdmd::dmd::Variant;

fn ttdmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ttdmd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn synth(dir: &Path, extra: &[&str]) -> String {
    let out = dir.to_str().unwrap();
    let mut args = vec!["synth", "--output-dir", out];
    args.extend_from_slice(extra);
    let o = ttdmd(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    dir.join("series.ttdn").to_str().unwrap().to_string()
}

/// Eigenvalue rows `(re, im)` of the table printed for `engine`.
fn table_rows(text: &str, engine: &str) -> Vec<(f64, f64)> {
    let mut rows = Vec::new();
    let mut inside = false;
    for line in text.lines() {
        if line.starts_with("# engine:") {
            inside = line.contains(&format!("engine: {engine},"));
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if inside && cols.len() == 5 && cols[0].parse::<usize>().is_ok() {
            rows.push((cols[1].parse().unwrap(), cols[2].parse().unwrap()));
        }
    }
    rows
}

#[test]
fn synth_writes_series_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let series = synth(dir.path(), &["--dims", "4x5", "--snapshots", "6", "--seed", "9"]);
    let t = io::read_dense(&series).unwrap();
    assert_eq!(t.shape().dims(), &[4, 5, 7]);
    let meta = io::Metadata::read(dir.path().join("series.meta")).unwrap();
    assert_eq!(meta.get("dims"), Some("4x5"));
    assert_eq!(meta.get("m"), Some("6"));
    assert_eq!(meta.get("dt"), Some("0.1"));
    assert_eq!(meta.get("seed"), Some("9"));
    assert_eq!(meta.get("modes").unwrap().split(';').count(), 2);
}

#[test]
fn decompose_rank_one_and_full_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let series = synth(dir.path(), &["--preset", "decay", "--dims", "3x4", "--snapshots", "4"]);
    let out = dir.path().join("x.tttr");
    let o = ttdmd(&["decompose", "--input", &series, "--output", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("ranks: 1 1 1 1"), "{}", stdout(&o));
    let train = io::read_train(&out).unwrap();
    assert_eq!(train.ranks(), vec![1, 1, 1, 1]);

    let series = synth(dir.path(), &["--dims", "6x5", "--snapshots", "9"]);
    let o = ttdmd(&["decompose", "--input", &series, "--epsilon", "0", "--output", out.to_str().unwrap()]);
    let ranks: Vec<usize> = stdout(&o).lines().next().unwrap()["ranks: ".len()..]
        .split(' ')
        .map(|s| s.parse().unwrap())
        .collect();
    assert!(ranks[1..3].iter().all(|&r| r <= 4), "{ranks:?}");

    let o = ttdmd(&["decompose", "--input", &series, "--epsilon", "1e30", "--output", out.to_str().unwrap()]);
    let text = stdout(&o);
    assert!(text.contains("ranks: 1 1 1 1"), "{text}");
    assert!(text.contains("discarded energy: 1.00000e0"), "{text}");
}

#[test]
fn dmd_engines_agree_on_two_mode() {
    let dir = tempfile::tempdir().unwrap();
    let series = synth(dir.path(), &["--dims", "6x5", "--snapshots", "12"]);
    let modes = dir.path().join("modes");
    let o = ttdmd(&[
        "dmd",
        "--series",
        &series,
        "--engine",
        "both",
        "--output-dir",
        modes.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let dense = table_rows(&text, "dense");
    let tt = table_rows(&text, "tt");
    assert_eq!(dense.len(), 4);
    for (a, b) in dense.iter().zip(&tt) {
        assert!((a.0 - b.0).abs() < 1e-5 && (a.1 - b.1).abs() < 1e-5);
    }
    let line = text.lines().find(|l| l.contains("max eigenvalue discrepancy")).unwrap();
    let worst: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(worst <= 1e-9, "{line}");
    let m = io::read_matrix(modes.join("modes_tt.ttmc")).unwrap();
    assert_eq!(m.shape(), (30, 4));
}

#[test]
fn dmd_reports_decay_rate() {
    let dir = tempfile::tempdir().unwrap();
    let series = synth(dir.path(), &["--preset", "decay", "--dims", "4x3", "--snapshots", "5"]);
    let o = ttdmd(&["dmd", "--series", &series, "--variant", "exact"]);
    assert!(o.status.success());
    let rows = table_rows(&stdout(&o), "tt");
    assert_eq!(rows.len(), 1);
    assert!((rows[0].0 - 0.9).abs() < 1e-6 && rows[0].1.abs() < 1e-6);
}

#[test]
fn dmd_identity_dynamics() {
    let dir = tempfile::tempdir().unwrap();
    let series = synth(dir.path(), &["--preset", "decay", "--rho", "1", "--dims", "3x3", "--snapshots", "4"]);
    let o = ttdmd(&["dmd", "--series", &series, "--engine", "dense"]);
    let text = stdout(&o);
    let rows = table_rows(&text, "dense");
    assert_eq!(rows.len(), 1);
    assert!((rows[0].0 - 1.0).abs() < 1e-12 && rows[0].1.abs() < 1e-12);
    assert!(text.lines().any(|l| l.trim_end().ends_with("0.00000e0")));
}

#[test]
fn dmd_accepts_train_operands() {
    let dir = tempfile::tempdir().unwrap();
    let series = synth(dir.path(), &["--dims", "5x4", "--snapshots", "8"]);
    let t = io::read_dense(&series).unwrap();
    let (x, y) = ttdmd::synth::split_series(&t).unwrap();
    let xp = dir.path().join("x.tttr");
    let yp = dir.path().join("y.ttdn");
    io::write_train(&xp, &ttdmd::tt::tt_svd(&x, 0.0).unwrap()).unwrap();
    io::write_dense(&yp, &y).unwrap();
    let o = ttdmd(&[
        "dmd",
        "--x",
        xp.to_str().unwrap(),
        "--y",
        yp.to_str().unwrap(),
        "--dt",
        "0.1",
        "--engine",
        "both",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(table_rows(&stdout(&o), "tt").len(), 4);
}

#[test]
fn sweep_writes_round_trippable_csv() {
    let dir = tempfile::tempdir().unwrap();
    let series = synth(dir.path(), &["--preset", "graded", "--dims", "6x5", "--snapshots", "14", "--count", "3"]);
    let csv = dir.path().join("sweep.csv");
    let o = ttdmd(&["sweep", "--series", &series, "--epsilons", "0,1e-10,1e-5", "--csv", csv.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("epsilon,ranks,t_dense_ms,t_tt_ms,e_lambda_0,e_phi_0"));
    let report = SweepReport::read_csv(text.as_bytes(), Variant::Standard).unwrap();
    assert_eq!(report.rows.len(), 3);
    assert!(report.rows[0].errors.iter().all(|&(l, p)| l == 0.0 && p == 0.0));
    assert_eq!(report.to_csv().unwrap(), text);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let series = synth(dir.path(), &["--dims", "3x3", "--snapshots", "4"]);

    // argument errors
    assert_eq!(ttdmd(&["dmd"]).status.code(), Some(2));
    assert_eq!(ttdmd(&["sweep", "--series", &series, "--epsilons", "1e-5,1e-3"]).status.code(), Some(2));
    assert_eq!(ttdmd(&["synth", "--dims", "3xq", "--output-dir", dir.path().to_str().unwrap()]).status.code(), Some(2));

    // format errors
    let junk = dir.path().join("junk.ttdn");
    std::fs::write(&junk, b"NOPE\x01\x00\x00\x00").unwrap();
    let out = dir.path().join("o.tttr");
    let o = ttdmd(&["decompose", "--input", junk.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("offset 0"));

    // degenerate input
    let zero = dir.path().join("zero.ttdn");
    let z = ttdmd::tt::DenseTensor::zeros(ttdmd::tt::Shape::new(vec![3, 3, 5]).unwrap());
    io::write_dense(&zero, &z).unwrap();
    for engine in ["dense", "tt"] {
        let o = ttdmd(&["dmd", "--series", zero.to_str().unwrap(), "--dt", "1", "--engine", engine]);
        assert_eq!(o.status.code(), Some(4), "{engine}");
    }
}
