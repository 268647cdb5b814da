use std::fs;
use std::path::Path;
use std::process::Command;

use gplab_cli::plot::{figure, plot_data};
use gplab_cli::{run, Experiment, ExperimentConfig, PlotKind, RunReport};

fn gplab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gplab")).args(args).output().expect("spawn gplab")
}

fn small_evolve(dir: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::defaults(Experiment::Evolve);
    for (k, v) in [("n", "128"), ("rmax", "40"), ("steps", "40"), ("dt", "0.005"), ("energy_every", "10")] {
        cfg.set(k, v).unwrap();
    }
    cfg.output_dir = dir.to_path_buf();
    cfg
}

/// Rows of a CSV with comment lines dropped.
fn body(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with('#')).map(str::to_string).collect()
}

#[test]
fn config_file_round_trips_and_rejects_unknown_keys() {
    for e in Experiment::ALL {
        let mut cfg = ExperimentConfig::defaults(e);
        cfg.seed = 7;
        let back = ExperimentConfig::parse(&cfg.serialize()).unwrap();
        assert_eq!(back, cfg, "{}", e.name());
    }
    let err = ExperimentConfig::parse("experiment = evolve\nbogus = 1\n").unwrap_err();
    assert!(format!("{err:#}").contains("bogus"), "{err:#}");
}

#[test]
fn symbol_check_defaults_cover_every_band() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::defaults(Experiment::SymbolCheck);
    cfg.output_dir = dir.path().to_path_buf();
    let report = run(&cfg).unwrap();
    assert!(report.pass);
    let rows = body(&dir.path().join("symbol_check.csv"));
    assert_eq!(rows.len(), 1 + 17);
    assert_eq!(RunReport::load(dir.path()).unwrap(), report);
}

#[test]
fn zero_amplitude_has_zero_energy() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_evolve(dir.path());
    cfg.set("delta", "0").unwrap();
    run(&cfg).unwrap();
    let rows = body(&dir.path().join("energy.csv"));
    assert!(rows.len() > 2);
    for r in &rows[1..] {
        for cell in r.split(',').skip(1) {
            assert_eq!(cell.parse::<f64>().unwrap(), 0.0, "{r}");
        }
    }
}

#[test]
fn reruns_are_bitwise_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ra = run(&small_evolve(a.path())).unwrap();
    let rb = run(&small_evolve(b.path())).unwrap();
    assert_eq!(body(&a.path().join("energy.csv")), body(&b.path().join("energy.csv")));
    let hashes = |r: &RunReport| r.files.iter().map(|f| (f.path.clone(), f.sha256.clone())).collect::<Vec<_>>();
    let strip = |v: Vec<(String, String)>| v.into_iter().filter(|(p, _)| p != "config.txt").collect::<Vec<_>>();
    assert_eq!(strip(hashes(&ra)), strip(hashes(&rb)));
}

#[test]
fn plotting_a_run_without_the_series_fails() {
    let dir = tempfile::tempdir().unwrap();
    let report = run(&small_evolve(dir.path())).unwrap();
    let err = figure(&report, dir.path(), PlotKind::Decay).unwrap_err();
    assert!(err.to_string().contains("missing series"), "{err}");
    assert!(figure(&report, dir.path(), PlotKind::Energy).is_ok());
}

#[test]
fn decay_plot_annotates_the_fitted_slope() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::defaults(Experiment::KernelDecay);
    cfg.set("points", "8").unwrap();
    cfg.set("tmax", "200").unwrap();
    cfg.output_dir = dir.path().to_path_buf();
    let report = run(&cfg).unwrap();
    let fig = figure(&report, dir.path(), PlotKind::Decay).unwrap();
    let data = plot_data(&fig);
    assert!(data.contains("# stationary: slope -0.5"), "{data}");
    assert!(fig.series.iter().any(|s| s.fitted));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = |name: &str| dir.path().join(name).to_str().unwrap().to_string();

    let ok = gplab(&["symbol-check", "--name", "schrodinger", "--param", "0.5", "--kmin", "-2", "--kmax", "2", "--out", &out("ok")]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));

    // a step this coarse cannot hold the energy
    let bad = gplab(&["evolve", "--n", "128", "--rmax", "40", "--dt", "0.5", "--steps", "40", "--delta", "0.5", "--out", &out("bad")]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL relative energy drift"));

    let err = gplab(&["symbol-check", "--kmin", "3", "--kmax", "2", "--out", &out("err")]);
    assert_eq!(err.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&err.stderr).contains("kmin"));
}

#[test]
fn snapshots_dump_and_diff() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let ev = gplab(&["evolve", "--n", "64", "--steps", "4", "--snapshot-every", "2", "--out", d]);
    assert!(ev.status.success());
    let s0 = format!("{d}/snapshot_00000000.bin");
    let s4 = format!("{d}/snapshot_00000004.bin");

    let dump = gplab(&["field-dump", &s0]);
    let text = String::from_utf8(dump.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 64);

    let same = gplab(&["field-diff", &s0, &s0, "--tol", "0"]);
    assert_eq!(same.status.code(), Some(0));
    let moved = gplab(&["field-diff", &s0, &s4, "--tol", "1e-30"]);
    assert_eq!(moved.status.code(), Some(1));
}
