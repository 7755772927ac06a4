//! End-to-end tests for the `sstuq` binary: artifact layout, error codes,
//! config-file precedence, and bit-level determinism of seeded runs.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sstuq"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn sstuq");
    assert!(
        out.status.success(),
        "expected success for {args:?}\nstderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Run expecting failure; returns stderr for message checks.
fn run_err(args: &[&str], code: i32) -> String {
    let out = bin().args(args).output().expect("spawn sstuq");
    assert_eq!(
        out.status.code(),
        Some(code),
        "args: {args:?}\nstderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("read {name}: {e}"))
}

fn read_bytes(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap_or_else(|e| panic!("read {name}: {e}"))
}

fn manifest_value(dir: &Path, key: &str) -> String {
    let text = read(dir, "run_manifest.txt");
    for line in text.lines() {
        if let Some(v) = line.strip_prefix(&format!("{key}=")) {
            return v.to_string();
        }
    }
    panic!("run_manifest.txt has no key {key}");
}

#[test]
fn simulate_null_writes_n_rows_and_seeds_differ() {
    let tmp = tempfile::tempdir().unwrap();
    let d1 = tmp.path().join("s1");
    let d2 = tmp.path().join("s2");
    run_ok(&["simulate", "null", "--n", "2048", "--seed", "1", "--out-dir", d1.to_str().unwrap()]);
    run_ok(&["simulate", "null", "--n", "2048", "--seed", "2", "--out-dir", d2.to_str().unwrap()]);

    let csv = read(&d1, "series.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "time_s,value");
    assert_eq!(lines.len(), 2049, "header plus n rows");

    // different seeds must produce different artifacts
    assert_ne!(read_bytes(&d1, "series.csv"), read_bytes(&d2, "series.csv"));
}

#[test]
fn simulate_ahm_writes_truth_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("ahm");
    run_ok(&["simulate", "ahm", "--n", "2048", "--seed", "1", "--out-dir", dir.to_str().unwrap()]);

    let csv = read(&dir, "series.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "time_s,value,am,if_hz,phase_cycles");
    assert_eq!(lines.count(), 2048);
}

#[test]
fn analyze_emits_five_files_with_deterministic_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("a");
    let args = [
        "analyze", "--simulate", "ahm", "--n", "2048", "--seed", "7",
        "--out-dir", dir.to_str().unwrap(),
    ];
    run_ok(&args);

    let mut names: Vec<String> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["component.csv", "ridge.csv", "run_manifest.txt", "sst.csv", "stft.csv"]
    );

    // stash the artifacts, re-run the identical command, compare bytes
    let first: Vec<Vec<u8>> = names.iter().map(|n| read_bytes(&dir, n)).collect();
    run_ok(&args);
    for (name, bytes) in names.iter().zip(&first) {
        assert_eq!(
            &read_bytes(&dir, name),
            bytes,
            "{name} differs between identical seeded runs"
        );
    }
}

#[test]
fn analyze_round_trips_exported_series() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    let out = tmp.path().join("out");
    // n = 2048 gives the generator's native rate of sqrt(2048) ~ 45.25 Hz
    run_ok(&["simulate", "null", "--n", "2048", "--seed", "9", "--out-dir", sim.to_str().unwrap()]);
    let series = sim.join("series.csv");
    run_ok(&[
        "analyze", "--input", series.to_str().unwrap(), "--rate", "45.25",
        "--bins", "64", "--skip-recon", "--out-dir", out.to_str().unwrap(),
    ]);

    // the file carries its own clock, which wins over the approximate flag
    let rate = manifest_value(&out, "rate-hz");
    assert!(rate.starts_with("45.25"), "rate-hz={rate}");

    // the time axis of the emitted TFR must reproduce the ingested clock exactly
    let src_times: Vec<f64> = read(&sim, "series.csv")
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    let mut tfr_times: Vec<f64> = Vec::new();
    for line in read(&out, "stft.csv").lines().skip(1) {
        let t: f64 = line.split(',').next().unwrap().parse().unwrap();
        if tfr_times.last() != Some(&t) {
            tfr_times.push(t);
        }
    }
    assert_eq!(src_times.len(), tfr_times.len());
    for (a, b) in src_times.iter().zip(&tfr_times) {
        assert_eq!(a.to_bits(), b.to_bits(), "time axis drifted: {a} vs {b}");
    }
}

#[test]
fn single_column_series_without_rate_exits_2_naming_rate() {
    let tmp = tempfile::tempdir().unwrap();
    let bare = tmp.path().join("bare.csv");
    fs::write(&bare, "value\n1.0\n-0.5\n0.25\n2.0\n").unwrap();
    let err = run_err(
        &["analyze", "--input", bare.to_str().unwrap(), "--out-dir", tmp.path().to_str().unwrap()],
        2,
    );
    assert!(err.contains("rate_hz"), "stderr should name rate_hz: {err}");
}

#[test]
fn invalid_flag_domain_exits_2_naming_field() {
    let tmp = tempfile::tempdir().unwrap();
    let err = run_err(
        &[
            "analyze", "--simulate", "null", "--n", "256", "--beta-s", "0",
            "--out-dir", tmp.path().to_str().unwrap(),
        ],
        2,
    );
    assert!(err.contains("beta-s"), "stderr should name beta-s: {err}");
}

#[test]
fn unknown_config_key_exits_2_naming_key() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "mboot=5\n").unwrap();
    let err = run_err(
        &[
            "analyze", "--simulate", "null", "--n", "256",
            "--config", cfg.to_str().unwrap(),
            "--out-dir", tmp.path().to_str().unwrap(),
        ],
        2,
    );
    assert!(err.contains("mboot"), "stderr should name the bad key: {err}");
}

#[test]
fn flags_override_config_file_which_overrides_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, "# analysis grid\nbins=64\n").unwrap();

    let from_file = tmp.path().join("file");
    run_ok(&[
        "analyze", "--simulate", "null", "--n", "256", "--skip-recon",
        "--config", cfg.to_str().unwrap(), "--out-dir", from_file.to_str().unwrap(),
    ]);
    assert_eq!(manifest_value(&from_file, "bins"), "64");

    let from_flag = tmp.path().join("flag");
    run_ok(&[
        "analyze", "--simulate", "null", "--n", "256", "--skip-recon",
        "--config", cfg.to_str().unwrap(), "--bins", "96",
        "--out-dir", from_flag.to_str().unwrap(),
    ]);
    assert_eq!(manifest_value(&from_flag, "bins"), "96");

    let from_default = tmp.path().join("default");
    run_ok(&[
        "analyze", "--simulate", "null", "--n", "256", "--skip-recon",
        "--out-dir", from_default.to_str().unwrap(),
    ]);
    assert_eq!(manifest_value(&from_default, "bins"), "85"); // max(n/3, 32)
}

#[test]
fn numeric_failure_exits_3_naming_stage() {
    let tmp = tempfile::tempdir().unwrap();
    // 4 * 8 = 32 tvAR parameters cannot be fit from 128 samples
    let err = run_err(
        &[
            "bootstrap", "--simulate", "null", "--n", "128", "--assume-null",
            "--m-boot", "60", "--coarse-times", "8", "--coarse-freqs", "8",
            "--order-b", "4", "--basis-m", "8",
            "--out-dir", tmp.path().to_str().unwrap(),
        ],
        3,
    );
    assert!(err.contains("fit-tvar"), "stderr should name the stage: {err}");
}

#[test]
fn threshold_emits_surface_and_thresholded_sst() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("th");
    run_ok(&[
        "threshold", "--simulate", "null", "--n", "512", "--seed", "3",
        "--assume-null", "--m-boot", "60", "--coarse-times", "8",
        "--coarse-freqs", "8", "--bins", "96", "--out-dir", dir.to_str().unwrap(),
    ]);

    let surface = read(&dir, "threshold.csv");
    assert_eq!(surface.lines().next().unwrap(), "time_s,freq_hz,threshold");
    let kept = read(&dir, "sst_thresholded.csv");
    assert_eq!(kept.lines().next().unwrap(), "time_s,freq_hz,re,im");
    assert!(dir.join("model.txt").exists());
}

#[test]
fn seeded_runs_are_bit_identical_across_jobs() {
    let tmp = tempfile::tempdir().unwrap();

    // bootstrap artifacts: repeat at --jobs 1 and --jobs 4
    let mut boot_dirs = Vec::new();
    for (tag, jobs) in [("j1", "1"), ("j4", "4"), ("j4b", "4")] {
        let dir = tmp.path().join(format!("boot_{tag}"));
        run_ok(&[
            "bootstrap", "--simulate", "null", "--n", "512", "--seed", "3",
            "--assume-null", "--m-boot", "60", "--coarse-times", "8",
            "--coarse-freqs", "8", "--bins", "96", "--emit-threshold",
            "--jobs", jobs, "--out-dir", dir.to_str().unwrap(),
        ]);
        boot_dirs.push(dir);
    }
    for name in ["bands.csv", "threshold.csv", "model.txt"] {
        let first = read_bytes(&boot_dirs[0], name);
        for dir in &boot_dirs[1..] {
            assert_eq!(first, read_bytes(dir, name), "{name} depends on --jobs");
        }
    }

    // analyze artifacts across thread counts
    let a1 = tmp.path().join("an_j1");
    let a4 = tmp.path().join("an_j4");
    for (dir, jobs) in [(&a1, "1"), (&a4, "4")] {
        run_ok(&[
            "analyze", "--simulate", "ahm", "--n", "1024", "--seed", "5",
            "--jobs", jobs, "--out-dir", dir.to_str().unwrap(),
        ]);
    }
    for name in ["stft.csv", "sst.csv", "ridge.csv", "component.csv"] {
        assert_eq!(read_bytes(&a1, name), read_bytes(&a4, name), "{name} depends on --jobs");
    }
}
