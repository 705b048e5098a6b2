use std::fs;
use std::process::{Command, Output};

fn sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stirap-sim"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn suppression_at_ninety_percent_gain_is_twenty_db() {
    let o = sim(&[
        "suppression",
        "--gain-min",
        "0.9",
        "--gain-max",
        "1.1",
        "--points",
        "3",
        "--delay",
        "0",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(
        lines.next(),
        Some("gain,suppression_db,frequency_hz,delay_ns")
    );
    assert!(lines.next().unwrap().starts_with("0.9,20.0,"));
}

#[test]
fn validate_prints_resolved_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "experiment = \"rabi_landscape\"\n").unwrap();
    let o = sim(&["validate", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("gamma_hz = 35000.0"));
    assert!(out.contains("linewidth_sigma_hz = 346.0"));
}

#[test]
fn invalid_config_exits_nonzero_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(
        &cfg,
        "experiment = \"duration_sweep\"\nn_realizations = 0\n",
    )
    .unwrap();
    let o = sim(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n_realizations"));
    assert!(!dir.path().join("results").exists());
}

#[test]
fn run_writes_the_three_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(
        &cfg,
        "experiment = \"suppression_curve\"\noutput_dir = \"out\"\nsuppression_delay_ns = 55.0\n",
    )
    .unwrap();
    let o = sim(&["run", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["results.csv", "resolved_config.toml", "metadata.json"] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
}

#[test]
fn fit_command_reads_csv() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    let mut csv = String::from("x,y,sigma\n");
    for k in 1..=5 {
        let n = 2 * k;
        csv.push_str(&format!("{n},{},0.001\n", 0.8 * 0.942f64.powi(n)));
    }
    fs::write(&data, csv).unwrap();
    let o = sim(&["fit", "--kind", "loglinear", data.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    let eta: f64 = out
        .lines()
        .find(|l| l.starts_with("eta,"))
        .and_then(|l| l.split(',').nth(1))
        .unwrap()
        .parse()
        .unwrap();
    assert!((eta - 0.942).abs() < 1e-9);
}

#[test]
fn missing_file_fails() {
    let o = sim(&["fit", "--kind", "eta", "/nonexistent/points.csv"]);
    assert!(!o.status.success());
    assert!(!o.stderr.is_empty());
}
