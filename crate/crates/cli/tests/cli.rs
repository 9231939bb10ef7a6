use std::path::PathBuf;
use std::process::{Command, Output};

fn hmseries(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hmseries"))
        .args(args)
        .env_remove("HM_DIGITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hmseries-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn power_below_two_is_a_usage_error() {
    let o = hmseries(&["kn", "--n", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("N must be ≥ 2"));
}

#[test]
fn unknown_choices_are_usage_errors() {
    for args in [
        &["coeffs", "--sector", "zz", "--n", "3", "--count", "2"][..],
        &["figure", "k7"][..],
        &["--digits", "10", "coeffs", "--sector", "airy", "--count", "3"][..],
        &["--rel-tol", "0.1", "coeffs", "--sector", "airy", "--count", "3"][..],
        &["coeffs", "--sector", "d1", "--count", "3"][..],
        &["fit", "--sector", "d1", "--n", "4", "--count", "10"][..],
    ] {
        assert_eq!(hmseries(args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(hmseries(&["--help"]).status.code(), Some(0));
    assert_eq!(hmseries(&["--version"]).status.code(), Some(0));
}

#[test]
fn exponential_coefficients_as_rationals() {
    let o = hmseries(&["coeffs", "--sector", "c", "--n", "4", "--count", "2"]);
    assert!(o.status.success());
    let lines: Vec<_> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(lines, ["index,numerator,denominator", "0,1,1", "1,-2,27"]);
}

#[test]
fn quadratic_exponential_tail_vanishes() {
    let o = hmseries(&["coeffs", "--sector", "c", "--n", "2", "--count", "6"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<_> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0], "0,1,1");
    for r in &rows[1..] {
        assert!(r.ends_with(",0,1"), "{r}");
    }
}

#[test]
fn airy_power_leading_coefficient() {
    let o = hmseries(&["coeffs", "--sector", "b", "--n", "2", "--count", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().nth(1), Some("0,2,1"));
}

#[test]
fn pole_series_lists_free_data() {
    let o = hmseries(&["coeffs", "--sector", "pole3", "--count", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().count() >= 5, "{text}");
}

#[test]
fn instanton_fit_reports_rate_and_constant() {
    let o = hmseries(&["--format", "json", "fit", "--sector", "d1", "--n", "4", "--count", "120"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["digits"], 32);
    let a = v["fit"]["rate_a"].as_f64().unwrap();
    let s = v["fit"]["constant_s"].as_f64().unwrap();
    assert!((a - 0.75).abs() < 1e-4);
    assert!((s * std::f64::consts::PI - 1.0).abs() < 1e-3);
}

#[test]
fn csv_output_is_deterministic_and_round_trips() {
    let dir = scratch("round");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("d1.csv");
    let p = path.to_str().unwrap();
    let first = hmseries(&["--out", p, "coeffs", "--sector", "d1", "--n", "3", "--count", "12"]);
    assert!(first.status.success());
    let a = std::fs::read_to_string(&path).unwrap();
    let parsed = hmseries::export::read_table_csv(a.as_bytes()).unwrap();
    let exact = hmseries::coeffs::d1_coeffs(3, 11).unwrap();
    assert_eq!(parsed, exact.coeffs);
    let second = hmseries(&["coeffs", "--sector", "d1", "--n", "3", "--count", "12"]);
    assert_eq!(stdout(&second), a);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn separatrix_constants_for_small_powers() {
    let o = hmseries(&["kn", "--n", "2", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let expect = [0.671231, 1.0];
    for (rec, want) in rows.records().zip(expect) {
        let rec = rec.unwrap();
        let k: f64 = rec[1].parse().unwrap();
        let lo: f64 = rec[2].parse().unwrap();
        let hi: f64 = rec[3].parse().unwrap();
        let bound: f64 = rec[4].parse().unwrap();
        assert!((k - want).abs() < 2e-6, "{k}");
        assert!(lo <= k && k <= hi && k < bound);
    }
}

#[test]
fn figure_writes_one_file_per_curve() {
    let dir = scratch("fig");
    let o = hmseries(&["--out", dir.to_str().unwrap(), "figure", "k3"]);
    assert!(o.status.success());
    let listed: Vec<_> = stdout(&o).lines().map(PathBuf::from).collect();
    assert_eq!(listed.len(), 3);
    for f in &listed {
        let text = std::fs::read_to_string(f).unwrap();
        assert!(text.starts_with("x,y\n"));
        assert!(text.lines().count() > 100);
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
