use std::path::Path;
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use snwit::commands::{cmd_witness, table1, write_table1};
use snwit::io::{builtin, read_state, write_state, MatrixFile};
use snwit_core::qstate::random_sn_bounded;
use snwit_core::WitnessMethod;

fn snwit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snwit")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// The number following `key` on its line.
fn value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key).filter(|rest| rest.starts_with(' ')))
        .and_then(|rest| rest.split_whitespace().next())
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
}

fn write_matrix(path: &Path, n: usize, entries: Vec<f64>) {
    let m = MatrixFile { rows: n, cols: n, entries };
    std::fs::write(path, serde_json::to_string(&m).unwrap()).unwrap();
}

#[test]
fn osc_of_bell_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bell.state.json");
    write_state(&path, &builtin("maxent:2").unwrap()).unwrap();
    assert_eq!(read_state(&path).unwrap(), builtin("maxent:2").unwrap());

    let text = stdout(&snwit(&["osc", "--input", path.to_str().unwrap()]));
    for i in 1..=4 {
        assert!((value(&text, &format!("mu_{i}")) - 0.5).abs() < 1e-10, "{text}");
    }
}

#[test]
fn osc_of_rho0() {
    let text = stdout(&snwit(&["osc", "--builtin", "rho0"]));
    assert_eq!(text.lines().filter(|l| l.starts_with("mu_")).count(), 16);
    assert!((value(&text, "mu_1") - 0.3469).abs() < 1e-3);
    assert!((value(&text, "purity") - 0.5).abs() < 1e-12);
}

#[test]
fn osc_csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mu.csv");
    stdout(&snwit(&["osc", "--builtin", "maxmixed:3", "--out", path.to_str().unwrap()]));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("index,mu"));
    assert_eq!(text.lines().nth(1), Some("1,0.3333333333"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn file_errors_exit_with_two() {
    let o = snwit(&["osc", "--input", "/nonexistent/state.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/state.json"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"dimA\": 2,\n  \"dimB\": 2,\n  \"matrix\": [[\n}").unwrap();
    let o = snwit(&["osc", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"), "{}", String::from_utf8_lossy(&o.stderr));

    // Twice the maximally mixed state: Hermitian and PSD but trace 2.
    let doubled = dir.path().join("doubled.json");
    let mut file = snwit::io::StateFile::from_state(&builtin("maxmixed:2").unwrap());
    file.matrix.iter_mut().flatten().for_each(|z| z[0] *= 2.0);
    std::fs::write(&doubled, serde_json::to_string(&file).unwrap()).unwrap();
    let o = snwit(&["osc", "--input", doubled.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unit-trace"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(snwit(&["osc"]).status.code(), Some(2));
    assert_eq!(snwit(&["osc", "--builtin", "rho7"]).status.code(), Some(2));
    assert_eq!(snwit(&["ensemble", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(snwit(&["coeffs", "--builtin", "rho0", "--k", "1"]).status.code(), Some(2));
    assert_eq!(
        snwit(&["witness", "--target-builtin", "rho0", "--test-builtin", "rho0", "--k", "4", "--method", "nope"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn unwritable_output_exits_with_two() {
    let o = snwit(&["ensemble", "--samples", "1", "--pure-count", "2", "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn coeffs_examples() {
    let text = stdout(&snwit(&["coeffs", "--builtin", "rho0", "--k", "4"]));
    for key in ["theta", "zeta", "eta", "P"] {
        assert!((value(&text, key) - 0.9438).abs() < 1e-3, "{key}: {text}");
    }

    let text = stdout(&snwit(&["coeffs", "--builtin", "maxmixed:4", "--k", "4", "--numeric"]));
    for key in ["lambda", "lambda_numeric", "theta", "zeta", "eta", "P"] {
        assert!((value(&text, key) - 0.25).abs() < 1e-9, "{key}: {text}");
    }

    let text = stdout(&snwit(&["coeffs", "--builtin", "rho_family:5", "--k", "5", "--restarts", "4"]));
    assert!(text.contains("no exact method"));
    assert!(value(&text, "lambda_numeric") <= value(&text, "theta"));
}

#[test]
fn coeffs_csv_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    stdout(&snwit(&["coeffs", "--builtin", "rho_family:3", "--k", "3", "--out", path.to_str().unwrap()]));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,target_sn,lambda_exact,lambda_numeric,theta,zeta,eta,P,purity"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..2], &["3", "4"]);
    assert_eq!(row[3], "");
    assert_eq!(row[7], "1.000000000");
}

#[test]
fn table1_is_reproducible() {
    let a = stdout(&snwit(&["table1", "--restarts", "8"]));
    let b = stdout(&snwit(&["table1", "--restarts", "8"]));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 5);
    assert!(a.lines().nth(4).unwrap().contains(",numeric,"));

    let rows = table1(8).unwrap();
    let mut buf = Vec::new();
    write_table1(&rows, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), a);
    let rho4 = &rows[2];
    assert!((rho4.theta - 0.9330).abs() < 2e-3 && (rho4.zeta - 0.9568).abs() < 2e-3);
    assert!((rho4.eta - 0.9634).abs() < 2e-3 && (rho4.big_p - 1.0).abs() < 2e-3);
}

#[test]
fn ensemble_rank_deficient_rows_have_equal_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    let args = ["ensemble", "--k", "10", "--dim", "10", "--pure-count", "5", "--schmidt-rank", "4", "--samples", "6"];
    stdout(&snwit(&[&args[..], &["--restarts", "4", "--out", path.to_str().unwrap()]].concat()));
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        let f = |i: usize| rec[i].parse::<f64>().unwrap();
        let (theta, zeta, eta, p) = (f(7), f(8), f(9), f(10));
        assert!((theta - p).abs() < 1e-9 && (zeta - p).abs() < 1e-9 && (eta - p).abs() < 1e-9, "{rec:?}");
        assert_eq!(&rec[5], "");
        rows += 1;
    }
    assert_eq!(rows, 6);
}

#[test]
fn ensemble_haar_rows_keep_the_chain() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    let args = ["ensemble", "--k", "3", "--dim", "3", "--pure-count", "200", "--samples", "8", "--dirichlet"];
    stdout(&snwit(&[&args[..], &["--out", path.to_str().unwrap()]].concat()));
    let mut reader = csv::Reader::from_path(&path).unwrap();
    for rec in reader.records() {
        let rec = rec.unwrap();
        let v: Vec<f64> = (5..=10).map(|i| rec[i].parse().unwrap()).collect();
        assert!(v[1] <= v[0] + 1e-9, "{rec:?}");
        assert!(v[1..].windows(2).all(|w| w[0] <= w[1] + 1e-9), "{rec:?}");
    }
}

#[test]
fn bounds_examples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    write_matrix(&path, 2, vec![1.0, 2.0, 3.0, 4.0]);
    let text = stdout(&snwit(&["bounds", "--input", path.to_str().unwrap()]));
    assert!((value(&text, "spectral_radius") - 5.3723).abs() < 1e-4);
    assert!(text.contains("frobenius  lower 3.000000000"), "{text}");

    write_matrix(&path, 3, vec![1.0; 9]);
    let text = stdout(&snwit(&["bounds", "--input", path.to_str().unwrap()]));
    assert_eq!(text.matches("lower 3.000000000").count(), 4, "{text}");
    assert_eq!(text.matches("upper 3.000000000").count(), 4, "{text}");

    let mut entries: Vec<f64> = (0..25).map(|i| ((i * 7) % 11) as f64 / 10.0).collect();
    entries[3] = 0.0;
    write_matrix(&path, 5, entries);
    let text = stdout(&snwit(&["bounds", "--input", path.to_str().unwrap()]));
    let line = |name: &str| text.lines().find(|l| l.starts_with(name)).unwrap()[10..].to_string();
    assert_eq!(line("frobenius"), line("brauer"));

    write_matrix(&path, 2, vec![1.0, -2.0, 3.0, 4.0]);
    assert_eq!(snwit(&["bounds", "--input", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn witness_examples() {
    let text = stdout(&snwit(&["witness", "--target-builtin", "rho0", "--test-builtin", "rho0", "--k", "4"]));
    assert!(value(&text, "value") > 0.18);
    assert!(text.contains("not certified"));

    let text = stdout(&snwit(&[
        "witness",
        "--target-builtin",
        "maxent:4",
        "--test-builtin",
        "maxent:4",
        "--k",
        "3",
        "--method",
        "fixed:3/4",
    ]));
    assert!((value(&text, "value") + 0.25).abs() < 1e-12);
    assert!(text.contains("SN >= 4 certified"));

    let o = snwit(&["witness", "--target-builtin", "rho0", "--test-builtin", "maxmixed:3", "--k", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn witness_never_certifies_low_schmidt_number() {
    let target = builtin("maxent:4").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let sigma = random_sn_bounded(4, 3, 20, &mut rng).unwrap();
        let mut sink = Vec::new();
        let v = cmd_witness(&target, &sigma, 3, WitnessMethod::Theta, &mut sink).unwrap();
        assert!(!v.certified, "{v:?}");
        let v = cmd_witness(&target, &sigma, 3, WitnessMethod::Fixed(0.75), &mut sink).unwrap();
        assert!(!v.certified, "{v:?}");
    }
}
