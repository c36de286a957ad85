use std::process::{Command, Output};

use jackdiv::{jack_c, DivisionAlgebra, Partition, SpectralArgument};

fn jackdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jackdiv")).args(args).env_remove("JACKDIV_THREADS").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn jack_matches_library() {
    let o = jackdiv(&["jack", "--kappa", "[2,1]", "--beta", "2", "--eigs", "1,2,3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let printed: f64 = stdout(&o).trim().parse().unwrap();
    let want = jack_c(
        &Partition::new(vec![2, 1]).unwrap(),
        &SpectralArgument::from_slice(&[1.0, 2.0, 3.0]).unwrap(),
        DivisionAlgebra::COMPLEX,
    );
    assert_eq!(printed, want);
}

#[test]
fn figure_one_table_shape_and_monotonicity() {
    let o = jackdiv(&["figures", "fig1", "--grid", "0:30:120"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = parse_csv(&stdout(&o));
    assert_eq!(header, ["x", "beta1", "beta2", "beta4", "beta8"]);
    assert_eq!(rows.len(), 120);
    for col in 1..5 {
        assert!(rows.iter().all(|r| r.len() == 5 && (0.0..=1.0).contains(&r[col])));
        assert!(rows.windows(2).all(|w| w[1][col] >= w[0][col]), "column {col} not monotone");
    }
}

#[test]
fn figure_two_with_empirical_columns_is_byte_stable() {
    let args = ["figures", "fig2", "--grid", "0:15:16", "--samples", "3000", "--seed", "9"];
    let a = jackdiv(&args);
    let mut with_threads = args.to_vec();
    with_threads.extend(["--threads", "3"]);
    let b = jackdiv(&with_threads);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let (header, rows) = parse_csv(&stdout(&a));
    assert_eq!(header.len(), 8);
    for r in &rows {
        for j in 0..3 {
            assert!((r[1 + j] - r[5 + j]).abs() < 0.05, "row {r:?}");
        }
    }
    assert!(stderr(&a).contains("seed: 9"));
}

#[test]
fn lambda_min_condition_is_reported() {
    let o = jackdiv(&["cdf-min", "--beta", "1", "--m", "2", "--n", "6", "--sigma", "1,2", "--x", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("r=(n-m+1)beta/2-1 a positive integer"), "{err}");
}

#[test]
fn lambda_min_values() {
    let o = jackdiv(&["cdf-min", "--beta", "2", "--n", "7", "--sigma", "1,2", "--x", "0,1,50"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = parse_csv(&stdout(&o));
    assert_eq!(rows[0][1], 0.0);
    assert!(rows[1][1] > 0.0 && rows[1][1] < 1.0);
    assert!((rows[2][1] - 1.0).abs() < 1e-12);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# jack at a fixed spectrum\nbeta = 2\nkappa = [2,1]\neigs = 1,2,3\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = jackdiv(&["jack", "--config", cfg]);
    let direct = jackdiv(&["jack", "--kappa", "[2,1]", "--beta", "2", "--eigs", "1,2,3"]);
    assert!(from_file.status.success(), "{}", stderr(&from_file));
    assert_eq!(from_file.stdout, direct.stdout);
    let overridden = jackdiv(&["jack", "--config", cfg, "--beta", "1"]);
    let real = jackdiv(&["jack", "--kappa", "[2,1]", "--beta", "1", "--eigs", "1,2,3"]);
    assert_eq!(overridden.stdout, real.stdout);
    assert_ne!(overridden.stdout, direct.stdout);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "kappa = [1]\nnot_a_flag = 3\n").unwrap();
    let o = jackdiv(&["jack", "--config", cfg.to_str().unwrap(), "--eigs", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown key \"not_a_flag\""));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let o = jackdiv(&["gamma", "--a", "1.5", "--m", "2", "--output", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: f64 = std::fs::read_to_string(&path).unwrap().trim().parse().unwrap();
    assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
}

#[test]
fn invalid_algebra_is_a_single_line_error() {
    let o = jackdiv(&["pfq", "--a", "1", "--b", "2", "--eigs", "0.5", "--beta", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn verify_quick_passes_and_is_thread_independent() {
    let a = jackdiv(&["verify", "all", "--quick", "--threads", "1"]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert!(stderr(&a).contains("seed: 20240611 (default)"));
    let b = Command::new(env!("CARGO_BIN_EXE_jackdiv"))
        .args(["verify", "all", "--quick"])
        .env("JACKDIV_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("identity_id,param_digest,"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}
