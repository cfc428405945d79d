use std::process::{Command, Output};

fn rwpost(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rwpost"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn simulate_writes_the_cdf_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = rwpost(&[
        "simulate", "--model", "normal", "--prior", "trunc-normal:0,1,-10,10", "--theta", "-0.3",
        "--n", "40", "--reps", "2000", "--seed", "3", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("y,F_rw,F_oracle,F_thm1,F_thm2"));
    assert_eq!(lines.count(), 1601);
}

#[test]
fn convergence_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, format: &str| {
        let out = dir.path().join(name);
        let o = rwpost(&[
            "convergence", "--model", "exp", "--prior", "trunc-gamma:2,1,0,50", "--n-grid", "15,30",
            "--data-reps", "2", "--reps", "1000", "--seed", "9", "--format", format, "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(out).unwrap()
    };
    let a = run("a.csv", "csv");
    assert_eq!(a, run("b.csv", "csv"));
    assert_eq!(a.lines().count(), 5);
    assert!(a.starts_with(
        "n,rep,theta_true,theta_hat,b2,r_n,a_n,beta_n,beta_n_prime,D_rw_oracle,sqrtn_D,D_thm1_oracle,D_thm2_raw,skipped,reason\n"
    ));
    let json = run("a.json", "json");
    assert!(json.contains("\"metadata\""));
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    let out = out.to_str().unwrap();
    for args in [
        vec!["frobnicate"],
        vec!["simulate", "--model", "normal"],
        vec!["simulate", "--model", "cauchy", "--prior", "bump:-1,1", "--n", "10", "--out", out],
        vec!["simulate", "--model", "normal", "--prior", "bump:1,-1", "--n", "10", "--out", out],
        vec!["simulate", "--model", "normal", "--prior", "bump:-1,1", "--theta", "abc", "--n", "10", "--out", out],
        vec!["convergence", "--model", "normal", "--prior", "bump:-1,1", "--n-grid", "40,20", "--out", out],
        vec!["convergence", "--model", "normal", "--prior", "bump:-1,1", "--n-grid", "20", "--reps", "10", "--out", out],
        vec!["convergence", "--model", "normal", "--prior", "bump:-1,1", "--n-grid", "20", "--format", "xml", "--out", out],
        vec!["check", "--suite", "nope"],
    ] {
        let o = rwpost(&args);
        assert_eq!(code(&o), 1, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn fit_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    // θ̂ far outside the prior support
    let o = rwpost(&[
        "simulate", "--model", "normal", "--prior", "bump:5,6", "--theta", "0", "--n", "50",
        "--reps", "1000", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    // unwritable output path
    let bad = dir.path().join("no").join("such").join("file.csv");
    let o = rwpost(&[
        "simulate", "--model", "normal", "--prior", "bump:-5,5", "--theta", "0", "--n", "50",
        "--reps", "1000", "--out", bad.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("such"));
}

#[test]
fn help_and_version_exit_with_zero() {
    assert_eq!(code(&rwpost(&["--help"])), 0);
    assert_eq!(code(&rwpost(&["--version"])), 0);
    assert_eq!(code(&rwpost(&["simulate", "--help"])), 0);
}

#[test]
fn check_suites_pass() {
    let o = rwpost(&["check", "--suite", "oracle"]);
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().count(), 3);
    assert!(stdout.lines().all(|l| l.starts_with("PASS ")));
}
