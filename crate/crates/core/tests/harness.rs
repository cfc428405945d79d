use rwpost::harness::{
    emit_report, parse_csv_report, run_convergence, simulate_table, ExperimentConfig,
    ReportFormat, SimulateConfig, ThetaMode, YGrid, CSV_COLUMNS,
};
use rwpost::Error;

fn small_config() -> ExperimentConfig {
    let mut c = ExperimentConfig::new("normal", "trunc-normal:0,1,-10,10", vec![20, 40]);
    c.data_reps = 3;
    c.mc_draws = 2000;
    c.master_seed = 42;
    c.y_grid = YGrid {
        lo: -6.0,
        hi: 6.0,
        step: 0.05,
    };
    c
}

#[test]
fn same_config_gives_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let c = small_config();
    for format in [ReportFormat::Csv, ReportFormat::Json] {
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        emit_report(&run_convergence(&c).unwrap(), format, &a).unwrap();
        emit_report(&run_convergence(&c).unwrap(), format, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
}

#[test]
fn serial_and_parallel_runs_agree() {
    let c = small_config();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_convergence(&c).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn records_are_consistent() {
    let r = run_convergence(&small_config()).unwrap();
    assert_eq!(r.records.len(), 6);
    for rec in &r.records {
        assert!(!rec.skipped);
        let d = rec.d_rw_oracle.unwrap();
        for v in [d, rec.d_thm1_oracle.unwrap(), rec.d_thm2_raw.unwrap()] {
            assert!((0.0..=1.0).contains(&v));
        }
        assert_eq!(rec.sqrtn_d.unwrap(), (rec.n as f64).sqrt() * d);
    }
    for s in &r.summaries {
        assert_eq!(s.completed + s.skipped, 3);
        assert!(s.median_sqrtn_d.is_some());
    }
}

#[test]
fn replications_do_not_depend_on_the_rest_of_the_grid() {
    let full = run_convergence(&small_config()).unwrap();
    let mut c = small_config();
    c.n_grid = vec![40];
    let part = run_convergence(&c).unwrap();
    let full_40: Vec<_> = full.records.iter().filter(|r| r.n == 40).cloned().collect();
    assert_eq!(full_40, part.records);
}

#[test]
fn narrow_prior_produces_skip_records() {
    // θ̂ often lands outside a narrow prior when θ sits near its edge
    let mut c = ExperimentConfig::new("normal", "bump:-0.5,0.5", vec![3]);
    c.theta_true = ThetaMode::Fixed(0.45);
    c.data_reps = 40;
    c.mc_draws = 1000;
    c.y_grid = YGrid {
        lo: -4.0,
        hi: 4.0,
        step: 0.1,
    };
    let r = run_convergence(&c).unwrap();
    assert_eq!(r.records.len(), 40);
    let skipped: Vec<_> = r.records.iter().filter(|x| x.skipped).collect();
    assert!(!skipped.is_empty());
    for s in &skipped {
        assert_eq!(s.reason, "theta_hat outside prior support");
        assert!(s.d_rw_oracle.is_none() && s.theta_hat.is_none());
        assert_eq!(s.theta_true, 0.45);
    }
    assert_eq!(r.summaries[0].completed + r.summaries[0].skipped, 40);
}

#[test]
fn empty_report_shell() {
    let mut c = small_config();
    c.n_grid = vec![30];
    c.data_reps = 0;
    let r = run_convergence(&c).unwrap();
    assert!(r.records.is_empty());
    assert_eq!(r.summaries[0].median_sqrtn_d, None);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.csv");
    emit_report(&r, ReportFormat::Csv, &p).unwrap();
    assert_eq!(std::fs::read_to_string(&p).unwrap(), format!("{}\n", CSV_COLUMNS.join(",")));
}

#[test]
fn csv_and_json_round_trip() {
    let r = run_convergence(&small_config()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    emit_report(&r, ReportFormat::Csv, &csv).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.lines().skip(1).all(|l| l.split(',').count() == 15));
    assert_eq!(parse_csv_report(&text).unwrap(), r.records);

    let json = dir.path().join("r.json");
    emit_report(&r, ReportFormat::Json, &json).unwrap();
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["metadata"]["master_seed"], 42);
    assert_eq!(v["metadata"]["mc_draws"], 2000);
    let first = &v["records"][0];
    for col in CSV_COLUMNS {
        assert!(first.get(col).is_some(), "missing {col}");
    }
    assert_eq!(first["D_rw_oracle"].as_f64(), r.records[0].d_rw_oracle);
}

#[test]
fn unwritable_path_reports_the_path() {
    let r = run_convergence(&small_config()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("missing").join("r.csv");
    match emit_report(&r, ReportFormat::Csv, &p) {
        Err(Error::Io { path, .. }) => assert_eq!(path, p),
        other => panic!("expected an I/O error, got {other:?}"),
    }
}

#[test]
fn cdf_table_matches_replication_zero() {
    let c = small_config();
    let table = simulate_table(&SimulateConfig {
        model_id: c.model_id.clone(),
        prior_id: c.prior_id.clone(),
        theta_true: ThetaMode::FromPrior,
        n: 20,
        mc_draws: c.mc_draws,
        master_seed: c.master_seed,
        y_grid: c.y_grid,
    })
    .unwrap();
    let report = run_convergence(&c).unwrap();
    let rep0 = &report.records[0];
    assert_eq!((rep0.n, rep0.rep), (20, 0));
    assert_eq!(table.theta_hat, rep0.theta_hat.unwrap());
    assert_eq!(table.rows.len(), 241);
    let csv = table.to_csv();
    assert!(csv.starts_with("y,F_rw,F_oracle,F_thm1,F_thm2\n"));
    for r in &table.rows {
        for v in [r.f_rw, r.f_oracle, r.f_thm1, r.f_thm2] {
            assert!((0.0..=1.0).contains(&v));
        }
    }
    // on the grid the oracle distance cannot exceed the recorded sup
    let grid_gap = table
        .rows
        .iter()
        .map(|r| (r.f_rw - r.f_oracle).abs())
        .fold(0.0, f64::max);
    assert!(grid_gap <= rep0.d_rw_oracle.unwrap());
}
