//! Experiment orchestration: sup distances between CDFs, the convergence
//! experiment over an n-grid with data replications, and CDF tables for a
//! single configuration.

mod checks;
mod report;

pub use checks::{run_suite, CheckOutcome, Suite};
pub use report::{emit_report, parse_csv_report, ReportFormat, CSV_COLUMNS};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::expansion::{theorem1_cdf, theorem2_pushforward_cdf, ExpansionContext};
use crate::inference::{fit_mle, score_stats, MleFit, ScoreStats};
use crate::model::{parse_model, parse_prior, BuiltinModel, DataSample, Prior};
use crate::oracle::{build_oracle, PosteriorOracle};
use crate::rng::Substreams;
use crate::rwapprox::{rw_draws, RwEcdf, DEFAULT_DRAWS};
use crate::{Error, Result};

/// Anything that can report `P(Y ≤ y)` and `P(Y < y)`.
pub trait Cdf {
    fn cdf(&self, y: f64) -> f64;

    /// Left limit; equal to `cdf` for continuous laws.
    fn left_limit(&self, y: f64) -> f64 {
        self.cdf(y)
    }
}

impl Cdf for RwEcdf {
    fn cdf(&self, y: f64) -> f64 {
        RwEcdf::cdf(self, y)
    }

    fn left_limit(&self, y: f64) -> f64 {
        RwEcdf::left_limit(self, y)
    }
}

/// A continuous CDF given by a closure.
pub struct FnCdf<F>(pub F);

impl<F: Fn(f64) -> f64> Cdf for FnCdf<F> {
    fn cdf(&self, y: f64) -> f64 {
        (self.0)(y)
    }
}

/// The oracle on the standardized scale.
pub struct Standardized<'a>(pub &'a PosteriorOracle);

impl Cdf for Standardized<'_> {
    fn cdf(&self, y: f64) -> f64 {
        self.0.standardized_cdf(y)
    }
}

/// `sup |F − G|` over `grid ∪ jumps`, using both one-sided values at jumps.
pub fn sup_distance(f: &dyn Cdf, g: &dyn Cdf, grid: &[f64], jumps: &[f64]) -> Result<f64> {
    if grid.is_empty() && jumps.is_empty() {
        return Err(Error::Usage("sup distance over an empty point set".into()));
    }
    let mut d = 0.0f64;
    for &y in grid {
        d = d.max((f.cdf(y) - g.cdf(y)).abs());
    }
    for &y in jumps {
        d = d.max((f.cdf(y) - g.cdf(y)).abs());
        d = d.max((f.left_limit(y) - g.left_limit(y)).abs());
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for YGrid {
    fn default() -> Self {
        Self {
            lo: -8.0,
            hi: 8.0,
            step: 0.01,
        }
    }
}

impl YGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::Usage(format!(
                "invalid y-grid lo={} hi={} step={}",
                self.lo, self.hi, self.step
            )));
        }
        Ok(())
    }

    /// `lo + i·step` for `i = 0..=⌊(hi − lo)/step⌋`, with a small tolerance
    /// so that `hi` itself is included when it lies on the lattice.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        // when lo is itself a multiple of step, index from zero so that the
        // lattice points come out as exact multiples (0 rather than 1e-16)
        let k0 = self.lo / self.step;
        if (k0 - k0.round()).abs() < 1e-9 {
            let k0 = k0.round();
            (0..=count).map(|i| (k0 + i as f64) * self.step).collect()
        } else {
            (0..=count).map(|i| self.lo + self.step * i as f64).collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaMode {
    Fixed(f64),
    FromPrior,
}

impl std::str::FromStr for ThetaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "from-prior" {
            return Ok(Self::FromPrior);
        }
        s.parse::<f64>()
            .ok()
            .filter(|t| t.is_finite())
            .map(Self::Fixed)
            .ok_or_else(|| Error::Usage(format!("theta must be a real or `from-prior`, got `{s}`")))
    }
}

impl std::fmt::Display for ThetaMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Fixed(t) => write!(f, "{t}"),
            Self::FromPrior => f.write_str("from-prior"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model_id: String,
    pub prior_id: String,
    pub theta_true: ThetaMode,
    pub n_grid: Vec<usize>,
    pub data_reps: usize,
    pub mc_draws: usize,
    pub master_seed: u64,
    pub y_grid: YGrid,
    pub output_path: Option<String>,
}

impl ExperimentConfig {
    pub fn new(model_id: &str, prior_id: &str, n_grid: Vec<usize>) -> Self {
        Self {
            model_id: model_id.to_string(),
            prior_id: prior_id.to_string(),
            theta_true: ThetaMode::FromPrior,
            n_grid,
            data_reps: 20,
            mc_draws: DEFAULT_DRAWS,
            master_seed: 0,
            y_grid: YGrid::default(),
            output_path: None,
        }
    }

    pub fn validate(&self) -> Result<(BuiltinModel, Prior)> {
        let model = parse_model(&self.model_id)?;
        let prior = parse_prior(&self.prior_id)?;
        if self.n_grid.is_empty() {
            return Err(Error::Usage("n-grid is empty".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Usage("n-grid must be strictly ascending".into()));
        }
        if self.n_grid[0] < 2 {
            return Err(Error::Usage("every n in the grid must be at least 2".into()));
        }
        if self.mc_draws < 1000 {
            return Err(Error::Usage(format!(
                "need at least 1000 weight draws, got {}",
                self.mc_draws
            )));
        }
        if let ThetaMode::Fixed(t) = self.theta_true {
            model.as_model().check_theta(t)?;
        }
        self.y_grid.validate()?;
        Ok((model, prior))
    }
}

/// One (n, rep) cell: either a complete distance record or a skip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub n: usize,
    pub rep: usize,
    pub theta_true: f64,
    pub theta_hat: Option<f64>,
    pub b2: Option<f64>,
    pub r_n: Option<f64>,
    pub a_n: Option<f64>,
    pub beta_n: Option<f64>,
    pub beta_n_prime: Option<f64>,
    #[serde(rename = "D_rw_oracle")]
    pub d_rw_oracle: Option<f64>,
    #[serde(rename = "sqrtn_D")]
    pub sqrtn_d: Option<f64>,
    #[serde(rename = "D_thm1_oracle")]
    pub d_thm1_oracle: Option<f64>,
    #[serde(rename = "D_thm2_raw")]
    pub d_thm2_raw: Option<f64>,
    pub skipped: bool,
    pub reason: String,
}

impl ReplicationRecord {
    fn skip(n: usize, rep: usize, theta_true: f64, reason: String) -> Self {
        Self {
            n,
            rep,
            theta_true,
            theta_hat: None,
            b2: None,
            r_n: None,
            a_n: None,
            beta_n: None,
            beta_n_prime: None,
            d_rw_oracle: None,
            sqrtn_d: None,
            d_thm1_oracle: None,
            d_thm2_raw: None,
            skipped: true,
            reason,
        }
    }
}

/// Median and interquartile range of the per-rep distances at one n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NSummary {
    pub n: usize,
    pub completed: usize,
    pub skipped: usize,
    pub median_sqrtn_d: Option<f64>,
    pub iqr_sqrtn_d: Option<f64>,
    pub median_sqrtn_d_thm1: Option<f64>,
    pub median_d_thm2_raw: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub model: String,
    pub prior: String,
    pub theta_true: ThetaMode,
    pub n_grid: Vec<usize>,
    pub data_reps: usize,
    pub mc_draws: usize,
    pub master_seed: u64,
    pub y_grid: YGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub metadata: ReportMetadata,
    pub records: Vec<ReplicationRecord>,
    pub summaries: Vec<NSummary>,
}

/// Type-7 sample quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

pub fn median(values: &[f64]) -> Option<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, 0.5)
}

fn summarize(n: usize, records: &[ReplicationRecord]) -> NSummary {
    let cell: Vec<&ReplicationRecord> = records.iter().filter(|r| r.n == n).collect();
    let column = |f: fn(&ReplicationRecord) -> Option<f64>| -> Vec<f64> {
        let mut v: Vec<f64> = cell.iter().filter_map(|r| f(r)).collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let sqrtn_d = column(|r| r.sqrtn_d);
    let thm1: Vec<f64> = column(|r| r.d_thm1_oracle)
        .into_iter()
        .map(|d| (n as f64).sqrt() * d)
        .collect();
    let thm2 = column(|r| r.d_thm2_raw);
    let iqr = quantile_sorted(&sqrtn_d, 0.75).zip(quantile_sorted(&sqrtn_d, 0.25));
    NSummary {
        n,
        completed: cell.iter().filter(|r| !r.skipped).count(),
        skipped: cell.iter().filter(|r| r.skipped).count(),
        median_sqrtn_d: quantile_sorted(&sqrtn_d, 0.5),
        iqr_sqrtn_d: iqr.map(|(q3, q1)| q3 - q1),
        median_sqrtn_d_thm1: quantile_sorted(&thm1, 0.5),
        median_d_thm2_raw: quantile_sorted(&thm2, 0.5),
    }
}

/// Data for one (n, rep) cell: keyed by `(seed, n, rep)` so that it does not
/// depend on scheduling or on the rest of the grid.
fn data_streams(seed: u64, n: usize, rep: usize) -> Substreams {
    Substreams::new(seed, &[n as u64, rep as u64, 0])
}

fn weight_streams(seed: u64, n: usize, rep: usize) -> Substreams {
    Substreams::new(seed, &[n as u64, rep as u64, 1])
}

/// One simulated data set with its fit, ready for the approximations.
#[derive(Debug, Clone)]
pub struct Replication {
    pub theta_true: f64,
    pub sample: DataSample,
    pub fit: MleFit,
    pub stats: ScoreStats,
}

/// Everything computed for one simulated data set.
struct Cell {
    rep: Replication,
    ctx: ExpansionContext,
    draws: crate::rwapprox::RwDraws,
    oracle: PosteriorOracle,
}

/// Reasons a cell is skipped rather than failed.
fn skip_reason(err: &Error) -> Option<String> {
    match err {
        Error::BoundaryMaximizer(side) => Some(format!("boundary MLE ({side})")),
        Error::PriorSupport { .. } => Some("theta_hat outside prior support".into()),
        Error::DegenerateScore => Some("degenerate score values".into()),
        Error::NonPositiveCurvature { .. } => Some("non-positive curvature at MLE".into()),
        Error::NotConverged { .. } => Some("MLE did not converge".into()),
        _ => None,
    }
}

/// Draws θ, simulates `n` observations and fits them, using the data
/// substream of cell `(seed, n, rep)`. On failure the drawn θ is returned
/// alongside the error so that skips can still report it.
pub fn prepare_replication(
    model: &BuiltinModel,
    prior: &Prior,
    theta: ThetaMode,
    n: usize,
    rep: usize,
    seed: u64,
) -> std::result::Result<Replication, (f64, Error)> {
    let m = model.as_model();
    let mut rng = data_streams(seed, n, rep).stream(0);
    let theta_true = match theta {
        ThetaMode::Fixed(t) => t,
        ThetaMode::FromPrior => prior.sample(&mut rng),
    };
    let fail = |e| (theta_true, e);
    let sample = m.simulate(theta_true, n, &mut rng).map_err(fail)?;
    let fit = fit_mle(m, &sample, m.parameter_interval()).map_err(fail)?;
    fit.require_interior().map_err(fail)?;
    if !prior.contains_open(fit.theta_hat) {
        return Err((
            theta_true,
            Error::PriorSupport {
                theta: fit.theta_hat,
            },
        ));
    }
    let stats = score_stats(m, &sample, &fit).map_err(fail)?;
    Ok(Replication {
        theta_true,
        sample,
        fit,
        stats,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_cell(
    model: &BuiltinModel,
    prior: &Prior,
    theta: ThetaMode,
    n: usize,
    rep: usize,
    draws: usize,
    seed: u64,
) -> std::result::Result<Cell, (f64, Error)> {
    let r = prepare_replication(model, prior, theta, n, rep, seed)?;
    let fail = |e| (r.theta_true, e);
    let ctx = ExpansionContext::from_fit(&r.fit, &r.stats, prior).map_err(fail)?;
    let rw = rw_draws(prior, &r.fit, &r.stats, draws, &weight_streams(seed, n, rep)).map_err(fail)?;
    let oracle = build_oracle(model, prior, &r.sample, &r.fit).map_err(fail)?;
    Ok(Cell {
        rep: r,
        ctx,
        draws: rw,
        oracle,
    })
}

fn record_cell(n: usize, rep: usize, cell: &Cell, grid: &[f64]) -> Result<ReplicationRecord> {
    let oracle = Standardized(&cell.oracle);
    let corrected = &cell.draws.corrected;
    let d_rw = sup_distance(corrected, &oracle, grid, corrected.sorted_values())?;
    let thm1 = FnCdf(|y| theorem1_cdf(y, &cell.ctx));
    let d_thm1 = sup_distance(&thm1, &oracle, grid, &[])?;
    let r_n = cell.rep.stats.r_n;
    let thm2 = FnCdf(|y| crate::expansion::theorem2_cdf(y, r_n));
    let raw = &cell.draws.raw;
    let d_thm2 = sup_distance(raw, &thm2, grid, raw.sorted_values())?;
    let c = cell.draws.coefficients;
    Ok(ReplicationRecord {
        n,
        rep,
        theta_true: cell.rep.theta_true,
        theta_hat: Some(cell.rep.fit.theta_hat),
        b2: Some(cell.rep.fit.b_squared),
        r_n: Some(r_n),
        a_n: Some(cell.rep.stats.a_n),
        beta_n: Some(c.beta_n),
        beta_n_prime: Some(c.beta_n_prime),
        d_rw_oracle: Some(d_rw),
        sqrtn_d: Some((n as f64).sqrt() * d_rw),
        d_thm1_oracle: Some(d_thm1),
        d_thm2_raw: Some(d_thm2),
        skipped: false,
        reason: String::new(),
    })
}

/// The convergence experiment. Cells run in parallel; the output is an
/// ordered merge by `(n, rep)` and does not depend on the worker count.
pub fn run_convergence(config: &ExperimentConfig) -> Result<ConvergenceReport> {
    let (model, prior) = config.validate()?;
    let grid = config.y_grid.points();
    let cells: Vec<(usize, usize)> = config
        .n_grid
        .iter()
        .flat_map(|&n| (0..config.data_reps).map(move |rep| (n, rep)))
        .collect();
    let records = cells
        .par_iter()
        .map(|&(n, rep)| {
            match run_cell(
                &model,
                &prior,
                config.theta_true,
                n,
                rep,
                config.mc_draws,
                config.master_seed,
            ) {
                Ok(cell) => record_cell(n, rep, &cell, &grid),
                Err((theta_true, e)) => match skip_reason(&e) {
                    Some(reason) => Ok(ReplicationRecord::skip(n, rep, theta_true, reason)),
                    None => Err(e),
                },
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let summaries = config
        .n_grid
        .iter()
        .map(|&n| summarize(n, &records))
        .collect();
    Ok(ConvergenceReport {
        metadata: ReportMetadata {
            model: model.to_string(),
            prior: prior.to_string(),
            theta_true: config.theta_true,
            n_grid: config.n_grid.clone(),
            data_reps: config.data_reps,
            mc_draws: config.mc_draws,
            master_seed: config.master_seed,
            y_grid: config.y_grid,
        },
        records,
        summaries,
    })
}

/// Settings for a single-configuration CDF table.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulateConfig {
    pub model_id: String,
    pub prior_id: String,
    pub theta_true: ThetaMode,
    pub n: usize,
    pub mc_draws: usize,
    pub master_seed: u64,
    pub y_grid: YGrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdfRow {
    pub y: f64,
    pub f_rw: f64,
    pub f_oracle: f64,
    pub f_thm1: f64,
    pub f_thm2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdfTable {
    pub theta_true: f64,
    pub theta_hat: f64,
    pub rows: Vec<CdfRow>,
}

impl CdfTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("y,F_rw,F_oracle,F_thm1,F_thm2\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                report::fmt_real(r.y),
                report::fmt_real(r.f_rw),
                report::fmt_real(r.f_oracle),
                report::fmt_real(r.f_thm1),
                report::fmt_real(r.f_thm2)
            ));
        }
        out
    }
}

/// The four CDFs on the y-grid for one data set. Uses the same substreams as
/// replication 0 of the convergence experiment at this n.
///
/// `F_thm2` is the weighted-statistic expansion carried through the
/// correction map, so that all four columns describe the same standardized
/// quantity.
pub fn simulate_table(config: &SimulateConfig) -> Result<CdfTable> {
    let model = parse_model(&config.model_id)?;
    let prior = parse_prior(&config.prior_id)?;
    if config.n < 2 {
        return Err(Error::Usage("n must be at least 2".into()));
    }
    if config.mc_draws == 0 {
        return Err(Error::Usage("number of draws must be positive".into()));
    }
    if let ThetaMode::Fixed(t) = config.theta_true {
        model.as_model().check_theta(t)?;
    }
    config.y_grid.validate()?;
    let cell = run_cell(
        &model,
        &prior,
        config.theta_true,
        config.n,
        0,
        config.mc_draws,
        config.master_seed,
    )
    .map_err(|(_, e)| e)?;
    let coeffs = cell.draws.coefficients;
    let rows = config
        .y_grid
        .points()
        .into_iter()
        .map(|y| CdfRow {
            y,
            f_rw: cell.draws.corrected.cdf(y),
            f_oracle: cell.oracle.standardized_cdf(y),
            f_thm1: theorem1_cdf(y, &cell.ctx),
            f_thm2: theorem2_pushforward_cdf(y, cell.rep.stats.r_n, &coeffs),
        })
        .collect();
    Ok(CdfTable {
        theta_true: cell.rep.theta_true,
        theta_hat: cell.rep.fit.theta_hat,
        rows,
    })
}
