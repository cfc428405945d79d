//! Quick property suites for the `check` subcommand. Each case is a small,
//! self-contained version of a property exercised in the test suite.

use rand::Rng;

use crate::expansion::{lemma2_gaps, theorem1_cdf, theorem2_cdf, theorem2_density, ExpansionContext};
use crate::inference::{fit_mle, score_stats, ScoreStats};
use crate::model::{BuiltinModel, DataSample, ExponentialRate, NormalLocation, ParametricModel, Prior};
use crate::oracle::{build_conjugate_oracle, build_quadrature_oracle};
use crate::rng::Substreams;
use crate::rwapprox::{sample_weights, RwCoefficients, WeightedScore};
use crate::special::norm_cdf;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Weights,
    Expansion,
    Oracle,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weights" => Ok(Self::Weights),
            "expansion" => Ok(Self::Expansion),
            "oracle" => Ok(Self::Oracle),
            "all" => Ok(Self::All),
            _ => Err(Error::Usage(format!("unknown check suite `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, result: Result<(bool, String)>) -> CheckOutcome {
    match result {
        Ok((passed, detail)) => CheckOutcome {
            name,
            passed,
            detail,
        },
        Err(e) => CheckOutcome {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

const SEED: u64 = 0x5EED;

pub fn run_suite(suite: Suite) -> Vec<CheckOutcome> {
    match suite {
        Suite::Weights => weights(),
        Suite::Expansion => expansion(),
        Suite::Oracle => oracle(),
        Suite::All => [weights(), expansion(), oracle()].concat(),
    }
}

fn normal_stats(n: usize, seed: u64) -> Result<ScoreStats> {
    let m = NormalLocation::new(1.0);
    let s = m.simulate(0.0, n, &mut Substreams::new(seed, &[]).stream(0))?;
    let fit = fit_mle(&m, &s, m.parameter_interval())?;
    score_stats(&m, &s, &fit)
}

fn weights() -> Vec<CheckOutcome> {
    vec![
        outcome("weights: simplex", {
            let mut rng = Substreams::new(SEED, &[1]).stream(0);
            let mut worst = 0.0f64;
            let mut positive = true;
            for n in [2, 10, 500] {
                for _ in 0..200 {
                    let w = sample_weights(n, &mut rng);
                    positive &= w.values().iter().all(|&v| v > 0.0);
                    worst = worst.max((w.values().iter().sum::<f64>() - 1.0).abs());
                }
            }
            Ok((positive && worst <= 1e-12, format!("max |Σv − 1| = {worst:.2e}")))
        }),
        outcome("weights: marginal moments", {
            let draws = 100_000;
            let mut rng = Substreams::new(SEED, &[2]).stream(0);
            let v1: Vec<f64> = (0..draws).map(|_| sample_weights(10, &mut rng).values()[0]).collect();
            let mean = v1.iter().sum::<f64>() / draws as f64;
            let var = v1.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
            let se = (var / draws as f64).sqrt();
            let ok = (mean - 0.1).abs() <= 3.0 * se && (var / 2.195e-3 - 1.0).abs() <= 0.1;
            Ok((ok, format!("mean {mean:.5}, var {var:.4e}")))
        }),
        outcome("weights: variance of weighted score", (|| {
            let stats = normal_stats(30, SEED)?;
            let ws = WeightedScore::new(&stats)?;
            let t = ws.draws(100_000, &Substreams::new(SEED, &[3]));
            let m = t.iter().sum::<f64>() / t.len() as f64;
            let v = t.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (t.len() - 1) as f64;
            Ok(((0.97..=1.03).contains(&v), format!("Var(H/H̄) = {v:.4}")))
        })()),
        outcome("weights: correction map round trip", {
            let mut rng = Substreams::new(SEED, &[4]).stream(0);
            let mut worst = 0.0f64;
            for _ in 0..10_000 {
                let n = 10f64.powf(rng.random_range(1.0..4.0)) as usize;
                let c = RwCoefficients {
                    beta_n: rng.random_range(-3.0..3.0),
                    beta_n_prime: rng.random_range(-3.0..3.0),
                    n,
                };
                let t = rng.random_range(-10.0..10.0);
                let s = t - c.shift();
                if (1.0 - c.curvature() * s).abs() < 1e-3 {
                    continue;
                }
                worst = worst.max((c.omega_inverse(c.omega(t)) - t).abs());
            }
            Ok((worst <= 1e-9, format!("max error {worst:.2e}")))
        }),
    ]
}

fn expansion() -> Vec<CheckOutcome> {
    vec![
        outcome("expansion: weighted-statistic value at y = 1", {
            let d = (theorem2_cdf(1.0, 0.77) - norm_cdf(1.0)).abs();
            Ok((d <= 1e-15, format!("|diff| = {d:.1e}")))
        }),
        outcome("expansion: density is the derivative", {
            let mut worst = 0.0f64;
            let h = 1e-5;
            // r_n small enough that the expansion stays inside [0, 1] here
            for i in -30..=30 {
                let y = i as f64 * 0.1;
                for r in [-0.1, 0.0, 0.1] {
                    let fd = (theorem2_cdf(y + h, r) - theorem2_cdf(y - h, r)) / (2.0 * h);
                    worst = worst.max((fd - theorem2_density(y, r)).abs());
                }
            }
            Ok((worst <= 1e-7, format!("max |Δ| = {worst:.2e}")))
        }),
        outcome("expansion: self-normalization gaps are O(1/n)", (|| {
            let grid: Vec<f64> = (-800..=800).map(|i| i as f64 * 0.01).collect();
            let scaled: Vec<f64> = [100usize, 1000, 10_000]
                .iter()
                .map(|&n| lemma2_gaps(n, &grid).map(|(g1, _)| n as f64 * g1))
                .collect::<Result<_>>()?;
            let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = scaled.iter().copied().fold(0.0, f64::max);
            Ok((hi / lo - 1.0 < 0.25, format!("n·g1 in [{lo:.4}, {hi:.4}]")))
        })()),
        outcome("expansion: posterior expansion vs oracle at n = 200", (|| {
            let m = NormalLocation::new(1.0);
            let prior = Prior::truncated_normal(0.0, 1.0, -10.0, 10.0)?;
            let s = m.simulate(0.3, 200, &mut Substreams::new(SEED, &[5]).stream(0))?;
            let fit = fit_mle(&m, &s, m.parameter_interval())?;
            let stats = score_stats(&m, &s, &fit)?;
            let ctx = ExpansionContext::from_fit(&fit, &stats, &prior)?;
            let o = build_conjugate_oracle(&BuiltinModel::Normal(m), &prior, &s, &fit)?;
            let d = (-800..=800)
                .map(|i| i as f64 * 0.01)
                .map(|y| (theorem1_cdf(y, &ctx) - o.standardized_cdf(y)).abs())
                .fold(0.0, f64::max);
            Ok((d <= 0.01, format!("sup distance {d:.2e}")))
        })()),
    ]
}

fn oracle() -> Vec<CheckOutcome> {
    let cross = |model: BuiltinModel, prior: Prior, theta: f64, n: usize| -> Result<(bool, String)> {
        let m = model.as_model();
        let s = m.simulate(theta, n, &mut Substreams::new(SEED, &[6, n as u64]).stream(0))?;
        let fit = fit_mle(m, &s, m.parameter_interval())?;
        let q = build_quadrature_oracle(m, &prior, &s, &fit)?;
        let c = build_conjugate_oracle(&model, &prior, &s, &fit)?;
        let d = (-800..=800)
            .map(|i| i as f64 * 0.01)
            .map(|y| (q.standardized_cdf(y) - c.standardized_cdf(y)).abs())
            .fold(0.0, f64::max);
        Ok((d <= 1e-6, format!("sup difference {d:.2e}")))
    };
    vec![
        outcome(
            "oracle: normal/normal quadrature vs closed form",
            (|| {
                cross(
                    BuiltinModel::Normal(NormalLocation::new(1.0)),
                    Prior::truncated_normal(0.0, 1.0, -10.0, 10.0)?,
                    0.4,
                    200,
                )
            })(),
        ),
        outcome(
            "oracle: exponential/gamma quadrature vs closed form",
            (|| {
                cross(
                    BuiltinModel::Exponential(ExponentialRate),
                    Prior::truncated_gamma(2.0, 1.0, 0.0, 50.0)?,
                    1.5,
                    200,
                )
            })(),
        ),
        outcome("oracle: flat posterior without data", (|| {
            let prior = Prior::uniform(0.0, 1.0)?;
            let fit = crate::inference::MleFit {
                theta_hat: 0.5,
                b_squared: 1.0,
                iterations: 0,
                converged: true,
                boundary: None,
            };
            let o = build_quadrature_oracle(&NormalLocation::new(1.0), &prior, &DataSample::default(), &fit)?;
            let d = (0..=100)
                .map(|i| i as f64 / 100.0)
                .map(|t| (o.cdf(t) - t).abs())
                .fold(0.0, f64::max);
            Ok((d <= 1e-12, format!("max |F(θ) − θ| = {d:.1e}")))
        })()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes() {
        for c in run_suite(Suite::All) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn suite_names() {
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert!("bogus".parse::<Suite>().is_err());
    }
}
