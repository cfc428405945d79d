//! Maximum likelihood fitting and score statistics.

use std::fmt;

use crate::model::{DataSample, ParametricModel};
use crate::{Error, Result};

const MAX_ITERATIONS: usize = 200;
/// Relative size of the last or predicted Newton step at which to stop.
const STEP_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Lower,
    Upper,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Lower => "lower",
            Boundary::Upper => "upper",
        })
    }
}

/// Result of maximizing the log-likelihood over `[c, d]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleFit {
    pub theta_hat: f64,
    /// Per-observation observed information, `−(1/n) Σ ℓ2(x_j, θ̂)`.
    pub b_squared: f64,
    pub iterations: usize,
    /// True only for an interior stationary point.
    pub converged: bool,
    pub boundary: Option<Boundary>,
}

impl MleFit {
    pub fn b(&self) -> f64 {
        self.b_squared.sqrt()
    }

    /// Errors unless the fit is an interior, converged maximizer.
    pub fn require_interior(&self) -> Result<()> {
        match (self.converged, self.boundary) {
            (_, Some(side)) => Err(Error::BoundaryMaximizer(side)),
            (false, None) => Err(Error::NotConverged {
                iterations: self.iterations,
            }),
            (true, None) => Ok(()),
        }
    }
}

struct Objective<'a> {
    model: &'a dyn ParametricModel,
    data: &'a [f64],
}

impl Objective<'_> {
    /// (log-likelihood, score, curvature) at θ.
    fn eval(&self, theta: f64) -> (f64, f64, f64) {
        self.data.iter().fold((0.0, 0.0, 0.0), |(l, s, h), &x| {
            let d = self.model.derivs_unchecked(x, theta);
            (l + d.l0, s + d.l1, h + d.l2)
        })
    }

    fn score(&self, theta: f64) -> f64 {
        self.eval(theta).1
    }
}

/// Safeguarded Newton iteration on the score.
///
/// A Newton step is taken only when it stays inside the current sign-change
/// bracket and does not decrease the log-likelihood; otherwise the bracket is
/// bisected. A maximizer on the edge of `interval` is reported with
/// `converged = false` and the boundary flag set.
pub fn fit_mle(
    model: &dyn ParametricModel,
    sample: &DataSample,
    interval: (f64, f64),
) -> Result<MleFit> {
    sample.require(2)?;
    for &x in sample.values() {
        model.check_x(x)?;
    }
    let (c, d) = interval;
    model.check_theta(c)?;
    model.check_theta(d)?;
    if c >= d {
        return Err(Error::Usage(format!("empty MLE interval [{c}, {d}]")));
    }

    let n = sample.n() as f64;
    let obj = Objective {
        model,
        data: sample.values(),
    };
    let finish = |theta: f64, iterations: usize, boundary: Option<Boundary>| -> Result<MleFit> {
        let b_squared = -obj.eval(theta).2 / n;
        if boundary.is_none() && !(b_squared > 0.0) {
            return Err(Error::NonPositiveCurvature { b_squared });
        }
        Ok(MleFit {
            theta_hat: theta,
            b_squared,
            iterations,
            converged: boundary.is_none(),
            boundary,
        })
    };

    let mut theta = model.initial_guess(sample.values());
    if !theta.is_finite() {
        theta = 0.5 * (c + d);
    }
    theta = theta.clamp(c, d);
    let s0 = obj.score(theta);
    if s0 == 0.0 {
        return finish(theta, 0, None);
    }

    // Expand away from θ0 until the score changes sign.
    let (mut lo, mut hi);
    let mut step = 0.1 * theta.abs().max(1.0);
    let mut probe = theta;
    if s0 > 0.0 {
        lo = theta;
        loop {
            let next = (probe + step).min(d);
            if obj.score(next) <= 0.0 {
                hi = next;
                break;
            }
            if next >= d {
                return finish(d, 0, Some(Boundary::Upper));
            }
            lo = next;
            probe = next;
            step *= 2.0;
        }
    } else {
        hi = theta;
        loop {
            let next = (probe - step).max(c);
            if obj.score(next) >= 0.0 {
                lo = next;
                break;
            }
            if next <= c {
                return finish(c, 0, Some(Boundary::Lower));
            }
            hi = next;
            probe = next;
            step *= 2.0;
        }
    }

    let (mut ll, mut score, mut curv) = obj.eval(theta);
    for iter in 1..=MAX_ITERATIONS {
        let newton = theta - score / curv;
        let mut next = 0.5 * (lo + hi);
        let mut trial = None;
        if curv < 0.0 && newton > lo && newton < hi {
            let e = obj.eval(newton);
            if e.0 >= ll - 1e-12 * ll.abs().max(1.0) {
                next = newton;
                trial = Some(e);
            }
        }
        let (l_next, s_next, c_next) = trial.unwrap_or_else(|| obj.eval(next));
        let moved = (next - theta).abs();
        theta = next;
        (ll, score, curv) = (l_next, s_next, c_next);
        if score > 0.0 {
            lo = theta;
        } else if score < 0.0 {
            hi = theta;
        }
        let scale = theta.abs().max(1.0);
        let predicted = if curv < 0.0 { (score / curv).abs() } else { f64::INFINITY };
        if score == 0.0
            || predicted <= STEP_TOL * scale
            || moved <= STEP_TOL * scale
            || (hi - lo) <= STEP_TOL * scale
        {
            return finish(theta, iter, None);
        }
    }
    Err(Error::NotConverged {
        iterations: MAX_ITERATIONS,
    })
}

/// Score values at the MLE and their centred moments.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreStats {
    pub alphas: Vec<f64>,
    pub alpha_bar: f64,
    /// Σ(α_j − ᾱ)²
    pub s2: f64,
    /// Σ(α_j − ᾱ)³
    pub s3: f64,
    /// s3 / s2^{3/2}
    pub r_n: f64,
    /// (1/6n) Σ ℓ3(x_j, θ̂)
    pub a_n: f64,
}

impl ScoreStats {
    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    pub fn deviations(&self) -> impl Iterator<Item = f64> + '_ {
        self.alphas.iter().map(move |a| a - self.alpha_bar)
    }

    /// `H̄_n = √(s2 / (n(4n+1)))`, the conditional standard deviation of `H_n`.
    pub fn h_bar(&self) -> f64 {
        let n = self.n() as f64;
        (self.s2 / (n * (4.0 * n + 1.0))).sqrt()
    }
}

pub fn score_stats(
    model: &dyn ParametricModel,
    sample: &DataSample,
    fit: &MleFit,
) -> Result<ScoreStats> {
    fit.require_interior()?;
    sample.require(2)?;
    let theta = fit.theta_hat;
    let mut alphas = Vec::with_capacity(sample.n());
    let mut third = 0.0;
    for &x in sample.values() {
        let d = crate::model::eval_log_density_derivs(model, x, theta)?;
        alphas.push(d.l1);
        third += d.l3;
    }
    let n = alphas.len() as f64;
    let alpha_bar = alphas.iter().sum::<f64>() / n;
    let (s2, s3) = alphas.iter().fold((0.0, 0.0), |(s2, s3), a| {
        let e = a - alpha_bar;
        (s2 + e * e, s3 + e * e * e)
    });
    // relative to the raw score scale, anything this small is rounding noise
    let scale = alphas.iter().map(|a| a * a).sum::<f64>();
    if !(s2 > 1e-28 * scale) {
        return Err(Error::DegenerateScore);
    }
    Ok(ScoreStats {
        r_n: s3 / s2.powf(1.5),
        a_n: third / (6.0 * n),
        alphas,
        alpha_bar,
        s2,
        s3,
    })
}
