//! Exact standardized posterior CDF `F_n(y) = P{√n(θ − θ̂)b ≤ y | X}`.
//!
//! Two constructions: composite Gauss–Legendre quadrature of the
//! log-stabilized posterior density for any model/prior pair, and closed
//! forms for the registered conjugate pairs.

use crate::inference::MleFit;
use crate::model::{BuiltinModel, Conjugacy, DataSample, ParametricModel, Prior};
use crate::quadrature::{legendre_values, GaussLegendre};
use crate::special::{gamma_interval, norm_interval};
use crate::{Error, Result};

const NODES_PER_PANEL: usize = 16;
const REFINED_PANELS: usize = 512;
const COARSE_PANELS: usize = 64;
/// Half-width of the refined window, in posterior standard deviations.
const REFINED_HALF_WIDTH: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Quadrature,
    TruncatedNormal,
    TruncatedGamma,
}

#[derive(Debug, Clone)]
enum PosteriorLaw {
    Quadrature(PiecewiseCdf),
    TruncatedNormal { mean: f64, sd: f64, mass: f64 },
    TruncatedGamma { shape: f64, rate: f64, mass: f64 },
}

/// The posterior CDF on θ, with the centring and scale used to standardize it.
#[derive(Debug, Clone)]
pub struct PosteriorOracle {
    kind: OracleKind,
    theta_hat: f64,
    b: f64,
    n: usize,
    support: (f64, f64),
    law: PosteriorLaw,
}

impl PosteriorOracle {
    pub fn kind(&self) -> OracleKind {
        self.kind
    }

    pub fn theta_hat(&self) -> f64 {
        self.theta_hat
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Posterior CDF at θ.
    pub fn cdf(&self, theta: f64) -> f64 {
        let (a0, b0) = self.support;
        if theta.is_nan() {
            return f64::NAN;
        }
        if theta <= a0 {
            return 0.0;
        }
        if theta >= b0 {
            return 1.0;
        }
        let p = match &self.law {
            PosteriorLaw::Quadrature(pw) => pw.cdf(theta),
            PosteriorLaw::TruncatedNormal { mean, sd, mass } => {
                norm_interval((a0 - mean) / sd, (theta - mean) / sd) / mass
            }
            PosteriorLaw::TruncatedGamma { shape, rate, mass } => {
                gamma_interval(*shape, rate * a0, rate * theta) / mass
            }
        };
        p.clamp(0.0, 1.0)
    }

    /// θ corresponding to the standardized value `y`.
    pub fn unstandardize(&self, y: f64) -> f64 {
        self.theta_hat + y / ((self.n.max(1) as f64).sqrt() * self.b)
    }

    /// `F_n(y)`.
    pub fn standardized_cdf(&self, y: f64) -> f64 {
        self.cdf(self.unstandardize(y))
    }
}

/// Free-function form of [`PosteriorOracle::standardized_cdf`].
pub fn standardized_cdf(oracle: &PosteriorOracle, y: f64) -> f64 {
    oracle.standardized_cdf(y)
}

/// Piecewise-polynomial CDF from Gauss–Legendre panels.
///
/// On each panel the density is represented by its degree-(k−1) Legendre
/// interpolant through the k nodes, so the CDF inside a panel is the exact
/// antiderivative of that interpolant.
#[derive(Debug, Clone)]
struct PiecewiseCdf {
    edges: Vec<f64>,
    /// Legendre coefficients of the normalized density, per panel, in the
    /// panel's reference coordinate.
    coeffs: Vec<[f64; NODES_PER_PANEL]>,
    /// Normalized mass to the left of each edge.
    cumulative: Vec<f64>,
}

impl PiecewiseCdf {
    fn build<F: Fn(f64) -> f64>(edges: Vec<f64>, log_density: F) -> Result<Self> {
        let gl = GaussLegendre::new(NODES_PER_PANEL);
        let panels = edges.len() - 1;
        let basis: Vec<Vec<f64>> = gl
            .nodes()
            .iter()
            .map(|&x| legendre_values(NODES_PER_PANEL - 1, x))
            .collect();

        let mut logs = Vec::with_capacity(panels * NODES_PER_PANEL);
        for k in 0..panels {
            for (theta, _) in gl.mapped(edges[k], edges[k + 1]) {
                logs.push(log_density(theta));
            }
        }
        let shift = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !shift.is_finite() {
            return Err(Error::Numerical(
                "log-posterior is not finite anywhere on the prior support".into(),
            ));
        }

        let mut coeffs = Vec::with_capacity(panels);
        let mut masses = Vec::with_capacity(panels);
        for k in 0..panels {
            let half = 0.5 * (edges[k + 1] - edges[k]);
            let values = &logs[k * NODES_PER_PANEL..(k + 1) * NODES_PER_PANEL];
            let mut c = [0.0; NODES_PER_PANEL];
            for (i, &lv) in values.iter().enumerate() {
                let f = (lv - shift).exp();
                let wf = gl.weights()[i] * f;
                for (m, cm) in c.iter_mut().enumerate() {
                    *cm += wf * basis[i][m];
                }
            }
            for (m, cm) in c.iter_mut().enumerate() {
                *cm *= (2 * m + 1) as f64 / 2.0 * half;
            }
            masses.push(2.0 * c[0]);
            coeffs.push(c);
        }
        let total: f64 = masses.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Numerical("posterior normalizer vanished".into()));
        }
        for c in &mut coeffs {
            for cm in c.iter_mut() {
                *cm /= total;
            }
        }
        let mut cumulative = Vec::with_capacity(panels + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for m in masses {
            acc += m / total;
            cumulative.push(acc.min(1.0));
        }
        *cumulative.last_mut().expect("non-empty") = 1.0;
        Ok(Self {
            edges,
            coeffs,
            cumulative,
        })
    }

    fn cdf(&self, theta: f64) -> f64 {
        let panels = self.coeffs.len();
        let k = self
            .edges
            .partition_point(|&e| e <= theta)
            .saturating_sub(1)
            .min(panels - 1);
        let (lo, hi) = (self.edges[k], self.edges[k + 1]);
        let u = ((2.0 * theta - lo - hi) / (hi - lo)).clamp(-1.0, 1.0);
        let p = legendre_values(NODES_PER_PANEL, u);
        let c = &self.coeffs[k];
        let mut partial = c[0] * (u + 1.0);
        for m in 1..NODES_PER_PANEL {
            partial += c[m] * (p[m + 1] - p[m - 1]) / (2 * m + 1) as f64;
        }
        (self.cumulative[k] + partial).clamp(self.cumulative[k], self.cumulative[k + 1])
    }
}

fn uniform_edges(lo: f64, hi: f64, panels: usize, out: &mut Vec<f64>) {
    let h = (hi - lo) / panels as f64;
    for k in 0..panels {
        out.push(lo + h * k as f64);
    }
}

/// Panel edges refined around the posterior mode scale.
fn panel_edges(support: (f64, f64), center: f64, scale: f64) -> Vec<f64> {
    let (a0, b0) = support;
    let (mut lo, mut hi) = (a0, b0);
    if scale.is_finite() && scale > 0.0 {
        lo = (center - REFINED_HALF_WIDTH * scale).max(a0);
        hi = (center + REFINED_HALF_WIDTH * scale).min(b0);
        if lo >= hi {
            lo = a0;
            hi = b0;
        }
    }
    let mut edges = Vec::with_capacity(REFINED_PANELS + 2 * COARSE_PANELS + 1);
    if lo > a0 {
        uniform_edges(a0, lo, COARSE_PANELS, &mut edges);
    }
    uniform_edges(lo, hi, REFINED_PANELS, &mut edges);
    if hi < b0 {
        uniform_edges(hi, b0, COARSE_PANELS, &mut edges);
    }
    edges.push(b0);
    edges
}

fn check_fit(fit: &MleFit) -> Result<()> {
    if !(fit.b_squared > 0.0) || !fit.theta_hat.is_finite() {
        return Err(Error::NonPositiveCurvature {
            b_squared: fit.b_squared,
        });
    }
    Ok(())
}

/// Posterior by quadrature of `ν(θ) Π f(x_j, θ)`, shifted by its maximum
/// before exponentiating.
pub fn build_quadrature_oracle(
    model: &dyn ParametricModel,
    prior: &Prior,
    sample: &DataSample,
    fit: &MleFit,
) -> Result<PosteriorOracle> {
    check_fit(fit)?;
    if !(prior.density(fit.theta_hat) > 0.0) {
        return Err(Error::PriorSupport {
            theta: fit.theta_hat,
        });
    }
    for &x in sample.values() {
        model.check_x(x)?;
    }
    let support = prior.support();
    let n = sample.n();
    let b = fit.b();
    let scale = if n == 0 {
        f64::INFINITY
    } else {
        1.0 / ((n as f64).sqrt() * b)
    };
    let edges = panel_edges(support, fit.theta_hat, scale);
    let data = sample.values();
    let cdf = PiecewiseCdf::build(edges, |theta| {
        prior.log_density(theta) + model.log_likelihood(data, theta)
    })?;
    Ok(PosteriorOracle {
        kind: OracleKind::Quadrature,
        theta_hat: fit.theta_hat,
        b,
        n,
        support,
        law: PosteriorLaw::Quadrature(cdf),
    })
}

/// Closed-form posterior for a registered conjugate pair.
pub fn build_conjugate_oracle(
    model: &BuiltinModel,
    prior: &Prior,
    sample: &DataSample,
    fit: &MleFit,
) -> Result<PosteriorOracle> {
    check_fit(fit)?;
    for &x in sample.values() {
        model.as_model().check_x(x)?;
    }
    let support @ (a0, b0) = prior.support();
    let n = sample.n();
    let sum = sample.sum();
    let unsupported = || Error::UnsupportedConjugacy {
        model: model.to_string(),
        prior: prior.to_string(),
    };
    let (kind, law) = match (model, prior.kind(), prior.conjugate_tag()) {
        (
            BuiltinModel::Normal(m),
            crate::model::PriorKind::TruncatedNormal { mean, variance },
            Some(Conjugacy::NormalMean),
        ) => {
            let precision = n as f64 / m.variance() + 1.0 / variance;
            let post_mean = (sum / m.variance() + mean / variance) / precision;
            let sd = precision.recip().sqrt();
            let mass = norm_interval((a0 - post_mean) / sd, (b0 - post_mean) / sd);
            (
                OracleKind::TruncatedNormal,
                PosteriorLaw::TruncatedNormal {
                    mean: post_mean,
                    sd,
                    mass,
                },
            )
        }
        (
            BuiltinModel::Exponential(_),
            crate::model::PriorKind::TruncatedGamma { shape, rate },
            Some(Conjugacy::ExponentialRate),
        ) => {
            let shape = shape + n as f64;
            let rate = rate + sum;
            let mass = gamma_interval(shape, rate * a0, rate * b0);
            (
                OracleKind::TruncatedGamma,
                PosteriorLaw::TruncatedGamma { shape, rate, mass },
            )
        }
        _ => return Err(unsupported()),
    };
    let mass = match law {
        PosteriorLaw::TruncatedNormal { mass, .. } | PosteriorLaw::TruncatedGamma { mass, .. } => {
            mass
        }
        PosteriorLaw::Quadrature(_) => unreachable!(),
    };
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::Numerical(format!(
            "posterior has no representable mass on [{a0}, {b0}]"
        )));
    }
    Ok(PosteriorOracle {
        kind,
        theta_hat: fit.theta_hat,
        b: fit.b(),
        n,
        support,
        law,
    })
}

/// Conjugate closed form when registered, quadrature otherwise.
pub fn build_oracle(
    model: &BuiltinModel,
    prior: &Prior,
    sample: &DataSample,
    fit: &MleFit,
) -> Result<PosteriorOracle> {
    match build_conjugate_oracle(model, prior, sample, fit) {
        Err(Error::UnsupportedConjugacy { .. }) => {
            build_quadrature_oracle(model.as_model(), prior, sample, fit)
        }
        other => other,
    }
}
