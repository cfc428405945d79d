//! Analytic expansions of the standardized posterior and of the weighted
//! statistic, plus the self-normalization diagnostics.
//!
//! All CDF-valued expansions are clamped to [0, 1].

use crate::inference::{MleFit, ScoreStats};
use crate::model::Prior;
use crate::rwapprox::{omega_inverse, RwCoefficients};
use crate::special::{norm_cdf, norm_pdf};
use crate::{Error, Result};

/// Inputs of the posterior expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionContext {
    pub n: usize,
    pub b: f64,
    pub a_n: f64,
    /// `ν′(θ̂) / ν(θ̂)`
    pub nu_ratio: f64,
    pub r_n: f64,
}

impl ExpansionContext {
    pub fn new(n: usize, b: f64, a_n: f64, nu_ratio: f64, r_n: f64) -> Result<Self> {
        if n == 0 || !(b > 0.0) || ![b, a_n, nu_ratio, r_n].iter().all(|v| v.is_finite()) {
            return Err(Error::Usage(format!(
                "invalid expansion context n={n} b={b} a_n={a_n} nu_ratio={nu_ratio} r_n={r_n}"
            )));
        }
        Ok(Self {
            n,
            b,
            a_n,
            nu_ratio,
            r_n,
        })
    }

    pub fn from_fit(fit: &MleFit, stats: &ScoreStats, prior: &Prior) -> Result<Self> {
        let (nu, dnu) = prior.eval(fit.theta_hat);
        if !(nu > 0.0) {
            return Err(Error::PriorSupport {
                theta: fit.theta_hat,
            });
        }
        Self::new(stats.n(), fit.b(), stats.a_n, dnu / nu, stats.r_n)
    }

    /// The first-order correction `A(y)` (before the `1/√n` factor).
    pub fn correction(&self, y: f64) -> f64 {
        let b = self.b;
        -norm_pdf(y) * (self.a_n / (b * b * b) * (y * y + 2.0) + self.nu_ratio / b)
    }
}

/// `Φ(y) + A(y)/√n`, the one-term expansion of the standardized posterior.
pub fn theorem1_cdf(y: f64, ctx: &ExpansionContext) -> f64 {
    let v = norm_cdf(y) + ctx.correction(y) / (ctx.n as f64).sqrt();
    v.clamp(0.0, 1.0)
}

/// `Φ(y) − (1/6) φ(y)(y² − 1) r_n`, the Edgeworth expansion of the weighted
/// statistic's conditional law.
pub fn theorem2_cdf(y: f64, r_n: f64) -> f64 {
    (norm_cdf(y) - norm_pdf(y) * (y * y - 1.0) * r_n / 6.0).clamp(0.0, 1.0)
}

/// Density of the unclamped [`theorem2_cdf`]: `φ(y)(1 + (r_n/6)(y³ − 3y))`.
pub fn theorem2_density(y: f64, r_n: f64) -> f64 {
    norm_pdf(y) * (1.0 + r_n / 6.0 * (y * y * y - 3.0 * y))
}

/// Edgeworth approximation of the corrected law: `theorem2_cdf(u_n(y), r_n)`.
pub fn theorem2_pushforward_cdf(y: f64, r_n: f64, coeffs: &RwCoefficients) -> f64 {
    theorem2_cdf(omega_inverse(y, coeffs), r_n)
}

/// `ρ_n(y) = 2√n y / √(4n + 1 + y²)`.
pub fn rho_n(y: f64, n: usize) -> f64 {
    let n = n as f64;
    2.0 * n.sqrt() * y / (4.0 * n + 1.0 + y * y).sqrt()
}

/// `B_in(y) = A_in(y) / ‖A(y)‖` with `A_in(y) = α_i − ᾱ − y H̄_n`.
pub fn b_coefficients(stats: &ScoreStats, y: f64) -> Result<Vec<f64>> {
    let h_bar = stats.h_bar();
    let a: Vec<f64> = stats.deviations().map(|d| d - y * h_bar).collect();
    let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::DegenerateScore);
    }
    Ok(a.into_iter().map(|v| v / norm).collect())
}

/// Largest gaps over `grid` between the self-normalized and plain normal
/// terms: `(max |Φ(ρ_n) − Φ(y)|, max |φ(ρ_n)(ρ_n² − 1) − φ(y)(y² − 1)|)`.
pub fn lemma2_gaps(n: usize, grid: &[f64]) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(Error::Usage("lemma2_gaps needs a non-empty grid".into()));
    }
    Ok(grid.iter().fold((0.0f64, 0.0f64), |(g1, g2), &y| {
        let r = rho_n(y, n);
        let d1 = (norm_cdf(r) - norm_cdf(y)).abs();
        let d2 = (norm_pdf(r) * (r * r - 1.0) - norm_pdf(y) * (y * y - 1.0)).abs();
        (g1.max(d1), g2.max(d2))
    }))
}
