//! Exact conditional law of `H_n / H̄_n` by characteristic-function inversion.
//!
//! `P*{H_n/H̄_n ≤ y} = P{Σ_j (α_j − ᾱ − yH̄_n) Z_j ≤ 0}` with `Z_j` i.i.d.
//! Gamma(4, rate 2), a linear combination of independent gammas whose
//! characteristic function is a finite product. The Gil-Pelaez formula turns
//! it into a one-dimensional integral, giving a noise-free reference for the
//! Monte Carlo ECDF.

use super::{omega_inverse, RwCoefficients};
use crate::inference::ScoreStats;
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

const GL_ORDER: usize = 16;
/// Stop once |φ(t)| falls below this; the remaining tail is at most a
/// quarter of it.
const TAIL_CUTOFF: f64 = 1e-17;
const MAX_PANELS: usize = 100_000;

/// `P{Σ c_j Z_j ≤ 0}` for `Z_j` i.i.d. Gamma(shape 4, rate 2).
pub fn gamma_combination_cdf_at_zero(coeffs: &[f64]) -> f64 {
    gamma_combination_with(coeffs, &GaussLegendre::new(GL_ORDER))
}

fn gamma_combination_with(coeffs: &[f64], gl: &GaussLegendre) -> f64 {
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm == 0.0 {
        return 1.0;
    }
    let b: Vec<f64> = coeffs.iter().map(|c| 0.5 * c / norm).collect();
    let signed: f64 = b.iter().sum();
    let abs_cubes: f64 = b.iter().map(|v| v.abs().powi(3)).sum();

    // log|φ(t)| and arg φ(t) for φ(t) = Π (1 − i t b_j)^{-4}
    let cf = |t: f64| -> (f64, f64) {
        b.iter().fold((0.0, 0.0), |(lm, arg), &bj| {
            let x = t * bj;
            (lm - 2.0 * (x * x).ln_1p(), arg + 4.0 * x.atan())
        })
    };

    let mut integral = 0.0;
    let mut t0: f64 = 0.0;
    for _ in 0..MAX_PANELS {
        // local oscillation rate of arg φ bounds the panel width
        let rate = 4.0 * signed.abs() + 4.0 * abs_cubes * (t0 + 1.0).powi(2) + 1.0;
        let h = (3.0 / rate).min(0.5);
        let t1 = t0 + h;
        integral += gl.integrate(t0, t1, |t| {
            let (lm, arg) = cf(t);
            lm.exp() * arg.sin() / t
        });
        t0 = t1;
        if cf(t0).0 < TAIL_CUTOFF.ln() {
            break;
        }
    }
    (0.5 - integral / std::f64::consts::PI).clamp(0.0, 1.0)
}

/// `k_n(y) = P*{H_n/H̄_n ≤ y}` evaluated without sampling.
#[derive(Debug, Clone)]
pub struct ExactWeightedLaw {
    deviations: Vec<f64>,
    h_bar: f64,
    gl: GaussLegendre,
}

impl ExactWeightedLaw {
    pub fn new(stats: &ScoreStats) -> Result<Self> {
        let h_bar = stats.h_bar();
        if !(stats.s2 > 0.0 && h_bar > 0.0) {
            return Err(Error::DegenerateScore);
        }
        Ok(Self {
            deviations: stats.deviations().collect(),
            h_bar,
            gl: GaussLegendre::new(GL_ORDER),
        })
    }

    pub fn cdf(&self, y: f64) -> f64 {
        let coeffs: Vec<f64> = self.deviations.iter().map(|d| d - y * self.h_bar).collect();
        gamma_combination_with(&coeffs, &self.gl)
    }

    /// `F*_n(y) = k_n(u_n(y))`.
    pub fn corrected_cdf(&self, y: f64, coeffs: &RwCoefficients) -> f64 {
        self.cdf(omega_inverse(y, coeffs))
    }
}
