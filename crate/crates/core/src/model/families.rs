use rand::RngCore;

use super::{LogDensityDerivs, ParametricModel};
use crate::{rng, special};

const NORMAL_LIMIT: f64 = 1.0e6;

/// Normal location family `N(θ, σ²)` with known variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalLocation {
    variance: f64,
}

impl NormalLocation {
    /// # Panics
    /// If `variance` is not strictly positive and finite.
    pub fn new(variance: f64) -> Self {
        assert!(
            variance.is_finite() && variance > 0.0,
            "normal variance must be positive"
        );
        Self { variance }
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }
}

impl ParametricModel for NormalLocation {
    fn name(&self) -> &str {
        "normal"
    }

    fn parameter_interval(&self) -> (f64, f64) {
        (-NORMAL_LIMIT, NORMAL_LIMIT)
    }

    fn in_support(&self, x: f64) -> bool {
        x.is_finite()
    }

    fn derivs_unchecked(&self, x: f64, theta: f64) -> LogDensityDerivs {
        let v = self.variance;
        let r = x - theta;
        LogDensityDerivs {
            l0: -0.5 * r * r / v - 0.5 * (2.0 * std::f64::consts::PI * v).ln(),
            l1: r / v,
            l2: -1.0 / v,
            l3: 0.0,
            l4: 0.0,
        }
    }

    fn simulate_unchecked(&self, theta: f64, n: usize, rng: &mut dyn RngCore) -> Vec<f64> {
        let sd = self.variance.sqrt();
        (0..n)
            .map(|_| theta + sd * special::norm_quantile(rng::open_open_unit(rng)))
            .collect()
    }

    fn initial_guess(&self, data: &[f64]) -> f64 {
        data.iter().sum::<f64>() / data.len() as f64
    }

    fn closed_form_mle(&self, data: &[f64]) -> Option<f64> {
        Some(self.initial_guess(data))
    }
}

/// Exponential family with rate θ: `f(x, θ) = θ e^{−θx}`, x > 0.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExponentialRate;

impl ExponentialRate {
    const LOWER: f64 = 1.0e-12;
    const UPPER: f64 = 1.0e12;
}

impl ParametricModel for ExponentialRate {
    fn name(&self) -> &str {
        "exp"
    }

    fn parameter_interval(&self) -> (f64, f64) {
        (Self::LOWER, Self::UPPER)
    }

    fn in_support(&self, x: f64) -> bool {
        x.is_finite() && x > 0.0
    }

    fn derivs_unchecked(&self, x: f64, theta: f64) -> LogDensityDerivs {
        let inv = 1.0 / theta;
        let inv2 = inv * inv;
        LogDensityDerivs {
            l0: theta.ln() - theta * x,
            l1: inv - x,
            l2: -inv2,
            l3: 2.0 * inv2 * inv,
            l4: -6.0 * inv2 * inv2,
        }
    }

    fn simulate_unchecked(&self, theta: f64, n: usize, rng: &mut dyn RngCore) -> Vec<f64> {
        (0..n).map(|_| rng::exponential(rng, theta)).collect()
    }

    fn initial_guess(&self, data: &[f64]) -> f64 {
        data.len() as f64 / data.iter().sum::<f64>()
    }

    fn closed_form_mle(&self, data: &[f64]) -> Option<f64> {
        Some(self.initial_guess(data))
    }
}
