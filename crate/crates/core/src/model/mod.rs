//! Parametric families, priors, and the identifier registry.

mod families;
mod prior;
mod registry;

use std::fmt;

use rand::RngCore;

use crate::{Error, Result};

pub use families::{ExponentialRate, NormalLocation};
pub use prior::{Conjugacy, Prior, PriorKind};
pub use registry::{parse_model, parse_prior, BuiltinModel};

/// `log f(x, θ)` together with its first four θ-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDensityDerivs {
    pub l0: f64,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
}

impl LogDensityDerivs {
    /// Derivative of the given order, 0 through 4.
    pub fn order(&self, order: usize) -> Option<f64> {
        match order {
            0 => Some(self.l0),
            1 => Some(self.l1),
            2 => Some(self.l2),
            3 => Some(self.l3),
            4 => Some(self.l4),
            _ => None,
        }
    }
}

/// A univariate family `f(x, θ)` that is four times differentiable in θ on
/// its parameter interval.
///
/// Implementors supply the unchecked kernels; the provided methods add the
/// domain checks.
pub trait ParametricModel: fmt::Debug + Send + Sync {
    fn name(&self) -> &str;

    /// The closed interval `[c, d]` on which θ may be evaluated.
    fn parameter_interval(&self) -> (f64, f64);

    fn in_support(&self, x: f64) -> bool;

    /// `log f(x, θ)` and derivatives, assuming `x` and `θ` are valid.
    fn derivs_unchecked(&self, x: f64, theta: f64) -> LogDensityDerivs;

    fn log_density_unchecked(&self, x: f64, theta: f64) -> f64 {
        self.derivs_unchecked(x, theta).l0
    }

    /// Draws `n` i.i.d. observations from `f(·, θ)`.
    fn simulate_unchecked(&self, theta: f64, n: usize, rng: &mut dyn RngCore) -> Vec<f64>;

    /// Starting point for the MLE search.
    fn initial_guess(&self, data: &[f64]) -> f64;

    /// Closed-form MLE, when the family has one.
    fn closed_form_mle(&self, _data: &[f64]) -> Option<f64> {
        None
    }

    fn check_theta(&self, theta: f64) -> Result<()> {
        let (lo, hi) = self.parameter_interval();
        if theta.is_finite() && theta >= lo && theta <= hi {
            Ok(())
        } else {
            Err(Error::ParameterDomain { theta, lo, hi })
        }
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if self.in_support(x) {
            Ok(())
        } else {
            Err(Error::SupportDomain {
                x,
                model: self.name().to_string(),
            })
        }
    }

    fn log_density(&self, x: f64, theta: f64) -> Result<f64> {
        self.check_theta(theta)?;
        self.check_x(x)?;
        Ok(self.log_density_unchecked(x, theta))
    }

    /// `d^order/dθ^order log f(x, θ)` for order 1..=4.
    fn log_density_deriv(&self, x: f64, theta: f64, order: usize) -> Result<f64> {
        if !(1..=4).contains(&order) {
            return Err(Error::DerivativeOrder(order));
        }
        let d = eval_log_density_derivs(self, x, theta)?;
        Ok(d.order(order).expect("order checked"))
    }

    fn simulate(&self, theta: f64, n: usize, rng: &mut dyn RngCore) -> Result<DataSample> {
        self.check_theta(theta)?;
        Ok(DataSample::new(self.simulate_unchecked(theta, n, rng)))
    }

    /// `Σ_j log f(x_j, θ)` without domain checks.
    fn log_likelihood(&self, data: &[f64], theta: f64) -> f64 {
        data.iter().map(|&x| self.log_density_unchecked(x, theta)).sum()
    }
}

/// Checked evaluation of `log f` and its first four θ-derivatives.
pub fn eval_log_density_derivs<M: ParametricModel + ?Sized>(
    model: &M,
    x: f64,
    theta: f64,
) -> Result<LogDensityDerivs> {
    model.check_theta(theta)?;
    model.check_x(x)?;
    Ok(model.derivs_unchecked(x, theta))
}

/// An observed i.i.d. sample.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DataSample {
    values: Vec<f64>,
}

impl DataSample {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.n() as f64
    }

    /// Errors unless the sample holds at least `required` values.
    pub fn require(&self, required: usize) -> Result<()> {
        if self.n() < required {
            Err(Error::InsufficientData {
                n: self.n(),
                required,
            })
        } else {
            Ok(())
        }
    }
}

impl From<Vec<f64>> for DataSample {
    fn from(values: Vec<f64>) -> Self {
        Self::new(values)
    }
}

/// Convenience wrapper matching the registry's call shape.
pub fn simulate_data(
    model: &dyn ParametricModel,
    theta: f64,
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<DataSample> {
    model.simulate(theta, n, rng)
}
