//! Random-weighting approximation of the standardized posterior.
//!
//! Given the centred scores `α_j − ᾱ` at the MLE, the statistic
//! `T = H_n / H̄_n` with `H_n = Σ(α_j − ᾱ)V_j` and `V ~ Dirichlet(4,…,4)` is
//! pushed through the cubic correction `ω_n`; the law of `ω_n(T)` given the
//! data approximates the standardized posterior CDF.

pub mod exact;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::inference::{MleFit, ScoreStats};
use crate::model::Prior;
use crate::rng::{self, Substreams};
use crate::{Error, Result};

pub use exact::{gamma_combination_cdf_at_zero, ExactWeightedLaw};

/// Default number of Monte Carlo draws.
pub const DEFAULT_DRAWS: usize = 200_000;

/// A point on the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(v: Vec<f64>) -> Self {
        Self(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Draws `V ~ Dirichlet(4,…,4)` as `Z_j / Σ Z_l` with `Z_j ~ Gamma(4, rate 2)`.
///
/// # Panics
/// If `n == 0`.
pub fn sample_weights<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> WeightVector {
    assert!(n >= 1, "weight vector needs at least one component");
    let z: Vec<f64> = (0..n).map(|_| rng::gamma4_rate2(rng)).collect();
    let total: f64 = z.iter().sum();
    WeightVector(z.into_iter().map(|zj| zj / total).collect())
}

/// The self-normalized weighted score statistic, prepared for repeated draws.
#[derive(Debug, Clone)]
pub struct WeightedScore {
    deviations: Vec<f64>,
    h_bar: f64,
}

impl WeightedScore {
    pub fn new(stats: &ScoreStats) -> Result<Self> {
        let h_bar = stats.h_bar();
        if !(stats.s2 > 0.0 && h_bar > 0.0) {
            return Err(Error::DegenerateScore);
        }
        Ok(Self {
            deviations: stats.deviations().collect(),
            h_bar,
        })
    }

    pub fn n(&self) -> usize {
        self.deviations.len()
    }

    pub fn h_bar(&self) -> f64 {
        self.h_bar
    }

    pub fn deviations(&self) -> &[f64] {
        &self.deviations
    }

    /// `H_n` for explicit weights.
    pub fn h_n(&self, w: &WeightVector) -> Result<f64> {
        if w.len() != self.n() {
            return Err(Error::Usage(format!(
                "weight vector has {} entries, expected {}",
                w.len(),
                self.n()
            )));
        }
        Ok(self.deviations.iter().zip(w.values()).map(|(d, v)| d * v).sum())
    }

    /// `H_n / H̄_n` for explicit weights.
    pub fn evaluate(&self, w: &WeightVector) -> Result<f64> {
        Ok(self.h_n(w)? / self.h_bar)
    }

    /// One draw of `H_n / H̄_n` without materializing the weights.
    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for &d in &self.deviations {
            let z = rng::gamma4_rate2(rng);
            num += d * z;
            den += z;
        }
        num / den / self.h_bar
    }

    /// `count` draws; draw `i` uses stream `i` of `streams`.
    pub fn draws(&self, count: usize, streams: &Substreams) -> Vec<f64> {
        (0..count as u64)
            .into_par_iter()
            .map(|i| self.draw(&mut streams.stream(i)))
            .collect()
    }
}

/// `T = H_n / H̄_n` with `H̄_n = √(s2 / (n(4n+1)))`.
pub fn rw_statistic(stats: &ScoreStats, w: &WeightVector) -> Result<f64> {
    WeightedScore::new(stats)?.evaluate(w)
}

/// Coefficients of the correction map `ω_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RwCoefficients {
    pub beta_n: f64,
    pub beta_n_prime: f64,
    pub n: usize,
}

impl RwCoefficients {
    pub fn identity(n: usize) -> Self {
        Self {
            beta_n: 0.0,
            beta_n_prime: 0.0,
            n,
        }
    }

    /// Location shift `β_n / √n`.
    pub fn shift(&self) -> f64 {
        self.beta_n / (self.n as f64).sqrt()
    }

    /// Quadratic coefficient `c = β′_n / √n`.
    pub fn curvature(&self) -> f64 {
        self.beta_n_prime / (self.n as f64).sqrt()
    }

    pub fn omega(&self, t: f64) -> f64 {
        omega_transform(t, self)
    }

    pub fn omega_inverse(&self, y: f64) -> f64 {
        omega_inverse(y, self)
    }
}

/// β_n and β′_n from the fit, the score statistics, and `(ν(θ̂), ν′(θ̂))`.
pub fn rw_coefficients(
    fit: &MleFit,
    stats: &ScoreStats,
    prior_at_fit: (f64, f64),
) -> Result<RwCoefficients> {
    let (nu, dnu) = prior_at_fit;
    if !(nu > 0.0) {
        return Err(Error::PriorSupport {
            theta: fit.theta_hat,
        });
    }
    if !(fit.b_squared > 0.0) {
        return Err(Error::NonPositiveCurvature {
            b_squared: fit.b_squared,
        });
    }
    let n = stats.n();
    let b = fit.b();
    let third = stats.a_n / (b * b * b);
    let skew = (n as f64).sqrt() * stats.r_n / 6.0;
    Ok(RwCoefficients {
        beta_n: -2.0 * third - dnu / (nu * b) - skew,
        beta_n_prime: -third + skew,
        n,
    })
}

/// Convenience: evaluates the prior at θ̂ and calls [`rw_coefficients`].
pub fn rw_coefficients_for(fit: &MleFit, stats: &ScoreStats, prior: &Prior) -> Result<RwCoefficients> {
    rw_coefficients(fit, stats, prior.eval(fit.theta_hat))
}

/// `ω_n(t) = s − c s² + (c²/3) s³` with `s = t − β_n/√n`, `c = β′_n/√n`.
///
/// Its derivative is `(1 − c s)² ≥ 0`.
pub fn omega_transform(t: f64, coeffs: &RwCoefficients) -> f64 {
    let c = coeffs.curvature();
    let s = t - coeffs.shift();
    s * (1.0 + s * (-c + s * (c * c / 3.0)))
}

/// Closed-form inverse of [`omega_transform`].
///
/// From `ω = (1 − (1 − c s)³) / (3c)`, `s = (1 − q)/c` with
/// `q = ∛(1 − 3cω)`; the rationalized form `s = 3ω / (1 + q + q²)` is free of
/// cancellation for every `c`, including `c → 0`.
pub fn omega_inverse(y: f64, coeffs: &RwCoefficients) -> f64 {
    let c = coeffs.curvature();
    if c == 0.0 {
        return y + coeffs.shift();
    }
    let q = (1.0 - 3.0 * c * y).cbrt();
    let s = 3.0 * y / (1.0 + q + q * q);
    s + coeffs.shift()
}

/// Empirical CDF over retained, sorted draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RwEcdf {
    sorted_values: Vec<f64>,
}

impl RwEcdf {
    /// # Panics
    /// If `draws` is empty or contains NaN.
    pub fn from_draws(mut draws: Vec<f64>) -> Self {
        assert!(!draws.is_empty(), "ECDF needs at least one draw");
        assert!(draws.iter().all(|v| !v.is_nan()), "ECDF draws must not be NaN");
        draws.sort_unstable_by(f64::total_cmp);
        Self {
            sorted_values: draws,
        }
    }

    pub fn len(&self) -> usize {
        self.sorted_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted_values.is_empty()
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted_values
    }

    /// `#{draws ≤ y} / B`.
    pub fn cdf(&self, y: f64) -> f64 {
        self.sorted_values.partition_point(|&v| v <= y) as f64 / self.len() as f64
    }

    /// `#{draws < y} / B`, the left limit at `y`.
    pub fn left_limit(&self, y: f64) -> f64 {
        self.sorted_values.partition_point(|&v| v < y) as f64 / self.len() as f64
    }

    /// Applies a non-decreasing map; the result stays sorted.
    pub fn map_monotone<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        let mut values: Vec<f64> = self.sorted_values.iter().map(|&v| f(v)).collect();
        // guard against rounding reversals
        for i in 1..values.len() {
            if values[i] < values[i - 1] {
                values[i] = values[i - 1];
            }
        }
        Self {
            sorted_values: values,
        }
    }

    /// One value per line, full precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value\n");
        for v in &self.sorted_values {
            out.push_str(&format!("{v:.16e}\n"));
        }
        out
    }
}

/// Raw and corrected ECDFs from a single set of draws.
#[derive(Debug, Clone)]
pub struct RwDraws {
    pub coefficients: RwCoefficients,
    /// ECDF of `H_n / H̄_n`.
    pub raw: RwEcdf,
    /// ECDF of `ω_n(H_n / H̄_n)`.
    pub corrected: RwEcdf,
}

pub fn rw_draws(
    prior: &Prior,
    fit: &MleFit,
    stats: &ScoreStats,
    draws: usize,
    streams: &Substreams,
) -> Result<RwDraws> {
    if draws == 0 {
        return Err(Error::Usage("number of draws must be positive".into()));
    }
    let coefficients = rw_coefficients_for(fit, stats, prior)?;
    let raw = RwEcdf::from_draws(WeightedScore::new(stats)?.draws(draws, streams));
    let corrected = raw.map_monotone(|t| omega_transform(t, &coefficients));
    Ok(RwDraws {
        coefficients,
        raw,
        corrected,
    })
}

/// Monte Carlo estimate of `F*_n(y) = P*{ω_n(H_n/H̄_n) ≤ y}`.
pub fn rw_posterior_ecdf(
    prior: &Prior,
    fit: &MleFit,
    stats: &ScoreStats,
    draws: usize,
    streams: &Substreams,
) -> Result<RwEcdf> {
    Ok(rw_draws(prior, fit, stats, draws, streams)?.corrected)
}
