use rand::RngCore;

use crate::{rng, special, Error, Result};

/// Closed-form posterior families a prior can take part in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conjugacy {
    /// Truncated normal prior on a normal mean.
    NormalMean,
    /// Truncated gamma prior on an exponential rate.
    ExponentialRate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorKind {
    TruncatedNormal { mean: f64, variance: f64 },
    TruncatedGamma { shape: f64, rate: f64 },
    /// Density proportional to `(u(1−u))³` with `u` the position in the
    /// support; it vanishes together with its first two derivatives at both
    /// ends, so it is C² on the whole line.
    Bump,
    Uniform,
}

/// A prior density supported on `[a0, b0]` and positive on `(a0, b0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    kind: PriorKind,
    a0: f64,
    b0: f64,
    /// Mass of the untruncated density on the support.
    mass: f64,
}

// ∫₀¹ (u(1−u))³ du = B(4, 4) = 1/140
const BUMP_NORMALIZER: f64 = 140.0;

impl Prior {
    fn checked(kind: PriorKind, a0: f64, b0: f64) -> Result<Self> {
        if !(a0.is_finite() && b0.is_finite() && a0 < b0) {
            return Err(Error::Usage(format!("prior support [{a0}, {b0}] is empty")));
        }
        let mass = match kind {
            PriorKind::TruncatedNormal { mean, variance } => {
                if !(variance.is_finite() && variance > 0.0 && mean.is_finite()) {
                    return Err(Error::Usage("truncated normal needs variance > 0".into()));
                }
                let sd = variance.sqrt();
                special::norm_interval((a0 - mean) / sd, (b0 - mean) / sd)
            }
            PriorKind::TruncatedGamma { shape, rate } => {
                if !(shape > 0.0 && rate > 0.0 && a0 >= 0.0) {
                    return Err(Error::Usage(
                        "truncated gamma needs shape, rate > 0 and a0 >= 0".into(),
                    ));
                }
                special::gamma_interval(shape, rate * a0, rate * b0)
            }
            PriorKind::Bump | PriorKind::Uniform => 1.0,
        };
        if !(mass > 0.0) {
            return Err(Error::Numerical(format!(
                "prior has no mass on [{a0}, {b0}]"
            )));
        }
        Ok(Self { kind, a0, b0, mass })
    }

    pub fn truncated_normal(mean: f64, variance: f64, a0: f64, b0: f64) -> Result<Self> {
        Self::checked(PriorKind::TruncatedNormal { mean, variance }, a0, b0)
    }

    pub fn truncated_gamma(shape: f64, rate: f64, a0: f64, b0: f64) -> Result<Self> {
        Self::checked(PriorKind::TruncatedGamma { shape, rate }, a0, b0)
    }

    pub fn bump(a0: f64, b0: f64) -> Result<Self> {
        Self::checked(PriorKind::Bump, a0, b0)
    }

    pub fn uniform(a0: f64, b0: f64) -> Result<Self> {
        Self::checked(PriorKind::Uniform, a0, b0)
    }

    pub fn kind(&self) -> PriorKind {
        self.kind
    }

    pub fn support(&self) -> (f64, f64) {
        (self.a0, self.b0)
    }

    pub fn width(&self) -> f64 {
        self.b0 - self.a0
    }

    /// Untruncated mass on the support (the truncation normalizer).
    pub fn truncation_mass(&self) -> f64 {
        self.mass
    }

    pub fn conjugate_tag(&self) -> Option<Conjugacy> {
        match self.kind {
            PriorKind::TruncatedNormal { .. } => Some(Conjugacy::NormalMean),
            PriorKind::TruncatedGamma { .. } => Some(Conjugacy::ExponentialRate),
            PriorKind::Bump | PriorKind::Uniform => None,
        }
    }

    pub fn contains_open(&self, theta: f64) -> bool {
        theta > self.a0 && theta < self.b0
    }

    /// `(ν(θ), ν′(θ))`; both zero off the open support.
    pub fn eval(&self, theta: f64) -> (f64, f64) {
        if !self.contains_open(theta) {
            return (0.0, 0.0);
        }
        match self.kind {
            PriorKind::TruncatedNormal { mean, variance } => {
                let sd = variance.sqrt();
                let nu = special::norm_pdf((theta - mean) / sd) / (sd * self.mass);
                (nu, -(theta - mean) / variance * nu)
            }
            PriorKind::TruncatedGamma { shape, rate } => {
                let nu = self.log_density(theta).exp();
                (nu, nu * ((shape - 1.0) / theta - rate))
            }
            PriorKind::Bump => {
                let w = self.width();
                let u = (theta - self.a0) / w;
                let q = u * (1.0 - u);
                (
                    BUMP_NORMALIZER * q * q * q / w,
                    3.0 * BUMP_NORMALIZER * q * q * (1.0 - 2.0 * u) / (w * w),
                )
            }
            PriorKind::Uniform => (1.0 / self.width(), 0.0),
        }
    }

    pub fn density(&self, theta: f64) -> f64 {
        self.eval(theta).0
    }

    pub fn density_deriv(&self, theta: f64) -> f64 {
        self.eval(theta).1
    }

    /// `log ν(θ)`, −∞ off the open support.
    pub fn log_density(&self, theta: f64) -> f64 {
        if !self.contains_open(theta) {
            return f64::NEG_INFINITY;
        }
        match self.kind {
            PriorKind::TruncatedNormal { mean, variance } => {
                let z = (theta - mean) / variance.sqrt();
                -0.5 * z * z
                    - 0.5 * (2.0 * std::f64::consts::PI * variance).ln()
                    - self.mass.ln()
            }
            PriorKind::TruncatedGamma { shape, rate } => {
                shape * rate.ln() + (shape - 1.0) * theta.ln() - rate * theta
                    - special::ln_gamma(shape)
                    - self.mass.ln()
            }
            PriorKind::Bump | PriorKind::Uniform => self.density(theta).ln(),
        }
    }

    /// Prior CDF on the real line.
    pub fn cdf(&self, theta: f64) -> f64 {
        if theta <= self.a0 {
            return 0.0;
        }
        if theta >= self.b0 {
            return 1.0;
        }
        let p = match self.kind {
            PriorKind::TruncatedNormal { mean, variance } => {
                let sd = variance.sqrt();
                special::norm_interval((self.a0 - mean) / sd, (theta - mean) / sd) / self.mass
            }
            PriorKind::TruncatedGamma { shape, rate } => {
                special::gamma_interval(shape, rate * self.a0, rate * theta) / self.mass
            }
            PriorKind::Bump => {
                // regularized incomplete beta I_u(4, 4)
                let u = (theta - self.a0) / self.width();
                let v = 1.0 - u;
                let u4 = u.powi(4);
                u4 * (35.0 * v.powi(3) + 21.0 * u * v * v + 7.0 * u * u * v + u * u * u)
            }
            PriorKind::Uniform => (theta - self.a0) / self.width(),
        };
        p.clamp(0.0, 1.0)
    }

    /// One draw by inverting the CDF with bisection.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = rng::open_open_unit(rng);
        let (mut lo, mut hi) = (self.a0, self.b0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}
