//! Random-weighting approximation of standardized posterior distributions.
//!
//! For a univariate parametric family `f(x, θ)` with a smooth prior `ν`, the
//! standardized posterior `F_n(y) = P{√n(θ − θ̂_n)b ≤ y | X}` is approximated by
//! the law of a Dirichlet-weighted score statistic pushed through a cubic
//! correction map. The crate contains:
//!
//! * [`model`]: built-in families with closed-form log-density derivatives, priors,
//!   and the string registry used by the CLI.
//! * [`inference`]: safeguarded-Newton MLE and the score statistics.
//! * [`rwapprox`]: Dirichlet(4,…,4) weights, the self-normalized statistic, the
//!   correction map and its inverse, and the Monte Carlo ECDF.
//! * [`expansion`]: the analytic Edgeworth-type expansions and their diagnostics.
//! * [`oracle`]: the exact standardized posterior by quadrature or conjugacy.
//! * [`harness`]: sup distances, convergence experiments, and reporting.

// `!(x > 0.0)` is used on purpose so that NaN fails the check too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Reference constants are written with all the digits they were computed to.
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod error;
pub mod expansion;
pub mod harness;
pub mod inference;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod rng;
pub mod rwapprox;
pub mod special;

pub use error::{Error, Result};
