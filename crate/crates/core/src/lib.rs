//! Exchange-algorithm MCMC for doubly-intractable posteriors.
//!
//! A doubly-intractable posterior arises when the likelihood carries a
//! parameter-dependent normalizer `Z(θ)` that cannot be evaluated, so the
//! usual Metropolis–Hastings ratio is incomputable. The exchange algorithm
//! sidesteps this by drawing an auxiliary sample `w ~ p_θ'` each step and
//! substituting `f_θ(w)/f_θ'(w)` for the unknown `Z(θ)/Z(θ')`.
//!
//! This crate provides:
//!
//! - [`models`] — a zoo of unnormalized likelihood families (Bernoulli,
//!   Binomial, Exponential, Poisson, Gaussian location, Ising, random graph)
//!   with exact samplers and desk-scale exact normalizers,
//! - [`kernels`] — Metropolis–Hastings, exchange, and lazy-mixed transition
//!   rules plus seeded chain execution,
//! - [`exact`] — explicit finite-state transition matrices, spectra,
//!   stationary vectors, exact asymptotic variances, Peskun comparisons,
//! - [`diagnostics`] — total-variation/KL machinery, ergodicity condition
//!   checkers, batch means, CLT normality checks,
//! - [`experiments`] — declarative experiment configs, built-in experiments,
//!   and report generation.
//!
//! The normalizer is deliberately hidden from the exchange code path: exchange
//! kernels see the model only through [`models::IntractableView`], which does
//! not expose `log_Z`. Analysis code (matrices, TV distances) may read it.

pub mod diagnostics;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod kernels;
pub mod models;
pub mod quad;
pub mod rngs;
pub mod special;

pub use error::{Error, Result};
