//! Bayesian variable selection for Gaussian linear regression under Zellner
//! g-priors and their calibration-free hierarchical extensions, together with
//! frequentist regularizers (Lasso, elastic net, Dantzig selector) and a
//! benchmark engine for simulated and real-data comparisons.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`] — dense least-squares primitives (Householder QR, projection
//!   quadratic forms, centering) shared by every selector.
//! - [`special`] — the Gaussian hypergeometric function ₂F₁ in log scale and
//!   an independent adaptive-quadrature oracle for the g-integrals that ₂F₁
//!   summarizes in closed form.
//! - [`model`] — enumeration of the 2^p model indicators and per-model
//!   sufficient statistics (R²-type ratios) under both model conventions.
//! - [`selector`] — log-marginals, posterior model probabilities, MAP
//!   selection, shrinkage factors and model-averaged prediction for the whole
//!   g-prior family (NIMS, hyper-g, BRIC, Zellner–Siow, empirical Bayes) plus
//!   AIC/BIC.
//! - [`regularizer`] — Lasso and elastic net by cyclic coordinate descent, the
//!   Dantzig selector through a dense two-phase simplex solver, and
//!   cross-validation tuning.
//! - [`bench`] — the simulated designs, replicated train/test protocol,
//!   translation probe and real-data split protocol, with MSE/HITS/FP
//!   accounting.
//! - [`data`] — CSV dataset ingestion, experiment configuration and report
//!   persistence.

pub mod bench;
pub mod data;
mod error;
pub mod linalg;
pub mod model;
pub mod regularizer;
pub mod rng;
pub mod selector;
pub mod special;

pub use error::{Error, Result};
