//! Autoregressive transport map (ATM) models for time series of
//! one-dimensional probability distributions.
//!
//! The crate covers the whole workflow:
//!
//! - [`transport`]: monotone maps on a grid, α-contraction, composition,
//!   generalized inverses, Wasserstein distance and barycenter;
//! - [`atm`]: seeded simulation of ATM(p) processes;
//! - [`estimation`]: least-squares fitting of the first-order model;
//! - [`diagnostics`]: residual maps, residual autocorrelations and the two
//!   portmanteau tests (McLeod type and sample splitting);
//! - [`montecarlo`]: parallel, reproducible size/power/condition studies;
//! - [`data`]: CSV panels to distribution series, analysis, rolling
//!   forecasts and curve export.
//!
//! See `examples/` for one runnable program per capability.

pub mod atm;
pub mod data;
pub mod diagnostics;
pub mod error;
pub mod estimation;
pub mod montecarlo;
pub mod rng;
pub mod transport;

pub use error::{AtmError, Result};
