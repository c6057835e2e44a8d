//! Residual maps, their sample autocorrelations, plug-in covariance
//! estimates and the two portmanteau goodness-of-fit tests.

mod acf;
pub mod chisq;
mod condition;
mod covariance;
pub mod linalg;
mod portmanteau;
mod residuals;

pub use acf::{sample_acf, AcfVector, ACF_DENOMINATOR_MIN};
pub use chisq::{chi_square_cdf, chi_square_quantile, chi_square_sf};
pub use condition::{condition_discrepancy, ConditionDiscrepancy};
pub use covariance::{assemble, covariance_mcleod, CovarianceEstimate};
pub use linalg::SquareMatrix;
pub use portmanteau::{
    default_split, mcleod_test, mcleod_tests, mcleod_tests_with, p_value, split_test, split_tests, split_tests_with,
    DiagnosticReport, ReportSummary, TestKind, MIN_SPLIT_WINDOW,
};
pub use residuals::{g_derivative, residuals, ResidualSet, DENOMINATOR_FLOOR};

pub use crate::montecarlo::condition_check;
