use super::covariance::covariance_with;
use super::residuals::residuals_with;
use crate::error::Result;
use crate::estimation::SeriesStats;
use crate::transport::AtmSeries;
use serde::{Deserialize, Serialize};

/// Discrepancy between `M̂₂` and `−M̂₁ · avar` at a known contraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionDiscrepancy {
    pub l1: f64,
    pub l2: f64,
    pub m1_hat: Vec<f64>,
    pub m2_hat: Vec<f64>,
    pub avar_hat: f64,
}

/// Evaluate both sides on the full residual set of `series` at `alpha0`.
pub fn condition_discrepancy(series: &AtmSeries, alpha0: f64, k: usize) -> Result<ConditionDiscrepancy> {
    let stats = SeriesStats::new(series);
    let n = series.len();
    let res = residuals_with(&stats, alpha0, n, n)?;
    let cov = covariance_with(&stats, &res, k, 1.0, 1.0)?;
    let diff: Vec<f64> = cov.m2_hat.iter().zip(&cov.m1_hat).map(|(b, a)| b + a * cov.avar_hat).collect();
    Ok(ConditionDiscrepancy {
        l1: diff.iter().map(|d| d.abs()).sum(),
        l2: diff.iter().map(|d| d * d).sum::<f64>().sqrt(),
        m1_hat: cov.m1_hat,
        m2_hat: cov.m2_hat,
        avar_hat: cov.avar_hat,
    })
}
