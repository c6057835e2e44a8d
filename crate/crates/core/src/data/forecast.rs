use super::series::{barycentric_transports, DistributionSeries, TransportMode};
use crate::error::{AtmError, Result};
use crate::estimation::fit_alpha;
use crate::transport::{alpha_contract, barycenter, compose, wasserstein_distance, AtmSeries, MonotoneCurve};
use serde::{Deserialize, Serialize};

/// Shortest admissible training window.
pub const MIN_TRAIN_LEN: usize = 20;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForecastRecord {
    pub period: String,
    /// 0-based position of the target period.
    pub index: usize,
    /// `None` when the window's transports are all the identity.
    pub alpha_hat: Option<f64>,
    pub predicted_q: MonotoneCurve,
    pub observed_q: MonotoneCurve,
    pub wasserstein_error: f64,
    /// Error of predicting the window barycenter itself.
    pub baseline_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForecastResult {
    pub train_len: usize,
    pub records: Vec<ForecastRecord>,
    pub average_error: f64,
    pub baseline_average_error: f64,
}

/// One-step-ahead prediction from the window `quantiles`: refit the
/// contraction on the window's own barycentric transports and push the
/// window barycenter through `α̂ ⊙ T_last`.
pub fn predict_next(window: &[MonotoneCurve]) -> Result<(MonotoneCurve, MonotoneCurve, Option<f64>)> {
    let bary = barycenter(window)?;
    let transports = barycentric_transports(window, &bary)?;
    let last = transports.at(transports.len());
    let (step, alpha) = match fit_alpha(&transports) {
        Ok(fit) => (alpha_contract(fit.alpha_hat, last)?, Some(fit.alpha_hat)),
        // identity transports: every contraction of T_last is the identity
        Err(AtmError::DegenerateSeries(_)) => (MonotoneCurve::identity(*last.grid()), None),
        Err(e) => return Err(e),
    };
    Ok((compose(&step, &bary)?, bary, alpha))
}

/// Incremental variant: fit on `T_i = Q_i ∘ F_{i−1}` within the window and
/// push the last period through `α̂ ⊙ T_last`. Also returns the window
/// barycenter for the baseline.
pub fn predict_next_incremental(window: &[MonotoneCurve]) -> Result<(MonotoneCurve, MonotoneCurve, Option<f64>)> {
    let bary = barycenter(window)?;
    let maps = window.windows(2).map(|w| compose(&w[1], &w[0].invert())).collect::<Result<Vec<_>>>()?;
    let transports = AtmSeries::new(maps)?;
    let last = transports.at(transports.len());
    let (step, alpha) = match fit_alpha(&transports) {
        Ok(fit) => (alpha_contract(fit.alpha_hat, last)?, Some(fit.alpha_hat)),
        Err(AtmError::DegenerateSeries(_)) => (MonotoneCurve::identity(*last.grid()), None),
        Err(e) => return Err(e),
    };
    Ok((compose(&step, &window[window.len() - 1])?, bary, alpha))
}

/// Rolling one-step forecasts for target periods `start..=end` (0-based),
/// each using only the `train_len` periods immediately before it.
pub fn rolling_forecast(series: &DistributionSeries, train_len: usize, start: usize, end: usize) -> Result<ForecastResult> {
    rolling_forecast_with(series, TransportMode::Barycentric, train_len, start, end)
}

/// [`rolling_forecast`] with the transports formed according to `mode`.
pub fn rolling_forecast_with(
    series: &DistributionSeries,
    mode: TransportMode,
    train_len: usize,
    start: usize,
    end: usize,
) -> Result<ForecastResult> {
    if train_len < MIN_TRAIN_LEN {
        return Err(AtmError::Range(format!("training window {train_len} below {MIN_TRAIN_LEN}")));
    }
    if start < train_len || end < start || end >= series.len() {
        return Err(AtmError::Range(format!(
            "targets {start}..={end} need {train_len} <= start <= end < {}",
            series.len()
        )));
    }
    let mut records = Vec::with_capacity(end - start + 1);
    for t in start..=end {
        let window = &series.quantiles[t - train_len..t];
        let (predicted_q, bary, alpha_hat) = match mode {
            TransportMode::Barycentric => predict_next(window)?,
            TransportMode::Incremental => predict_next_incremental(window)?,
        };
        let observed_q = series.quantiles[t].clone();
        records.push(ForecastRecord {
            period: series.periods[t].clone(),
            index: t,
            alpha_hat,
            wasserstein_error: wasserstein_distance(&predicted_q, &observed_q)?,
            baseline_error: wasserstein_distance(&bary, &observed_q)?,
            predicted_q,
            observed_q,
        });
    }
    let k = records.len() as f64;
    let average_error = records.iter().map(|r| r.wasserstein_error).sum::<f64>() / k;
    let baseline_average_error = records.iter().map(|r| r.baseline_error).sum::<f64>() / k;
    Ok(ForecastResult { train_len, records, average_error, baseline_average_error })
}
