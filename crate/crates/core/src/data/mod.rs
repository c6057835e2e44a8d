//! From raw per-period samples to distribution series: CSV ingest,
//! empirical quantiles on a common support, barycentric transports,
//! analysis, rolling forecasts and curve export.

mod analyze;
pub mod export;
mod forecast;
mod panel;
mod series;
pub mod synthetic;

pub use analyze::{analyze_transports, AnalysisReport, AnalysisSummary, MIN_ANALYSIS_LEN};
pub use export::{export_curves, read_curves, render_curves, series_from_curves, write_atomic, CurveData, ExportFormat};
pub use forecast::{predict_next, predict_next_incremental, rolling_forecast, rolling_forecast_with, ForecastRecord, ForecastResult, MIN_TRAIN_LEN};
pub use panel::{ingest_csv, ingest_reader, PanelSchema, RawPanel};
pub use series::{
    barycentric_transports, build_distribution_series, empirical_quantile, padded_support, DistributionSeries,
    TransportMode, DEFAULT_PADDING,
};

use crate::error::Result;

/// Analyze the barycentric transports of a distribution series.
pub fn analyze(series: &DistributionSeries, ks: &[usize], beta: f64) -> Result<AnalysisReport> {
    analyze_transports(&series.transports(TransportMode::Barycentric)?, ks, beta)
}
