//! From raw per-period samples to diagnostics and forecasts: write a
//! temperature-like panel as CSV, read it back, build quantile functions and
//! barycentric transports, test the first-order model, forecast the last
//! periods and export curves for plotting.
//!
//! cargo run --release --example empirical_pipeline [out_dir]

use atm_diag::data::synthetic::{generate_panel, SyntheticPanelConfig};
use atm_diag::data::{
    analyze, build_distribution_series, export_curves, ingest_csv, rolling_forecast, CurveData, ExportFormat,
    PanelSchema, DEFAULT_PADDING,
};
use std::path::PathBuf;

fn main() -> atm_diag::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let raw = dir.join("panel.csv");
    let synthetic = generate_panel(&SyntheticPanelConfig::temperature_like(1))?;
    std::fs::write(&raw, synthetic.panel.to_csv())?;

    let panel = ingest_csv(&raw, &PanelSchema::default())?;
    let series = build_distribution_series(&panel, 1000, DEFAULT_PADDING)?;
    println!("{} periods on [{:.2}, {:.2}]", series.len(), series.omega.lo, series.omega.hi);

    let report = analyze(&series, &[3, 6], 0.05)?;
    print!("{}", report.to_text());

    let forecast = rolling_forecast(&series, 50, 50, series.len() - 1)?;
    for r in &forecast.records {
        println!("{}: W2 error {:.4} (barycenter {:.4})", r.period, r.wasserstein_error, r.baseline_error);
    }
    println!("average {:.4} vs {:.4}", forecast.average_error, forecast.baseline_average_error);

    let curves: Vec<CurveData> =
        series.periods.iter().zip(&series.quantiles).map(|(p, q)| CurveData::density_proxy(p.as_str(), q)).collect();
    export_curves(&curves, &dir.join("densities.csv"), ExportFormat::Csv)?;
    let acf = vec![CurveData::acf_bars("split", &report.split[0])];
    export_curves(&acf, &dir.join("acf.json"), ExportFormat::Json)?;
    println!("curves written to {}", dir.display());
    Ok(())
}
