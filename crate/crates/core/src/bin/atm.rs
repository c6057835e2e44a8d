//! Command-line front end. Exit status: 0 ok, 2 usage, 3 data, 4 numerical failure.

use atm_diag::atm::{simulate, AtmConfig, InnovationFamily, DEFAULT_BURN_IN};
use atm_diag::data::synthetic::{generate_panel, SyntheticPanelConfig};
use atm_diag::data::{
    analyze_transports, build_distribution_series, ingest_csv, read_curves, render_curves, rolling_forecast_with,
    series_from_curves, write_atomic, CurveData, DistributionSeries, ExportFormat, PanelSchema, TransportMode,
    DEFAULT_PADDING,
};
use atm_diag::diagnostics::{default_split, mcleod_tests, split_tests, ReportSummary};
use atm_diag::estimation::fit_alpha;
use atm_diag::montecarlo::{run_study, Format, StudyKind, StudySpec};
use atm_diag::transport::AtmSeries;
use atm_diag::{AtmError, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "atm", version, about = "Autoregressive transport models for distributional time series")]
struct Cli {
    /// Grid cells for curves and simulations.
    #[arg(long, global = true, default_value_t = 1000)]
    grid_m: usize,
    /// Random seed; overrides the seed of a study config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate transport maps, or with --panel a sample panel built on them.
    Simulate(SimulateArgs),
    /// Fit the first-order contraction to a series of maps.
    Fit(SeriesInput),
    /// Fit and run the portmanteau tests on a series of maps.
    Diagnose(DiagnoseArgs),
    /// Size study of both tests under first-order models.
    McSize(StudyArgs),
    /// Power study under second-order models.
    McPower(StudyArgs),
    /// Check the regularity condition of the McLeod test by simulation.
    ValidateCondition(StudyArgs),
    /// Fit and test the barycentric transports of a CSV panel.
    Analyze(AnalyzeArgs),
    /// Rolling one-step forecasts of a CSV panel.
    Forecast(ForecastArgs),
    /// Export quantile, density, transport or ACF curves of a CSV panel.
    Export(ExportArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Contraction coefficients, one per lag.
    #[arg(long, value_delimiter = ',', default_value = "0.5", allow_negative_numbers = true)]
    alpha: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value = "trig")]
    family: InnovationFamily,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn_in: usize,
    /// Emit per-period samples (period,value) instead of the maps.
    #[arg(long)]
    panel: bool,
    #[arg(long, default_value_t = 500)]
    points_per_period: usize,
}

#[derive(Args)]
struct SeriesInput {
    /// Curves file (long CSV or JSON) as written by `simulate`.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum TestChoice {
    Mcleod,
    Split,
    Both,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    input: SeriesInput,
    #[arg(long, value_delimiter = ',', default_value = "3,6,9")]
    k: Vec<usize>,
    #[arg(long, default_value_t = 0.05)]
    beta: f64,
    #[arg(long, value_enum, default_value_t = TestChoice::Both)]
    test: TestChoice,
    /// Last index of the fitting window of the split test.
    #[arg(long)]
    f_n: Option<usize>,
    /// Number of residuals used by the split test.
    #[arg(long)]
    l_n: Option<usize>,
}

#[derive(Args)]
struct StudyArgs {
    /// TOML study description; defaults to the standard grid for the study.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    family: Option<InnovationFamily>,
}

#[derive(Args)]
struct PanelArgs {
    /// Long-format CSV with one row per observation.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "period")]
    period_column: String,
    #[arg(long, default_value = "value")]
    value_column: String,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// Padding of the common support as a fraction of the data range.
    #[arg(long, default_value_t = DEFAULT_PADDING)]
    padding: f64,
    #[arg(long, default_value = "barycentric")]
    transport_mode: TransportMode,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    panel: PanelArgs,
    #[arg(long, value_delimiter = ',', default_value = "3,6,9")]
    k: Vec<usize>,
    #[arg(long, default_value_t = 0.05)]
    beta: f64,
}

#[derive(Args)]
struct ForecastArgs {
    #[command(flatten)]
    panel: PanelArgs,
    #[arg(long, default_value_t = 30)]
    train_len: usize,
    /// First target period, 0-based; defaults to `train_len`.
    #[arg(long)]
    start: Option<usize>,
    /// Last target period, 0-based; defaults to the last period.
    #[arg(long)]
    end: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Curves {
    Quantiles,
    Densities,
    Transports,
    Barycenter,
    Acf,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    panel: PanelArgs,
    #[arg(long, value_enum, default_value_t = Curves::Quantiles)]
    what: Curves,
    /// Lags for `--what acf`.
    #[arg(long, default_value_t = 9)]
    k: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let text = match &cli.command {
        Command::Simulate(a) => simulate_cmd(cli, a)?,
        Command::Fit(a) => {
            let fit = fit_alpha(&load_series(&a.input)?)?;
            match cli.format {
                OutFormat::Json => to_json(&fit),
                OutFormat::Csv => {
                    let v = serde_json::to_value(&fit).expect("fit serializes");
                    let mut out = String::from("key,value\n");
                    for (key, value) in v.as_object().expect("fit is an object") {
                        out.push_str(&format!("{key},{}\n", value.as_str().map_or(value.to_string(), str::to_string)));
                    }
                    out
                }
            }
        }
        Command::Diagnose(a) => diagnose_cmd(cli, a)?,
        Command::McSize(a) => study_cmd(cli, a, StudyKind::Size)?,
        Command::McPower(a) => study_cmd(cli, a, StudyKind::Power)?,
        Command::ValidateCondition(a) => study_cmd(cli, a, StudyKind::Condition)?,
        Command::Analyze(a) => {
            let series = load_panel(cli, &a.panel)?;
            let report = analyze_transports(&series.transports(a.panel.transport_mode)?, &a.k, a.beta)?;
            eprint!("{}", report.to_text());
            match cli.format {
                OutFormat::Json => to_json(&report.summary()),
                OutFormat::Csv => summaries_csv(&report.summary().tests),
            }
        }
        Command::Forecast(a) => forecast_cmd(cli, a)?,
        Command::Export(a) => export_cmd(cli, a)?,
    };
    match &cli.out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

fn curve_format(f: OutFormat) -> ExportFormat {
    match f {
        OutFormat::Csv => ExportFormat::Csv,
        OutFormat::Json => ExportFormat::Json,
    }
}

fn load_series(path: &Path) -> Result<AtmSeries> {
    series_from_curves(&read_curves(&std::fs::read_to_string(path)?)?)
}

fn load_panel(cli: &Cli, a: &PanelArgs) -> Result<DistributionSeries> {
    if !a.delimiter.is_ascii() {
        return Err(AtmError::Param(format!("delimiter '{}' is not ASCII", a.delimiter)));
    }
    let schema = PanelSchema {
        period_column: a.period_column.clone(),
        value_column: a.value_column.clone(),
        delimiter: a.delimiter as u8,
    };
    let series = build_distribution_series(&ingest_csv(&a.input, &schema)?, cli.grid_m, a.padding)?;
    for w in &series.warnings {
        eprintln!("warning: {w}");
    }
    Ok(series)
}

fn simulate_cmd(cli: &Cli, a: &SimulateArgs) -> Result<String> {
    let seed = cli.seed.unwrap_or(0);
    if a.panel {
        let config = SyntheticPanelConfig {
            periods: a.n,
            points_per_period: a.points_per_period,
            coefficients: a.alpha.clone(),
            family: a.family,
            seed,
            grid_cells: cli.grid_m,
            burn_in: a.burn_in,
            lo: 0.0,
            hi: 1.0,
            base_skew: 0.0,
            first_label: 1,
        };
        let panel = generate_panel(&config)?.panel;
        return match cli.format {
            OutFormat::Csv => Ok(panel.to_csv()),
            OutFormat::Json => Ok(to_json(&panel)),
        };
    }
    let config = AtmConfig {
        coefficients: a.alpha.clone(),
        n: a.n,
        burn_in: a.burn_in,
        family: a.family,
        seed,
        grid_cells: cli.grid_m,
    };
    let series = simulate(&config)?;
    let curves: Vec<CurveData> =
        series.maps().iter().enumerate().map(|(i, t)| CurveData::from_curve(format!("T{}", i + 1), t)).collect();
    Ok(render_curves(&curves, curve_format(cli.format)))
}

fn summaries_csv(rows: &[ReportSummary]) -> String {
    let mut out = String::from("test,K,statistic,dof,p_value,f_n,l_n\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{},{},{}\n", r.kind, r.k, r.statistic, r.dof, r.p_value, r.f_n, r.l_n));
    }
    out
}

fn diagnose_cmd(cli: &Cli, a: &DiagnoseArgs) -> Result<String> {
    let series = load_series(&a.input.input)?;
    let fit = fit_alpha(&series)?;
    let mut reports = Vec::new();
    if a.test != TestChoice::Split {
        reports.extend(mcleod_tests(&series, &fit, &a.k, a.beta)?);
    }
    if a.test != TestChoice::Mcleod {
        let (f0, l0) = default_split(series.len());
        reports.extend(split_tests(&series, &a.k, a.beta, a.f_n.unwrap_or(f0), a.l_n.unwrap_or(l0))?);
    }
    let rows: Vec<ReportSummary> = reports.iter().map(|r| r.summary()).collect();
    Ok(match cli.format {
        OutFormat::Json => to_json(&serde_json::json!({ "fit": fit, "tests": rows })),
        OutFormat::Csv => summaries_csv(&rows),
    })
}

fn study_cmd(cli: &Cli, a: &StudyArgs, kind: StudyKind) -> Result<String> {
    let mut spec = match &a.config {
        Some(path) => StudySpec::from_file(path)?,
        None => StudySpec { grid_cells: cli.grid_m, ..StudySpec::new(kind) },
    };
    if spec.kind != kind {
        return Err(AtmError::Param(format!("config describes a {} study, expected {kind}", spec.kind)));
    }
    if let Some(seed) = cli.seed {
        spec.master_seed = seed;
    }
    if let Some(reps) = a.reps {
        spec.reps = reps;
    }
    if let Some(family) = a.family {
        spec.family = family;
    }
    spec.validate()?;
    let table = run_study(&spec)?;
    eprint!("{}", table.to_text());
    table.render(match cli.format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
    })
}

#[derive(Serialize)]
struct ForecastRow<'a> {
    period: &'a str,
    index: usize,
    alpha_hat: Option<f64>,
    wasserstein_error: f64,
    baseline_error: f64,
}

fn forecast_cmd(cli: &Cli, a: &ForecastArgs) -> Result<String> {
    let series = load_panel(cli, &a.panel)?;
    let start = a.start.unwrap_or(a.train_len);
    let end = a.end.unwrap_or(series.len().saturating_sub(1));
    let result = rolling_forecast_with(&series, a.panel.transport_mode, a.train_len, start, end)?;
    eprintln!(
        "average Wasserstein error {:.6} (barycenter baseline {:.6}) over {} periods",
        result.average_error,
        result.baseline_average_error,
        result.records.len()
    );
    let rows: Vec<ForecastRow> = result
        .records
        .iter()
        .map(|r| ForecastRow {
            period: &r.period,
            index: r.index,
            alpha_hat: r.alpha_hat,
            wasserstein_error: r.wasserstein_error,
            baseline_error: r.baseline_error,
        })
        .collect();
    Ok(match cli.format {
        OutFormat::Json => to_json(&serde_json::json!({
            "train_len": result.train_len,
            "average_error": result.average_error,
            "baseline_average_error": result.baseline_average_error,
            "records": rows,
        })),
        OutFormat::Csv => {
            let mut out = String::from("period,index,alpha_hat,wasserstein_error,baseline_error\n");
            for r in &rows {
                let alpha = r.alpha_hat.map_or(String::new(), |v| v.to_string());
                out.push_str(&format!("{},{},{alpha},{},{}\n", r.period, r.index, r.wasserstein_error, r.baseline_error));
            }
            out
        }
    })
}

fn export_cmd(cli: &Cli, a: &ExportArgs) -> Result<String> {
    let series = load_panel(cli, &a.panel)?;
    let labels = &series.periods;
    let curves: Vec<CurveData> = match a.what {
        Curves::Quantiles => labels.iter().zip(&series.quantiles).map(|(p, q)| CurveData::from_curve(p.as_str(), q)).collect(),
        Curves::Densities => labels.iter().zip(&series.quantiles).map(|(p, q)| CurveData::density_proxy(p.as_str(), q)).collect(),
        Curves::Barycenter => vec![CurveData::from_curve("barycenter", &series.barycenter_q)],
        Curves::Transports => {
            let t = series.transports(a.panel.transport_mode)?;
            let skip = labels.len() - t.len();
            labels[skip..].iter().zip(t.maps()).map(|(p, m)| CurveData::from_curve(p.as_str(), m)).collect()
        }
        Curves::Acf => {
            let report = analyze_transports(&series.transports(a.panel.transport_mode)?, &[a.k], 0.05)?;
            vec![
                CurveData::acf_bars("mcleod", &report.mcleod[0]),
                CurveData::acf_bars("split", &report.split[0]),
            ]
        }
    };
    Ok(render_curves(&curves, curve_format(cli.format)))
}
