//! Plot-ready curve data as long-format CSV (`object_id,node,value`) or JSON.
//! Numbers are written in shortest round-trip form, so identical inputs give
//! identical bytes and re-parsing restores every value exactly.

use crate::diagnostics::DiagnosticReport;
use crate::error::{AtmError, Result};
use crate::transport::{AtmSeries, Grid, Interval, MonotoneCurve};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
}

/// A named sequence of `(node, value)` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveData {
    pub object_id: String,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl CurveData {
    pub fn from_curve(object_id: impl Into<String>, curve: &MonotoneCurve) -> Self {
        CurveData { object_id: object_id.into(), nodes: curve.grid().nodes(), values: curve.values().to_vec() }
    }

    /// Density proxy of a quantile function: `1 / Q′(u)` against `Q(u)` at the
    /// interior nodes where the slope is positive.
    pub fn density_proxy(object_id: impl Into<String>, quantile: &MonotoneCurve) -> Self {
        let slope = quantile.derivative();
        let v = quantile.values();
        let (nodes, values) = (1..v.len() - 1).filter(|&j| slope[j] > 0.0).map(|j| (v[j], 1.0 / slope[j])).unzip();
        CurveData { object_id: object_id.into(), nodes, values }
    }

    /// Autocorrelation bars: lag against `ρ̂(lag)`.
    pub fn acf_bars(object_id: impl Into<String>, report: &DiagnosticReport) -> Self {
        CurveData {
            object_id: object_id.into(),
            nodes: (1..=report.acf.k).map(|l| l as f64).collect(),
            values: report.acf.rho.clone(),
        }
    }
}

pub fn curves_to_csv(objects: &[CurveData]) -> String {
    let mut out = String::from("object_id,node,value\n");
    for o in objects {
        let id = csv_field(&o.object_id);
        for (x, y) in o.nodes.iter().zip(&o.values) {
            out.push_str(&format!("{id},{x},{y}\n"));
        }
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn curves_to_json(objects: &[CurveData]) -> String {
    serde_json::to_string_pretty(objects).expect("curves serialize")
}

/// Parse long-format CSV back into curves, grouping consecutive rows by id.
pub fn read_curves_csv(text: &str) -> Result<Vec<CurveData>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut out: Vec<CurveData> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| AtmError::Parse { line: e.position().map_or(0, |p| p.line()), message: e.to_string() })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 3 {
            return Err(AtmError::Parse { line, message: format!("expected 3 fields, got {}", rec.len()) });
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| AtmError::Parse { line, message: format!("'{s}' is not a number") });
        let (x, y) = (num(&rec[1])?, num(&rec[2])?);
        match out.last_mut() {
            Some(c) if c.object_id == rec[0] => {
                c.nodes.push(x);
                c.values.push(y);
            }
            _ => out.push(CurveData { object_id: rec[0].to_string(), nodes: vec![x], values: vec![y] }),
        }
    }
    Ok(out)
}

/// Parse curves from either the CSV or the JSON form.
pub fn read_curves(text: &str) -> Result<Vec<CurveData>> {
    if text.trim_start().starts_with('[') {
        serde_json::from_str(text).map_err(|e| AtmError::Parse { line: e.line() as u64, message: e.to_string() })
    } else {
        read_curves_csv(text)
    }
}

/// Rebuild a transport series from exported curves. Every curve must sit on
/// the same uniform grid and map the grid's domain onto itself.
pub fn series_from_curves(curves: &[CurveData]) -> Result<AtmSeries> {
    let first = curves.first().ok_or(AtmError::EmptyInput("no curves"))?;
    let nodes = &first.nodes;
    if nodes.len() < 3 {
        return Err(AtmError::Schema(format!("curve '{}' has fewer than 3 nodes", first.object_id)));
    }
    let domain = Interval::new(nodes[0], nodes[nodes.len() - 1]).map_err(|e| AtmError::Schema(e.to_string()))?;
    let grid = Grid::new(domain, nodes.len() - 1).map_err(|e| AtmError::Schema(e.to_string()))?;
    let tol = 1e-9 * domain.width();
    let maps = curves
        .iter()
        .map(|c| {
            if c.nodes.len() != grid.len() || c.nodes.iter().enumerate().any(|(j, x)| (x - grid.node(j)).abs() > tol) {
                return Err(AtmError::Schema(format!("curve '{}' is not on the common uniform grid", c.object_id)));
            }
            MonotoneCurve::new(grid, c.values.clone(), domain)
                .map_err(|e| AtmError::Schema(format!("curve '{}': {e}", c.object_id)))
        })
        .collect::<Result<Vec<_>>>()?;
    AtmSeries::new(maps).map_err(|e| match e {
        AtmError::Range(m) => AtmError::Schema(m),
        e => e,
    })
}

/// Test summary row followed by one `(lag, rho)` row per lag.
pub fn report_to_csv(report: &DiagnosticReport) -> String {
    let mut out = format!("statistic,p_value\n{},{}\nlag,rho\n", report.statistic, report.p_value);
    for (l, r) in report.acf.rho.iter().enumerate() {
        out.push_str(&format!("{},{r}\n", l + 1));
    }
    out
}

pub fn render_curves(objects: &[CurveData], format: ExportFormat) -> String {
    match format {
        ExportFormat::Csv => curves_to_csv(objects),
        ExportFormat::Json => curves_to_json(objects),
    }
}

/// Write `contents` to a temporary file next to `path`, then rename it over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| AtmError::Param(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// Render and atomically write curves.
pub fn export_curves(objects: &[CurveData], path: &Path, format: ExportFormat) -> Result<()> {
    write_atomic(path, render_curves(objects, format).as_bytes())
}
