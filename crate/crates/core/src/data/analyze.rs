use crate::diagnostics::{default_split, mcleod_tests_with, split_tests_with, DiagnosticReport, ReportSummary};
use crate::error::{AtmError, Result};
use crate::estimation::{AlphaFit, SeriesStats};
use crate::transport::AtmSeries;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Shortest series accepted by [`analyze_transports`].
pub const MIN_ANALYSIS_LEN: usize = 20;

/// First-order fit plus both portmanteau tests at each requested lag count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub fit: AlphaFit,
    pub mcleod: Vec<DiagnosticReport>,
    pub split: Vec<DiagnosticReport>,
}

/// Compact JSON form: the fit and the report summaries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisSummary {
    pub n: usize,
    pub fit: AlphaFit,
    pub tests: Vec<ReportSummary>,
}

impl AnalysisReport {
    pub fn summary(&self) -> AnalysisSummary {
        AnalysisSummary {
            n: self.n,
            fit: self.fit.clone(),
            tests: self.mcleod.iter().chain(&self.split).map(DiagnosticReport::summary).collect(),
        }
    }

    /// Plain-text table of statistics and p-values.
    pub fn to_text(&self) -> String {
        let f = &self.fit;
        let mut out = format!(
            "n = {}, alpha_hat = {:.4} (se {:.4}, {:?} branch)\n",
            self.n,
            f.alpha_hat,
            f.std_error(),
            f.branch
        );
        let _ = writeln!(out, "{:>4} {:>8} {:>12} {:>10} {:>7}", "K", "test", "statistic", "p-value", "reject");
        for r in self.mcleod.iter().chain(&self.split) {
            let _ = writeln!(
                out,
                "{:>4} {:>8} {:>12.4} {:>10.4} {:>7}",
                r.dof,
                r.kind.to_string(),
                r.statistic,
                r.p_value,
                if r.reject { "yes" } else { "no" }
            );
        }
        out
    }

    /// True when neither test rejects at any lag count.
    pub fn all_accept(&self) -> bool {
        self.mcleod.iter().chain(&self.split).all(|r| !r.reject)
    }
}

/// Fit the first-order model and run both tests at each lag count in `ks`,
/// the split test with the default `(⌊n/2⌋, n)` split.
pub fn analyze_transports(series: &AtmSeries, ks: &[usize], beta: f64) -> Result<AnalysisReport> {
    let n = series.len();
    if n < MIN_ANALYSIS_LEN {
        return Err(AtmError::Range(format!("series of length {n} below {MIN_ANALYSIS_LEN}")));
    }
    let stats = SeriesStats::new(series);
    let fit = stats.fit()?;
    let (mcleod, _) = mcleod_tests_with(&stats, fit.alpha_hat, ks, beta)?;
    let (f_n, l_n) = default_split(n);
    let (split, _) = split_tests_with(&stats, ks, beta, f_n, l_n)?;
    Ok(AnalysisReport { n, fit, mcleod, split })
}
