use super::acf::{acf_from_inner, centered, lagged_inner, AcfVector};
use super::chisq::chi_square_sf;
use super::covariance::{from_parts, CovarianceEstimate};
use super::residuals::{g_for_set, residuals_with, ResidualSet};
use crate::error::{AtmError, Result};
use crate::estimation::{AlphaFit, SeriesStats};
use crate::transport::AtmSeries;
use serde::{Deserialize, Serialize};

/// Smallest admissible fit or residual window for the split test.
pub const MIN_SPLIT_WINDOW: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestKind {
    McLeod,
    SampleSplit,
}

impl std::fmt::Display for TestKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TestKind::McLeod => "mcleod",
            TestKind::SampleSplit => "split",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub kind: TestKind,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub beta: f64,
    pub reject: bool,
    /// Contraction used for the residuals.
    pub alpha_hat: f64,
    pub f_n: usize,
    pub l_n: usize,
    pub acf: AcfVector,
    pub cov: CovarianceEstimate,
}

/// Compact serialized form of a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportSummary {
    pub kind: TestKind,
    #[serde(rename = "K")]
    pub k: usize,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub rho: Vec<f64>,
    pub f_n: usize,
    pub l_n: usize,
}

impl DiagnosticReport {
    pub fn summary(&self) -> ReportSummary {
        ReportSummary {
            kind: self.kind,
            k: self.dof,
            statistic: self.statistic,
            dof: self.dof,
            p_value: self.p_value,
            rho: self.acf.rho.clone(),
            f_n: self.f_n,
            l_n: self.l_n,
        }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(AtmError::Param(format!("level {beta} outside (0, 1)")));
    }
    Ok(())
}

fn check_lags(ks: &[usize], n_res: usize) -> Result<usize> {
    let k_max = ks.iter().copied().max().ok_or(AtmError::EmptyInput("lag list"))?;
    if ks.contains(&0) || k_max >= n_res {
        return Err(AtmError::Range(format!("lags {ks:?} must lie in 1..{n_res}")));
    }
    Ok(k_max)
}

/// `p = P(χ²_k > q)` with the statistic clamped at zero from below.
pub fn p_value(statistic: f64, k: usize) -> Result<f64> {
    chi_square_sf(statistic.max(0.0), k)
}

/// Residual-derived quantities shared by every lag count.
struct Workspace {
    res: ResidualSet,
    acf: AcfVector,
    cov: CovarianceEstimate,
}

fn workspace(
    stats: &SeriesStats<'_>,
    alpha: f64,
    f_n: usize,
    l_n: usize,
    k_max: usize,
    c_ov: f64,
    c_ra: f64,
) -> Result<Workspace> {
    let res = residuals_with(stats, alpha, f_n, l_n)?;
    let n_res = res.len();
    if k_max >= n_res {
        return Err(AtmError::Range(format!("lag count {k_max} must be below residual count {n_res}")));
    }
    let c = centered(res.residuals());
    let lagged = lagged_inner(res.residuals(), &c, k_max.max(1));
    let acf = acf_from_inner(&lagged, k_max)?;
    let g = g_for_set(stats, &res);
    let m = stats.m_hats(alpha)?;
    let avar = m.iter().map(|v| v * v).sum::<f64>() / m.len() as f64;
    let cov = from_parts(&res, &c, &lagged, &g, &m, avar, k_max, c_ov, c_ra)?;
    Ok(Workspace { res, acf, cov })
}

fn mcleod_statistic(acf: &AcfVector, cov: &CovarianceEstimate) -> Result<f64> {
    if !cov.matrix.is_positive_definite() {
        return Err(AtmError::SingularCovariance("estimated covariance is not positive definite".into()));
    }
    let (inv, _) = cov.matrix.inverse_checked()?;
    let w = inv.mul_vec(&acf.rho);
    let quad: f64 = acf.rho.iter().zip(&w).map(|(a, b)| a * b).sum();
    Ok(acf.n_eff as f64 * quad)
}

fn finish(
    kind: TestKind,
    statistic: f64,
    beta: f64,
    alpha_hat: f64,
    f_n: usize,
    l_n: usize,
    acf: AcfVector,
    cov: CovarianceEstimate,
) -> Result<DiagnosticReport> {
    let dof = acf.k;
    let p = p_value(statistic, dof)?;
    let reject = p < beta;
    Ok(DiagnosticReport { kind, statistic, dof, p_value: p, beta, reject, alpha_hat, f_n, l_n, acf, cov })
}

/// Portmanteau test with the estimation-corrected covariance, residuals
/// computed over the whole series at `fit.alpha_hat`.
pub fn mcleod_test(series: &AtmSeries, fit: &AlphaFit, k: usize, beta: f64) -> Result<DiagnosticReport> {
    mcleod_tests(series, fit, &[k], beta).map(|mut v| v.remove(0))
}

/// [`mcleod_test`] at several lag counts sharing one residual computation.
pub fn mcleod_tests(series: &AtmSeries, fit: &AlphaFit, ks: &[usize], beta: f64) -> Result<Vec<DiagnosticReport>> {
    let stats = SeriesStats::new(series);
    mcleod_tests_with(&stats, fit.alpha_hat, ks, beta).map(|(r, _)| r)
}

/// [`mcleod_tests`] on precomputed series statistics, also returning the
/// residual set the statistics were computed from.
pub fn mcleod_tests_with(
    stats: &SeriesStats<'_>,
    alpha_hat: f64,
    ks: &[usize],
    beta: f64,
) -> Result<(Vec<DiagnosticReport>, ResidualSet)> {
    check_beta(beta)?;
    let n = stats.series().len();
    let k_max = check_lags(ks, n - 1)?;
    let ws = workspace(stats, alpha_hat, n, n, k_max, 1.0, 1.0)?;
    let reports = ks
        .iter()
        .map(|&k| {
            let (acf, cov) = (ws.acf.truncated(k), ws.cov.truncated(k));
            let q = mcleod_statistic(&acf, &cov)?;
            finish(TestKind::McLeod, q, beta, alpha_hat, n, n, acf, cov)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((reports, ws.res))
}

/// Default split `(⌊n/2⌋, n)`.
pub fn default_split(n: usize) -> (usize, usize) {
    (n / 2, n)
}

/// Sample-splitting portmanteau test: the contraction is fitted on
/// `T_1..T_{f_n}` and residuals are computed on the last `l_n` indices.
pub fn split_test(series: &AtmSeries, k: usize, beta: f64, f_n: usize, l_n: usize) -> Result<DiagnosticReport> {
    split_tests(series, &[k], beta, f_n, l_n).map(|mut v| v.remove(0))
}

/// [`split_test`] at several lag counts sharing one residual computation.
pub fn split_tests(series: &AtmSeries, ks: &[usize], beta: f64, f_n: usize, l_n: usize) -> Result<Vec<DiagnosticReport>> {
    let stats = SeriesStats::new(series);
    split_tests_with(&stats, ks, beta, f_n, l_n).map(|(r, _)| r)
}

/// [`split_tests`] on precomputed series statistics, also returning the
/// residual set the statistics were computed from.
pub fn split_tests_with(
    stats: &SeriesStats<'_>,
    ks: &[usize],
    beta: f64,
    f_n: usize,
    l_n: usize,
) -> Result<(Vec<DiagnosticReport>, ResidualSet)> {
    check_beta(beta)?;
    let series = stats.series();
    let n = series.len();
    if f_n.min(l_n) < MIN_SPLIT_WINDOW || f_n > n || l_n > n {
        return Err(AtmError::Range(format!(
            "split (f_n = {f_n}, l_n = {l_n}) needs {MIN_SPLIT_WINDOW} <= f_n, l_n <= n = {n}"
        )));
    }
    let head = series.window(1, f_n)?;
    let alpha = SeriesStats::new(&head).fit()?.alpha_hat;
    let n_res = n - (n - l_n + 1).max(2) + 1;
    let k_max = check_lags(ks, n_res)?;
    let (c_ra, c_ov) = (l_n as f64 / f_n as f64, (f_n + l_n).saturating_sub(n) as f64 / f_n as f64);
    let ws = workspace(stats, alpha, f_n, l_n, k_max, c_ov, c_ra)?;
    let reports = ks
        .iter()
        .map(|&k| {
            let (acf, cov) = (ws.acf.truncated(k), ws.cov.truncated(k));
            let ss: f64 = acf.rho.iter().map(|r| r * r).sum();
            let q = cov.sigma1_sq * cov.sigma1_sq / cov.sigma2_4 * acf.n_eff as f64 * ss;
            finish(TestKind::SampleSplit, q, beta, alpha, f_n, l_n, acf, cov)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((reports, ws.res))
}
