use super::linalg::SquareMatrix;
use super::residuals::{g_for_set, ResidualSet};
use crate::error::{AtmError, Result};
use crate::estimation::SeriesStats;
use crate::transport::{trapezoid, AtmSeries};
use serde::{Deserialize, Serialize};

/// Plug-in estimate of the limiting covariance of the residual autocorrelations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub k: usize,
    /// `σ̂₁² = mean ∫(ε̂_t − x)²`
    pub sigma1_sq: f64,
    /// `σ̂₂⁴ = mean {∫(ε̂_t − x)(ε̂_{t+1} − x)}²`
    pub sigma2_4: f64,
    pub m1_hat: Vec<f64>,
    pub m2_hat: Vec<f64>,
    /// Mean of `m̂_i²` at the contraction used for the residuals.
    pub avar_hat: f64,
    pub matrix: SquareMatrix,
}

impl CovarianceEstimate {
    pub fn truncated(&self, k: usize) -> CovarianceEstimate {
        let (m1, m2) = (self.m1_hat[..k].to_vec(), self.m2_hat[..k].to_vec());
        let mut matrix = SquareMatrix::zeros(k);
        for i in 0..k {
            for j in 0..k {
                matrix.set(i, j, self.matrix.get(i, j));
            }
        }
        CovarianceEstimate { k, m1_hat: m1, m2_hat: m2, matrix, ..self.clone() }
    }
}

/// Residual scale moments `(σ̂₁², σ̂₂⁴)` from lag-0 and lag-1 inner products.
pub(crate) fn scale_moments(lag0: &[f64], lag1: &[f64]) -> Result<(f64, f64)> {
    if lag1.is_empty() {
        return Err(AtmError::Range("need at least two residuals".into()));
    }
    let s1 = lag0.iter().sum::<f64>() / lag0.len() as f64;
    let s2 = lag1.iter().map(|v| v * v).sum::<f64>() / lag1.len() as f64;
    if !(s1 > 0.0) || !(s2 > 0.0) {
        return Err(AtmError::DegenerateSeries(format!(
            "residual moments not positive (sigma1^2 = {s1:.3e}, sigma2^4 = {s2:.3e})"
        )));
    }
    Ok((s1, s2))
}

/// `σ₁⁻⁴ {σ₂⁴ I + c_ov (M₁M₂ᵀ + M₂M₁ᵀ) + c_ra · avar · M₁M₁ᵀ}`, filled on the
/// lower triangle and mirrored.
pub fn assemble(
    sigma1_sq: f64,
    sigma2_4: f64,
    m1: &[f64],
    m2: &[f64],
    avar: f64,
    c_ov: f64,
    c_ra: f64,
) -> SquareMatrix {
    let k = m1.len();
    let scale = 1.0 / (sigma1_sq * sigma1_sq);
    let mut out = SquareMatrix::zeros(k);
    for i in 0..k {
        for j in 0..=i {
            let mut v = c_ov * (m1[i] * m2[j] + m2[i] * m1[j]) + c_ra * avar * m1[i] * m1[j];
            if i == j {
                v += sigma2_4;
            }
            out.set(i, j, scale * v);
            out.set(j, i, scale * v);
        }
    }
    out
}

/// Components `M̂₁`, `M̂₂` at lags `1..=k`.
///
/// `lagged[l][t] = ∫ e_t e_{t+l}`, `g[t]` is the derivative curve at the
/// series index of residual `t`, and `m[i − 1] = m̂_i`. The second component
/// weights each lag product by `m̂_s`, `s` the series index of the later
/// residual; terms with `s = n` have no summand and are left out of the mean.
pub(crate) fn m_components(
    res: &ResidualSet,
    centered: &[Vec<f64>],
    lagged: &[Vec<f64>],
    g: &[Vec<f64>],
    m: &[f64],
    k: usize,
) -> (Vec<f64>, Vec<f64>) {
    let grid = *res.residuals()[0].grid();
    let first = res.index_range().0;
    let n_res = centered.len();
    let mut m1 = Vec::with_capacity(k);
    let mut m2 = Vec::with_capacity(k);
    for l in 1..=k {
        let terms = n_res - l;
        let s1: f64 = (0..terms)
            .map(|t| {
                let (e, gt) = (&centered[t], &g[t + l]);
                trapezoid(&grid, |j| e[j] * gt[j])
            })
            .sum();
        // m̂_s pairs with the later residual's series index s; m̂_n needs T_{n+1}
        let paired: Vec<f64> = (0..terms)
            .filter_map(|t| m.get(first + t + l - 1).map(|ms| lagged[l][t] * ms))
            .collect();
        m1.push(s1 / terms as f64);
        m2.push(if paired.is_empty() { 0.0 } else { paired.iter().sum::<f64>() / paired.len() as f64 });
    }
    (m1, m2)
}

/// Plug-in covariance for the first-order model, evaluated at the
/// contraction that produced `res`.
pub fn covariance_mcleod(series: &AtmSeries, res: &ResidualSet, k: usize) -> Result<CovarianceEstimate> {
    let stats = SeriesStats::new(series);
    covariance_with(&stats, res, k, 1.0, 1.0)
}

pub(crate) fn covariance_with(
    stats: &SeriesStats<'_>,
    res: &ResidualSet,
    k: usize,
    c_ov: f64,
    c_ra: f64,
) -> Result<CovarianceEstimate> {
    if k == 0 || k >= res.len() {
        return Err(AtmError::Range(format!("lag count {k} must be in 1..{}", res.len())));
    }
    let c = super::acf::centered(res.residuals());
    let lagged = super::acf::lagged_inner(res.residuals(), &c, k);
    let g = g_for_set(stats, res);
    let m = stats.m_hats(res.alpha_used())?;
    let avar = m.iter().map(|v| v * v).sum::<f64>() / m.len() as f64;
    from_parts(res, &c, &lagged, &g, &m, avar, k, c_ov, c_ra)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn from_parts(
    res: &ResidualSet,
    centered: &[Vec<f64>],
    lagged: &[Vec<f64>],
    g: &[Vec<f64>],
    m: &[f64],
    avar: f64,
    k: usize,
    c_ov: f64,
    c_ra: f64,
) -> Result<CovarianceEstimate> {
    let (sigma1_sq, sigma2_4) = scale_moments(&lagged[0], &lagged[1])?;
    let (m1, m2) = m_components(res, centered, lagged, g, m, k);
    let matrix = assemble(sigma1_sq, sigma2_4, &m1, &m2, avar, c_ov, c_ra);
    Ok(CovarianceEstimate { k, sigma1_sq, sigma2_4, m1_hat: m1, m2_hat: m2, avar_hat: avar, matrix })
}
