use super::residuals::ResidualSet;
use crate::error::{AtmError, Result};
use crate::transport::{trapezoid, MonotoneCurve};
use serde::{Deserialize, Serialize};

/// Denominators below this make the autocorrelation undefined.
pub const ACF_DENOMINATOR_MIN: f64 = 1e-12;

/// Sample autocorrelations of residual maps at lags `1..=k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfVector {
    pub k: usize,
    pub rho: Vec<f64>,
    /// Number of residuals in the denominator sum.
    pub n_eff: usize,
}

impl AcfVector {
    /// Keep the first `k` lags.
    pub fn truncated(&self, k: usize) -> AcfVector {
        AcfVector { k, rho: self.rho[..k].to_vec(), n_eff: self.n_eff }
    }
}

/// Node values of `ε(x) − x` for each residual.
pub(crate) fn centered(maps: &[MonotoneCurve]) -> Vec<Vec<f64>> {
    maps.iter()
        .map(|e| {
            let g = e.grid();
            e.values().iter().enumerate().map(|(j, v)| v - g.node(j)).collect()
        })
        .collect()
}

/// `lagged[k][t] = ∫ e_t e_{t+k}` for `k = 0..=max_lag`, 0-based `t`.
pub(crate) fn lagged_inner(maps: &[MonotoneCurve], centered: &[Vec<f64>], max_lag: usize) -> Vec<Vec<f64>> {
    let grid = *maps[0].grid();
    (0..=max_lag)
        .map(|k| {
            (0..centered.len().saturating_sub(k))
                .map(|t| {
                    let (a, b) = (&centered[t], &centered[t + k]);
                    trapezoid(&grid, |j| a[j] * b[j])
                })
                .collect()
        })
        .collect()
}

pub(crate) fn acf_from_inner(lagged: &[Vec<f64>], k: usize) -> Result<AcfVector> {
    let den: f64 = lagged[0].iter().sum();
    if !(den >= ACF_DENOMINATOR_MIN) {
        return Err(AtmError::DegenerateSeries(format!(
            "residual sum of squares {den:.3e} below {ACF_DENOMINATOR_MIN:e}"
        )));
    }
    let rho = (1..=k).map(|l| lagged[l].iter().sum::<f64>() / den).collect();
    Ok(AcfVector { k, rho, n_eff: lagged[0].len() })
}

/// `ρ̂(l) = Σ_t ∫(ε_{t+l} − x)(ε_t − x) / Σ_t ∫(ε_t − x)²` for `l = 1..=k`,
/// summing over the residuals actually present.
pub fn sample_acf(res: &ResidualSet, k: usize) -> Result<AcfVector> {
    let n = res.len();
    if k == 0 || k >= n {
        return Err(AtmError::Range(format!("lag count {k} must be in 1..{n}")));
    }
    let c = centered(res.residuals());
    acf_from_inner(&lagged_inner(res.residuals(), &c, k), k)
}
