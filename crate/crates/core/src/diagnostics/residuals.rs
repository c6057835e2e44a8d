use crate::error::{AtmError, Result};
use crate::estimation::SeriesStats;
use crate::transport::{compose, contract_with_inverse, lerp, AtmSeries, MonotoneCurve};
use serde::Serialize;

/// Residual maps `T_i ∘ [α ⊙ T_{i−1}]⁻¹` over a contiguous index range.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualSet {
    residuals: Vec<MonotoneCurve>,
    /// 1-based series index of the first residual.
    first: usize,
    alpha_used: f64,
    split: Option<(usize, usize)>,
    /// `[α ⊙ T_{i−1}]⁻¹` for each residual, reused by the derivative.
    #[serde(skip)]
    preimages: Vec<MonotoneCurve>,
}

impl ResidualSet {
    pub fn residuals(&self) -> &[MonotoneCurve] {
        &self.residuals
    }

    pub fn len(&self) -> usize {
        self.residuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residuals.is_empty()
    }

    /// First and last series index covered (1-based, inclusive).
    pub fn index_range(&self) -> (usize, usize) {
        (self.first, self.first + self.residuals.len() - 1)
    }

    pub fn alpha_used(&self) -> f64 {
        self.alpha_used
    }

    /// `(f_n, l_n)` when the set came from a proper split.
    pub fn split(&self) -> Option<(usize, usize)> {
        self.split
    }

    /// Residual at series index `i`.
    pub fn at(&self, i: usize) -> &MonotoneCurve {
        &self.residuals[i - self.first]
    }

    pub(crate) fn preimage_at(&self, i: usize) -> &MonotoneCurve {
        &self.preimages[i - self.first]
    }
}

fn check_split(n: usize, f_n: usize, l_n: usize) -> Result<()> {
    if l_n < 2 || l_n > n || f_n < 2 || f_n > n {
        return Err(AtmError::Range(format!(
            "split (f_n = {f_n}, l_n = {l_n}) invalid for n = {n}; need 2 <= f_n, l_n <= n"
        )));
    }
    Ok(())
}

/// Residual maps for `i = max(n − l_n + 1, 2), …, n` at contraction `alpha`.
/// With `f_n = l_n = n` this is the full residual set `i = 2, …, n`.
pub fn residuals(series: &AtmSeries, alpha: f64, f_n: usize, l_n: usize) -> Result<ResidualSet> {
    residuals_with(&SeriesStats::new(series), alpha, f_n, l_n)
}

pub(crate) fn residuals_with(
    stats: &SeriesStats<'_>,
    alpha: f64,
    f_n: usize,
    l_n: usize,
) -> Result<ResidualSet> {
    let series = stats.series();
    let n = series.len();
    check_split(n, f_n, l_n)?;
    if !(alpha.abs() < 1.0) {
        return Err(AtmError::Param(format!("residuals need |alpha| < 1, got {alpha}")));
    }
    let first = (n - l_n + 1).max(2);
    let mut residuals = Vec::with_capacity(n - first + 1);
    let mut preimages = Vec::with_capacity(n - first + 1);
    for i in first..=n {
        let z = preimage(stats, alpha, i)?;
        residuals.push(compose(series.at(i), &z)?);
        preimages.push(z);
    }
    let split = if f_n == n && l_n == n { None } else { Some((f_n, l_n)) };
    Ok(ResidualSet { residuals, first, alpha_used: alpha, split, preimages })
}

/// `[α ⊙ T_{i−1}]⁻¹`.
fn preimage(stats: &SeriesStats<'_>, alpha: f64, i: usize) -> Result<MonotoneCurve> {
    let prev = stats.series().at(i - 1);
    let inv = (alpha < 0.0).then(|| stats.inverse(i - 1));
    Ok(contract_with_inverse(alpha, prev, inv)?.invert())
}

/// Floor on the magnitude of the derivative's denominator.
pub const DENOMINATOR_FLOOR: f64 = 1e-6;

fn floored(d: f64) -> f64 {
    if d.abs() < DENOMINATOR_FLOOR {
        DENOMINATOR_FLOOR.copysign(if d == 0.0 { 1.0 } else { d })
    } else {
        d
    }
}

/// Node values of `g_i(α, x) = ∂/∂α T_i ∘ [α ⊙ T_{i−1}]⁻¹(x)`, `i ≥ 2`.
pub fn g_derivative(series: &AtmSeries, alpha: f64, i: usize) -> Result<Vec<f64>> {
    if !(alpha.abs() < 1.0) {
        return Err(AtmError::Param(format!("derivative needs |alpha| < 1, got {alpha}")));
    }
    if i < 2 || i > series.len() {
        return Err(AtmError::Range(format!("derivative index {i} outside 2..={}", series.len())));
    }
    let stats = SeriesStats::new(series);
    let z = preimage(&stats, alpha, i)?;
    Ok(g_with(&stats, alpha, i, &z))
}

pub(crate) fn g_with(stats: &SeriesStats<'_>, alpha: f64, i: usize, z: &MonotoneCurve) -> Vec<f64> {
    let series = stats.series();
    let grid = *series.grid();
    let cur_slope = series.at(i).derivative();
    let prev = series.at(i - 1);
    if alpha >= 0.0 {
        let prev_slope = prev.derivative();
        z.values()
            .iter()
            .map(|&zj| {
                let at = grid.locate_clamped(zj);
                let num = zj - lerp(prev.values(), at);
                let den = floored(alpha * (lerp(&prev_slope, at) - 1.0) + 1.0);
                lerp(&cur_slope, at) * num / den
            })
            .collect()
    } else {
        let inv = stats.inverse(i - 1);
        let inv_slope = inv.derivative();
        z.values()
            .iter()
            .map(|&zj| {
                // T_{i−1}⁻¹ lives on its own grid over the range, which equals the domain
                let num = lerp(inv.values(), inv.grid().locate_clamped(zj)) - zj;
                let at = grid.locate_clamped(zj);
                let den = floored(alpha * (1.0 - lerp(&inv_slope, at)) + 1.0);
                lerp(&cur_slope, at) * num / den
            })
            .collect()
    }
}

/// Derivative curves `g_i` for every index of a residual set.
pub(crate) fn g_for_set(stats: &SeriesStats<'_>, res: &ResidualSet) -> Vec<Vec<f64>> {
    let (first, last) = res.index_range();
    (first..=last)
        .map(|i| g_with(stats, res.alpha_used(), i, res.preimage_at(i)))
        .collect()
}
