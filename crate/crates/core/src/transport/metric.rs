use super::{Grid, Interval, MonotoneCurve};
use crate::error::{AtmError, Result};

/// Trapezoid rule for node data `f(j)`, `j = 0..=m`, over `grid`.
pub fn trapezoid(grid: &Grid, f: impl Fn(usize) -> f64) -> f64 {
    let m = grid.cells();
    let mut s = 0.5 * (f(0) + f(m));
    for j in 1..m {
        s += f(j);
    }
    s * grid.step()
}

fn same_grid(f: &MonotoneCurve, g: &MonotoneCurve) -> Result<Grid> {
    if f.grid() != g.grid() {
        return Err(AtmError::GridMismatch);
    }
    Ok(*f.grid())
}

/// `∫ (f(x) − x)(g(x) − x) dx` over the shared domain.
pub fn centered_inner(f: &MonotoneCurve, g: &MonotoneCurve) -> Result<f64> {
    let grid = same_grid(f, g)?;
    let (fv, gv) = (f.values(), g.values());
    Ok(trapezoid(&grid, |j| {
        let x = grid.node(j);
        (fv[j] - x) * (gv[j] - x)
    }))
}

/// L¹ distance `∫ |f(x) − g(x)| dx`.
pub fn d1_distance(f: &MonotoneCurve, g: &MonotoneCurve) -> Result<f64> {
    let grid = same_grid(f, g)?;
    let (fv, gv) = (f.values(), g.values());
    Ok(trapezoid(&grid, |j| (fv[j] - gv[j]).abs()))
}

/// 2-Wasserstein distance between two measures given by their quantile
/// functions on a common probability grid.
pub fn wasserstein_distance(q1: &MonotoneCurve, q2: &MonotoneCurve) -> Result<f64> {
    let grid = same_grid(q1, q2)?;
    quantile_l2(&grid, q1.values(), q2.values())
}

/// `(∫ (a − b)²)^{1/2}` for raw quantile node values. Unlike
/// [`wasserstein_distance`] this accepts degenerate (constant) quantiles.
pub fn quantile_l2(grid: &Grid, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != grid.len() || b.len() != grid.len() {
        return Err(AtmError::GridMismatch);
    }
    Ok(trapezoid(grid, |j| (a[j] - b[j]).powi(2)).max(0.0).sqrt())
}

/// Wasserstein barycenter of quantile functions: their node-wise mean.
pub fn barycenter(quantiles: &[MonotoneCurve]) -> Result<MonotoneCurve> {
    let first = quantiles.first().ok_or(AtmError::EmptyInput("barycenter of no curves"))?;
    let grid = *first.grid();
    if quantiles.iter().any(|q| *q.grid() != grid) {
        return Err(AtmError::GridMismatch);
    }
    let n = quantiles.len() as f64;
    let mut values = vec![0.0; grid.len()];
    let (mut lo, mut hi) = (0.0, 0.0);
    for q in quantiles {
        for (acc, v) in values.iter_mut().zip(q.values()) {
            *acc += v;
        }
        lo += q.range().lo;
        hi += q.range().hi;
    }
    for v in values.iter_mut() {
        *v /= n;
    }
    // shared ranges are kept exactly rather than re-averaged
    let range = if quantiles.iter().all(|q| q.range() == first.range()) {
        first.range()
    } else {
        Interval::new(lo / n, hi / n)?
    };
    Ok(MonotoneCurve::projected(grid, values, range))
}
