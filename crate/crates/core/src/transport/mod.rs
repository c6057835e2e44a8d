//! Piecewise-linear monotone maps on a uniform grid.
//!
//! Everything downstream (innovation maps, simulated series, residuals,
//! empirical quantile functions) is a [`MonotoneCurve`]: node values of a
//! nondecreasing function on `[domain.lo, domain.hi]`, pinned to the
//! endpoints of its codomain, linearly interpolated between nodes.

mod metric;
mod ops;
mod series;

pub use metric::{
    barycenter, centered_inner, d1_distance, quantile_l2, trapezoid, wasserstein_distance,
};
pub use ops::{alpha_contract, compose};
pub(crate) use ops::contract_with_inverse;
pub use series::AtmSeries;

use crate::error::{AtmError, Result};
use serde::{Deserialize, Serialize};

/// Points this far outside the domain (relative to its width) are clamped
/// instead of rejected.
pub const DOMAIN_CLAMP_TOL: f64 = 1e-12;
/// Allowed overhang of an inner map's range over the outer map's domain.
pub const RANGE_SLACK: f64 = 1e-9;

/// A closed, bounded interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(AtmError::Param(format!(
                "interval [{lo}, {hi}] must be finite with lo < hi"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn unit() -> Self {
        Interval { lo: 0.0, hi: 1.0 }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// `self ⊆ other` up to an absolute slack.
    pub fn within(&self, other: &Interval, slack: f64) -> bool {
        self.lo >= other.lo - slack && self.hi <= other.hi + slack
    }
}

/// Uniform grid with `m` cells (`m + 1` nodes) over an interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    domain: Interval,
    m: usize,
}

impl Grid {
    pub fn new(domain: Interval, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(AtmError::Param(format!("grid needs at least 2 cells, got {m}")));
        }
        Ok(Grid { domain, m })
    }

    /// Grid over `[0, 1]`.
    pub fn unit(m: usize) -> Result<Self> {
        Grid::new(Interval::unit(), m)
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn cells(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.m + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.domain.width() / self.m as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        if j == self.m {
            return self.domain.hi;
        }
        self.domain.lo + self.domain.width() * (j as f64) / (self.m as f64)
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.m).map(|j| self.node(j)).collect()
    }

    /// Locate `x` (assumed inside the domain) as `(cell, fraction)`.
    /// Points within 1e-9 cells of a node snap onto it with fraction 0.
    pub(crate) fn locate(&self, x: f64) -> (usize, f64) {
        let t = ((x - self.domain.lo) / self.step()).max(0.0);
        // truncation is floor for t >= 0 and avoids a libm call
        let k = t as usize;
        let frac = t - k as f64;
        if frac < 1e-9 {
            return (k.min(self.m), 0.0);
        }
        if 1.0 - frac < 1e-9 {
            return ((k + 1).min(self.m), 0.0);
        }
        let k = k.min(self.m - 1);
        (k, (t - k as f64).clamp(0.0, 1.0))
    }

    /// Piecewise-linear interpolation of node data, clamping `x` into the domain.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        lerp(values, self.locate_clamped(x))
    }

    /// [`Grid::locate`] after clamping `x` into the domain.
    pub(crate) fn locate_clamped(&self, x: f64) -> (usize, f64) {
        self.locate(x.clamp(self.domain.lo, self.domain.hi))
    }
}

/// Node data interpolated at a located point.
pub(crate) fn lerp(values: &[f64], (k, frac): (usize, f64)) -> f64 {
    if frac == 0.0 {
        return values[k];
    }
    values[k] + frac * (values[k + 1] - values[k])
}

/// Nondecreasing piecewise-linear function on a uniform grid, pinned to the
/// endpoints of its range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneCurve {
    grid: Grid,
    values: Vec<f64>,
    range: Interval,
}

impl MonotoneCurve {
    /// Validate node values. Fails unless they are nondecreasing, inside
    /// `range`, and hit `range.lo` / `range.hi` exactly at the ends.
    pub fn new(grid: Grid, values: Vec<f64>, range: Interval) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(AtmError::Param(format!(
                "expected {} node values, got {}",
                grid.len(),
                values.len()
            )));
        }
        let curve = MonotoneCurve { grid, values, range };
        if !curve.satisfies_invariants() {
            return Err(AtmError::Param(
                "values must be finite, nondecreasing and pinned to the range endpoints".into(),
            ));
        }
        Ok(curve)
    }

    /// Build from raw node values, repairing small violations: clamp into
    /// `range`, take the running maximum, then pin both endpoints.
    pub fn projected(grid: Grid, mut values: Vec<f64>, range: Interval) -> Self {
        assert_eq!(values.len(), grid.len(), "node count must match the grid");
        let mut running = range.lo;
        for v in values.iter_mut() {
            let c = if v.is_nan() { running } else { v.clamp(range.lo, range.hi) };
            running = running.max(c);
            *v = running;
        }
        values[0] = range.lo;
        *values.last_mut().unwrap() = range.hi;
        MonotoneCurve { grid, values, range }
    }

    /// Sample `f` at the grid nodes and project.
    pub fn from_fn(grid: Grid, range: Interval, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.len()).map(|j| f(grid.node(j))).collect();
        MonotoneCurve::projected(grid, values, range)
    }

    /// Identity transport on `grid`'s domain.
    pub fn identity(grid: Grid) -> Self {
        MonotoneCurve::projected(grid, grid.nodes(), grid.domain())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn range(&self) -> Interval {
        self.range
    }

    pub fn domain(&self) -> Interval {
        self.grid.domain()
    }

    /// True when the curve maps its domain onto itself.
    pub fn is_transport(&self) -> bool {
        self.range == self.grid.domain()
    }

    pub fn is_identity(&self) -> bool {
        self.is_transport()
            && self
                .values
                .iter()
                .enumerate()
                .all(|(j, &v)| v == self.grid.node(j))
    }

    pub fn satisfies_invariants(&self) -> bool {
        let v = &self.values;
        v.len() == self.grid.len()
            && v.iter().all(|x| x.is_finite() && self.range.contains(*x))
            && v.windows(2).all(|w| w[0] <= w[1])
            && v[0] == self.range.lo
            && v[v.len() - 1] == self.range.hi
    }

    /// Value at `x`; points outside the domain by more than the clamp
    /// tolerance are an error.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        let d = self.grid.domain();
        let tol = DOMAIN_CLAMP_TOL * d.width().max(1.0);
        if !(x >= d.lo - tol && x <= d.hi + tol) {
            return Err(AtmError::Domain { x, lo: d.lo, hi: d.hi });
        }
        Ok(self.grid.interpolate(&self.values, x))
    }

    /// Value at `x` with silent clamping into the domain.
    pub(crate) fn eval_clamped(&self, x: f64) -> f64 {
        self.grid.interpolate(&self.values, x)
    }

    /// Generalized inverse `y ↦ inf{x : T(x) ≥ y}` sampled on a uniform grid
    /// over the range, with the same number of cells.
    pub fn invert(&self) -> MonotoneCurve {
        let out_grid = Grid { domain: self.range, m: self.grid.m };
        let v = &self.values;
        let h = self.grid.step();
        let mut out = Vec::with_capacity(out_grid.len());
        let mut k = 0usize;
        for j in 0..out_grid.len() {
            let y = out_grid.node(j);
            while k < self.grid.m - 1 && v[k + 1] < y {
                k += 1;
            }
            let x = if v[k] >= y {
                self.grid.node(k)
            } else if v[k + 1] < y {
                // only reachable through rounding at the upper end
                self.grid.domain().hi
            } else {
                self.grid.node(k) + h * (y - v[k]) / (v[k + 1] - v[k])
            };
            out.push(x);
        }
        MonotoneCurve::projected(out_grid, out, self.grid.domain())
    }

    /// Finite-difference slope at every node: central in the interior,
    /// one-sided at the two ends, floored at zero.
    pub fn derivative(&self) -> Vec<f64> {
        let v = &self.values;
        let h = self.grid.step();
        let m = self.grid.m;
        let mut d = Vec::with_capacity(m + 1);
        d.push((v[1] - v[0]) / h);
        for j in 1..m {
            d.push((v[j + 1] - v[j - 1]) / (2.0 * h));
        }
        d.push((v[m] - v[m - 1]) / h);
        for x in d.iter_mut() {
            *x = x.max(0.0);
        }
        d
    }

    /// Largest node-wise absolute difference to `other`.
    pub fn sup_distance(&self, other: &MonotoneCurve) -> Result<f64> {
        if self.grid != other.grid {
            return Err(AtmError::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}
