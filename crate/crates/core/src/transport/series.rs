use super::{centered_inner, Grid, MonotoneCurve};
use crate::error::{AtmError, Result};

/// Time-ordered transport maps `T_1, …, T_n` sharing one grid, each mapping
/// the grid's domain onto itself.
#[derive(Debug, Clone, PartialEq)]
pub struct AtmSeries {
    grid: Grid,
    maps: Vec<MonotoneCurve>,
}

impl AtmSeries {
    pub fn new(maps: Vec<MonotoneCurve>) -> Result<Self> {
        if maps.len() < 2 {
            return Err(AtmError::Range(format!(
                "a series needs at least 2 maps, got {}",
                maps.len()
            )));
        }
        let grid = *maps[0].grid();
        for (i, t) in maps.iter().enumerate() {
            if *t.grid() != grid {
                return Err(AtmError::GridMismatch);
            }
            if !t.is_transport() {
                return Err(AtmError::Param(format!("map {i} does not map its domain onto itself")));
            }
        }
        Ok(AtmSeries { grid, maps })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn maps(&self) -> &[MonotoneCurve] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// Map at 1-based time index `i`.
    pub fn at(&self, i: usize) -> &MonotoneCurve {
        &self.maps[i - 1]
    }

    /// Maps `T_first..=T_last` (1-based, inclusive) as a new series.
    pub fn window(&self, first: usize, last: usize) -> Result<AtmSeries> {
        if first < 1 || last > self.len() || last <= first {
            return Err(AtmError::Range(format!(
                "window {first}..={last} invalid for a series of length {}",
                self.len()
            )));
        }
        AtmSeries::new(self.maps[first - 1..last].to_vec())
    }

    pub fn inverses(&self) -> Vec<MonotoneCurve> {
        self.maps.iter().map(MonotoneCurve::invert).collect()
    }

    /// `(1/n) Σ ∫ (T_i(x) − x)² dx`.
    pub fn mean_squared_displacement(&self) -> f64 {
        mean_sq(&self.maps)
    }
}

pub(crate) fn mean_sq(maps: &[MonotoneCurve]) -> f64 {
    maps.iter()
        .map(|t| centered_inner(t, t).expect("maps share a grid"))
        .sum::<f64>()
        / maps.len() as f64
}
