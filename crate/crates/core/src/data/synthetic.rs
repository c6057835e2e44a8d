//! Synthetic per-period samples whose distributions follow an ATM process
//! around a fixed base distribution, for exercising the empirical pipeline
//! when no real panel is at hand.

use super::panel::RawPanel;
use crate::atm::{simulate, AtmConfig, InnovationFamily, DEFAULT_BURN_IN};
use crate::error::{AtmError, Result};
use crate::rng::RandomStream;
use crate::transport::MonotoneCurve;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticPanelConfig {
    pub periods: usize,
    pub points_per_period: usize,
    /// Contraction coefficients of the generating process.
    pub coefficients: Vec<f64>,
    pub family: InnovationFamily,
    pub seed: u64,
    /// Cells of the grid carrying the simulated maps.
    pub grid_cells: usize,
    pub burn_in: usize,
    /// Samples are mapped affinely from `[0, 1]` onto `[lo, hi]`.
    pub lo: f64,
    pub hi: f64,
    /// Skew of the base distribution, in `[0, 1)`; 0 is uniform.
    pub base_skew: f64,
    /// First period label.
    pub first_label: i64,
}

impl SyntheticPanelConfig {
    /// Temperature-like defaults: 59 yearly periods of 122 readings.
    pub fn temperature_like(seed: u64) -> Self {
        SyntheticPanelConfig {
            periods: 59,
            points_per_period: 122,
            coefficients: vec![0.5],
            family: InnovationFamily::Power,
            seed,
            grid_cells: 1000,
            burn_in: DEFAULT_BURN_IN,
            lo: -25.0,
            hi: 15.0,
            base_skew: 0.6,
            first_label: 1960,
        }
    }
}

/// Quantile of the base distribution on `[0, 1]`:
/// `u − s·sin(2πu)/(2π)`, increasing for `0 ≤ s < 1`.
pub fn base_quantile(u: f64, skew: f64) -> f64 {
    (u - skew * (2.0 * PI * u).sin() / (2.0 * PI)).clamp(0.0, 1.0)
}

/// Generated panel together with the maps that produced it.
#[derive(Debug, Clone)]
pub struct SyntheticPanel {
    pub panel: RawPanel,
    /// Transport of the base distribution onto each period, on `[0, 1]`.
    pub maps: Vec<MonotoneCurve>,
}

/// Draw period `i` as `lo + (hi − lo) · T_i(Q_base(U))`, `U` uniform.
pub fn generate_panel(config: &SyntheticPanelConfig) -> Result<SyntheticPanel> {
    if config.points_per_period < 2 || config.periods < 2 {
        return Err(AtmError::Param("need at least 2 periods of at least 2 points".into()));
    }
    if !(config.hi > config.lo) || !(0.0..1.0).contains(&config.base_skew) {
        return Err(AtmError::Param("need lo < hi and base_skew in [0, 1)".into()));
    }
    let root = RandomStream::new(config.seed);
    let sim = AtmConfig {
        coefficients: config.coefficients.clone(),
        n: config.periods,
        burn_in: config.burn_in,
        family: config.family,
        seed: root.child(0).key(),
        grid_cells: config.grid_cells,
    };
    let series = simulate(&sim)?;
    let mut draws = root.child(1);
    let width = config.hi - config.lo;
    let groups = series
        .maps()
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let samples = (0..config.points_per_period)
                .map(|_| {
                    let y = base_quantile(draws.gen::<f64>(), config.base_skew);
                    config.lo + width * t.evaluate(y).expect("base quantile lies in [0, 1]")
                })
                .collect();
            ((config.first_label + i as i64).to_string(), samples)
        })
        .collect();
    Ok(SyntheticPanel { panel: RawPanel::new(groups)?, maps: series.maps().to_vec() })
}
