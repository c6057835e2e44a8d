//! Simulation of autoregressive transport map processes
//! `T_i = T_{ε_i} ∘ [α_1 ⊙ T_{i−1}] ∘ … ∘ [α_p ⊙ T_{i−p}]`.

use crate::error::{AtmError, Result};
use crate::rng::RandomStream;
use crate::transport::{alpha_contract, compose, AtmSeries, Grid, MonotoneCurve};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Random distortion maps on `[0, 1]` with pointwise mean equal to the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InnovationFamily {
    /// `x + sin(Yπx)/(|Y|π)`, `Y` uniform on `{±5, …, ±15}`.
    #[serde(alias = "e1")]
    Trig,
    /// `x + Y(x² − x)`, `Y ~ U[−1, 1]`.
    #[serde(alias = "e2")]
    Power,
    /// `x + Y x²(1 − x)²`, `Y ~ U[−1, 1]`.
    #[serde(alias = "e3")]
    Poly,
}

impl InnovationFamily {
    pub const ALL: [InnovationFamily; 3] =
        [InnovationFamily::Trig, InnovationFamily::Power, InnovationFamily::Poly];

    /// Draw the family's random parameter `Y`.
    pub fn sample_param<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            InnovationFamily::Trig => {
                let magnitude = rng.gen_range(5..=15) as f64;
                if rng.gen_bool(0.5) {
                    magnitude
                } else {
                    -magnitude
                }
            }
            InnovationFamily::Power | InnovationFamily::Poly => rng.gen_range(-1.0..=1.0),
        }
    }

    /// The closed-form map for parameter `y`, evaluated at `x`.
    pub fn map_value(&self, y: f64, x: f64) -> f64 {
        match self {
            InnovationFamily::Trig => {
                if y == 0.0 {
                    x
                } else {
                    x + (y * PI * x).sin() / (y.abs() * PI)
                }
            }
            InnovationFamily::Power => x + y * (x * x - x),
            InnovationFamily::Poly => x + y * x * x * (1.0 - x) * (1.0 - x),
        }
    }

    /// The map for parameter `y` sampled on `grid` (domain `[0, 1]`).
    pub fn map(&self, y: f64, grid: Grid) -> MonotoneCurve {
        let family = *self;
        MonotoneCurve::from_fn(grid, grid.domain(), move |x| family.map_value(y, x))
    }
}

impl fmt::Display for InnovationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InnovationFamily::Trig => "trig",
            InnovationFamily::Power => "power",
            InnovationFamily::Poly => "poly",
        })
    }
}

impl FromStr for InnovationFamily {
    type Err = AtmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "trig" | "e1" => Ok(InnovationFamily::Trig),
            "power" | "e2" => Ok(InnovationFamily::Power),
            "poly" | "e3" => Ok(InnovationFamily::Poly),
            other => Err(AtmError::Param(format!("unknown innovation family '{other}'"))),
        }
    }
}

/// Draw one innovation map on a `[0, 1]` grid.
pub fn sample_innovation<R: Rng + ?Sized>(
    family: InnovationFamily,
    grid: Grid,
    rng: &mut R,
) -> MonotoneCurve {
    let y = family.sample_param(rng);
    family.map(y, grid)
}

pub const DEFAULT_BURN_IN: usize = 200;
pub const DEFAULT_GRID_CELLS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtmConfig {
    /// `α_1, …, α_p`; the order is the length.
    pub coefficients: Vec<f64>,
    pub n: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    pub family: InnovationFamily,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_grid_cells")]
    pub grid_cells: usize,
}

fn default_burn_in() -> usize {
    DEFAULT_BURN_IN
}

fn default_grid_cells() -> usize {
    DEFAULT_GRID_CELLS
}

impl AtmConfig {
    /// First-order model with default burn-in and grid.
    pub fn ar1(alpha: f64, n: usize, family: InnovationFamily, seed: u64) -> Self {
        AtmConfig {
            coefficients: vec![alpha],
            n,
            burn_in: DEFAULT_BURN_IN,
            family,
            seed,
            grid_cells: DEFAULT_GRID_CELLS,
        }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::unit(self.grid_cells)
    }

    pub fn validate(&self) -> Result<()> {
        if self.coefficients.is_empty() {
            return Err(AtmError::Param("model order must be at least 1".into()));
        }
        if let Some(a) = self.coefficients.iter().find(|a| !(a.abs() < 1.0)) {
            return Err(AtmError::Param(format!("coefficient {a} outside (-1, 1)")));
        }
        if self.n < 2 {
            return Err(AtmError::Param(format!("sample size {} below 2", self.n)));
        }
        self.grid().map(|_| ())
    }
}

/// A simulated series together with the innovation maps that drove it.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub series: AtmSeries,
    pub innovations: Vec<MonotoneCurve>,
}

/// Simulate the process; deterministic given `config.seed`.
pub fn simulate(config: &AtmConfig) -> Result<AtmSeries> {
    simulate_detailed(config).map(|s| s.series)
}

pub fn simulate_detailed(config: &AtmConfig) -> Result<Simulation> {
    let family = config.family;
    let mut rng = RandomStream::new(config.seed);
    simulate_with(config, move |grid| sample_innovation(family, grid, &mut rng))
}

/// Simulate with a caller-supplied innovation source (ignores `config.family`
/// and `config.seed`).
pub fn simulate_with(
    config: &AtmConfig,
    mut innovation: impl FnMut(Grid) -> MonotoneCurve,
) -> Result<Simulation> {
    config.validate()?;
    let grid = config.grid()?;
    let p = config.order();
    let id = MonotoneCurve::identity(grid);
    // history[0] is the most recent map
    let mut history: Vec<MonotoneCurve> = vec![id; p];
    let total = config.burn_in + config.n;
    let mut maps = Vec::with_capacity(config.n);
    let mut innovations = Vec::with_capacity(config.n);
    for step in 0..total {
        let mut lagged: Option<MonotoneCurve> = None;
        for (lag, alpha) in config.coefficients.iter().enumerate().rev() {
            let c = alpha_contract(*alpha, &history[lag])?;
            lagged = Some(match lagged {
                None => c,
                Some(inner) => compose(&c, &inner)?,
            });
        }
        let eps = innovation(grid);
        let t = compose(&eps, &lagged.expect("order >= 1"))?;
        history.pop();
        history.insert(0, t.clone());
        if step >= config.burn_in {
            maps.push(t);
            innovations.push(eps);
        }
    }
    Ok(Simulation { series: AtmSeries::new(maps)?, innovations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::centered_inner;

    #[test]
    fn trig_map_matches_closed_form() {
        let g = Grid::unit(1000).unwrap();
        let c = InnovationFamily::Trig.map(5.0, g);
        for j in (0..=1000).step_by(37) {
            let x = g.node(j);
            let want = x + (5.0 * PI * x).sin() / (5.0 * PI);
            assert!((c.values()[j] - want).abs() < 1e-15);
        }
        assert!(c.satisfies_invariants());
    }

    #[test]
    fn zero_parameter_gives_identity() {
        let g = Grid::unit(200).unwrap();
        for fam in InnovationFamily::ALL {
            assert!(fam.map(0.0, g).is_identity(), "{fam}");
        }
    }

    #[test]
    fn extreme_parameters_stay_monotone() {
        let g = Grid::unit(500).unwrap();
        for y in [-1.0, 1.0] {
            assert!(InnovationFamily::Power.map(y, g).satisfies_invariants());
            assert!(InnovationFamily::Poly.map(y, g).satisfies_invariants());
        }
        for y in [-15.0, -5.0, 5.0, 15.0] {
            let c = InnovationFamily::Trig.map(y, g);
            assert!(c.values().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn trig_parameter_support() {
        let mut rng = RandomStream::new(1);
        for _ in 0..2000 {
            let y = InnovationFamily::Trig.sample_param(&mut rng);
            assert!(y.fract() == 0.0 && (5.0..=15.0).contains(&y.abs()));
        }
    }

    #[test]
    fn innovations_average_to_identity() {
        let g = Grid::unit(1000).unwrap();
        let mut rng = RandomStream::new(2024);
        let reps = 100_000;
        let mut acc = vec![0.0; g.len()];
        for _ in 0..reps {
            let y = InnovationFamily::Trig.sample_param(&mut rng);
            for (j, a) in acc.iter_mut().enumerate() {
                *a += InnovationFamily::Trig.map_value(y, g.node(j));
            }
        }
        let err = acc
            .iter()
            .enumerate()
            .map(|(j, a)| (a / reps as f64 - g.node(j)).abs())
            .fold(0.0, f64::max);
        assert!(err < 0.003, "sup-norm {err}");
    }

    #[test]
    fn degenerate_innovations_keep_identity() {
        let cfg = AtmConfig { burn_in: 5, grid_cells: 50, ..AtmConfig::ar1(0.7, 10, InnovationFamily::Power, 0) };
        let sim = simulate_with(&cfg, |g| InnovationFamily::Power.map(0.0, g)).unwrap();
        assert!(sim.series.maps().iter().all(|t| t.is_identity()));
        let cfg2 = AtmConfig { coefficients: vec![-0.4, 0.3], ..cfg };
        let sim = simulate_with(&cfg2, |g| InnovationFamily::Power.map(0.0, g)).unwrap();
        assert!(sim.series.maps().iter().all(|t| t.is_identity()));
    }

    #[test]
    fn zero_coefficient_returns_innovations() {
        let cfg = AtmConfig { grid_cells: 100, ..AtmConfig::ar1(0.0, 20, InnovationFamily::Trig, 9) };
        let sim = simulate_detailed(&cfg).unwrap();
        for (t, e) in sim.series.maps().iter().zip(&sim.innovations) {
            assert_eq!(t, e);
        }
    }

    #[test]
    fn same_seed_same_series() {
        let cfg = AtmConfig { grid_cells: 100, ..AtmConfig::ar1(-0.3, 30, InnovationFamily::Poly, 5) };
        assert_eq!(simulate(&cfg).unwrap(), simulate(&cfg).unwrap());
        let other = AtmConfig { seed: 6, ..cfg.clone() };
        assert_ne!(simulate(&cfg).unwrap(), simulate(&other).unwrap());
    }

    #[test]
    fn invalid_coefficients_rejected() {
        let cfg = AtmConfig::ar1(1.0, 10, InnovationFamily::Trig, 0);
        assert!(matches!(simulate(&cfg), Err(AtmError::Param(_))));
        let cfg = AtmConfig { coefficients: vec![], ..AtmConfig::ar1(0.1, 10, InnovationFamily::Trig, 0) };
        assert!(simulate(&cfg).is_err());
    }

    #[test]
    fn lag_one_autocorrelation_of_displacements() {
        // The scalar projections ∫(T_i − x)(T_{i−1} − x) / ∫(T_{i−1} − x)²
        // behave like an AR(1) with coefficient α.
        let cfg = AtmConfig::ar1(0.5, 5000, InnovationFamily::Trig, 11);
        let s = simulate(&cfg).unwrap();
        let maps = s.maps();
        let num: f64 = maps.windows(2).map(|w| centered_inner(&w[1], &w[0]).unwrap()).sum();
        let den: f64 = maps.iter().map(|t| centered_inner(t, t).unwrap()).sum();
        let rho = num / den;
        assert!((rho - 0.5).abs() < 0.05, "lag-1 acf {rho}");
    }

    #[test]
    fn stationarity_halves_agree() {
        let cfg = AtmConfig::ar1(0.5, 10_000, InnovationFamily::Trig, 3);
        let s = simulate(&cfg).unwrap();
        let first = s.window(1, 5000).unwrap().mean_squared_displacement();
        let second = s.window(5001, 10_000).unwrap().mean_squared_displacement();
        assert!((first - second).abs() / first < 0.05, "{first} vs {second}");
    }
}
