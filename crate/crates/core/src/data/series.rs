use super::panel::RawPanel;
use crate::error::{AtmError, Result};
use crate::transport::{barycenter, compose, AtmSeries, Grid, Interval, MonotoneCurve};
use serde::{Deserialize, Serialize};

/// Default padding of the common support, as a fraction of the data range.
pub const DEFAULT_PADDING: f64 = 0.01;

/// How transports are formed from quantile functions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransportMode {
    /// `T_i = Q_i ∘ F_F`, pushing the barycenter onto period `i`.
    #[default]
    Barycentric,
    /// `T_i = Q_i ∘ F_{i−1}` for `i ≥ 2`, one map fewer than periods.
    Incremental,
}

impl std::str::FromStr for TransportMode {
    type Err = AtmError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "barycentric" => Ok(TransportMode::Barycentric),
            "incremental" => Ok(TransportMode::Incremental),
            _ => Err(AtmError::Param(format!("unknown transport mode '{s}'"))),
        }
    }
}

/// Quantile functions of each period on a common probability grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionSeries {
    pub periods: Vec<String>,
    /// Probability levels `u_j = j/m`.
    pub grid: Grid,
    pub omega: Interval,
    pub quantiles: Vec<MonotoneCurve>,
    pub barycenter_q: MonotoneCurve,
    /// Periods whose samples have zero spread.
    pub warnings: Vec<String>,
}

/// Empirical quantile of `sorted` at the nodes of `grid` (over `[0, 1]`):
/// linear interpolation between order statistics placed at `(i − 0.5)/N`,
/// constant beyond the outermost ones, endpoints pinned to `omega`.
pub fn empirical_quantile(sorted: &[f64], grid: Grid, omega: Interval) -> MonotoneCurve {
    let n = sorted.len();
    let nf = n as f64;
    let values = (0..grid.len())
        .map(|j| {
            let pos = grid.node(j) * nf - 0.5;
            if pos <= 0.0 {
                sorted[0]
            } else if pos >= nf - 1.0 {
                sorted[n - 1]
            } else {
                let i = pos.floor() as usize;
                let w = pos - i as f64;
                sorted[i] + w * (sorted[i + 1] - sorted[i])
            }
        })
        .collect();
    MonotoneCurve::projected(grid, values, omega)
}

/// `[lo − padding·range, hi + padding·range]` of all panel values.
pub fn padded_support(panel: &RawPanel, padding: f64) -> Result<Interval> {
    if !(padding >= 0.0 && padding.is_finite()) {
        return Err(AtmError::Param(format!("padding {padding} must be nonnegative")));
    }
    let (lo, hi) = panel.value_range();
    let range = hi - lo;
    if !(range > 0.0) {
        return Err(AtmError::DegenerateData("all observations are equal".into()));
    }
    Interval::new(lo - padding * range, hi + padding * range)
}

/// Quantile curves of every period on `m` cells, plus their node-wise mean.
pub fn build_distribution_series(panel: &RawPanel, m: usize, padding: f64) -> Result<DistributionSeries> {
    let omega = padded_support(panel, padding)?;
    let grid = Grid::unit(m)?;
    let mut warnings = Vec::new();
    let quantiles: Vec<MonotoneCurve> = (0..panel.len())
        .map(|i| {
            let mut s = panel.samples(i).to_vec();
            s.sort_by(f64::total_cmp);
            if s[0] == s[s.len() - 1] {
                warnings.push(format!("period {} has zero spread", panel.periods()[i]));
            }
            empirical_quantile(&s, grid, omega)
        })
        .collect();
    let barycenter_q = barycenter(&quantiles)?;
    Ok(DistributionSeries { periods: panel.periods().to_vec(), grid, omega, quantiles, barycenter_q, warnings })
}

/// `Q ∘ F` where `F` is the generalized inverse of `reference`.
pub(crate) fn transport_from(q: &MonotoneCurve, reference_cdf: &MonotoneCurve) -> Result<MonotoneCurve> {
    compose(q, reference_cdf)
}

/// Transports `T_i = Q_i ∘ F_F` on the common support.
pub fn barycentric_transports(quantiles: &[MonotoneCurve], barycenter_q: &MonotoneCurve) -> Result<AtmSeries> {
    let cdf = barycenter_q.invert();
    let maps = quantiles.iter().map(|q| transport_from(q, &cdf)).collect::<Result<Vec<_>>>()?;
    AtmSeries::new(maps)
}

impl DistributionSeries {
    pub fn len(&self) -> usize {
        self.quantiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quantiles.is_empty()
    }

    pub fn transports(&self, mode: TransportMode) -> Result<AtmSeries> {
        match mode {
            TransportMode::Barycentric => barycentric_transports(&self.quantiles, &self.barycenter_q),
            TransportMode::Incremental => {
                let maps = self
                    .quantiles
                    .windows(2)
                    .map(|w| transport_from(&w[1], &w[0].invert()))
                    .collect::<Result<Vec<_>>>()?;
                AtmSeries::new(maps)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::{d1_distance, wasserstein_distance};

    fn panel(groups: Vec<(&str, Vec<f64>)>) -> RawPanel {
        RawPanel::new(groups.into_iter().map(|(l, s)| (l.to_string(), s)).collect()).unwrap()
    }

    #[test]
    fn quantile_of_known_sample() {
        let g = Grid::unit(4).unwrap();
        let q = empirical_quantile(&[0.0, 1.0, 2.0, 3.0], g, Interval::new(-1.0, 4.0).unwrap());
        // positions 0.125, 0.375, 0.625, 0.875 carry 0, 1, 2, 3
        assert_eq!(q.values(), [-1.0, 0.5, 1.5, 2.5, 4.0]);
    }

    #[test]
    fn identical_periods_give_identity_transports() {
        let s: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let p = panel(vec![("1", s.clone()), ("2", s.clone()), ("3", s)]);
        let d = build_distribution_series(&p, 200, DEFAULT_PADDING).unwrap();
        let t = d.transports(TransportMode::Barycentric).unwrap();
        let id = MonotoneCurve::identity(*t.grid());
        for map in t.maps() {
            assert!(d1_distance(map, &id).unwrap() < 2.0 * d.omega.width() / 200.0);
        }
    }

    #[test]
    fn two_point_samples_are_symmetric() {
        let p = panel(vec![("1", vec![0.0, 1.0]), ("2", vec![1.0, 2.0])]);
        let d = build_distribution_series(&p, 100, 0.0).unwrap();
        assert_eq!(d.omega, Interval::new(0.0, 2.0).unwrap());
        for j in 1..100 {
            let (a, b, c) = (d.quantiles[0].values()[j], d.quantiles[1].values()[j], d.barycenter_q.values()[j]);
            assert!((c - 0.5 * (a + b)).abs() < 1e-15);
            assert!((b - a - 1.0).abs() < 1e-12);
        }
        // the barycenter sits half a unit from each period
        let w1 = wasserstein_distance(&d.quantiles[0], &d.barycenter_q).unwrap();
        let w2 = wasserstein_distance(&d.quantiles[1], &d.barycenter_q).unwrap();
        assert!((w1 - w2).abs() < 1e-12);
        assert!((w1 - 0.5).abs() < 0.02);
        let t = d.transports(TransportMode::Barycentric).unwrap();
        // T_1 moves mass left, T_2 right, by the same amount in the interior
        for x in [0.7, 1.0, 1.3] {
            let (l, r) = (t.at(1).evaluate(x).unwrap(), t.at(2).evaluate(x).unwrap());
            assert!((x - l - 0.5).abs() < 0.02 && (r - x - 0.5).abs() < 0.02, "x {x}: {l} {r}");
        }
    }

    #[test]
    fn location_shifts_become_translations() {
        let base: Vec<f64> = (0..400).map(|i| ((i as f64 + 0.5) / 400.0).powf(1.5)).collect();
        let shifts = [-0.2, 0.1, 0.0, 0.3, -0.2];
        let mean = shifts.iter().sum::<f64>() / shifts.len() as f64;
        let groups = shifts
            .iter()
            .enumerate()
            .map(|(i, c)| (format!("{i}"), base.iter().map(|v| v + c).collect()))
            .collect();
        let d = build_distribution_series(&RawPanel::new(groups).unwrap(), 500, DEFAULT_PADDING).unwrap();
        let t = d.transports(TransportMode::Barycentric).unwrap();
        for (i, c) in shifts.iter().enumerate() {
            for x in [0.2, 0.5, 0.8] {
                let y = t.at(i + 1).evaluate(x).unwrap();
                assert!((y - x - (c - mean)).abs() < 0.01, "period {i} x {x}");
            }
        }
    }

    #[test]
    fn incremental_mode_and_warnings() {
        let p = panel(vec![("1", vec![1.0, 1.0]), ("2", vec![0.0, 2.0]), ("3", vec![0.5, 3.0])]);
        let d = build_distribution_series(&p, 50, DEFAULT_PADDING).unwrap();
        assert_eq!(d.warnings.len(), 1);
        assert_eq!(d.transports(TransportMode::Incremental).unwrap().len(), 2);
        assert_eq!(d.transports(TransportMode::Barycentric).unwrap().len(), 3);
        let flat = panel(vec![("1", vec![1.0, 1.0]), ("2", vec![1.0, 1.0])]);
        assert!(matches!(build_distribution_series(&flat, 50, 0.01), Err(AtmError::DegenerateData(_))));
        assert!(build_distribution_series(&p, 50, -1.0).is_err());
    }
}
