//! Least-squares estimation of the contraction parameter of a first-order
//! model, with sign-branch selection and the martingale summands that drive
//! its asymptotic variance.

use crate::error::{AtmError, Result};
use crate::transport::{centered_inner, trapezoid, AtmSeries, MonotoneCurve};
use serde::{Deserialize, Serialize};

/// Lower bound on the mean squared displacement of the maps.
pub const DEGENERACY_GUARD: f64 = 1e-10;
/// Estimates are clamped to `[-1 + ε, 1 − ε]`.
pub const ALPHA_CLAMP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaFit {
    pub alpha_hat: f64,
    pub branch: Branch,
    pub loss_plus: f64,
    pub loss_minus: f64,
    /// `(1/n) Σ ∫ (T_i(x) − x)² dx`
    pub xi_hat: f64,
    /// `(1/n) Σ ∫ (T_i⁻¹(x) − x)² dx`
    pub xi_tilde_hat: f64,
    /// `(1/(n−1)) Σ m̂_i(α̂)²`
    pub avar_hat: f64,
    pub n: usize,
}

impl AlphaFit {
    /// Approximate standard error of `α̂`.
    pub fn std_error(&self) -> f64 {
        (self.avar_hat / self.n as f64).sqrt()
    }
}

/// Per-series quantities reused by the estimator and the diagnostics:
/// inverse maps and the two normalizing constants.
#[derive(Debug, Clone)]
pub struct SeriesStats<'a> {
    series: &'a AtmSeries,
    inverses: Vec<MonotoneCurve>,
    xi_hat: f64,
    xi_tilde_hat: f64,
}

impl<'a> SeriesStats<'a> {
    pub fn new(series: &'a AtmSeries) -> Self {
        let inverses = series.inverses();
        let xi_hat = series.mean_squared_displacement();
        let xi_tilde_hat = inverses
            .iter()
            .map(|t| centered_inner(t, t).expect("shared grid"))
            .sum::<f64>()
            / inverses.len() as f64;
        SeriesStats { series, inverses, xi_hat, xi_tilde_hat }
    }

    pub fn series(&self) -> &'a AtmSeries {
        self.series
    }

    /// `T_i⁻¹` for 1-based `i`.
    pub fn inverse(&self, i: usize) -> &MonotoneCurve {
        &self.inverses[i - 1]
    }

    pub fn xi_hat(&self) -> f64 {
        self.xi_hat
    }

    pub fn xi_tilde_hat(&self) -> f64 {
        self.xi_tilde_hat
    }

    fn check_guard(&self, alpha: f64) -> Result<()> {
        if self.xi_hat < DEGENERACY_GUARD {
            return Err(AtmError::DegenerateSeries(format!(
                "mean squared displacement {:.3e} below {DEGENERACY_GUARD:e}",
                self.xi_hat
            )));
        }
        if alpha < 0.0 && self.xi_tilde_hat < DEGENERACY_GUARD {
            return Err(AtmError::DegenerateSeries(format!(
                "mean squared inverse displacement {:.3e} below {DEGENERACY_GUARD:e}",
                self.xi_tilde_hat
            )));
        }
        Ok(())
    }

    /// Unnormalized summand `∫ {T_{i+1} − [α ⊙ T_i]}(x) · D_i(x) dx` where
    /// `D_i = T_i − x` for `α ≥ 0` and `x − T_i⁻¹` otherwise.
    fn m_numerator(&self, alpha: f64, i: usize) -> f64 {
        let grid = *self.series.grid();
        let next = self.series.at(i + 1).values();
        let (ti, inv) = (self.series.at(i).values(), self.inverse(i).values());
        trapezoid(&grid, |j| {
            let x = grid.node(j);
            let dir = if alpha >= 0.0 { ti[j] - x } else { x - inv[j] };
            (next[j] - x - alpha * dir) * dir
        })
    }

    /// `m̂_i(α)` for `1 ≤ i ≤ n − 1`.
    pub fn m_hat(&self, alpha: f64, i: usize) -> Result<f64> {
        let n = self.series.len();
        if i < 1 || i > n - 1 {
            return Err(AtmError::Range(format!("m̂ index {i} outside 1..={}", n - 1)));
        }
        self.check_guard(alpha)?;
        let norm = if alpha >= 0.0 { self.xi_hat } else { self.xi_tilde_hat };
        Ok(self.m_numerator(alpha, i) / norm)
    }

    /// `m̂_1(α), …, m̂_{n−1}(α)`.
    pub fn m_hats(&self, alpha: f64) -> Result<Vec<f64>> {
        (1..self.series.len()).map(|i| self.m_hat(alpha, i)).collect()
    }

    pub fn fit(&self) -> Result<AlphaFit> {
        self.check_guard(0.0)?;
        let maps = self.series.maps();
        let n = maps.len();
        let (mut cross_p, mut norm_p, mut cross_m, mut norm_m, mut resp) = (0.0, 0.0, 0.0, 0.0, 0.0);
        let grid = *self.series.grid();
        for i in 2..=n {
            let cur = self.series.at(i).values();
            let prev = self.series.at(i - 1).values();
            let inv = self.inverse(i - 1).values();
            let (mut a, mut b, mut c, mut d, mut e) = (0.0, 0.0, 0.0, 0.0, 0.0);
            let m = grid.cells();
            for j in 0..=m {
                let w = if j == 0 || j == m { 0.5 } else { 1.0 };
                let x = grid.node(j);
                let y = cur[j] - x;
                let up = prev[j] - x;
                let down = x - inv[j];
                a += w * y * up;
                b += w * up * up;
                c += w * y * down;
                d += w * down * down;
                e += w * y * y;
            }
            let h = grid.step();
            cross_p += a * h;
            norm_p += b * h;
            cross_m += c * h;
            norm_m += d * h;
            resp += e * h;
        }
        let hi = 1.0 - ALPHA_CLAMP;
        let alpha_plus = if norm_p > 0.0 { (cross_p / norm_p).clamp(0.0, hi) } else { 0.0 };
        let alpha_minus = if norm_m > 0.0 { (cross_m / norm_m).clamp(-hi, 0.0) } else { 0.0 };
        let loss_plus = (resp - 2.0 * alpha_plus * cross_p + alpha_plus * alpha_plus * norm_p).max(0.0);
        let loss_minus =
            (resp - 2.0 * alpha_minus * cross_m + alpha_minus * alpha_minus * norm_m).max(0.0);
        let (alpha_hat, branch) = if loss_plus <= loss_minus {
            (alpha_plus, Branch::Plus)
        } else {
            (alpha_minus, Branch::Minus)
        };
        let avar_hat = {
            let m = self.m_hats(alpha_hat)?;
            m.iter().map(|v| v * v).sum::<f64>() / m.len() as f64
        };
        Ok(AlphaFit {
            alpha_hat,
            branch,
            loss_plus,
            loss_minus,
            xi_hat: self.xi_hat,
            xi_tilde_hat: self.xi_tilde_hat,
            avar_hat,
            n,
        })
    }
}

fn loss(alpha: f64, series: &AtmSeries, use_inverse: bool) -> f64 {
    let grid = *series.grid();
    let mut total = 0.0;
    for w in series.maps().windows(2) {
        let prev = if use_inverse { w[0].invert() } else { w[0].clone() };
        let (cur, pv) = (w[1].values(), prev.values());
        total += trapezoid(&grid, |j| {
            let x = grid.node(j);
            let dir = if use_inverse { x - pv[j] } else { pv[j] - x };
            (cur[j] - x - alpha * dir).powi(2)
        });
    }
    total
}

/// `l₊(α) = Σ_{i≥2} ∫ {T_i(x) − x − α(T_{i−1}(x) − x)}² dx`.
pub fn loss_plus(alpha: f64, series: &AtmSeries) -> f64 {
    loss(alpha, series, false)
}

/// `l₋(α) = Σ_{i≥2} ∫ {T_i(x) − x − α(x − T_{i−1}⁻¹(x))}² dx`.
pub fn loss_minus(alpha: f64, series: &AtmSeries) -> f64 {
    loss(alpha, series, true)
}

/// Fit the contraction parameter of a first-order model.
pub fn fit_alpha(series: &AtmSeries) -> Result<AlphaFit> {
    SeriesStats::new(series).fit()
}

/// Single martingale summand `m̂_i(α)`, `1 ≤ i ≤ n − 1`.
pub fn m_hat(alpha: f64, series: &AtmSeries, i: usize) -> Result<f64> {
    SeriesStats::new(series).m_hat(alpha, i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atm::{simulate, AtmConfig, InnovationFamily};
    use crate::rng::RandomStream;
    use crate::transport::{alpha_contract, compose, Grid};

    fn small(alpha: f64, n: usize, seed: u64) -> AtmSeries {
        let cfg = AtmConfig { grid_cells: 200, ..AtmConfig::ar1(alpha, n, InnovationFamily::Trig, seed) };
        simulate(&cfg).unwrap()
    }

    #[test]
    fn losses_vanish_on_identity_series() {
        let id = MonotoneCurve::identity(Grid::unit(50).unwrap());
        let s = AtmSeries::new(vec![id; 5]).unwrap();
        for a in [-0.7, 0.0, 0.4] {
            assert_eq!(loss_plus(a, &s), 0.0);
            assert!(loss_minus(a, &s) < 1e-30);
        }
        assert!(matches!(fit_alpha(&s), Err(AtmError::DegenerateSeries(_))));
    }

    #[test]
    fn losses_coincide_at_zero() {
        let s = small(0.3, 40, 1);
        let direct: f64 = s.maps()[1..].iter().map(|t| centered_inner(t, t).unwrap()).sum();
        assert!((loss_plus(0.0, &s) - direct).abs() < 1e-14);
        assert!((loss_minus(0.0, &s) - direct).abs() < 1e-14);
    }

    #[test]
    fn losses_are_exact_quadratics() {
        let s = small(-0.3, 40, 2);
        for l in [loss_plus, loss_minus] {
            let (l0, l5, l1) = (l(0.0, &s), l(0.5, &s), l(1.0, &s));
            // Lagrange interpolation through (0, l0), (0.5, l5), (1, l1) at 0.25
            let interp = 0.375 * l0 + 0.75 * l5 - 0.125 * l1;
            assert!((interp - l(0.25, &s)).abs() < 1e-10 * l0.max(1e-12));
            let second = [0.0, 0.2, 0.4, 0.6]
                .windows(3)
                .map(|w| l(w[0], &s) - 2.0 * l(w[1], &s) + l(w[2], &s))
                .collect::<Vec<_>>();
            assert!((second[0] - second[1]).abs() <= 1e-9 * second[0].abs());
        }
    }

    #[test]
    fn closed_form_losses_match_direct_sums() {
        let s = small(0.4, 60, 3);
        let fit = fit_alpha(&s).unwrap();
        let a_plus = if fit.branch == Branch::Plus { fit.alpha_hat } else { 0.0 };
        assert!((fit.loss_plus - loss_plus(a_plus, &s)).abs() < 1e-10 * fit.loss_plus);
        assert_eq!(fit.branch == Branch::Plus, fit.loss_plus <= fit.loss_minus);
    }

    #[test]
    fn closed_form_minimizers_are_grid_optimal() {
        let s = small(0.4, 60, 4);
        let fit = fit_alpha(&s).unwrap();
        let best = (0..=1000)
            .map(|k| k as f64 / 1000.0)
            .min_by(|a, b| loss_plus(*a, &s).partial_cmp(&loss_plus(*b, &s)).unwrap())
            .unwrap();
        assert_eq!(fit.branch, Branch::Plus);
        assert!((best - fit.alpha_hat).abs() <= 1e-3);
    }

    #[test]
    fn persistent_series_clamps_at_upper_bound() {
        let g = Grid::unit(300).unwrap();
        let t = InnovationFamily::Trig.map(7.0, g);
        let s = AtmSeries::new(vec![t; 10]).unwrap();
        let fit = fit_alpha(&s).unwrap();
        assert_eq!(fit.alpha_hat, 1.0 - ALPHA_CLAMP);
        assert_eq!(fit.branch, Branch::Plus);
    }

    #[test]
    fn estimates_positive_parameter() {
        let cfg = AtmConfig::ar1(0.5, 400, InnovationFamily::Trig, 77);
        let fit = fit_alpha(&simulate(&cfg).unwrap()).unwrap();
        assert_eq!(fit.branch, Branch::Plus);
        assert!(fit.alpha_hat > 0.35 && fit.alpha_hat < 0.65, "{}", fit.alpha_hat);
        assert!(fit.xi_hat > 0.0 && fit.xi_tilde_hat > 0.0 && fit.avar_hat >= 0.0);
    }

    #[test]
    fn negative_sign_is_recovered() {
        let reps = 500;
        let hits = (0..reps)
            .filter(|&r| {
                let cfg = AtmConfig {
                    grid_cells: 200,
                    burn_in: 50,
                    ..AtmConfig::ar1(-0.4, 400, InnovationFamily::Trig, 1000 + r)
                };
                fit_alpha(&simulate(&cfg).unwrap()).unwrap().branch == Branch::Minus
            })
            .count();
        assert!(hits as f64 >= 0.95 * reps as f64, "{hits}/{reps}");
    }

    #[test]
    fn noise_free_step_has_zero_summand() {
        let g = Grid::unit(400).unwrap();
        let mut rng = RandomStream::new(5);
        let t1 = crate::atm::sample_innovation(InnovationFamily::Power, g, &mut rng);
        for alpha in [0.3, -0.3] {
            let t2 = alpha_contract(alpha, &t1).unwrap();
            let t0 = crate::atm::sample_innovation(InnovationFamily::Poly, g, &mut rng);
            let s = AtmSeries::new(vec![t0, t1.clone(), t2]).unwrap();
            let m = m_hat(alpha, &s, 2).unwrap();
            assert!(m.abs() < 1e-12, "alpha {alpha}: {m}");
        }
    }

    #[test]
    fn identity_summand_numerator_is_zero() {
        let id = MonotoneCurve::identity(Grid::unit(20).unwrap());
        let s = AtmSeries::new(vec![id; 4]).unwrap();
        let stats = SeriesStats::new(&s);
        assert!(stats.m_hat(0.0, 1).is_err());
        assert_eq!(stats.m_numerator(0.0, 1), 0.0);
        assert!(stats.m_hat(0.0, 4).is_err());
    }

    #[test]
    fn summands_have_mean_zero() {
        let cfg = AtmConfig::ar1(0.2, 2000, InnovationFamily::Trig, 8);
        let s = simulate(&cfg).unwrap();
        let stats = SeriesStats::new(&s);
        let fit = stats.fit().unwrap();
        let m = stats.m_hats(fit.alpha_hat).unwrap();
        let k = m.len() as f64;
        let mean = m.iter().sum::<f64>() / k;
        let sd = (m.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
        assert!(mean.abs() <= 3.0 * sd / k.sqrt(), "mean {mean}, sd {sd}");
    }

    #[test]
    fn composing_contracted_lag_matches_model_step() {
        // m̂ vanishes for T_{i+1} = [α ⊙ T_i] whatever the outer identity.
        let g = Grid::unit(300).unwrap();
        let t = InnovationFamily::Trig.map(-6.0, g);
        let id = MonotoneCurve::identity(g);
        let next = compose(&id, &alpha_contract(0.6, &t).unwrap()).unwrap();
        let s = AtmSeries::new(vec![t, next]).unwrap();
        assert!(m_hat(0.6, &s, 1).unwrap().abs() < 1e-12);
    }
}
