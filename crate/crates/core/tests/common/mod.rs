#![allow(dead_code)]

use atm_diag::atm::InnovationFamily;
use atm_diag::diagnostics::g_derivative;
use atm_diag::transport::{AtmSeries, Grid, Interval, MonotoneCurve};
use rand::Rng;

/// Root of an increasing `f` on `[0, 1]` by bisection.
pub fn bisect(f: impl Fn(f64) -> f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid
        } else {
            hi = mid
        }
    }
    0.5 * (lo + hi)
}

/// An analytic map on `[0, 1]` with slope bounded away from zero.
#[derive(Debug, Clone, Copy)]
pub struct SmoothMap {
    pub family: InnovationFamily,
    pub param: f64,
    /// Weight of the family map against the identity.
    pub weight: f64,
}

impl SmoothMap {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let family = InnovationFamily::ALL[rng.gen_range(0..3)];
        let (param, weight) = match family {
            InnovationFamily::Trig => (family.sample_param(rng), rng.gen_range(0.0..0.8)),
            _ => (rng.gen_range(-0.8..0.8), 1.0),
        };
        SmoothMap { family, param, weight }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (1.0 - self.weight) * x + self.weight * self.family.map_value(self.param, x)
    }

    pub fn curve(&self, grid: Grid) -> MonotoneCurve {
        MonotoneCurve::from_fn(grid, Interval::unit(), |x| self.eval(x))
    }
}

/// `T ∘ [α ⊙ S]⁻¹(x)` from the analytic maps, where `S = prev[0] ∘ prev[1]`.
pub fn residual_value(alpha: f64, prev: [SmoothMap; 2], cur: SmoothMap, x: f64) -> f64 {
    let s = |z: f64| prev[0].eval(prev[1].eval(z));
    let z = if alpha >= 0.0 {
        bisect(|z| z + alpha * (s(z) - z), x)
    } else {
        // [α ⊙ S](z) = z + α(z − S⁻¹(z)); substitute z = S(w)
        let w = bisect(|w| (1.0 + alpha) * s(w) - alpha * w, x);
        s(w)
    };
    cur.eval(z)
}

/// Largest node-wise gap between the grid derivative and a central finite
/// difference of the analytic residual in `α`.
pub fn derivative_gap(alpha: f64, prev: [SmoothMap; 2], cur: SmoothMap, grid: Grid, h: f64) -> f64 {
    let s = |z: f64| prev[0].eval(prev[1].eval(z));
    let series = AtmSeries::new(vec![
        MonotoneCurve::from_fn(grid, Interval::unit(), s),
        cur.curve(grid),
    ])
    .unwrap();
    let g = g_derivative(&series, alpha, 2).unwrap();
    (0..grid.len())
        .map(|j| {
            let x = grid.node(j);
            let fd = (residual_value(alpha + h, prev, cur, x) - residual_value(alpha - h, prev, cur, x)) / (2.0 * h);
            (fd - g[j]).abs()
        })
        .fold(0.0, f64::max)
}
