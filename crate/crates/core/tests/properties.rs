use atm_diag::atm::InnovationFamily;
use atm_diag::diagnostics::{chi_square_cdf, chi_square_quantile, p_value};
use atm_diag::transport::{
    alpha_contract, barycenter, compose, d1_distance, quantile_l2, wasserstein_distance, Grid, Interval, MonotoneCurve,
};
use proptest::prelude::*;

/// Quantile curve through sorted draws spread evenly over the nodes.
fn quantile_curve(grid: Grid, mut raw: Vec<f64>) -> MonotoneCurve {
    raw.sort_by(f64::total_cmp);
    let support = Interval::new(-10.0, 10.0).unwrap();
    let last = (raw.len() - 1) as f64;
    let values = (0..grid.len())
        .map(|j| {
            let pos = j as f64 / grid.cells() as f64 * last;
            let i = (pos.floor() as usize).min(raw.len() - 2);
            raw[i] + (pos - i as f64) * (raw[i + 1] - raw[i])
        })
        .collect();
    MonotoneCurve::projected(grid, values, support)
}

fn draws() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-9.0..9.0f64, 5..30)
}

fn family() -> impl Strategy<Value = InnovationFamily> {
    prop_oneof![Just(InnovationFamily::Trig), Just(InnovationFamily::Power), Just(InnovationFamily::Poly)]
}

fn family_map(family: InnovationFamily, u: f64, grid: Grid) -> MonotoneCurve {
    let param = match family {
        InnovationFamily::Trig => {
            let mag = 5.0 + (u.abs() * 10.0).round();
            mag.copysign(u)
        }
        _ => u,
    };
    family.map(param, grid)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wasserstein_is_a_metric(a in draws(), b in draws(), c in draws()) {
        let g = Grid::unit(200).unwrap();
        let (qa, qb, qc) = (quantile_curve(g, a), quantile_curve(g, b), quantile_curve(g, c));
        let w = |x: &MonotoneCurve, y: &MonotoneCurve| wasserstein_distance(x, y).unwrap();
        prop_assert!(w(&qa, &qa) <= 1e-9);
        prop_assert!((w(&qa, &qb) - w(&qb, &qa)).abs() <= 1e-9);
        prop_assert!(w(&qa, &qc) <= w(&qa, &qb) + w(&qb, &qc) + 1e-9);
        prop_assert!(w(&qa, &qb) >= 0.0);
    }

    #[test]
    fn barycenter_beats_every_input(a in draws(), b in draws(), c in draws(), t in -0.3..0.3f64) {
        let g = Grid::unit(50).unwrap();
        let qs = [quantile_curve(g, a), quantile_curve(g, b), quantile_curve(g, c)];
        let bary = barycenter(&qs).unwrap();
        for j in 0..g.len() {
            let mean = qs.iter().map(|q| q.values()[j]).sum::<f64>() / 3.0;
            prop_assert!((bary.values()[j] - mean).abs() <= 1e-12);
        }
        let frechet = |v: &[f64]| qs.iter().map(|q| quantile_l2(&g, v, q.values()).unwrap().powi(2)).sum::<f64>();
        let shifted: Vec<f64> = bary.values().iter().map(|v| v + t).collect();
        prop_assert!(frechet(bary.values()) <= frechet(&shifted) + 1e-12);
        for q in &qs {
            prop_assert!(frechet(bary.values()) <= frechet(q.values()) + 1e-12);
        }
    }

    #[test]
    fn inversion_round_trip(f in family(), u in -1.0..1.0f64, m in 50usize..800) {
        let g = Grid::unit(m).unwrap();
        let t = family_map(f, u, g);
        let back = compose(&t.invert(), &t).unwrap();
        prop_assert!(d1_distance(&back, &MonotoneCurve::identity(g)).unwrap() <= 2.0 / m as f64);
    }

    #[test]
    fn contraction_stays_between_identity_and_map(f in family(), u in -1.0..1.0f64, alpha in 0.0..1.0f64) {
        let g = Grid::unit(300).unwrap();
        let t = family_map(f, u, g);
        let c = alpha_contract(alpha, &t).unwrap();
        prop_assert!(c.is_transport());
        for j in 0..g.len() {
            let (x, v, w) = (g.node(j), t.values()[j], c.values()[j]);
            prop_assert!(w >= x.min(v) - 1e-12 && w <= x.max(v) + 1e-12);
        }
    }

    #[test]
    fn negative_contraction_uses_the_inverse(f in family(), u in -1.0..1.0f64, alpha in 0.05..1.0f64) {
        let g = Grid::unit(400).unwrap();
        let t = family_map(f, u, g);
        let direct = alpha_contract(-alpha, &t).unwrap();
        let via_inverse = alpha_contract(alpha, &t.invert()).unwrap();
        prop_assert!(direct.sup_distance(&via_inverse).unwrap() <= 1e-12);
    }

    #[test]
    fn p_value_decreases_in_the_statistic(k in 1usize..15, x in 0.0..60.0f64, dx in 0.0..10.0f64) {
        prop_assert!(p_value(x + dx, k).unwrap() <= p_value(x, k).unwrap());
    }

    #[test]
    fn chi_square_quantile_inverts_cdf(k in 1usize..20, p in 0.01..0.99f64) {
        let q = chi_square_quantile(p, k).unwrap();
        prop_assert!((chi_square_cdf(q, k).unwrap() - p).abs() <= 1e-9);
    }
}

