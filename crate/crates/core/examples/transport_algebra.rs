//! Working with monotone maps on a grid: composition, inversion,
//! contraction towards the identity, distances and barycenters.
//!
//! cargo run --example transport_algebra

use atm_diag::transport::{
    alpha_contract, barycenter, compose, d1_distance, wasserstein_distance, Grid, Interval, MonotoneCurve,
};

fn main() -> atm_diag::Result<()> {
    let grid = Grid::unit(1000)?;
    let unit = Interval::unit();
    let t = MonotoneCurve::from_fn(grid, unit, |x| x * x);
    let s = MonotoneCurve::from_fn(grid, unit, |x| x.sqrt());

    // sqrt ∘ square is the identity up to interpolation error
    let round = compose(&s, &t)?;
    let id = MonotoneCurve::identity(grid);
    println!("d1(sqrt ∘ sq, id)         = {:.2e}", d1_distance(&round, &id)?);
    println!("d1(sq⁻¹, sqrt)            = {:.2e}", d1_distance(&t.invert(), &s)?);

    // α = 1 keeps the map, α = 0 gives the identity, α < 0 mixes in the inverse
    for alpha in [1.0, 0.5, 0.0, -0.5] {
        let c = alpha_contract(alpha, &t)?;
        println!("({alpha:>4}) ⊙ sq at x = 0.5  -> {:.4}", c.evaluate(0.5)?);
    }

    // quantile functions of U[0, 1] and U[1, 3] on probability levels
    let q1 = MonotoneCurve::from_fn(grid, Interval::new(0.0, 3.0)?, |u| u);
    let q2 = MonotoneCurve::from_fn(grid, Interval::new(0.0, 3.0)?, |u| 1.0 + 2.0 * u);
    let bary = barycenter(&[q1.clone(), q2.clone()])?;
    println!("W2(U[0,1], U[1,3])        = {:.4}", wasserstein_distance(&q1, &q2)?);
    println!("barycenter median         = {:.4}", bary.evaluate(0.5)?);
    Ok(())
}
