//! Least-squares fit of the contraction coefficient, with its estimated
//! asymptotic variance, across sample sizes.
//!
//! cargo run --release --example fit_alpha

use atm_diag::atm::{simulate, AtmConfig, InnovationFamily};
use atm_diag::estimation::fit_alpha;

fn main() -> atm_diag::Result<()> {
    let alpha0 = -0.4;
    println!("true alpha {alpha0}");
    for n in [100, 400, 1600] {
        let series = simulate(&AtmConfig::ar1(alpha0, n, InnovationFamily::Trig, 5))?;
        let fit = fit_alpha(&series)?;
        let se = fit.std_error();
        println!(
            "n = {n:>5}: alpha_hat = {:+.4}  95% CI [{:+.4}, {:+.4}]  ({:?} branch, avar {:.3})",
            fit.alpha_hat,
            fit.alpha_hat - 1.96 * se,
            fit.alpha_hat + 1.96 * se,
            fit.branch,
            fit.avar_hat
        );
    }
    Ok(())
}
