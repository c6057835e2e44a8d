//! Both portmanteau tests on a correctly specified first-order series and on
//! a second-order series misfitted with a first-order model.
//!
//! cargo run --release --example portmanteau_tests

use atm_diag::atm::{simulate, AtmConfig, InnovationFamily};
use atm_diag::diagnostics::{default_split, mcleod_tests, split_tests};
use atm_diag::estimation::fit_alpha;

fn main() -> atm_diag::Result<()> {
    let ks = [3, 6, 9];
    let cases = [("first order (0.5)", vec![0.5]), ("second order (0.5, 0.2)", vec![0.5, 0.2])];
    for (name, coefficients) in cases {
        let config = AtmConfig { coefficients, ..AtmConfig::ar1(0.0, 400, InnovationFamily::Trig, 21) };
        let series = simulate(&config)?;
        let fit = fit_alpha(&series)?;
        let (f_n, l_n) = default_split(series.len());
        println!("{name}: alpha_hat = {:.4}", fit.alpha_hat);
        let reports = mcleod_tests(&series, &fit, &ks, 0.05)?.into_iter().chain(split_tests(&series, &ks, 0.05, f_n, l_n)?);
        for r in reports {
            println!(
                "  {:>6} K = {}  Q = {:>8.3}  p = {:.4}{}",
                r.kind.to_string(),
                r.dof,
                r.statistic,
                r.p_value,
                if r.reject { "  reject" } else { "" }
            );
        }
    }
    Ok(())
}
