//! Size of the discrepancy in the regularity condition behind the McLeod
//! test, for two innovation families. Long series make it sharp.
//!
//! cargo run --release --example condition_check

use atm_diag::atm::{simulate, AtmConfig, InnovationFamily};
use atm_diag::diagnostics::condition_discrepancy;
use atm_diag::montecarlo::condition_check;

fn main() -> atm_diag::Result<()> {
    let series = simulate(&AtmConfig::ar1(0.5, 2000, InnovationFamily::Power, 1))?;
    let d = condition_discrepancy(&series, 0.5, 6)?;
    println!("one series, power family: L1 = {:.4}, L2 = {:.4}", d.l1, d.l2);

    for (family, alpha) in [(InnovationFamily::Trig, 0.5), (InnovationFamily::Power, -0.2)] {
        let table = condition_check(family, alpha, 1000, 20, 6, 3)?;
        let l1 = table.cell(&alpha.to_string(), 1000, 6, "L1").expect("cell present");
        println!("{family:>5}, alpha {alpha:+}: mean L1 {:.4} (sd {:.4}, {} reps)", l1.value, l1.std, l1.reps);
    }
    Ok(())
}
