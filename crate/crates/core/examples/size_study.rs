//! A small size study read from a TOML description. Raise `reps` to 1000 and
//! add sample sizes for a full table; replications run in parallel.
//!
//! cargo run --release --example size_study

use atm_diag::montecarlo::{run_study, StudySpec};

const SPEC: &str = r#"
kind = "size"
alphas = [0.2, 0.5]
ns = [100]
ks = [3, 6]
reps = 100
beta = 0.05
family = "trig"
master_seed = 2024
grid_cells = 500
"#;

fn main() -> atm_diag::Result<()> {
    let spec = StudySpec::from_toml_str(SPEC)?;
    let table = run_study(&spec)?;
    print!("{}", table.to_text());
    let cell = table.cell("0.5", 100, 3, "split").expect("cell present");
    println!("split, alpha 0.5, K 3: {:.3} ± {:.3}", cell.value, cell.mc_stderr);
    Ok(())
}
