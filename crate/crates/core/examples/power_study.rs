//! Power of the tests against a second-order alternative, written as CSV.
//!
//! cargo run --release --example power_study

use atm_diag::atm::InnovationFamily;
use atm_diag::montecarlo::{run_power_study, Format, StudyKind, StudySpec};

fn main() -> atm_diag::Result<()> {
    let spec = StudySpec {
        pairs: vec![(0.5, 0.2)],
        ns: vec![200],
        ks: vec![3],
        reps: 100,
        family: InnovationFamily::Trig,
        master_seed: 9,
        grid_cells: 500,
        ..StudySpec::new(StudyKind::Power)
    };
    let table = run_power_study(&spec)?;
    print!("{}", table.render(Format::Csv)?);
    Ok(())
}
