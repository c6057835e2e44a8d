//! Simulate first- and second-order autoregressive transport processes with
//! each innovation family and write the maps as plot-ready CSV.
//!
//! cargo run --release --example simulate_atm [out.csv]

use atm_diag::atm::{simulate, simulate_detailed, AtmConfig, InnovationFamily};
use atm_diag::data::{export_curves, CurveData, ExportFormat};

fn main() -> atm_diag::Result<()> {
    for family in InnovationFamily::ALL {
        let series = simulate(&AtmConfig::ar1(0.5, 300, family, 11))?;
        println!(
            "{family:>5}: n = {}, mean squared displacement {:.5}",
            series.len(),
            series.mean_squared_displacement()
        );
    }

    let config = AtmConfig { coefficients: vec![0.5, 0.2], ..AtmConfig::ar1(0.0, 100, InnovationFamily::Trig, 3) };
    let sim = simulate_detailed(&config)?;
    let maps = sim.series.maps();
    println!("second order: T_1(0.3) = {:.4}, T_100(0.3) = {:.4}", maps[0].evaluate(0.3)?, maps[99].evaluate(0.3)?);

    let path = std::env::args().nth(1).unwrap_or_else(|| std::env::temp_dir().join("atm_maps.csv").display().to_string());
    let curves: Vec<CurveData> =
        maps.iter().enumerate().map(|(i, t)| CurveData::from_curve(format!("T{}", i + 1), t)).collect();
    export_curves(&curves, path.as_ref(), ExportFormat::Csv)?;
    println!("wrote {} curves to {path}", curves.len());
    Ok(())
}
