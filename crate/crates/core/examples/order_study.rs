//! Empirical convergence order on the manufactured smooth case.
//!
//! `cargo run --release --example order_study`

use rothe::study::{run_order_study, ManufacturedCase, StudyKind, StudyPlan};
use rothe::stepper::SolverConfig;
use rothe::timegrid::GridKind;

fn main() -> rothe::error::Result<()> {
    let case = ManufacturedCase::new(1.0, 200, SolverConfig::default())?;
    let plan = StudyPlan {
        kind: StudyKind::Order,
        levels: vec![32, 64, 128, 256],
        grid: GridKind::Uniform,
        setup: case.setup,
        alpha: 1.0,
        samples: 0,
        seed: 0,
    };
    let start = std::time::Instant::now();
    let report = run_order_study(&plan)?;
    print!("{}", report.to_csv());
    print!("{}", report.summary_kv());
    println!("elapsed_s = {:.2}", start.elapsed().as_secs_f64());
    Ok(())
}
