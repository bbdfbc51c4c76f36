//! One trajectory of the manufactured case with every diagnostic.
//!
//! `cargo run --release --example manufactured_run`

use rothe::rothe::{apriori_report, bvq_diagnostics, half_step_identity, make_interpolants, recovery};
use rothe::stepper::SolverConfig;
use rothe::study::ManufacturedCase;
use rothe::timegrid::{GridKind, TimeGrid};

fn main() -> rothe::error::Result<()> {
    let case = ManufacturedCase::new(1.0, 200, SolverConfig::default())?;
    println!("continuous residual of the exact solution: {:e}", case.max_continuous_residual(100));

    let ledger = case.setup.ledger()?;
    let grid = TimeGrid::build(&GridKind::Random { seed: 1, d: 2.0 }, 64, 1.0)?;
    let level = case.setup.run_level(grid, &ledger)?;
    let tr = level.trajectory.expect("admissible grid");
    let it = make_interpolants(&tr)?;
    let space = &case.setup.suite.space;

    println!("velocity error = {}", case.velocity_error(&it));
    println!("displacement error = {}", case.displacement_error(&tr));
    print!("{}", half_step_identity(&tr, &it, space)?.to_kv());
    print!("{}", apriori_report(&tr, &case.setup.suite)?.to_kv());
    let bv = bvq_diagnostics(&it.v, 2.0, &|r| space.dual_norm_surrogate(r))?;
    println!("bvq jump_sum = {}, bound = {}", bv.jump_sum, bv.chain_bound);
    let rec = recovery(&tr, &it, space)?;
    println!("recovery total = {}, interior = {}, endpoint = {}", rec.total, rec.interior, rec.endpoint);
    Ok(())
}
