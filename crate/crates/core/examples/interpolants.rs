//! Piecewise-constant and piecewise-linear interpolants of a short
//! trajectory, their Bochner norms and the integral operator `K`.
//!
//! `cargo run --example interpolants`

use rothe::rothe::{apply_k, l2_distance_sq, make_interpolants};
use rothe::stepper::SolverConfig;
use rothe::study::ManufacturedCase;
use rothe::timegrid::TimeGrid;

fn main() -> rothe::error::Result<()> {
    let case = ManufacturedCase::new(1.0, 20, SolverConfig::default())?;
    let ledger = case.setup.ledger()?;
    let level = case.setup.run_level(TimeGrid::from_steps(&[0.1, 0.2, 0.3, 0.2, 0.2])?, &ledger)?;
    let tr = level.trajectory.expect("admissible grid");
    let it = make_interpolants(&tr)?;
    let space = &case.setup.suite.space;

    println!("v_tau breakpoints: {:?}", it.v.breakpoints());
    println!("v_hat breakpoints: {:?}", it.v_hat.breakpoints());
    let h = |x: &[f64]| space.norm_h(x);
    println!("|v_tau|_L2(H) = {}, |v_hat|_L2(H) = {}", it.v.bochner_norm(2.0, &h), it.v_hat.bochner_norm(2.0, &h));
    let mass = space.mass();
    let d2 = l2_distance_sq(&it.v_hat, &it.v, &|x| rothe::linalg::dot(&mass.mul_vec(x), x))?;
    println!("|v_hat - v_tau|^2 = {d2}");
    for t in [0.2, 0.45, 1.0] {
        println!("|(K v_tau)({t})|_V = {}", space.norm_v(&apply_k(&it.v, t)?));
    }
    print!("{}", it.to_csv(space));
    Ok(())
}
