//! Derived parameters of a variable time grid.
//!
//! `cargo run --example grid_parameters`

use rothe::timegrid::{GridKind, TimeGrid};

fn main() -> rothe::error::Result<()> {
    let grid = TimeGrid::from_steps(&[0.1, 0.2, 0.3])?;
    print!("{}", grid.to_parameter_csv());

    // sigma of a seeded random family shrinks under refinement
    println!("\nN,tau_max/tau_min,sigma");
    for n in [8, 16, 32, 64, 128] {
        let g = TimeGrid::build(&GridKind::Random { seed: 5, d: 2.0 }, n, 1.0)?;
        println!("{n},{},{}", g.tau_max() / g.tau_min(), g.sigma());
    }
    Ok(())
}
