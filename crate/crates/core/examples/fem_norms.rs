//! P1 finite elements: norms of the Gelfand scale and the best constants
//! that feed the hypothesis ledger.
//!
//! `cargo run --release --example fem_norms`

use std::f64::consts::PI;

use rothe::fem1d::{Boundary, FemSpace};

fn main() -> rothe::error::Result<()> {
    let space = FemSpace::uniform(4, 2.0, Boundary::BothClamped)?;
    let hat = space.interpolate(|x| if x <= 0.5 { 2.0 * x } else { 2.0 - 2.0 * x });
    println!("hat: |v|_W = {}, |v|_V = {}, |v|_H = {}", space.norm_w(&hat.0), space.norm_v(&hat.0), space.norm_h(&hat.0));

    for (boundary, exact) in [(Boundary::BothClamped, 1.0 / (PI * PI)), (Boundary::LeftClamped, 4.0 / (PI * PI))] {
        let s = FemSpace::uniform(200, 2.0, boundary)?;
        let est = s.poincare_constant()?;
        println!(
            "{boundary:?}: poincare = {} (exact {exact}, rel err {:.2e}, {} iterations)",
            est.value,
            (est.value / exact - 1.0).abs(),
            est.iterations
        );
    }

    for p in [2.0, 3.0, 4.0] {
        let s = FemSpace::uniform(100, p, Boundary::LeftClamped)?;
        println!("p = {p}: poincare = {}, trace = {}", s.poincare_constant()?.value, s.trace_constant()?.value);
    }
    Ok(())
}
