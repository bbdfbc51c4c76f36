//! One implicit step solved by continuation in the smoothing width, then
//! re-checked independently.
//!
//! `cargo run --example single_step`

use rothe::fem1d::{Boundary, FemSpace};
use rothe::operators::{OperatorSuite, PotentialGraph, PotentialKind, ProblemKind, ScalarLaw};
use rothe::stepper::{SolverConfig, StepProblem, Stepper};

fn problem(v_prev: f64, f: f64) -> StepProblem {
    StepProblem { n: 1, tau_half: 1.0, t: 0.0, u: vec![0.0], v_prev: vec![v_prev], f: vec![f], initial_guess: None }
}

fn main() -> rothe::error::Result<()> {
    // two elements, one free node: mass 1/3, stiffness 4α
    let space = FemSpace::uniform(2, 2.0, Boundary::BothClamped)?;
    let smooth = OperatorSuite::new(
        ProblemKind::Domain,
        space.clone(),
        1.0 / 12.0,
        ScalarLaw::Zero,
        0.0,
        PotentialGraph::builtin(PotentialKind::Quadratic).scaled(0.0),
    )?;
    let st = Stepper::new(&smooth, SolverConfig::default())?;
    let pb = problem(0.0, 2.0 / 3.0);
    let sol = st.solve_step(&pb)?;
    println!("smooth step: v = {}, iterations = {}", sol.v[0], sol.iterations);

    let abs = OperatorSuite::new(ProblemKind::Domain, space, 1e-3, ScalarLaw::Zero, 0.0, PotentialGraph::builtin(PotentialKind::Abs))?;
    let st = Stepper::new(&abs, SolverConfig::default())?;
    for v_prev in [0.0, 0.5, 3.0] {
        let pb = problem(v_prev, 0.0);
        let sol = st.solve_step(&pb)?;
        let cert = st.certify(&pb, &sol)?;
        cert.check(1, 1e-8, 1e-6)?;
        println!(
            "abs step from v_prev = {v_prev}: v = {:e}, eta = {}, residual = {:e}, graph distance = {:e}",
            sol.v[0], sol.eta[0], cert.residual, cert.graph_distance
        );
    }
    Ok(())
}
