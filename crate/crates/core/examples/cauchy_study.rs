//! Cauchy differences of the velocity along nested uniform grids for the
//! boundary problem with the nonconvex jump density.
//!
//! `cargo run --release --example cauchy_study [amplitude]` (default 40)

use rothe::fem1d::{Boundary, FemSpace};
use rothe::operators::{OperatorSuite, PotentialGraph, PotentialKind, ProblemKind, ScalarLaw};
use rothe::rothe::{Field, LoadSpec, SpaceProfile, TimeProfile};
use rothe::stepper::SolverConfig;
use rothe::study::{run_cauchy_study, Setup, StudyKind, StudyPlan};
use rothe::timegrid::GridKind;

fn main() -> rothe::error::Result<()> {
    let amplitude: f64 = std::env::args().nth(1).map_or(Ok(40.0), |a| a.parse()).expect("amplitude");
    let space = FemSpace::uniform(100, 3.0, Boundary::LeftClamped)?;
    let suite = OperatorSuite::new(
        ProblemKind::Boundary,
        space,
        2.0,
        ScalarLaw::Arctan,
        0.2,
        PotentialGraph::builtin(PotentialKind::Jump),
    )?;
    let setup = Setup {
        suite,
        u0: Field::default(),
        v0: Field::default(),
        load: LoadSpec { amplitude, time: TimeProfile::Trig { cos: 1.0, sin: 0.0, omega: 8.0 }, space: SpaceProfile::Linear },
        solver: SolverConfig::default(),
        horizon: 1.0,
        d: 1.0,
    };
    let plan = StudyPlan {
        kind: StudyKind::Cauchy,
        levels: vec![16, 32, 64, 128],
        grid: GridKind::Uniform,
        setup,
        alpha: 1.0,
        samples: 0,
        seed: 0,
    };
    let start = std::time::Instant::now();
    let report = run_cauchy_study(&plan)?;
    print!("{}", report.to_csv());
    print!("{}", report.summary_kv());
    println!("elapsed_s = {:.2}", start.elapsed().as_secs_f64());
    Ok(())
}
