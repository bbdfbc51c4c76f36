//! Constants ledger, smallness condition, step bound and the sampled audit
//! for the boundary problem with the jump density.
//!
//! `cargo run --release --example hypothesis_audit`

use rothe::fem1d::{Boundary, FemSpace};
use rothe::operators::{audit_hypotheses, compute_example_constants, OperatorSuite, PotentialGraph, PotentialKind, ProblemKind, ScalarLaw};
use rothe::timegrid::{check_step_constraint, GridKind, TimeGrid};

fn main() -> rothe::error::Result<()> {
    for alpha in [1.0, 2.0] {
        let space = FemSpace::uniform(50, 3.0, Boundary::LeftClamped)?;
        let suite = OperatorSuite::new(
            ProblemKind::Boundary,
            space,
            alpha,
            ScalarLaw::Arctan,
            0.2,
            PotentialGraph::builtin(PotentialKind::Jump),
        )?;
        let ledger = compute_example_constants(&suite, 1.0)?;
        let h0 = ledger.smallness();
        println!("alpha = {alpha}: mu_A = {}, c_M |gamma|^p = {}, holds = {}", h0.mu_a, h0.rhs, h0.holds);
        match check_step_constraint(&TimeGrid::build(&GridKind::Uniform, 16, 1.0)?, &ledger) {
            Ok(r) => println!("  step bound {} vs tau_max {}: admissible = {}", r.bound, r.tau_max, r.admissible),
            Err(e) => println!("  {e}"),
        }
        let audit = audit_hypotheses(&suite, &ledger, 200, 42)?;
        for c in &audit.checks {
            println!("  {:<20} min slack {:>12.4e}  {}", c.name, c.min_slack, if c.passed() { "ok" } else { "FAIL" });
        }
    }
    Ok(())
}
