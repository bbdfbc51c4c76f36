//! Clarke subdifferentials of the built-in potentials, the regularised
//! selection used by the stepper, and the graph-distance certificate.
//!
//! `cargo run --example subdifferential`

use rothe::operators::{PotentialGraph, PotentialKind};

fn main() {
    for kind in [PotentialKind::Abs, PotentialKind::Jump, PotentialKind::DoubleWell] {
        let j = PotentialGraph::builtin(kind);
        println!("{kind:?}: kinks at {:?}", j.breakpoints());
        for &b in j.breakpoints() {
            let (lo, hi) = j.subdiff_interval(b);
            println!("  ∂j({b}) = [{lo}, {hi}]");
            for eps in [1e-1, 1e-3, 1e-6] {
                let eta = j.regularized_selection(b + 0.5 * eps, eps);
                println!(
                    "  eps = {eps:e}: selection at b + eps/2 = {eta}, graph distance {:e}",
                    j.graph_distance(b + 0.5 * eps, eta)
                );
            }
        }
    }
}
