use proptest::prelude::*;

use rothe::rothe::{half_step_identity, make_interpolants, recovery};
use rothe::stepper::SolverConfig;
use rothe::study::ManufacturedCase;
use rothe::timegrid::{GridKind, TimeGrid};

fn manufactured(kind: GridKind, n: usize) -> (ManufacturedCase, rothe::rothe::Trajectory) {
    let case = ManufacturedCase::new(1.0, 16, SolverConfig::default()).unwrap();
    let ledger = case.setup.ledger().unwrap();
    let grid = TimeGrid::build(&kind, n, 1.0).unwrap();
    let lvl = case.setup.run_level(grid, &ledger).unwrap();
    let traj = lvl.trajectory.expect("admissible grid");
    (case, traj)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_grids_keep_identities(seed in 0u64..1000, n in 6usize..20) {
        let (case, traj) = manufactured(GridKind::Random { seed, d: 2.0 }, n);
        let space = &case.setup.suite.space;
        let it = make_interpolants(&traj).unwrap();

        let half_step = half_step_identity(&traj, &it, space).unwrap();
        prop_assert!(half_step.rel_diff <= 1e-12, "rel diff {}", half_step.rel_diff);
        prop_assert!(half_step.bound_holds);

        let g = &traj.grid;
        for k in 0..g.len() {
            for i in 0..traj.u[k].len() {
                prop_assert_eq!(traj.u[k + 1][i], traj.u[k][i] + g.tau(k + 1) * traj.v[k][i]);
            }
        }

        for s in &traj.steps {
            prop_assert!(s.graph_distance <= s.eps * (1.0 + 1e-9));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn recovery_gap_shrinks_under_refinement(seed in 0u64..1000, n in 6usize..12) {
        let gap = |n: usize| {
            let (case, traj) = manufactured(GridKind::Random { seed, d: 2.0 }, n);
            let it = make_interpolants(&traj).unwrap();
            recovery(&traj, &it, &case.setup.suite.space).unwrap()
        };
        let (a, b) = (gap(n), gap(4 * n));
        prop_assert!(b.total < a.total, "{} -> {}", a.total, b.total);
        prop_assert!(b.interior < a.interior, "{} -> {}", a.interior, b.interior);
    }
}

#[test]
fn repeated_runs_are_bitwise_identical() {
    let (_, a) = manufactured(GridKind::Random { seed: 7, d: 2.0 }, 12);
    let (_, b) = manufactured(GridKind::Random { seed: 7, d: 2.0 }, 12);
    assert_eq!(a, b);
}

#[test]
fn geometric_and_uniform_grids_agree_on_coarse_error() {
    let (case, u) = manufactured(GridKind::Uniform, 16);
    let (_, g) = manufactured(GridKind::Geometric { ratio: 1.1 }, 16);
    let eu = case.displacement_error(&u);
    let eg = case.displacement_error(&g);
    assert!(eu < 0.1 && eg < 0.1, "{eu} {eg}");
}
