//! The time-stepping loop and everything built from its output.
//!
//! Given `u⁰, v⁰` the scheme sets `u¹ = u⁰ + τ₁ v⁰` and, for `n = 1..N−1`,
//! solves one inclusion for `(v^n, η^n)` and updates `u^{n+1} = u^n + τ_{n+1} v^n`.

mod diagnostics;
mod interpolant;
mod load;

pub use diagnostics::{
    apriori_report, bvq_diagnostics, half_step_identity, recovery, AprioriReport, BvqReport, HalfStepReport, RecoveryReport,
};
pub use interpolant::{apply_k, l2_distance_sq, union_breakpoints, Interpolant, InterpolantKind};
pub use load::{average_rhs, Field, LoadSpec, SpaceProfile, TimeProfile};

use crate::error::{Error, Result};
use crate::fem1d::FemSpace;
use crate::operators::OperatorSuite;
use crate::stepper::{certify, SolverConfig, StepProblem, Stepper};
use crate::timegrid::{StepConstraintReport, TimeGrid};

/// Per-step diagnostics, including the independent certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub n: usize,
    pub iterations: usize,
    pub fallback_iterations: usize,
    pub solver_residual: f64,
    pub certified_residual: f64,
    pub graph_distance: f64,
    pub eps: f64,
    pub intervals: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    /// `u⁰ … u^N` (fewer for a partial run).
    pub u: Vec<Vec<f64>>,
    /// `v⁰ … v^{N−1}`.
    pub v: Vec<Vec<f64>>,
    /// `η¹ … η^{N−1}`; entry `k` holds `η^{k+1}`.
    pub eta: Vec<Vec<f64>>,
    /// `f¹ … f^{N−1}`; entry `k` holds `f^{k+1}`.
    pub loads: Vec<Vec<f64>>,
    pub steps: Vec<StepRecord>,
}

impl Trajectory {
    pub fn n_steps(&self) -> usize {
        self.grid.len()
    }

    pub fn is_complete(&self) -> bool {
        self.steps.len() + 1 == self.grid.len()
    }

    /// `v^n` with the padding `v^N := v^{N−1}`.
    pub fn v_at(&self, n: usize) -> &[f64] {
        &self.v[n.min(self.v.len() - 1)]
    }

    /// `η^n` with the paddings `η⁰ := η¹` and `η^N := η^{N−1}`.
    pub fn eta_at(&self, n: usize) -> &[f64] {
        &self.eta[n.clamp(1, self.eta.len()) - 1]
    }

    /// `f^n`, `n = 1..N−1`.
    pub fn load_at(&self, n: usize) -> &[f64] {
        &self.loads[n - 1]
    }

    /// CSV `(n, t_n, |v^n|_H, ‖v^n‖_W, ‖u^n‖_V, step_iterations, step_residual, graph_distance)`.
    ///
    /// Rows run over `n = 0..N` with `v^N := v^{N−1}`; step columns are empty
    /// where no inclusion is solved.
    pub fn to_csv(&self, space: &FemSpace) -> String {
        let mut s = String::from("n,t_n,v_H,v_W,u_V,step_iterations,step_residual,graph_distance\n");
        for n in 0..self.u.len() {
            let v = self.v_at(n);
            s.push_str(&format!(
                "{n},{},{},{},{}",
                self.grid.t(n),
                space.norm_h(v),
                space.norm_w(v),
                space.norm_v(&self.u[n])
            ));
            match n.checked_sub(1).and_then(|k| self.steps.get(k)) {
                Some(st) => s.push_str(&format!(",{},{},{}\n", st.iterations, st.certified_residual, st.graph_distance)),
                None => s.push_str(",,,\n"),
            }
        }
        s
    }
}

/// A failed run together with everything computed before the failure.
#[derive(Debug, thiserror::Error)]
#[error("{error}")]
pub struct RunFailure {
    pub error: Error,
    pub partial: Box<Trajectory>,
}

pub struct RotheSolver<'a> {
    suite: &'a OperatorSuite,
    grid: &'a TimeGrid,
    solver: SolverConfig,
    constraint: Option<StepConstraintReport>,
}

impl<'a> RotheSolver<'a> {
    pub fn new(suite: &'a OperatorSuite, grid: &'a TimeGrid, solver: SolverConfig) -> Self {
        Self { suite, grid, solver, constraint: None }
    }

    /// Refuses to start unless the report is admissible.
    pub fn with_constraint(mut self, report: StepConstraintReport) -> Self {
        self.constraint = Some(report);
        self
    }

    pub fn run(&self, u0: &[f64], v0: &[f64], load: &dyn Fn(f64) -> Vec<f64>) -> std::result::Result<Trajectory, RunFailure> {
        let grid = self.grid;
        let mut traj = Trajectory {
            grid: grid.clone(),
            u: vec![u0.to_vec()],
            v: vec![v0.to_vec()],
            eta: Vec::new(),
            loads: Vec::new(),
            steps: Vec::new(),
        };
        let fail = |error: Error, traj: Trajectory| RunFailure { error, partial: Box::new(traj) };
        let dim = self.suite.space.dim();
        if u0.len() != dim || v0.len() != dim {
            return Err(fail(Error::Config("initial data do not match the space".into()), traj));
        }
        let mut stepper = match Stepper::new(self.suite, self.solver.clone()) {
            Ok(s) => s,
            Err(e) => return Err(fail(e, traj)),
        };
        if let Some(rep) = &self.constraint {
            if !rep.admissible {
                return Err(fail(Error::InadmissibleStep { tau: rep.tau_max, bound: rep.bound }, traj));
            }
            stepper = stepper.with_tau_bound(rep.bound);
        }
        traj.loads = average_rhs(grid, load);
        let first = crate::linalg::axpy(u0, grid.tau(1), v0);
        traj.u.push(first);
        for n in 1..grid.len() {
            let pb = StepProblem {
                n,
                tau_half: grid.tau_half(n),
                t: grid.t(n),
                u: traj.u[n].clone(),
                v_prev: traj.v[n - 1].clone(),
                f: traj.loads[n - 1].clone(),
                initial_guess: None,
            };
            let sol = match stepper.solve_step(&pb) {
                Ok(s) => s,
                Err(e) => return Err(fail(e, traj)),
            };
            let cert = match certify(self.suite, &pb, &sol) {
                Ok(c) => c,
                Err(e) => return Err(fail(e, traj)),
            };
            if let Err(e) = cert.check(n, self.solver.tol, self.solver.eps_target) {
                return Err(fail(e, traj));
            }
            let next = crate::linalg::axpy(&traj.u[n], grid.tau(n + 1), &sol.v);
            traj.steps.push(StepRecord {
                n,
                iterations: sol.iterations,
                fallback_iterations: sol.fallback_iterations,
                solver_residual: sol.residual,
                certified_residual: cert.residual,
                graph_distance: cert.graph_distance,
                eps: sol.eps,
                intervals: sol.intervals,
            });
            traj.v.push(sol.v);
            traj.eta.push(sol.eta);
            traj.u.push(next);
        }
        Ok(traj)
    }
}

/// `u_τ, v_τ, v̂_τ, η_τ, f_τ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Interpolants {
    pub u: Interpolant,
    pub v: Interpolant,
    pub v_hat: Interpolant,
    pub eta: Interpolant,
    pub f: Interpolant,
}

/// Builds the five interpolants of a complete trajectory on the half grid.
pub fn make_interpolants(traj: &Trajectory) -> Result<Interpolants> {
    if !traj.is_complete() {
        return Err(Error::Config("interpolants need a complete trajectory".into()));
    }
    let n = traj.grid.len();
    let b = traj.grid.half_grid_breakpoints();
    let zero = vec![0.0; traj.u[0].len()];
    let zero_f = vec![0.0; traj.loads[0].len()];
    // interval 0 is [0, t_½], interval k is (t_{k−½}, t_{k+½}], interval N is (t_{N−½}, T]
    let pc = |first: Vec<f64>, inner: &dyn Fn(usize) -> Vec<f64>, last: Vec<f64>| {
        let mut vals = vec![first];
        vals.extend((1..n).map(inner));
        vals.push(last);
        Interpolant::new(b.clone(), InterpolantKind::PiecewiseConstant, vals)
    };
    let u = pc(zero.clone(), &|k| traj.u[k].clone(), zero)?;
    let v = pc(traj.v[0].clone(), &|k| traj.v[k].clone(), traj.v_at(n).to_vec())?;
    let eta = pc(traj.eta_at(0).to_vec(), &|k| traj.eta_at(k).to_vec(), traj.eta_at(n).to_vec())?;
    let f = pc(zero_f.clone(), &|k| traj.load_at(k).to_vec(), zero_f)?;
    let mut hat = vec![traj.v[0].clone()];
    hat.extend((0..n).map(|k| traj.v[k].clone()));
    hat.push(traj.v[n - 1].clone());
    let v_hat = Interpolant::new(b, InterpolantKind::PiecewiseLinear, hat)?;
    Ok(Interpolants { u, v, v_hat, eta, f })
}

impl Interpolants {
    /// CSV `(t, |v_τ|_H, |v̂_τ|_H)` at every breakpoint and interval midpoint.
    pub fn to_csv(&self, space: &FemSpace) -> String {
        let b = self.v.breakpoints();
        let mut s = String::from("t,v_tau_H,v_hat_H\n");
        let mut row = |t: f64| {
            s.push_str(&format!("{t},{},{}\n", space.norm_h(&self.v.eval(t)), space.norm_h(&self.v_hat.eval(t))));
        };
        row(b[0]);
        for w in b.windows(2) {
            row(0.5 * (w[0] + w[1]));
            row(w[1]);
        }
        s
    }
}
