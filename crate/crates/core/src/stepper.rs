//! One step of the discrete inclusion
//!
//! ```text
//! (v − v_prev)/τ_{n+½} + A(t_n, v) + B(t_n, u^n) + γ*η = f^n,   η ∈ ∂J(γv)
//! ```
//!
//! The multivalued term is replaced by the mollified selection `ρ_ε(γv)` and
//! the smoothed equation is solved along a decreasing sequence of widths `ε`.
//! The returned pair `(v, η)` is then certified against the exact inclusion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, scale, sub, Tridiag};
use crate::operators::OperatorSuite;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Target for the dual-surrogate residual norm.
    pub tol: f64,
    pub eps0: f64,
    pub eps_target: f64,
    /// Newton iterations per smoothing level.
    pub max_newton: usize,
    /// Iterations without a 1e-4 relative decrease before Newton is abandoned.
    pub stall_window: usize,
    /// Relaxation factors cycled through by the fixed-point fallback.
    pub damping: Vec<f64>,
    /// Length of one fixed-point fallback sweep.
    pub fixed_point_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            eps0: 0.1,
            eps_target: 1e-6,
            max_newton: 100,
            stall_window: 8,
            damping: vec![1.0, 0.5, 0.25],
            fixed_point_iters: 40,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64, name: &str| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("solver.{name} must be positive, got {x}")))
            }
        };
        pos(self.tol, "tol")?;
        pos(self.eps0, "eps0")?;
        pos(self.eps_target, "eps_target")?;
        if self.eps_target > self.eps0 {
            return Err(Error::Config("solver.eps_target must not exceed solver.eps0".into()));
        }
        if self.max_newton == 0 || self.stall_window == 0 {
            return Err(Error::Config("solver iteration budgets must be positive".into()));
        }
        if self.damping.is_empty() || self.damping.iter().any(|w| !(*w > 0.0 && *w <= 1.0)) {
            return Err(Error::Config("solver.damping must be a nonempty list in (0, 1]".into()));
        }
        Ok(())
    }

    /// `ε₀, ε₀/2, …` down to the first width not above `ε_target`, which is
    /// replaced by `ε_target` itself.
    pub fn levels(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut e = self.eps0;
        while e > self.eps_target {
            out.push(e);
            e *= 0.5;
        }
        out.push(self.eps_target);
        out
    }
}

#[derive(Clone, Debug)]
pub struct StepProblem {
    pub n: usize,
    pub tau_half: f64,
    pub t: f64,
    pub u: Vec<f64>,
    pub v_prev: Vec<f64>,
    /// Load pairings `⟨f^n, φ_i⟩`.
    pub f: Vec<f64>,
    /// Starting iterate; `v_prev` when absent.
    pub initial_guess: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepSolution {
    pub v: Vec<f64>,
    /// Selection at the evaluation points of `γv`.
    pub eta: Vec<f64>,
    pub gamma_v: Vec<f64>,
    pub iterations: usize,
    pub fallback_iterations: usize,
    pub residual: f64,
    pub eps: f64,
    /// Largest Euclidean distance of `(γv, η)` to the graph of `∂j`.
    pub graph_distance: f64,
    /// `∂j(γv)` per evaluation point.
    pub intervals: Vec<(f64, f64)>,
}

/// Outcome of the independent re-check of a step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate {
    pub residual: f64,
    pub graph_distance: f64,
}

pub struct Stepper<'a> {
    suite: &'a OperatorSuite,
    config: SolverConfig,
    mass: Tridiag,
    stiffness: Tridiag,
    /// Largest admissible `τ_{n+½}`.
    tau_bound: f64,
}

impl<'a> Stepper<'a> {
    pub fn new(suite: &'a OperatorSuite, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            suite,
            mass: suite.space.mass(),
            stiffness: suite.space.stiffness(),
            config,
            tau_bound: f64::INFINITY,
        })
    }

    /// Rejects steps longer than `bound` (from the step constraint).
    pub fn with_tau_bound(mut self, bound: f64) -> Self {
        self.tau_bound = bound;
        self
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    fn dual(&self, r: &[f64]) -> Result<f64> {
        let z = self.stiffness.solve(r)?;
        Ok(dot(&z, r).max(0.0).sqrt())
    }

    /// Everything in the residual except the selection term.
    fn smooth_part(&self, pb: &StepProblem, v: &[f64], b_u: &[f64]) -> Vec<f64> {
        let inertia = scale(&self.mass.mul_vec(&sub(v, &pb.v_prev)), 1.0 / pb.tau_half);
        let mut r = crate::linalg::add(&inertia, &self.suite.apply_a(pb.t, v));
        for ((x, b), f) in r.iter_mut().zip(b_u).zip(&pb.f) {
            *x += b - f;
        }
        r
    }

    fn residual(&self, pb: &StepProblem, v: &[f64], b_u: &[f64], eps: f64) -> Vec<f64> {
        let eta = self.suite.regularized_selection(v, eps);
        crate::linalg::add(&self.smooth_part(pb, v, b_u), &self.suite.gamma_star(&eta))
    }

    fn smooth_jacobian(&self, pb: &StepProblem, v: &[f64]) -> Tridiag {
        self.mass.scaled(1.0 / pb.tau_half).add(&self.suite.tangent_a(v))
    }

    fn jacobian(&self, pb: &StepProblem, v: &[f64], eps: f64) -> Tridiag {
        let d: Vec<f64> = self
            .suite
            .gamma(v)
            .iter()
            .map(|&s| self.suite.potential.regularized_derivative(s, eps))
            .collect();
        let mut j = self.smooth_jacobian(pb, v);
        j.add_diag(&self.suite.gamma_star_diag(&d));
        j
    }

    pub fn solve_step(&self, pb: &StepProblem) -> Result<StepSolution> {
        let dim = self.suite.space.dim();
        if pb.u.len() != dim || pb.v_prev.len() != dim || pb.f.len() != dim {
            return Err(Error::Config(format!("step {}: vector lengths do not match the space", pb.n)));
        }
        if !(pb.tau_half > 0.0) {
            return Err(Error::InvalidGrid(format!("step {}: nonpositive half step", pb.n)));
        }
        if pb.tau_half >= self.tau_bound {
            return Err(Error::InadmissibleStep { tau: pb.tau_half, bound: self.tau_bound });
        }
        let cfg = &self.config;
        let b_u = self.suite.apply_b(pb.t, &pb.u).total();
        let mut v = pb.initial_guess.clone().unwrap_or_else(|| pb.v_prev.clone());
        let mut history = Vec::new();
        let mut iterations = 0;
        let mut fallback_iterations = 0;
        let mut r_norm = f64::INFINITY;

        for eps in cfg.levels() {
            let mut r = self.residual(pb, &v, &b_u, eps);
            r_norm = self.dual(&r)?;
            history.push(r_norm);
            if r_norm <= cfg.tol {
                continue;
            }
            let mut best = r_norm;
            let mut since_best = 0;
            let mut converged = false;
            for _ in 0..cfg.max_newton {
                iterations += 1;
                let step = self
                    .jacobian(pb, &v, eps)
                    .solve(&r)
                    .ok()
                    .and_then(|d| self.line_search(pb, &v, &d, &b_u, eps, r_norm).ok().flatten());
                match step {
                    Some((nv, nr, nn)) => {
                        v = nv;
                        r = nr;
                        r_norm = nn;
                    }
                    None => since_best = cfg.stall_window,
                }
                if r_norm < best * (1.0 - 1e-4) {
                    best = r_norm;
                    since_best = 0;
                } else {
                    since_best += 1;
                }
                history.push(r_norm);
                if r_norm <= cfg.tol {
                    converged = true;
                    break;
                }
                if since_best >= cfg.stall_window {
                    let (nv, nr, nn, used) = self.fixed_point(pb, v, &b_u, eps)?;
                    fallback_iterations += used;
                    v = nv;
                    r = nr;
                    r_norm = nn;
                    history.push(r_norm);
                    best = best.min(r_norm);
                    since_best = 0;
                    if r_norm <= cfg.tol {
                        converged = true;
                        break;
                    }
                }
            }
            if !converged {
                return Err(Error::Nonconvergence {
                    step: pb.n,
                    iterations: iterations + fallback_iterations,
                    residual: r_norm,
                    best: v,
                    history,
                });
            }
        }

        let eps = cfg.eps_target;
        let gamma_v = self.suite.gamma(&v);
        let eta: Vec<f64> = gamma_v.iter().map(|&s| self.suite.potential.regularized_selection(s, eps)).collect();
        let intervals: Vec<(f64, f64)> = gamma_v.iter().map(|&s| self.suite.potential.subdiff_interval(s)).collect();
        let graph_distance = gamma_v
            .iter()
            .zip(&eta)
            .map(|(&s, &e)| self.suite.potential.graph_distance(s, e))
            .fold(0.0, f64::max);
        Ok(StepSolution {
            v,
            eta,
            gamma_v,
            iterations,
            fallback_iterations,
            residual: r_norm,
            eps,
            graph_distance,
            intervals,
        })
    }

    /// Backtracking on the residual norm along `−d`.
    #[allow(clippy::type_complexity)]
    fn line_search(
        &self,
        pb: &StepProblem,
        v: &[f64],
        d: &[f64],
        b_u: &[f64],
        eps: f64,
        r_norm: f64,
    ) -> Result<Option<(Vec<f64>, Vec<f64>, f64)>> {
        let mut lambda = 1.0;
        for _ in 0..40 {
            let trial = axpy(v, -lambda, d);
            let r = self.residual(pb, &trial, b_u, eps);
            let n = self.dual(&r)?;
            if n.is_finite() && n <= (1.0 - 1e-4 * lambda) * r_norm {
                return Ok(Some((trial, r, n)));
            }
            lambda *= 0.5;
        }
        Ok(None)
    }

    /// Non-monotone sweep `v ← v − ω J_s⁻¹ R`, with `J_s` the Jacobian without
    /// the selection term; returns the best iterate seen.
    fn fixed_point(
        &self,
        pb: &StepProblem,
        mut v: Vec<f64>,
        b_u: &[f64],
        eps: f64,
    ) -> Result<(Vec<f64>, Vec<f64>, f64, usize)> {
        let mut r = self.residual(pb, &v, b_u, eps);
        let mut best = (v.clone(), r.clone(), self.dual(&r)?);
        let omegas = &self.config.damping;
        for k in 0..self.config.fixed_point_iters {
            let omega = omegas[k % omegas.len()];
            let d = self.smooth_jacobian(pb, &v).solve(&r)?;
            v = axpy(&v, -omega, &d);
            r = self.residual(pb, &v, b_u, eps);
            let n = self.dual(&r)?;
            if n < best.2 {
                best = (v.clone(), r.clone(), n);
                if n <= self.config.tol {
                    return Ok((best.0, best.1, best.2, k + 1));
                }
            }
        }
        Ok((best.0, best.1, best.2, self.config.fixed_point_iters))
    }

    /// Re-assembles the step equation at `(v, η)` and measures how far `η`
    /// is from `∂j(γv)`.
    pub fn certify(&self, pb: &StepProblem, sol: &StepSolution) -> Result<Certificate> {
        certify(self.suite, pb, sol)
    }
}

/// Independent re-check of a step, using only the suite and the stored `(v, η)`.
pub fn certify(suite: &OperatorSuite, pb: &StepProblem, sol: &StepSolution) -> Result<Certificate> {
    let space = &suite.space;
    let dv: Vec<f64> = sol.v.iter().zip(&pb.v_prev).map(|(a, b)| (a - b) / pb.tau_half).collect();
    let inertia = space.mass().mul_vec(&dv);
    let a = suite.apply_a(pb.t, &sol.v);
    let b = suite.apply_b(pb.t, &pb.u);
    let g = suite.gamma_star(&sol.eta);
    let r: Vec<f64> = (0..dv.len()).map(|i| inertia[i] + a[i] + b.b0[i] + b.c[i] + g[i] - pb.f[i]).collect();
    let residual = space.dual_norm_surrogate(&r)?;
    let graph_distance = suite
        .gamma(&sol.v)
        .iter()
        .zip(&sol.eta)
        .map(|(&s, &e)| suite.potential.graph_distance(s, e))
        .fold(0.0, f64::max);
    Ok(Certificate { residual, graph_distance })
}

impl Certificate {
    /// Residual within `tol` and `η` within `ε` of the graph of `∂j`.
    ///
    /// A graph distance of at most `ε` is the same as `η` lying in the hull of
    /// `∂j` over `[γv − ε, γv + ε]`, since the filled-in graph is connected.
    pub fn check(&self, step: usize, tol: f64, eps: f64) -> Result<()> {
        if !(self.residual <= tol) {
            return Err(Error::Certificate {
                step,
                reason: format!("re-assembled residual {:e} exceeds {:e}", self.residual, tol),
            });
        }
        if !(self.graph_distance <= eps * (1.0 + 1e-9)) {
            return Err(Error::Certificate {
                step,
                reason: format!("selection is {:e} from the graph, allowed {:e}", self.graph_distance, eps),
            });
        }
        Ok(())
    }
}
