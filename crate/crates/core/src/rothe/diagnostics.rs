//! Identity checks, a priori monitors, BV^q jumps and the recovery term.

use super::{l2_distance_sq, Interpolant, InterpolantKind, Interpolants, Trajectory};
use crate::error::{Error, Result};
use crate::fem1d::FemSpace;
use crate::linalg::sub;
use crate::operators::OperatorSuite;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfStepReport {
    /// `‖v̂_τ − v_τ‖²_{L²(0,T;H)}` by quadrature of the interpolants.
    pub lhs: f64,
    /// `(1/3) Σ τ_{j+½} |v^j − v^{j−1}|²`.
    pub rhs: f64,
    pub rel_diff: f64,
    /// `(τ_max/3) Σ |v^j − v^{j−1}|²`.
    pub bound: f64,
    pub bound_holds: bool,
}

impl HalfStepReport {
    pub fn to_kv(&self) -> String {
        format!(
            "half_step_lhs = {}\nhalf_step_rhs = {}\nhalf_step_rel_diff = {}\nhalf_step_bound = {}\nhalf_step_bound_holds = {}\n",
            self.lhs, self.rhs, self.rel_diff, self.bound, self.bound_holds
        )
    }
}

pub fn half_step_identity(traj: &Trajectory, it: &Interpolants, space: &FemSpace) -> Result<HalfStepReport> {
    let mass = space.mass();
    let sq = |x: &[f64]| crate::linalg::dot(&mass.mul_vec(x), x);
    let lhs = l2_distance_sq(&it.v_hat, &it.v, &sq)?;
    let g = &traj.grid;
    let mut rhs = 0.0;
    let mut jumps = 0.0;
    for j in 1..g.len() {
        let d = sq(&sub(&traj.v[j], &traj.v[j - 1]));
        rhs += g.tau_half(j) * d;
        jumps += d;
    }
    rhs /= 3.0;
    let bound = g.tau_max() * jumps / 3.0;
    let rel_diff = if lhs == rhs { 0.0 } else { (lhs - rhs).abs() / lhs.abs().max(rhs.abs()) };
    Ok(HalfStepReport { lhs, rhs, rel_diff, bound, bound_holds: lhs <= bound * (1.0 + 1e-12) })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AprioriReport {
    pub u_term: f64,
    pub v_term: f64,
    pub jump_term: f64,
    pub w_term: f64,
    pub eta_term: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// `Σ τ_{j+½} ‖(v^j − v^{j−1})/τ_{j+½}‖^q_{W*}` (surrogate dual norm).
    pub rate_sum: f64,
}

impl AprioriReport {
    pub fn to_kv(&self) -> String {
        format!(
            "apriori_u_term = {}\napriori_v_term = {}\napriori_jump_term = {}\napriori_w_term = {}\napriori_eta_term = {}\n\
             apriori_lhs = {}\napriori_rhs = {}\napriori_ratio = {}\nrate_sum = {}\n",
            self.u_term, self.v_term, self.jump_term, self.w_term, self.eta_term, self.lhs, self.rhs, self.ratio, self.rate_sum
        )
    }
}

/// Both sides of the a priori bound at `n = N − 1`, with `c` left out.
///
/// The right side is `1 + ‖u⁰‖_V + |v⁰|² + τ₁²‖v⁰‖_V + Σ τ_{j+½}‖f^j‖^q_{W*}`.
pub fn apriori_report(traj: &Trajectory, suite: &OperatorSuite) -> Result<AprioriReport> {
    let space = &suite.space;
    let g = &traj.grid;
    let n = g.len();
    let (p, q) = (space.p(), space.q());
    let u_term = space.norm_v(&traj.u[n]).powi(2);
    let v_term = space.norm_h(&traj.v[n - 1]).powi(2);
    let mass = space.mass();
    let mut jump_term = 0.0;
    let mut w_term = 0.0;
    let mut eta_term = 0.0;
    let mut f_term = 0.0;
    let mut rate_sum = 0.0;
    for j in 1..n {
        let th = g.tau_half(j);
        let dv = sub(&traj.v[j], &traj.v[j - 1]);
        jump_term += space.norm_h(&dv).powi(2);
        w_term += th * space.norm_w(&traj.v[j]).powf(p);
        eta_term += th * suite.u_dual_norm(traj.eta_at(j)).powf(q);
        f_term += th * space.dual_norm_surrogate(traj.load_at(j))?.powf(q);
        let rate: Vec<f64> = mass.mul_vec(&dv).iter().map(|x| x / th).collect();
        rate_sum += th * space.dual_norm_surrogate(&rate)?.powf(q);
    }
    let lhs = u_term + v_term + jump_term + w_term + eta_term;
    let rhs = 1.0
        + space.norm_v(&traj.u[0])
        + space.norm_h(&traj.v[0]).powi(2)
        + g.tau(1).powi(2) * space.norm_v(&traj.v[0])
        + f_term;
    Ok(AprioriReport { u_term, v_term, jump_term, w_term, eta_term, lhs, rhs, ratio: lhs / rhs, rate_sum })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BvqReport {
    /// `Σ_{k=1}^N ‖v^k − v^{k−1}‖^q_{W*}` over consecutive values.
    pub jump_sum: f64,
    /// `N^{q−1} · jump_sum`.
    pub chain_bound: f64,
}

/// Jump sums of a piecewise-constant `v_τ` whose interval values are
/// `v⁰, v¹, …, v^N`; `dual` is the `W*` norm of a nodal function.
pub fn bvq_diagnostics(v: &Interpolant, q: f64, dual: &dyn Fn(&[f64]) -> Result<f64>) -> Result<BvqReport> {
    if v.kind() != InterpolantKind::PiecewiseConstant {
        return Err(Error::Config("BV^q jumps are taken of piecewise-constant functions".into()));
    }
    let vals = v.values();
    let n = vals.len() - 1;
    let mut jump_sum = 0.0;
    for k in 1..=n {
        jump_sum += dual(&sub(&vals[k], &vals[k - 1]))?.powf(q);
    }
    Ok(BvqReport { jump_sum, chain_bound: (n as f64).powf(q - 1.0) * jump_sum })
}

/// `‖u⁰ + Kv_τ − u_τ‖_{L²(0,T;V)}` and its split into the two end half
/// intervals, where `u_τ = 0`, and the interior.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveryReport {
    pub total: f64,
    pub interior: f64,
    pub endpoint: f64,
}

pub fn recovery(traj: &Trajectory, it: &Interpolants, space: &FemSpace) -> Result<RecoveryReport> {
    let k = it.v.antiderivative()?;
    let b = k.breakpoints().to_vec();
    let shifted: Vec<Vec<f64>> = k.values().iter().map(|x| crate::linalg::add(x, &traj.u[0])).collect();
    let lifted = Interpolant::new(b.clone(), InterpolantKind::PiecewiseLinear, shifted)?;
    let stiff = space.stiffness();
    let sq = |x: &[f64]| crate::linalg::dot(&stiff.mul_vec(x), x);
    let total_sq = l2_distance_sq(&lifted, &it.u, &sq)?;
    // restrict to the two padded intervals
    let end = |lo: f64, hi: f64| -> Result<f64> {
        let pick = |w: &Interpolant| {
            let vals = match w.kind() {
                InterpolantKind::PiecewiseLinear => vec![w.eval(lo), w.eval(hi)],
                InterpolantKind::PiecewiseConstant => vec![w.eval(hi)],
            };
            Interpolant::new(vec![lo, hi], w.kind(), vals)
        };
        l2_distance_sq(&pick(&lifted)?, &pick(&it.u)?, &sq)
    };
    let n = b.len();
    let endpoint_sq = end(b[0], b[1])? + end(b[n - 2], b[n - 1])?;
    Ok(RecoveryReport {
        total: total_sq.sqrt(),
        interior: (total_sq - endpoint_sq).max(0.0).sqrt(),
        endpoint: endpoint_sq.sqrt(),
    })
}
