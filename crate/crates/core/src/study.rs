//! Refinement studies: a manufactured smooth case with known solution,
//! Cauchy differences for nonsmooth laws, and per-level hypothesis audits.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fem1d::{Boundary, FemSpace};
use crate::operators::{
    audit_hypotheses, compute_example_constants, ConstantsLedger, OperatorSuite, PotentialGraph, PotentialKind,
    ProblemKind, ScalarLaw,
};
use crate::quadrature::GAUSS5;
use crate::rothe::{
    apriori_report, half_step_identity, l2_distance_sq, make_interpolants, Field, Interpolants, LoadSpec, RotheSolver,
    SpaceProfile, TimeProfile, Trajectory,
};
use crate::stepper::SolverConfig;
use crate::timegrid::{check_step_constraint, GridKind, StepConstraintReport, TimeGrid};

/// Everything needed to run one problem on any grid.
#[derive(Clone, Debug)]
pub struct Setup {
    pub suite: OperatorSuite,
    pub u0: Field,
    pub v0: Field,
    pub load: LoadSpec,
    pub solver: SolverConfig,
    pub horizon: f64,
    /// Grid ratio bound recorded in the ledger.
    pub d: f64,
}

/// Result of one level: the grid verdict and, if admissible, the run.
#[derive(Clone, Debug)]
pub struct Level {
    pub grid: TimeGrid,
    pub constraint: std::result::Result<StepConstraintReport, String>,
    pub trajectory: Option<Trajectory>,
}

impl Level {
    pub fn admissible(&self) -> bool {
        matches!(&self.constraint, Ok(r) if r.admissible)
    }

    pub fn verdict(&self) -> &'static str {
        match &self.constraint {
            Ok(r) if r.admissible => "admissible",
            Ok(_) => "inadmissible",
            Err(_) => "hypothesis_violated",
        }
    }
}

impl Setup {
    pub fn ledger(&self) -> Result<ConstantsLedger> {
        compute_example_constants(&self.suite, self.d)
    }

    /// Checks the step constraint, then runs the scheme if the grid passes.
    pub fn run_level(&self, grid: TimeGrid, ledger: &ConstantsLedger) -> Result<Level> {
        let constraint = check_step_constraint(&grid, ledger).map_err(|e| e.to_string());
        let trajectory = match &constraint {
            Ok(rep) if rep.admissible => {
                let space = &self.suite.space;
                let u0 = self.u0.interpolate(space)?;
                let v0 = self.v0.interpolate(space)?;
                let load = self.load.pairing_fn(space);
                let tr = RotheSolver::new(&self.suite, &grid, self.solver.clone())
                    .with_constraint(rep.clone())
                    .run(&u0, &v0, &load)
                    .map_err(|f| f.error)?;
                Some(tr)
            }
            _ => None,
        };
        Ok(Level { grid, constraint, trajectory })
    }
}

/// The smooth case `u(t, x) = sin(πx) cos t` with `p = 2`, `δ = 0`,
/// `g(s) = s`, `j(s) = s²/2` and both ends clamped.
#[derive(Clone, Debug)]
pub struct ManufacturedCase {
    pub alpha: f64,
    pub setup: Setup,
}

impl ManufacturedCase {
    pub fn new(alpha: f64, m: usize, solver: SolverConfig) -> Result<Self> {
        let space = FemSpace::uniform(m, 2.0, Boundary::BothClamped)?;
        let suite = OperatorSuite::new(
            ProblemKind::Domain,
            space,
            alpha,
            ScalarLaw::Identity,
            0.0,
            PotentialGraph::builtin(PotentialKind::Quadratic),
        )?;
        let sine = SpaceProfile::Sine { mode: 1.0 };
        let load = LoadSpec {
            amplitude: 1.0,
            time: TimeProfile::Trig { cos: PI * PI, sin: -(alpha * PI * PI + 2.0), omega: 1.0 },
            space: sine,
        };
        let setup = Setup {
            suite,
            u0: Field { amplitude: 1.0, profile: sine },
            v0: Field { amplitude: 0.0, profile: sine },
            load,
            solver,
            horizon: 1.0,
            d: 1.0,
        };
        Ok(Self { alpha, setup })
    }

    pub fn u(&self, t: f64, x: f64) -> f64 {
        (PI * x).sin() * t.cos()
    }

    pub fn u_t(&self, t: f64, x: f64) -> f64 {
        -(PI * x).sin() * t.sin()
    }

    /// Pointwise residual of the exact solution, each term differentiated by hand:
    /// `u_tt − α u_txx + g(u_t) − u_xx + |u|⁰u + j'(u_t) − f`.
    pub fn continuous_residual(&self, t: f64, x: f64) -> f64 {
        let s = (PI * x).sin();
        let u_tt = -s * t.cos();
        let u_txx = PI * PI * s * t.sin();
        let u_xx = -PI * PI * s * t.cos();
        let u = s * t.cos();
        let u_t = -s * t.sin();
        let f = self.setup.load.amplitude * self.setup.load.time.eval(t) * self.setup.load.space.eval(x);
        u_tt - self.alpha * u_txx + u_t - u_xx + u + u_t - f
    }

    /// Largest `|residual|` on a `k × k` space–time sample grid over `[0,1]²`.
    pub fn max_continuous_residual(&self, k: usize) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..=k {
            for j in 0..=k {
                worst = worst.max(self.continuous_residual(i as f64 / k as f64, j as f64 / k as f64).abs());
            }
        }
        worst
    }

    /// `‖v_τ − u'‖_{L²(0,T;H)}` with the exact velocity interpolated in space.
    pub fn velocity_error(&self, it: &Interpolants) -> f64 {
        let space = &self.setup.suite.space;
        let mass = space.mass();
        let mut acc = 0.0;
        for w in it.v.breakpoints().windows(2) {
            acc += GAUSS5.integrate(w[0], w[1], |t| {
                let exact = space.interpolate(|x| self.u_t(t, x)).0;
                let d: Vec<f64> = it.v.eval(t).iter().zip(exact.iter()).map(|(a, b)| a - b).collect();
                crate::linalg::dot(&mass.mul_vec(&d), &d)
            });
        }
        acc.sqrt()
    }

    /// `max_n ‖u^n − u(t_n)‖_V`.
    pub fn displacement_error(&self, tr: &Trajectory) -> f64 {
        let space = &self.setup.suite.space;
        (0..tr.u.len())
            .map(|n| {
                let t = tr.grid.t(n);
                let exact = space.interpolate(|x| self.u(t, x)).0;
                space.norm_v(&crate::linalg::sub(&tr.u[n], &exact))
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StudyKind {
    Order,
    Cauchy,
    Audit,
}

/// Refinement family: strictly increasing `N`, one grid kind, shared setup.
#[derive(Clone, Debug)]
pub struct StudyPlan {
    pub kind: StudyKind,
    pub levels: Vec<usize>,
    pub grid: GridKind,
    pub setup: Setup,
    /// Manufactured coefficient for order studies.
    pub alpha: f64,
    /// Hypothesis samples per level for audits.
    pub samples: usize,
    pub seed: u64,
}

impl StudyPlan {
    pub fn validate(&self) -> Result<()> {
        if self.levels.len() < 2 || self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("study levels must be at least two strictly increasing counts".into()));
        }
        if self.kind == StudyKind::Order && self.levels.len() < 3 {
            return Err(Error::Config("an order study needs at least three levels".into()));
        }
        Ok(())
    }
}

/// One CSV row per level plus a key–value summary.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyReport {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub summary: Vec<(String, String)>,
    pub passed: bool,
}

impl StudyReport {
    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    pub fn summary_kv(&self) -> String {
        self.summary.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Vec<Option<f64>> {
        let idx = self.header.iter().position(|h| *h == name).expect("unknown column");
        self.rows.iter().map(|r| r[idx].parse().ok()).collect()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn order(e: &[f64], levels: &[usize], k: usize) -> Option<f64> {
    (k > 0).then(|| (e[k - 1] / e[k]).ln() / (levels[k] as f64 / levels[k - 1] as f64).ln())
}

fn spread(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

fn certificates(tr: &Trajectory) -> (f64, f64) {
    tr.steps.iter().fold((0.0, 0.0), |(r, g), s| (f64::max(r, s.certified_residual), f64::max(g, s.graph_distance)))
}

/// Largest `|γv^n|` and the number of steps where some component of `γv`
/// crosses a kink of `j`.
fn kink_activity(tr: &Trajectory, suite: &OperatorSuite) -> (f64, usize) {
    let kinks = suite.potential.breakpoints();
    let traces: Vec<Vec<f64>> = tr.v.iter().map(|v| suite.gamma(v)).collect();
    let max = traces.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs()));
    let crossings = traces
        .windows(2)
        .filter(|w| {
            w[0].iter().zip(&w[1]).any(|(a, b)| kinks.iter().any(|k| (a - k) * (b - k) < 0.0))
        })
        .count();
    (max, crossings)
}

fn build_levels(plan: &StudyPlan, setup: &Setup, ledger: &ConstantsLedger) -> Result<Vec<Level>> {
    plan.levels
        .iter()
        .map(|&n| setup.run_level(TimeGrid::build(&plan.grid, n, setup.horizon)?, ledger))
        .collect()
}

/// Errors against the manufactured solution along the refinement family.
pub fn run_order_study(plan: &StudyPlan) -> Result<StudyReport> {
    plan.validate()?;
    let m = plan.setup.suite.space.elements();
    let case = ManufacturedCase::new(plan.alpha, m, plan.setup.solver.clone())?;
    let ledger = case.setup.ledger()?;
    let levels = build_levels(plan, &case.setup, &ledger)?;
    let space = &case.setup.suite.space;

    let mut vel = Vec::new();
    let mut disp = Vec::new();
    let mut apriori = Vec::new();
    let mut rate_sum = Vec::new();
    let mut half_step = Vec::new();
    let mut cert = (0.0_f64, 0.0_f64);
    let mut rows = Vec::new();
    for (k, lvl) in levels.iter().enumerate() {
        let Some(tr) = &lvl.trajectory else {
            rows.push(vec![plan.levels[k].to_string(), lvl.grid.tau_max().to_string(), lvl.verdict().into()]);
            continue;
        };
        let it = make_interpolants(tr)?;
        vel.push(case.velocity_error(&it));
        disp.push(case.displacement_error(tr));
        let ap = apriori_report(tr, &case.setup.suite)?;
        apriori.push(ap.ratio);
        rate_sum.push(ap.rate_sum);
        half_step.push(half_step_identity(tr, &it, space)?.rel_diff);
        let c = certificates(tr);
        cert = (cert.0.max(c.0), cert.1.max(c.1));
        rows.push(vec![plan.levels[k].to_string(), lvl.grid.tau_max().to_string(), lvl.verdict().into()]);
    }
    if vel.len() != levels.len() {
        let header = vec!["N", "tau_max", "verdict"];
        return Ok(StudyReport {
            header,
            rows,
            summary: vec![("passed".into(), "false".into()), ("reason".into(), "inadmissible level".into())],
            passed: false,
        });
    }
    for (k, row) in rows.iter_mut().enumerate() {
        row.extend([
            vel[k].to_string(),
            opt(order(&vel, &plan.levels, k)),
            disp[k].to_string(),
            opt(order(&disp, &plan.levels, k)),
            apriori[k].to_string(),
            rate_sum[k].to_string(),
            half_step[k].to_string(),
        ]);
    }
    let orders: Vec<f64> = (1..vel.len()).filter_map(|k| order(&vel, &plan.levels, k)).collect();
    let decreasing = vel.windows(2).all(|w| w[1] < w[0]);
    let min_order = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_order = orders.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let in_bracket = min_order >= 0.8 && max_order <= 2.2;
    let apriori_spread = spread(&apriori);
    let rate_spread = spread(&rate_sum);
    let half_step_max = half_step.iter().cloned().fold(0.0, f64::max);
    let passed = decreasing && in_bracket && apriori_spread <= 10.0 && rate_spread <= 10.0 && rate_sum.iter().all(|x| x.is_finite());
    let summary = vec![
        ("errors_decreasing".into(), decreasing.to_string()),
        ("min_velocity_order".into(), min_order.to_string()),
        ("max_velocity_order".into(), max_order.to_string()),
        ("order_in_bracket".into(), in_bracket.to_string()),
        ("apriori_ratio_spread".into(), apriori_spread.to_string()),
        ("rate_spread".into(), rate_spread.to_string()),
        ("half_step_max_rel_diff".into(), half_step_max.to_string()),
        ("max_certified_residual".into(), cert.0.to_string()),
        ("max_graph_distance".into(), cert.1.to_string()),
        ("passed".into(), passed.to_string()),
    ];
    Ok(StudyReport {
        header: vec![
            "N",
            "tau_max",
            "verdict",
            "velocity_error",
            "velocity_order",
            "displacement_error",
            "displacement_order",
            "apriori_ratio",
            "rate_sum",
            "half_step_rel_diff",
        ],
        rows,
        summary,
        passed,
    })
}

/// Relative change of the manufactured velocity error when the mesh is halved.
pub fn mesh_sensitivity(alpha: f64, n: usize, m: usize, solver: &SolverConfig) -> Result<f64> {
    let mut errs = Vec::new();
    for mm in [m, 2 * m] {
        let case = ManufacturedCase::new(alpha, mm, solver.clone())?;
        let ledger = case.setup.ledger()?;
        let lvl = case.setup.run_level(TimeGrid::build(&GridKind::Uniform, n, 1.0)?, &ledger)?;
        let tr = lvl.trajectory.ok_or_else(|| Error::Study("mesh sensitivity level is inadmissible".into()))?;
        errs.push(case.velocity_error(&make_interpolants(&tr)?));
    }
    Ok((errs[0] - errs[1]).abs() / errs[1])
}

/// `d_N = ‖v_{τ(N')} − v_{τ(N)}‖_{L²(0,T;H)}` between consecutive levels.
pub fn run_cauchy_study(plan: &StudyPlan) -> Result<StudyReport> {
    plan.validate()?;
    let setup = &plan.setup;
    let ledger = setup.ledger()?;
    let levels = build_levels(plan, setup, &ledger)?;
    let space = &setup.suite.space;
    let mass = space.mass();
    let sq = |x: &[f64]| crate::linalg::dot(&mass.mul_vec(x), x);

    let mut its = Vec::new();
    let mut rows = Vec::new();
    for (k, lvl) in levels.iter().enumerate() {
        rows.push(vec![plan.levels[k].to_string(), lvl.grid.tau_max().to_string(), lvl.verdict().to_string()]);
        if let Some(tr) = &lvl.trajectory {
            its.push(Some(make_interpolants(tr)?));
        } else {
            its.push(None);
        }
    }
    if its.iter().any(Option::is_none) {
        return Ok(StudyReport {
            header: vec!["N", "tau_max", "verdict"],
            rows,
            summary: vec![("passed".into(), "false".into()), ("reason".into(), "inadmissible level".into())],
            passed: false,
        });
    }
    let its: Vec<Interpolants> = its.into_iter().flatten().collect();
    let mut d = Vec::new();
    for k in 0..its.len() - 1 {
        d.push(l2_distance_sq(&its[k + 1].v, &its[k].v, &sq)?.sqrt());
    }
    let mut offending = None;
    for k in 1..d.len() {
        if d[k] > d[k - 1] && offending.is_none() {
            offending = Some((plan.levels[k - 1], plan.levels[k]));
        }
    }
    for (k, row) in rows.iter_mut().enumerate() {
        let tr = levels[k].trajectory.as_ref().expect("admissible");
        let (res, gd) = certificates(tr);
        let fallback: usize = tr.steps.iter().map(|s| s.fallback_iterations).sum();
        let (max_trace, crossings) = kink_activity(tr, &setup.suite);
        row.extend([
            opt(d.get(k).copied()),
            opt((k > 0 && k < d.len()).then(|| d[k] / d[k - 1])),
            apriori_report(tr, &setup.suite)?.ratio.to_string(),
            res.to_string(),
            gd.to_string(),
            fallback.to_string(),
            max_trace.to_string(),
            crossings.to_string(),
        ]);
    }
    let passed = offending.is_none();
    let mut summary = vec![
        ("monotone".into(), passed.to_string()),
        ("d_values".into(), d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")),
    ];
    if let Some((a, b)) = offending {
        summary.push(("offending_pair".into(), format!("{a} {b}")));
    }
    summary.push(("passed".into(), passed.to_string()));
    Ok(StudyReport {
        header: vec![
            "N",
            "tau_max",
            "verdict",
            "d_N",
            "d_ratio",
            "apriori_ratio",
            "max_certified_residual",
            "max_graph_distance",
            "fallback_iterations",
            "max_gamma_v",
            "kink_crossings",
        ],
        rows,
        summary,
        passed,
    })
}

/// Per level: smallness slack, step-constraint slack, initial-data error,
/// `τ_max ‖v⁰_τ‖²_V` and `σ(τ)`. The mesh is refined with the grid,
/// `M_k = M · N_k / N_0`, so that `u⁰_τ → u₀` in `V`.
pub fn run_hypothesis_audit(plan: &StudyPlan) -> Result<StudyReport> {
    plan.validate()?;
    let base = &plan.setup;
    let m0 = base.suite.space.elements();
    let mut rows = Vec::new();
    let mut init_err = Vec::new();
    let mut v0_term = Vec::new();
    let mut sigma = Vec::new();
    let mut all_audits = true;
    let mut all_h0 = true;
    for &n in &plan.levels {
        let m = m0 * n / plan.levels[0];
        let space = FemSpace::uniform(m, base.suite.space.p(), base.suite.space.boundary())?;
        let suite = OperatorSuite::new(
            base.suite.kind,
            space,
            base.suite.alpha,
            base.suite.g,
            base.suite.delta,
            base.suite.potential.clone(),
        )?;
        let ledger = compute_example_constants(&suite, base.d)?;
        let grid = TimeGrid::build(&plan.grid, n, base.horizon)?;
        let h0 = ledger.smallness();
        all_h0 &= h0.holds;
        let step = check_step_constraint(&grid, &ledger);
        let audit = audit_hypotheses(&suite, &ledger, plan.samples, plan.seed)?;
        all_audits &= audit.passed();
        let e0 = base.u0.interpolation_error_v(&suite.space)?;
        let v0 = base.v0.interpolate(&suite.space)?;
        let vt = grid.tau_max() * suite.space.norm_v(&v0).powi(2);
        init_err.push(e0);
        v0_term.push(vt);
        sigma.push(grid.sigma());
        rows.push(vec![
            n.to_string(),
            m.to_string(),
            grid.tau_max().to_string(),
            (grid.tau_max() / grid.tau_min()).to_string(),
            h0.slack.to_string(),
            step.as_ref().map(|r| r.slack.to_string()).unwrap_or_default(),
            match &step {
                Ok(r) if r.admissible => "admissible".into(),
                Ok(_) => "inadmissible".into(),
                Err(_) => "hypothesis_violated".into(),
            },
            e0.to_string(),
            vt.to_string(),
            grid.sigma().to_string(),
            audit.passed().to_string(),
        ]);
    }
    let init_decreasing = init_err.windows(2).all(|w| w[1] < w[0]);
    let v0_bounded = v0_term.iter().all(|x| x.is_finite()) && v0_term.iter().cloned().fold(0.0, f64::max) <= 10.0 * v0_term[0].max(1e-300);
    let sigma_ok = sigma.windows(2).all(|w| w[1] <= w[0]);
    let passed = all_audits && all_h0 && init_decreasing && sigma_ok;
    let summary = vec![
        ("smallness_holds".into(), all_h0.to_string()),
        ("audits_passed".into(), all_audits.to_string()),
        ("initial_error_decreasing".into(), init_decreasing.to_string()),
        ("v0_term_bounded".into(), v0_bounded.to_string()),
        ("sigma_nonincreasing".into(), sigma_ok.to_string()),
        ("passed".into(), passed.to_string()),
    ];
    Ok(StudyReport {
        header: vec![
            "N",
            "M",
            "tau_max",
            "tau_ratio",
            "smallness_slack",
            "step_slack",
            "verdict",
            "initial_error_V",
            "tau_max_v0_V2",
            "sigma",
            "audit_passed",
        ],
        rows,
        summary,
        passed,
    })
}

pub fn run_study(plan: &StudyPlan) -> Result<StudyReport> {
    match plan.kind {
        StudyKind::Order => run_order_study(plan),
        StudyKind::Cauchy => run_cauchy_study(plan),
        StudyKind::Audit => run_hypothesis_audit(plan),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case() -> ManufacturedCase {
        ManufacturedCase::new(1.0, 40, SolverConfig::default()).unwrap()
    }

    #[test]
    fn manufactured_initial_data() {
        let c = case();
        for x in [0.1, 0.5, 0.9] {
            assert_eq!(c.u(0.0, x), (PI * x).sin());
            assert_eq!(c.u_t(0.0, x), 0.0);
        }
        // f(0, x) = π² sin(πx) at α = 1
        let f0 = c.setup.load.time.eval(0.0) * c.setup.load.space.eval(0.3);
        assert!((f0 - PI * PI * (0.3 * PI).sin()).abs() < 1e-13);
    }

    #[test]
    fn manufactured_residual_vanishes() {
        assert!(case().max_continuous_residual(50) <= 1e-10);
        let c = ManufacturedCase::new(0.3, 10, SolverConfig::default()).unwrap();
        assert!(c.max_continuous_residual(50) <= 1e-10);
    }

    fn plan(kind: StudyKind, levels: Vec<usize>, setup: Setup) -> StudyPlan {
        StudyPlan { kind, levels, grid: GridKind::Uniform, setup, alpha: 1.0, samples: 5, seed: 7 }
    }

    #[test]
    fn small_order_study() {
        let p = plan(StudyKind::Order, vec![8, 16, 32], case().setup);
        let r = run_order_study(&p).unwrap();
        assert_eq!(r.rows.len(), 3);
        assert_eq!(r.get("errors_decreasing"), Some("true"));
        let e = r.column("velocity_error");
        assert!(e[2].unwrap() < e[0].unwrap());
    }

    #[test]
    fn identical_levels_have_zero_distance() {
        let c = case();
        let ledger = c.setup.ledger().unwrap();
        let g = TimeGrid::build(&GridKind::Uniform, 8, 1.0).unwrap();
        let a = make_interpolants(c.setup.run_level(g.clone(), &ledger).unwrap().trajectory.as_ref().unwrap()).unwrap();
        let b = make_interpolants(c.setup.run_level(g, &ledger).unwrap().trajectory.as_ref().unwrap()).unwrap();
        assert_eq!(l2_distance_sq(&a.v, &b.v, &|x| x.iter().map(|y| y * y).sum()).unwrap(), 0.0);
    }

    #[test]
    fn audit_uniform_family() {
        let mut s = case().setup;
        s.suite = OperatorSuite::new(
            ProblemKind::Domain,
            FemSpace::uniform(10, 2.0, Boundary::BothClamped).unwrap(),
            1.0,
            ScalarLaw::Identity,
            0.0,
            PotentialGraph::builtin(PotentialKind::Quadratic),
        )
        .unwrap();
        let r = run_hypothesis_audit(&plan(StudyKind::Audit, vec![4, 8, 16], s)).unwrap();
        assert!(r.column("sigma").iter().all(|x| *x == Some(0.0)));
        let e = r.column("initial_error_V");
        // H¹ interpolation error of sin(πx) halves with the mesh
        for w in e.windows(2) {
            let q = w[0].unwrap() / w[1].unwrap();
            assert!((q - 2.0).abs() < 0.1, "{q}");
        }
        assert!(r.passed, "{}", r.summary_kv());
    }

    #[test]
    fn random_family_keeps_v0_term_bounded() {
        let mut s = case().setup;
        s.suite.space = FemSpace::uniform(10, 2.0, Boundary::BothClamped).unwrap();
        let mut p = plan(StudyKind::Audit, vec![4, 8, 16], s);
        p.grid = GridKind::Random { seed: 3, d: 2.0 };
        let r = run_hypothesis_audit(&p).unwrap();
        assert!(r.column("tau_max_v0_V2").iter().all(|x| *x == Some(0.0)));
        assert!(r.column("tau_ratio").iter().all(|x| x.unwrap() <= 2.0));
        assert_eq!(r.get("v0_term_bounded"), Some("true"));
    }

    #[test]
    fn plans_are_validated() {
        assert!(plan(StudyKind::Order, vec![8, 16], case().setup).validate().is_err());
        assert!(plan(StudyKind::Cauchy, vec![16, 8], case().setup).validate().is_err());
    }
}
