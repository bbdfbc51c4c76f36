//! Sampling audit of the growth, coercivity and monotonicity hypotheses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ConstantsLedger, OperatorSuite};
use crate::error::Result;
use crate::linalg::{dot, sub};

/// Allowance for the numerically estimated dual norms and embeddings.
const DUAL_INFLATION: f64 = 1.05;
/// Round-off allowance on relative slacks.
const SLACK_FLOOR: f64 = -1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct AuditCheck {
    pub name: &'static str,
    pub samples: usize,
    /// Smallest relative slack `(bound − value)/|bound|` seen.
    pub min_slack: f64,
    /// Description of the sample attaining `min_slack`.
    pub witness: String,
}

impl AuditCheck {
    fn new(name: &'static str) -> Self {
        Self { name, samples: 0, min_slack: f64::INFINITY, witness: String::new() }
    }

    /// Records `value <= bound`.
    fn upper(&mut self, value: f64, bound: f64, what: impl FnOnce() -> String) {
        let slack = (bound - value) / bound.abs().max(f64::MIN_POSITIVE);
        self.record(slack, what);
    }

    fn record(&mut self, slack: f64, what: impl FnOnce() -> String) {
        self.samples += 1;
        if slack < self.min_slack || slack.is_nan() {
            self.min_slack = slack;
            self.witness = what();
        }
    }

    pub fn passed(&self) -> bool {
        self.min_slack >= SLACK_FLOOR
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub seed: u64,
    pub checks: Vec<AuditCheck>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(AuditCheck::passed)
    }

    pub fn failures(&self) -> Vec<&AuditCheck> {
        self.checks.iter().filter(|c| !c.passed()).collect()
    }

    pub fn to_kv(&self) -> String {
        let mut out = format!("audit_seed = {}\naudit_passed = {}\n", self.seed, self.passed());
        for c in &self.checks {
            out.push_str(&format!(
                "audit.{}.samples = {}\naudit.{}.min_slack = {}\naudit.{}.passed = {}\n",
                c.name,
                c.samples,
                c.name,
                c.min_slack,
                c.name,
                c.passed()
            ));
            if !c.passed() {
                out.push_str(&format!("audit.{}.witness = {}\n", c.name, c.witness));
            }
        }
        out
    }
}

/// Random smooth-plus-rough coefficient vector scaled to `‖v‖_W = 10^e`, `e ∈ [−2, 2]`.
fn sample(suite: &OperatorSuite, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let space = &suite.space;
    let modes: Vec<(f64, f64)> = (1..=4)
        .map(|k| (rng.gen_range(-1.0..1.0) / k as f64, rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    let mut v: Vec<f64> = space
        .free_nodes()
        .iter()
        .map(|&x| modes.iter().enumerate().map(|(k, (a, ph))| a * ((k + 1) as f64 * 3.0 * x + ph).sin()).sum())
        .collect();
    for x in v.iter_mut() {
        *x += 0.05 * rng.gen_range(-1.0..1.0);
    }
    let n = space.norm_w(&v);
    let target = 10f64.powf(rng.gen_range(-2.0..2.0));
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x *= target / n);
    }
    v
}

/// Samples every hypothesis of the ledger on random discrete functions.
pub fn audit_hypotheses(
    suite: &OperatorSuite,
    ledger: &ConstantsLedger,
    samples: usize,
    seed: u64,
) -> Result<AuditReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = &suite.space;
    let p = ledger.p;
    let q = ledger.q;
    let mut growth_a = AuditCheck::new("growth_A");
    let mut coercive = AuditCheck::new("coercivity_A");
    let mut monotone = AuditCheck::new("monotone_principal");
    let mut g_law = AuditCheck::new("law_g");
    let mut m_growth = AuditCheck::new("growth_M");
    let mut b0 = AuditCheck::new("B0");
    let mut c_growth = AuditCheck::new("growth_C");
    let mut c_mod = AuditCheck::new("modulus_C");
    let mut gamma = AuditCheck::new("gamma_norm");
    let mut embed = AuditCheck::new("embedding_WV");

    for i in 0..samples {
        let v = sample(suite, &mut rng);
        let w = sample(suite, &mut rng);
        let nv = space.norm_w(&v);

        let av = suite.apply_a(0.0, &v);
        let dual = space.dual_norm_exact(&av)?;
        growth_a.upper(dual, DUAL_INFLATION * ledger.beta_a * (1.0 + nv.powf(p - 1.0)), || {
            format!("sample {i}: ||Av||_* = {dual}, ||v||_W = {nv}")
        });

        let pairing = dot(&av, &v);
        let hv = space.norm_h(&v);
        let lower = ledger.mu_a * nv.powf(p) - ledger.beta * hv * hv - ledger.lambda;
        coercive.record((pairing - lower) / lower.abs().max(pairing.abs()).max(f64::MIN_POSITIVE), || {
            format!("sample {i}: <Av,v> = {pairing}, lower bound = {lower}")
        });

        let diff = sub(&v, &w);
        let mono = dot(&sub(&suite.apply_a_principal(&v), &suite.apply_a_principal(&w)), &diff);
        let scale = dot(&suite.apply_a_principal(&v), &v).abs() + dot(&suite.apply_a_principal(&w), &w).abs();
        monotone.record(mono / scale.max(f64::MIN_POSITIVE), || format!("sample {i}: <A_p v - A_p w, v - w> = {mono}"));

        let s = 10f64.powf(rng.gen_range(-2.0..2.0)) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let gs = suite.g.value(s);
        g_law.upper(gs.abs(), ledger.c_g * (1.0 + s.abs().powf(p - 1.0)), || format!("s = {s}: |g(s)| = {}", gs.abs()));
        if gs * s < suite.g.inf_gs() {
            g_law.record(-1.0, || format!("s = {s}: g(s)s = {} below declared infimum", gs * s));
        }

        let gv = suite.gamma(&v);
        let eta: Vec<f64> = gv
            .iter()
            .map(|&x| {
                let (lo, hi) = suite.potential.subdiff_interval(x);
                if lo.abs() > hi.abs() { lo } else { hi }
            })
            .collect();
        let eta_norm = suite.u_dual_norm(&eta);
        let uv = suite.u_norm(&gv);
        m_growth.upper(eta_norm, ledger.c_m * (1.0 + uv.powf(p - 1.0)), || {
            format!("sample {i}: ||eta||_U* = {eta_norm}, ||gamma v||_U = {uv}")
        });
        gamma.upper(uv, ledger.gamma_norm * nv, || format!("sample {i}: ||gamma v||_U = {uv}, ||v||_W = {nv}"));

        let vv = space.norm_v(&v);
        embed.upper(vv, ledger.embedding_wv * nv, || format!("sample {i}: ||v||_V = {vv}, ||v||_W = {nv}"));

        let b = suite.apply_b(0.0, &v);
        let bvv = dot(&b.b0, &v);
        b0.record((bvv - ledger.mu_b * vv * vv) / (vv * vv).max(f64::MIN_POSITIVE), || {
            format!("sample {i}: <B0 v,v> = {bvv}, ||v||_V^2 = {}", vv * vv)
        });
        let b0_dual = space.dual_norm_surrogate(&b.b0)?;
        b0.upper(b0_dual, ledger.beta_b * vv * (1.0 + 1e-12), || format!("sample {i}: ||B0 v||_V* = {b0_dual}"));

        let c_dual = space.dual_norm_exact(&b.c)?;
        c_growth.upper(c_dual, DUAL_INFLATION * ledger.beta_c * (1.0 + vv.powf(2.0 / q)), || {
            format!("sample {i}: ||C v||_W* = {c_dual}, ||v||_V = {vv}")
        });

        let cw = suite.apply_b(0.0, &w).c;
        let dc = space.dual_norm_exact(&sub(&b.c, &cw))?;
        let r = vv.max(space.norm_v(&w));
        let hd = space.norm_h(&diff);
        c_mod.upper(dc, DUAL_INFLATION * ledger.c_modulus.eval(r) * hd.powf(1.0 / q), || {
            format!("sample {i}: ||Cv - Cw||_W* = {dc}, R = {r}, |v-w|_H = {hd}")
        });
    }
    // subdifferential growth exactly at the kinks
    for &bp in suite.potential.breakpoints() {
        let (lo, hi) = suite.potential.subdiff_interval(bp);
        let bound = ledger.c_j * (1.0 + bp.abs().powf(p - 1.0));
        m_growth.upper(lo.abs().max(hi.abs()), bound, || format!("kink {bp}: interval [{lo}, {hi}]"));
    }

    Ok(AuditReport {
        seed,
        checks: vec![growth_a, coercive, monotone, g_law, m_growth, b0, c_growth, c_mod, gamma, embed],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem1d::{Boundary, FemSpace};
    use crate::operators::{compute_example_constants, PotentialGraph, PotentialKind, ProblemKind, ScalarLaw};

    fn run(kind: ProblemKind, p: f64, g: ScalarLaw, delta: f64, j: PotentialKind) -> AuditReport {
        let b = if kind == ProblemKind::Boundary { Boundary::LeftClamped } else { Boundary::BothClamped };
        let space = FemSpace::uniform(32, p, b).unwrap();
        let s = OperatorSuite::new(kind, space, 1.5, g, delta, PotentialGraph::builtin(j)).unwrap();
        let l = compute_example_constants(&s, 1.0).unwrap();
        audit_hypotheses(&s, &l, 40, 3).unwrap()
    }

    #[test]
    fn model_suites_pass() {
        for r in [
            run(ProblemKind::Boundary, 3.0, ScalarLaw::Arctan, 0.2, PotentialKind::Jump),
            run(ProblemKind::Domain, 2.0, ScalarLaw::Identity, 0.0, PotentialKind::Quadratic),
            run(ProblemKind::Domain, 4.0, ScalarLaw::Power { coeff: 0.5, exponent: 2.5 }, 0.5, PotentialKind::DoubleWell),
            run(ProblemKind::Boundary, 2.0, ScalarLaw::Zero, 0.0, PotentialKind::Abs),
        ] {
            assert!(r.passed(), "{}", r.to_kv());
            assert!(r.checks.iter().all(|c| c.samples >= 40));
        }
    }

    #[test]
    fn coercivity_is_tight_without_g() {
        let r = run(ProblemKind::Boundary, 3.0, ScalarLaw::Zero, 0.0, PotentialKind::Quadratic);
        let c = r.checks.iter().find(|c| c.name == "coercivity_A").unwrap();
        assert!(c.min_slack.abs() < 1e-12);
    }

    #[test]
    fn understated_constant_is_caught() {
        let space = FemSpace::uniform(16, 2.0, Boundary::BothClamped).unwrap();
        let s = OperatorSuite::new(
            ProblemKind::Domain,
            space,
            1.0,
            ScalarLaw::Zero,
            0.0,
            PotentialGraph::builtin(PotentialKind::Quadratic),
        )
        .unwrap();
        let mut l = compute_example_constants(&s, 1.0).unwrap();
        l.mu_a = 2.0;
        let r = audit_hypotheses(&s, &l, 10, 1).unwrap();
        assert!(!r.passed());
        assert_eq!(r.failures()[0].name, "coercivity_A");
        assert!(r.to_kv().contains("audit.coercivity_A.witness"));
    }

    #[test]
    fn seeded_audit_is_reproducible() {
        let a = run(ProblemKind::Domain, 3.0, ScalarLaw::Arctan, 0.1, PotentialKind::Abs);
        let b = run(ProblemKind::Domain, 3.0, ScalarLaw::Arctan, 0.1, PotentialKind::Abs);
        assert_eq!(a, b);
    }
}
