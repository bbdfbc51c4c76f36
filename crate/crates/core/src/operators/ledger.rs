//! Hypothesis constants for the two model problems.

use super::{OperatorSuite, ProblemKind};
use crate::error::Result;

/// Safety factor applied to numerically estimated embedding constants.
pub const INFLATION: f64 = 1.05;

/// Modulus `α(R)` of the Hölder-type continuity of `C`:
/// `‖C(v) − C(w)‖_{W*} ≤ α(max(‖v‖_V, ‖w‖_V)) |v − w|^{1/q}`.
///
/// On (0,1) with a Dirichlet end, `‖v‖_∞ ≤ ‖v‖_V` and `|v|_H ≤ ‖v‖_V`, which gives
/// `α(R) = c̃^{1/p} (δ+1) R^δ (2R)^{1/p}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CModulus {
    pub poincare: f64,
    pub delta: f64,
    pub p: f64,
}

impl CModulus {
    pub fn eval(&self, r: f64) -> f64 {
        self.poincare.powf(1.0 / self.p) * (self.delta + 1.0) * r.powf(self.delta) * (2.0 * r).powf(1.0 / self.p)
    }
}

/// Every constant appearing in the hypotheses, the smallness condition and
/// the step constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantsLedger {
    pub p: f64,
    pub q: f64,
    /// Coercivity constant of `A`.
    pub mu_a: f64,
    /// Growth constant of `A` in `W*` (`c_A`).
    pub beta_a: f64,
    pub beta: f64,
    pub lambda: f64,
    pub mu_b: f64,
    pub beta_b: f64,
    pub beta_c: f64,
    pub c_m: f64,
    pub delta: f64,
    pub alpha: f64,
    pub c_g: f64,
    pub c_j: f64,
    /// `‖γ‖_{L(W,U)}`, already inflated.
    pub gamma_norm: f64,
    pub embedding_wv: f64,
    /// Grid ratio bound `τ_max ≤ D τ_min` of the refinement family.
    pub d: f64,
    /// Best Poincaré constant `c̃` of the space.
    pub poincare: f64,
    /// Whether every numerical estimate converged.
    pub verified: bool,
    pub c_modulus: CModulus,
}

impl ConstantsLedger {
    /// `c_M ‖γ‖^p`.
    pub fn smallness_rhs(&self) -> f64 {
        self.c_m * self.gamma_norm.powf(self.p)
    }

    pub fn smallness(&self) -> SmallnessReport {
        let rhs = self.smallness_rhs();
        SmallnessReport { mu_a: self.mu_a, rhs, holds: self.mu_a > rhs, slack: self.mu_a - rhs }
    }

    /// Key–value listing, one constant per line.
    pub fn to_kv(&self) -> String {
        let rows: [(&str, f64); 19] = [
            ("p", self.p),
            ("q", self.q),
            ("mu_A", self.mu_a),
            ("beta_A", self.beta_a),
            ("beta", self.beta),
            ("lambda", self.lambda),
            ("mu_B", self.mu_b),
            ("beta_B", self.beta_b),
            ("beta_C", self.beta_c),
            ("c_M", self.c_m),
            ("delta", self.delta),
            ("alpha", self.alpha),
            ("c_g", self.c_g),
            ("c_j", self.c_j),
            ("gamma_norm", self.gamma_norm),
            ("i_WV", self.embedding_wv),
            ("D", self.d),
            ("poincare", self.poincare),
            ("c_modulus_at_1", self.c_modulus.eval(1.0)),
        ];
        let mut out = String::new();
        for (k, v) in rows {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out.push_str(&format!("verified = {}\n", self.verified));
        out
    }
}

/// `μ_A > c_M ‖γ‖^p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmallnessReport {
    pub mu_a: f64,
    pub rhs: f64,
    pub holds: bool,
    pub slack: f64,
}

/// Fills the ledger for a model suite; `d` is the grid ratio bound.
///
/// `|Ω| = |Γ₂| = 1`, so the measure factors collapse to one.
pub fn compute_example_constants(suite: &OperatorSuite, d: f64) -> Result<ConstantsLedger> {
    let space = &suite.space;
    let p = space.p();
    let q = space.q();
    let poin = space.poincare_constant()?;
    let c_tilde = poin.value;
    let mut verified = poin.converged;
    let c_g = suite.g.growth_constant();
    let c_j = suite.potential.growth_constant(p);
    let gamma_norm = match suite.kind {
        ProblemKind::Boundary => {
            let tr = space.trace_constant()?;
            verified &= tr.converged;
            tr.value * INFLATION
        }
        ProblemKind::Domain => c_tilde.powf(1.0 / p) * INFLATION,
    };
    // c_q is the constant of the lower-order growth bound, i.e. c_g here
    let beta_a = (c_g * c_tilde.powf(1.0 / p)).max(suite.alpha + c_g * c_tilde.powf(1.0 / (p * q)));
    Ok(ConstantsLedger {
        p,
        q,
        mu_a: suite.alpha,
        beta_a,
        beta: 0.0,
        lambda: (-suite.g.inf_gs()).max(0.0),
        mu_b: 1.0,
        beta_b: 1.0,
        beta_c: c_tilde.powf(1.0 / p),
        c_m: c_j * 2f64.powf(1.0 / p),
        delta: suite.delta,
        alpha: suite.alpha,
        c_g,
        c_j,
        gamma_norm,
        embedding_wv: 1.0,
        d,
        poincare: c_tilde,
        verified,
        c_modulus: CModulus { poincare: c_tilde, delta: suite.delta, p },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem1d::{Boundary, FemSpace};
    use crate::operators::{PotentialGraph, PotentialKind, ScalarLaw};

    fn p1(p: f64, alpha: f64, j: PotentialGraph) -> OperatorSuite {
        let space = FemSpace::uniform(40, p, Boundary::LeftClamped).unwrap();
        OperatorSuite::new(ProblemKind::Boundary, space, alpha, ScalarLaw::Arctan, 0.0, j).unwrap()
    }

    #[test]
    fn c_m_for_p_two() {
        // c_j = 0.1 → c_M = 0.1·√2
        let j = PotentialGraph::builtin(PotentialKind::Quadratic).scaled(0.1);
        let l = compute_example_constants(&p1(2.0, 1.0, j), 1.0).unwrap();
        assert!((l.c_j - 0.1).abs() < 1e-15);
        assert!((l.c_m - 0.141421356).abs() < 1e-8);
        // trace constant is 1, inflated by 5%
        assert!((l.gamma_norm - 1.05).abs() < 1e-6);
        assert!(l.verified);
        let h0 = l.smallness();
        assert!(h0.holds);
        // with the unit trace bound the slack is 1 − 0.1414 ≥ 0.858
        assert!(1.0 - l.c_m > 0.858);
        assert!(h0.slack > 0.84);
    }

    #[test]
    fn jump_violates_smallness_at_unit_alpha() {
        let j = PotentialGraph::builtin(PotentialKind::Jump);
        let l = compute_example_constants(&p1(3.0, 1.0, j.clone()), 1.0).unwrap();
        assert!(!l.smallness().holds);
        let l = compute_example_constants(&p1(3.0, 2.0, j), 1.0).unwrap();
        assert!(l.smallness().holds);
    }

    #[test]
    fn domain_gamma_uses_poincare() {
        let space = FemSpace::uniform(100, 2.0, Boundary::BothClamped).unwrap();
        let s = OperatorSuite::new(
            ProblemKind::Domain,
            space,
            1.0,
            ScalarLaw::Identity,
            0.0,
            PotentialGraph::builtin(PotentialKind::Quadratic),
        )
        .unwrap();
        let l = compute_example_constants(&s, 1.0).unwrap();
        let oracle = 1.0 / std::f64::consts::PI;
        assert!((l.gamma_norm / INFLATION - oracle).abs() < 0.01 * oracle);
        assert!((l.beta_c - oracle).abs() < 0.01 * oracle);
        assert_eq!(l.lambda, 0.0);
        assert!(l.to_kv().contains("mu_A = 1\n"));
    }
}
