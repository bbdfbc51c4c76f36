//! The operator suite `A`, `B = B₀ + C`, `γ` and `M = ∂J` of the two model
//! problems, discretised on a [`FemSpace`].
//!
//! * `⟨A v, w⟩ = α ∫ |v'|^{p−2} v' w' + ∫ g(v) w`
//! * `⟨B₀ u, w⟩ = ∫ u' w'`, `⟨C u, w⟩ = ∫ |u|^δ u w`
//! * [`ProblemKind::Boundary`]: `γ` is the trace on Γ₂ and `J(w) = j(w(x_Γ₂))`.
//! * [`ProblemKind::Domain`]: `γ` is the embedding into `L^p(Ω)` and
//!   `J(w) = ∫ j(w)`, evaluated with nodal (trapezoidal) quadrature so that
//!   selections live on the mesh nodes.
//!
//! All operators are autonomous; the time argument is accepted for the
//! abstract interface and ignored.

mod audit;
mod laws;
mod ledger;
mod potential;

pub use audit::{audit_hypotheses, AuditCheck, AuditReport};
pub use laws::ScalarLaw;
pub use ledger::{compute_example_constants, CModulus, ConstantsLedger, SmallnessReport};
pub use potential::{AffinePiece, PotentialGraph, PotentialKind};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem1d::{Boundary, FemSpace};
use crate::linalg::{add, Tridiag};

/// Where the multivalued term acts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProblemKind {
    /// Clarke term in the boundary condition on Γ₂.
    #[serde(rename = "P1")]
    Boundary,
    /// Clarke term as a source in Ω, homogeneous Dirichlet data on ∂Ω.
    #[serde(rename = "P2")]
    Domain,
}

/// `B(t, u)` split into its linear and nonlinear parts.
#[derive(Clone, Debug, PartialEq)]
pub struct BPairing {
    pub b0: Vec<f64>,
    pub c: Vec<f64>,
}

impl BPairing {
    pub fn total(&self) -> Vec<f64> {
        add(&self.b0, &self.c)
    }
}

#[derive(Clone, Debug)]
pub struct OperatorSuite {
    pub kind: ProblemKind,
    pub space: FemSpace,
    pub alpha: f64,
    pub g: ScalarLaw,
    pub delta: f64,
    pub potential: PotentialGraph,
}

impl OperatorSuite {
    pub fn new(
        kind: ProblemKind,
        space: FemSpace,
        alpha: f64,
        g: ScalarLaw,
        delta: f64,
        potential: PotentialGraph,
    ) -> Result<Self> {
        let p = space.p();
        match (kind, space.boundary()) {
            (ProblemKind::Boundary, Boundary::BothClamped) => {
                return Err(Error::Config("boundary problem needs a free endpoint Γ₂".into()))
            }
            (ProblemKind::Domain, b) if b != Boundary::BothClamped => {
                return Err(Error::Config("domain problem needs Dirichlet data at both ends".into()))
            }
            _ => {}
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be positive, got {alpha}")));
        }
        if !(0.0..=1.0 - 2.0 / p).contains(&delta) {
            return Err(Error::Config(format!(
                "delta must lie in [0, 1 - 2/p] = [0, {}], got {delta}",
                1.0 - 2.0 / p
            )));
        }
        g.validate(p)?;
        Ok(Self { kind, space, alpha, g, delta, potential })
    }

    pub fn p(&self) -> f64 {
        self.space.p()
    }

    /// Pairings `⟨A(t, v), φ_i⟩`.
    pub fn apply_a(&self, _t: f64, v: &[f64]) -> Vec<f64> {
        let g = self.g;
        add(
            &self.space.p_laplace_pairing(v, self.alpha),
            &self.space.nonlinear_pairing(v, |s| g.value(s)),
        )
    }

    /// Principal part `α(−Δ_p)` alone.
    pub fn apply_a_principal(&self, v: &[f64]) -> Vec<f64> {
        self.space.p_laplace_pairing(v, self.alpha)
    }

    /// Tangent of `A` at `v`.
    pub fn tangent_a(&self, v: &[f64]) -> Tridiag {
        let g = self.g;
        self.space
            .p_laplace_tangent(v, self.alpha)
            .add(&self.space.nonlinear_tangent(v, |s| g.derivative(s)))
    }

    /// Pairings `⟨B(t, u), φ_i⟩ = ⟨B₀u, φ_i⟩ + ⟨C(t, u), φ_i⟩`.
    pub fn apply_b(&self, _t: f64, u: &[f64]) -> BPairing {
        let delta = self.delta;
        BPairing {
            b0: self.space.stiffness().mul_vec(u),
            c: self.space.nonlinear_pairing(u, |s| c_law(s, delta)),
        }
    }

    /// Tangent of `C` at `u` (used by derivative checks only).
    pub fn tangent_c(&self, u: &[f64]) -> Tridiag {
        let delta = self.delta;
        self.space.nonlinear_tangent(u, |s| (delta + 1.0) * s.abs().powf(delta))
    }

    /// Points where the selection is evaluated: `γv`.
    pub fn gamma(&self, v: &[f64]) -> Vec<f64> {
        match self.kind {
            ProblemKind::Boundary => vec![v[self.space.trace_index().expect("trace endpoint")]],
            ProblemKind::Domain => v.to_vec(),
        }
    }

    /// Quadrature weights linking selection values to pairings.
    pub fn selection_weights(&self) -> Vec<f64> {
        match self.kind {
            ProblemKind::Boundary => vec![1.0],
            ProblemKind::Domain => self.space.lumped_mass(),
        }
    }

    /// Pairings `⟨γ*η, φ_i⟩`.
    pub fn gamma_star(&self, eta: &[f64]) -> Vec<f64> {
        let n = self.space.dim();
        match self.kind {
            ProblemKind::Boundary => {
                let mut out = vec![0.0; n];
                out[self.space.trace_index().expect("trace endpoint")] = eta[0];
                out
            }
            ProblemKind::Domain => self
                .selection_weights()
                .iter()
                .zip(eta)
                .map(|(m, e)| m * e)
                .collect(),
        }
    }

    /// Diagonal of `γ* diag(d) γ`.
    pub fn gamma_star_diag(&self, d: &[f64]) -> Vec<f64> {
        self.gamma_star(d)
    }

    /// `‖γ v‖_U`, with the same nodal quadrature as the selection.
    pub fn u_norm(&self, w: &[f64]) -> f64 {
        self.weighted_norm(w, self.p())
    }

    /// `‖η‖_{U*}`: `|η|` on Γ₂ or the nodal `L^q(Ω)` norm.
    pub fn u_dual_norm(&self, eta: &[f64]) -> f64 {
        self.weighted_norm(eta, self.space.q())
    }

    fn weighted_norm(&self, w: &[f64], r: f64) -> f64 {
        self.selection_weights()
            .iter()
            .zip(w)
            .map(|(m, x)| m * x.abs().powf(r))
            .sum::<f64>()
            .powf(1.0 / r)
    }

    /// Regularized selections `ρ_ε(γv)`.
    pub fn regularized_selection(&self, v: &[f64], eps: f64) -> Vec<f64> {
        self.gamma(v)
            .into_iter()
            .map(|s| self.potential.regularized_selection(s, eps))
            .collect()
    }

    /// Measure of the set carrying `U` (|Γ₂| or |Ω|).
    pub fn u_measure(&self) -> f64 {
        1.0
    }
}

/// `|s|^δ s` with the convention `|0|⁰·0 = 0`.
pub fn c_law(s: f64, delta: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s.abs().powf(delta) * s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dot, sub};
    use rand::{Rng, SeedableRng};

    fn suite(kind: ProblemKind, p: f64, g: ScalarLaw, delta: f64) -> OperatorSuite {
        let b = match kind {
            ProblemKind::Boundary => Boundary::LeftClamped,
            ProblemKind::Domain => Boundary::BothClamped,
        };
        let space = FemSpace::uniform(16, p, b).unwrap();
        OperatorSuite::new(kind, space, 1.0, g, delta, PotentialGraph::builtin(PotentialKind::Quadratic)).unwrap()
    }

    #[test]
    fn zero_maps_to_zero() {
        let s = suite(ProblemKind::Domain, 3.0, ScalarLaw::Arctan, 0.2);
        let z = s.space.zero();
        assert!(s.apply_a(0.0, &z).iter().all(|x| *x == 0.0));
        assert!(s.apply_b(0.0, &z).total().iter().all(|x| *x == 0.0));
    }

    #[test]
    fn p_two_without_g_is_stiffness() {
        let s = suite(ProblemKind::Domain, 2.0, ScalarLaw::Zero, 0.0);
        let v = s.space.interpolate(|x| x * (1.0 - x) * (3.0 * x).cos());
        let a = s.apply_a(0.0, &v);
        let k = s.space.stiffness().mul_vec(&v);
        for (x, y) in a.iter().zip(&k) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn ramp_pairings() {
        // ⟨Av, v⟩ = ∫|1|³ = 1 and ⟨Bu, u⟩ = ∫1 + ∫x² = 4/3
        let s = suite(ProblemKind::Boundary, 3.0, ScalarLaw::Zero, 0.0);
        let ramp = s.space.interpolate(|x| x);
        assert!((dot(&s.apply_a(0.0, &ramp), &ramp) - 1.0).abs() < 1e-13);
        assert!((s.space.norm_w(&ramp).powf(3.0) - 1.0).abs() < 1e-13);
        let b = s.apply_b(0.0, &ramp);
        assert!((dot(&b.total(), &ramp) - 4.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn delta_zero_c_is_mass() {
        let s = suite(ProblemKind::Domain, 2.0, ScalarLaw::Zero, 0.0);
        let u = s.space.interpolate(|x| (x - 0.3) * (1.0 - x));
        let c = s.apply_b(0.0, &u).c;
        let m = s.space.mass().mul_vec(&u);
        for (x, y) in c.iter().zip(&m) {
            assert!((x - y).abs() < 1e-14);
        }
        assert_eq!(c_law(0.0, 0.0), 0.0);
    }

    #[test]
    fn tangents_match_central_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for (p, g, delta) in [
            (2.0, ScalarLaw::Identity, 0.0),
            (3.0, ScalarLaw::Arctan, 0.25),
            (4.0, ScalarLaw::Power { coeff: 0.5, exponent: 2.0 }, 0.5),
        ] {
            let s = suite(ProblemKind::Domain, p, g, delta);
            let n = s.space.dim();
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let h = 1e-6;
            let fd = |f: &dyn Fn(&[f64]) -> Vec<f64>| {
                let plus = f(&crate::linalg::axpy(&v, h, &d));
                let minus = f(&crate::linalg::axpy(&v, -h, &d));
                sub(&plus, &minus).iter().map(|x| x / (2.0 * h)).collect::<Vec<f64>>()
            };
            let fa = fd(&|x| s.apply_a(0.0, x));
            let ja = s.tangent_a(&v).mul_vec(&d);
            let fc = fd(&|x| s.apply_b(0.0, x).c);
            let jc = s.tangent_c(&v).mul_vec(&d);
            let rel = |a: &[f64], b: &[f64]| {
                let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
                diff / scale
            };
            assert!(rel(&fa, &ja) < 1e-6, "A tangent p = {p}: {}", rel(&fa, &ja));
            assert!(rel(&fc, &jc) < 1e-6, "C tangent p = {p}: {}", rel(&fc, &jc));
        }
    }

    #[test]
    fn gamma_star_is_adjoint_of_gamma() {
        for kind in [ProblemKind::Boundary, ProblemKind::Domain] {
            let s = suite(kind, 2.0, ScalarLaw::Zero, 0.0);
            let v = s.space.interpolate(|x| x.sin());
            let eta: Vec<f64> = s.gamma(&v).iter().map(|x| 2.0 * x - 1.0).collect();
            let lhs = dot(&s.gamma_star(&eta), &v);
            let rhs: f64 = s
                .selection_weights()
                .iter()
                .zip(eta.iter().zip(s.gamma(&v)))
                .map(|(m, (e, w))| m * e * w)
                .sum();
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn kind_and_boundary_must_agree() {
        let both = FemSpace::uniform(4, 2.0, Boundary::BothClamped).unwrap();
        let quad = PotentialGraph::builtin(PotentialKind::Quadratic);
        assert!(OperatorSuite::new(ProblemKind::Boundary, both.clone(), 1.0, ScalarLaw::Zero, 0.0, quad.clone()).is_err());
        assert!(OperatorSuite::new(ProblemKind::Domain, both.clone(), 1.0, ScalarLaw::Zero, 0.5, quad.clone()).is_err());
        assert!(OperatorSuite::new(ProblemKind::Domain, both, 0.0, ScalarLaw::Zero, 0.0, quad).is_err());
    }
}
