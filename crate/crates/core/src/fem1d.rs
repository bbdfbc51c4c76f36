//! Piecewise-linear finite elements on Ω = (0, 1).
//!
//! A [`FemSpace`] carries the mesh, the growth exponent `p` and the Dirichlet
//! structure. Functions are stored by their coefficients on the free nodes
//! ([`FemFunction`]); functionals ("dual coefficients") are stored as their
//! pairings against the free nodal basis functions.
//!
//! Norms on the scale W ⊆ V ⊆ H:
//! * `‖v‖_W = (∫|v'|^p)^{1/p}` and `‖v‖_V = (∫|v'|²)^{1/2}`, exact per element;
//! * `|v|_H` through the exact P1 mass matrix;
//! * `‖v‖_U` either as `L^p(Ω)` (3-point Gauss) or as the endpoint value on Γ₂.

use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, Tridiag};
use crate::quadrature::{GAUSS3, GAUSS5};

/// Which endpoints carry the homogeneous Dirichlet condition (Γ₁).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Γ₁ = {0}, Γ₂ = {1}.
    LeftClamped,
    /// Γ₁ = {1}, Γ₂ = {0}.
    RightClamped,
    /// Γ₁ = {0, 1}, no Γ₂.
    BothClamped,
}

impl Boundary {
    fn clamps(self) -> (usize, usize) {
        match self {
            Boundary::LeftClamped => (1, 0),
            Boundary::RightClamped => (0, 1),
            Boundary::BothClamped => (1, 1),
        }
    }
}

/// Which `U`-norm to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UNorm {
    /// `L^p(Γ₂)`, i.e. `|v(x_Γ₂)|` in 1-D.
    Trace,
    /// `L^p(Ω)`.
    Domain,
}

/// Coefficients of a P1 function on the free nodes of a [`FemSpace`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FemFunction(pub Vec<f64>);

impl Deref for FemFunction {
    type Target = Vec<f64>;
    fn deref(&self) -> &Vec<f64> {
        &self.0
    }
}

impl DerefMut for FemFunction {
    fn deref_mut(&mut self) -> &mut Vec<f64> {
        &mut self.0
    }
}

impl From<Vec<f64>> for FemFunction {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Result of a Rayleigh-type quotient maximisation.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientEstimate {
    pub value: f64,
    pub iterations: usize,
    /// False when the iteration budget ran out before the tolerance was met.
    pub converged: bool,
    pub maximiser: FemFunction,
}

/// Gradient floor keeping the p-Laplacian tangent nondegenerate at flat states.
pub const TANGENT_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct FemSpace {
    nodes: Vec<f64>,
    p: f64,
    boundary: Boundary,
}

impl FemSpace {
    /// Uniform mesh with `m` elements.
    pub fn uniform(m: usize, p: f64, boundary: Boundary) -> Result<Self> {
        if m < 2 {
            return Err(Error::Config(format!("mesh needs at least 2 elements, got {m}")));
        }
        let mut nodes: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
        nodes[m] = 1.0;
        Self::from_nodes(nodes, p, boundary)
    }

    pub fn from_nodes(nodes: Vec<f64>, p: f64, boundary: Boundary) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::Config("mesh needs at least 2 elements".into()));
        }
        if nodes[0] != 0.0 || (nodes[nodes.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(Error::Config("mesh must span [0, 1]".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("mesh nodes must be strictly increasing".into()));
        }
        if !(p >= 2.0 && p.is_finite()) {
            return Err(Error::Config(format!("growth exponent p must be >= 2, got {p}")));
        }
        Ok(Self { nodes, p, boundary })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Conjugate exponent `q = p / (p - 1)`.
    pub fn q(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of elements `M`.
    pub fn elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn element_sizes(&self) -> Vec<f64> {
        self.nodes.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Dimension of the constrained space.
    pub fn dim(&self) -> usize {
        let (a, b) = self.boundary.clamps();
        self.nodes.len() - a - b
    }

    /// Mesh index of the first free node.
    fn offset(&self) -> usize {
        self.boundary.clamps().0
    }

    /// Mask over all mesh nodes, `true` where a Dirichlet condition holds.
    pub fn dirichlet_mask(&self) -> Vec<bool> {
        let (a, b) = self.boundary.clamps();
        let n = self.nodes.len();
        (0..n).map(|i| (a == 1 && i == 0) || (b == 1 && i == n - 1)).collect()
    }

    /// Free-coefficient index of the Γ₂ endpoint, if any.
    pub fn trace_index(&self) -> Option<usize> {
        match self.boundary {
            Boundary::LeftClamped => Some(self.dim() - 1),
            Boundary::RightClamped => Some(0),
            Boundary::BothClamped => None,
        }
    }

    /// Coordinates of the free nodes.
    pub fn free_nodes(&self) -> &[f64] {
        &self.nodes[self.offset()..self.offset() + self.dim()]
    }

    pub fn zero(&self) -> FemFunction {
        FemFunction(vec![0.0; self.dim()])
    }

    /// Nodal values on the full mesh, zeros on Dirichlet nodes.
    pub fn expand(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim(), "coefficient length does not match space");
        let mut full = vec![0.0; self.nodes.len()];
        full[self.offset()..self.offset() + v.len()].copy_from_slice(v);
        full
    }

    /// Drops Dirichlet entries of a full-mesh vector.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        full[self.offset()..self.offset() + self.dim()].to_vec()
    }

    /// Nodal interpolant on the free nodes.
    pub fn interpolate(&self, f: impl Fn(f64) -> f64) -> FemFunction {
        FemFunction(self.free_nodes().iter().map(|&x| f(x)).collect())
    }

    /// Slope of `v` on each element.
    pub fn slopes(&self, v: &[f64]) -> Vec<f64> {
        let full = self.expand(v);
        self.nodes
            .windows(2)
            .zip(full.windows(2))
            .map(|(x, u)| (u[1] - u[0]) / (x[1] - x[0]))
            .collect()
    }

    pub fn value_at(&self, v: &[f64], x: f64) -> f64 {
        let full = self.expand(v);
        let e = self.locate(x);
        let (a, b) = (self.nodes[e], self.nodes[e + 1]);
        let s = (x - a) / (b - a);
        full[e] * (1.0 - s) + full[e + 1] * s
    }

    fn locate(&self, x: f64) -> usize {
        let m = self.elements();
        match self.nodes.binary_search_by(|n| n.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(m - 1),
            Err(i) => i.saturating_sub(1).min(m - 1),
        }
    }

    fn mass_full(&self) -> Tridiag {
        let mut t = Tridiag::zeros(self.nodes.len());
        for (e, h) in self.element_sizes().into_iter().enumerate() {
            t.add_block(e, h / 3.0, h / 6.0);
        }
        t
    }

    fn stiffness_full(&self) -> Tridiag {
        let mut t = Tridiag::zeros(self.nodes.len());
        for (e, h) in self.element_sizes().into_iter().enumerate() {
            t.add_block(e, 1.0 / h, -1.0 / h);
        }
        t
    }

    fn trim(&self, t: &Tridiag) -> Tridiag {
        let (a, b) = self.boundary.clamps();
        t.trim(a, b)
    }

    /// Consistent P1 mass matrix on the constrained space.
    pub fn mass(&self) -> Tridiag {
        self.trim(&self.mass_full())
    }

    /// P1 stiffness matrix on the constrained space.
    pub fn stiffness(&self) -> Tridiag {
        self.trim(&self.stiffness_full())
    }

    /// Row sums of the mass matrix (trapezoidal weights) on the free nodes.
    pub fn lumped_mass(&self) -> Vec<f64> {
        let h = self.element_sizes();
        let n = self.nodes.len();
        let full: Vec<f64> = (0..n)
            .map(|i| {
                let left = if i > 0 { h[i - 1] } else { 0.0 };
                let right = if i + 1 < n { h[i] } else { 0.0 };
                0.5 * (left + right)
            })
            .collect();
        self.restrict(&full)
    }

    pub fn norm_w(&self, v: &[f64]) -> f64 {
        self.gradient_norm(v, self.p)
    }

    pub fn norm_v(&self, v: &[f64]) -> f64 {
        self.gradient_norm(v, 2.0)
    }

    fn gradient_norm(&self, v: &[f64], r: f64) -> f64 {
        self.slopes(v)
            .iter()
            .zip(self.element_sizes())
            .map(|(s, h)| h * s.abs().powf(r))
            .sum::<f64>()
            .powf(1.0 / r)
    }

    pub fn norm_h(&self, v: &[f64]) -> f64 {
        dot(v, &self.mass().mul_vec(v)).max(0.0).sqrt()
    }

    pub fn norm_u(&self, v: &[f64], which: UNorm) -> f64 {
        match which {
            UNorm::Trace => self.trace_index().map_or(0.0, |i| v[i].abs()),
            UNorm::Domain => {
                let p = self.p;
                self.integrate_nodal(v, |u| u.abs().powf(p)).powf(1.0 / p)
            }
        }
    }

    /// `∫_Ω f(v(x)) dx` with 3-point Gauss per element.
    pub fn integrate_nodal(&self, v: &[f64], f: impl Fn(f64) -> f64) -> f64 {
        let full = self.expand(v);
        let mut acc = 0.0;
        for e in 0..self.elements() {
            let (a, b) = (self.nodes[e], self.nodes[e + 1]);
            let (ua, ub) = (full[e], full[e + 1]);
            acc += GAUSS3.integrate(0.0, 1.0, |s| f(ua + s * (ub - ua))) * (b - a);
        }
        acc
    }

    /// Pairings `∫ f(v(x)) φ_i(x) dx` against the free basis, 3-point Gauss.
    pub fn nonlinear_pairing(&self, v: &[f64], f: impl Fn(f64) -> f64) -> Vec<f64> {
        let full = self.expand(v);
        let mut out = vec![0.0; self.nodes.len()];
        for e in 0..self.elements() {
            let h = self.nodes[e + 1] - self.nodes[e];
            let (ua, ub) = (full[e], full[e + 1]);
            for &(s, w) in GAUSS3.0 {
                let val = f(ua + s * (ub - ua)) * w * h;
                out[e] += val * (1.0 - s);
                out[e + 1] += val * s;
            }
        }
        self.restrict(&out)
    }

    /// Tangent `∫ df(v) φ_i φ_j dx` of [`Self::nonlinear_pairing`].
    pub fn nonlinear_tangent(&self, v: &[f64], df: impl Fn(f64) -> f64) -> Tridiag {
        let full = self.expand(v);
        let mut t = Tridiag::zeros(self.nodes.len());
        for e in 0..self.elements() {
            let h = self.nodes[e + 1] - self.nodes[e];
            let (ua, ub) = (full[e], full[e + 1]);
            for &(s, w) in GAUSS3.0 {
                let d = df(ua + s * (ub - ua)) * w * h;
                t.diag[e] += d * (1.0 - s) * (1.0 - s);
                t.diag[e + 1] += d * s * s;
                t.upper[e] += d * s * (1.0 - s);
                t.lower[e] += d * s * (1.0 - s);
            }
        }
        self.trim(&t)
    }

    /// Pairings `∫ f(x) φ_i(x) dx` of a spatial load, 5-point Gauss.
    pub fn load_pairing(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.nodes.len()];
        for e in 0..self.elements() {
            let (a, b) = (self.nodes[e], self.nodes[e + 1]);
            let h = b - a;
            for &(s, w) in GAUSS5.0 {
                let val = f(a + s * h) * w * h;
                out[e] += val * (1.0 - s);
                out[e + 1] += val * s;
            }
        }
        self.restrict(&out)
    }

    /// Pairings of `α (|v'|^{p-2} v', φ_i')`.
    pub fn p_laplace_pairing(&self, v: &[f64], alpha: f64) -> Vec<f64> {
        let p = self.p;
        let mut out = vec![0.0; self.nodes.len()];
        for (e, s) in self.slopes(v).into_iter().enumerate() {
            let flux = alpha * s.abs().powf(p - 2.0) * s;
            out[e] -= flux;
            out[e + 1] += flux;
        }
        self.restrict(&out)
    }

    /// Tangent of the p-Laplacian with the gradient floor [`TANGENT_FLOOR`].
    pub fn p_laplace_tangent(&self, v: &[f64], alpha: f64) -> Tridiag {
        let p = self.p;
        let mut t = Tridiag::zeros(self.nodes.len());
        for (e, (s, h)) in self.slopes(v).into_iter().zip(self.element_sizes()).enumerate() {
            let w = if p == 2.0 {
                1.0
            } else {
                (p - 1.0) * s.abs().powf(p - 2.0).max(TANGENT_FLOOR)
            };
            let k = alpha * w / h;
            t.add_block(e, k, -k);
        }
        self.trim(&t)
    }

    /// H¹-Riesz norm of a functional: `sqrt(R·K⁻¹R)`.
    ///
    /// Surrogate for the `W*` norm; exact for `p = 2`.
    pub fn dual_norm_surrogate(&self, residual: &[f64]) -> Result<f64> {
        let z = self
            .stiffness()
            .solve(residual)
            .map_err(|e| Error::Config(format!("stiffness not invertible: {e}")))?;
        Ok(dot(&z, residual).max(0.0).sqrt())
    }

    /// Exact discrete `W*` norm `sup ⟨R, w⟩ / ‖w‖_W`.
    ///
    /// The p-Laplacian is the duality map of `‖·‖_W` with gauge `t^{p-1}`,
    /// so the norm equals `‖z‖_W^{p-1}` where `−Δ_p z = R`.
    pub fn dual_norm_exact(&self, residual: &[f64]) -> Result<f64> {
        let z = self.solve_p_laplace(residual, 1.0)?;
        Ok(self.norm_w(&z).powf(self.p - 1.0))
    }

    /// Solves `α(−Δ_p) z = b` by Newton's method on the convex energy.
    pub fn solve_p_laplace(&self, b: &[f64], alpha: f64) -> Result<Vec<f64>> {
        let stiff = self.stiffness().scaled(alpha);
        let z0 = stiff.solve(b)?;
        if self.p == 2.0 {
            return Ok(z0);
        }
        let p = self.p;
        let energy = |z: &[f64]| {
            let h = self.element_sizes();
            let e: f64 = self
                .slopes(z)
                .iter()
                .zip(&h)
                .map(|(s, h)| h * s.abs().powf(p))
                .sum();
            alpha * e / p - dot(b, z)
        };
        let bnorm = self.dual_norm_surrogate(b)?;
        if bnorm == 0.0 {
            return Ok(vec![0.0; b.len()]);
        }
        // scale the linear solution so that ⟨A(c z0), z0⟩ = ⟨b, z0⟩
        let w0 = alpha * self.norm_w(&z0).powf(p);
        let bz = dot(b, &z0);
        let c = if w0 > 0.0 && bz > 0.0 { (bz / w0).powf(1.0 / (p - 1.0)) } else { 1.0 };
        let mut z: Vec<f64> = z0.iter().map(|x| c * x).collect();
        let mut e = energy(&z);
        for _ in 0..200 {
            let grad = crate::linalg::sub(&self.p_laplace_pairing(&z, alpha), b);
            let gnorm = self.dual_norm_surrogate(&grad)?;
            if gnorm <= 1e-13 * bnorm {
                return Ok(z);
            }
            let tangent = self.p_laplace_tangent(&z, alpha);
            let d = tangent.solve(&grad)?;
            let slope = -dot(&grad, &d);
            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let trial = crate::linalg::axpy(&z, -step, &d);
                let et = energy(&trial);
                if et <= e + 1e-4 * step * slope {
                    z = trial;
                    e = et;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                // energy stagnates at round-off level
                return Ok(z);
            }
        }
        Ok(z)
    }

    /// Maximises `N(v) / ‖v‖_W^p` by nonlinear inverse iteration.
    ///
    /// `numerator` returns `N(v)` together with `∇N(v) / p` as pairings;
    /// `N` must be positively homogeneous of degree `p`.
    pub fn maximize_quotient(
        &self,
        start: &[f64],
        numerator: impl Fn(&[f64]) -> (f64, Vec<f64>),
        tol: f64,
        budget: usize,
    ) -> Result<QuotientEstimate> {
        let p = self.p;
        let nw = self.norm_w(start);
        if nw == 0.0 {
            return Err(Error::Config("quotient start vector must be nonzero".into()));
        }
        let mut v: Vec<f64> = start.iter().map(|x| x / nw).collect();
        let mut value = numerator(&v).0;
        for it in 1..=budget {
            let (_, grad) = numerator(&v);
            let w = self.solve_p_laplace(&grad, 1.0)?;
            let nw = self.norm_w(&w);
            if nw == 0.0 {
                return Err(Error::Singular("quotient iteration collapsed to zero".into()));
            }
            v = w.iter().map(|x| x / nw).collect();
            let next = numerator(&v).0 / self.norm_w(&v).powf(p);
            let change = (next - value).abs() / next.abs().max(f64::MIN_POSITIVE);
            value = next;
            if change < tol {
                return Ok(QuotientEstimate { value, iterations: it, converged: true, maximiser: FemFunction(v) });
            }
        }
        Ok(QuotientEstimate { value, iterations: budget, converged: false, maximiser: FemFunction(v) })
    }

    /// Best constant `c̃` in `∫|v|^p ≤ c̃ ∫|v'|^p` over this space.
    pub fn poincare_constant(&self) -> Result<QuotientEstimate> {
        let start = self.interpolate(|x| match self.boundary {
            Boundary::LeftClamped => x * (2.0 - x),
            Boundary::RightClamped => (1.0 - x) * (1.0 + x),
            Boundary::BothClamped => x * (1.0 - x),
        });
        self.poincare_constant_from(&start)
    }

    pub fn poincare_constant_from(&self, start: &[f64]) -> Result<QuotientEstimate> {
        let p = self.p;
        self.maximize_quotient(
            start,
            |v| {
                let n = self.integrate_nodal(v, |u| u.abs().powf(p));
                let g = self.nonlinear_pairing(v, |u| u.abs().powf(p - 2.0) * u);
                (n, g)
            },
            1e-10,
            2000,
        )
    }

    /// Best constant in `|v(x_Γ₂)| ≤ c ‖v‖_W`, i.e. `‖γ‖_{L(W,U)}` for the trace.
    pub fn trace_constant(&self) -> Result<QuotientEstimate> {
        let idx = self
            .trace_index()
            .ok_or_else(|| Error::Config("space has no Γ₂ endpoint".into()))?;
        let p = self.p;
        let start = self.interpolate(|x| match self.boundary {
            Boundary::RightClamped => 1.0 - x,
            _ => x,
        });
        let est = self.maximize_quotient(
            &start,
            |v| {
                let s = v[idx];
                let mut g = vec![0.0; v.len()];
                g[idx] = s.abs().powf(p - 2.0) * s;
                (s.abs().powf(p), g)
            },
            1e-12,
            200,
        )?;
        Ok(QuotientEstimate { value: est.value.powf(1.0 / p), ..est })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn hat(p: f64) -> (FemSpace, FemFunction) {
        let s = FemSpace::uniform(2, p, Boundary::BothClamped).unwrap();
        (s, FemFunction(vec![1.0]))
    }

    #[test]
    fn zero_function_has_zero_norms() {
        let s = FemSpace::uniform(7, 3.0, Boundary::LeftClamped).unwrap();
        let z = s.zero();
        assert_eq!(s.norm_w(&z), 0.0);
        assert_eq!(s.norm_h(&z), 0.0);
        assert_eq!(s.norm_u(&z, UNorm::Domain), 0.0);
    }

    #[test]
    fn hat_function_norms() {
        // slopes ±2 on two elements of size 1/2: ∫|v'|^3 = 8·0.5 + 8·0.5 = 8
        let (s, v) = hat(3.0);
        assert!((s.norm_w(&v) - 2.0).abs() < 1e-14);
        let (s, v) = hat(2.0);
        assert!((s.norm_v(&v) - 2.0).abs() < 1e-14);
        assert!((s.norm_h(&v) - (1.0f64 / 3.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn ramp_and_trace() {
        let s = FemSpace::uniform(10, 2.0, Boundary::LeftClamped).unwrap();
        let ramp = s.interpolate(|x| x);
        assert!((s.norm_v(&ramp) - 1.0).abs() < 1e-13);
        let one = s.interpolate(|_| 1.0);
        assert_eq!(s.norm_u(&one, UNorm::Trace), 1.0);
        assert_eq!(s.dim(), 10);
        assert_eq!(s.dirichlet_mask().iter().filter(|m| **m).count(), 1);
        let r = FemSpace::uniform(10, 2.0, Boundary::RightClamped).unwrap();
        assert_eq!(r.trace_index(), Some(0));
        assert_eq!(r.free_nodes()[0], 0.0);
    }

    #[test]
    fn domain_u_norm_of_ramp() {
        // ∫ x^4 = 1/5, exact under 3-point Gauss
        let s = FemSpace::uniform(5, 4.0, Boundary::LeftClamped).unwrap();
        let ramp = s.interpolate(|x| x);
        assert!((s.norm_u(&ramp, UNorm::Domain) - 0.2f64.powf(0.25)).abs() < 1e-14);
    }

    #[test]
    fn dual_surrogate_examples() {
        let (s, _) = hat(2.0);
        assert_eq!(s.dual_norm_surrogate(&[0.0]).unwrap(), 0.0);
        assert!((s.dual_norm_surrogate(&[1.0]).unwrap() - 0.5).abs() < 1e-15);
        let s = FemSpace::uniform(9, 3.0, Boundary::BothClamped).unwrap();
        let v = s.interpolate(|x| (PI * x).sin() + x * x - x);
        let r = s.stiffness().mul_vec(&v);
        assert!((s.dual_norm_surrogate(&r).unwrap() - s.norm_v(&v)).abs() < 1e-12);
    }

    #[test]
    fn exact_dual_norm_of_p_laplacian_image() {
        // ‖A_p v‖_{W*} = ‖v‖_W^{p-1}
        let s = FemSpace::uniform(20, 3.0, Boundary::BothClamped).unwrap();
        let v = s.interpolate(|x| (PI * x).sin() + 0.3 * (3.0 * PI * x).sin());
        let r = s.p_laplace_pairing(&v, 1.0);
        let exact = s.norm_w(&v).powf(2.0);
        assert!((s.dual_norm_exact(&r).unwrap() - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn poincare_oracles() {
        let both = FemSpace::uniform(200, 2.0, Boundary::BothClamped).unwrap();
        let est = both.poincare_constant().unwrap();
        assert!(est.converged);
        assert!((est.value / (1.0 / (PI * PI)) - 1.0).abs() < 0.02);
        let left = FemSpace::uniform(200, 2.0, Boundary::LeftClamped).unwrap();
        let est = left.poincare_constant().unwrap();
        assert!((est.value / (4.0 / (PI * PI)) - 1.0).abs() < 0.02);
        let start = left.interpolate(|x| x * (2.0 - x));
        let doubled: Vec<f64> = start.iter().map(|x| 2.0 * x).collect();
        let a = left.poincare_constant_from(&start).unwrap().value;
        let b = left.poincare_constant_from(&doubled).unwrap().value;
        assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn poincare_for_p_three_is_consistent() {
        let s = FemSpace::uniform(80, 3.0, Boundary::BothClamped).unwrap();
        let est = s.poincare_constant().unwrap();
        assert!(est.converged);
        let v = &est.maximiser;
        let ratio = s.norm_u(v, UNorm::Domain).powf(3.0) / s.norm_w(v).powf(3.0);
        assert!((ratio - est.value).abs() < 1e-10);
        // the sine is admissible, so the best constant dominates its quotient
        let sine = s.interpolate(|x| (PI * x).sin());
        let q = s.norm_u(&sine, UNorm::Domain).powf(3.0) / s.norm_w(&sine).powf(3.0);
        assert!(est.value >= q * (1.0 - 1e-9));
    }

    #[test]
    fn trace_constant_is_one_on_unit_interval() {
        // |v(1)| = |∫ v'| ≤ ‖v'‖_{L^p}, equality for the ramp
        for p in [2.0, 3.0] {
            let s = FemSpace::uniform(40, p, Boundary::LeftClamped).unwrap();
            let est = s.trace_constant().unwrap();
            assert!((est.value - 1.0).abs() < 1e-9, "p = {p}: {}", est.value);
        }
    }

    #[test]
    fn p_laplace_solve_roundtrip() {
        let s = FemSpace::uniform(30, 3.5, Boundary::LeftClamped).unwrap();
        let v = s.interpolate(|x| x.sin() - 0.4 * x * x);
        let b = s.p_laplace_pairing(&v, 2.0);
        let z = s.solve_p_laplace(&b, 2.0).unwrap();
        for (a, b) in v.iter().zip(&z) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    fn arb_coeffs(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-5.0f64..5.0, n)
    }

    proptest! {
        #[test]
        fn norms_are_homogeneous(v in arb_coeffs(11), a in -4.0f64..4.0) {
            let s = FemSpace::uniform(12, 3.0, Boundary::BothClamped).unwrap();
            let av: Vec<f64> = v.iter().map(|x| a * x).collect();
            let tol = |x: f64| 1e-12 * x.max(1.0);
            prop_assert!((s.norm_w(&av) - a.abs() * s.norm_w(&v)).abs() <= tol(s.norm_w(&av)));
            prop_assert!((s.norm_v(&av) - a.abs() * s.norm_v(&v)).abs() <= tol(s.norm_v(&av)));
            prop_assert!((s.norm_h(&av) - a.abs() * s.norm_h(&v)).abs() <= tol(s.norm_h(&av)));
            let u = s.norm_u(&av, UNorm::Domain);
            prop_assert!((u - a.abs() * s.norm_u(&v, UNorm::Domain)).abs() <= tol(u));
        }

        #[test]
        fn gram_matrices_are_positive_definite(v in arb_coeffs(12)) {
            let s = FemSpace::uniform(12, 2.0, Boundary::LeftClamped).unwrap();
            let (m, k) = (s.mass(), s.stiffness());
            prop_assert_eq!(&m.upper, &m.lower);
            prop_assert_eq!(&k.upper, &k.lower);
            let nz = v.iter().any(|x| *x != 0.0);
            prop_assert!(dot(&v, &m.mul_vec(&v)) >= 0.0);
            if nz {
                prop_assert!(dot(&v, &m.mul_vec(&v)) > 0.0);
                prop_assert!(dot(&v, &k.mul_vec(&v)) > 0.0);
            }
        }
    }

    #[test]
    fn poincare_bounds_h_norm() {
        use rand::{Rng, SeedableRng};
        let s = FemSpace::uniform(50, 2.0, Boundary::BothClamped).unwrap();
        let c = s.poincare_constant().unwrap().value;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let v: Vec<f64> = (0..s.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!(s.norm_h(&v) <= c.sqrt() * s.norm_v(&v) * (1.0 + 1e-9));
        }
    }
}
