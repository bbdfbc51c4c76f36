use serde::{Deserialize, Serialize};

use crate::fem1d::FemSpace;
use crate::quadrature::GAUSS5;
use crate::timegrid::TimeGrid;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeProfile {
    Constant,
    /// `a + b t`
    Affine { a: f64, b: f64 },
    /// `cos · cos(ωt) + sin · sin(ωt)`
    Trig { cos: f64, sin: f64, omega: f64 },
}

impl TimeProfile {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Affine { a, b } => a + b * t,
            TimeProfile::Trig { cos, sin, omega } => cos * (omega * t).cos() + sin * (omega * t).sin(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceProfile {
    Constant,
    /// `sin(mode · π x)`
    Sine { mode: f64 },
    /// `x`
    Linear,
}

impl SpaceProfile {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            SpaceProfile::Constant => 1.0,
            SpaceProfile::Sine { mode } => (mode * std::f64::consts::PI * x).sin(),
            SpaceProfile::Linear => x,
        }
    }
}

impl SpaceProfile {
    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            SpaceProfile::Constant => 0.0,
            SpaceProfile::Sine { mode } => {
                let k = mode * std::f64::consts::PI;
                k * (k * x).cos()
            }
            SpaceProfile::Linear => 1.0,
        }
    }
}

/// Initial datum `amplitude · X(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Field {
    pub amplitude: f64,
    pub profile: SpaceProfile,
}

impl Default for Field {
    fn default() -> Self {
        Self { amplitude: 0.0, profile: SpaceProfile::Constant }
    }
}

impl Field {
    pub fn eval(&self, x: f64) -> f64 {
        self.amplitude * self.profile.eval(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.amplitude * self.profile.derivative(x)
    }

    /// Nodal interpolant; fails if the field does not vanish on the clamped ends.
    pub fn interpolate(&self, space: &FemSpace) -> crate::error::Result<Vec<f64>> {
        let nodes = space.nodes();
        for (x, clamped) in nodes.iter().zip(space.dirichlet_mask()) {
            if clamped && self.eval(*x).abs() > 1e-12 {
                return Err(crate::error::Error::Config(format!(
                    "initial datum is {} at the clamped end x = {x}",
                    self.eval(*x)
                )));
            }
        }
        Ok(space.interpolate(|x| self.eval(x)).0)
    }

    /// `‖I_h w − w‖_V` with 5-point Gauss per element.
    pub fn interpolation_error_v(&self, space: &FemSpace) -> crate::error::Result<f64> {
        let v = self.interpolate(space)?;
        let slopes = space.slopes(&v);
        let mut acc = 0.0;
        for (e, w) in space.nodes().windows(2).enumerate() {
            acc += GAUSS5.integrate(w[0], w[1], |x| (slopes[e] - self.derivative(x)).powi(2));
        }
        Ok(acc.sqrt())
    }
}

/// Separable volume load `f(t, x) = amplitude · T(t) · X(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadSpec {
    pub amplitude: f64,
    pub time: TimeProfile,
    pub space: SpaceProfile,
}

impl Default for LoadSpec {
    fn default() -> Self {
        Self { amplitude: 0.0, time: TimeProfile::Constant, space: SpaceProfile::Constant }
    }
}

impl LoadSpec {
    /// `t ↦ (⟨f(t), φ_i⟩)_i` with the spatial pairing assembled once.
    pub fn pairing_fn(&self, space: &FemSpace) -> impl Fn(f64) -> Vec<f64> {
        let shape = self.space;
        let spatial = space.load_pairing(|x| shape.eval(x));
        let amp = self.amplitude;
        let time = self.time;
        move |t| {
            let c = amp * time.eval(t);
            spatial.iter().map(|s| c * s).collect()
        }
    }
}

/// `f^n = τ_{n+½}⁻¹ ∫_{t_{n−½}}^{t_{n+½}} f`, n = 1..N−1, 5-point Gauss on
/// each half interval. Entry `k` holds `f^{k+1}`.
pub fn average_rhs(grid: &TimeGrid, f: &dyn Fn(f64) -> Vec<f64>) -> Vec<Vec<f64>> {
    (1..grid.len())
        .map(|n| {
            let (a, m, b) = (grid.t_half(n - 1), grid.t(n), grid.t_half(n));
            let mut acc: Vec<f64> = Vec::new();
            for (lo, hi) in [(a, m), (m, b)] {
                for &(x, w) in GAUSS5.0 {
                    let fx = f(lo + x * (hi - lo));
                    if acc.is_empty() {
                        acc = vec![0.0; fx.len()];
                    }
                    for (s, y) in acc.iter_mut().zip(&fx) {
                        *s += w * (hi - lo) * y;
                    }
                }
            }
            let th = grid.tau_half(n);
            acc.iter().map(|x| x / th).collect()
        })
        .collect()
}
