//! Functions of time built on the half grid `0, t_½, …, t_{N−½}, T`.

use crate::error::{Error, Result};
use crate::quadrature::{GAUSS3, GAUSS5};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InterpolantKind {
    /// One value per interval; intervals are `[b_0, b_1]` then `(b_{i}, b_{i+1}]`.
    PiecewiseConstant,
    /// One value per breakpoint, linear in between.
    PiecewiseLinear,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interpolant {
    breakpoints: Vec<f64>,
    kind: InterpolantKind,
    values: Vec<Vec<f64>>,
}

impl Interpolant {
    pub fn new(breakpoints: Vec<f64>, kind: InterpolantKind, values: Vec<Vec<f64>>) -> Result<Self> {
        if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidGrid("interpolant breakpoints must be strictly increasing".into()));
        }
        let expected = match kind {
            InterpolantKind::PiecewiseConstant => breakpoints.len() - 1,
            InterpolantKind::PiecewiseLinear => breakpoints.len(),
        };
        if values.len() != expected {
            return Err(Error::InvalidGrid(format!("expected {expected} values, got {}", values.len())));
        }
        let dim = values[0].len();
        if values.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidGrid("interpolant values differ in length".into()));
        }
        Ok(Self { breakpoints, kind, values })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn kind(&self) -> InterpolantKind {
        self.kind
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn start(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn end(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Index `i` of the interval containing `t`, right-closed except the first.
    fn interval(&self, t: f64) -> usize {
        let k = self.breakpoints.partition_point(|b| *b < t);
        k.saturating_sub(1).min(self.breakpoints.len() - 2)
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let i = self.interval(t);
        match self.kind {
            InterpolantKind::PiecewiseConstant => self.values[i].clone(),
            InterpolantKind::PiecewiseLinear => {
                let (a, b) = (self.breakpoints[i], self.breakpoints[i + 1]);
                let s = ((t - a) / (b - a)).clamp(0.0, 1.0);
                self.values[i].iter().zip(&self.values[i + 1]).map(|(x, y)| x + s * (y - x)).collect()
            }
        }
    }

    /// Time derivative on the interior of interval `i` (zero for constants).
    pub fn derivative_on(&self, i: usize) -> Vec<f64> {
        match self.kind {
            InterpolantKind::PiecewiseConstant => vec![0.0; self.dim()],
            InterpolantKind::PiecewiseLinear => {
                let h = self.breakpoints[i + 1] - self.breakpoints[i];
                self.values[i].iter().zip(&self.values[i + 1]).map(|(x, y)| (y - x) / h).collect()
            }
        }
    }

    /// `(∫ ‖w(t)‖^r dt)^{1/r}` with 5-point Gauss per interval.
    pub fn bochner_norm(&self, r: f64, norm: &dyn Fn(&[f64]) -> f64) -> f64 {
        let mut acc = 0.0;
        for w in self.breakpoints.windows(2) {
            acc += GAUSS5.integrate(w[0], w[1], |t| norm(&self.eval(t)).powf(r));
        }
        acc.powf(1.0 / r)
    }

    /// Pointwise `self + s · other` on the union of both breakpoint sets.
    pub fn combine(&self, s: f64, other: &Interpolant) -> Result<Interpolant> {
        let union = union_breakpoints(&self.breakpoints, &other.breakpoints)?;
        let both_constant =
            self.kind == InterpolantKind::PiecewiseConstant && other.kind == InterpolantKind::PiecewiseConstant;
        let mix = |t: f64| -> Vec<f64> {
            let a = self.eval(t);
            let b = other.eval(t);
            a.iter().zip(&b).map(|(x, y)| x + s * y).collect()
        };
        if both_constant {
            let values = union.windows(2).map(|w| mix(0.5 * (w[0] + w[1]))).collect();
            Interpolant::new(union, InterpolantKind::PiecewiseConstant, values)
        } else if self.kind == InterpolantKind::PiecewiseLinear && other.kind == InterpolantKind::PiecewiseLinear {
            let values = union.iter().map(|&t| mix(t)).collect();
            Interpolant::new(union, InterpolantKind::PiecewiseLinear, values)
        } else {
            Err(Error::Config("cannot combine constant and linear interpolants into one kind".into()))
        }
    }

    /// Antiderivative `(Kw)(t) = ∫_0^t w` as a piecewise-linear interpolant.
    pub fn antiderivative(&self) -> Result<Interpolant> {
        if self.kind != InterpolantKind::PiecewiseConstant {
            return Err(Error::Config("K is applied to piecewise-constant interpolants".into()));
        }
        let mut acc = vec![0.0; self.dim()];
        let mut values = vec![acc.clone()];
        for (w, v) in self.breakpoints.windows(2).zip(&self.values) {
            let h = w[1] - w[0];
            for (a, x) in acc.iter_mut().zip(v) {
                *a += h * x;
            }
            values.push(acc.clone());
        }
        Interpolant::new(self.breakpoints.clone(), InterpolantKind::PiecewiseLinear, values)
    }
}

/// `(Kw)(t) = ∫_0^t w(s) ds` for a piecewise-constant `w`.
pub fn apply_k(w: &Interpolant, t: f64) -> Result<Vec<f64>> {
    if w.kind != InterpolantKind::PiecewiseConstant {
        return Err(Error::Config("K is applied to piecewise-constant interpolants".into()));
    }
    if t < w.start() || t > w.end() {
        return Err(Error::Config(format!("t = {t} outside [{}, {}]", w.start(), w.end())));
    }
    let mut acc = vec![0.0; w.dim()];
    for (b, v) in w.breakpoints.windows(2).zip(&w.values) {
        if b[0] >= t {
            break;
        }
        let h = b[1].min(t) - b[0];
        for (a, x) in acc.iter_mut().zip(v) {
            *a += h * x;
        }
    }
    Ok(acc)
}

/// Sorted union of two breakpoint sets spanning the same interval.
///
/// Points closer than `1e-13·T` are merged so that no sliver intervals appear.
pub fn union_breakpoints(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let span = a.last().unwrap() - a[0];
    let tol = 1e-13 * span;
    if (a[0] - b[0]).abs() > tol || (a.last().unwrap() - b.last().unwrap()).abs() > tol {
        return Err(Error::Config("interpolants live on different time intervals".into()));
    }
    let mut all: Vec<f64> = a.iter().chain(b).copied().collect();
    all.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for t in all {
        match out.last() {
            Some(&last) if t - last <= tol => {}
            _ => out.push(t),
        }
    }
    // keep the exact end point of `a`
    *out.last_mut().unwrap() = *a.last().unwrap();
    Ok(out)
}

/// `‖a − b‖²_{L²(0,T;X)}` where `sq` is the squared norm of `X`.
///
/// Both functions are evaluated on the union of breakpoints and integrated
/// with 3-point Gauss per subinterval, which is exact when `sq` is a quadratic
/// form and the interpolants are at most linear.
pub fn l2_distance_sq(a: &Interpolant, b: &Interpolant, sq: &dyn Fn(&[f64]) -> f64) -> Result<f64> {
    let union = union_breakpoints(&a.breakpoints, &b.breakpoints)?;
    let mut acc = 0.0;
    for w in union.windows(2) {
        acc += GAUSS3.integrate(w[0], w[1], |t| {
            let x = a.eval(t);
            let y = b.eval(t);
            let d: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p - q).collect();
            sq(&d)
        });
    }
    Ok(acc)
}
