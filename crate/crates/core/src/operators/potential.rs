//! Piecewise-affine densities and their Clarke subdifferential graphs.
//!
//! A potential `j` is stored through its density `ρ = j'`, which is affine on
//! each interval between consecutive breakpoints. At a breakpoint `b` the
//! Clarke subdifferential is the closed interval between the one-sided
//! derivatives `ρ(b−)` and `ρ(b+)`; elsewhere it is the singleton `{ρ(s)}`.

use serde::{Deserialize, Serialize};

/// `ρ(s) = offset + slope · s` on one interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffinePiece {
    pub offset: f64,
    pub slope: f64,
}

impl AffinePiece {
    pub fn at(&self, s: f64) -> f64 {
        self.offset + self.slope * s
    }

    /// `∫_a^b ρ`.
    fn integral(&self, a: f64, b: f64) -> f64 {
        (b - a) * self.at(0.5 * (a + b))
    }
}

/// Built-in potentials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    /// `j(s) = s²/2`.
    Quadratic,
    /// `j(s) = |s|`.
    Abs,
    /// Density `s` below 1 and `s/2` from 1 on; nonconvex kink at 1.
    Jump,
    /// `j(s) = (|s| − 1)²/2`; nonconvex with wells at ±1.
    DoubleWell,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialGraph {
    breakpoints: Vec<f64>,
    pieces: Vec<AffinePiece>,
}

impl PotentialGraph {
    /// `pieces.len()` must be `breakpoints.len() + 1`; breakpoints strictly increasing.
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<AffinePiece>) -> Self {
        assert_eq!(pieces.len(), breakpoints.len() + 1);
        assert!(breakpoints.windows(2).all(|w| w[0] < w[1]));
        Self { breakpoints, pieces }
    }

    pub fn builtin(kind: PotentialKind) -> Self {
        let piece = |offset, slope| AffinePiece { offset, slope };
        match kind {
            PotentialKind::Quadratic => Self::new(vec![], vec![piece(0.0, 1.0)]),
            PotentialKind::Abs => Self::new(vec![0.0], vec![piece(-1.0, 0.0), piece(1.0, 0.0)]),
            PotentialKind::Jump => Self::new(vec![1.0], vec![piece(0.0, 1.0), piece(0.0, 0.5)]),
            PotentialKind::DoubleWell => {
                Self::new(vec![0.0], vec![piece(1.0, 1.0), piece(-1.0, 1.0)])
            }
        }
    }

    /// Potential `k · j`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| AffinePiece { offset: k * p.offset, slope: k * p.slope })
                .collect(),
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    /// Piece active on the right of `s` (right-continuous selection).
    fn right_piece(&self, s: f64) -> &AffinePiece {
        &self.pieces[self.breakpoints.partition_point(|b| *b <= s)]
    }

    fn left_piece(&self, s: f64) -> &AffinePiece {
        &self.pieces[self.breakpoints.partition_point(|b| *b < s)]
    }

    /// `j(s)` normalised by `j(0) = 0`.
    pub fn potential(&self, s: f64) -> f64 {
        let (a, b, sign) = if s >= 0.0 { (0.0, s, 1.0) } else { (s, 0.0, -1.0) };
        sign * self.integrate(a, b)
    }

    /// `∫_a^b ρ` for `a <= b`.
    fn integrate(&self, a: f64, b: f64) -> f64 {
        let mut acc = 0.0;
        let mut lo = a;
        for &bp in self.breakpoints.iter().filter(|bp| **bp > a && **bp < b) {
            acc += self.right_piece(lo).integral(lo, bp);
            lo = bp;
        }
        acc + self.right_piece(lo).integral(lo, b)
    }

    /// One-sided derivatives `(ρ(s−), ρ(s+))`.
    pub fn one_sided(&self, s: f64) -> (f64, f64) {
        (self.left_piece(s).at(s), self.right_piece(s).at(s))
    }

    /// Clarke subdifferential `∂j(s) = [lo, hi]`.
    pub fn subdiff_interval(&self, s: f64) -> (f64, f64) {
        let (l, r) = self.one_sided(s);
        (l.min(r), l.max(r))
    }

    /// Mollified density `ρ_ε(s) = ∫ ρ(x) k_ε(s − x) dx` with the hat kernel
    /// `k_ε(y) = (ε − |y|)₊ / ε²`, so `ρ_ε` is C¹.
    pub fn regularized_selection(&self, s: f64, eps: f64) -> f64 {
        debug_assert!(eps > 0.0);
        let kernel = |x: f64| (eps - (s - x).abs()) / (eps * eps);
        let mut cuts = vec![s - eps];
        cuts.extend(self.breakpoints.iter().copied().filter(|b| *b > s - eps && *b < s));
        cuts.push(s);
        cuts.extend(self.breakpoints.iter().copied().filter(|b| *b > s && *b < s + eps));
        cuts.push(s + eps);
        // affine times affine on each piece: Simpson is exact
        cuts.windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let m = 0.5 * (a + b);
                let piece = self.right_piece(a);
                (b - a) / 6.0 * (piece.at(a) * kernel(a) + 4.0 * piece.at(m) * kernel(m) + piece.at(b) * kernel(b))
            })
            .sum()
    }

    /// `d/ds ρ_ε(s) = ε⁻² (∫_s^{s+ε} ρ − ∫_{s−ε}^s ρ)`.
    pub fn regularized_derivative(&self, s: f64, eps: f64) -> f64 {
        (self.integrate(s, s + eps) - self.integrate(s - eps, s)) / (eps * eps)
    }

    /// Hull `[lo, hi]` of `∂j` over `[s − r, s + r]`.
    pub fn hull_over(&self, s: f64, r: f64) -> (f64, f64) {
        let (a, b) = (s - r, s + r);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut push = |x: f64| {
            lo = lo.min(x);
            hi = hi.max(x);
        };
        push(self.right_piece(a).at(a));
        push(self.left_piece(a).at(a));
        push(self.left_piece(b).at(b));
        push(self.right_piece(b).at(b));
        for &bp in self.breakpoints.iter().filter(|bp| **bp >= a && **bp <= b) {
            let (l, r) = self.one_sided(bp);
            push(l);
            push(r);
        }
        (lo, hi)
    }

    /// Euclidean distance from `(s, η)` to the graph of `∂j`.
    pub fn graph_distance(&self, s: f64, eta: f64) -> f64 {
        let mut best = f64::INFINITY;
        let n = self.pieces.len();
        for (k, piece) in self.pieces.iter().enumerate() {
            let lo = if k == 0 { f64::NEG_INFINITY } else { self.breakpoints[k - 1] };
            let hi = if k + 1 == n { f64::INFINITY } else { self.breakpoints[k] };
            // closest point on the line η = offset + slope·s, clamped to [lo, hi]
            let m = piece.slope;
            let x = ((s + m * (eta - piece.offset)) / (1.0 + m * m)).clamp(lo, hi);
            best = best.min((s - x).hypot(eta - piece.at(x)));
        }
        for &bp in &self.breakpoints {
            let (l, h) = self.subdiff_interval(bp);
            let y = eta.clamp(l, h);
            best = best.min((s - bp).hypot(eta - y));
        }
        best
    }

    /// `c_j` with `|η| <= c_j (1 + |s|^{p−1})` for all `η ∈ ∂j(s)`.
    pub fn growth_constant(&self, p: f64) -> f64 {
        self.pieces
            .iter()
            .map(|q| {
                if p == 2.0 {
                    q.offset.abs().max(q.slope.abs())
                } else {
                    q.offset.abs() + q.slope.abs()
                }
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn jump() -> PotentialGraph {
        PotentialGraph::builtin(PotentialKind::Jump)
    }

    #[test]
    fn quadratic_is_smooth_everywhere() {
        let j = PotentialGraph::builtin(PotentialKind::Quadratic);
        for s in [-3.0, 0.0, 0.25, 7.5] {
            assert_eq!(j.subdiff_interval(s), (s, s));
            assert!((j.regularized_selection(s, 0.3) - s).abs() < 1e-14 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn jump_density_kink() {
        let j = jump();
        assert_eq!(j.subdiff_interval(1.0), (0.5, 1.0));
        assert_eq!(j.subdiff_interval(0.5), (0.5, 0.5));
        // one-sided difference quotients of j at the kink
        let h = 1e-7;
        let left = (j.potential(1.0) - j.potential(1.0 - h)) / h;
        let right = (j.potential(1.0 + h) - j.potential(1.0)) / h;
        assert!((left - 1.0).abs() < 1e-6);
        assert!((right - 0.5).abs() < 1e-6);
    }

    #[test]
    fn mollified_jump_value() {
        // ∫_0^0.1 (1 − y)(0.1 − y) dy/0.01 + ∫_0^0.1 (1 + y)(0.1 − y) dy/0.02 = 29/60 + 31/120
        let v = jump().regularized_selection(1.0, 0.1);
        assert!((v - 89.0 / 120.0).abs() < 1e-14);
        let (lo, hi) = jump().subdiff_interval(1.0);
        assert!(lo <= v && v <= hi);
    }

    #[test]
    fn abs_and_double_well() {
        let a = PotentialGraph::builtin(PotentialKind::Abs);
        assert_eq!(a.subdiff_interval(0.0), (-1.0, 1.0));
        assert_eq!(a.regularized_selection(0.0, 1e-3), 0.0);
        let d = PotentialGraph::builtin(PotentialKind::DoubleWell);
        assert_eq!(d.subdiff_interval(0.0), (-1.0, 1.0));
        assert_eq!(d.subdiff_interval(1.0), (0.0, 0.0));
        assert!((d.potential(1.0) + 0.5).abs() < 1e-15);
        assert!((d.potential(0.0)).abs() < 1e-15);
    }

    #[test]
    fn graph_distance_on_and_off_graph() {
        let j = jump();
        assert_eq!(j.graph_distance(1.0, 0.75), 0.0);
        assert!(j.graph_distance(0.3, 0.3) < 1e-15);
        assert!((j.graph_distance(0.5, 1.0) - 0.5 / 2f64.sqrt()).abs() < 1e-12);
        // nearest point on η = s would lie beyond the kink, so the corner (1, 1) wins
        assert!((j.graph_distance(1.0, 1.5) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn convergence_at_smooth_points() {
        // smooth point close to the kink: the error vanishes once ε < s
        let d = PotentialGraph::builtin(PotentialKind::DoubleWell);
        let s = 0.05;
        let exact = d.one_sided(s).1;
        let mut prev = (d.regularized_selection(s, 0.2) - exact).abs();
        let mut eps = 0.1;
        while eps > 0.05 / 4.0 {
            let err = (d.regularized_selection(s, eps) - exact).abs();
            assert!(err <= 0.75 * prev + 1e-15, "eps {eps}: {err} vs {prev}");
            prev = err;
            eps *= 0.5;
        }
        assert!((d.regularized_selection(s, 0.01) - exact).abs() < 1e-15);
    }

    #[test]
    fn mollified_derivative_matches_difference_quotient() {
        let kinds = [PotentialKind::Abs, PotentialKind::Jump, PotentialKind::DoubleWell];
        for k in kinds {
            let j = PotentialGraph::builtin(k);
            for s in [-0.7, -0.03, 0.01, 0.97, 1.04] {
                let (eps, h) = (0.05, 1e-6);
                let fd = (j.regularized_selection(s + h, eps) - j.regularized_selection(s - h, eps)) / (2.0 * h);
                let d = j.regularized_derivative(s, eps);
                assert!((fd - d).abs() < 1e-5 * (1.0 + d.abs()), "{k:?} at {s}: {fd} vs {d}");
            }
        }
        // hat kernel on |s| near 0: ρ_ε(s) = (2s/ε − s|s|/ε²), slope 2/ε at the kink
        let a = PotentialGraph::builtin(PotentialKind::Abs);
        assert!((a.regularized_derivative(0.0, 0.1) - 20.0).abs() < 1e-12);
        assert!((a.regularized_selection(0.05, 0.1) - 0.75).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn mollified_value_in_enlarged_graph(s in -3.0f64..3.0, eps in 1e-6f64..0.5, k in 0usize..4) {
            let kinds = [PotentialKind::Quadratic, PotentialKind::Abs, PotentialKind::Jump, PotentialKind::DoubleWell];
            let j = PotentialGraph::builtin(kinds[k]);
            let eta = j.regularized_selection(s, eps);
            let (lo, hi) = j.hull_over(s, eps);
            prop_assert!(eta >= lo - 1e-12 && eta <= hi + 1e-12);
            prop_assert!(j.graph_distance(s, eta) <= eps * (1.0 + 1e-9) + 1e-14);
        }

        #[test]
        fn one_sided_quotients_match_interval(k in 0usize..4, s in -2.0f64..2.0) {
            let kinds = [PotentialKind::Quadratic, PotentialKind::Abs, PotentialKind::Jump, PotentialKind::DoubleWell];
            let j = PotentialGraph::builtin(kinds[k]);
            for &b in j.breakpoints().iter().chain(std::iter::once(&s)) {
                let h = 1e-6;
                let l = (j.potential(b) - j.potential(b - h)) / h;
                let r = (j.potential(b + h) - j.potential(b)) / h;
                let (lo, hi) = j.subdiff_interval(b);
                prop_assert!((l.min(r) - lo).abs() < 1e-4);
                prop_assert!((l.max(r) - hi).abs() < 1e-4);
            }
        }

        #[test]
        fn growth_bound_holds(k in 0usize..4, s in -50.0f64..50.0, p in 2.0f64..5.0) {
            let kinds = [PotentialKind::Quadratic, PotentialKind::Abs, PotentialKind::Jump, PotentialKind::DoubleWell];
            let j = PotentialGraph::builtin(kinds[k]);
            let c = j.growth_constant(p);
            let (lo, hi) = j.subdiff_interval(s);
            let bound = c * (1.0 + s.abs().powf(p - 1.0));
            prop_assert!(lo.abs() <= bound && hi.abs() <= bound);
        }
    }
}
