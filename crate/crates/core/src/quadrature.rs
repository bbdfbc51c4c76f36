//! Gauss–Legendre rules on the reference interval [0, 1].

/// A quadrature rule on [0, 1]: `(point, weight)` pairs, weights summing to 1.
#[derive(Clone, Copy, Debug)]
pub struct Rule(pub &'static [(f64, f64)]);

const G2_OFF: f64 = 0.288_675_134_594_812_9; // 1 / (2√3)
const G3_OFF: f64 = 0.387_298_334_620_741_7; // √(3/5) / 2

pub const GAUSS2: Rule = Rule(&[(0.5 - G2_OFF, 0.5), (0.5 + G2_OFF, 0.5)]);

pub const GAUSS3: Rule = Rule(&[
    (0.5 - G3_OFF, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.5 + G3_OFF, 5.0 / 18.0),
]);

// 5-point nodes ±sqrt(5 ∓ 2 sqrt(10/7))/3 mapped to [0, 1].
const G5_A: f64 = 0.453_089_922_969_332_3; // outer / 2
const G5_B: f64 = 0.269_234_655_052_841_5; // inner / 2
const G5_WA: f64 = 0.236_926_885_056_189_1 / 2.0;
const G5_WB: f64 = 0.478_628_670_499_366_5 / 2.0;
const G5_WC: f64 = 0.568_888_888_888_888_9 / 2.0;

pub const GAUSS5: Rule = Rule(&[
    (0.5 - G5_A, G5_WA),
    (0.5 - G5_B, G5_WB),
    (0.5, G5_WC),
    (0.5 + G5_B, G5_WB),
    (0.5 + G5_A, G5_WA),
]);

impl Rule {
    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let h = b - a;
        self.0.iter().map(|&(x, w)| w * f(a + h * x)).sum::<f64>() * h
    }
}
