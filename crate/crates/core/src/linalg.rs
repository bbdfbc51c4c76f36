//! Small dense-vector helpers and a tridiagonal matrix type.
//!
//! Every operator assembled on a 1-D P1 mesh couples only neighbouring
//! nodes, so all Jacobians and Gram matrices in this crate are tridiagonal.

use crate::error::{Error, Result};

/// Tridiagonal matrix stored by diagonals.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiag {
    /// Sub-diagonal, `lower[i]` sits at row `i + 1`, column `i`.
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    /// Super-diagonal, `upper[i]` sits at row `i`, column `i + 1`.
    pub upper: Vec<f64>,
}

impl Tridiag {
    pub fn zeros(n: usize) -> Self {
        let off = n.saturating_sub(1);
        Self {
            lower: vec![0.0; off],
            diag: vec![0.0; n],
            upper: vec![0.0; off],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Adds a symmetric 2×2 element block `[[a, b], [b, a]]` at rows/cols `i, i+1`.
    pub fn add_block(&mut self, i: usize, a: f64, b: f64) {
        self.diag[i] += a;
        self.diag[i + 1] += a;
        self.upper[i] += b;
        self.lower[i] += b;
    }

    pub fn add_diag(&mut self, d: &[f64]) {
        for (x, y) in self.diag.iter_mut().zip(d) {
            *x += y;
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            lower: self.lower.iter().map(|x| x * s).collect(),
            diag: self.diag.iter().map(|x| x * s).collect(),
            upper: self.upper.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Tridiag) -> Self {
        let zip = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Self {
            lower: zip(&self.lower, &other.lower),
            diag: zip(&self.diag, &other.diag),
            upper: zip(&self.upper, &other.upper),
        }
    }

    /// Removes the first `front` and last `back` rows and columns.
    pub fn trim(&self, front: usize, back: usize) -> Self {
        let n = self.dim();
        let m = n - front - back;
        if m == 0 {
            return Self::zeros(0);
        }
        Self {
            lower: self.lower[front..front + m - 1].to_vec(),
            diag: self.diag[front..front + m].to_vec(),
            upper: self.upper[front..front + m - 1].to_vec(),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.upper[i] * x[i + 1];
            }
            y[i] = s;
        }
        y
    }

    /// Thomas algorithm. Fails on a vanishing pivot.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        assert_eq!(rhs.len(), n);
        if n == 0 {
            return Ok(Vec::new());
        }
        let scale = self.diag.iter().fold(0.0_f64, |m, d| m.max(d.abs())).max(f64::MIN_POSITIVE);
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut piv = self.diag[0];
        if piv.abs() <= 1e-300 * scale || !piv.is_finite() {
            return Err(Error::Singular("zero pivot in row 0".into()));
        }
        if n > 1 {
            c[0] = self.upper[0] / piv;
        }
        d[0] = rhs[0] / piv;
        for i in 1..n {
            piv = self.diag[i] - self.lower[i - 1] * c[i - 1];
            if piv.abs() <= 1e-300 * scale || !piv.is_finite() {
                return Err(Error::Singular(format!("zero pivot in row {i}")));
            }
            if i + 1 < n {
                c[i] = self.upper[i] / piv;
            }
            d[i] = (rhs[i] - self.lower[i - 1] * d[i - 1]) / piv;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `a + s * b`
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_matches_multiplication() {
        let mut t = Tridiag::zeros(5);
        for i in 0..4 {
            t.add_block(i, 2.0, -1.0);
        }
        t.add_diag(&[0.5; 5]);
        let x = vec![1.0, -2.0, 0.5, 3.0, 0.25];
        let b = t.mul_vec(&x);
        let y = t.solve(&b).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn singular_is_reported() {
        let t = Tridiag::zeros(3);
        assert!(matches!(t.solve(&[1.0, 0.0, 0.0]), Err(Error::Singular(_))));
    }

    #[test]
    fn trim_keeps_interior() {
        let mut t = Tridiag::zeros(4);
        for i in 0..3 {
            t.add_block(i, 1.0, -1.0);
        }
        let s = t.trim(1, 1);
        assert_eq!(s.diag, vec![2.0, 2.0]);
        assert_eq!(s.upper, vec![-1.0]);
    }
}
