use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The lower-order velocity law `g: ℝ → ℝ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarLaw {
    Zero,
    Arctan,
    /// `g(s) = s`; admissible for `p = 2` only.
    Identity,
    /// `g(s) = coeff · |s|^{exponent-1} s` with `1 <= exponent <= p - 1`.
    Power { coeff: f64, exponent: f64 },
}

impl ScalarLaw {
    pub fn validate(&self, p: f64) -> Result<()> {
        match *self {
            ScalarLaw::Identity if p != 2.0 => {
                Err(Error::Config(format!("identity law requires p = 2, got p = {p}")))
            }
            ScalarLaw::Power { coeff, exponent } => {
                if coeff < 0.0 {
                    return Err(Error::Config("power law coefficient must be nonnegative".into()));
                }
                if !(1.0..=p - 1.0).contains(&exponent) {
                    return Err(Error::Config(format!(
                        "power law exponent must lie in [1, p-1] = [1, {}], got {exponent}",
                        p - 1.0
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        match *self {
            ScalarLaw::Zero => 0.0,
            ScalarLaw::Arctan => s.atan(),
            ScalarLaw::Identity => s,
            ScalarLaw::Power { coeff, exponent } => coeff * s.abs().powf(exponent - 1.0) * s,
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match *self {
            ScalarLaw::Zero => 0.0,
            ScalarLaw::Arctan => 1.0 / (1.0 + s * s),
            ScalarLaw::Identity => 1.0,
            ScalarLaw::Power { coeff, exponent } => coeff * exponent * s.abs().powf(exponent - 1.0),
        }
    }

    /// `c_g` with `|g(s)| <= c_g (1 + |s|^{p-1})`.
    pub fn growth_constant(&self) -> f64 {
        match *self {
            ScalarLaw::Zero => 0.0,
            ScalarLaw::Arctan => std::f64::consts::FRAC_PI_2,
            ScalarLaw::Identity => 1.0,
            ScalarLaw::Power { coeff, .. } => coeff,
        }
    }

    /// Declared lower bound of `g(s) s`.
    pub fn inf_gs(&self) -> f64 {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arctan_is_coercive_at_two() {
        let g = ScalarLaw::Arctan;
        let gs = g.value(2.0) * 2.0;
        assert!((gs - 2.214_297_435_588_181).abs() < 1e-12);
        assert!(gs >= g.inf_gs());
    }

    #[test]
    fn validation() {
        assert!(ScalarLaw::Identity.validate(3.0).is_err());
        assert!(ScalarLaw::Identity.validate(2.0).is_ok());
        assert!(ScalarLaw::Power { coeff: 1.0, exponent: 2.5 }.validate(3.0).is_err());
        assert!(ScalarLaw::Power { coeff: 1.0, exponent: 2.0 }.validate(3.0).is_ok());
        assert!(ScalarLaw::Power { coeff: -1.0, exponent: 1.0 }.validate(3.0).is_err());
    }

    #[test]
    fn derivatives_match_differences() {
        let laws = [
            ScalarLaw::Arctan,
            ScalarLaw::Identity,
            ScalarLaw::Power { coeff: 0.7, exponent: 1.5 },
        ];
        for g in laws {
            for s in [-2.3, -0.4, 0.3, 1.7] {
                let h = 1e-6;
                let fd = (g.value(s + h) - g.value(s - h)) / (2.0 * h);
                assert!((fd - g.derivative(s)).abs() < 1e-6 * fd.abs().max(1.0));
            }
        }
    }
}
