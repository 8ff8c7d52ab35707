//! Scalar complex polynomials and Horner evaluation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Value returned when an evaluation leaves the range of `f64`.
pub const OVERFLOW: Complex = Complex::new(f64::INFINITY, f64::INFINITY);

pub fn is_overflow(z: Complex) -> bool {
    !z.is_finite()
}

pub(crate) fn finite_or_overflow(z: Complex) -> Complex {
    if z.is_finite() {
        z
    } else {
        OVERFLOW
    }
}

/// A polynomial `a_0 + a_1 z + ... + a_d z^d` of degree `d >= 2`.
///
/// Coefficients are stored in ascending order. The same coefficient list
/// defines the matrix polynomial `P(M) = a_d M^d + ... + a_1 M + a_0 I`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex>", into = "Vec<Complex>")]
pub struct Polynomial {
    coeffs: Vec<Complex>,
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients. Exact zero leading
    /// coefficients are dropped before the degree check.
    pub fn new(mut coeffs: Vec<Complex>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPolynomial(
                "coefficients must be finite".into(),
            ));
        }
        while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        if coeffs.len() < 3 {
            return Err(Error::InvalidPolynomial(format!(
                "degree must be at least 2, got {}",
                coeffs.len() as isize - 1
            )));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    /// `a z^d`.
    pub fn monomial(a: Complex, degree: usize) -> Result<Self> {
        let mut coeffs = vec![Complex::new(0.0, 0.0); degree + 1];
        coeffs[degree] = a;
        Self::new(coeffs)
    }

    /// `z^2 + c`.
    pub fn quadratic(c: Complex) -> Self {
        Self {
            coeffs: vec![c, Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)],
        }
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex {
        self.coeffs[self.degree()]
    }

    pub fn eval(&self, z: Complex) -> Complex {
        let mut acc = self.leading();
        for &a in self.coeffs.iter().rev().skip(1) {
            acc = acc * z + a;
        }
        finite_or_overflow(acc)
    }

    pub fn eval_derivative(&self, z: Complex) -> Complex {
        let d = self.degree();
        let mut acc = self.leading() * d as f64;
        for i in (1..d).rev() {
            acc = acc * z + self.coeffs[i] * i as f64;
        }
        finite_or_overflow(acc)
    }

    /// `p(w) / (a_d w^d)` evaluated in powers of `1/w`, so it never overflows
    /// for large `w`.
    pub(crate) fn normalized_ratio(&self, w: Complex) -> Complex {
        let d = self.degree();
        let u = w.inv();
        let lead = self.leading();
        let mut acc = self.coeffs[0] / lead;
        for i in 1..=d {
            acc = acc * u + self.coeffs[i] / lead;
        }
        acc
    }

    /// `sum_{i<d} |a_i / a_d| r^{i-d}`, an upper bound for `|p(w)/(a_d w^d) - 1|`
    /// on `|w| = r`.
    pub(crate) fn tail_ratio_bound(&self, r: f64) -> f64 {
        let d = self.degree();
        let lead = self.leading().norm();
        self.coeffs[..d]
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm() / lead * r.powi(i as i32 - d as i32))
            .sum()
    }
}

impl TryFrom<Vec<Complex>> for Polynomial {
    type Error = Error;

    fn try_from(coeffs: Vec<Complex>) -> Result<Self> {
        Self::new(coeffs)
    }
}

impl From<Polynomial> for Vec<Complex> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|c| crate::format::format_complex(*c))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn eval_examples() {
        let z2 = Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(z2.eval(c(1.0, 1.0)), c(0.0, 2.0));
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(p.eval(c(0.0, 0.0)), c(-1.0, 0.0));
        let p = Polynomial::from_real(&[-2.0, 0.0, 1.0]).unwrap();
        assert_eq!(p.eval(c(3.0, 0.0)), c(7.0, 0.0));
    }

    #[test]
    fn eval_overflow_is_flagged() {
        let z2 = Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap();
        let w = z2.eval(c(1e200, 0.0));
        assert!(is_overflow(w));
        assert_eq!(w, OVERFLOW);
    }

    #[test]
    fn derivative() {
        let p = Polynomial::from_real(&[0.0, 1.0, 0.0, 3.0]).unwrap();
        // p' = 1 + 9 z^2
        assert_eq!(p.eval_derivative(c(2.0, 0.0)), c(37.0, 0.0));
    }

    #[test]
    fn rejects_low_degree() {
        assert!(Polynomial::from_real(&[1.0, 2.0]).is_err());
        assert!(Polynomial::from_real(&[1.0, 2.0, 0.0]).is_err());
        assert!(Polynomial::new(vec![c(f64::NAN, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn trailing_zero_is_trimmed() {
        let p = Polynomial::from_real(&[1.0, 0.0, 2.0, 0.0]).unwrap();
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn json_is_pairs() {
        let p = Polynomial::from_real(&[-2.0, 0.0, 1.0]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[[-2.0,0.0],[0.0,0.0],[1.0,0.0]]");
        let back: Polynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Polynomial>("[[1,0]]").is_err());
    }
}
