//! The matrix polynomial `P(M) = a_d M^d + ... + a_1 M + a_0 I` and its
//! iterates, computed directly and through the spectrum.

use serde::{Deserialize, Serialize};

use crate::matrix::{Mat2, Spectrum, SpectrumKind};
use crate::poly::{is_overflow, Polynomial};
use crate::scalar::iterate_with_derivative;

/// Entry modulus past which an orbit is recorded as overflowed.
pub const ORBIT_OVERFLOW: f64 = 1e150;

/// Horner evaluation: `d` matrix products.
pub fn eval_p(p: &Polynomial, m: &Mat2) -> Mat2 {
    let mut acc = Mat2::scalar(p.leading());
    for &a in p.coeffs().iter().rev().skip(1) {
        acc = acc * *m;
        acc.a += a;
        acc.d += a;
    }
    acc.with_overflow_check()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixOrbit {
    /// `M, P(M), ..., P^n(M)`, cut after the first overflowed point.
    pub points: Vec<Mat2>,
    pub overflowed_at: Option<usize>,
}

impl MatrixOrbit {
    pub fn last(&self) -> &Mat2 {
        self.points.last().expect("orbit always holds its start point")
    }
}

pub fn iterate_p(p: &Polynomial, m: &Mat2, n: usize) -> MatrixOrbit {
    let mut points = Vec::with_capacity(n + 1);
    points.push(*m);
    let mut cur = *m;
    for k in 1..=n {
        cur = eval_p(p, &cur);
        points.push(cur);
        if !cur.is_finite() || cur.max_abs() > ORBIT_OVERFLOW {
            return MatrixOrbit {
                points,
                overflowed_at: Some(k),
            };
        }
    }
    MatrixOrbit {
        points,
        overflowed_at: None,
    }
}

/// `P^n(M)` from the spectrum of `M`:
/// `Q diag(p^n(l1), p^n(l2)) Q^{-1}` for distinct eigenvalues and
/// `Q [[p^n(l), (p^n)'(l)], [0, p^n(l)]] Q^{-1}` for a Jordan block.
pub fn lift_iterate(p: &Polynomial, spectrum: &Spectrum, n: usize) -> Mat2 {
    let inner = match spectrum.kind {
        SpectrumKind::Distinct { lambda1, lambda2, .. } => {
            let (w1, _) = iterate_with_derivative(p, lambda1, n);
            let (w2, _) = iterate_with_derivative(p, lambda2, n);
            Mat2::diag(w1, w2)
        }
        SpectrumKind::Defective { lambda, .. } => {
            let (w, dw) = iterate_with_derivative(p, lambda, n);
            Mat2::new(w, dw, Default::default(), w)
        }
        SpectrumKind::Scalar { lambda } => {
            let (w, _) = iterate_with_derivative(p, lambda, n);
            return if is_overflow(w) {
                Mat2::OVERFLOW
            } else {
                Mat2::scalar(w)
            };
        }
    };
    if !inner.is_finite() {
        return Mat2::OVERFLOW;
    }
    let q = spectrum.conjugator();
    match q.inverse() {
        Ok(qi) => (q * inner * qi).with_overflow_check(),
        Err(_) => Mat2::OVERFLOW,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{eigen_decompose, TolerancePolicy};
    use crate::poly::Complex;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn z2() -> Polynomial {
        Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval_p(&z2(), &Mat2::from_real(0.0, 1.0, 1.0, 0.0)), Mat2::IDENTITY);
        let (x, y, z, t) = (c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0), c(2.0, -1.0));
        let got = eval_p(&z2(), &Mat2::new(x, y, z, t));
        let want = Mat2::new(x * x + y * z, y * (x + t), z * (x + t), t * t + y * z);
        assert!((got - want).frobenius_norm() < 1e-14);
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(eval_p(&p, &Mat2::from_real(0.0, 1.0, 0.0, 0.0)), -Mat2::IDENTITY);
    }

    #[test]
    fn eval_cubic_against_powers() {
        let p = Polynomial::new(vec![c(0.5, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(2.0, 0.5)]).unwrap();
        let m = Mat2::new(c(0.3, 0.1), c(-1.0, 0.2), c(0.7, 0.0), c(0.1, -0.4));
        let mut want = Mat2::ZERO;
        for (k, &a) in p.coeffs().iter().enumerate() {
            want = want + m.powi(k as u32).scale(a);
        }
        assert!((eval_p(&p, &m) - want).frobenius_norm() < 1e-14);
    }

    #[test]
    fn iterate_examples() {
        let orbit = iterate_p(&z2(), &Mat2::from_real(1.0, 1.0, 0.0, 1.0), 3);
        assert_eq!(orbit.points[1], Mat2::from_real(1.0, 2.0, 0.0, 1.0));
        assert_eq!(orbit.points[2], Mat2::from_real(1.0, 4.0, 0.0, 1.0));
        assert_eq!(orbit.points[3], Mat2::from_real(1.0, 8.0, 0.0, 1.0));
        let parabolic = Polynomial::from_real(&[0.0, 1.0, 1.0]).unwrap();
        let n = Mat2::from_real(0.0, 1.0, 0.0, 0.0);
        let orbit = iterate_p(&parabolic, &n, 5);
        assert!(orbit.points.iter().all(|m| *m == n));
        let orbit = iterate_p(&z2(), &Mat2::scalar(c(2.0, 0.0)), 4);
        assert_eq!(*orbit.last(), Mat2::scalar(c(65536.0, 0.0)));
        assert_eq!(orbit.overflowed_at, None);
    }

    #[test]
    fn iterate_records_overflow() {
        let orbit = iterate_p(&z2(), &Mat2::scalar(c(10.0, 0.0)), 20);
        assert_eq!(orbit.overflowed_at, Some(8));
        assert_eq!(orbit.points.len(), 9);
    }

    #[test]
    fn lift_distinct() {
        let m = Mat2::from_real(2.0, 1.0, 1.0, 2.0);
        let s = eigen_decompose(&m, &TolerancePolicy::default());
        let got = lift_iterate(&z2(), &s, 2);
        assert!((got - Mat2::from_real(41.0, 40.0, 40.0, 41.0)).frobenius_norm() < 1e-12);
        assert!((got - *iterate_p(&z2(), &m, 2).last()).frobenius_norm() < 1e-12);
    }

    #[test]
    fn lift_defective() {
        let s = eigen_decompose(&Mat2::from_real(1.0, 1.0, 0.0, 1.0), &TolerancePolicy::default());
        for k in 0..10 {
            let got = lift_iterate(&z2(), &s, k);
            assert_eq!(got, Mat2::from_real(1.0, 2f64.powi(k as i32), 0.0, 1.0));
        }
    }

    #[test]
    fn lift_scalar() {
        let p = Polynomial::from_real(&[0.25, -1.0, 1.0]).unwrap();
        let l = c(0.3, 0.2);
        let s = eigen_decompose(&Mat2::scalar(l), &TolerancePolicy::default());
        let (w, _) = iterate_with_derivative(&p, l, 6);
        assert_eq!(lift_iterate(&p, &s, 6), Mat2::scalar(w));
    }
}
