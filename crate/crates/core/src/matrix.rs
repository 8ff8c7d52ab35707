//! 2×2 complex matrices, norms and closed-form spectral decomposition.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Complex;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

/// Row-major `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[[Complex; 2]; 2]", into = "[[Complex; 2]; 2]")]
pub struct Mat2 {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
}

impl From<[[Complex; 2]; 2]> for Mat2 {
    fn from([[a, b], [c, d]]: [[Complex; 2]; 2]) -> Self {
        Self { a, b, c, d }
    }
}

impl From<Mat2> for [[Complex; 2]; 2] {
    fn from(m: Mat2) -> Self {
        [[m.a, m.b], [m.c, m.d]]
    }
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2 { a: ZERO, b: ZERO, c: ZERO, d: ZERO };
    pub const IDENTITY: Mat2 = Mat2 { a: ONE, b: ZERO, c: ZERO, d: ONE };
    /// Sentinel for results that left the range of `f64`.
    pub const OVERFLOW: Mat2 = Mat2 {
        a: crate::poly::OVERFLOW,
        b: crate::poly::OVERFLOW,
        c: crate::poly::OVERFLOW,
        d: crate::poly::OVERFLOW,
    };

    pub const fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(
            Complex::new(a, 0.0),
            Complex::new(b, 0.0),
            Complex::new(c, 0.0),
            Complex::new(d, 0.0),
        )
    }

    pub fn diag(l1: Complex, l2: Complex) -> Self {
        Self::new(l1, ZERO, ZERO, l2)
    }

    pub fn scalar(l: Complex) -> Self {
        Self::diag(l, l)
    }

    /// The Jordan block `[[l, 1], [0, l]]`.
    pub fn jordan(l: Complex) -> Self {
        Self::new(l, ONE, ZERO, l)
    }

    /// Matrix with the given columns.
    pub fn from_columns(v: [Complex; 2], w: [Complex; 2]) -> Self {
        Self::new(v[0], w[0], v[1], w[1])
    }

    pub fn entries(&self) -> [Complex; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn trace(&self) -> Complex {
        self.a + self.d
    }

    pub fn det(&self) -> Complex {
        self.a * self.d - self.b * self.c
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det.norm() == 0.0 {
            return Err(Error::SingularMatrix);
        }
        let inv = Self::new(self.d, -self.b, -self.c, self.a).scale(det.inv());
        if inv.is_finite() {
            Ok(inv)
        } else {
            Err(Error::SingularMatrix)
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius_norm(self)
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        let top = self.max_abs();
        if top == 0.0 || !top.is_finite() {
            return top;
        }
        // power-of-two rescaling keeps the squares in range without rounding
        let k = top.log2().floor();
        let s = (-k).exp2();
        let m = self.scale(Complex::new(s, 0.0));
        let f2 = m.a.norm_sqr() + m.b.norm_sqr() + m.c.norm_sqr() + m.d.norm_sqr();
        let det = m.det().norm();
        let disc = ((f2 - 2.0 * det) * (f2 + 2.0 * det)).max(0.0);
        (0.5 * (f2 + disc.sqrt())).sqrt() / s
    }

    pub fn spectral_radius(&self) -> f64 {
        spectral_radius(self)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::IDENTITY;
        for _ in 0..n {
            acc = acc * *self;
        }
        acc
    }

    pub(crate) fn with_overflow_check(self) -> Self {
        if self.is_finite() {
            self
        } else {
            Self::OVERFLOW
        }
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Mul<Complex> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: Complex) -> Mat2 {
        self.scale(s)
    }
}

pub fn mat_add(x: &Mat2, y: &Mat2) -> Mat2 {
    (*x + *y).with_overflow_check()
}

pub fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    (*x * *y).with_overflow_check()
}

pub fn mat_scale(x: &Mat2, s: Complex) -> Mat2 {
    x.scale(s).with_overflow_check()
}

pub fn frobenius_norm(m: &Mat2) -> f64 {
    // hypot chain avoids premature overflow of the squared entries
    m.entries().iter().fold(0.0_f64, |acc, z| acc.hypot(z.norm()))
}

/// Eigenvalues ordered by decreasing modulus.
///
/// The discriminant is formed as `(a - d)^2 + 4bc`, the larger root is taken
/// with the sign that avoids cancellation and the smaller one is recovered
/// from the determinant.
pub fn eigenvalues(m: &Mat2) -> (Complex, Complex) {
    let (l1, l2, _) = eigen_core(m);
    (l1, l2)
}

fn eigen_core(m: &Mat2) -> (Complex, Complex, Complex) {
    let tr = m.trace();
    let diff = m.a - m.d;
    let root = (diff * diff + m.b * m.c * 4.0).sqrt();
    let big = if (tr.conj() * root).re >= 0.0 {
        (tr + root) * 0.5
    } else {
        (tr - root) * 0.5
    };
    let small = if big.norm() > 0.0 {
        m.det() / big
    } else {
        tr - big
    };
    if big.norm() >= small.norm() {
        (big, small, root)
    } else {
        (small, big, root)
    }
}

pub fn spectral_radius(m: &Mat2) -> f64 {
    let (l1, l2) = eigenvalues(m);
    l1.norm().max(l2.norm())
}

/// Thresholds used to decide between distinct, defective and scalar spectra.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    pub eig_split_tol: f64,
    pub scalar_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            eig_split_tol: 1e-9,
            scalar_tol: 1e-12,
        }
    }
}

impl TolerancePolicy {
    pub fn new(eig_split_tol: f64, scalar_tol: f64) -> Result<Self> {
        for (name, v) in [("eig_split_tol", eig_split_tol), ("scalar_tol", scalar_tol)] {
            if !(v > 0.0 && v < 1e-3) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} = {v} must lie in (0, 1e-3)"
                )));
            }
        }
        Ok(Self {
            eig_split_tol,
            scalar_tol,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumKind {
    /// `M = Q diag(lambda1, lambda2) Q^{-1}` with `|lambda1| >= |lambda2|`.
    Distinct {
        lambda1: Complex,
        lambda2: Complex,
        q: Mat2,
    },
    /// `M = Q [[lambda, 1], [0, lambda]] Q^{-1}`.
    Defective { lambda: Complex, q: Mat2 },
    Scalar { lambda: Complex },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub kind: SpectrumKind,
    /// Frobenius condition number of the conjugator (2 for the identity).
    pub cond_q: f64,
    /// Set when the matrix sits within four decades of the split or scalar
    /// threshold, where the Jordan type is numerically ambiguous.
    pub near_defective: bool,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> [Complex; 2] {
        match self.kind {
            SpectrumKind::Distinct { lambda1, lambda2, .. } => [lambda1, lambda2],
            SpectrumKind::Defective { lambda, .. } | SpectrumKind::Scalar { lambda } => {
                [lambda, lambda]
            }
        }
    }

    pub fn conjugator(&self) -> Mat2 {
        match self.kind {
            SpectrumKind::Distinct { q, .. } | SpectrumKind::Defective { q, .. } => q,
            SpectrumKind::Scalar { .. } => Mat2::IDENTITY,
        }
    }

    pub fn is_defective(&self) -> bool {
        matches!(self.kind, SpectrumKind::Defective { .. })
    }

    pub fn is_finite(&self) -> bool {
        self.eigenvalues().iter().all(|z| z.is_finite()) && self.cond_q.is_finite()
    }

    /// The Jordan normal form `J` with `M = Q J Q^{-1}`.
    pub fn normal_form(&self) -> Mat2 {
        match self.kind {
            SpectrumKind::Distinct { lambda1, lambda2, .. } => Mat2::diag(lambda1, lambda2),
            SpectrumKind::Defective { lambda, .. } => Mat2::jordan(lambda),
            SpectrumKind::Scalar { lambda } => Mat2::scalar(lambda),
        }
    }

    /// `Q J Q^{-1}`.
    pub fn reconstruct(&self) -> Mat2 {
        let q = self.conjugator();
        match q.inverse() {
            Ok(qi) => q * self.normal_form() * qi,
            Err(_) => Mat2::OVERFLOW,
        }
    }
}

fn unit(v: [Complex; 2]) -> [Complex; 2] {
    let n = v[0].norm().hypot(v[1].norm());
    [v[0] / n, v[1] / n]
}

fn longer(x: [Complex; 2], y: [Complex; 2]) -> [Complex; 2] {
    if x[0].norm().hypot(x[1].norm()) >= y[0].norm().hypot(y[1].norm()) {
        x
    } else {
        y
    }
}

fn eigenvector(m: &Mat2, l: Complex) -> [Complex; 2] {
    let v = longer([m.b, l - m.a], [l - m.d, m.c]);
    if v[0].norm() == 0.0 && v[1].norm() == 0.0 {
        [ONE, ZERO]
    } else {
        unit(v)
    }
}

/// Unit vector maximising `|N w|`: the top eigenvector of `N^H N`.
fn top_right_singular_vector(n: &Mat2) -> [Complex; 2] {
    let p = n.a.norm_sqr() + n.c.norm_sqr();
    let s = n.b.norm_sqr() + n.d.norm_sqr();
    let q = n.a.conj() * n.b + n.c.conj() * n.d;
    let half = 0.5 * (p - s);
    let mu = 0.5 * (p + s) + half.hypot(q.norm());
    let w = longer(
        [q, Complex::new(mu - p, 0.0)],
        [Complex::new(mu - s, 0.0), q.conj()],
    );
    if w[0].norm() == 0.0 && w[1].norm() == 0.0 {
        [ONE, ZERO]
    } else {
        unit(w)
    }
}

pub fn eigen_decompose(m: &Mat2, tol: &TolerancePolicy) -> Spectrum {
    let tr = m.trace();
    let (l1, l2, root) = eigen_core(m);
    let split_scale = tol.eig_split_tol * tr.norm().max(1.0);
    let split = root.norm();
    if split > split_scale || !split.is_finite() {
        let q = Mat2::from_columns(eigenvector(m, l1), eigenvector(m, l2));
        return Spectrum {
            kind: SpectrumKind::Distinct {
                lambda1: l1,
                lambda2: l2,
                q,
            },
            cond_q: condition_number(&q).unwrap_or(f64::INFINITY),
            near_defective: split <= 1e4 * split_scale,
        };
    }
    let lambda = tr * 0.5;
    let nil = *m - Mat2::scalar(lambda);
    let nil_norm = nil.frobenius_norm();
    let scalar_scale = tol.scalar_tol * m.frobenius_norm().max(1.0);
    if nil_norm <= scalar_scale {
        return Spectrum {
            kind: SpectrumKind::Scalar { lambda },
            cond_q: 2.0,
            near_defective: false,
        };
    }
    let w = top_right_singular_vector(&nil);
    let v = [nil.a * w[0] + nil.b * w[1], nil.c * w[0] + nil.d * w[1]];
    let q = Mat2::from_columns(v, w);
    Spectrum {
        kind: SpectrumKind::Defective { lambda, q },
        cond_q: condition_number(&q).unwrap_or(f64::INFINITY),
        near_defective: nil_norm <= 1e4 * scalar_scale,
    }
}

/// `Q M Q^{-1}`.
pub fn conjugate(q: &Mat2, m: &Mat2) -> Result<Mat2> {
    let qi = q.inverse()?;
    Ok((*q * *m * qi).with_overflow_check())
}

/// `‖Q‖_F ‖Q^{-1}‖_F`, which for 2×2 matrices equals `‖Q‖_F^2 / |det Q|`.
pub fn condition_number(q: &Mat2) -> Result<f64> {
    let det = q.det().norm();
    if det == 0.0 || !q.is_finite() {
        return Err(Error::SingularMatrix);
    }
    let n = q.frobenius_norm();
    Ok(n * n / det)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn close(x: &Mat2, y: &Mat2, tol: f64) -> bool {
        (*x - *y).frobenius_norm() <= tol
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(Mat2::IDENTITY.operator_norm(), 1.0);
        assert_eq!(Mat2::ZERO.operator_norm(), 0.0);
        assert!((Mat2::from_real(0.0, 3.0, 0.0, 0.0).operator_norm() - 3.0).abs() < 1e-15);
        assert!((Mat2::from_real(2.0, 0.0, 0.0, -5.0).operator_norm() - 5.0).abs() < 1e-15);
        // [[1,1],[0,1]] has singular values golden ratio and its inverse
        let g = 0.5 * (1.0 + 5f64.sqrt());
        assert!((Mat2::from_real(1.0, 1.0, 0.0, 1.0).operator_norm() - g).abs() < 1e-15);
        let big = Mat2::from_real(1e200, 0.0, 0.0, 1e200);
        assert!((big.operator_norm() / 1e200 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ring_examples() {
        let i = Mat2::IDENTITY;
        assert_eq!(mat_mul(&i, &i), i);
        let n = Mat2::from_real(0.0, 1.0, 0.0, 0.0);
        assert_eq!(mat_mul(&n, &n), Mat2::ZERO);
        let u = Mat2::from_real(1.0, 1.0, 0.0, 1.0);
        assert_eq!(mat_mul(&u, &u), Mat2::from_real(1.0, 2.0, 0.0, 1.0));
        assert_eq!(mat_add(&u, &n), Mat2::from_real(1.0, 2.0, 0.0, 1.0));
        assert_eq!(mat_scale(&u, c(2.0, 0.0)), Mat2::from_real(2.0, 2.0, 0.0, 2.0));
        let huge = Mat2::scalar(c(1e200, 0.0));
        assert_eq!(mat_mul(&huge, &huge), Mat2::OVERFLOW);
    }

    #[test]
    fn frobenius_examples() {
        assert!((frobenius_norm(&Mat2::IDENTITY) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(frobenius_norm(&Mat2::from_real(3.0, 0.0, 0.0, 4.0)), 5.0);
        assert!((frobenius_norm(&Mat2::from_real(0.0, 1.0, 1.0, 0.0)) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn spectral_radius_examples() {
        assert!((spectral_radius(&Mat2::from_real(0.0, 1.0, -1.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((spectral_radius(&Mat2::from_real(2.0, 100.0, 0.0, 0.5)) - 2.0).abs() < 1e-15);
        assert!((spectral_radius(&Mat2::from_real(2.0, 1.0, 1.0, 2.0)) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn decompose_scalar() {
        let s = eigen_decompose(&Mat2::scalar(c(2.0, 0.0)), &TolerancePolicy::default());
        assert_eq!(s.kind, SpectrumKind::Scalar { lambda: c(2.0, 0.0) });
    }

    #[test]
    fn decompose_jordan_block() {
        let m = Mat2::from_real(1.0, 1.0, 0.0, 1.0);
        let s = eigen_decompose(&m, &TolerancePolicy::default());
        let SpectrumKind::Defective { lambda, q } = s.kind else {
            panic!("expected defective, got {:?}", s.kind);
        };
        assert_eq!(lambda, c(1.0, 0.0));
        let j = conjugate(&q.inverse().unwrap(), &m).unwrap();
        assert!(close(&j, &Mat2::jordan(c(1.0, 0.0)), 1e-15));
    }

    #[test]
    fn decompose_symmetric() {
        let m = Mat2::from_real(2.0, 1.0, 1.0, 2.0);
        let s = eigen_decompose(&m, &TolerancePolicy::default());
        let SpectrumKind::Distinct { lambda1, lambda2, q } = s.kind else {
            panic!("expected distinct");
        };
        assert!((lambda1 - c(3.0, 0.0)).norm() < 1e-15);
        assert!((lambda2 - c(1.0, 0.0)).norm() < 1e-15);
        // columns proportional to (1, 1) and (1, -1)
        assert!((q.a / q.c - c(1.0, 0.0)).norm() < 1e-14);
        assert!((q.b / q.d + c(1.0, 0.0)).norm() < 1e-14);
        assert!(close(&s.reconstruct(), &m, 1e-12));
    }

    #[test]
    fn decompose_conjugated_jordan_block_exactly() {
        // integer conjugator keeps the arithmetic exact, so the discriminant is 0
        let q = Mat2::from_real(2.0, 1.0, 1.0, 1.0);
        let m = conjugate(&q, &Mat2::jordan(c(0.5, 0.25))).unwrap();
        let s = eigen_decompose(&m, &TolerancePolicy::default());
        assert!(s.is_defective());
        assert!(close(&s.reconstruct(), &m, 1e-12 * s.cond_q));
    }

    #[test]
    fn conjugate_examples() {
        let m = Mat2::new(c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.0), c(-2.0, 0.5));
        assert_eq!(conjugate(&Mat2::IDENTITY, &m).unwrap(), m);
        let q = Mat2::new(c(1.0, 0.5), c(2.0, 0.0), c(-0.5, 1.0), c(1.0, -1.0));
        let back = conjugate(&q, &conjugate(&q.inverse().unwrap(), &m).unwrap()).unwrap();
        let cond = condition_number(&q).unwrap();
        assert!(close(&back, &m, 1e-12 * cond * cond * m.frobenius_norm()));
        let r = conjugate(
            &Mat2::from_real(1.0, 1.0, 0.0, 1.0),
            &Mat2::diag(c(1.0, 0.0), c(2.0, 0.0)),
        )
        .unwrap();
        assert_eq!(r, Mat2::from_real(1.0, 1.0, 0.0, 2.0));
        assert_eq!(conjugate(&Mat2::ZERO, &m), Err(Error::SingularMatrix));
    }

    #[test]
    fn condition_examples() {
        assert!((condition_number(&Mat2::IDENTITY).unwrap() - 2.0).abs() < 1e-15);
        let d = Mat2::from_real(10.0, 0.0, 0.0, 0.1);
        assert!((condition_number(&d).unwrap() - 100.01).abs() < 1e-10);
        let t = 0.7_f64;
        let rot = Mat2::from_real(t.cos(), -t.sin(), t.sin(), t.cos());
        assert!((condition_number(&rot).unwrap() - 2.0).abs() < 1e-14);
        assert!(condition_number(&Mat2::from_real(1.0, 2.0, 2.0, 4.0)).is_err());
    }

    #[test]
    fn tolerance_policy_bounds() {
        assert!(TolerancePolicy::new(1e-9, 1e-12).is_ok());
        assert!(TolerancePolicy::new(0.0, 1e-12).is_err());
        assert!(TolerancePolicy::new(1e-9, 1e-2).is_err());
    }

    #[test]
    fn json_nested_pairs() {
        let m = Mat2::from_real(1.0, 1.0, 0.0, 1.0);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[[1.0,0.0],[1.0,0.0]],[[0.0,0.0],[1.0,0.0]]]");
    }
}
