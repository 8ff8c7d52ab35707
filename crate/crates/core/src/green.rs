//! The matrix Green function and the matrix Böttcher coordinate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::matpoly::eval_p;
use crate::matrix::{eigen_decompose, eigenvalues, Mat2, Spectrum, SpectrumKind, TolerancePolicy};
use crate::poly::{Complex, Polynomial};
use crate::scalar::{
    boettcher_derivative_scalar, boettcher_radius, boettcher_scalar, escape_radius, green_scalar,
    scaled_log_iterate, DEFAULT_BUDGET, GREEN_CUTOFF,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GreenRoute {
    Direct { n: usize },
    EigenMax,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixGreen {
    pub value: f64,
    pub route: GreenRoute,
    /// Bound on `|value - G(M)|`.
    pub error_bound: f64,
}

/// Constants bracketing `G_p(w) - log|w|` on `|w| >= R`.
struct GreenBracket {
    log_radius: f64,
    below: f64,
    above: f64,
}

impl GreenBracket {
    fn new(p: &Polynomial) -> Self {
        let radius = escape_radius(p);
        let d = p.degree() as f64;
        let eps = p.tail_ratio_bound(radius);
        let log_b = p.leading().norm().ln() / (d - 1.0);
        Self {
            log_radius: radius.ln(),
            below: log_b + (1.0 - eps).ln() / (d - 1.0),
            above: log_b + (1.0 + eps).ln() / (d - 1.0),
        }
    }

    /// Bounds on `s max_i G_p(w_i)` given `log_rho = s log max_i |w_i|`.
    fn interval(&self, log_rho: f64, s: f64) -> (f64, f64) {
        let lo = if log_rho >= s * self.log_radius {
            (log_rho + s * self.below).max(0.0)
        } else {
            0.0
        };
        (lo, log_rho.max(s * self.log_radius) + s * self.above.max(0.0))
    }
}

/// `d^{-n} log⁺ ‖P^n(M)‖` in the operator norm. Direct iteration runs until the norm passes
/// `1e8`; the remaining steps go through the spectrum of the current
/// iterate with logarithmic tracking, so large `n` never overflows.
pub fn green_direct(p: &Polynomial, m: &Mat2, n: usize) -> MatrixGreen {
    let d = p.degree() as f64;
    let bracket = GreenBracket::new(p);
    let mut cur = *m;
    for k in 0..=n {
        if cur.frobenius_norm() > GREEN_CUTOFF || k == n {
            let (value, error_bound) = if k == n && cur.frobenius_norm() <= GREEN_CUTOFF {
                direct_estimate(&bracket, &cur, d, n)
            } else {
                switched_estimate(p, &bracket, &cur, d, k, n - k)
            };
            return MatrixGreen {
                value,
                route: GreenRoute::Direct { n },
                error_bound,
            };
        }
        cur = eval_p(p, &cur);
    }
    unreachable!("loop returns at k == n")
}

fn direct_estimate(bracket: &GreenBracket, m_n: &Mat2, d: f64, n: usize) -> (f64, f64) {
    let scale = d.powi(-(n as i32));
    let v = m_n.operator_norm().ln().max(0.0);
    let (l1, l2) = eigenvalues(m_n);
    let (lo, hi) = bracket.interval(l1.norm().max(l2.norm()).ln(), 1.0);
    let spread = (v - lo).max(hi - v);
    (scale * v, scale * spread + 1e-14 * v)
}

fn switched_estimate(
    p: &Polynomial,
    bracket: &GreenBracket,
    m_k: &Mat2,
    d: f64,
    k: usize,
    j: usize,
) -> (f64, f64) {
    let spectrum = eigen_decompose(m_k, &TolerancePolicy::default());
    let outer = d.powi(-(k as i32));
    let inner = d.powi(-(j as i32));
    let weight = |l: f64, top: f64| -> f64 {
        if l == top {
            1.0
        } else {
            ((l - top) / inner).exp()
        }
    };
    // all logs below are scaled by d^{-j}
    let (log_norm, log_rho, tracking, slack) = match spectrum.kind {
        SpectrumKind::Scalar { lambda } => {
            let s = scaled_log_iterate(p, lambda, j);
            (s.log_value, s.log_value, s.value_error, 0.0)
        }
        SpectrumKind::Distinct { lambda1, lambda2, q } => {
            let s1 = scaled_log_iterate(p, lambda1, j);
            let s2 = scaled_log_iterate(p, lambda2, j);
            let top = s1.log_value.max(s2.log_value);
            let r = Mat2::diag(
                Complex::new(weight(s1.log_value, top), 0.0),
                Complex::new(weight(s2.log_value, top), 0.0),
            );
            let shape = phase_free_norm(&q, &r);
            (
                top + inner * shape,
                top,
                s1.value_error.max(s2.value_error),
                0.0,
            )
        }
        SpectrumKind::Defective { lambda, q } => {
            let s = scaled_log_iterate(p, lambda, j);
            let top = s.log_value.max(s.log_derivative);
            let r1 = Complex::new(weight(s.log_value, top), 0.0);
            let r2 = Complex::new(weight(s.log_derivative, top), 0.0);
            let shape = phase_free_norm(&q, &Mat2::new(r1, r2, Complex::new(0.0, 0.0), r1));
            (
                top + inner * shape,
                s.log_value,
                s.value_error.max(s.derivative_error),
                (s.log_derivative - s.log_value).max(0.0) + s.derivative_error,
            )
        }
    };
    if !log_norm.is_finite() {
        return if log_norm == f64::NEG_INFINITY {
            (0.0, outer * inner * (bracket.log_radius + bracket.above.max(0.0)))
        } else {
            (f64::INFINITY, f64::INFINITY)
        };
    }
    let v = log_norm.max(0.0);
    let (lo, hi) = bracket.interval(log_rho, inner);
    let spread = (v - lo).max(hi - v) + tracking + slack;
    let rounding = 1e-14 * spectrum.cond_q.min(1e12) * inner;
    (outer * v, outer * (spread + rounding) + 1e-14 * outer * v)
}

/// `log ‖Q R Q^{-1}‖` for the phase-free normal form `R`.
fn phase_free_norm(q: &Mat2, r: &Mat2) -> f64 {
    match q.inverse() {
        Ok(qi) => (*q * *r * qi).operator_norm().ln(),
        Err(_) => f64::INFINITY,
    }
}

/// `G(M) = max(G_p(λ1), G_p(λ2))`.
pub fn green_matrix(p: &Polynomial, m: &Mat2) -> MatrixGreen {
    green_matrix_with_budget(p, m, DEFAULT_BUDGET)
}

pub fn green_matrix_with_budget(p: &Polynomial, m: &Mat2, budget: usize) -> MatrixGreen {
    let spectrum = eigen_decompose(m, &TolerancePolicy::default());
    green_from_spectrum(p, &spectrum, budget)
}

pub fn green_from_spectrum(p: &Polynomial, spectrum: &Spectrum, budget: usize) -> MatrixGreen {
    let [l1, l2] = spectrum.eigenvalues();
    let g1 = green_scalar(p, l1, budget);
    let g2 = if l1 == l2 { g1 } else { green_scalar(p, l2, budget) };
    MatrixGreen {
        value: g1.value.max(g2.value),
        route: GreenRoute::EigenMax,
        error_bound: g1.error_bound.max(g2.error_bound),
    }
}

/// Matrices all of whose eigenvalues lie outside the closed disk of the
/// given radius, where the matrix Böttcher coordinate is defined.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaDomain {
    pub radius: f64,
}

impl OmegaDomain {
    pub fn for_polynomial(p: &Polynomial) -> Self {
        Self {
            radius: boettcher_radius(p),
        }
    }

    /// Rejects radii below the scalar Böttcher radius of `p`.
    pub fn new(p: &Polynomial, radius: f64) -> Result<Self> {
        let min = boettcher_radius(p);
        if !(radius >= min) {
            return Err(Error::OutsideDomain {
                modulus: radius,
                radius: min,
            });
        }
        Ok(Self { radius })
    }

    pub fn contains(&self, z: Complex) -> bool {
        z.norm() > self.radius
    }

    fn check(&self, z: Complex) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                modulus: z.norm(),
                radius: self.radius,
            })
        }
    }
}

/// `Φ_P(M) = Q φ_p(J) Q^{-1}`, where a Jordan block picks up `φ_p'` above the
/// diagonal.
pub fn boettcher_matrix(p: &Polynomial, m: &Mat2, omega: &OmegaDomain) -> Result<Mat2> {
    let spectrum = eigen_decompose(m, &TolerancePolicy::default());
    boettcher_from_spectrum(p, &spectrum, omega)
}

pub fn boettcher_from_spectrum(p: &Polynomial, spectrum: &Spectrum, omega: &OmegaDomain) -> Result<Mat2> {
    for z in spectrum.eigenvalues() {
        omega.check(z)?;
    }
    let inner = match spectrum.kind {
        SpectrumKind::Scalar { lambda } => return Ok(Mat2::scalar(boettcher_scalar(p, lambda)?)),
        SpectrumKind::Distinct { lambda1, lambda2, .. } => {
            Mat2::diag(boettcher_scalar(p, lambda1)?, boettcher_scalar(p, lambda2)?)
        }
        SpectrumKind::Defective { lambda, .. } => {
            let phi = boettcher_scalar(p, lambda)?;
            let dphi = boettcher_derivative_scalar(p, lambda)?;
            Mat2::new(phi, dphi, Complex::new(0.0, 0.0), phi)
        }
    };
    let q = spectrum.conjugator();
    Ok(q * inner * q.inverse()?)
}

/// Truncated Laurent series `b M + b_0 I + b_1 M^{-1} + ... + b_n M^{-n}`.
/// Requires every eigenvalue to have modulus at least twice the Böttcher
/// radius.
pub fn boettcher_series(p: &Polynomial, m: &Mat2, n: usize) -> Result<Mat2> {
    let inv = m.inverse()?;
    let floor = 2.0 * boettcher_radius(p);
    let (l1, l2) = eigenvalues(m);
    for z in [l1, l2] {
        if !(z.norm() >= floor) {
            return Err(Error::OutsideDomain {
                modulus: z.norm(),
                radius: floor,
            });
        }
    }
    let series = LaurentSeries::new(p, n);
    let mut tail = Mat2::ZERO;
    for &c in series.coeffs[1..].iter().rev() {
        tail = (tail + Mat2::scalar(c)) * inv;
    }
    Ok(m.scale(series.leading) + Mat2::scalar(series.coeffs[0]) + tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn poly(coeffs: &[f64]) -> Polynomial {
        Polynomial::from_real(coeffs).unwrap()
    }

    fn z2() -> Polynomial {
        poly(&[0.0, 0.0, 1.0])
    }

    fn cheb() -> Polynomial {
        poly(&[-2.0, 0.0, 1.0])
    }

    const G_CHEB_3: f64 = 0.962_423_650_119_206_9;

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (*a - *b).frobenius_norm() <= tol
    }

    #[test]
    fn direct_examples() {
        let g = green_direct(&z2(), &Mat2::from_real(2.0, 0.0, 0.0, 0.5), 10);
        assert!((g.value - 2f64.ln()).abs() < 1e-3);
        assert!((g.value - 2f64.ln()).abs() <= g.error_bound);
        assert_eq!(g.route, GreenRoute::Direct { n: 10 });
        assert_eq!(green_direct(&z2(), &Mat2::IDENTITY, 10).value, 0.0);
        let jordan = Mat2::from_real(1.0, 1.0, 0.0, 1.0);
        let mut last = f64::INFINITY;
        for n in [10, 20, 40, 80, 200] {
            let g = green_direct(&z2(), &jordan, n);
            // top singular value of [[1, 2^n], [0, 1]]
            let t = 2f64.powi(n as i32);
            let want = (0.5 * (t + (t * t + 4.0).sqrt())).ln() / t;
            assert!((g.value - want).abs() <= 1e-9 * want.max(1e-300), "n={n}: {}", g.value);
            assert!(g.value <= g.error_bound);
            assert!(g.value < last);
            last = g.value;
        }
    }

    #[test]
    fn direct_matches_iteration_before_switch() {
        let p = poly(&[0.1, 0.0, 1.0]);
        let m = Mat2::from_real(1.2, 0.3, -0.4, 0.9);
        let n = 4;
        let want = crate::matpoly::iterate_p(&p, &m, n).last().operator_norm().ln() / 16.0;
        assert!((green_direct(&p, &m, n).value - want).abs() < 1e-14);
    }

    #[test]
    fn direct_large_n_does_not_overflow() {
        let m = Mat2::from_real(3.0, 1.0, 0.0, -0.5);
        for n in [30, 200, 1100] {
            let g = green_direct(&cheb(), &m, n);
            assert!((g.value - G_CHEB_3).abs() <= g.error_bound + 1e-12, "n={n}");
            assert!(g.error_bound < 1e-6);
        }
    }

    #[test]
    fn matrix_examples() {
        let g = green_matrix(&z2(), &Mat2::from_real(2.0, 0.0, 0.0, 0.5));
        assert!((g.value - 2f64.ln()).abs() < 1e-12);
        assert_eq!(g.route, GreenRoute::EigenMax);
        let g = green_matrix(&cheb(), &Mat2::from_real(3.0, 0.0, 0.0, 0.0));
        assert!((g.value - G_CHEB_3).abs() < 1e-10);
        assert_eq!(green_matrix(&z2(), &Mat2::from_real(1.0, 1.0, 0.0, 1.0)).value, 0.0);
    }

    #[test]
    fn boettcher_examples() {
        let m = Mat2::from_real(3.0, 1.0, -2.0, 5.0);
        let omega = OmegaDomain::for_polynomial(&z2());
        assert!(close(&boettcher_matrix(&z2(), &m, &omega).unwrap(), &m, 1e-12));
        let p = poly(&[0.0, 0.0, 2.0]);
        let got = boettcher_matrix(&p, &Mat2::from_real(10.0, 0.0, 0.0, 20.0), &OmegaDomain::for_polynomial(&p)).unwrap();
        assert!(close(&got, &Mat2::from_real(20.0, 0.0, 0.0, 40.0), 1e-12));
        let omega = OmegaDomain::for_polynomial(&cheb());
        let got = boettcher_matrix(&cheb(), &Mat2::from_real(3.0, 1.0, 0.0, 3.0), &omega).unwrap();
        let phi = 1.5 + 1.25f64.sqrt();
        let dphi = 0.5 + 0.75 / 1.25f64.sqrt();
        assert!(close(&got, &Mat2::from_real(phi, dphi, 0.0, phi), 1e-8));
        assert!((dphi - 1.170_820_393_249_936_9).abs() < 1e-15);
    }

    #[test]
    fn boettcher_rejects_inner_eigenvalues() {
        let omega = OmegaDomain::for_polynomial(&cheb());
        let err = boettcher_matrix(&cheb(), &Mat2::from_real(3.0, 0.0, 0.0, 1.0), &omega);
        assert!(matches!(err, Err(Error::OutsideDomain { .. })));
        assert!(OmegaDomain::new(&cheb(), 1.0).is_err());
        assert!(OmegaDomain::new(&cheb(), 5.0).is_ok());
    }

    #[test]
    fn series_examples() {
        let m = Mat2::from_real(30.0, 2.0, 1.0, 40.0);
        for n in 0..5 {
            assert!(close(&boettcher_series(&z2(), &m, n).unwrap(), &m, 1e-12));
        }
        let m = Mat2::from_real(100.0, 0.0, 0.0, 200.0);
        let omega = OmegaDomain::for_polynomial(&cheb());
        let exact = boettcher_matrix(&cheb(), &m, &omega).unwrap();
        assert!(close(&boettcher_series(&cheb(), &m, 5).unwrap(), &exact, 1e-8));
        let m = Mat2::from_real(100.0, 3.0, -1.0, 150.0);
        let exact = boettcher_matrix(&cheb(), &m, &omega).unwrap();
        assert!(close(&boettcher_series(&cheb(), &m, 8).unwrap(), &exact, 1e-10));
    }

    #[test]
    fn series_rejects_bad_input() {
        assert!(matches!(
            boettcher_series(&cheb(), &Mat2::from_real(100.0, 0.0, 0.0, 0.0), 3),
            Err(Error::SingularMatrix)
        ));
        assert!(matches!(
            boettcher_series(&cheb(), &Mat2::from_real(100.0, 0.0, 0.0, 3.0), 3),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn green_boettcher_link() {
        let p = Polynomial::new(vec![c(0.0, 0.25), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let m = Mat2::new(c(3.0, 1.0), c(0.5, 0.0), c(0.2, -0.1), c(-2.5, 0.3));
        let omega = OmegaDomain::for_polynomial(&p);
        let phi = boettcher_matrix(&p, &m, &omega).unwrap();
        let g = green_matrix(&p, &m);
        assert!((g.value - phi.spectral_radius().ln()).abs() < 1e-8);
    }
}
