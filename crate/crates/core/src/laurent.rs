//! Laurent expansion of the Böttcher coordinate at infinity.
//!
//! Writing `phi(z) = b z h(1/z)` with `h(0) = 1`, the functional equation
//! `phi(p(z)) = phi(z)^d` becomes `h(u)^d = q(u) h(s(u))`, where
//! `q(u) = p(z)/(a_d z^d)` and `s(u) = 1/p(z)`. Both are power series in
//! `u = 1/z`, `s` starts at `u^d`, so the coefficient of `u^m` on the right
//! only involves coefficients of `h` below `m` and the system is solved one
//! degree at a time.

use crate::poly::{Complex, Polynomial};
use crate::scalar::boettcher_scale;

const ZERO: Complex = Complex::new(0.0, 0.0);

/// Truncated power series `sum_k c_k u^k`, `k = 0..len`.
type Series = Vec<Complex>;

fn mul(a: &[Complex], b: &[Complex], len: usize) -> Series {
    let mut out = vec![ZERO; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == ZERO {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn pow(a: &[Complex], exp: usize, len: usize) -> Series {
    let mut out = vec![ZERO; len];
    out[0] = Complex::new(1.0, 0.0);
    for _ in 0..exp {
        out = mul(&out, a, len);
    }
    out
}

/// Reciprocal of a series with unit constant term.
fn reciprocal(a: &[Complex], len: usize) -> Series {
    let mut out = vec![ZERO; len];
    out[0] = Complex::new(1.0, 0.0);
    for k in 1..len {
        let mut acc = ZERO;
        for j in 1..=k.min(a.len() - 1) {
            acc += a[j] * out[k - j];
        }
        out[k] = -acc;
    }
    out
}

/// `h(s(u))` for `s(0) = 0`, by Horner.
fn compose(h: &[Complex], s: &[Complex], len: usize) -> Series {
    let mut out = vec![ZERO; len];
    for &coef in h.iter().rev() {
        out = mul(&out, s, len);
        out[0] += coef;
    }
    out
}

/// Coefficients `b, b_0, b_1, ...` of `phi_p(z) = b z + b_0 + b_1/z + ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries {
    pub leading: Complex,
    /// `b_0 .. b_n`.
    pub coeffs: Vec<Complex>,
}

impl LaurentSeries {
    pub fn new(p: &Polynomial, order: usize) -> Self {
        let len = order + 2;
        let d = p.degree();
        let lead = p.leading();
        // q(u) = sum_k (a_{d-k} / a_d) u^k
        let q: Series = (0..=d).map(|k| p.coeffs()[d - k] / lead).collect();
        let q_inv = reciprocal(&q, len);
        let mut s = vec![ZERO; len];
        for k in d..len {
            s[k] = q_inv[k - d] / lead;
        }
        let mut h = vec![ZERO; len];
        h[0] = Complex::new(1.0, 0.0);
        for m in 1..len {
            let known = &h[..m];
            let lhs = pow(known, d, m + 1)[m];
            let rhs = mul(&q, &compose(known, &s, m + 1), m + 1)[m];
            h[m] = (rhs - lhs) / d as f64;
        }
        let b = boettcher_scale(p);
        Self {
            leading: b,
            coeffs: h[1..].iter().map(|&c| b * c).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `b z + b_0 + b_1 / z + ... + b_n / z^n`.
    pub fn eval(&self, z: Complex) -> Complex {
        let u = z.inv();
        let mut acc = ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * u + c;
        }
        self.leading * z + acc
    }
}

/// `(b, b_0, b_1, ..., b_n)`.
pub fn laurent_coefficients(p: &Polynomial, n: usize) -> Vec<Complex> {
    let series = LaurentSeries::new(p, n);
    std::iter::once(series.leading).chain(series.coeffs).collect()
}
