//! One-variable polynomial dynamics: escape, Green function, derivative
//! growth and the Böttcher coordinate near infinity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{is_overflow, Complex, Polynomial, OVERFLOW};

pub const DEFAULT_BUDGET: usize = 1000;

/// Modulus past which the Green estimator stops iterating.
pub const GREEN_CUTOFF: f64 = 1e8;

/// Modulus past which orbits are tracked through their logarithm only.
const LOG_SWITCH: f64 = 1e100;

/// `R = max(1, (1 + sum_{i<d} |a_i| + 2) / |a_d|)`, which guarantees
/// `|p(z)| >= 2|z|` whenever `|z| > R`.
pub fn escape_radius(p: &Polynomial) -> f64 {
    let d = p.degree();
    let tail: f64 = p.coeffs()[..d].iter().map(|a| a.norm()).sum();
    ((3.0 + tail) / p.leading().norm()).max(1.0)
}

/// Smallest radius `r` found such that on `|w| >= r` every factor of the
/// Böttcher product satisfies `|p(w)/(a_d w^d) - 1| < 1` and `|p(w)| > |w|`.
///
/// It never exceeds [`escape_radius`], and it is the radius used for the
/// domain of the Böttcher coordinate.
pub fn boettcher_radius(p: &Polynomial) -> f64 {
    let lead = p.leading().norm();
    let d = p.degree() as i32;
    let good = |r: f64| {
        let e = p.tail_ratio_bound(r);
        e < 1.0 && lead * r.powi(d - 1) * (1.0 - e) > 1.0
    };
    let top = escape_radius(p);
    let floor = top * 1e-6;
    let mut hi = top;
    let mut lo = hi * 0.99;
    while lo > floor && good(lo) {
        hi = lo;
        lo *= 0.99;
    }
    if lo <= floor {
        return hi;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if good(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi * (1.0 + 1e-9)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EscapeOutcome {
    Escaped { n: usize, z_n: Complex },
    Bounded { z_n: Complex },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeStatus {
    pub outcome: EscapeOutcome,
    pub budget: usize,
    pub radius: f64,
}

impl EscapeStatus {
    pub fn escaped(&self) -> bool {
        matches!(self.outcome, EscapeOutcome::Escaped { .. })
    }
}

/// Iterates until the modulus exceeds `radius` or `budget` steps are spent.
/// `radius` should be at least [`escape_radius`].
pub fn orbit_classify(p: &Polynomial, z: Complex, budget: usize, radius: f64) -> EscapeStatus {
    let mut w = z;
    let outcome = 'orbit: {
        for n in 0..=budget {
            if w.norm() > radius || is_overflow(w) {
                break 'orbit EscapeOutcome::Escaped { n, z_n: w };
            }
            if n < budget {
                w = p.eval(w);
            }
        }
        EscapeOutcome::Bounded { z_n: w }
    };
    EscapeStatus {
        outcome,
        budget,
        radius,
    }
}

/// An estimate of `G_p(z)` with a certified truncation bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub iterations_used: usize,
    /// No escape within the budget; the value 0 is not a proof of membership.
    pub censored: bool,
}

impl GreenEstimate {
    pub const CENSORED_ZERO: GreenEstimate = GreenEstimate {
        value: 0.0,
        error_bound: 0.0,
        iterations_used: 0,
        censored: true,
    };
}

/// `G_p(z) = lim d^{-n} log|p^n(z)|`.
///
/// The budget bounds the iterations spent inside `|z| <= R`. Once the orbit
/// leaves that disk it doubles in modulus every step and is followed up to
/// [`GREEN_CUTOFF`]; the estimate is `d^{-n} (log|z_n| + log|a_d|/(d-1))` and
/// the bound covers the remaining `sum_k d^{-n-k} log|p(w_k)/(a_d w_k^d)|`.
pub fn green_scalar(p: &Polynomial, z: Complex, budget: usize) -> GreenEstimate {
    let radius = escape_radius(p);
    let cutoff = GREEN_CUTOFF.max(2.0 * radius);
    let d = p.degree() as f64;
    let mut w = z;
    let mut n = 0usize;
    let mut escaped = w.norm() > radius;
    while w.norm() <= cutoff {
        if !escaped && n >= budget {
            return GreenEstimate {
                iterations_used: n,
                ..GreenEstimate::CENSORED_ZERO
            };
        }
        let next = p.eval(w);
        if is_overflow(next) {
            break;
        }
        w = next;
        n += 1;
        escaped |= w.norm() > radius;
    }
    let scale = d.powi(-(n as i32));
    let log_b = p.leading().norm().ln() / (d - 1.0);
    let value = (scale * (w.norm().ln() + log_b)).max(f64::MIN_POSITIVE);
    let eps = p.tail_ratio_bound(w.norm()).min(0.999_999);
    let truncation = scale * (-(1.0 - eps).ln()) / (d - 1.0);
    GreenEstimate {
        value,
        error_bound: truncation + 4.0 * f64::EPSILON * value,
        iterations_used: n,
        censored: false,
    }
}

/// `(p^n(z), (p^n)'(z))` by the chain rule.
pub fn iterate_with_derivative(p: &Polynomial, z: Complex, n: usize) -> (Complex, Complex) {
    let mut w = z;
    let mut der = Complex::new(1.0, 0.0);
    for _ in 0..n {
        der *= p.eval_derivative(w);
        w = p.eval(w);
        if is_overflow(w) || is_overflow(der) {
            let w = if is_overflow(w) { OVERFLOW } else { w };
            let der = if is_overflow(der) { OVERFLOW } else { der };
            return (w, der);
        }
    }
    (w, der)
}

/// Logarithms of `|p^n(z)|` and `|(p^n)'(z)|`, both scaled by `d^{-n}`, with a
/// bound on the scaled error introduced by the asymptotic recursion used once
/// the orbit passes `1e100`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct ScaledLogIterate {
    pub log_value: f64,
    pub log_derivative: f64,
    pub value_error: f64,
    pub derivative_error: f64,
}

pub(crate) fn scaled_log_iterate(p: &Polynomial, z: Complex, n: usize) -> ScaledLogIterate {
    let d = p.degree() as f64;
    let lead = p.leading();
    let log_lead = lead.norm().ln();
    let log_dlead = (d * lead.norm()).ln();
    let deriv_tail = |r: f64| -> f64 {
        let di = p.degree();
        (1..di)
            .map(|i| i as f64 * p.coeffs()[i].norm() / (d * lead.norm()) * r.powi(i as i32 - di as i32))
            .sum()
    };
    let mut w = z;
    let mut exact = true;
    // scale = d^{-k}
    let mut scale = 1.0;
    let mut log_value = w.norm().ln();
    let mut log_derivative = 0.0;
    let mut value_error = 0.0;
    let mut derivative_error = 0.0;
    for _ in 0..n {
        let next_scale = scale / d;
        if exact && w.norm() <= LOG_SWITCH {
            log_derivative = log_derivative / d + p.eval_derivative(w).norm().ln() * next_scale;
            w = p.eval(w);
            log_value = w.norm().ln() * next_scale;
        } else {
            exact = false;
            let modulus = if scale > 0.0 { (log_value / scale).exp() } else { f64::INFINITY };
            let eta = -(1.0 - p.tail_ratio_bound(modulus).min(0.5)).ln();
            let eta_der = -(1.0 - deriv_tail(modulus).min(0.5)).ln();
            log_derivative =
                log_derivative / d + (log_dlead * scale + (d - 1.0) * log_value) / d;
            derivative_error = derivative_error / d
                + ((d - 1.0) * value_error + eta_der * scale) / d;
            log_value += log_lead * next_scale;
            value_error += eta * next_scale;
        }
        scale = next_scale;
    }
    ScaledLogIterate {
        log_value,
        log_derivative,
        value_error,
        derivative_error,
    }
}

/// `d^{-n} log|(p^n)'(z)|` for an escaping `z`; tends to `G_p(z)`.
pub fn derivative_growth(p: &Polynomial, z: Complex, n: usize) -> Result<f64> {
    let budget = DEFAULT_BUDGET.max(n);
    if !orbit_classify(p, z, budget, escape_radius(p)).escaped() {
        return Err(Error::NotEscaping { budget });
    }
    Ok(scaled_log_iterate(p, z, n).log_derivative)
}

/// Principal `(d-1)`-th root of the leading coefficient.
pub fn boettcher_scale(p: &Polynomial) -> Complex {
    let d = p.degree();
    if d == 2 {
        p.leading()
    } else {
        p.leading().powf(1.0 / (d as f64 - 1.0))
    }
}

/// Böttcher coordinate `phi_p(z)` on `|z| > boettcher_radius(p)`.
pub fn boettcher_scalar(p: &Polynomial, z: Complex) -> Result<Complex> {
    let radius = boettcher_radius(p);
    if !(z.norm() > radius) {
        return Err(Error::OutsideDomain {
            modulus: z.norm(),
            radius,
        });
    }
    Ok(boettcher_unchecked(p, z))
}

/// `phi_p(z) = b z prod_k (p^k(z) / (a_d p^{k-1}(z)^d))^{d^{-k}}`, summed in
/// logarithmic form with principal branches.
pub(crate) fn boettcher_unchecked(p: &Polynomial, z: Complex) -> Complex {
    let d = p.degree() as f64;
    let mut w = z;
    let mut scale = 1.0;
    let mut log_sum = Complex::new(0.0, 0.0);
    for _ in 0..10_000 {
        scale /= d;
        let term = p.normalized_ratio(w).ln() * scale;
        log_sum += term;
        if term.norm() <= 1e-14 {
            break;
        }
        w = p.eval(w);
        if is_overflow(w) {
            break;
        }
    }
    boettcher_scale(p) * z * log_sum.exp()
}

/// `phi_p'(z)` by a fourth-order central difference with step
/// `h = max(1e-5, 1e-8 |z|)`.
pub fn boettcher_derivative_scalar(p: &Polynomial, z: Complex) -> Result<Complex> {
    let radius = boettcher_radius(p);
    let h = boettcher_step(z);
    if !(z.norm() - 2.0 * h > radius) {
        return Err(Error::OutsideDomain {
            modulus: z.norm(),
            radius: radius + 2.0 * h,
        });
    }
    Ok(boettcher_derivative_unchecked(p, z))
}

fn boettcher_step(z: Complex) -> f64 {
    (1e-8 * z.norm()).max(1e-5)
}

pub(crate) fn boettcher_derivative_unchecked(p: &Polynomial, z: Complex) -> Complex {
    let h = boettcher_step(z);
    let f = |k: f64| boettcher_unchecked(p, z + Complex::new(k * h, 0.0));
    (f(-2.0) - f(-1.0) * 8.0 + f(1.0) * 8.0 - f(2.0)) / (12.0 * h)
}

/// Parameters of the attracting-cycle search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleSearch {
    pub budget: usize,
    pub max_period: usize,
    /// A tail point counts as a return when it is this close to an earlier one.
    pub return_tol: f64,
    /// Cycles need multiplier modulus below `1 - multiplier_margin`.
    pub multiplier_margin: f64,
}

impl Default for CycleSearch {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            max_period: 64,
            return_tol: 1e-9,
            multiplier_margin: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OrbitFate {
    Escaped { n: usize, z_n: Complex },
    Attracted {
        period: usize,
        multiplier: Complex,
        cycle: Vec<Complex>,
    },
    Undecided { last: Complex },
}

/// Follows the orbit of `z` and reports escape, convergence to an attracting
/// cycle, or neither within the budget.
pub fn orbit_fate(p: &Polynomial, z: Complex, search: &CycleSearch) -> OrbitFate {
    let radius = escape_radius(p);
    let cap = search.max_period + 1;
    let mut ring = vec![z; cap];
    let mut w = z;
    if w.norm() > radius || is_overflow(w) {
        return OrbitFate::Escaped { n: 0, z_n: w };
    }
    for k in 1..=search.budget {
        w = p.eval(w);
        ring[k % cap] = w;
        if w.norm() > radius || is_overflow(w) {
            return OrbitFate::Escaped { n: k, z_n: w };
        }
        if k % 16 != 0 && k != search.budget {
            continue;
        }
        let back = |q: usize| ring[(k - q) % cap];
        let Some(period) =
            (1..=search.max_period.min(k)).find(|&q| (w - back(q)).norm() <= search.return_tol)
        else {
            continue;
        };
        let multiplier = (0..period)
            .map(|j| p.eval_derivative(back(j)))
            .fold(Complex::new(1.0, 0.0), |acc, m| acc * m);
        if multiplier.norm() < 1.0 - search.multiplier_margin {
            let cycle = (0..period).map(back).collect();
            return OrbitFate::Attracted {
                period,
                multiplier,
                cycle,
            };
        }
        if w == back(period) {
            // exactly periodic in floating point and not attracting
            return OrbitFate::Undecided { last: w };
        }
    }
    OrbitFate::Undecided { last: w }
}
