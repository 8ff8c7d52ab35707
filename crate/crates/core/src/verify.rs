//! Seeded randomized checks of the library's identities, reported as CSV.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classify::{classify_matrix, in_closure_kp, periodic_check, ClassifyParams, Membership, Stratum};
use crate::error::{Error, Result};
use crate::green::{boettcher_matrix, green_direct, green_matrix, OmegaDomain};
use crate::laurent::LaurentSeries;
use crate::matpoly::{eval_p, iterate_p, lift_iterate};
use crate::matrix::{condition_number, eigen_decompose, eigenvalues, Mat2, TolerancePolicy};
use crate::poly::{Complex, Polynomial};
use crate::render::{run, ImageFormat, Quantity, RenderJob};
use crate::scalar::{
    boettcher_radius, boettcher_scalar, derivative_growth, escape_radius, green_scalar, orbit_classify,
    DEFAULT_BUDGET,
};
use crate::slice::{matrix_to_pixel, pixel_to_matrix, EigenSlot, SliceMode, SliceSpec, Window};

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyRow {
    pub name: String,
    /// Samples actually evaluated; draws outside a property's domain are skipped.
    pub samples: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub rows: Vec<PropertyRow>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("property,samples,max_violation,tolerance,pass\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:e},{:e},{}",
                r.name, r.samples, r.max_violation, r.tolerance, r.pass
            );
        }
        out
    }
}

type Suite = fn(u64, usize) -> PropertyRow;

/// `(name, default sample count, check)`.
const SUITES: &[(&str, usize, Suite)] = &[
    ("scalar-functional-eq", 1000, scalar_functional_eq),
    ("scalar-green-consistency", 1000, scalar_green_consistency),
    ("scalar-green-eq", 1000, scalar_green_eq),
    ("derivative-growth", 1000, derivative_growth_check),
    ("series-agreement", 1000, series_agreement),
    ("censoring", 1000, censoring),
    ("reconstruction", 10_000, reconstruction),
    ("spectral-similarity", 1000, spectral_similarity),
    ("norm-dominates", 10_000, norm_dominates),
    ("det-trace", 10_000, det_trace),
    ("lift-direct", 10_000, lift_direct),
    ("conjugacy", 1000, conjugacy),
    ("semigroup", 1000, semigroup),
    ("green-functional-eq", 1000, green_functional_eq),
    ("route-agreement", 1000, route_agreement),
    ("log-growth", 1000, log_growth),
    ("log-growth-chebyshev", 1000, log_growth_chebyshev),
    ("vanishing", 1000, vanishing),
    ("semiconjugacy", 1000, semiconjugacy),
    ("green-boettcher-link", 1000, green_boettcher_link),
    ("boettcher-equivariance", 1000, boettcher_equivariance),
    ("z2-dichotomy", 10_000, z2_dichotomy),
    ("classification-conjugacy", 300, classification_conjugacy),
    ("complete-invariance", 1000, complete_invariance),
    ("defective-periodic", 300, defective_periodic),
    ("pluriharmonic-mean", 100, pluriharmonic_mean),
    ("pixel-map", 1000, pixel_map),
    ("render-determinism", 4, render_determinism),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

/// Runs one named suite, or every suite for `"all"`. `count` overrides the
/// per-suite default sample count.
pub fn verify(suite: &str, seed: u64, count: Option<usize>) -> Result<VerifyReport> {
    let selected: Vec<_> = if suite == "all" {
        SUITES.iter().collect()
    } else {
        SUITES.iter().filter(|s| s.0 == suite).collect()
    };
    if selected.is_empty() {
        return Err(Error::UnknownSuite(suite.to_string()));
    }
    let rows = selected
        .iter()
        .map(|(_, default, f)| f(seed, count.unwrap_or(*default)))
        .collect();
    Ok(VerifyReport { seed, rows })
}

/// [`verify`] on a dedicated pool of `workers` threads (0 picks the rayon
/// default). Reports do not depend on the worker count.
pub fn verify_with_workers(suite: &str, seed: u64, count: Option<usize>, workers: usize) -> Result<VerifyReport> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Workers(e.to_string()))?
        .install(|| verify(suite, seed, count))
}

fn stream_seed(seed: u64, name: &str) -> u64 {
    // FNV-1a over the name keeps suites independent of each other's draws
    let h = name
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    h ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Draws `count` samples sequentially, evaluates them in parallel and keeps
/// the worst violation. `None` from `eval` skips a sample.
fn check<S, D, E>(name: &str, tolerance: f64, seed: u64, count: usize, mut draw: D, eval: E) -> PropertyRow
where
    S: Send + Sync,
    D: FnMut(&mut ChaCha8Rng) -> S,
    E: Fn(&S) -> Option<f64> + Sync,
{
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, name));
    let draws: Vec<S> = (0..count).map(|_| draw(&mut rng)).collect();
    let results: Vec<Option<f64>> = draws.par_iter().map(&eval).collect();
    let mut samples = 0;
    let mut worst = 0.0f64;
    for v in results.into_iter().flatten() {
        samples += 1;
        worst = worst.max(if v.is_nan() { f64::INFINITY } else { v });
    }
    PropertyRow {
        name: name.to_string(),
        samples,
        max_violation: worst,
        tolerance,
        pass: samples > 0 && worst <= tolerance,
    }
}

fn indicator(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

pub(crate) mod sample {
    use super::*;

    pub fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    /// Polynomials used across the checks.
    pub fn fixtures() -> Vec<Polynomial> {
        vec![
            Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap(),
            Polynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap(),
            Polynomial::from_real(&[-2.0, 0.0, 1.0]).unwrap(),
            Polynomial::quadratic(c(0.0, 0.25)),
            Polynomial::from_real(&[0.1, 0.0, 1.0]).unwrap(),
            Polynomial::from_real(&[0.0, 1.0, 0.0, 3.0]).unwrap(),
            Polynomial::from_real(&[-0.5, 0.0, 2.0]).unwrap(),
        ]
    }

    /// Fixtures whose coefficients are dyadic, so exact Jordan blocks stay
    /// exact under evaluation.
    pub fn dyadic_fixtures() -> Vec<Polynomial> {
        let mut v = fixtures();
        v.remove(4);
        v
    }

    pub fn complex(rng: &mut impl Rng, half_width: f64) -> Complex {
        c(
            rng.gen_range(-half_width..half_width),
            rng.gen_range(-half_width..half_width),
        )
    }

    pub fn matrix(rng: &mut impl Rng, half_width: f64) -> Mat2 {
        Mat2::new(
            complex(rng, half_width),
            complex(rng, half_width),
            complex(rng, half_width),
            complex(rng, half_width),
        )
    }

    pub fn polar(rng: &mut impl Rng, r_min: f64, r_max: f64) -> Complex {
        Complex::from_polar(rng.gen_range(r_min..r_max), rng.gen_range(0.0..TAU))
    }

    /// Random conjugator with Frobenius condition number at most `max_cond`.
    pub fn conjugator(rng: &mut impl Rng, max_cond: f64) -> Mat2 {
        loop {
            let q = matrix(rng, 1.0);
            if condition_number(&q).is_ok_and(|k| k <= max_cond) {
                return q;
            }
        }
    }

    /// Integer matrix with determinant 1.
    pub fn unimodular(rng: &mut impl Rng) -> Mat2 {
        loop {
            let a: i32 = rng.gen_range(-3..=3);
            let b: i32 = rng.gen_range(-3..=3);
            let cc: i32 = rng.gen_range(-3..=3);
            if a == 0 {
                continue;
            }
            // a d - b c = 1 needs a | (1 + b c)
            if (1 + b * cc) % a == 0 {
                let d = (1 + b * cc) / a;
                return Mat2::from_real(a as f64, b as f64, cc as f64, d as f64);
            }
        }
    }

    /// Dyadic complex number on a grid of step 1/8.
    pub fn dyadic(rng: &mut impl Rng, half_width: f64) -> Complex {
        let k = (half_width * 8.0) as i32;
        c(
            rng.gen_range(-k..=k) as f64 / 8.0,
            rng.gen_range(-k..=k) as f64 / 8.0,
        )
    }

    /// `Q [[l, 1], [0, l]] Q^{-1}` computed exactly.
    pub fn exact_jordan(rng: &mut impl Rng, lambda: Complex) -> Mat2 {
        let q = unimodular(rng);
        q * Mat2::jordan(lambda) * q.inverse().expect("unimodular")
    }

    /// Dyadic eigenvalue with modulus in `[r_min, r_max]`.
    pub fn dyadic_annulus(rng: &mut impl Rng, r_min: f64, r_max: f64) -> Complex {
        loop {
            let z = dyadic(rng, r_max);
            if z.norm() >= r_min && z.norm() <= r_max {
                return z;
            }
        }
    }
}

use sample::*;

fn pick<'a>(rng: &mut impl Rng, polys: &'a [Polynomial]) -> &'a Polynomial {
    &polys[rng.gen_range(0..polys.len())]
}

fn scalar_domain_sample(rng: &mut ChaCha8Rng, polys: &[Polynomial]) -> (Polynomial, Complex) {
    let p = pick(rng, polys).clone();
    let r = boettcher_radius(&p);
    let z = Complex::from_polar(r * 10f64.powf(rng.gen_range(0.0..1.0)), rng.gen_range(0.0..TAU));
    (p, z)
}

fn scalar_functional_eq(seed: u64, count: usize) -> PropertyRow {
    let polys = fixtures();
    check("scalar-functional-eq", 1e-9, seed, count, |rng| scalar_domain_sample(rng, &polys), |(p, z)| {
        let phi = boettcher_scalar(p, *z).ok()?;
        let lhs = boettcher_scalar(p, p.eval(*z)).ok()?;
        let rhs = phi.powu(p.degree() as u32);
        Some((lhs - rhs).norm() / rhs.norm())
    })
}

fn scalar_green_consistency(seed: u64, count: usize) -> PropertyRow {
    let polys = fixtures();
    check("scalar-green-consistency", 1e-9, seed, count, |rng| scalar_domain_sample(rng, &polys), |(p, z)| {
        let phi = boettcher_scalar(p, *z).ok()?;
        Some((phi.norm().ln() - green_scalar(p, *z, DEFAULT_BUDGET).value).abs())
    })
}

fn box_point(rng: &mut ChaCha8Rng, polys: &[Polynomial]) -> (Polynomial, Complex) {
    let p = pick(rng, polys).clone();
    let r = escape_radius(&p).min(3.0);
    (p, complex(rng, r))
}

fn scalar_green_eq(seed: u64, count: usize) -> PropertyRow {
    let polys = fixtures();
    check("scalar-green-eq", 1e-10, seed, count, |rng| box_point(rng, &polys), |(p, z)| {
        let g0 = green_scalar(p, *z, DEFAULT_BUDGET);
        let g1 = green_scalar(p, p.eval(*z), DEFAULT_BUDGET);
        if g0.censored || g1.censored {
            return None;
        }
        let d = p.degree() as f64;
        Some(((g1.value - d * g0.value).abs() - g1.error_bound - d * g0.error_bound).max(0.0))
    })
}

fn derivative_growth_check(seed: u64, count: usize) -> PropertyRow {
    let polys = fixtures();
    check("derivative-growth", 1e-4, seed, count, |rng| box_point(rng, &polys), |(p, z)| {
        let g = green_scalar(p, *z, DEFAULT_BUDGET);
        if g.censored {
            return None;
        }
        Some((derivative_growth(p, *z, 25).ok()? - g.value).abs())
    })
}

fn series_agreement(seed: u64, count: usize) -> PropertyRow {
    let polys = fixtures();
    let draw = |rng: &mut ChaCha8Rng| {
        let p = pick(rng, &polys).clone();
        let z = Complex::from_polar(1e4, rng.gen_range(0.0..TAU));
        (p, z, rng.gen_range(0..=6usize))
    };
    check("series-agreement", 1.0, seed, count, draw, |(p, z, n)| {
        let exact = boettcher_scalar(p, *z).ok()?;
        let approx = LaurentSeries::new(p, *n).eval(*z);
        // below f64 resolution the truncation bound is replaced by rounding
        let allowed = (10.0 * z.norm().powi(-(*n as i32 + 1))).max(1e-14 * exact.norm());
        Some((approx - exact).norm() / allowed)
    })
}

fn censoring(seed: u64, count: usize) -> PropertyRow {
    let polys = fixtures();
    check("censoring", 0.0, seed, count, |rng| box_point(rng, &polys), |(p, z)| {
        let escaped = orbit_classify(p, *z, DEFAULT_BUDGET, escape_radius(p)).escaped();
        Some(indicator(!escaped || green_scalar(p, *z, DEFAULT_BUDGET).value > 0.0))
    })
}

/// Generic random matrices, with every tenth an exact Jordan block and every
/// tenth a scalar matrix.
fn mixed_matrix(rng: &mut ChaCha8Rng) -> Mat2 {
    match rng.gen_range(0..10) {
        0 => {
            let lambda = dyadic(rng, 2.0);
            exact_jordan(rng, lambda)
        }
        1 => Mat2::scalar(complex(rng, 3.0)),
        _ => matrix(rng, 3.0),
    }
}

fn reconstruction(seed: u64, count: usize) -> PropertyRow {
    check("reconstruction", 1e-9, seed, count, mixed_matrix, |m| {
        let s = eigen_decompose(m, &TolerancePolicy::default());
        let err = (s.reconstruct() - *m).frobenius_norm();
        Some(err / (s.cond_q * m.frobenius_norm().max(1.0)))
    })
}

fn spectral_similarity(seed: u64, count: usize) -> PropertyRow {
    let draw = |rng: &mut ChaCha8Rng| (matrix(rng, 3.0), conjugator(rng, 100.0));
    check("spectral-similarity", 1e-9, seed, count, draw, |(m, q)| {
        let conj = *q * *m * q.inverse().ok()?;
        let k = condition_number(q).ok()?;
        let rho = m.spectral_radius();
        Some((conj.spectral_radius() - rho).abs() / (k * rho.max(1.0)))
    })
}

fn norm_dominates(seed: u64, count: usize) -> PropertyRow {
    check("norm-dominates", 1e-12, seed, count, mixed_matrix, |m| {
        Some((m.spectral_radius() - m.frobenius_norm()).max(0.0))
    })
}

fn det_trace(seed: u64, count: usize) -> PropertyRow {
    check("det-trace", 1e-10, seed, count, mixed_matrix, |m| {
        let (l1, l2) = eigenvalues(m);
        let scale = m.frobenius_norm().max(1.0);
        let det = (l1 * l2 - m.det()).norm() / (scale * scale);
        let tr = (l1 + l2 - m.trace()).norm() / scale;
        Some(det.max(tr))
    })
}

fn lift_sample(rng: &mut ChaCha8Rng, polys: &[Polynomial]) -> (Polynomial, Mat2, usize) {
    let kind = rng.gen_range(0..10);
    let polys_exact = dyadic_fixtures();
    let (p, m) = match kind {
        0 => {
            let p = pick(rng, &polys_exact).clone();
            let lambda = dyadic(rng, 1.5);
            (p, exact_jordan(rng, lambda))
        }
        1 => (pick(rng, polys).clone(), Mat2::scalar(complex(rng, 1.5))),
        _ => {
            let q = conjugator(rng, 1e3);
            let m = q * Mat2::diag(complex(rng, 1.5), complex(rng, 1.5)) * q.inverse().unwrap();
            (pick(rng, polys).clone(), m)
        }
    };
    (p, m, rng.gen_range(0..=12))
}

fn lift_violation(p: &Polynomial, m: &Mat2, n: usize) -> Option<f64> {
    let s = eigen_decompose(m, &TolerancePolicy::default());
    if s.cond_q > 1e3 {
        return None;
    }
    let orbit = iterate_p(p, m, n);
    if orbit.overflowed_at.is_some() {
        return None;
    }
    let lift = lift_iterate(p, &s, n);
    if !lift.is_finite() {
        return None;
    }
    let err = (*orbit.last() - lift).frobenius_norm();
    Some(err / (s.cond_q * s.cond_q * lift.frobenius_norm().max(1.0)))
}

fn lift_direct(seed: u64, count: usize) -> PropertyRow {
    let polys = fixtures();
    check("lift-direct", 1e-6, seed, count, |rng| lift_sample(rng, &polys), |(p, m, n)| {
        lift_violation(p, m, *n)
    })
}

fn conjugacy(seed: u64, count: usize) -> PropertyRow {
    let polys = fixtures();
    let draw = |rng: &mut ChaCha8Rng| (pick(rng, &polys).clone(), matrix(rng, 2.0), conjugator(rng, 100.0));
    check("conjugacy", 1e-9, seed, count, draw, |(p, m, q)| {
        let qi = q.inverse().ok()?;
        let k = condition_number(q).ok()?;
        let lhs = eval_p(p, &(*q * *m * qi));
        let rhs = *q * eval_p(p, m) * qi;
        let norm = m.frobenius_norm().max(1.0);
        let scale: f64 = p
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm() * norm.powi(i as i32))
            .sum();
        Some((lhs - rhs).frobenius_norm() / (k * k * scale))
    })
}

fn semigroup(seed: u64, count: usize) -> PropertyRow {
    let polys = fixtures();
    let draw = |rng: &mut ChaCha8Rng| {
        let (p, m, _) = lift_sample(rng, &polys);
        (p, m, rng.gen_range(0..=6usize), rng.gen_range(0..=6usize))
    };
    check("semigroup", 1e-6, seed, count, draw, |(p, m, a, b)| {
        let s = eigen_decompose(m, &TolerancePolicy::default());
        if s.cond_q > 1e3 {
            return None;
        }
        let whole = iterate_p(p, m, a + b);
        if whole.overflowed_at.is_some() {
            return None;
        }
        let split = iterate_p(p, &lift_iterate(p, &s, *a), *b);
        if split.overflowed_at.is_some() {
            return None;
        }
        let err = (*whole.last() - *split.last()).frobenius_norm();
        Some(err / (s.cond_q * s.cond_q * whole.last().frobenius_norm().max(1.0)))
    })
}

pub(crate) fn green_eq_polys() -> Vec<Polynomial> {
    fixtures().into_iter().take(4).collect()
}

fn green_functional_eq(seed: u64, count: usize) -> PropertyRow {
    let polys = green_eq_polys();
    let draw = |rng: &mut ChaCha8Rng| (pick(rng, &polys).clone(), matrix(rng, 2.0));
    check("green-functional-eq", 1e-8, seed, count, draw, |(p, m)| {
        let image = eval_p(p, m);
        if !image.is_finite() {
            return None;
        }
        let g0 = green_matrix(p, m);
        let g1 = green_matrix(p, &image);
        let d = p.degree() as f64;
        Some(((g1.value - d * g0.value).abs() - g1.error_bound - d * g0.error_bound).max(0.0))
    })
}

fn route_agreement(seed: u64, count: usize) -> PropertyRow {
    let polys = fixtures();
    let draw = |rng: &mut ChaCha8Rng| (pick(rng, &polys).clone(), matrix(rng, 2.0));
    check("route-agreement", 1e-10, seed, count, draw, |(p, m)| {
        let direct = green_direct(p, m, 20);
        let eigen = green_matrix(p, m);
        Some(((direct.value - eigen.value).abs() - direct.error_bound - eigen.error_bound).max(0.0))
    })
}

fn log_growth(seed: u64, count: usize) -> PropertyRow {
    let p = Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap();
    check("log-growth", 1e-9, seed, count, |rng| matrix(rng, 3.0), |m| {
        let rho = m.spectral_radius();
        if rho <= 1.0 {
            return None;
        }
        Some((green_matrix(&p, m).value - rho.ln()).abs())
    })
}

/// Sampled `sup |G_p(z) - log|z||` over `R <= |z| <= 1e6`.
pub fn log_growth_constant(p: &Polynomial) -> f64 {
    let r = escape_radius(p);
    let steps = 200;
    let angles = 720;
    let mut worst = 0.0f64;
    for k in 0..=steps {
        let radius = r * (1e6 / r).powf(k as f64 / steps as f64);
        for a in 0..angles {
            let z = Complex::from_polar(radius, TAU * a as f64 / angles as f64);
            worst = worst.max((green_scalar(p, z, DEFAULT_BUDGET).value - radius.ln()).abs());
        }
    }
    // margin for the angular grid
    worst * (1.0 + 1e-3) + 1e-12
}

fn log_growth_chebyshev(seed: u64, count: usize) -> PropertyRow {
    let p = Polynomial::from_real(&[-2.0, 0.0, 1.0]).unwrap();
    let bound = log_growth_constant(&p);
    let r = escape_radius(&p);
    let draw = |rng: &mut ChaCha8Rng| {
        let top = r * (1e6 / r).powf(rng.gen_range(0.0..1.0));
        let l1 = Complex::from_polar(top, rng.gen_range(0.0..TAU));
        let l2 = polar(rng, 0.0, top);
        let q = conjugator(rng, 100.0);
        q * Mat2::diag(l1, l2) * q.inverse().unwrap()
    };
    check("log-growth-chebyshev", bound, seed, count, draw, |m| {
        let rho = m.spectral_radius();
        if !(rho > r && rho < 1e6) {
            return None;
        }
        Some((green_matrix(&p, m).value - rho.ln()).abs())
    })
}

fn vanishing(seed: u64, count: usize) -> PropertyRow {
    let polys = fixtures();
    let params = ClassifyParams::default();
    let draw = |rng: &mut ChaCha8Rng| {
        let p = pick(rng, &polys).clone();
        let q = conjugator(rng, 100.0);
        let m = q * Mat2::diag(complex(rng, 1.0), complex(rng, 1.0)) * q.inverse().unwrap();
        (p, m)
    };
    check("vanishing", 0.0, seed, count, draw, |(p, m)| {
        if in_closure_kp(p, m, &params) != Membership::Yes {
            return None;
        }
        Some(green_matrix(p, m).value)
    })
}

/// A matrix whose eigenvalues lie in the Böttcher domain: conjugated
/// diagonal, or (when `allow_jordan`) an exact Jordan block.
fn omega_sample(rng: &mut ChaCha8Rng, allow_jordan: bool) -> (Polynomial, Mat2) {
    if allow_jordan && rng.gen_range(0..5) == 0 {
        let p = pick(rng, &dyadic_fixtures()).clone();
        let r = boettcher_radius(&p);
        let lambda = dyadic_annulus(rng, 1.1 * r + 0.01, 4.0 * r + 1.0);
        return (p, exact_jordan(rng, lambda));
    }
    let p = pick(rng, &fixtures()).clone();
    let r = boettcher_radius(&p);
    let q = conjugator(rng, 100.0);
    let d = Mat2::diag(polar(rng, 1.05 * r, 5.0 * r), polar(rng, 1.05 * r, 5.0 * r));
    (p, q * d * q.inverse().unwrap())
}

fn semiconjugacy(seed: u64, count: usize) -> PropertyRow {
    check("semiconjugacy", 1e-7, seed, count, |rng| omega_sample(rng, true), |(p, m)| {
        let omega = OmegaDomain::for_polynomial(p);
        let s = eigen_decompose(m, &TolerancePolicy::default());
        let phi = boettcher_matrix(p, m, &omega).ok()?;
        let lhs = boettcher_matrix(p, &eval_p(p, m), &omega).ok()?;
        let rhs = phi.powi(p.degree() as u32);
        let scale = phi.frobenius_norm().powi(p.degree() as i32);
        Some((lhs - rhs).frobenius_norm() / (s.cond_q * s.cond_q * scale))
    })
}

fn green_boettcher_link(seed: u64, count: usize) -> PropertyRow {
    check("green-boettcher-link", 1e-8, seed, count, |rng| omega_sample(rng, false), |(p, m)| {
        let phi = boettcher_matrix(p, m, &OmegaDomain::for_polynomial(p)).ok()?;
        Some((green_matrix(p, m).value - phi.spectral_radius().ln()).abs())
    })
}

fn boettcher_equivariance(seed: u64, count: usize) -> PropertyRow {
    let draw = |rng: &mut ChaCha8Rng| {
        let (p, m) = omega_sample(rng, true);
        (p, m, conjugator(rng, 100.0))
    };
    check("boettcher-equivariance", 1e-9, seed, count, draw, |(p, m, q)| {
        let omega = OmegaDomain::for_polynomial(p);
        let qi = q.inverse().ok()?;
        let conj = *q * *m * qi;
        let lhs = boettcher_matrix(p, &conj, &omega).ok()?;
        let phi = boettcher_matrix(p, m, &omega).ok()?;
        let rhs = *q * phi * qi;
        let k = condition_number(q).ok()?;
        let tol = TolerancePolicy::default();
        let cond = eigen_decompose(m, &tol).cond_q.max(eigen_decompose(&conj, &tol).cond_q);
        Some((lhs - rhs).frobenius_norm() / (k * k * cond * phi.frobenius_norm().max(1.0)))
    })
}

/// Expected stratum for `z^2` from eigenvalue moduli, or `None` within
/// `1e-9` of a band edge.
pub fn z2_expected(m: &Mat2, band: f64) -> Option<Stratum> {
    let (l1, l2) = eigenvalues(m);
    let mut zones = [0i8; 2];
    for (zone, l) in zones.iter_mut().zip([l1, l2]) {
        let off = l.norm() - 1.0;
        if (off.abs() - band).abs() < 1e-9 {
            return None;
        }
        *zone = if off > band {
            1
        } else if off < -band {
            -1
        } else {
            0
        };
    }
    Some(match (zones[0], zones[1]) {
        (1, _) | (_, 1) => Stratum::FatouEscaping,
        (-1, -1) => Stratum::FatouBounded,
        (0, 0) => Stratum::Julia2,
        _ => Stratum::Julia1,
    })
}

fn z2_dichotomy(seed: u64, count: usize) -> PropertyRow {
    let p = Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap();
    let params = ClassifyParams::default();
    // wide boxes almost never land near the unit circle, so half the draws
    // are placed there
    let draw = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.5) {
            matrix(rng, 3.0)
        } else {
            let q = conjugator(rng, 100.0);
            let l1 = polar(rng, 0.99, 1.01);
            let l2 = polar(rng, 0.0, 1.01);
            q * Mat2::diag(l1, l2) * q.inverse().unwrap()
        }
    };
    check("z2-dichotomy", 0.0, seed, count, draw, |m| {
        let want = z2_expected(m, params.band)?;
        Some(indicator(classify_matrix(&p, m, &params).stratum == want))
    })
}

fn classification_conjugacy(seed: u64, count: usize) -> PropertyRow {
    let polys = green_eq_polys();
    let params = ClassifyParams::default();
    let draw = |rng: &mut ChaCha8Rng| (pick(rng, &polys).clone(), matrix(rng, 1.5), conjugator(rng, 100.0));
    check("classification-conjugacy", 0.0, seed, count, draw, |(p, m, q)| {
        let a = classify_matrix(p, m, &params).stratum;
        let b = classify_matrix(p, &(*q * *m * q.inverse().ok()?), &params).stratum;
        if a == Stratum::Unresolved || b == Stratum::Unresolved {
            return None;
        }
        Some(indicator(a == b))
    })
}

fn complete_invariance(seed: u64, count: usize) -> PropertyRow {
    let p = Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap();
    let params = ClassifyParams::default();
    // eigenvalues exactly on, well inside or well outside the unit circle
    let draw = |rng: &mut ChaCha8Rng| {
        let eig = |rng: &mut ChaCha8Rng| match rng.gen_range(0..3) {
            0 => Complex::from_polar(1.0, rng.gen_range(0.0..TAU)),
            1 => polar(rng, 0.0, 0.9),
            _ => polar(rng, 1.1, 2.0),
        };
        let (l1, l2) = (eig(rng), eig(rng));
        if rng.gen_range(0..5) == 0 {
            let q = conjugator(rng, 100.0);
            return q * Mat2::jordan(l1) * q.inverse().unwrap();
        }
        let q = conjugator(rng, 100.0);
        q * Mat2::diag(l1, l2) * q.inverse().unwrap()
    };
    check("complete-invariance", 0.0, seed, count, draw, |m| {
        let a = classify_matrix(&p, m, &params).stratum;
        let b = classify_matrix(&p, &eval_p(&p, m), &params).stratum;
        if a == Stratum::Unresolved || b == Stratum::Unresolved {
            return None;
        }
        let same_escape = (a == Stratum::FatouEscaping) == (b == Stratum::FatouEscaping);
        let julia_kept = !a.is_julia() || b.is_julia();
        Some(indicator(same_escape && julia_kept))
    })
}

fn defective_periodic(seed: u64, count: usize) -> PropertyRow {
    let params = ClassifyParams::default();
    // parabolic points: z + z^2 at 0, z^2 + 1/4 at 1/2, z^2 - 3/4 at -1/2
    let parabolic = [
        (Polynomial::from_real(&[0.0, 1.0, 1.0]).unwrap(), 0.0),
        (Polynomial::from_real(&[0.25, 0.0, 1.0]).unwrap(), 0.5),
        (Polynomial::from_real(&[-0.75, 0.0, 1.0]).unwrap(), -0.5),
    ];
    let draw = |rng: &mut ChaCha8Rng| {
        let (p, l) = parabolic[rng.gen_range(0..parabolic.len())].clone();
        let lambda = if rng.gen_bool(0.5) { c(l, 0.0) } else { dyadic(rng, 1.5) };
        (p, exact_jordan(rng, lambda))
    };
    check("defective-periodic", 0.0, seed, count, draw, |(p, m)| {
        periodic_check(p, m, 8, 1e-9)?;
        if !eigen_decompose(m, &params.tolerance).is_defective() {
            return None;
        }
        Some(indicator(classify_matrix(p, m, &params).stratum == Stratum::Julia2))
    })
}

fn pluriharmonic_mean(seed: u64, count: usize) -> PropertyRow {
    let polys = fixtures();
    let draw = |rng: &mut ChaCha8Rng| {
        let p = pick(rng, &polys).clone();
        let m = matrix(rng, 2.5);
        let v = matrix(rng, 1.0);
        (p, m, v.scale(c(1.0 / v.frobenius_norm(), 0.0)))
    };
    check("pluriharmonic-mean", 1e-4, seed, count, draw, |(p, m, v)| {
        let radius = 1e-3;
        let points = 64;
        // harmonic only where one escaping eigenvalue dominates throughout
        let dominant_gap = |x: &Mat2| -> Option<f64> {
            let (l1, l2) = eigenvalues(x);
            if (l1 - l2).norm() < 0.05 {
                return None;
            }
            let (g1, g2) = (green_scalar(p, l1, DEFAULT_BUDGET), green_scalar(p, l2, DEFAULT_BUDGET));
            Some((g1.value - g2.value).abs().min(g1.value.max(g2.value)))
        };
        if dominant_gap(m)? < 0.05 {
            return None;
        }
        let mut sum = 0.0;
        for k in 0..points {
            let x = *m + v.scale(Complex::from_polar(radius, TAU * k as f64 / points as f64));
            if dominant_gap(&x)? < 0.01 {
                return None;
            }
            sum += green_matrix(p, &x).value;
        }
        Some((sum / points as f64 - green_matrix(p, m).value).abs())
    })
}

fn random_slice(rng: &mut ChaCha8Rng) -> SliceSpec {
    let window = Window {
        center: complex(rng, 1.0),
        width: rng.gen_range(1.0..8.0),
        height: rng.gen_range(1.0..8.0),
    };
    let mode = match rng.gen_range(0..3) {
        0 => SliceMode::EigenPlane {
            fixed: complex(rng, 1.0),
            q: conjugator(rng, 10.0),
            vary: if rng.gen_bool(0.5) { EigenSlot::First } else { EigenSlot::Second },
        },
        1 => SliceMode::JordanPlane {
            q: conjugator(rng, 10.0),
        },
        _ => SliceMode::Affine {
            base: matrix(rng, 1.0),
            s_dir: matrix(rng, 1.0),
            t_dir: matrix(rng, 1.0),
        },
    };
    SliceSpec {
        mode,
        window,
        resolution: [rng.gen_range(1..=64), rng.gen_range(1..=64)],
    }
}

fn pixel_map(seed: u64, count: usize) -> PropertyRow {
    let draw = |rng: &mut ChaCha8Rng| {
        let slice = random_slice(rng);
        let i = rng.gen_range(0..slice.width());
        let j = rng.gen_range(0..slice.height());
        (slice, i, j)
    };
    check("pixel-map", 1e-12, seed, count, draw, |(slice, i, j)| {
        let m = pixel_to_matrix(slice, *i, *j).ok()?;
        let (x, y) = matrix_to_pixel(slice, &m).ok()?;
        Some((x - *i as f64).abs().max((y - *j as f64).abs()))
    })
}

fn render_determinism(seed: u64, count: usize) -> PropertyRow {
    let polys = fixtures();
    let draw = |rng: &mut ChaCha8Rng| {
        let mut slice = random_slice(rng);
        slice.resolution = [rng.gen_range(4..=16), rng.gen_range(4..=16)];
        let quantity = [Quantity::Classification, Quantity::Green, Quantity::EscapeTime][rng.gen_range(0..3)];
        RenderJob {
            poly: pick(rng, &polys).clone(),
            slice,
            quantity,
            params: ClassifyParams::with_budget(200),
            format: ImageFormat::Pgm,
            output: None,
        }
    };
    check("render-determinism", 0.0, seed, count, draw, |job| {
        let one = run(job, 1).ok()?;
        let many = run(job, 3).ok()?;
        Some(indicator(one == many))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_and_rows() {
        let report = verify("det-trace", 7, Some(50)).unwrap();
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("property,samples,max_violation,tolerance,pass"));
        assert!(lines.next().unwrap().starts_with("det-trace,50,"));
        assert!(report.passed());
    }

    #[test]
    fn deterministic_for_a_seed() {
        let a = verify("conjugacy", 11, Some(100)).unwrap().to_csv();
        let b = verify("conjugacy", 11, Some(100)).unwrap().to_csv();
        assert_eq!(a, b);
        let c = verify("conjugacy", 12, Some(100)).unwrap().to_csv();
        assert_ne!(a, c);
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(verify("nope", 0, None), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn unimodular_has_unit_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            assert_eq!(unimodular(&mut rng).det(), c(1.0, 0.0));
        }
    }

    #[test]
    fn exact_jordan_is_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let lambda = dyadic(&mut rng, 2.0);
            let m = exact_jordan(&mut rng, lambda);
            let s = eigen_decompose(&m, &TolerancePolicy::default());
            assert!(s.is_defective(), "{m:?}");
            assert_eq!(s.eigenvalues()[0], lambda);
        }
    }

    #[test]
    fn z2_expectation_zones() {
        let m = Mat2::diag(c(0.5, 0.0), c(1.0, 0.0));
        assert_eq!(z2_expected(&m, 1e-3), Some(Stratum::Julia1));
        let m = Mat2::diag(c(0.5, 0.0), c(1.5, 0.0));
        assert_eq!(z2_expected(&m, 1e-3), Some(Stratum::FatouEscaping));
    }
}
