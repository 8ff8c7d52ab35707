//! Stratification of matrices into the escaping Fatou set, the bounded Fatou
//! set and the two Julia strata, from per-eigenvalue verdicts.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::matpoly::eval_p;
use crate::matrix::{eigen_decompose, Mat2, Spectrum, SpectrumKind, TolerancePolicy};
use crate::poly::{Complex, Polynomial};
use crate::scalar::{green_scalar, iterate_with_derivative, orbit_fate, CycleSearch, GreenEstimate, OrbitFate};

/// Iteration budgets and numerical bands used by every verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyParams {
    pub cycle: CycleSearch,
    /// Radius of the neighbour ring sampled around each eigenvalue. A verdict
    /// only stands if all neighbours share it; 0 disables the check.
    pub band: f64,
    pub neighbors: usize,
    pub tolerance: TolerancePolicy,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        Self {
            cycle: CycleSearch::default(),
            band: 1e-3,
            neighbors: 16,
            tolerance: TolerancePolicy::default(),
        }
    }
}

impl ClassifyParams {
    pub fn with_budget(budget: usize) -> Self {
        let mut params = Self::default();
        params.cycle.budget = budget;
        params
    }

    pub fn budget(&self) -> usize {
        self.cycle.budget
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointClass {
    Escaping {
        green: GreenEstimate,
    },
    InteriorAttracting {
        period: usize,
        multiplier_modulus: f64,
    },
    /// Neither escape nor attraction could be certified. The orbit itself may
    /// have escaped while points of the neighbour ring did not.
    BoundedUnresolved {
        escaped_within_budget: bool,
    },
}

impl PointClass {
    pub fn is_escaping(&self) -> bool {
        matches!(self, PointClass::Escaping { .. })
    }

    pub fn is_interior(&self) -> bool {
        matches!(self, PointClass::InteriorAttracting { .. })
    }

    pub fn is_unresolved(&self) -> bool {
        matches!(self, PointClass::BoundedUnresolved { .. })
    }
}

fn same_cycle(a: &[Complex], b: &[Complex]) -> bool {
    b.iter()
        .any(|&w| a.iter().any(|&z| (z - w).norm() <= 1e-6 * z.norm().max(1.0)))
}

fn ring_agrees(p: &Polynomial, z: Complex, center: &OrbitFate, params: &ClassifyParams) -> bool {
    if params.band <= 0.0 || params.neighbors == 0 {
        return true;
    }
    let base = if z == Complex::new(0.0, 0.0) { 0.0 } else { z.arg() };
    (0..params.neighbors).all(|k| {
        let t = base + TAU * k as f64 / params.neighbors as f64;
        let w = z + Complex::from_polar(params.band, t);
        match (center, orbit_fate(p, w, &params.cycle)) {
            (OrbitFate::Escaped { .. }, OrbitFate::Escaped { .. }) => true,
            (OrbitFate::Attracted { cycle: a, .. }, OrbitFate::Attracted { cycle: b, .. }) => {
                same_cycle(a, &b)
            }
            _ => false,
        }
    })
}

pub fn classify_eigenvalue(p: &Polynomial, z: Complex, params: &ClassifyParams) -> PointClass {
    let fate = orbit_fate(p, z, &params.cycle);
    let escaped = matches!(fate, OrbitFate::Escaped { .. });
    let unresolved = PointClass::BoundedUnresolved {
        escaped_within_budget: escaped,
    };
    if !z.is_finite() {
        return unresolved;
    }
    if matches!(fate, OrbitFate::Undecided { .. }) || !ring_agrees(p, z, &fate, params) {
        return unresolved;
    }
    match fate {
        OrbitFate::Escaped { .. } => {
            let green = green_scalar(p, z, params.budget());
            if green.censored {
                unresolved
            } else {
                PointClass::Escaping { green }
            }
        }
        OrbitFate::Attracted {
            period, multiplier, ..
        } => PointClass::InteriorAttracting {
            period,
            multiplier_modulus: multiplier.norm(),
        },
        OrbitFate::Undecided { .. } => unresolved,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stratum {
    FatouEscaping,
    FatouBounded,
    Julia1,
    Julia2,
    Unresolved,
}

impl Stratum {
    pub fn is_julia(&self) -> bool {
        matches!(self, Stratum::Julia1 | Stratum::Julia2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixClass {
    pub stratum: Stratum,
    pub eigenvalues: [Complex; 2],
    pub eigen_verdicts: [PointClass; 2],
    pub defective: bool,
    pub near_defective: bool,
    pub params: ClassifyParams,
}

fn eigen_verdicts(p: &Polynomial, spectrum: &Spectrum, params: &ClassifyParams) -> [PointClass; 2] {
    match spectrum.kind {
        SpectrumKind::Distinct { lambda1, lambda2, .. } => [
            classify_eigenvalue(p, lambda1, params),
            classify_eigenvalue(p, lambda2, params),
        ],
        SpectrumKind::Defective { lambda, .. } | SpectrumKind::Scalar { lambda } => {
            let v = classify_eigenvalue(p, lambda, params);
            [v, v]
        }
    }
}

fn stratum(spectrum: &Spectrum, verdicts: &[PointClass; 2]) -> Stratum {
    if verdicts.iter().any(PointClass::is_escaping) {
        return Stratum::FatouEscaping;
    }
    if !spectrum.is_finite() {
        return Stratum::Unresolved;
    }
    let interior = verdicts.iter().filter(|v| v.is_interior()).count();
    match (spectrum.kind, interior) {
        (_, 2) => Stratum::FatouBounded,
        (SpectrumKind::Distinct { .. }, 1) => Stratum::Julia1,
        (_, 0) => Stratum::Julia2,
        _ => Stratum::Unresolved,
    }
}

pub fn classify_matrix(p: &Polynomial, m: &Mat2, params: &ClassifyParams) -> MatrixClass {
    let spectrum = eigen_decompose(m, &params.tolerance);
    let verdicts = eigen_verdicts(p, &spectrum, params);
    MatrixClass {
        stratum: stratum(&spectrum, &verdicts),
        eigenvalues: spectrum.eigenvalues(),
        eigen_verdicts: verdicts,
        defective: spectrum.is_defective(),
        near_defective: spectrum.near_defective,
        params: *params,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Yes,
    No,
    Unresolved,
}

/// Whether both eigenvalues lie in the filled Julia set.
pub fn in_closure_kp(p: &Polynomial, m: &Mat2, params: &ClassifyParams) -> Membership {
    let spectrum = eigen_decompose(m, &params.tolerance);
    let verdicts = eigen_verdicts(p, &spectrum, params);
    if verdicts.iter().any(PointClass::is_escaping) {
        Membership::No
    } else if !spectrum.is_finite()
        || verdicts.iter().any(|v| {
            matches!(
                v,
                PointClass::BoundedUnresolved {
                    escaped_within_budget: true
                }
            )
        })
    {
        Membership::Unresolved
    } else {
        Membership::Yes
    }
}

/// Smallest `n <= n_max` with `‖P^n(M) - M‖ <= tol max(1, ‖M‖)`. A Jordan
/// block additionally needs `p^n(λ) = λ` and `(p^n)'(λ) = 1` within `tol`.
pub fn periodic_check(p: &Polynomial, m: &Mat2, n_max: usize, tol: f64) -> Option<usize> {
    let scale = tol * m.frobenius_norm().max(1.0);
    let spectrum = eigen_decompose(m, &TolerancePolicy::default());
    let mut cur = *m;
    for n in 1..=n_max {
        cur = eval_p(p, &cur);
        if !cur.is_finite() {
            return None;
        }
        if (cur - *m).frobenius_norm() > scale {
            continue;
        }
        if let SpectrumKind::Defective { lambda, .. } = spectrum.kind {
            let (w, dw) = iterate_with_derivative(p, lambda, n);
            let ok = (w - lambda).norm() <= tol * lambda.norm().max(1.0)
                && (dw - Complex::new(1.0, 0.0)).norm() <= tol * dw.norm().max(1.0);
            if !ok {
                continue;
            }
        }
        return Some(n);
    }
    None
}
