//! Two-real-parameter slices through the space of 2x2 matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{conjugate, Mat2};
use crate::poly::Complex;

/// Which diagonal slot of an eigen-plane follows the pixel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenSlot {
    First,
    #[default]
    Second,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SliceMode {
    /// `Q diag(fixed, s + ti) Q^{-1}`, or with the slots swapped.
    EigenPlane {
        fixed: Complex,
        q: Mat2,
        #[serde(default)]
        vary: EigenSlot,
    },
    /// `Q [[s + ti, 1], [0, s + ti]] Q^{-1}`.
    JordanPlane { q: Mat2 },
    /// `base + s s_dir + t t_dir`.
    Affine { base: Mat2, s_dir: Mat2, t_dir: Mat2 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub center: Complex,
    pub width: f64,
    pub height: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub mode: SliceMode,
    pub window: Window,
    /// `[columns, rows]`.
    pub resolution: [usize; 2],
}

impl SliceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SliceSpec = serde_json::from_str(text).map_err(|e| Error::InvalidSlice(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let [w, h] = self.resolution;
        if w == 0 || h == 0 {
            return Err(Error::InvalidSlice(format!("resolution {w}x{h} is empty")));
        }
        let win = &self.window;
        if !(win.width > 0.0 && win.height > 0.0 && win.width.is_finite() && win.height.is_finite()) {
            return Err(Error::InvalidSlice(format!(
                "window {} x {} must have positive finite size",
                win.width, win.height
            )));
        }
        if !win.center.is_finite() {
            return Err(Error::InvalidSlice("window center is not finite".into()));
        }
        match &self.mode {
            SliceMode::EigenPlane { q, .. } | SliceMode::JordanPlane { q } => {
                let det = q.det();
                if !(det.norm() > 1e-14 * q.frobenius_norm().powi(2)) || !q.is_finite() {
                    return Err(Error::InvalidSlice("conjugator is singular".into()));
                }
            }
            SliceMode::Affine { base, s_dir, t_dir } => {
                if !(base.is_finite() && s_dir.is_finite() && t_dir.is_finite()) {
                    return Err(Error::InvalidSlice("affine slice has non-finite entries".into()));
                }
            }
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.resolution[0]
    }

    pub fn height(&self) -> usize {
        self.resolution[1]
    }

    /// Window coordinates `(s, t)` of the center of pixel column `i`, row `j`,
    /// with row 0 at the top.
    pub fn pixel_center(&self, i: usize, j: usize) -> Result<(f64, f64)> {
        let [w, h] = self.resolution;
        if i >= w || j >= h {
            return Err(Error::PixelOutOfRange {
                i,
                j,
                width: w,
                height: h,
            });
        }
        let win = &self.window;
        let s = win.center.re - 0.5 * win.width + (i as f64 + 0.5) * win.width / w as f64;
        let t = win.center.im + 0.5 * win.height - (j as f64 + 0.5) * win.height / h as f64;
        Ok((s, t))
    }

    /// Inverse of [`SliceSpec::pixel_center`] on continuous pixel coordinates.
    pub fn point_to_pixel(&self, s: f64, t: f64) -> (f64, f64) {
        let [w, h] = self.resolution;
        let win = &self.window;
        let i = (s - win.center.re + 0.5 * win.width) * w as f64 / win.width - 0.5;
        let j = (win.center.im + 0.5 * win.height - t) * h as f64 / win.height - 0.5;
        (i, j)
    }

    pub fn point_to_matrix(&self, s: f64, t: f64) -> Result<Mat2> {
        let z = Complex::new(s, t);
        let zero = Complex::new(0.0, 0.0);
        match &self.mode {
            SliceMode::EigenPlane { fixed, q, vary } => {
                let inner = match vary {
                    EigenSlot::First => Mat2::diag(z, *fixed),
                    EigenSlot::Second => Mat2::diag(*fixed, z),
                };
                conjugate(q, &inner)
            }
            SliceMode::JordanPlane { q } => conjugate(q, &Mat2::new(z, Complex::new(1.0, 0.0), zero, z)),
            SliceMode::Affine { base, s_dir, t_dir } => Ok(*base + s_dir.scale(Complex::new(s, 0.0)) + t_dir.scale(Complex::new(t, 0.0))),
        }
    }

    /// Recovers `(s, t)` from a matrix on the slice. Affine slices use the
    /// least-squares fit over the eight real coordinates.
    pub fn matrix_to_point(&self, m: &Mat2) -> Result<(f64, f64)> {
        match &self.mode {
            SliceMode::EigenPlane { q, vary, .. } => {
                let inner = q.inverse()? * *m * *q;
                let z = match vary {
                    EigenSlot::First => inner.a,
                    EigenSlot::Second => inner.d,
                };
                Ok((z.re, z.im))
            }
            SliceMode::JordanPlane { q } => {
                let inner = q.inverse()? * *m * *q;
                let z = (inner.a + inner.d) * 0.5;
                Ok((z.re, z.im))
            }
            SliceMode::Affine { base, s_dir, t_dir } => {
                let real = |x: &Mat2| -> [f64; 8] {
                    let e = x.entries();
                    [e[0].re, e[0].im, e[1].re, e[1].im, e[2].re, e[2].im, e[3].re, e[3].im]
                };
                let (r, u, v) = (real(&(*m - *base)), real(s_dir), real(t_dir));
                let dot = |x: &[f64; 8], y: &[f64; 8]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
                let (uu, uv, vv) = (dot(&u, &u), dot(&u, &v), dot(&v, &v));
                let (ru, rv) = (dot(&r, &u), dot(&r, &v));
                let det = uu * vv - uv * uv;
                if !(det.abs() > 1e-300) {
                    return Err(Error::InvalidSlice("affine directions are dependent".into()));
                }
                Ok(((ru * vv - rv * uv) / det, (rv * uu - ru * uv) / det))
            }
        }
    }
}

/// The matrix at the center of pixel column `i`, row `j`.
pub fn pixel_to_matrix(slice: &SliceSpec, i: usize, j: usize) -> Result<Mat2> {
    let (s, t) = slice.pixel_center(i, j)?;
    slice.point_to_matrix(s, t)
}

/// Continuous pixel coordinates of a matrix on the slice.
pub fn matrix_to_pixel(slice: &SliceSpec, m: &Mat2) -> Result<(f64, f64)> {
    let (s, t) = slice.matrix_to_point(m)?;
    Ok(slice.point_to_pixel(s, t))
}
