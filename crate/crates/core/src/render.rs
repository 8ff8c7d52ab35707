//! Slice rendering to PGM images or CSV tables.

use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{classify_matrix, ClassifyParams, Stratum};
use crate::error::{Error, Result};
use crate::green::green_matrix_with_budget;
use crate::matrix::{eigen_decompose, Mat2};
use crate::poly::Polynomial;
use crate::scalar::{escape_radius, orbit_classify, EscapeOutcome};
use crate::slice::{pixel_to_matrix, SliceSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Classification,
    Green,
    EscapeTime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageFormat {
    Pgm,
    Csv,
}

pub fn palette(stratum: Stratum) -> u8 {
    match stratum {
        Stratum::FatouEscaping => 255,
        Stratum::FatouBounded => 0,
        Stratum::Julia1 => 128,
        Stratum::Julia2 => 64,
        Stratum::Unresolved => 192,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PixelValue {
    Stratum(Stratum),
    Green(f64),
    /// Fewest steps any eigenvalue needs to leave the escape disk.
    EscapeTime(Option<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderJob {
    pub poly: Polynomial,
    pub slice: SliceSpec,
    pub quantity: Quantity,
    pub params: ClassifyParams,
    pub format: ImageFormat,
    pub output: Option<PathBuf>,
}

/// Per-pixel values in row-major order, row 0 at the top.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<PixelValue>,
}

impl Raster {
    pub fn get(&self, i: usize, j: usize) -> PixelValue {
        self.pixels[j * self.width + i]
    }

    /// 8-bit grey levels: the palette for strata, `G / max G` scaled to 255,
    /// and `255 - n` for escape times (0 when bounded).
    pub fn grey_levels(&self) -> Vec<u8> {
        let g_max = self
            .pixels
            .iter()
            .filter_map(|v| match v {
                PixelValue::Green(g) if g.is_finite() => Some(*g),
                _ => None,
            })
            .fold(0.0, f64::max);
        self.pixels
            .iter()
            .map(|v| match *v {
                PixelValue::Stratum(s) => palette(s),
                PixelValue::Green(g) if !g.is_finite() => 255,
                PixelValue::Green(g) if g_max > 0.0 => (255.0 * g / g_max).round().clamp(0.0, 255.0) as u8,
                PixelValue::Green(_) => 0,
                PixelValue::EscapeTime(None) => 0,
                PixelValue::EscapeTime(Some(n)) => 255usize.saturating_sub(n).max(1) as u8,
            })
            .collect()
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.grey_levels());
        out
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut out = String::from("row,col,value\n");
        for (k, v) in self.pixels.iter().enumerate() {
            let (row, col) = (k / self.width, k % self.width);
            let _ = match v {
                PixelValue::Stratum(s) => writeln!(out, "{row},{col},{s:?}"),
                PixelValue::Green(g) => writeln!(out, "{row},{col},{g:e}"),
                PixelValue::EscapeTime(Some(n)) => writeln!(out, "{row},{col},{n}"),
                PixelValue::EscapeTime(None) => writeln!(out, "{row},{col},bounded"),
            };
        }
        out.into_bytes()
    }

    pub fn encode(&self, format: ImageFormat) -> Vec<u8> {
        match format {
            ImageFormat::Pgm => self.to_pgm(),
            ImageFormat::Csv => self.to_csv(),
        }
    }
}

fn escape_time(p: &Polynomial, m: &Mat2, params: &ClassifyParams) -> Option<usize> {
    let radius = escape_radius(p);
    let spectrum = eigen_decompose(m, &params.tolerance);
    spectrum
        .eigenvalues()
        .iter()
        .filter_map(|&z| match orbit_classify(p, z, params.budget(), radius).outcome {
            EscapeOutcome::Escaped { n, .. } => Some(n),
            EscapeOutcome::Bounded { .. } => None,
        })
        .min()
}

fn pixel_value(job: &RenderJob, m: &Mat2) -> PixelValue {
    match job.quantity {
        Quantity::Classification => PixelValue::Stratum(classify_matrix(&job.poly, m, &job.params).stratum),
        Quantity::Green => PixelValue::Green(green_matrix_with_budget(&job.poly, m, job.params.budget()).value),
        Quantity::EscapeTime => PixelValue::EscapeTime(escape_time(&job.poly, m, &job.params)),
    }
}

/// Evaluates every pixel on a pool of `workers` threads (0 picks the rayon
/// default). Rows are computed independently and collected in order, so the
/// raster does not depend on the worker count.
pub fn render(job: &RenderJob, workers: usize) -> Result<Raster> {
    job.slice.validate()?;
    if job.params.budget() == 0 {
        return Err(Error::InvalidSlice("budget must be positive".into()));
    }
    let (width, height) = (job.slice.width(), job.slice.height());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Workers(e.to_string()))?;
    let rows: Result<Vec<Vec<PixelValue>>> = pool.install(|| {
        (0..height)
            .into_par_iter()
            .map(|j| {
                (0..width)
                    .map(|i| Ok(pixel_value(job, &pixel_to_matrix(&job.slice, i, j)?)))
                    .collect()
            })
            .collect()
    });
    Ok(Raster {
        width,
        height,
        pixels: rows?.concat(),
    })
}

/// Renders and encodes; writes to `job.output` when set.
pub fn run(job: &RenderJob, workers: usize) -> Result<Vec<u8>> {
    let bytes = render(job, workers)?.encode(job.format);
    if let Some(path) = &job.output {
        std::fs::write(path, &bytes)?;
    }
    Ok(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Complex;
    use crate::slice::{EigenSlot, SliceMode, Window};

    fn job(mode: SliceMode, quantity: Quantity, n: usize) -> RenderJob {
        RenderJob {
            poly: Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap(),
            slice: SliceSpec {
                mode,
                window: Window {
                    center: Complex::new(0.0, 0.0),
                    width: 4.0,
                    height: 4.0,
                },
                resolution: [n, n],
            },
            quantity,
            params: ClassifyParams::default(),
            format: ImageFormat::Pgm,
            output: None,
        }
    }

    fn eigen_plane() -> SliceMode {
        SliceMode::EigenPlane {
            fixed: Complex::new(0.5, 0.0),
            q: Mat2::IDENTITY,
            vary: EigenSlot::Second,
        }
    }

    #[test]
    fn pgm_layout() {
        let bytes = run(&job(eigen_plane(), Quantity::Classification, 6), 1).unwrap();
        assert!(bytes.starts_with(b"P5\n6 6\n255\n"));
        assert_eq!(bytes.len(), "P5\n6 6\n255\n".len() + 36);
        assert_eq!(bytes.last(), Some(&255));
    }

    #[test]
    fn csv_layout() {
        let mut j = job(SliceMode::JordanPlane { q: Mat2::IDENTITY }, Quantity::EscapeTime, 4);
        j.format = ImageFormat::Csv;
        let text = String::from_utf8(run(&j, 2).unwrap()).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "row,col,value");
        assert_eq!(lines.len(), 17);
        assert_eq!(lines[1], "0,0,1");
        assert!(text.contains("bounded"));
    }

    #[test]
    fn workers_do_not_change_output() {
        let j = job(SliceMode::JordanPlane { q: Mat2::IDENTITY }, Quantity::Green, 12);
        let one = run(&j, 1).unwrap();
        assert_eq!(one, run(&j, 3).unwrap());
    }

    #[test]
    fn zero_budget_rejected() {
        let mut j = job(eigen_plane(), Quantity::Classification, 2);
        j.params.cycle.budget = 0;
        assert!(render(&j, 1).is_err());
    }
}
