//! FFT solvers for the screened Poisson system `(lambda - eta * Lap) u = rhs`.
//!
//! [`PeriodicSolver`] diagonalizes the five-point Laplacian with wrap-around
//! boundary: its transfer function at frequency `(k, l)` is
//! `2 cos(2 pi k / H) + 2 cos(2 pi l / W) - 4`, which is real and non-positive,
//! so the system is invertible whenever `lambda > 0`.
//!
//! [`NeumannSolver`] solves the same system for the mirror-boundary Laplacian
//! of [`crate::grid::laplacian`]. It is the periodic solve applied to the
//! half-sample symmetric extension of the right-hand side (a `2H x 2W` grid,
//! on which the periodic stencil sees exactly the mirrored neighbours),
//! computed without forming the extension: on even-symmetric data the FFT
//! reduces to a DCT-II, with Laplacian symbol
//! `2 cos(pi k / H) + 2 cos(pi l / W) - 4`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustdct::{DctPlanner, TransformType2And3};
use rustfft::{Fft, FftPlanner};

use crate::grid::ScalarField;

// Below this many pixels the row transforms run serially.
const PARALLEL_MIN_PIXELS: usize = 1 << 16;

struct Plans {
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

pub struct PeriodicSolver {
    height: usize,
    width: usize,
    plans: Plans,
    symbol: Vec<f64>,
}

impl std::fmt::Debug for PeriodicSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeriodicSolver")
            .field("height", &self.height)
            .field("width", &self.width)
            .finish()
    }
}

fn transform_rows(buf: &mut [Complex64], width: usize, fft: &Arc<dyn Fft<f64>>) {
    if buf.len() >= PARALLEL_MIN_PIXELS {
        buf.par_chunks_mut(width).for_each(|row| fft.process(row));
    } else {
        fft.process(buf);
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for i in 0..rows {
        for j in 0..cols {
            dst[j * rows + i] = src[i * cols + j];
        }
    }
}

impl PeriodicSolver {
    pub fn new(height: usize, width: usize) -> Self {
        assert!(height > 0 && width > 0);
        let mut planner = FftPlanner::new();
        let plans = Plans {
            row_fwd: planner.plan_fft_forward(width),
            row_inv: planner.plan_fft_inverse(width),
            col_fwd: planner.plan_fft_forward(height),
            col_inv: planner.plan_fft_inverse(height),
        };
        let mut symbol = Vec::with_capacity(height * width);
        for k in 0..height {
            let ck = 2.0 * (2.0 * PI * k as f64 / height as f64).cos() - 2.0;
            for l in 0..width {
                let cl = 2.0 * (2.0 * PI * l as f64 / width as f64).cos() - 2.0;
                symbol.push(ck + cl);
            }
        }
        Self {
            height,
            width,
            plans,
            symbol,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    /// Transfer function of the periodic Laplacian, row-major over `(k, l)`.
    pub fn laplacian_symbol(&self) -> &[f64] {
        &self.symbol
    }

    fn forward(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        let (h, w) = (self.height, self.width);
        transform_rows(buf, w, &self.plans.row_fwd);
        transpose(buf, scratch, h, w);
        transform_rows(scratch, h, &self.plans.col_fwd);
        transpose(scratch, buf, w, h);
    }

    fn inverse(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        let (h, w) = (self.height, self.width);
        transform_rows(buf, w, &self.plans.row_inv);
        transpose(buf, scratch, h, w);
        transform_rows(scratch, h, &self.plans.col_inv);
        transpose(scratch, buf, w, h);
    }

    /// Solves `(lambda - eta * Lap_periodic) u = rhs`; requires `lambda > 0`.
    pub fn solve(&self, rhs: &[f64], lambda: f64, eta: f64) -> Vec<f64> {
        let n = self.height * self.width;
        assert_eq!(rhs.len(), n);
        let mut buf: Vec<Complex64> = rhs.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        let mut scratch = vec![Complex64::default(); n];
        self.forward(&mut buf, &mut scratch);
        let scale = 1.0 / n as f64;
        for (c, s) in buf.iter_mut().zip(&self.symbol) {
            *c *= scale / (lambda - eta * s);
        }
        self.inverse(&mut buf, &mut scratch);
        buf.into_iter().map(|c| c.re).collect()
    }
}

pub struct NeumannSolver {
    height: usize,
    width: usize,
    row_dct: Arc<dyn TransformType2And3<f64>>,
    col_dct: Arc<dyn TransformType2And3<f64>>,
    symbol: Vec<f64>,
}

impl std::fmt::Debug for NeumannSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NeumannSolver")
            .field("height", &self.height)
            .field("width", &self.width)
            .finish()
    }
}

fn dct_rows(buf: &mut [f64], width: usize, inverse: bool, dct: &Arc<dyn TransformType2And3<f64>>) {
    let run = |row: &mut [f64]| {
        if inverse {
            dct.process_dct3(row)
        } else {
            dct.process_dct2(row)
        }
    };
    if buf.len() >= PARALLEL_MIN_PIXELS {
        buf.par_chunks_mut(width).for_each(run);
    } else {
        buf.chunks_mut(width).for_each(run);
    }
}

fn transpose_real(src: &[f64], dst: &mut [f64], rows: usize, cols: usize) {
    for i in 0..rows {
        for j in 0..cols {
            dst[j * rows + i] = src[i * cols + j];
        }
    }
}

impl NeumannSolver {
    pub fn new(height: usize, width: usize) -> Self {
        assert!(height > 0 && width > 0);
        let mut planner = DctPlanner::new();
        let row_dct = planner.plan_dct2(width);
        let col_dct = planner.plan_dct2(height);
        let mut symbol = Vec::with_capacity(height * width);
        for k in 0..height {
            let ck = 2.0 * (PI * k as f64 / height as f64).cos() - 2.0;
            for l in 0..width {
                let cl = 2.0 * (PI * l as f64 / width as f64).cos() - 2.0;
                symbol.push(ck + cl);
            }
        }
        Self {
            height,
            width,
            row_dct,
            col_dct,
            symbol,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    /// Solves `(lambda - eta * Lap_neumann) u = rhs` for `rhs` of this solver's size.
    pub fn solve(&self, rhs: &ScalarField, lambda: f64, eta: f64) -> ScalarField {
        let (h, w) = (self.height, self.width);
        assert_eq!(rhs.dims(), (h, w));
        let mut buf = rhs.data().to_vec();
        let mut scratch = vec![0.0; h * w];

        dct_rows(&mut buf, w, false, &self.row_dct);
        transpose_real(&buf, &mut scratch, h, w);
        dct_rows(&mut scratch, h, false, &self.col_dct);
        transpose_real(&scratch, &mut buf, w, h);

        // DCT-III after DCT-II scales by n/2 per axis.
        let scale = 4.0 / (h * w) as f64;
        for (c, s) in buf.iter_mut().zip(&self.symbol) {
            *c *= scale / (lambda - eta * s);
        }

        dct_rows(&mut buf, w, true, &self.row_dct);
        transpose_real(&buf, &mut scratch, h, w);
        dct_rows(&mut scratch, h, true, &self.col_dct);
        transpose_real(&scratch, &mut buf, w, h);

        ScalarField::from_vec(h, w, buf).expect("size preserved")
    }
}
