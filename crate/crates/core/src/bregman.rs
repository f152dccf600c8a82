//! Split Bregman solver for the ROF model `min J(u) + (lambda/2) ||f - u||^2`.
//!
//! The gradient is split off as `d ~ grad u` with Bregman variable `b`. Each
//! iteration performs
//!
//! 1. a u-update solving `(lambda - eta Lap) u = lambda f - eta div(d - b)`,
//! 2. `d = shrink(grad u + b, 1/eta)`,
//! 3. `b = b + grad u - d`,
//!
//! starting from `u = f`, `d = b = 0`. The d-update uses the freshly updated
//! `u`, which is what makes the b-update consistent.
//!
//! Two u-update backends are available. [`UUpdate::Fourier`] solves the
//! linear system exactly with FFTs; [`UUpdate::GaussSeidel`] performs a fixed
//! number of lexicographic sweeps warm-started from the previous `u`.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::grid::{divergence, gradient, norm_l2, ScalarField, VectorField};
use crate::spectral::{NeumannSolver, PeriodicSolver};
use crate::stats::RunStats;

/// Guard for relative-change denominators.
pub const REL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UUpdate {
    Fourier,
    GaussSeidel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BregmanParams {
    /// Splitting weight as a multiple of the fidelity coefficient: `eta = eta_ratio * lambda`.
    pub eta_ratio: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub u_update: UUpdate,
    /// Sweeps per iteration for [`UUpdate::GaussSeidel`].
    pub gs_sweeps: usize,
}

impl Default for BregmanParams {
    fn default() -> Self {
        Self {
            eta_ratio: 2.0,
            tol: 1e-5,
            max_iters: 500,
            u_update: UUpdate::Fourier,
            gs_sweeps: 1,
        }
    }
}

impl BregmanParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta_ratio > 0.0 && self.eta_ratio.is_finite()) {
            return Err(Error::param(format!(
                "eta ratio must be positive, got {}",
                self.eta_ratio
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::param(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::param("max_iters must be at least 1"));
        }
        if self.gs_sweeps == 0 {
            return Err(Error::param("gs_sweeps must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BregmanState {
    pub u: ScalarField,
    pub d: VectorField,
    pub b: VectorField,
}

impl BregmanState {
    pub fn initial(f: &ScalarField) -> Self {
        let (h, w) = f.dims();
        Self {
            u: f.clone(),
            d: VectorField::zeros(h, w),
            b: VectorField::zeros(h, w),
        }
    }

    /// `||d - grad u||_2`.
    pub fn splitting_residual(&self) -> f64 {
        (&self.d - &gradient(&self.u)).norm_l2()
    }
}

/// Isotropic shrinkage: `max(|g| - threshold, 0) g / |g|` per pixel, zero where `g = 0`.
pub fn shrink(g: &VectorField, threshold: f64) -> VectorField {
    let (h, w) = g.dims();
    let mut out = VectorField::zeros(h, w);
    let (g1, g2) = (g.comp1.data(), g.comp2.data());
    let (o1, o2) = (out.comp1.data_mut(), out.comp2.data_mut());
    for k in 0..g1.len() {
        let s = g1[k].hypot(g2[k]);
        if s > threshold {
            let factor = (s - threshold) / s;
            o1[k] = factor * g1[k];
            o2[k] = factor * g2[k];
        }
    }
    out
}

fn rhs(f: &ScalarField, d: &VectorField, b: &VectorField, lambda: f64, eta: f64) -> ScalarField {
    let div = divergence(&(d - b));
    let mut r = f * lambda;
    for (x, dv) in r.data_mut().iter_mut().zip(div.data()) {
        *x -= eta * dv;
    }
    r
}

fn check_finite(field: &ScalarField, stage: &'static str, iteration: usize) -> Result<()> {
    if field.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { stage, iteration })
    }
}

/// Fourier-domain u-update under the periodic Laplacian:
/// `u = F^-1[(lambda F[f] - eta F[div(d - b)]) / (lambda - eta Re(Lap^))]`.
///
/// This is the literal transform-domain update on the given grid. [`p_rof`]
/// runs the same update on the mirror extension of the grid instead, so that
/// its linear system matches the Neumann gradient and divergence.
pub fn u_update_fourier(
    f: &ScalarField,
    d: &VectorField,
    b: &VectorField,
    lambda: f64,
    eta: f64,
) -> Result<ScalarField> {
    if !(lambda > 0.0) || eta < 0.0 {
        return Err(Error::param("u-update needs lambda > 0 and eta >= 0"));
    }
    let (h, w) = f.dims();
    let r = rhs(f, d, b, lambda, eta);
    let u = ScalarField::from_vec(h, w, PeriodicSolver::new(h, w).solve(r.data(), lambda, eta))?;
    check_finite(&u, "u_update_fourier", 0)?;
    Ok(u)
}

/// Gauss-Seidel sweeps on `(lambda - eta Lap_neumann) u = lambda f - eta div(d - b)`,
/// warm-started from `state.u`.
pub fn u_update_gauss_seidel(
    state: &BregmanState,
    f: &ScalarField,
    lambda: f64,
    eta: f64,
    sweeps: usize,
) -> ScalarField {
    let r = rhs(f, &state.d, &state.b, lambda, eta);
    let mut u = state.u.clone();
    gauss_seidel_sweeps(&mut u, &r, lambda, eta, sweeps);
    u
}

fn gauss_seidel_sweeps(
    u: &mut ScalarField,
    rhs: &ScalarField,
    lambda: f64,
    eta: f64,
    sweeps: usize,
) {
    let (h, w) = u.dims();
    let r = rhs.data();
    let x = u.data_mut();
    for _ in 0..sweeps {
        for i in 0..h {
            for j in 0..w {
                let k = i * w + j;
                let mut nb = 0.0;
                let mut deg = 0.0;
                if i > 0 {
                    nb += x[k - w];
                    deg += 1.0;
                }
                if i + 1 < h {
                    nb += x[k + w];
                    deg += 1.0;
                }
                if j > 0 {
                    nb += x[k - 1];
                    deg += 1.0;
                }
                if j + 1 < w {
                    nb += x[k + 1];
                    deg += 1.0;
                }
                x[k] = (r[k] + eta * nb) / (lambda + eta * deg);
            }
        }
    }
}

/// ROF minimizer via split Bregman; `lambda` is the fidelity coefficient.
pub fn p_rof(
    f: &ScalarField,
    lambda: f64,
    params: &BregmanParams,
) -> Result<(ScalarField, RunStats)> {
    let (state, stats) = p_rof_state(f, lambda, params)?;
    Ok((state.u, stats))
}

/// As [`p_rof`], returning the full final state.
pub fn p_rof_state(
    f: &ScalarField,
    lambda: f64,
    params: &BregmanParams,
) -> Result<(BregmanState, RunStats)> {
    params.validate()?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    check_finite(f, "p_rof input", 0)?;

    let start = Instant::now();
    let eta = params.eta_ratio * lambda;
    let threshold = 1.0 / eta;
    let (h, w) = f.dims();
    let solver = match params.u_update {
        UUpdate::Fourier => Some(NeumannSolver::new(h, w)),
        UUpdate::GaussSeidel => None,
    };

    let mut state = BregmanState::initial(f);
    let mut stats = RunStats::default();

    for iter in 1..=params.max_iters {
        let r = rhs(f, &state.d, &state.b, lambda, eta);
        let u_new = match &solver {
            Some(s) => s.solve(&r, lambda, eta),
            None => {
                let mut u = state.u.clone();
                gauss_seidel_sweeps(&mut u, &r, lambda, eta, params.gs_sweeps);
                u
            }
        };
        check_finite(&u_new, "p_rof u-update", iter)?;

        let gb = &gradient(&u_new) + &state.b;
        let d = shrink(&gb, threshold);
        state.b = &gb - &d;
        state.d = d;

        let change = norm_l2(&(&u_new - &state.u)) / norm_l2(&state.u).max(REL_EPS);
        state.u = u_new;
        stats.outer_iters = iter;
        stats.change_trace.push(change);
        if change < params.tol {
            stats.converged = true;
            break;
        }
    }

    stats.inner_iters_total = stats.outer_iters;
    stats.wall_time = start.elapsed();
    Ok((state, stats))
}
