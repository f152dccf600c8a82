//! Chambolle's fixed-point dual projector onto the G-ball and the ROF solver
//! derived from it.
//!
//! The dual field `p` starts at zero and is updated semi-implicitly,
//!
//! ```text
//! g       = grad(div p - f / mu)
//! p_new   = (p + tau g) / (1 + tau |g|)
//! ```
//!
//! with `|g|` the per-pixel Euclidean norm. For `tau < 1/8`, `mu div p`
//! converges to the projection of `f` onto `{ v : ||v||_G <= mu }`.
//! Iteration stops once the largest per-pixel change of `p` drops below
//! `tol` (an L-infinity rule on the dual variable).

use std::time::Instant;

use crate::error::{Error, Result};
use crate::grid::{divergence, divergence_into, ScalarField, VectorField};
use crate::stats::RunStats;

/// Largest admissible step; the fixed point is only guaranteed to attract for `tau < 1/8`.
pub const TAU_LIMIT: f64 = 0.125;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectorParams {
    /// Radius of the G-ball.
    pub mu: f64,
    pub tau: f64,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for ProjectorParams {
    fn default() -> Self {
        Self {
            mu: 1.0,
            tau: 0.124,
            tol: 1e-6,
            max_iters: 2000,
        }
    }
}

impl ProjectorParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::param(format!(
                "mu must be positive, got {}",
                self.mu
            )));
        }
        if !(self.tau > 0.0 && self.tau < TAU_LIMIT) {
            return Err(Error::param(format!(
                "tau must lie in (0, 1/8), got {}",
                self.tau
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
        Ok(())
    }
}

/// Projection of `f` onto the G-ball of radius `params.mu`.
pub fn project_g(f: &ScalarField, params: &ProjectorParams) -> Result<(ScalarField, RunStats)> {
    params.validate()?;
    if !f.is_finite() {
        return Err(Error::NonFinite {
            stage: "project_g input",
            iteration: 0,
        });
    }
    let start = Instant::now();
    let (h, w) = f.dims();
    let inv_mu = 1.0 / params.mu;
    let tau = params.tau;

    let n = h * w;
    let mut p = VectorField::zeros(h, w);
    // Holds div p, then div p - f / mu.
    let mut residual = vec![0.0; n];
    // Gradient of the residual; the last row of g1 and last column of g2 stay zero.
    let mut g1 = vec![0.0; n];
    let mut g2 = vec![0.0; n];
    let mut stats = RunStats::default();

    for iter in 1..=params.max_iters {
        divergence_into(&p, &mut residual);
        for (r, fv) in residual.iter_mut().zip(f.data()) {
            *r -= fv * inv_mu;
        }
        for ((g, next), cur) in g1[..n - w].iter_mut().zip(&residual[w..]).zip(&residual) {
            *g = next - cur;
        }
        for (grow, rrow) in g2.chunks_exact_mut(w).zip(residual.chunks_exact(w)) {
            for ((g, next), cur) in grow[..w - 1].iter_mut().zip(&rrow[1..]).zip(rrow) {
                *g = next - cur;
            }
        }

        let mut change = 0.0f64;
        let p1 = p.comp1.data_mut();
        let p2 = p.comp2.data_mut();
        for k in 0..n {
            let (a, b) = (g1[k], g2[k]);
            let scale = 1.0 / (1.0 + tau * (a * a + b * b).sqrt());
            let n1 = (p1[k] + tau * a) * scale;
            let n2 = (p2[k] + tau * b) * scale;
            let d = (n1 - p1[k]).abs().max((n2 - p2[k]).abs());
            change = if d > change { d } else { change };
            p1[k] = n1;
            p2[k] = n2;
            debug_assert!(n1.hypot(n2) <= 1.0 + 1e-12, "dual constraint violated");
        }

        stats.outer_iters = iter;
        stats.change_trace.push(change);
        if change < params.tol {
            stats.converged = true;
            break;
        }
    }

    // NaN never wins the max above, so check the iterate itself.
    if !p.is_finite() {
        return Err(Error::NonFinite {
            stage: "project_g",
            iteration: stats.outer_iters,
        });
    }
    stats.inner_iters_total = stats.outer_iters;
    stats.wall_time = start.elapsed();
    Ok((&divergence(&p) * params.mu, stats))
}

/// ROF minimizer `f - P_{G_{1/lambda}}(f)`. `params.mu` is ignored.
pub fn rof_chambolle(
    f: &ScalarField,
    lambda: f64,
    params: &ProjectorParams,
) -> Result<(ScalarField, RunStats)> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let proj = ProjectorParams {
        mu: 1.0 / lambda,
        ..*params
    };
    let (v, stats) = project_g(f, &proj)?;
    Ok((f - &v, stats))
}
