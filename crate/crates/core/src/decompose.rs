//! Alternating cartoon + texture decomposition drivers.
//!
//! Both drivers start from `u = v = 0` and alternate two proximal steps until
//! the larger of the relative L2 changes of `u` and `v` drops below
//! `outer_tol`.
//!
//! * Projector path: `v <- P_G_mu(f - u)`, then `u <- ROF(f - v, lambda)`,
//!   both with Chambolle's dual iteration.
//! * Bregman path: `u <- P_ROF(f - v, lambda)`, then
//!   `v <- (f - u) - P_ROF(lambda (f - u), 1/(lambda mu)) / lambda`,
//!   both with split Bregman.

use std::time::Instant;

use crate::bregman::{p_rof, BregmanParams, REL_EPS};
use crate::chambolle::{project_g, rof_chambolle, ProjectorParams};
use crate::energy::fau_energy;
use crate::error::{Error, Result};
use crate::gprox::gnorm_prox;
use crate::grid::{norm_l2, ScalarField};
use crate::stats::RunStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Chambolle,
    Bregman,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Chambolle => "chambolle",
            Method::Bregman => "bregman",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerParams {
    /// `mu` inside is overwritten per step.
    Chambolle(ProjectorParams),
    Bregman(BregmanParams),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompParams {
    pub lambda: f64,
    pub mu: f64,
    pub outer_tol: f64,
    pub max_outer: usize,
    pub inner: InnerParams,
}

pub const DEFAULT_OUTER_TOL: f64 = 1e-3;
pub const DEFAULT_MAX_OUTER: usize = 50;

impl DecompParams {
    /// Defaults for the projector path; inner tolerance is `outer_tol / 10`.
    pub fn chambolle(lambda: f64, mu: f64) -> Self {
        Self {
            lambda,
            mu,
            outer_tol: DEFAULT_OUTER_TOL,
            max_outer: DEFAULT_MAX_OUTER,
            inner: InnerParams::Chambolle(ProjectorParams {
                mu,
                tol: DEFAULT_OUTER_TOL / 10.0,
                ..Default::default()
            }),
        }
    }

    /// Defaults for the Bregman path; inner tolerance is `outer_tol / 10`.
    pub fn bregman(lambda: f64, mu: f64) -> Self {
        Self {
            lambda,
            mu,
            outer_tol: DEFAULT_OUTER_TOL,
            max_outer: DEFAULT_MAX_OUTER,
            inner: InnerParams::Bregman(BregmanParams {
                tol: DEFAULT_OUTER_TOL / 10.0,
                ..Default::default()
            }),
        }
    }

    pub fn for_method(method: Method, lambda: f64, mu: f64) -> Self {
        match method {
            Method::Chambolle => Self::chambolle(lambda, mu),
            Method::Bregman => Self::bregman(lambda, mu),
        }
    }

    /// Sets `outer_tol` and rescales the inner tolerance to a tenth of it.
    pub fn with_outer_tol(mut self, outer_tol: f64) -> Self {
        self.outer_tol = outer_tol;
        match &mut self.inner {
            InnerParams::Chambolle(p) => p.tol = outer_tol / 10.0,
            InnerParams::Bregman(p) => p.tol = outer_tol / 10.0,
        }
        self
    }

    pub fn method(&self) -> Method {
        match self.inner {
            InnerParams::Chambolle(_) => Method::Chambolle,
            InnerParams::Bregman(_) => Method::Bregman,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::param(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::param(format!(
                "mu must be positive, got {}",
                self.mu
            )));
        }
        if !(self.outer_tol > 0.0) {
            return Err(Error::param(format!(
                "outer_tol must be positive, got {}",
                self.outer_tol
            )));
        }
        if self.max_outer == 0 {
            return Err(Error::param("max_outer must be at least 1"));
        }
        match &self.inner {
            InnerParams::Chambolle(p) => ProjectorParams { mu: self.mu, ..*p }.validate(),
            InnerParams::Bregman(p) => p.validate(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DecompositionResult {
    pub cartoon: ScalarField,
    pub texture: ScalarField,
    /// `f - cartoon - texture`.
    pub residual: ScalarField,
    pub stats: RunStats,
    /// Monitored energy after each outer iteration.
    pub energy_trace: Vec<f64>,
}

pub fn decompose(f: &ScalarField, params: &DecompParams) -> Result<DecompositionResult> {
    match params.method() {
        Method::Chambolle => decompose_chambolle(f, params),
        Method::Bregman => decompose_bregman(f, params),
    }
}

fn relative_change(new: &ScalarField, old: &ScalarField) -> f64 {
    norm_l2(&(new - old)) / norm_l2(old).max(REL_EPS)
}

fn alternate(
    f: &ScalarField,
    params: &DecompParams,
    mut step: impl FnMut(
        &ScalarField,
        &ScalarField,
        &mut RunStats,
    ) -> Result<(ScalarField, ScalarField)>,
) -> Result<DecompositionResult> {
    params.validate()?;
    if !f.is_finite() {
        return Err(Error::NonFinite {
            stage: "decompose input",
            iteration: 0,
        });
    }
    let start = Instant::now();
    let (h, w) = f.dims();
    let mut u = ScalarField::zeros(h, w);
    let mut v = ScalarField::zeros(h, w);
    let mut stats = RunStats::default();
    let mut energy_trace = Vec::new();

    for iter in 1..=params.max_outer {
        let (u_new, v_new) = step(&u, &v, &mut stats)?;
        let change = relative_change(&u_new, &u).max(relative_change(&v_new, &v));
        u = u_new;
        v = v_new;
        stats.outer_iters = iter;
        stats.change_trace.push(change);
        energy_trace.push(fau_energy(&u, &v, f, params.lambda, params.mu));
        if change < params.outer_tol {
            stats.converged = true;
            break;
        }
    }

    stats.wall_time = start.elapsed();
    let residual = &(f - &u) - &v;
    Ok(DecompositionResult {
        cartoon: u,
        texture: v,
        residual,
        stats,
        energy_trace,
    })
}

/// Projector-based decomposition.
pub fn decompose_chambolle(f: &ScalarField, params: &DecompParams) -> Result<DecompositionResult> {
    let InnerParams::Chambolle(inner) = params.inner else {
        return Err(Error::param(
            "decompose_chambolle needs projector inner parameters",
        ));
    };
    let texture_params = ProjectorParams {
        mu: params.mu,
        ..inner
    };
    alternate(f, params, |u, _v, stats| {
        let (v_new, vs) = project_g(&(f - u), &texture_params)?;
        stats.absorb_inner(&vs);
        let (u_new, us) = rof_chambolle(&(f - &v_new), params.lambda, &inner)?;
        stats.absorb_inner(&us);
        Ok((u_new, v_new))
    })
}

/// Split-Bregman-based decomposition.
pub fn decompose_bregman(f: &ScalarField, params: &DecompParams) -> Result<DecompositionResult> {
    let InnerParams::Bregman(inner) = params.inner else {
        return Err(Error::param(
            "decompose_bregman needs Bregman inner parameters",
        ));
    };
    alternate(f, params, |_u, v, stats| {
        let (u_new, us) = p_rof(&(f - v), params.lambda, &inner)?;
        stats.absorb_inner(&us);
        let (v_new, vs) = gnorm_prox(&(f - &u_new), params.lambda, params.mu, &inner)?;
        stats.absorb_inner(&vs);
        Ok((u_new, v_new))
    })
}
