//! G-norm subproblem `min_v J*(v/mu) + (lambda/2) ||f - v||^2` solved through
//! its dual ROF problem.
//!
//! With `w = lambda (f - v)` the optimality condition of the subproblem turns
//! into that of `min_w J(w) + 1/(2 lambda mu) ||lambda f - w||^2`, an ordinary
//! ROF instance with fidelity coefficient `1/(lambda mu)`. Hence
//!
//! ```text
//! v = f - P_ROF(lambda f, 1/(lambda mu)) / lambda
//! ```
//!
//! which is the projection of `f` onto the G-ball of radius `mu`, independent
//! of `lambda`.

use crate::bregman::{p_rof, BregmanParams};
use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::stats::RunStats;

/// Inner ROF tolerance relative to the caller's.
pub const INNER_TOL_FACTOR: f64 = 0.1;

/// Fidelity coefficients below this trigger the extended iteration budget.
pub const EXTREME_COEFFICIENT: f64 = 1e-8;

const EXTREME_ITER_FACTOR: usize = 10;

pub fn gnorm_prox(
    f: &ScalarField,
    lambda: f64,
    mu: f64,
    params: &BregmanParams,
) -> Result<(ScalarField, RunStats)> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::param(format!("mu must be positive, got {mu}")));
    }
    let coefficient = 1.0 / (lambda * mu);
    let mut inner = BregmanParams {
        tol: params.tol * INNER_TOL_FACTOR,
        ..*params
    };
    let mut warning = None;
    if coefficient < EXTREME_COEFFICIENT {
        inner.max_iters = inner.max_iters.saturating_mul(EXTREME_ITER_FACTOR);
        warning = Some(format!(
            "gnorm_prox: fidelity coefficient 1/(lambda mu) = {coefficient:e} is extreme; \
             iteration cap raised to {}",
            inner.max_iters
        ));
    }

    let scaled = f * lambda;
    let (w, mut stats) = p_rof(&scaled, coefficient, &inner)?;
    let v = f - &(&w * (1.0 / lambda));
    stats.warnings.extend(warning);
    Ok((v, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_maps_to_zero() {
        let (v, _) = gnorm_prox(
            &ScalarField::zeros(8, 8),
            2.0,
            0.5,
            &BregmanParams::default(),
        )
        .unwrap();
        assert!(v.data().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn constant_maps_to_zero() {
        let f = ScalarField::filled(8, 6, 0.35);
        let (v, _) = gnorm_prox(&f, 3.0, 0.2, &BregmanParams::default()).unwrap();
        assert!(v.data().iter().all(|&x| x.abs() < 1e-12));
    }

    #[test]
    fn extreme_coefficient_warns() {
        let f = ScalarField::from_fn(4, 4, |i, j| ((i + j) % 2) as f64);
        let params = BregmanParams {
            max_iters: 3,
            ..Default::default()
        };
        let (v, stats) = gnorm_prox(&f, 1e5, 1e4, &params).unwrap();
        assert!(v.is_finite());
        assert_eq!(stats.warnings.len(), 1);
        assert!(stats.outer_iters <= 30);
    }

    #[test]
    fn invalid_weights() {
        let f = ScalarField::zeros(2, 2);
        assert!(gnorm_prox(&f, 0.0, 1.0, &BregmanParams::default()).is_err());
        assert!(gnorm_prox(&f, 1.0, -1.0, &BregmanParams::default()).is_err());
    }
}
