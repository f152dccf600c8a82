//! Side-by-side timing of the projector and Bregman decomposition paths.

use crate::decompose::{decompose, DecompParams, InnerParams, Method};
use crate::energy::fau_energy;
use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::{BregmanParams, ProjectorParams};

pub const CSV_HEADER: [&str; 5] = [
    "method",
    "outer_iters",
    "inner_iters_total",
    "wall_time_s",
    "final_fau_energy",
];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub method: Method,
    pub outer_iters: usize,
    pub inner_iters_total: usize,
    pub wall_time_s: f64,
    pub final_fau_energy: f64,
    pub converged: bool,
}

/// Shared settings; each method gets its own inner parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub lambda: f64,
    pub mu: f64,
    pub outer_tol: f64,
    pub max_outer: usize,
    pub projector: ProjectorParams,
    pub bregman: BregmanParams,
}

impl BenchConfig {
    /// Module defaults with inner tolerances tied to `outer_tol / 10`.
    pub fn new(lambda: f64, mu: f64, outer_tol: f64) -> Self {
        let inner_tol = outer_tol / 10.0;
        Self {
            lambda,
            mu,
            outer_tol,
            max_outer: crate::decompose::DEFAULT_MAX_OUTER,
            projector: ProjectorParams {
                mu,
                tol: inner_tol,
                ..Default::default()
            },
            bregman: BregmanParams {
                tol: inner_tol,
                ..Default::default()
            },
        }
    }

    pub fn params(&self, method: Method) -> DecompParams {
        let inner = match method {
            Method::Chambolle => InnerParams::Chambolle(self.projector),
            Method::Bregman => InnerParams::Bregman(self.bregman),
        };
        DecompParams {
            lambda: self.lambda,
            mu: self.mu,
            outer_tol: self.outer_tol,
            max_outer: self.max_outer,
            inner,
        }
    }
}

/// Runs the projector path, then the Bregman path, on the same input.
pub fn run_benchmark(f: &ScalarField, config: &BenchConfig) -> Result<Vec<BenchRow>> {
    [Method::Chambolle, Method::Bregman]
        .into_iter()
        .map(|method| {
            let r = decompose(f, &config.params(method))?;
            Ok(BenchRow {
                method,
                outer_iters: r.stats.outer_iters,
                inner_iters_total: r.stats.inner_iters_total,
                wall_time_s: r.stats.wall_time_s(),
                final_fau_energy: fau_energy(&r.cartoon, &r.texture, f, config.lambda, config.mu),
                converged: r.stats.converged,
            })
        })
        .collect()
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let to_err = |e: csv::Error| Error::Io {
        path: "<csv>".into(),
        source: e.into(),
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(to_err)?;
    for r in rows {
        w.write_record([
            r.method.name().to_string(),
            r.outer_iters.to_string(),
            r.inner_iters_total.to_string(),
            format!("{:.6}", r.wall_time_s),
            r.final_fau_energy.to_string(),
        ])
        .map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::Io {
        path: "<csv>".into(),
        source: e,
    })
}

/// Method with the smaller wall time; ties go to the first row.
pub fn fastest(rows: &[BenchRow]) -> Option<&BenchRow> {
    rows.iter().reduce(|best, r| {
        if r.wall_time_s < best.wall_time_s {
            r
        } else {
            best
        }
    })
}

pub fn summary_line(rows: &[BenchRow]) -> String {
    match fastest(rows) {
        Some(best) => {
            let slowest = rows
                .iter()
                .map(|r| r.wall_time_s)
                .fold(best.wall_time_s, f64::max);
            let ratio = if best.wall_time_s > 0.0 {
                slowest / best.wall_time_s
            } else {
                f64::INFINITY
            };
            format!("faster={} speedup={:.2}", best.method, ratio)
        }
        None => "faster=none".to_string(),
    }
}
