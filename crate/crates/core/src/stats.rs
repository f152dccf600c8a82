use std::time::Duration;

/// Iteration bookkeeping shared by every solver.
///
/// For single-level solvers (`project_g`, `p_rof`) `outer_iters` and
/// `inner_iters_total` both count the same fixed-point iterations. For the
/// decomposition drivers `inner_iters_total` accumulates every inner solver
/// iteration across all outer steps.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    pub outer_iters: usize,
    pub inner_iters_total: usize,
    pub converged: bool,
    pub wall_time: Duration,
    /// Stopping quantity recorded after each outer iteration.
    pub change_trace: Vec<f64>,
    pub warnings: Vec<String>,
}

impl RunStats {
    pub fn wall_time_s(&self) -> f64 {
        self.wall_time.as_secs_f64()
    }

    pub(crate) fn absorb_inner(&mut self, inner: &RunStats) {
        self.inner_iters_total += inner.inner_iters_total;
        for w in &inner.warnings {
            if !self.warnings.contains(w) {
                self.warnings.push(w.clone());
            }
        }
    }
}
