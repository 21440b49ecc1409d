use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forms::{Model, ModelParams};
use crate::mesh::Mesh;

use super::methods::{run_method, Method, MethodOptions};
use super::ProblemSpec;

/// Weissenberg numbers 0.01 to 0.1 in steps of 0.01, then to 0.5 in steps of
/// 0.05, then to 2.5 in steps of 0.25.
pub fn default_weissenberg_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (1..=10).map(|k| k as f64 / 100.0).collect();
    grid.extend((3..=10).map(|k| k as f64 / 20.0));
    grid.extend((3..=10).map(|k| k as f64 / 4.0));
    grid
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub wi: f64,
    pub lambda1: f64,
    pub converged: bool,
    pub iterations: usize,
    pub final_residual: f64,
    pub seconds: f64,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    /// Last converged Weissenberg number before the first failure; `None`
    /// when the first grid point already fails.
    pub limit: Option<f64>,
}

/// Largest Weissenberg number of a grid at which the limit is still
/// reached, given `converged` flags in grid order.
pub fn sweep_limit(points: &[SweepPoint]) -> Option<f64> {
    points.iter().take_while(|p| p.converged).last().map(|p| p.wi)
}

/// Solves at every Weissenberg number of the ascending `grid` on one mesh.
/// With `stop_after = Some(k)` the sweep ends after `k` consecutive failures.
pub fn weissenberg_sweep(
    problem: &ProblemSpec,
    method: Method,
    model: Model,
    eta0: f64,
    grid: &[f64],
    mesh: &Arc<Mesh>,
    options: &MethodOptions,
    stop_after: Option<usize>,
) -> Result<SweepResult> {
    if method == Method::Nse {
        return Err(Error::InvalidParameters(
            "a Weissenberg sweep needs srtd or evss".into(),
        ));
    }
    if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) || !(grid[0] > 0.0) {
        return Err(Error::InvalidParameters(
            "the Weissenberg grid must be positive and ascending".into(),
        ));
    }
    let mut points = Vec::with_capacity(grid.len());
    let mut failures = 0;
    for &wi in grid {
        let lambda1 = problem.lambda1_for_wi(wi);
        let params = ModelParams::from_model(eta0, lambda1, model)?;
        let s = run_method(problem, method, &params, mesh, options)?;
        failures = if s.converged { 0 } else { failures + 1 };
        points.push(SweepPoint {
            wi,
            lambda1,
            converged: s.converged,
            iterations: s.iterations,
            final_residual: s.final_residual,
            seconds: s.seconds,
            note: s.note,
        });
        if stop_after.is_some_and(|k| failures >= k) {
            break;
        }
    }
    let limit = sweep_limit(&points);
    Ok(SweepResult { points, limit })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(wi: f64, converged: bool) -> SweepPoint {
        SweepPoint {
            wi,
            lambda1: wi,
            converged,
            iterations: 1,
            final_residual: 0.0,
            seconds: 0.0,
            note: None,
        }
    }

    #[test]
    fn grid_is_ascending_and_exact() {
        let g = default_weissenberg_grid();
        assert_eq!(g.len(), 26);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        for v in [0.01, 0.05, 0.06, 0.09, 0.1, 0.15, 0.45, 0.5, 0.75, 2.0, 2.5] {
            assert!(g.contains(&v), "{v} missing");
        }
    }

    #[test]
    fn limit_is_last_point_before_first_failure() {
        let pts = [
            point(0.01, true),
            point(0.02, true),
            point(0.03, false),
            point(0.04, true),
        ];
        assert_eq!(sweep_limit(&pts), Some(0.02));
        assert_eq!(sweep_limit(&pts[2..]), None);
        assert_eq!(sweep_limit(&pts[..2]), Some(0.02));
        assert_eq!(sweep_limit(&[]), None);
    }
}
