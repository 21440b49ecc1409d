use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::{norm, Norm};
use crate::forms::{Model, ModelParams};
use crate::mesh::Mesh;

use super::methods::{run_method, Method, MethodOptions};
use super::{MeshResolution, ProblemSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonianPoint {
    pub lambda1: f64,
    /// `‖u − u_NSE‖` in the full H1 norm; NaN when the solve failed.
    pub h1_difference: f64,
    pub converged: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonianComparison {
    pub points: Vec<NewtonianPoint>,
    /// Least-squares slope of `log(difference)` against `log(λ₁)` over the
    /// converged points with positive `λ₁`.
    pub slope: Option<f64>,
}

/// Least-squares slope of `log y` against `log x`; needs two points.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / n,
        pts.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// H1 distance between the viscoelastic velocity at each `λ₁` of `lambdas`
/// and the Navier–Stokes velocity, all on `mesh`.
#[allow(clippy::too_many_arguments)]
pub fn newtonian_comparison(
    problem: &ProblemSpec,
    method: Method,
    model: Model,
    eta0: f64,
    lambdas: &[f64],
    mesh: &Arc<Mesh>,
    options: &MethodOptions,
) -> Result<NewtonianComparison> {
    if method == Method::Nse {
        return Err(Error::InvalidParameters(
            "compare srtd or evss against the Newtonian solution".into(),
        ));
    }
    let newtonian = ModelParams::newtonian(eta0)?;
    let base = run_method(problem, Method::Nse, &newtonian, mesh, options)?;
    if !base.converged {
        return Err(Error::NotConverged(format!(
            "Navier-Stokes reference: {}",
            base.note.unwrap_or_default()
        )));
    }
    let mut points = Vec::with_capacity(lambdas.len());
    for &lambda1 in lambdas {
        let params = ModelParams::from_model(eta0, lambda1, model)?;
        let s = run_method(problem, method, &params, mesh, options)?;
        let h1_difference = if s.converged {
            let mut d = s.u.clone();
            d.axpy(-1.0, &base.u)?;
            norm(&d, Norm::H1)
        } else {
            f64::NAN
        };
        points.push(NewtonianPoint {
            lambda1,
            h1_difference,
            converged: s.converged,
            note: s.note,
        });
    }
    let fit: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.converged)
        .map(|p| (p.lambda1, p.h1_difference))
        .collect();
    Ok(NewtonianComparison {
        slope: log_log_slope(&fit),
        points,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimingRow {
    pub h: f64,
    pub srtd_seconds: Vec<f64>,
    pub evss_seconds: Vec<f64>,
    /// Every repeat of both methods converged.
    pub converged: bool,
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl TimingRow {
    pub fn srtd(&self) -> (f64, f64) {
        mean_std(&self.srtd_seconds)
    }

    pub fn evss(&self) -> (f64, f64) {
        mean_std(&self.evss_seconds)
    }

    /// Mean EVSS time over mean SRTD time.
    pub fn ratio(&self) -> f64 {
        self.evss().0 / self.srtd().0
    }
}

/// Wall-clock time of full SRTD and EVSS solves, `repeats` times each, on
/// every mesh. Runs strictly one solve at a time. A row stops at the first
/// non-converged solve.
pub fn timing_comparison(
    problem: &ProblemSpec,
    params: &ModelParams,
    meshes: &[MeshResolution],
    repeats: usize,
    options: &MethodOptions,
) -> Result<Vec<TimingRow>> {
    if repeats == 0 {
        return Err(Error::InvalidParameters("at least one repeat is needed".into()));
    }
    let mut rows = Vec::with_capacity(meshes.len());
    for &res in meshes {
        let mesh = problem.mesh(res)?;
        let mut row = TimingRow {
            h: res.h(),
            srtd_seconds: Vec::new(),
            evss_seconds: Vec::new(),
            converged: true,
        };
        'repeats: for _ in 0..repeats {
            for method in [Method::Srtd, Method::Evss] {
                let s = run_method(problem, method, params, &mesh, options)?;
                if !s.converged {
                    row.converged = false;
                    break 'repeats;
                }
                match method {
                    Method::Srtd => row.srtd_seconds.push(s.seconds),
                    _ => row.evss_seconds.push(s.seconds),
                }
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [1e-3f64, 1e-2, 0.1, 1.0]
            .iter()
            .map(|&x| (x, 4.0 * x.powf(1.5)))
            .collect();
        assert!((log_log_slope(&pts).unwrap() - 1.5).abs() < 1e-12);
        let mut noisy = pts.clone();
        noisy.push((0.5, f64::NAN));
        noisy.push((0.0, 1.0));
        assert!((log_log_slope(&noisy).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(log_log_slope(&pts[..1]), None);
        assert_eq!(log_log_slope(&[(1.0, 1.0), (1.0, 2.0)]), None);
    }

    #[test]
    fn sample_statistics() {
        let (m, s) = mean_std(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert_eq!(m, 5.0);
        assert!((s - (32.0f64 / 7.0).sqrt()).abs() < 1e-14);
        assert_eq!(mean_std(&[3.0]), (3.0, 0.0));
        assert!(mean_std(&[]).0.is_nan());
        let row = TimingRow {
            h: 0.1,
            srtd_seconds: vec![1.0, 3.0],
            evss_seconds: vec![4.0, 4.0],
            converged: true,
        };
        assert_eq!(row.ratio(), 2.0);
    }
}
