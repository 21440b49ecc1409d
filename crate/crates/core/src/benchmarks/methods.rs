use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::fem::{FEFunction, FunctionSpace};
use crate::forms::ModelParams;
use crate::linalg::NewtonOptions;
use crate::mesh::Mesh;
use crate::solvers::{evss_solve, navier_stokes_solve_with, srtd_solve, taylor_hood_space, EvssOptions, SrtdOptions};

use super::ProblemSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Srtd,
    Evss,
    Nse,
}

impl Method {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "srtd" => Ok(Method::Srtd),
            "evss" => Ok(Method::Evss),
            "nse" | "newtonian" => Ok(Method::Nse),
            other => Err(Error::InvalidParameters(format!(
                "unknown method {other:?} (expected srtd, evss or nse)"
            ))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Srtd => "srtd",
            Method::Evss => "evss",
            Method::Nse => "nse",
        })
    }
}

/// Solver settings for every method; only the one in use is read.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MethodOptions {
    pub srtd: SrtdOptions,
    pub evss: EvssOptions,
    pub nse: NewtonOptions,
}

/// Velocity and pressure from any of the methods.
#[derive(Clone, Debug)]
pub struct Solved {
    pub u: FEFunction,
    pub p: FEFunction,
    pub converged: bool,
    /// SRTD iterations or Newton iterations.
    pub iterations: usize,
    /// Final SRTD residual or final Newton residual norm.
    pub final_residual: f64,
    pub seconds: f64,
    pub note: Option<String>,
}

/// Runs `method` on `problem`. A Newtonian solve ignores `λ₁` and `μ₁`.
/// Non-convergence is reported in [`Solved::converged`], not as an error.
pub fn run_method(
    problem: &ProblemSpec,
    method: Method,
    params: &ModelParams,
    mesh: &Arc<Mesh>,
    options: &MethodOptions,
) -> Result<Solved> {
    let start = Instant::now();
    let mut out = match method {
        Method::Srtd => {
            let r = srtd_solve(problem, params, mesh, &options.srtd)?;
            Solved {
                converged: r.converged,
                iterations: r.residual_history.len(),
                final_residual: r.residual_history.last().copied().unwrap_or(f64::NAN),
                note: r.failure,
                u: r.u,
                p: r.p,
                seconds: 0.0,
            }
        }
        Method::Evss => {
            let r = evss_solve(problem, params, mesh, &options.evss)?;
            Solved {
                converged: r.converged,
                iterations: r.newton.iterations,
                final_residual: r.newton.residual_history.last().copied().unwrap_or(f64::NAN),
                note: (!r.converged).then(|| format!("Newton stopped with {:?}", r.newton.stop)),
                u: r.u,
                p: r.p,
                seconds: 0.0,
            }
        }
        Method::Nse => match navier_stokes_solve_with(problem, params.eta0, mesh, &options.nse) {
            Ok(r) => Solved {
                converged: true,
                iterations: r.newton.iterations,
                final_residual: r.newton.residual_history.last().copied().unwrap_or(f64::NAN),
                note: None,
                u: r.u,
                p: r.p,
                seconds: 0.0,
            },
            Err(Error::NotConverged(msg)) | Err(Error::Singular(msg)) => {
                let ms = taylor_hood_space(mesh);
                let zero = |s: &Arc<FunctionSpace>| FEFunction::zeros(s);
                Solved {
                    u: zero(ms.field(0)),
                    p: zero(ms.field(1)),
                    converged: false,
                    iterations: 0,
                    final_residual: f64::NAN,
                    seconds: 0.0,
                    note: Some(msg),
                }
            }
            Err(e) => return Err(e),
        },
    };
    out.seconds = start.elapsed().as_secs_f64();
    Ok(out)
}
