use super::lu::LuSolver;
use super::sparse::SparseMatrix;
use crate::error::Result;

/// A square nonlinear system `r(x) = 0` with an assembled Jacobian.
pub trait NonlinearSystem {
    fn residual(&mut self, x: &[f64]) -> Result<Vec<f64>>;
    fn jacobian(&mut self, x: &[f64]) -> Result<SparseMatrix>;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions {
    /// Relative tolerance on `‖r(x)‖₂ / ‖r(x0)‖₂`.
    pub rtol: f64,
    /// Absolute floor on `‖r(x)‖₂`.
    pub atol: f64,
    pub max_iter: usize,
    /// Divergence is declared once `‖r‖₂` exceeds this multiple of `‖r(x0)‖₂`.
    pub divergence_factor: f64,
    /// Converged when the update satisfies `‖δx‖∞ <= step_tol ‖x‖∞`, i.e. the
    /// iterate no longer changes beyond roundoff.
    pub step_tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            rtol: 1e-9,
            atol: 1e-13,
            max_iter: 50,
            divergence_factor: 1e6,
            step_tol: 1e-12,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NewtonStop {
    Converged,
    Stagnated,
    Diverged,
    NonFinite,
    MaxIterations,
    /// The Jacobian could not be factored.
    Singular,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonReport {
    pub iterations: usize,
    /// `‖r‖₂` at the initial guess and after every step.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub stop: NewtonStop,
}

/// Full-step Newton iteration without line search.
///
/// Singular Jacobians propagate the LU error. All other failures are
/// reported through [`NewtonReport`], with `x` left at the last iterate.
pub fn newton_solve<S: NonlinearSystem + ?Sized>(
    system: &mut S,
    x0: &[f64],
    options: &NewtonOptions,
) -> Result<(Vec<f64>, NewtonReport)> {
    let mut lu = LuSolver::new();
    newton_solve_with(system, x0, options, &mut lu)
}

/// Like [`newton_solve`], reusing `lu` (and its cached symbolic analysis).
pub fn newton_solve_with<S: NonlinearSystem + ?Sized>(
    system: &mut S,
    x0: &[f64],
    options: &NewtonOptions,
    lu: &mut LuSolver,
) -> Result<(Vec<f64>, NewtonReport)> {
    let mut x = x0.to_vec();
    let mut r = system.residual(&x)?;
    let r0 = norm2(&r);
    let mut history = vec![r0];
    let finish = |history: Vec<f64>, stop: NewtonStop| NewtonReport {
        iterations: history.len() - 1,
        residual_history: history,
        converged: matches!(stop, NewtonStop::Converged | NewtonStop::Stagnated),
        stop,
    };
    if !r0.is_finite() {
        return Ok((x, finish(history, NewtonStop::NonFinite)));
    }
    if r0 <= options.atol {
        return Ok((x, finish(history, NewtonStop::Converged)));
    }
    for _ in 0..options.max_iter {
        lu.factor(&system.jacobian(&x)?)?;
        let dx = lu.solve(&r)?;
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi -= di;
        }
        r = system.residual(&x)?;
        let rn = norm2(&r);
        history.push(rn);
        if !rn.is_finite() {
            return Ok((x, finish(history, NewtonStop::NonFinite)));
        }
        if rn <= options.rtol * r0 || rn <= options.atol {
            return Ok((x, finish(history, NewtonStop::Converged)));
        }
        if rn > options.divergence_factor * r0 {
            return Ok((x, finish(history, NewtonStop::Diverged)));
        }
        if norm_inf(&dx) <= options.step_tol * norm_inf(&x) {
            return Ok((x, finish(history, NewtonStop::Stagnated)));
        }
    }
    Ok((x, finish(history, NewtonStop::MaxIterations)))
}

/// Relative discrepancy between the assembled Jacobian and a central
/// difference of the residual along `v`, with step `eps * max(‖x‖₂, 1) / ‖v‖₂`.
pub fn jacobian_fd_error<S: NonlinearSystem + ?Sized>(system: &mut S, x: &[f64], v: &[f64], eps: f64) -> Result<f64> {
    let h = eps * norm2(x).max(1.0) / norm2(v);
    let shifted = |s: f64| -> Vec<f64> { x.iter().zip(v).map(|(a, b)| a + s * h * b).collect() };
    let rp = system.residual(&shifted(1.0))?;
    let rm = system.residual(&shifted(-1.0))?;
    let jv = system.jacobian(x)?.mul_vec(v);
    let diff: Vec<f64> = rp
        .iter()
        .zip(&rm)
        .zip(&jv)
        .map(|((p, m), j)| (p - m) / (2.0 * h) - j)
        .collect();
    Ok(norm2(&diff) / norm2(&jv).max(f64::MIN_POSITIVE))
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, a| m.max(a.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::triplet_assemble;

    struct Scalar;

    impl NonlinearSystem for Scalar {
        fn residual(&mut self, x: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![x[0] * x[0] - 4.0])
        }
        fn jacobian(&mut self, x: &[f64]) -> Result<SparseMatrix> {
            triplet_assemble(1, 1, &[(0, 0, 2.0 * x[0])])
        }
    }

    struct Affine(SparseMatrix, Vec<f64>);

    impl NonlinearSystem for Affine {
        fn residual(&mut self, x: &[f64]) -> Result<Vec<f64>> {
            let ax = self.0.mul_vec(x);
            Ok(ax.iter().zip(&self.1).map(|(a, b)| a - b).collect())
        }
        fn jacobian(&mut self, _x: &[f64]) -> Result<SparseMatrix> {
            Ok(self.0.clone())
        }
    }

    #[test]
    fn scalar_square_root() {
        let (x, report) = newton_solve(&mut Scalar, &[3.0], &NewtonOptions::default()).unwrap();
        assert!(report.converged);
        // stopping at |r| <= 1e-9 |r0| bounds the error by 1e-9 * 5 / 4
        assert!((x[0] - 2.0).abs() < 1.25e-9);
        assert!(report.iterations <= 8);
        assert_eq!(report.residual_history.len(), report.iterations + 1);

        let tight = NewtonOptions {
            rtol: 1e-15,
            ..NewtonOptions::default()
        };
        let (x, report) = newton_solve(&mut Scalar, &[3.0], &tight).unwrap();
        assert!(report.converged && report.iterations <= 8);
        assert!((x[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn affine_in_one_step() {
        let a = triplet_assemble(3, 3, &[(0, 0, 4.0), (0, 1, 1.0), (1, 1, 3.0), (2, 0, 1.0), (2, 2, 2.0)]).unwrap();
        let mut sys = Affine(a, vec![1.0, 2.0, 3.0]);
        let (_, report) = newton_solve(&mut sys, &[0.0; 3], &NewtonOptions::default()).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, 1);
    }

    #[test]
    fn singular_jacobian_propagates() {
        let err = newton_solve(&mut Scalar, &[0.0], &NewtonOptions::default());
        assert!(err.is_err());
    }

    #[test]
    fn deterministic() {
        let run = || newton_solve(&mut Scalar, &[17.0], &NewtonOptions::default()).unwrap();
        let (a, ra) = run();
        let (b, rb) = run();
        assert_eq!(a[0].to_bits(), b[0].to_bits());
        assert_eq!(ra, rb);
    }
}
