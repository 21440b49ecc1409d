use crate::error::{Error, Result};
use crate::fem::{demeaned, error_norm_with, InterpolationOptions, Norm};
use crate::forms::ModelParams;

use super::methods::{run_method, Method, MethodOptions, Solved};
use super::{MeshResolution, ProblemSpec};

/// Differences between solutions on consecutive meshes, reported against the
/// finer mesh size `h`.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyRow {
    pub h: f64,
    pub l2_err_u: f64,
    pub l2_rate_u: Option<f64>,
    pub h1_err_u: f64,
    pub h1_rate_u: Option<f64>,
    pub l2_err_p: f64,
    pub l2_rate_p: Option<f64>,
    /// Both solves behind this row converged.
    pub converged: bool,
}

/// `log₂(previous / current)`.
pub fn observed_rate(previous: f64, current: f64) -> f64 {
    (previous / current).log2()
}

/// Fills in the rate columns from the error columns. The first row has no
/// rates; a row next to an unconverged one has none either.
pub fn fill_rates(rows: &mut [StudyRow]) {
    for i in 0..rows.len() {
        let rate = |prev: f64, cur: f64| Some(observed_rate(prev, cur));
        if i == 0 || !rows[i].converged || !rows[i - 1].converged {
            rows[i].l2_rate_u = None;
            rows[i].h1_rate_u = None;
            rows[i].l2_rate_p = None;
            continue;
        }
        let (p, c) = (&rows[i - 1], &rows[i]);
        let (a, b, d) = (
            rate(p.l2_err_u, c.l2_err_u),
            rate(p.h1_err_u, c.h1_err_u),
            rate(p.l2_err_p, c.l2_err_p),
        );
        rows[i].l2_rate_u = a;
        rows[i].h1_rate_u = b;
        rows[i].l2_rate_p = d;
    }
}

/// Mesh-to-mesh error norms between a coarse and a fine solution; pressure
/// is compared modulo constants.
pub fn solution_differences(fine: &Solved, coarse: &Solved, coarse_h: f64) -> Result<(f64, f64, f64)> {
    // Fine boundary nodes of a curved domain can sit just outside the coarse
    // polygon; those are evaluated from the nearest coarse cell.
    let opts = InterpolationOptions {
        extrapolation_tol: coarse_h,
        ..InterpolationOptions::default()
    };
    let l2u = error_norm_with(&fine.u, &coarse.u, Norm::L2, &opts)?;
    let h1u = error_norm_with(&fine.u, &coarse.u, Norm::H1, &opts)?;
    let l2p = error_norm_with(&demeaned(&fine.p)?, &demeaned(&coarse.p)?, Norm::L2, &opts)?;
    Ok((l2u, h1u, l2p))
}

/// Solves on each mesh of `meshes` (successively halved `h`) and tabulates
/// the differences between consecutive solutions. Returns one row per mesh
/// after the first.
pub fn convergence_study(
    problem: &ProblemSpec,
    method: Method,
    params: &ModelParams,
    meshes: &[MeshResolution],
    options: &MethodOptions,
) -> Result<Vec<StudyRow>> {
    if meshes.len() < 3 {
        return Err(Error::InvalidParameters(format!(
            "a study needs at least 3 meshes, got {}",
            meshes.len()
        )));
    }
    for w in meshes.windows(2) {
        let ratio = w[0].h() / w[1].h();
        if (ratio - 2.0).abs() > 1e-9 {
            return Err(Error::InvalidParameters(format!(
                "meshes {} and {} are not a halving",
                w[0], w[1]
            )));
        }
    }
    let mut rows = Vec::with_capacity(meshes.len() - 1);
    let mut previous: Option<(Solved, f64)> = None;
    for &res in meshes {
        let mesh = problem.mesh(res)?;
        let sol = run_method(problem, method, params, &mesh, options)?;
        if let Some((coarse, coarse_h)) = previous.take() {
            let (l2u, h1u, l2p) = solution_differences(&sol, &coarse, coarse_h)?;
            rows.push(StudyRow {
                h: res.h(),
                l2_err_u: l2u,
                l2_rate_u: None,
                h1_err_u: h1u,
                h1_rate_u: None,
                l2_err_p: l2p,
                l2_rate_p: None,
                converged: sol.converged && coarse.converged,
            });
        }
        previous = Some((sol, res.h()));
    }
    fill_rates(&mut rows);
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(h: f64, e: f64, converged: bool) -> StudyRow {
        StudyRow {
            h,
            l2_err_u: e * e * e,
            l2_rate_u: None,
            h1_err_u: e * e,
            h1_rate_u: None,
            l2_err_p: 3.0 * e * e,
            l2_rate_p: None,
            converged,
        }
    }

    #[test]
    fn rates_of_exact_powers() {
        let mut rows: Vec<StudyRow> = [0.1, 0.05, 0.025].iter().map(|&h| row(h, h, true)).collect();
        fill_rates(&mut rows);
        assert_eq!(rows[0].l2_rate_u, None);
        for r in &rows[1..] {
            assert!((r.l2_rate_u.unwrap() - 3.0).abs() < 1e-12);
            assert!((r.h1_rate_u.unwrap() - 2.0).abs() < 1e-12);
            assert!((r.l2_rate_p.unwrap() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rates_are_recomputable_from_errors() {
        let mut rows: Vec<StudyRow> = [(0.2, 0.31), (0.1, 0.07), (0.05, 0.0123), (0.025, 0.0041)]
            .iter()
            .map(|&(h, e)| row(h, e, true))
            .collect();
        fill_rates(&mut rows);
        let again = rows.clone();
        fill_rates(&mut rows);
        assert_eq!(rows, again);
        for i in 1..rows.len() {
            assert_eq!(
                rows[i].h1_rate_u,
                Some(observed_rate(rows[i - 1].h1_err_u, rows[i].h1_err_u))
            );
        }
    }

    #[test]
    fn unconverged_rows_have_no_rates() {
        let mut rows: Vec<StudyRow> = [(0.1, true), (0.05, false), (0.025, true), (0.0125, true)]
            .iter()
            .map(|&(h, c)| row(h, h, c))
            .collect();
        fill_rates(&mut rows);
        assert!(rows[1].l2_rate_u.is_none() && rows[2].l2_rate_u.is_none());
        assert!(rows[3].l2_rate_u.is_some());
    }
}
