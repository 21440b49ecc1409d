use std::sync::Arc;

use super::mixed::{eval_local, gather_fn, Constraints, MixedSpace, VectorField};
use super::nse::{check_taylor_hood, NavierStokesSystem};
use super::params::ModelParams;
use super::tensor::{deformation, sym_from, Mat2};
use crate::error::{Error, Result};
use crate::fem::{CellQuadrature, FEFunction, Family, ValueShape};

/// Previous SRTD iterate feeding the stage-1 source.
#[derive(Clone, Copy, Debug)]
pub struct PreviousIterate<'a> {
    /// Velocity on the P2 vector space.
    pub u: &'a FEFunction,
    /// Pressure from stage 2 on P1.
    pub p: &'a FEFunction,
    /// Extra stress from stage 3 on P2 symmetric tensors.
    pub t: &'a FEFunction,
}

fn check_previous(ms: &MixedSpace, prev: &PreviousIterate) -> Result<()> {
    let mesh = ms.mesh();
    let checks = [
        (prev.u, Family::P2, ValueShape::Vector2, "u"),
        (prev.p, Family::P1, ValueShape::Scalar, "p"),
        (prev.t, Family::P2, ValueShape::SymTensor2, "T"),
    ];
    for (f, family, shape, name) in checks {
        let s = f.space();
        if !Arc::ptr_eq(s.mesh(), mesh) || s.family() != family || s.shape() != shape {
            return Err(Error::ShapeMismatch(format!(
                "previous {name} must be {family} {shape} on the system mesh"
            )));
        }
    }
    Ok(())
}

/// Stage-1 right side over the velocity test functions:
///
/// `(f, v − λ₁ u'·∇v) − λ₁[(p'(∇u')ᵗ, ∇v) − ((∇u')u', (∇v)u') + (∇u'·T', ∇v)]
///  + (λ₁ − μ₁)(D'T' + T'D', ∇v)`
pub fn stage1_source(
    ms: &MixedSpace,
    params: &ModelParams,
    force: Option<&VectorField>,
    prev: &PreviousIterate,
) -> Result<Vec<f64>> {
    check_taylor_hood(ms)?;
    check_previous(ms, prev)?;
    let mesh = ms.mesh().clone();
    let space = ms.field(0);
    let (lam, mu) = (params.lambda1, params.mu1);
    let mut out = vec![0.0; ms.n_dofs()];
    let mut cq = CellQuadrature::new();
    let (mut ul, mut pl, mut tl) = ([0.0; 12], [0.0; 3], [0.0; 18]);
    for cell in 0..mesh.n_cells() {
        cq.reinit(&mesh, cell);
        gather_fn(prev.u, cell, &mut ul);
        gather_fn(prev.p, cell, &mut pl);
        gather_fn(prev.t, cell, &mut tl);
        let nodes = space.cell_nodes(cell);
        for q in 0..cq.n_points() {
            let w = cq.weights[q];
            let (u, gu) = eval_local(&cq.p2, q, &ul, 2);
            let (p, _) = eval_local(&cq.p1, q, &pl, 1);
            let (t, _) = eval_local(&cq.p2, q, &tl, 3);
            let l = Mat2::new(gu[0][0], gu[0][1], gu[1][0], gu[1][1]);
            let t = sym_from(&t);
            let d = deformation(&l);
            let f = force.map_or([0.0; 2], |f| f(cq.points[q]));
            let conv = [l[(0, 0)] * u[0] + l[(0, 1)] * u[1], l[(1, 0)] * u[0] + l[(1, 1)] * u[1]];
            // flux tensor M with the source containing (M, ∇v)
            let m = -lam * (p[0] * l.transpose() + l * t) + (lam - mu) * (d * t + t * d);
            let (phi, dphi) = (&cq.p2.values[q], &cq.p2.grads[q]);
            for (i, &n) in nodes.iter().enumerate() {
                let adv_v = u[0] * dphi[i][0] + u[1] * dphi[i][1];
                for c in 0..2 {
                    let mut v = f[c] * (phi[i] - lam * adv_v) + lam * conv[c] * adv_v;
                    v += m[(c, 0)] * dphi[i][0] + m[(c, 1)] * dphi[i][1];
                    out[2 * n + c] += w * v;
                }
            }
        }
    }
    Ok(out)
}

/// The stage-1 problem: Navier–Stokes in `(u, π)` driven by
/// [`stage1_source`].
pub fn stage1_system(
    ms: MixedSpace,
    params: &ModelParams,
    force: Option<&VectorField>,
    prev: &PreviousIterate,
    constraints: Constraints,
) -> Result<NavierStokesSystem> {
    params.validate()?;
    let source = stage1_source(&ms, params, force, prev)?;
    NavierStokesSystem::with_source(ms, params.eta0, source, constraints)
}
