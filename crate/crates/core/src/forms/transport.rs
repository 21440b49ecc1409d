//! The two linear transport stages of the SRTD iteration.

use std::sync::Arc;

use super::mixed::{eval_local, gather_fn, MixedSpace};
use super::params::ModelParams;
use super::tensor::{basis_mat, contract_sym, deformation, spin, Mat2, SYM_BASIS};
use crate::error::{Error, Result};
use crate::fem::{CellQuadrature, FEFunction, Family, FunctionSpace, ValueShape};
use crate::linalg::{SparseMatrix, SparsityPattern};

fn check(f: &FEFunction, mesh: &Arc<crate::mesh::Mesh>, family: Family, shape: ValueShape, name: &str) -> Result<()> {
    let s = f.space();
    if !Arc::ptr_eq(s.mesh(), mesh) || s.family() != family || s.shape() != shape {
        return Err(Error::ShapeMismatch(format!(
            "{name} must be {family} {shape} on the target mesh"
        )));
    }
    Ok(())
}

/// Test-function weight `φ + h_K u·∇φ` with streamline upwinding, else `φ`.
#[inline]
fn test_weight(supg: bool, h: f64, phi: f64, u: &[f64; 3], dphi: &[f64; 2]) -> f64 {
    if supg {
        phi + h * (u[0] * dphi[0] + u[1] * dphi[1])
    } else {
        phi
    }
}

/// Pressure transport on P1:
/// `(p + λ₁ u·∇p, r) = (π, r)` with no boundary conditions.
pub fn assemble_stage2(
    space: &Arc<FunctionSpace>,
    lambda1: f64,
    u: &FEFunction,
    pi: &FEFunction,
    supg: bool,
) -> Result<(SparseMatrix, Vec<f64>)> {
    assemble_stage2_on(&transport_pattern(space)?, space, lambda1, u, pi, supg)
}

/// Cell-coupling pattern of a single-field transport operator.
pub fn transport_pattern(space: &Arc<FunctionSpace>) -> Result<Arc<SparsityPattern>> {
    MixedSpace::new(vec![space.clone()])?.full_pattern()
}

fn check_pattern(pattern: &SparsityPattern, space: &FunctionSpace) -> Result<()> {
    if pattern.n_rows() != space.n_dofs() || pattern.n_cols() != space.n_dofs() {
        return Err(Error::DimensionMismatch(
            "pattern does not match the transport space".into(),
        ));
    }
    Ok(())
}

/// [`assemble_stage2`] on a pattern from [`transport_pattern`].
pub fn assemble_stage2_on(
    pattern: &Arc<SparsityPattern>,
    space: &Arc<FunctionSpace>,
    lambda1: f64,
    u: &FEFunction,
    pi: &FEFunction,
    supg: bool,
) -> Result<(SparseMatrix, Vec<f64>)> {
    let mesh = space.mesh().clone();
    if space.family() != Family::P1 || space.shape() != ValueShape::Scalar {
        return Err(Error::ShapeMismatch("stage 2 target must be P1 scalar".into()));
    }
    check(u, &mesh, Family::P2, ValueShape::Vector2, "velocity")?;
    check(pi, &mesh, Family::P1, ValueShape::Scalar, "pressure")?;
    check_pattern(pattern, space)?;
    let mut a = SparseMatrix::zeros(pattern.clone());
    let mut b = vec![0.0; space.n_dofs()];
    let mut cq = CellQuadrature::new();
    let (mut ul, mut pl) = ([0.0; 12], [0.0; 3]);
    let mut ke = [0.0; 9];
    for cell in 0..mesh.n_cells() {
        cq.reinit(&mesh, cell);
        gather_fn(u, cell, &mut ul);
        gather_fn(pi, cell, &mut pl);
        let h = cq.geo.diameter;
        ke.fill(0.0);
        let nodes = space.cell_nodes(cell);
        for q in 0..cq.n_points() {
            let w = cq.weights[q];
            let (uq, _) = eval_local(&cq.p2, q, &ul, 2);
            let (pq, _) = eval_local(&cq.p1, q, &pl, 1);
            let (psi, dpsi) = (&cq.p1.values[q], &cq.p1.grads[q]);
            for i in 0..3 {
                let wi = w * test_weight(supg, h, psi[i], &uq, &dpsi[i]);
                b[nodes[i]] += wi * pq[0];
                for j in 0..3 {
                    let adv = uq[0] * dpsi[j][0] + uq[1] * dpsi[j][1];
                    ke[3 * i + j] += wi * (psi[j] + lambda1 * adv);
                }
            }
        }
        a.add_block(nodes, nodes, &ke);
    }
    Ok((a, b))
}

/// Stress transport on P2 symmetric tensors:
/// `(T + λ₁(u·∇T + WT − TW) − μ₁(DT + TD), S) = (2η₀ D, S)`.
pub fn assemble_stage3(
    space: &Arc<FunctionSpace>,
    params: &ModelParams,
    u: &FEFunction,
    supg: bool,
) -> Result<(SparseMatrix, Vec<f64>)> {
    assemble_stage3_on(&transport_pattern(space)?, space, params, u, supg)
}

/// [`assemble_stage3`] on a pattern from [`transport_pattern`].
pub fn assemble_stage3_on(
    pattern: &Arc<SparsityPattern>,
    space: &Arc<FunctionSpace>,
    params: &ModelParams,
    u: &FEFunction,
    supg: bool,
) -> Result<(SparseMatrix, Vec<f64>)> {
    let mesh = space.mesh().clone();
    if space.family() != Family::P2 || space.shape() != ValueShape::SymTensor2 {
        return Err(Error::ShapeMismatch(
            "stage 3 target must be P2 symmetric tensors".into(),
        ));
    }
    check(u, &mesh, Family::P2, ValueShape::Vector2, "velocity")?;
    let (lam, mu, eta0) = (params.lambda1, params.mu1, params.eta0);
    check_pattern(pattern, space)?;
    let mut a = SparseMatrix::zeros(pattern.clone());
    let mut b = vec![0.0; space.n_dofs()];
    let mut cq = CellQuadrature::new();
    let mut ul = [0.0; 12];
    let mut ke = [0.0; 18 * 18];
    let mut dofs = Vec::with_capacity(18);
    let basis: Vec<Mat2> = SYM_BASIS.iter().map(basis_mat).collect();
    for cell in 0..mesh.n_cells() {
        cq.reinit(&mesh, cell);
        gather_fn(u, cell, &mut ul);
        dofs.clear();
        dofs.extend(
            space
                .cell_nodes(cell)
                .iter()
                .flat_map(|&n| (0..3).map(move |c| 3 * n + c)),
        );
        let h = cq.geo.diameter;
        ke.fill(0.0);
        for q in 0..cq.n_points() {
            let wq = cq.weights[q];
            let (uq, gu) = eval_local(&cq.p2, q, &ul, 2);
            let l = Mat2::new(gu[0][0], gu[0][1], gu[1][0], gu[1][1]);
            let (d, wsp) = (deformation(&l), spin(&l));
            // reaction part of the operator applied to each basis tensor
            let react: Vec<[f64; 3]> = basis
                .iter()
                .map(|e| contract_sym(&(lam * (wsp * e - e * wsp) - mu * (d * e + e * d))))
                .collect();
            let rhs = contract_sym(&(2.0 * eta0 * d));
            let (phi, dphi) = (&cq.p2.values[q], &cq.p2.grads[q]);
            for i in 0..6 {
                let wi = wq * test_weight(supg, h, phi[i], &uq, &dphi[i]);
                for a_ in 0..3 {
                    b[dofs[3 * i + a_]] += wi * rhs[a_];
                }
                for j in 0..6 {
                    let adv = uq[0] * dphi[j][0] + uq[1] * dphi[j][1];
                    let diag = wi * (phi[j] + lam * adv);
                    for a_ in 0..3 {
                        let row = (3 * i + a_) * 18 + 3 * j;
                        for b_ in 0..3 {
                            // E_b : E_a is 1, 2, 1 on the diagonal and zero elsewhere
                            let mut v = wi * phi[j] * react[b_][a_];
                            if a_ == b_ {
                                v += diag * if a_ == 1 { 2.0 } else { 1.0 };
                            }
                            ke[row + b_] += v;
                        }
                    }
                }
            }
        }
        a.add_block(&dofs, &dofs, &ke);
    }
    Ok((a, b))
}
