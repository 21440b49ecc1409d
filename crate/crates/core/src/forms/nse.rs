use std::sync::Arc;

use super::mixed::{eval_local, gather, Constraints, MixedSpace, VectorField};
use crate::error::{Error, Result};
use crate::fem::{CellQuadrature, Family, ValueShape};
use crate::linalg::{NonlinearSystem, SparseMatrix, SparsityPattern};

/// Steady incompressible Navier–Stokes on a Taylor–Hood pair `(u, p)`:
///
/// `η₀(∇u, ∇v) + ((∇u)u, v) − (p, ∇·v) − (q, ∇·u) = ⟨F, v⟩`.
///
/// The right side `⟨F, v⟩` is a precomputed vector over the velocity dofs.
pub struct NavierStokesSystem {
    ms: MixedSpace,
    eta0: f64,
    source: Vec<f64>,
    constraints: Constraints,
    pattern: Arc<SparsityPattern>,
}

pub(crate) fn check_taylor_hood(ms: &MixedSpace) -> Result<()> {
    let ok = ms.n_fields() == 2
        && ms.field(0).family() == Family::P2
        && ms.field(0).shape() == ValueShape::Vector2
        && ms.field(1).family() == Family::P1
        && ms.field(1).shape() == ValueShape::Scalar;
    if ok {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(
            "expected a (P2 vector, P1 scalar) mixed space".into(),
        ))
    }
}

/// `∫ f·v` over the velocity test functions, stacked into a full vector.
pub fn body_force_source(ms: &MixedSpace, force: &VectorField) -> Vec<f64> {
    let mesh = ms.mesh().clone();
    let space = ms.field(0);
    let mut out = vec![0.0; ms.n_dofs()];
    let mut cq = CellQuadrature::new();
    for cell in 0..mesh.n_cells() {
        cq.reinit(&mesh, cell);
        let nodes = space.cell_nodes(cell);
        for q in 0..cq.n_points() {
            let f = force(cq.points[q]);
            let w = cq.weights[q];
            for (i, &n) in nodes.iter().enumerate() {
                let phi = cq.p2.values[q][i];
                out[2 * n] += w * f[0] * phi;
                out[2 * n + 1] += w * f[1] * phi;
            }
        }
    }
    out
}

impl NavierStokesSystem {
    /// Navier–Stokes with body force `force` (none means zero).
    pub fn new(ms: MixedSpace, eta0: f64, force: Option<&VectorField>, constraints: Constraints) -> Result<Self> {
        check_taylor_hood(&ms)?;
        let source = match force {
            Some(f) => body_force_source(&ms, f),
            None => vec![0.0; ms.n_dofs()],
        };
        Self::with_source(ms, eta0, source, constraints)
    }

    pub fn with_source(ms: MixedSpace, eta0: f64, source: Vec<f64>, constraints: Constraints) -> Result<Self> {
        check_taylor_hood(&ms)?;
        if source.len() != ms.n_dofs() {
            return Err(Error::DimensionMismatch(format!(
                "source has {} entries, system has {} dofs",
                source.len(),
                ms.n_dofs()
            )));
        }
        let pattern = ms.full_pattern()?;
        Ok(NavierStokesSystem {
            ms,
            eta0,
            source,
            constraints,
            pattern,
        })
    }

    pub fn space(&self) -> &MixedSpace {
        &self.ms
    }

    pub fn constraints(&self) -> &Constraints {
        &self.constraints
    }

    pub fn source(&self) -> &[f64] {
        &self.source
    }

    /// Replaces the right side, keeping the pattern (and with it any cached
    /// symbolic factorization).
    pub fn set_source(&mut self, source: Vec<f64>) -> Result<()> {
        if source.len() != self.ms.n_dofs() {
            return Err(Error::DimensionMismatch(format!(
                "source has {} entries, system has {} dofs",
                source.len(),
                self.ms.n_dofs()
            )));
        }
        self.source = source;
        Ok(())
    }

    fn assemble(&self, x: &[f64], mut jac: Option<&mut SparseMatrix>) -> Vec<f64> {
        let ms = &self.ms;
        let mesh = ms.mesh().clone();
        let eta0 = self.eta0;
        let mut r: Vec<f64> = self.source.iter().map(|s| -s).collect();
        let mut cq = CellQuadrature::new();
        let mut dofs = Vec::with_capacity(15);
        let (mut ul, mut pl) = ([0.0; 12], [0.0; 3]);
        let mut re = [0.0; 15];
        let mut ke = [0.0; 15 * 15];
        for cell in 0..mesh.n_cells() {
            cq.reinit(&mesh, cell);
            ms.cell_dofs(cell, &mut dofs);
            gather(ms, x, 0, cell, &mut ul);
            gather(ms, x, 1, cell, &mut pl);
            re.fill(0.0);
            if jac.is_some() {
                ke.fill(0.0);
            }
            for q in 0..cq.n_points() {
                let w = cq.weights[q];
                let (u, gu) = eval_local(&cq.p2, q, &ul, 2);
                let (p, _) = eval_local(&cq.p1, q, &pl, 1);
                let p = p[0];
                let conv = [gu[0][0] * u[0] + gu[0][1] * u[1], gu[1][0] * u[0] + gu[1][1] * u[1]];
                let div = gu[0][0] + gu[1][1];
                let (phi, dphi) = (&cq.p2.values[q], &cq.p2.grads[q]);
                let (psi, _) = (&cq.p1.values[q], &cq.p1.grads[q]);
                for i in 0..6 {
                    for c in 0..2 {
                        let row = 2 * i + c;
                        let grad_term = gu[c][0] * dphi[i][0] + gu[c][1] * dphi[i][1];
                        re[row] += w * (eta0 * grad_term + conv[c] * phi[i] - p * dphi[i][c]);
                    }
                }
                for i in 0..3 {
                    re[12 + i] -= w * psi[i] * div;
                }
                if jac.is_none() {
                    continue;
                }
                for i in 0..6 {
                    for j in 0..6 {
                        let lap = dphi[i][0] * dphi[j][0] + dphi[i][1] * dphi[j][1];
                        let adv = (u[0] * dphi[j][0] + u[1] * dphi[j][1]) * phi[i];
                        let diag = w * (eta0 * lap + adv);
                        let mass = w * phi[j] * phi[i];
                        for c in 0..2 {
                            let row = (2 * i + c) * 15;
                            for d in 0..2 {
                                let mut v = gu[c][d] * mass;
                                if c == d {
                                    v += diag;
                                }
                                ke[row + 2 * j + d] += v;
                            }
                        }
                    }
                    for j in 0..3 {
                        for c in 0..2 {
                            let v = -w * psi[j] * dphi[i][c];
                            ke[(2 * i + c) * 15 + 12 + j] += v;
                            ke[(12 + j) * 15 + 2 * i + c] += v;
                        }
                    }
                }
            }
            for (a, &d) in dofs.iter().enumerate() {
                r[d] += re[a];
            }
            if let Some(m) = jac.as_deref_mut() {
                m.add_block(&dofs, &dofs, &ke);
            }
        }
        self.constraints.apply_residual(x, &mut r);
        if let Some(m) = jac {
            self.constraints.apply_jacobian(m);
        }
        r
    }
}

impl NonlinearSystem for NavierStokesSystem {
    fn residual(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ms.n_dofs() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} dofs",
                x.len(),
                self.ms.n_dofs()
            )));
        }
        Ok(self.assemble(x, None))
    }

    fn jacobian(&mut self, x: &[f64]) -> Result<SparseMatrix> {
        if x.len() != self.ms.n_dofs() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} dofs",
                x.len(),
                self.ms.n_dofs()
            )));
        }
        let mut m = SparseMatrix::zeros(self.pattern.clone());
        self.assemble(x, Some(&mut m));
        Ok(m)
    }
}
