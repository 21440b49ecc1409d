use std::sync::Arc;

use super::mixed::{eval_local, gather, Constraints, MixedSpace, VectorField};
use super::nse::body_force_source;
use super::params::ModelParams;
use super::tensor::{
    basis_mat, contract_sym, contract_traceless, deformation, sym_from, traceless_from, Mat2, SYM_BASIS,
    TRACELESS_BASIS,
};
use crate::error::{Error, Result};
use crate::fem::{CellQuadrature, Family, ValueShape};
use crate::linalg::{NonlinearSystem, SparseMatrix, SparsityPattern};

/// Field order of the EVSS unknown vector.
pub const EVSS_U: usize = 0;
pub const EVSS_P: usize = 1;
pub const EVSS_SIGMA: usize = 2;
pub const EVSS_D: usize = 3;

const NL: usize = 39;
const OFF_P: usize = 12;
const OFF_S: usize = 15;
const OFF_D: usize = 33;

/// Coupled EVSS system in `(u, p, Σ, D_h)` with `B = Σ + 2η₀ D_h`:
///
/// * momentum `η₀(∇u, ∇v) + ((∇u)u, v) − (p, ∇·v) + (Σ, ∇v) = (f, v)`
/// * continuity `−(q, ∇·u) = 0`
/// * constitutive `(Σ + λ₁(u·∇B − ∇u·B − B·∇uᵗ) + (λ₁ − μ₁)(D(u)B + BD(u)), S + h_K u·∇S) = 0`
/// * projection `(2D_h − ∇u − ∇uᵗ, Φ) = 0`
///
/// Without streamline upwinding the constitutive test function is `S`.
pub struct EvssSystem {
    ms: MixedSpace,
    params: ModelParams,
    supg: bool,
    source: Vec<f64>,
    constraints: Constraints,
    pattern: Arc<SparsityPattern>,
}

pub fn check_evss_space(ms: &MixedSpace) -> Result<()> {
    let want = [
        (Family::P2, ValueShape::Vector2),
        (Family::P1, ValueShape::Scalar),
        (Family::P2, ValueShape::SymTensor2),
        (Family::P1, ValueShape::SymTensor2Traceless),
    ];
    let ok = ms.n_fields() == 4
        && want
            .iter()
            .enumerate()
            .all(|(k, &(fam, sh))| ms.field(k).family() == fam && ms.field(k).shape() == sh);
    if ok {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(
            "expected (P2 vector, P1 scalar, P2 symmetric, P1 traceless) fields".into(),
        ))
    }
}

/// Block coupling of the EVSS Jacobian.
pub fn evss_coupling() -> Vec<Vec<bool>> {
    vec![
        vec![true, true, true, false],
        vec![true, true, false, false],
        vec![true, false, true, true],
        vec![true, false, false, true],
    ]
}

impl EvssSystem {
    pub fn new(
        ms: MixedSpace,
        params: ModelParams,
        force: Option<&VectorField>,
        constraints: Constraints,
        supg: bool,
    ) -> Result<Self> {
        params.validate()?;
        check_evss_space(&ms)?;
        let source = match force {
            Some(f) => body_force_source(&ms, f),
            None => vec![0.0; ms.n_dofs()],
        };
        let pattern = ms.pattern(&evss_coupling())?;
        Ok(EvssSystem {
            ms,
            params,
            supg,
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

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    fn assemble(&self, x: &[f64], mut jac: Option<&mut SparseMatrix>) -> Vec<f64> {
        let ms = &self.ms;
        let mesh = ms.mesh().clone();
        let ModelParams {
            eta0,
            lambda1: lam,
            mu1: mu,
        } = self.params;
        let lm = lam - mu;
        let mut r: Vec<f64> = self.source.iter().map(|s| -s).collect();
        let mut cq = CellQuadrature::new();
        let mut dofs = Vec::with_capacity(NL);
        let (mut ul, mut pl, mut sl, mut dl) = ([0.0; 12], [0.0; 3], [0.0; 18], [0.0; 6]);
        let mut re = [0.0; NL];
        let mut ke = vec![0.0; NL * NL];
        let e_sym: Vec<Mat2> = SYM_BASIS.iter().map(basis_mat).collect();
        let f_tl: Vec<Mat2> = TRACELESS_BASIS.iter().map(basis_mat).collect();
        let f_tl_sym: Vec<[f64; 3]> = f_tl.iter().map(contract_sym).collect();
        const SYM_WEIGHT: [f64; 3] = [1.0, 2.0, 1.0];
        for cell in 0..mesh.n_cells() {
            cq.reinit(&mesh, cell);
            ms.cell_dofs(cell, &mut dofs);
            gather(ms, x, EVSS_U, cell, &mut ul);
            gather(ms, x, EVSS_P, cell, &mut pl);
            gather(ms, x, EVSS_SIGMA, cell, &mut sl);
            gather(ms, x, EVSS_D, cell, &mut dl);
            let h = if self.supg { cq.geo.diameter } else { 0.0 };
            re.fill(0.0);
            if jac.is_some() {
                ke.fill(0.0);
            }
            for q in 0..cq.n_points() {
                let w = cq.weights[q];
                let (u, gu) = eval_local(&cq.p2, q, &ul, 2);
                let (p, _) = eval_local(&cq.p1, q, &pl, 1);
                let (s, gs) = eval_local(&cq.p2, q, &sl, 3);
                let (dh, gd) = eval_local(&cq.p1, q, &dl, 2);
                let p = p[0];
                let l = Mat2::new(gu[0][0], gu[0][1], gu[1][0], gu[1][1]);
                let du = deformation(&l);
                let sm = sym_from(&s);
                let dm = traceless_from(&dh);
                let b = sm + 2.0 * eta0 * dm;
                let db = [0, 1].map(|k| {
                    sym_from(&[gs[0][k], gs[1][k], gs[2][k]]) + 2.0 * eta0 * traceless_from(&[gd[0][k], gd[1][k]])
                });
                let adv_b = db[0] * u[0] + db[1] * u[1];
                let c = sm + lam * (adv_b - l * b - b * l.transpose()) + lm * (du * b + b * du);
                let cc = contract_sym(&c);
                let proj = contract_traceless(&(2.0 * dm - l - l.transpose()));
                let conv = [l[(0, 0)] * u[0] + l[(0, 1)] * u[1], l[(1, 0)] * u[0] + l[(1, 1)] * u[1]];
                let div = l[(0, 0)] + l[(1, 1)];

                let (phi, dphi) = (&cq.p2.values[q], &cq.p2.grads[q]);
                let (psi, dpsi) = (&cq.p1.values[q], &cq.p1.grads[q]);
                let adv2: [f64; 6] = std::array::from_fn(|j| u[0] * dphi[j][0] + u[1] * dphi[j][1]);
                let adv1: [f64; 3] = std::array::from_fn(|j| u[0] * dpsi[j][0] + u[1] * dpsi[j][1]);
                let wt: [f64; 6] = std::array::from_fn(|i| phi[i] + h * adv2[i]);

                for i in 0..6 {
                    for c_ in 0..2 {
                        let g = gu[c_][0] * dphi[i][0] + gu[c_][1] * dphi[i][1];
                        let st = sm[(c_, 0)] * dphi[i][0] + sm[(c_, 1)] * dphi[i][1];
                        re[2 * i + c_] += w * (eta0 * g + conv[c_] * phi[i] - p * dphi[i][c_] + st);
                    }
                    for a in 0..3 {
                        re[OFF_S + 3 * i + a] += w * cc[a] * wt[i];
                    }
                }
                for i in 0..3 {
                    re[OFF_P + i] -= w * psi[i] * div;
                    for a in 0..2 {
                        re[OFF_D + 2 * i + a] += w * proj[a] * psi[i];
                    }
                }
                if jac.is_none() {
                    continue;
                }

                // momentum and continuity
                for i in 0..6 {
                    for j in 0..6 {
                        let lap = dphi[i][0] * dphi[j][0] + dphi[i][1] * dphi[j][1];
                        let diag = w * (eta0 * lap + adv2[j] * phi[i]);
                        let mass = w * phi[j] * phi[i];
                        for c_ in 0..2 {
                            let row = (2 * i + c_) * NL;
                            for d in 0..2 {
                                let mut v = l[(c_, d)] * mass;
                                if c_ == d {
                                    v += diag;
                                }
                                ke[row + 2 * j + d] += v;
                            }
                            for (bb, e) in e_sym.iter().enumerate() {
                                ke[row + OFF_S + 3 * j + bb] +=
                                    w * phi[j] * (e[(c_, 0)] * dphi[i][0] + e[(c_, 1)] * dphi[i][1]);
                            }
                        }
                    }
                    for j in 0..3 {
                        for c_ in 0..2 {
                            let v = -w * psi[j] * dphi[i][c_];
                            ke[(2 * i + c_) * NL + OFF_P + j] += v;
                            ke[(OFF_P + j) * NL + 2 * i + c_] += v;
                        }
                    }
                }

                // constitutive rows against velocity
                for j in 0..6 {
                    for d in 0..2 {
                        let mut dl_ = Mat2::zeros();
                        dl_[(d, 0)] = dphi[j][0];
                        dl_[(d, 1)] = dphi[j][1];
                        let ddu = deformation(&dl_);
                        let dc = lam * (phi[j] * db[d] - dl_ * b - b * dl_.transpose()) + lm * (ddu * b + b * ddu);
                        let dcc = contract_sym(&dc);
                        let dproj = contract_traceless(&(-dl_ - dl_.transpose()));
                        let col = 2 * j + d;
                        for i in 0..6 {
                            let supg = h * phi[j] * dphi[i][d];
                            for a in 0..3 {
                                ke[(OFF_S + 3 * i + a) * NL + col] += w * (dcc[a] * wt[i] + cc[a] * supg);
                            }
                        }
                        for i in 0..3 {
                            for a in 0..2 {
                                ke[(OFF_D + 2 * i + a) * NL + col] += w * dproj[a] * psi[i];
                            }
                        }
                    }
                }

                // constitutive rows against Σ and D_h
                let react = |m: &Mat2| contract_sym(&(lam * (-l * m - m * l.transpose()) + lm * (du * m + m * du)));
                let react_s: Vec<[f64; 3]> = e_sym.iter().map(react).collect();
                let react_d: Vec<[f64; 3]> = f_tl.iter().map(react).collect();
                for i in 0..6 {
                    let wi = w * wt[i];
                    for a in 0..3 {
                        let row = (OFF_S + 3 * i + a) * NL;
                        for j in 0..6 {
                            for bb in 0..3 {
                                let mut v = phi[j] * react_s[bb][a];
                                if a == bb {
                                    v += (phi[j] + lam * adv2[j]) * SYM_WEIGHT[a];
                                }
                                ke[row + OFF_S + 3 * j + bb] += wi * v;
                            }
                        }
                        for j in 0..3 {
                            for bb in 0..2 {
                                let v = lam * adv1[j] * f_tl_sym[bb][a] + psi[j] * react_d[bb][a];
                                ke[row + OFF_D + 2 * j + bb] += wi * 2.0 * eta0 * v;
                            }
                        }
                    }
                }

                // projection rows against D_h: F_b : F_a = 2 δ_ab
                for i in 0..3 {
                    for j in 0..3 {
                        let v = w * 4.0 * psi[i] * psi[j];
                        for a in 0..2 {
                            ke[(OFF_D + 2 * i + a) * NL + OFF_D + 2 * j + a] += v;
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

impl NonlinearSystem for EvssSystem {
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
