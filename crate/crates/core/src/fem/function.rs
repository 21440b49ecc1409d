use std::sync::Arc;

use nalgebra::Point2;

use super::basis::eval_basis;
use super::element::CellGeometry;
use super::space::FunctionSpace;
use crate::error::{Error, Result};

/// A coefficient vector over the dofs of a [`FunctionSpace`].
#[derive(Clone, Debug)]
pub struct FEFunction {
    space: Arc<FunctionSpace>,
    coeffs: Vec<f64>,
}

impl FEFunction {
    pub fn zeros(space: &Arc<FunctionSpace>) -> Self {
        FEFunction {
            coeffs: vec![0.0; space.n_dofs()],
            space: space.clone(),
        }
    }

    pub fn from_coeffs(space: &Arc<FunctionSpace>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.n_dofs() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a space with {} dofs",
                coeffs.len(),
                space.n_dofs()
            )));
        }
        Ok(FEFunction {
            space: space.clone(),
            coeffs,
        })
    }

    /// Nodal interpolant of `f`, which writes the components at a point.
    pub fn interpolate<F>(space: &Arc<FunctionSpace>, f: F) -> Self
    where
        F: Fn(Point2<f64>, &mut [f64]),
    {
        let nc = space.n_components();
        let mut coeffs = vec![0.0; space.n_dofs()];
        for (node, p) in space.node_coords().iter().enumerate() {
            f(*p, &mut coeffs[node * nc..(node + 1) * nc]);
        }
        FEFunction {
            space: space.clone(),
            coeffs,
        }
    }

    pub fn space(&self) -> &Arc<FunctionSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Components at barycentric point `bary` of `cell`.
    ///
    /// Evaluated as offsets from the first local node's value, which by the
    /// partition of unity is the same sum but reproduces constants exactly.
    pub fn eval_in_cell(&self, cell: usize, bary: [f64; 3], out: &mut [f64]) {
        let nc = self.space.n_components();
        let b = eval_basis(self.space.family(), bary);
        let nodes = self.space.cell_nodes(cell);
        for c in 0..nc {
            let base = self.coeffs[nodes[0] * nc + c];
            let mut v = 0.0;
            for (a, &node) in nodes.iter().enumerate().skip(1) {
                v += b.values[a] * (self.coeffs[node * nc + c] - base);
            }
            out[c] = base + v;
        }
    }

    /// Physical gradients of each component at `bary` in `cell`.
    pub fn eval_grad_in_cell(&self, cell: usize, bary: [f64; 3], out: &mut [[f64; 2]]) {
        let nc = self.space.n_components();
        let geo = CellGeometry::new(self.space.mesh(), cell);
        let b = eval_basis(self.space.family(), bary);
        out[..nc].fill([0.0; 2]);
        for (a, &node) in self.space.cell_nodes(cell).iter().enumerate() {
            let g = geo.grad(b.grads[a]);
            for c in 0..nc {
                let v = self.coeffs[node * nc + c];
                out[c][0] += g[0] * v;
                out[c][1] += g[1] * v;
            }
        }
    }

    /// `self + alpha * other` on the same space.
    pub fn axpy(&mut self, alpha: f64, other: &FEFunction) -> Result<()> {
        if !self.space.same_as(&other.space) {
            return Err(Error::ShapeMismatch("axpy needs functions on the same space".into()));
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += alpha * b;
        }
        Ok(())
    }
}
