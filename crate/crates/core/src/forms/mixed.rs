use std::sync::Arc;

use nalgebra::Point2;

use crate::error::{Error, Result};
use crate::fem::{boundary_nodes, FEFunction, FamilyTable, FunctionSpace};
use crate::linalg::{SparseMatrix, SparsityPattern};
use crate::mesh::{BoundaryTag, Mesh};

/// Several fields on one mesh, stacked into a single unknown vector in field
/// order. Within a cell, local dofs are also stacked field by field.
#[derive(Clone, Debug)]
pub struct MixedSpace {
    fields: Vec<Arc<FunctionSpace>>,
    offsets: Vec<usize>,
    local_offsets: Vec<usize>,
}

impl MixedSpace {
    pub fn new(fields: Vec<Arc<FunctionSpace>>) -> Result<Self> {
        let first = fields
            .first()
            .ok_or_else(|| Error::InvalidParameters("mixed space needs at least one field".into()))?;
        if fields.iter().any(|f| !Arc::ptr_eq(f.mesh(), first.mesh())) {
            return Err(Error::ShapeMismatch(
                "all fields of a mixed space must share one mesh".into(),
            ));
        }
        let mut offsets = vec![0];
        let mut local_offsets = vec![0];
        for f in &fields {
            offsets.push(offsets.last().unwrap() + f.n_dofs());
            local_offsets.push(local_offsets.last().unwrap() + f.n_local_nodes() * f.n_components());
        }
        Ok(MixedSpace {
            fields,
            offsets,
            local_offsets,
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        self.fields[0].mesh()
    }

    pub fn n_fields(&self) -> usize {
        self.fields.len()
    }

    pub fn field(&self, k: usize) -> &Arc<FunctionSpace> {
        &self.fields[k]
    }

    pub fn offset(&self, k: usize) -> usize {
        self.offsets[k]
    }

    pub fn n_dofs(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn local_offset(&self, k: usize) -> usize {
        self.local_offsets[k]
    }

    pub fn n_local(&self) -> usize {
        *self.local_offsets.last().unwrap()
    }

    /// Global dofs of `cell`, stacked field by field.
    pub fn cell_dofs(&self, cell: usize, out: &mut Vec<usize>) {
        out.clear();
        for (f, &off) in self.fields.iter().zip(&self.offsets) {
            let nc = f.n_components();
            for &n in f.cell_nodes(cell) {
                out.extend((0..nc).map(|c| off + n * nc + c));
            }
        }
    }

    pub fn block<'a>(&self, x: &'a [f64], k: usize) -> &'a [f64] {
        &x[self.offsets[k]..self.offsets[k + 1]]
    }

    pub fn block_mut<'a>(&self, x: &'a mut [f64], k: usize) -> &'a mut [f64] {
        &mut x[self.offsets[k]..self.offsets[k + 1]]
    }

    /// Splits a stacked vector into one function per field.
    pub fn split(&self, x: &[f64]) -> Result<Vec<FEFunction>> {
        if x.len() != self.n_dofs() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a mixed space with {} dofs",
                x.len(),
                self.n_dofs()
            )));
        }
        (0..self.n_fields())
            .map(|k| FEFunction::from_coeffs(&self.fields[k], self.block(x, k).to_vec()))
            .collect()
    }

    /// Stacks one function per field.
    pub fn join(&self, parts: &[&FEFunction]) -> Result<Vec<f64>> {
        if parts.len() != self.n_fields() {
            return Err(Error::DimensionMismatch(format!(
                "{} parts for {} fields",
                parts.len(),
                self.n_fields()
            )));
        }
        let mut x = Vec::with_capacity(self.n_dofs());
        for (p, f) in parts.iter().zip(&self.fields) {
            if !p.space().same_as(f) {
                return Err(Error::ShapeMismatch("part does not live on its field space".into()));
            }
            x.extend_from_slice(p.coeffs());
        }
        Ok(x)
    }

    /// Sparsity of a block operator. Field `a` rows couple to field `b`
    /// columns when `coupling[a][b]`; diagonal blocks are always present.
    pub fn pattern(&self, coupling: &[Vec<bool>]) -> Result<Arc<SparsityPattern>> {
        let nf = self.n_fields();
        if coupling.len() != nf || coupling.iter().any(|r| r.len() != nf) {
            return Err(Error::DimensionMismatch(format!("coupling must be {nf}x{nf}")));
        }
        let adj = node_adjacency(self.mesh());
        let mut row_ptr = Vec::with_capacity(self.n_dofs() + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        for (a, fa) in self.fields.iter().enumerate() {
            for node in 0..fa.n_nodes() {
                let start = col_idx.len();
                for (b, fb) in self.fields.iter().enumerate() {
                    if a != b && !coupling[a][b] {
                        continue;
                    }
                    let (nb, ncb, off) = (fb.n_nodes(), fb.n_components(), self.offsets[b]);
                    for &j in adj[node].iter().take_while(|&&j| (j as usize) < nb) {
                        col_idx.extend((0..ncb).map(|c| off + j as usize * ncb + c));
                    }
                }
                let len = col_idx.len() - start;
                for c in 0..fa.n_components() {
                    if c > 0 {
                        col_idx.extend_from_within(start..start + len);
                    }
                    row_ptr.push(col_idx.len());
                }
            }
        }
        Ok(Arc::new(SparsityPattern::from_csr(self.n_dofs(), row_ptr, col_idx)?))
    }

    /// Every block coupled to every other.
    pub fn full_pattern(&self) -> Result<Arc<SparsityPattern>> {
        let nf = self.n_fields();
        self.pattern(&vec![vec![true; nf]; nf])
    }
}

/// Sorted neighbours of every P2 node (vertices, then edges) through shared
/// cells, including the node itself. Vertex `v` is node `v` in both P1 and P2
/// numberings, so the same lists serve both families.
fn node_adjacency(mesh: &Mesh) -> Vec<Vec<u32>> {
    let nv = mesh.n_vertices();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); nv + mesh.n_edges()];
    for (c, e) in mesh.cells().iter().zip(mesh.cell_edges()) {
        let nodes = [c[0], c[1], c[2], nv + e[0], nv + e[1], nv + e[2]];
        for &i in &nodes {
            adj[i].extend(nodes.iter().map(|&j| j as u32));
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// Fixed values for selected dofs of a stacked vector. In a residual the
/// constrained row reads `x_i - g_i`; in a Jacobian it is the unit row.
#[derive(Clone, Debug, Default)]
pub struct Constraints {
    dofs: Vec<usize>,
    values: Vec<f64>,
}

impl Constraints {
    pub fn new() -> Self {
        Self::default()
    }

    /// Prescribes field `field` on the boundary edges tagged `tag`; `g`
    /// writes all components at a point. Later calls override earlier ones
    /// at shared nodes.
    pub fn add_dirichlet<G>(&mut self, ms: &MixedSpace, field: usize, tag: BoundaryTag, g: G) -> Result<()>
    where
        G: Fn(Point2<f64>, &mut [f64]),
    {
        let space = ms.field(field);
        let nc = space.n_components();
        let mut buf = vec![0.0; nc];
        for node in boundary_nodes(space, &[tag])? {
            g(space.node_coords()[node], &mut buf);
            for (c, &v) in buf.iter().enumerate() {
                self.fix(ms.offset(field) + space.dof(node, c), v);
            }
        }
        Ok(())
    }

    pub fn fix(&mut self, dof: usize, value: f64) {
        match self.dofs.binary_search(&dof) {
            Ok(k) => self.values[k] = value,
            Err(k) => {
                self.dofs.insert(k, dof);
                self.values.insert(k, value);
            }
        }
    }

    pub fn dofs(&self) -> &[usize] {
        &self.dofs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.dofs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dofs.is_empty()
    }

    /// Writes the prescribed values into `x`.
    pub fn impose(&self, x: &mut [f64]) {
        for (&d, &v) in self.dofs.iter().zip(&self.values) {
            x[d] = v;
        }
    }

    pub fn apply_residual(&self, x: &[f64], r: &mut [f64]) {
        for (&d, &v) in self.dofs.iter().zip(&self.values) {
            r[d] = x[d] - v;
        }
    }

    pub fn apply_jacobian(&self, jac: &mut SparseMatrix) {
        for &d in &self.dofs {
            let (cols, vals) = jac.row_mut(d);
            let mut has_diag = false;
            for (&j, v) in cols.iter().zip(vals.iter_mut()) {
                *v = if j == d { 1.0 } else { 0.0 };
                has_diag |= j == d;
            }
            assert!(has_diag, "constrained row {d} has no diagonal entry");
        }
    }
}

/// Pressure dof pinned to zero: the first vertex on the boundary.
pub fn pressure_pin(ms: &MixedSpace, field: usize) -> usize {
    let v = ms.mesh().boundary_vertices()[0];
    ms.offset(field) + ms.field(field).dof(v, 0)
}

/// Local coefficients of field `k` of a stacked vector on `cell`, in local
/// dof order.
pub(crate) fn gather(ms: &MixedSpace, x: &[f64], k: usize, cell: usize, out: &mut [f64]) {
    let space = ms.field(k);
    let nc = space.n_components();
    let block = ms.block(x, k);
    for (a, &n) in space.cell_nodes(cell).iter().enumerate() {
        for c in 0..nc {
            out[a * nc + c] = block[n * nc + c];
        }
    }
}

pub(crate) fn gather_fn(f: &FEFunction, cell: usize, out: &mut [f64]) {
    let space = f.space();
    let nc = space.n_components();
    for (a, &n) in space.cell_nodes(cell).iter().enumerate() {
        for c in 0..nc {
            out[a * nc + c] = f.coeffs()[n * nc + c];
        }
    }
}

/// Values and gradients of up to three components at quadrature point `q`.
#[inline]
pub(crate) fn eval_local(table: &FamilyTable, q: usize, local: &[f64], nc: usize) -> ([f64; 3], [[f64; 2]; 3]) {
    let mut v = [0.0; 3];
    let mut g = [[0.0; 2]; 3];
    let (phi, dphi) = (&table.values[q], &table.grads[q]);
    for a in 0..table.n {
        for c in 0..nc {
            let x = local[a * nc + c];
            v[c] += phi[a] * x;
            g[c][0] += dphi[a][0] * x;
            g[c][1] += dphi[a][1] * x;
        }
    }
    (v, g)
}

/// A vector-valued source or boundary datum.
pub type VectorField = Arc<dyn Fn(Point2<f64>) -> [f64; 2] + Send + Sync>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{build_space, Family, ValueShape};
    use crate::mesh::unit_square_mesh;

    fn taylor_hood(n: usize) -> MixedSpace {
        let mesh = Arc::new(unit_square_mesh(n).unwrap());
        MixedSpace::new(vec![
            build_space(&mesh, Family::P2, ValueShape::Vector2),
            build_space(&mesh, Family::P1, ValueShape::Scalar),
        ])
        .unwrap()
    }

    #[test]
    fn pattern_matches_cellwise_coupling() {
        let ms = taylor_hood(3);
        let pat = ms.pattern(&[vec![true, false], vec![true, false]]).unwrap();
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); ms.n_dofs()];
        let mut dofs = Vec::new();
        let nu = ms.local_offset(1);
        for c in 0..ms.mesh().n_cells() {
            ms.cell_dofs(c, &mut dofs);
            for (a, &i) in dofs.iter().enumerate() {
                for (b, &j) in dofs.iter().enumerate() {
                    if !(a < nu && b >= nu) {
                        rows[i].push(j);
                    }
                }
            }
        }
        let expected = SparsityPattern::from_rows(ms.n_dofs(), rows).unwrap();
        assert_eq!(*pat, expected);
    }

    #[test]
    fn split_join_round_trip() {
        let ms = taylor_hood(2);
        let x: Vec<f64> = (0..ms.n_dofs()).map(|i| i as f64).collect();
        let parts = ms.split(&x).unwrap();
        assert_eq!(ms.join(&[&parts[0], &parts[1]]).unwrap(), x);
    }

    #[test]
    fn later_dirichlet_overrides() {
        let ms = taylor_hood(2);
        let mut cons = Constraints::new();
        cons.add_dirichlet(&ms, 0, BoundaryTag::SquareWallsFloor, |_, g| g.fill(0.0))
            .unwrap();
        cons.add_dirichlet(&ms, 0, BoundaryTag::SquareTop, |_, g| g.fill(1.0))
            .unwrap();
        // top corners belong to both tags and take the lid value
        let space = ms.field(0);
        let corner = space
            .node_coords()
            .iter()
            .position(|p| p.x == 0.0 && p.y == 1.0)
            .unwrap();
        let k = cons.dofs().binary_search(&space.dof(corner, 0)).unwrap();
        assert_eq!(cons.values()[k], 1.0);
        // all boundary velocity dofs of a 2x2 P2 grid: 16 nodes x 2
        assert_eq!(cons.len(), 32);
    }
}
