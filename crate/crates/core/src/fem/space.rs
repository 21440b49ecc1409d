use std::fmt;
use std::sync::Arc;

use nalgebra::Point2;

use super::basis::Family;
use crate::mesh::Mesh;

/// Value type of a field.
///
/// Symmetric tensors store `(xx, xy, yy)`; traceless symmetric tensors store
/// `(xx, xy)` with `yy = -xx`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ValueShape {
    Scalar,
    Vector2,
    SymTensor2,
    SymTensor2Traceless,
}

impl ValueShape {
    pub fn n_components(self) -> usize {
        match self {
            ValueShape::Scalar => 1,
            ValueShape::Vector2 | ValueShape::SymTensor2Traceless => 2,
            ValueShape::SymTensor2 => 3,
        }
    }

    /// Per-component weights such that `Σ w_k c_k²` is the squared Euclidean
    /// (Frobenius for tensors) norm of the full value.
    pub fn norm_weights(self) -> &'static [f64] {
        match self {
            ValueShape::Scalar => &[1.0],
            ValueShape::Vector2 => &[1.0, 1.0],
            ValueShape::SymTensor2 => &[1.0, 2.0, 1.0],
            ValueShape::SymTensor2Traceless => &[2.0, 2.0],
        }
    }
}

impl fmt::Display for ValueShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueShape::Scalar => "scalar",
            ValueShape::Vector2 => "vector2",
            ValueShape::SymTensor2 => "symtensor2",
            ValueShape::SymTensor2Traceless => "symtensor2_traceless",
        })
    }
}

/// A continuous Lagrange space on a mesh.
///
/// Nodes are the mesh vertices (P1) or vertices followed by edge midpoints
/// (P2, node `V + e` for edge `e`). Global dof of component `c` at node `i`
/// is `i * n_components + c`.
#[derive(Debug)]
pub struct FunctionSpace {
    mesh: Arc<Mesh>,
    family: Family,
    shape: ValueShape,
    cell_nodes: Vec<[usize; 6]>,
    node_coords: Vec<Point2<f64>>,
}

impl FunctionSpace {
    pub fn new(mesh: Arc<Mesh>, family: Family, shape: ValueShape) -> Self {
        let nv = mesh.n_vertices();
        let mut node_coords = mesh.vertices().to_vec();
        if family == Family::P2 {
            node_coords.extend((0..mesh.n_edges()).map(|e| mesh.edge_midpoint(e)));
        }
        let cell_nodes = mesh
            .cells()
            .iter()
            .zip(mesh.cell_edges())
            .map(|(c, e)| match family {
                Family::P1 => [c[0], c[1], c[2], 0, 0, 0],
                Family::P2 => [c[0], c[1], c[2], nv + e[0], nv + e[1], nv + e[2]],
            })
            .collect();
        FunctionSpace {
            mesh,
            family,
            shape,
            cell_nodes,
            node_coords,
        }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn shape(&self) -> ValueShape {
        self.shape
    }

    pub fn n_components(&self) -> usize {
        self.shape.n_components()
    }

    pub fn n_nodes(&self) -> usize {
        self.node_coords.len()
    }

    pub fn n_dofs(&self) -> usize {
        self.n_nodes() * self.n_components()
    }

    pub fn n_local_nodes(&self) -> usize {
        self.family.n_local()
    }

    pub fn node_coords(&self) -> &[Point2<f64>] {
        &self.node_coords
    }

    /// Global node indices of `cell`, in local node order.
    pub fn cell_nodes(&self, cell: usize) -> &[usize] {
        &self.cell_nodes[cell][..self.family.n_local()]
    }

    #[inline]
    pub fn dof(&self, node: usize, comp: usize) -> usize {
        node * self.n_components() + comp
    }

    /// Global dofs of `cell`; local dof `a * n_components + c` is component
    /// `c` of local node `a`.
    pub fn cell_dofs(&self, cell: usize) -> Vec<usize> {
        let nc = self.n_components();
        self.cell_nodes(cell)
            .iter()
            .flat_map(|&n| (0..nc).map(move |c| n * nc + c))
            .collect()
    }

    pub fn dof_coords(&self) -> Vec<Point2<f64>> {
        let nc = self.n_components();
        self.node_coords
            .iter()
            .flat_map(|p| std::iter::repeat(*p).take(nc))
            .collect()
    }

    /// Whether both spaces have the same mesh, family and shape.
    pub fn same_as(&self, other: &FunctionSpace) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh) && self.family == other.family && self.shape == other.shape
    }
}

pub fn build_space(mesh: &Arc<Mesh>, family: Family, shape: ValueShape) -> Arc<FunctionSpace> {
    Arc::new(FunctionSpace::new(mesh.clone(), family, shape))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{eccentric_annulus_mesh, unit_square_mesh};

    #[test]
    fn paper_dof_counts_n10() {
        let mesh = Arc::new(unit_square_mesh(10).unwrap());
        let u = build_space(&mesh, Family::P2, ValueShape::Vector2);
        let p = build_space(&mesh, Family::P1, ValueShape::Scalar);
        let t = build_space(&mesh, Family::P2, ValueShape::SymTensor2);
        let d = build_space(&mesh, Family::P1, ValueShape::SymTensor2Traceless);
        assert_eq!((u.n_dofs(), p.n_dofs()), (882, 121));
        assert_eq!(u.n_dofs() + p.n_dofs(), 1003);
        assert_eq!(t.n_dofs(), 1323);
        assert_eq!(d.n_dofs(), 242);
        assert_eq!(u.n_dofs() + p.n_dofs() + t.n_dofs() + d.n_dofs(), 2568);
    }

    #[test]
    fn closed_form_counts_and_coverage() {
        let meshes = [
            unit_square_mesh(1).unwrap(),
            unit_square_mesh(3).unwrap(),
            unit_square_mesh(8).unwrap(),
            eccentric_annulus_mesh(1.0, 0.5, 0.25, 0.3).unwrap(),
            eccentric_annulus_mesh(1.0, 0.5, 0.0, 0.2).unwrap(),
        ];
        for mesh in meshes {
            let mesh = Arc::new(mesh);
            let (v, e) = (mesh.n_vertices(), mesh.n_edges());
            for family in [Family::P1, Family::P2] {
                let scalar = if family == Family::P1 { v } else { v + e };
                for shape in [
                    ValueShape::Scalar,
                    ValueShape::Vector2,
                    ValueShape::SymTensor2,
                    ValueShape::SymTensor2Traceless,
                ] {
                    let s = build_space(&mesh, family, shape);
                    assert_eq!(s.n_dofs(), scalar * shape.n_components());
                    let mut seen = vec![false; s.n_dofs()];
                    for c in 0..mesh.n_cells() {
                        let mut dofs = s.cell_dofs(c);
                        dofs.iter().for_each(|&d| seen[d] = true);
                        dofs.sort_unstable();
                        dofs.dedup();
                        assert_eq!(dofs.len(), family.n_local() * shape.n_components());
                    }
                    assert!(seen.iter().all(|&x| x));
                }
            }
        }
    }

    #[test]
    fn edge_nodes_at_midpoints() {
        let mesh = Arc::new(unit_square_mesh(2).unwrap());
        let s = build_space(&mesh, Family::P2, ValueShape::Scalar);
        for c in 0..mesh.n_cells() {
            let pts = mesh.cell_points(c);
            for k in 0..3 {
                let node = s.cell_nodes(c)[3 + k];
                let mid = nalgebra::center(&pts[(k + 1) % 3], &pts[(k + 2) % 3]);
                assert!((s.node_coords()[node] - mid).norm() < 1e-15);
            }
        }
    }
}
