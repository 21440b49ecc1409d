use super::space::FunctionSpace;
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::mesh::BoundaryTag;

/// Sorted nodes of `space` lying on edges with any of `tags` (vertices and,
/// for P2, edge midpoints).
pub fn boundary_nodes(space: &FunctionSpace, tags: &[BoundaryTag]) -> Result<Vec<usize>> {
    let mesh = space.mesh();
    let nv = mesh.n_vertices();
    let mut nodes = Vec::new();
    for &tag in tags {
        if !tag.is_boundary() || !mesh.has_tag(tag) {
            return Err(Error::TagAbsent(tag.name().to_string()));
        }
        for e in mesh.edges_with_tag(tag) {
            nodes.extend_from_slice(&mesh.edges()[e]);
            if space.family() == super::Family::P2 {
                nodes.push(nv + e);
            }
        }
    }
    nodes.sort_unstable();
    nodes.dedup();
    Ok(nodes)
}

/// Sorted dofs (all components) on edges with any of `tags`.
pub fn dirichlet_dofs(space: &FunctionSpace, tags: &[BoundaryTag]) -> Result<Vec<usize>> {
    let nc = space.n_components();
    Ok(boundary_nodes(space, tags)?
        .into_iter()
        .flat_map(|n| (0..nc).map(move |c| n * nc + c))
        .collect())
}

/// Imposes `x[dofs[k]] = values[k]` on `A x = b` by symmetric elimination:
/// constrained columns are moved to the right side, constrained rows become
/// identity rows. Every constrained row must store its diagonal.
pub fn apply_dirichlet(matrix: &mut SparseMatrix, rhs: &mut [f64], dofs: &[usize], values: &[f64]) {
    assert_eq!(dofs.len(), values.len(), "one value per constrained dof");
    let n = matrix.n_rows();
    let mut fixed: Vec<Option<f64>> = vec![None; matrix.n_cols()];
    for (&d, &v) in dofs.iter().zip(values) {
        fixed[d] = Some(v);
    }
    for i in 0..n {
        let (cols, vals) = matrix.row_mut(i);
        if let Some(g) = fixed[i] {
            let mut has_diag = false;
            for (&j, v) in cols.iter().zip(vals.iter_mut()) {
                *v = if j == i { 1.0 } else { 0.0 };
                has_diag |= j == i;
            }
            assert!(has_diag, "constrained row {i} has no diagonal entry");
            rhs[i] = g;
        } else {
            for (&j, v) in cols.iter().zip(vals.iter_mut()) {
                if let Some(g) = fixed[j] {
                    rhs[i] -= *v * g;
                    *v = 0.0;
                }
            }
        }
    }
}
