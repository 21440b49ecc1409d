use nalgebra::Point2;

use super::{BoundaryTag, Mesh};
use crate::error::{Error, Result};

/// `n x n` squares over `[0,1]^2`, each split along its lower-left to
/// upper-right diagonal. Edges on `y = 1` are tagged `SquareTop`, every
/// other boundary edge `SquareWallsFloor`.
pub fn unit_square_mesh(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidMesh("unit square mesh needs n >= 1".into()));
    }
    let m = n + 1;
    let nf = n as f64;
    let mut vertices = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m {
            vertices.push(Point2::new(i as f64 / nf, j as f64 / nf));
        }
    }
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let v00 = j * m + i;
            let v10 = v00 + 1;
            let v01 = v00 + m;
            let v11 = v01 + 1;
            cells.push([v00, v10, v11]);
            cells.push([v00, v11, v01]);
        }
    }
    Mesh::from_cells(vertices, cells, |a, b| {
        if a.y == 1.0 && b.y == 1.0 {
            BoundaryTag::SquareTop
        } else {
            BoundaryTag::SquareWallsFloor
        }
    })
}
