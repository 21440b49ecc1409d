use std::sync::Arc;

use nalgebra::Point2;

use super::element::CellGeometry;
use crate::mesh::Mesh;

/// Result of a point query: the containing (or nearest) cell, the
/// barycentric coordinates of the point in it, and the distance from the
/// point to that cell (zero when inside up to the snap tolerance).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Location {
    pub cell: usize,
    pub bary: [f64; 3],
    pub distance: f64,
}

/// Uniform bucket grid over cell bounding boxes, with a brute-force
/// nearest-cell fallback for points outside every cell.
pub struct PointLocator {
    mesh: Arc<Mesh>,
    geos: Vec<CellGeometry>,
    origin: Point2<f64>,
    size: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl PointLocator {
    pub fn new(mesh: &Arc<Mesh>) -> Self {
        let geos: Vec<CellGeometry> = (0..mesh.n_cells()).map(|c| CellGeometry::new(mesh, c)).collect();
        let (mut lo, mut hi) = (Point2::new(f64::MAX, f64::MAX), Point2::new(f64::MIN, f64::MIN));
        for p in mesh.vertices() {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        let extent = (hi - lo).max();
        let n_target = (mesh.n_cells() as f64).sqrt().ceil().max(1.0);
        let size = (extent / n_target).max(f64::MIN_POSITIVE);
        let nx = (((hi.x - lo.x) / size).floor() as usize + 1).max(1);
        let ny = (((hi.y - lo.y) / size).floor() as usize + 1).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        for (c, g) in geos.iter().enumerate() {
            let (mut a, mut b) = (g.points[0], g.points[0]);
            for p in &g.points[1..] {
                a = a.inf(p);
                b = b.sup(p);
            }
            let (i0, j0) = Self::bucket_of(lo, size, nx, ny, &a);
            let (i1, j1) = Self::bucket_of(lo, size, nx, ny, &b);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * nx + i].push(c as u32);
                }
            }
        }
        PointLocator {
            mesh: mesh.clone(),
            geos,
            origin: lo,
            size,
            nx,
            ny,
            buckets,
        }
    }

    fn bucket_of(origin: Point2<f64>, size: f64, nx: usize, ny: usize, p: &Point2<f64>) -> (usize, usize) {
        let i = ((p.x - origin.x) / size).floor().clamp(0.0, (nx - 1) as f64) as usize;
        let j = ((p.y - origin.y) / size).floor().clamp(0.0, (ny - 1) as f64) as usize;
        (i, j)
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    /// Finds the cell containing `p`, accepting barycentric coordinates down
    /// to `-snap_tol`. Falls back to the nearest cell by Euclidean distance.
    pub fn locate(&self, p: &Point2<f64>, snap_tol: f64) -> Location {
        let (i, j) = Self::bucket_of(self.origin, self.size, self.nx, self.ny, p);
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &c in &self.buckets[j * self.nx + i] {
            let bary = self.geos[c as usize].bary(p);
            let m = bary[0].min(bary[1]).min(bary[2]);
            if best.is_none_or(|b| m > b.2) {
                best = Some((c as usize, bary, m));
            }
        }
        if let Some((cell, bary, m)) = best {
            if m >= -snap_tol {
                return Location {
                    cell,
                    bary,
                    distance: 0.0,
                };
            }
        }
        let mut nearest = (usize::MAX, f64::INFINITY);
        for (c, g) in self.geos.iter().enumerate() {
            let d = distance_to_triangle(p, &g.points);
            if d < nearest.1 {
                nearest = (c, d);
            }
        }
        let cell = nearest.0;
        let bary = self.geos[cell].bary(p);
        let m = bary[0].min(bary[1]).min(bary[2]);
        Location {
            cell,
            bary,
            distance: if m >= -snap_tol { 0.0 } else { nearest.1 },
        }
    }
}

fn distance_to_segment(p: &Point2<f64>, a: &Point2<f64>, b: &Point2<f64>) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (p - (a + t * ab)).norm()
}

fn distance_to_triangle(p: &Point2<f64>, t: &[Point2<f64>; 3]) -> f64 {
    let inside = (0..3).all(|k| {
        let (a, b) = (t[k], t[(k + 1) % 3]);
        (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) >= 0.0
    });
    if inside {
        return 0.0;
    }
    (0..3)
        .map(|k| distance_to_segment(p, &t[k], &t[(k + 1) % 3]))
        .fold(f64::INFINITY, f64::min)
}
