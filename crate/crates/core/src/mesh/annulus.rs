use std::f64::consts::PI;

use nalgebra::{Point2, Vector2};
use spade::{ConstrainedDelaunayTriangulation, Triangulation};

use super::{signed_area, BoundaryTag, Mesh};
use crate::error::{Error, Result};

const SMOOTHING_SWEEPS: usize = 12;
const ON_CIRCLE_TOL: f64 = 1e-9;

/// Triangulates the region between the circle of radius `outer` centred at
/// the origin and the circle of radius `inner` centred at `(0, eccentricity)`.
///
/// The right half `x >= 0` is meshed (boundary nodes spaced about `h` on both
/// arcs and on the symmetry axis, a clipped hexagonal lattice inside, a few
/// sweeps of Laplacian smoothing with constrained Delaunay retriangulation)
/// and then mirrored across `x = 0`, so the mesh is reflection-symmetric.
/// Boundary vertices lie exactly on the circles; edges stay straight.
pub fn eccentric_annulus_mesh(outer: f64, inner: f64, eccentricity: f64, h: f64) -> Result<Mesh> {
    if !(outer > 0.0 && inner > 0.0 && inner + eccentricity.abs() < outer) {
        return Err(Error::DegenerateGeometry {
            outer,
            inner,
            eccentricity,
        });
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidMesh(format!("target size h = {h} must be positive")));
    }
    let geom = Annulus {
        outer,
        inner,
        center: Point2::new(0.0, eccentricity),
    };

    let (mut points, n_fixed, constraints) = half_boundary(&geom, h);
    let lattice = hex_lattice(&geom, h);
    points.extend(lattice);

    for _ in 0..SMOOTHING_SWEEPS {
        let cells = triangulate(&geom, &points, &constraints)?;
        smooth(&geom, h, &mut points, n_fixed, &cells);
    }
    let half_cells = triangulate(&geom, &points, &constraints)?;
    let (vertices, cells) = mirror(&points, &half_cells);

    Mesh::from_cells(vertices, cells, |a, b| {
        if geom.on_outer(&a) && geom.on_outer(&b) {
            BoundaryTag::AnnulusOuter
        } else if geom.on_inner(&a) && geom.on_inner(&b) {
            BoundaryTag::AnnulusInner
        } else {
            BoundaryTag::Interior
        }
    })
}

struct Annulus {
    outer: f64,
    inner: f64,
    center: Point2<f64>,
}

impl Annulus {
    fn on_outer(&self, p: &Point2<f64>) -> bool {
        (p.coords.norm() - self.outer).abs() < ON_CIRCLE_TOL
    }

    fn on_inner(&self, p: &Point2<f64>) -> bool {
        ((p - self.center).norm() - self.inner).abs() < ON_CIRCLE_TOL
    }

    /// Signed clearance from both circles (negative outside the domain).
    fn clearance(&self, p: &Point2<f64>) -> f64 {
        let to_outer = self.outer - p.coords.norm();
        let to_inner = (p - self.center).norm() - self.inner;
        to_outer.min(to_inner)
    }
}

/// Closed boundary loop of the half domain `x >= 0`:
/// outer arc bottom to top, top axis segment downwards, inner arc top to
/// bottom, bottom axis segment downwards.
fn half_boundary(g: &Annulus, h: f64) -> (Vec<Point2<f64>>, usize, Vec<[usize; 2]>) {
    let mut pts = Vec::new();
    let n_outer = ((PI * g.outer / h).ceil() as usize).max(2);
    for j in 0..=n_outer {
        let t = -PI / 2.0 + PI * j as f64 / n_outer as f64;
        pts.push(arc_point(Point2::origin(), g.outer, t, j == 0 || j == n_outer));
    }
    let top_len = g.outer - (g.center.y + g.inner);
    let n_top = ((top_len / h).ceil() as usize).max(1);
    for j in 1..n_top {
        pts.push(Point2::new(0.0, g.outer - top_len * j as f64 / n_top as f64));
    }
    let n_inner = ((PI * g.inner / h).ceil() as usize).max(2);
    for j in 0..=n_inner {
        let t = PI / 2.0 - PI * j as f64 / n_inner as f64;
        pts.push(arc_point(g.center, g.inner, t, j == 0 || j == n_inner));
    }
    let bottom_top = g.center.y - g.inner;
    let bottom_len = bottom_top + g.outer;
    let n_bottom = ((bottom_len / h).ceil() as usize).max(1);
    for j in 1..n_bottom {
        pts.push(Point2::new(0.0, bottom_top - bottom_len * j as f64 / n_bottom as f64));
    }
    let n = pts.len();
    let constraints = (0..n).map(|i| [i, (i + 1) % n]).collect();
    (pts, n, constraints)
}

fn arc_point(center: Point2<f64>, radius: f64, t: f64, on_axis: bool) -> Point2<f64> {
    let x = if on_axis { 0.0 } else { radius * t.cos() };
    Point2::new(center.x + x, center.y + radius * t.sin())
}

fn hex_lattice(g: &Annulus, h: f64) -> Vec<Point2<f64>> {
    let dy = h * 3f64.sqrt() / 2.0;
    let rows = (2.0 * g.outer / dy).ceil() as usize + 1;
    let cols = (g.outer / h).ceil() as usize + 2;
    let mut out = Vec::new();
    for k in 0..rows {
        let y = -g.outer + k as f64 * dy;
        let shift = if k % 2 == 1 { 0.5 * h } else { 0.0 };
        for i in 0..cols {
            let p = Point2::new(shift + i as f64 * h, y);
            if p.x >= 0.5 * h && g.clearance(&p) >= 0.5 * h {
                out.push(p);
            }
        }
    }
    out
}

fn triangulate(g: &Annulus, points: &[Point2<f64>], constraints: &[[usize; 2]]) -> Result<Vec<[usize; 3]>> {
    let verts: Vec<spade::Point2<f64>> = points.iter().map(|p| spade::Point2::new(p.x, p.y)).collect();
    let cdt = ConstrainedDelaunayTriangulation::<spade::Point2<f64>>::bulk_load_cdt(verts, constraints.to_vec())
        .map_err(|e| Error::InvalidMesh(format!("triangulation failed: {e:?}")))?;
    if cdt.num_vertices() != points.len() {
        return Err(Error::InvalidMesh("triangulation merged coincident points".into()));
    }
    let mut cells = Vec::with_capacity(cdt.num_inner_faces());
    for face in cdt.inner_faces() {
        let mut tri = face.vertices().map(|v| v.fix().index());
        for (k, v) in face.vertices().iter().enumerate() {
            debug_assert_eq!(v.position(), spade::Point2::new(points[tri[k]].x, points[tri[k]].y));
        }
        let [a, b, c] = tri.map(|i| points[i]);
        let centroid = Point2::from((a.coords + b.coords + c.coords) / 3.0);
        if (centroid - g.center).norm() < g.inner {
            continue;
        }
        if signed_area(&a, &b, &c) < 0.0 {
            tri.swap(1, 2);
        }
        cells.push(tri);
    }
    Ok(cells)
}

fn smooth(g: &Annulus, h: f64, points: &mut [Point2<f64>], n_fixed: usize, cells: &[[usize; 3]]) {
    let mut sum = vec![Vector2::zeros(); points.len()];
    let mut count = vec![0usize; points.len()];
    for cell in cells {
        for k in 0..3 {
            let (a, b) = (cell[k], cell[(k + 1) % 3]);
            // each interior edge is seen twice, once per adjacent cell
            sum[a] += points[b].coords;
            sum[b] += points[a].coords;
            count[a] += 1;
            count[b] += 1;
        }
    }
    for i in n_fixed..points.len() {
        if count[i] == 0 {
            continue;
        }
        let p = Point2::from(sum[i] / count[i] as f64);
        if p.x > 0.1 * h && g.clearance(&p) > 0.1 * h {
            points[i] = p;
        }
    }
}

fn mirror(points: &[Point2<f64>], cells: &[[usize; 3]]) -> (Vec<Point2<f64>>, Vec<[usize; 3]>) {
    let mut vertices = points.to_vec();
    let image: Vec<usize> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if p.x == 0.0 {
                i
            } else {
                vertices.push(Point2::new(-p.x, p.y));
                vertices.len() - 1
            }
        })
        .collect();
    let mut out = cells.to_vec();
    out.extend(cells.iter().map(|&[a, b, c]| [image[a], image[c], image[b]]));
    (vertices, out)
}
