//! Straight-edged 2D triangulations with boundary classification.

mod annulus;
mod dump;
mod msh;
mod square;

use std::collections::HashMap;
use std::fmt;

use nalgebra::{Point2, Vector2};

use crate::error::{Error, Result};

pub use annulus::eccentric_annulus_mesh;
pub use dump::{read_dump, write_dump};
pub use msh::{read_msh, read_msh_str, write_msh, MshOptions};
pub use square::unit_square_mesh;

/// Classification of a mesh edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    Interior,
    SquareTop,
    SquareWallsFloor,
    AnnulusInner,
    AnnulusOuter,
}

impl BoundaryTag {
    pub const BOUNDARY: [BoundaryTag; 4] = [
        BoundaryTag::SquareTop,
        BoundaryTag::SquareWallsFloor,
        BoundaryTag::AnnulusInner,
        BoundaryTag::AnnulusOuter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundaryTag::Interior => "interior",
            BoundaryTag::SquareTop => "square_top",
            BoundaryTag::SquareWallsFloor => "square_walls_floor",
            BoundaryTag::AnnulusInner => "annulus_inner",
            BoundaryTag::AnnulusOuter => "annulus_outer",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [BoundaryTag::Interior]
            .into_iter()
            .chain(Self::BOUNDARY)
            .find(|t| t.name() == name)
    }

    pub fn is_boundary(self) -> bool {
        self != BoundaryTag::Interior
    }
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An immutable triangulation.
///
/// Cells are counterclockwise vertex triples. Edges are deduplicated vertex
/// pairs `(a, b)` with `a < b`, sorted lexicographically. Local edge `k` of a
/// cell is the edge opposite its local vertex `k`.
#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Point2<f64>>,
    cells: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    cell_edges: Vec<[usize; 3]>,
    edge_cell_count: Vec<u8>,
    boundary_tags: Vec<BoundaryTag>,
    h_char: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshStats {
    pub vertices: usize,
    pub edges: usize,
    pub cells: usize,
    pub h_char: f64,
    /// Smallest interior angle over all cells, in degrees.
    pub min_angle: f64,
}

impl Mesh {
    /// Builds a mesh and classifies each boundary edge with `classify`,
    /// which receives the two edge endpoints.
    ///
    /// Clockwise cells are rejected; every boundary edge must receive a
    /// non-interior tag.
    pub fn from_cells<F>(vertices: Vec<Point2<f64>>, cells: Vec<[usize; 3]>, classify: F) -> Result<Self>
    where
        F: Fn(Point2<f64>, Point2<f64>) -> BoundaryTag,
    {
        let mut mesh = Self::topology(vertices, cells)?;
        for (e, &[a, b]) in mesh.edges.iter().enumerate() {
            if mesh.edge_cell_count[e] == 1 {
                let tag = classify(mesh.vertices[a], mesh.vertices[b]);
                if !tag.is_boundary() {
                    return Err(Error::InvalidMesh(format!(
                        "boundary edge ({a}, {b}) classified as interior"
                    )));
                }
                mesh.boundary_tags[e] = tag;
            }
        }
        Ok(mesh)
    }

    /// Builds a mesh from explicitly tagged boundary edges (vertex pairs in
    /// either order). Tagged pairs that are not boundary edges are rejected.
    pub fn from_tagged_edges(
        vertices: Vec<Point2<f64>>,
        cells: Vec<[usize; 3]>,
        tagged: &[([usize; 2], BoundaryTag)],
    ) -> Result<Self> {
        let mut mesh = Self::topology(vertices, cells)?;
        for &([a, b], tag) in tagged {
            let e = mesh
                .find_edge(a, b)
                .ok_or_else(|| Error::InvalidMesh(format!("tagged edge ({a}, {b}) is not a mesh edge")))?;
            if mesh.edge_cell_count[e] != 1 {
                return Err(Error::InvalidMesh(format!(
                    "tagged edge ({a}, {b}) is an interior edge"
                )));
            }
            mesh.boundary_tags[e] = tag;
        }
        if let Some(e) =
            (0..mesh.edges.len()).find(|&e| mesh.edge_cell_count[e] == 1 && !mesh.boundary_tags[e].is_boundary())
        {
            let [a, b] = mesh.edges[e];
            return Err(Error::InvalidMesh(format!("boundary edge ({a}, {b}) carries no tag")));
        }
        Ok(mesh)
    }

    fn topology(vertices: Vec<Point2<f64>>, cells: Vec<[usize; 3]>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidMesh("mesh has no cells".into()));
        }
        let nv = vertices.len();
        let mut used = vec![false; nv];
        for (c, cell) in cells.iter().enumerate() {
            for &v in cell {
                if v >= nv {
                    return Err(Error::InvalidMesh(format!("cell {c} references missing vertex {v}")));
                }
                used[v] = true;
            }
            if cell[0] == cell[1] || cell[1] == cell[2] || cell[0] == cell[2] {
                return Err(Error::InvalidMesh(format!("cell {c} repeats a vertex")));
            }
            let area = signed_area(&vertices[cell[0]], &vertices[cell[1]], &vertices[cell[2]]);
            if area <= 0.0 {
                return Err(Error::InvalidMesh(format!(
                    "cell {c} has non-positive signed area {area:e}"
                )));
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::InvalidMesh(format!("vertex {v} belongs to no cell")));
        }

        let mut keyed: Vec<([usize; 2], usize, usize)> = Vec::with_capacity(3 * cells.len());
        for (c, cell) in cells.iter().enumerate() {
            for k in 0..3 {
                let a = cell[(k + 1) % 3];
                let b = cell[(k + 2) % 3];
                keyed.push(([a.min(b), a.max(b)], c, k));
            }
        }
        keyed.sort_unstable();

        let mut edges = Vec::with_capacity(keyed.len() / 2 + 1);
        let mut edge_cell_count: Vec<u8> = Vec::with_capacity(keyed.len() / 2 + 1);
        let mut cell_edges = vec![[usize::MAX; 3]; cells.len()];
        for (key, c, k) in keyed {
            if edges.last() != Some(&key) {
                edges.push(key);
                edge_cell_count.push(0);
            }
            let e = edges.len() - 1;
            edge_cell_count[e] += 1;
            if edge_cell_count[e] > 2 {
                return Err(Error::InvalidMesh(format!(
                    "edge ({}, {}) is shared by more than two cells",
                    key[0], key[1]
                )));
            }
            cell_edges[c][k] = e;
        }

        let h_char = cells
            .iter()
            .map(|cell| cell_diameter(&vertices, cell))
            .fold(0.0, f64::max);
        let boundary_tags = vec![BoundaryTag::Interior; edges.len()];
        Ok(Mesh {
            vertices,
            cells,
            edges,
            cell_edges,
            edge_cell_count,
            boundary_tags,
            h_char,
        })
    }

    pub fn vertices(&self) -> &[Point2<f64>] {
        &self.vertices
    }

    pub fn cells(&self) -> &[[usize; 3]] {
        &self.cells
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Edge indices of each cell; local edge `k` is opposite local vertex `k`.
    pub fn cell_edges(&self) -> &[[usize; 3]] {
        &self.cell_edges
    }

    pub fn boundary_tags(&self) -> &[BoundaryTag] {
        &self.boundary_tags
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Characteristic size: the longest edge over all cells.
    pub fn h_char(&self) -> f64 {
        self.h_char
    }

    pub fn cells_sharing_edge(&self, edge: usize) -> usize {
        self.edge_cell_count[edge] as usize
    }

    pub fn find_edge(&self, a: usize, b: usize) -> Option<usize> {
        let key = [a.min(b), a.max(b)];
        self.edges.binary_search(&key).ok()
    }

    pub fn cell_points(&self, cell: usize) -> [Point2<f64>; 3] {
        let [a, b, c] = self.cells[cell];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn cell_area(&self, cell: usize) -> f64 {
        let [a, b, c] = self.cell_points(cell);
        signed_area(&a, &b, &c)
    }

    pub fn cell_diameter(&self, cell: usize) -> f64 {
        cell_diameter(&self.vertices, &self.cells[cell])
    }

    pub fn edge_midpoint(&self, edge: usize) -> Point2<f64> {
        let [a, b] = self.edges[edge];
        nalgebra::center(&self.vertices[a], &self.vertices[b])
    }

    /// Edge indices carrying `tag`.
    pub fn edges_with_tag(&self, tag: BoundaryTag) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(move |&e| self.boundary_tags[e] == tag)
    }

    pub fn has_tag(&self, tag: BoundaryTag) -> bool {
        self.boundary_tags.contains(&tag)
    }

    /// Sorted, deduplicated vertices lying on edges with `tag`.
    pub fn vertices_with_tag(&self, tag: BoundaryTag) -> Vec<usize> {
        let mut out: Vec<usize> = self.edges_with_tag(tag).flat_map(|e| self.edges[e]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Sorted vertices lying on any boundary edge.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.edges.len())
            .filter(|&e| self.boundary_tags[e].is_boundary())
            .flat_map(|e| self.edges[e])
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.cell_area(c)).sum()
    }

    /// Boundary edges grouped by tag, as vertex pairs in cell orientation
    /// (the domain lies to the left).
    pub fn oriented_boundary_edges(&self) -> Vec<([usize; 2], BoundaryTag)> {
        let mut out = Vec::new();
        for (c, cell) in self.cells.iter().enumerate() {
            for k in 0..3 {
                let e = self.cell_edges[c][k];
                let tag = self.boundary_tags[e];
                if tag.is_boundary() {
                    out.push(([cell[(k + 1) % 3], cell[(k + 2) % 3]], tag));
                }
            }
        }
        out
    }

    pub fn stats(&self) -> MeshStats {
        mesh_stats(self)
    }
}

/// Counts, characteristic size and smallest angle of a mesh.
pub fn mesh_stats(mesh: &Mesh) -> MeshStats {
    let min_angle = (0..mesh.n_cells())
        .map(|c| min_cell_angle(&mesh.cell_points(c)))
        .fold(f64::INFINITY, f64::min);
    MeshStats {
        vertices: mesh.n_vertices(),
        edges: mesh.n_edges(),
        cells: mesh.n_cells(),
        h_char: mesh.h_char(),
        min_angle,
    }
}

pub(crate) fn signed_area(a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
}

fn cell_diameter(vertices: &[Point2<f64>], cell: &[usize; 3]) -> f64 {
    let [a, b, c] = cell.map(|v| vertices[v]);
    (b - a).norm().max((c - b).norm()).max((a - c).norm())
}

/// Smallest interior angle of a triangle, in degrees.
pub(crate) fn min_cell_angle(p: &[Point2<f64>; 3]) -> f64 {
    (0..3)
        .map(|k| {
            let u: Vector2<f64> = p[(k + 1) % 3] - p[k];
            let v: Vector2<f64> = p[(k + 2) % 3] - p[k];
            let cos = u.dot(&v) / (u.norm() * v.norm());
            cos.clamp(-1.0, 1.0).acos().to_degrees()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Renumbers cells into a canonical form (each cell rotated so its smallest
/// vertex comes first, cells sorted). Used to compare connectivity.
pub fn canonical_cells(cells: &[[usize; 3]]) -> Vec<[usize; 3]> {
    let mut out: Vec<[usize; 3]> = cells
        .iter()
        .map(|&[a, b, c]| {
            if a < b && a < c {
                [a, b, c]
            } else if b < c {
                [b, c, a]
            } else {
                [c, a, b]
            }
        })
        .collect();
    out.sort_unstable();
    out
}

/// Boundary tags keyed by sorted vertex pair.
pub fn tag_map(mesh: &Mesh) -> HashMap<[usize; 2], BoundaryTag> {
    mesh.edges()
        .iter()
        .zip(mesh.boundary_tags())
        .filter(|(_, t)| t.is_boundary())
        .map(|(e, t)| (*e, *t))
        .collect()
}
