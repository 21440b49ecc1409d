//! Legacy ASCII VTK output on triangles, with a structural validator.

use std::fmt::Write as _;
use std::path::Path;

use o3flow::fem::{FEFunction, Family, ValueShape};
use o3flow::mesh::Mesh;

const TRIANGLE: u32 = 5;

/// Point set and triangles the fields are written on.
struct Grid {
    points: Vec<[f64; 2]>,
    cells: Vec<[usize; 3]>,
}

fn vertex_grid(mesh: &Mesh) -> Grid {
    Grid {
        points: mesh.vertices().iter().map(|p| [p.x, p.y]).collect(),
        cells: mesh.cells().to_vec(),
    }
}

/// Each triangle split in four through its edge midpoints; the points are
/// the vertices followed by one midpoint per edge, as in the P2 numbering.
fn refined_grid(mesh: &Mesh) -> Grid {
    let mut points: Vec<[f64; 2]> = mesh.vertices().iter().map(|p| [p.x, p.y]).collect();
    let nv = points.len();
    for &[a, b] in mesh.edges() {
        let (pa, pb) = (points[a], points[b]);
        points.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
    }
    let mut cells = Vec::with_capacity(4 * mesh.n_cells());
    for (c, &[a, b, v]) in mesh.cells().iter().enumerate() {
        let [e0, e1, e2] = mesh.cell_edges()[c].map(|e| nv + e);
        cells.extend([[a, e2, e1], [e2, b, e0], [e1, e0, v], [e0, e1, e2]]);
    }
    Grid { points, cells }
}

/// Component values of `f` at point `i` of the grid: vertex nodes directly,
/// midpoints from the P2 edge node or the P1 endpoint average.
fn point_value(f: &FEFunction, mesh: &Mesh, i: usize, out: &mut [f64]) {
    let nc = f.space().n_components();
    let nv = mesh.n_vertices();
    let c = f.coeffs();
    if i < nv || f.space().family() == Family::P2 {
        out.copy_from_slice(&c[i * nc..(i + 1) * nc]);
    } else {
        let [a, b] = mesh.edges()[i - nv];
        for k in 0..nc {
            out[k] = 0.5 * (c[a * nc + k] + c[b * nc + k]);
        }
    }
}

fn write_field(s: &mut String, name: &str, f: &FEFunction, mesh: &Mesh, n_points: usize) {
    let shape = f.space().shape();
    let mut v = vec![0.0; f.space().n_components()];
    match shape {
        ValueShape::Scalar => {
            let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        }
        ValueShape::Vector2 => {
            let _ = writeln!(s, "VECTORS {name} double");
        }
        _ => {
            let _ = writeln!(s, "TENSORS {name} double");
        }
    }
    for i in 0..n_points {
        point_value(f, mesh, i, &mut v);
        let _ = match shape {
            ValueShape::Scalar => writeln!(s, "{:e}", v[0]),
            ValueShape::Vector2 => writeln!(s, "{:e} {:e} 0", v[0], v[1]),
            ValueShape::SymTensor2 => writeln!(s, "{:e} {:e} 0\n{:e} {:e} 0\n0 0 0", v[0], v[1], v[1], v[2]),
            ValueShape::SymTensor2Traceless => writeln!(s, "{:e} {:e} 0\n{:e} {:e} 0\n0 0 0", v[0], v[1], v[1], -v[0]),
        };
    }
}

/// Renders `fields` (all on `mesh`) as a legacy VTK unstructured grid. P2
/// detail is kept only with `refined`.
pub fn render_vtk(title: &str, mesh: &Mesh, fields: &[(&str, &FEFunction)], refined: bool) -> String {
    let grid = if refined { refined_grid(mesh) } else { vertex_grid(mesh) };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# vtk DataFile Version 3.0\n{}\nASCII\nDATASET UNSTRUCTURED_GRID",
        title.replace('\n', " ")
    );
    let _ = writeln!(s, "POINTS {} double", grid.points.len());
    for p in &grid.points {
        let _ = writeln!(s, "{:e} {:e} 0", p[0], p[1]);
    }
    let _ = writeln!(s, "CELLS {} {}", grid.cells.len(), 4 * grid.cells.len());
    for c in &grid.cells {
        let _ = writeln!(s, "3 {} {} {}", c[0], c[1], c[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {}", grid.cells.len());
    for _ in &grid.cells {
        let _ = writeln!(s, "{TRIANGLE}");
    }
    if !fields.is_empty() {
        let _ = writeln!(s, "POINT_DATA {}", grid.points.len());
        for (name, f) in fields {
            write_field(&mut s, name, f, mesh, grid.points.len());
        }
    }
    s
}

pub fn write_vtk(
    path: &Path,
    title: &str,
    mesh: &Mesh,
    fields: &[(&str, &FEFunction)],
    refined: bool,
) -> std::io::Result<()> {
    std::fs::write(path, render_vtk(title, mesh, fields, refined))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArrayKind {
    Scalars,
    Vectors,
    Tensors,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VtkSummary {
    pub n_points: usize,
    pub n_cells: usize,
    pub arrays: Vec<(String, ArrayKind)>,
}

/// Checks section order, declared counts, cell types and value counts of a
/// legacy ASCII unstructured grid on triangles.
pub fn validate_vtk(text: &str) -> Result<VtkSummary, String> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .peekable();
    let mut next = |what: &str| {
        lines
            .next()
            .map(|(i, l)| (i + 1, l.trim()))
            .ok_or(format!("missing {what}"))
    };

    let (_, l) = next("header")?;
    if !l.starts_with("# vtk DataFile Version") {
        return Err(format!("bad header {l:?}"));
    }
    next("title")?;
    if next("format")?.1 != "ASCII" {
        return Err("only ASCII files are supported".into());
    }
    if next("dataset")?.1 != "DATASET UNSTRUCTURED_GRID" {
        return Err("expected DATASET UNSTRUCTURED_GRID".into());
    }
    let keyword = |line: (usize, &str), key: &str, n_args: usize| -> Result<Vec<String>, String> {
        let toks: Vec<String> = line.1.split_whitespace().map(String::from).collect();
        if toks.first().map(String::as_str) != Some(key) || toks.len() != n_args + 1 {
            return Err(format!(
                "line {}: expected {key} with {n_args} arguments, got {:?}",
                line.0, line.1
            ));
        }
        Ok(toks[1..].to_vec())
    };
    let count = |s: &str| s.parse::<usize>().map_err(|_| format!("bad count {s:?}"));
    let numbers = |line: (usize, &str), n: usize| -> Result<Vec<f64>, String> {
        let v: Vec<f64> = line
            .1
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| format!("line {}: bad number {t:?}", line.0))
            })
            .collect::<Result<_, _>>()?;
        if v.len() != n {
            return Err(format!("line {}: expected {n} values, got {}", line.0, v.len()));
        }
        Ok(v)
    };

    let args = keyword(next("POINTS")?, "POINTS", 2)?;
    let n_points = count(&args[0])?;
    for _ in 0..n_points {
        numbers(next("point")?, 3)?;
    }
    let args = keyword(next("CELLS")?, "CELLS", 2)?;
    let n_cells = count(&args[0])?;
    if count(&args[1])? != 4 * n_cells {
        return Err("CELLS size must be 4 per triangle".into());
    }
    for _ in 0..n_cells {
        let c = numbers(next("cell")?, 4)?;
        if c[0] != 3.0
            || c[1..]
                .iter()
                .any(|&i| i < 0.0 || i as usize >= n_points || i.fract() != 0.0)
        {
            return Err(format!("bad triangle {c:?}"));
        }
    }
    let args = keyword(next("CELL_TYPES")?, "CELL_TYPES", 1)?;
    if count(&args[0])? != n_cells {
        return Err("CELL_TYPES count differs from CELLS".into());
    }
    for _ in 0..n_cells {
        if numbers(next("cell type")?, 1)?[0] != TRIANGLE as f64 {
            return Err("only triangle cells (type 5) are expected".into());
        }
    }

    let mut arrays = Vec::new();
    if let Ok(line) = next("POINT_DATA") {
        let args = keyword(line, "POINT_DATA", 1)?;
        if count(&args[0])? != n_points {
            return Err("POINT_DATA count differs from POINTS".into());
        }
        while let Ok(line) = next("array") {
            let head: Vec<&str> = line.1.split_whitespace().collect();
            let (kind, rows, width) = match head.first().copied() {
                Some("SCALARS") if head.len() >= 3 => {
                    let lut = next("LOOKUP_TABLE")?;
                    if !lut.1.starts_with("LOOKUP_TABLE") {
                        return Err(format!("line {}: expected LOOKUP_TABLE", lut.0));
                    }
                    (ArrayKind::Scalars, 1, 1)
                }
                Some("VECTORS") if head.len() == 3 => (ArrayKind::Vectors, 1, 3),
                Some("TENSORS") if head.len() == 3 => (ArrayKind::Tensors, 3, 3),
                _ => return Err(format!("line {}: unexpected {:?}", line.0, line.1)),
            };
            for _ in 0..n_points * rows {
                numbers(next("array value")?, width)?;
            }
            arrays.push((head[1].to_string(), kind));
        }
    }
    Ok(VtkSummary {
        n_points,
        n_cells,
        arrays,
    })
}
