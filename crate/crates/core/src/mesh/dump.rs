//! Plain-text mesh dump: one vertex per line, one cell per line, then the
//! tagged boundary edges. Coordinates use shortest round-trip formatting so a
//! dump reloads bit-identically.
//!
//! ```text
//! vertices 4
//! 0 0
//! ...
//! cells 2
//! 0 1 3
//! ...
//! boundary 4
//! 0 1 square_walls_floor
//! ...
//! ```

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Point2;

use super::{BoundaryTag, Mesh};
use crate::error::{Error, Result};

pub fn write_dump(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, dump_string(mesh)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_dump(path: impl AsRef<Path>) -> Result<Mesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_dump(&text).map_err(|(line, message)| Error::MshParse {
        path: path.to_path_buf(),
        line,
        message,
    })?
}

pub(crate) fn dump_string(mesh: &Mesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "vertices {}", mesh.n_vertices());
    for p in mesh.vertices() {
        let _ = writeln!(s, "{:?} {:?}", p.x, p.y);
    }
    let _ = writeln!(s, "cells {}", mesh.n_cells());
    for [a, b, c] in mesh.cells() {
        let _ = writeln!(s, "{a} {b} {c}");
    }
    let tagged: Vec<_> = mesh
        .edges()
        .iter()
        .zip(mesh.boundary_tags())
        .filter(|(_, t)| t.is_boundary())
        .collect();
    let _ = writeln!(s, "boundary {}", tagged.len());
    for ([a, b], t) in tagged {
        let _ = writeln!(s, "{a} {b} {t}");
    }
    s
}

type ParseResult<T> = std::result::Result<T, (usize, String)>;

fn parse_dump(text: &str) -> ParseResult<Result<Mesh>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or((0, format!("unexpected end of file reading {what}")))
    };

    let count = |(line, text): (usize, &str), key: &str| -> ParseResult<usize> {
        text.strip_prefix(key)
            .and_then(|r| r.trim().parse().ok())
            .ok_or((line, format!("expected '{key} <count>'")))
    };
    fn fields<T: std::str::FromStr>(line: usize, text: &str, n: usize) -> ParseResult<Vec<T>> {
        let out: Vec<T> = text
            .split_whitespace()
            .take(n)
            .map(|s| s.parse().map_err(|_| (line, format!("cannot parse {s:?}"))))
            .collect::<ParseResult<_>>()?;
        if out.len() != n {
            return Err((line, format!("expected {n} fields")));
        }
        Ok(out)
    }

    let nv = count(next("header")?, "vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, text) = next("vertices")?;
        let xy: Vec<f64> = fields(line, text, 2)?;
        vertices.push(Point2::new(xy[0], xy[1]));
    }
    let nc = count(next("header")?, "cells")?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (line, text) = next("cells")?;
        let c: Vec<usize> = fields(line, text, 3)?;
        cells.push([c[0], c[1], c[2]]);
    }
    let nb = count(next("header")?, "boundary")?;
    let mut tagged = Vec::with_capacity(nb);
    for _ in 0..nb {
        let (line, text) = next("boundary")?;
        let ab: Vec<usize> = fields(line, text, 2)?;
        let name = text.split_whitespace().nth(2).unwrap_or("");
        let tag = BoundaryTag::from_name(name).ok_or((line, format!("unknown tag {name:?}")))?;
        tagged.push(([ab[0], ab[1]], tag));
    }
    Ok(Mesh::from_tagged_edges(vertices, cells, &tagged))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{eccentric_annulus_mesh, tag_map, unit_square_mesh};

    #[test]
    fn round_trip_is_exact() {
        for mesh in [
            unit_square_mesh(7).unwrap(),
            eccentric_annulus_mesh(1.0, 0.5, 0.25, 0.2).unwrap(),
        ] {
            let back = parse_dump(&dump_string(&mesh)).unwrap().unwrap();
            assert_eq!(back.vertices(), mesh.vertices());
            assert_eq!(back.cells(), mesh.cells());
            assert_eq!(tag_map(&back), tag_map(&mesh));
        }
    }

    #[test]
    fn bad_field_reports_line() {
        let err = parse_dump("vertices 1\n0 zero\n").unwrap_err();
        assert_eq!(err.0, 2);
    }
}
