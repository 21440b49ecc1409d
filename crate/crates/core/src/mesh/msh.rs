//! Gmsh MSH ASCII 2.2 reading and writing.
//!
//! Only 2-node lines (type 1), 3-node triangles (type 2) and points
//! (type 15, ignored) are understood. Line elements carry boundary tags via
//! their physical group, mapped either explicitly through [`MshOptions`] or
//! by the group name in `$PhysicalNames` (e.g. `"annulus_inner"`).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::Point2;

use super::{signed_area, BoundaryTag, Mesh};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct MshOptions {
    /// Physical group id to boundary tag. Takes precedence over names.
    pub physical_tags: HashMap<i64, BoundaryTag>,
}

pub fn read_msh(path: impl AsRef<Path>, options: &MshOptions) -> Result<Mesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Parser::new(path.to_path_buf(), &text).parse(options)
}

pub fn read_msh_str(text: &str, options: &MshOptions) -> Result<Mesh> {
    Parser::new(PathBuf::from("<string>"), text).parse(options)
}

struct Parser<'a> {
    path: PathBuf,
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

struct RawElement {
    line: usize,
    kind: u32,
    physical: i64,
    nodes: Vec<i64>,
}

impl<'a> Parser<'a> {
    fn new(path: PathBuf, text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        Parser { path, lines, pos: 0 }
    }

    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::MshParse {
            path: self.path.clone(),
            line,
            message: message.into(),
        }
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(1, |l| l.0)
    }

    fn next(&mut self) -> Result<(usize, &'a str)> {
        let item = self
            .lines
            .get(self.pos)
            .copied()
            .ok_or_else(|| self.err(self.last_line(), "unexpected end of file"))?;
        self.pos += 1;
        Ok(item)
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        let (line, text) = self.next()?;
        if text != token {
            return Err(self.err(line, format!("expected {token}, found {text:?}")));
        }
        Ok(())
    }

    fn count(&mut self) -> Result<usize> {
        let (line, text) = self.next()?;
        text.parse()
            .map_err(|_| self.err(line, format!("expected an entry count, found {text:?}")))
    }

    fn parse(mut self, options: &MshOptions) -> Result<Mesh> {
        let mut version_seen = false;
        let mut names: HashMap<i64, String> = HashMap::new();
        let mut nodes: Option<(HashMap<i64, usize>, Vec<Point2<f64>>)> = None;
        let mut elements: Option<Vec<RawElement>> = None;

        while self.pos < self.lines.len() {
            let (line, header) = self.next()?;
            match header {
                "$MeshFormat" => {
                    self.read_format()?;
                    version_seen = true;
                }
                _ if !version_seen => {
                    return Err(self.err(line, format!("expected $MeshFormat, found {header:?}")));
                }
                "$PhysicalNames" => names = self.read_names()?,
                "$Nodes" => nodes = Some(self.read_nodes()?),
                "$Elements" => elements = Some(self.read_elements()?),
                s if s.starts_with('$') && !s.starts_with("$End") => self.skip_section(line, s)?,
                other => return Err(self.err(line, format!("unexpected content {other:?}"))),
            }
        }
        let end = self.last_line();
        let (ids, coords) = nodes.ok_or_else(|| self.err(end, "missing $Nodes section"))?;
        let elements = elements.ok_or_else(|| self.err(end, "missing $Elements section"))?;
        self.build(options, &names, &ids, &coords, &elements)
    }

    fn read_format(&mut self) -> Result<()> {
        let (line, text) = self.next()?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        let version = fields.first().copied().unwrap_or("");
        if version != "2.2" {
            return Err(Error::MshVersion {
                path: self.path.clone(),
                line,
                version: version.to_string(),
            });
        }
        if fields.get(1) != Some(&"0") {
            return Err(self.err(line, "binary MSH files are not supported"));
        }
        self.expect("$EndMeshFormat")
    }

    fn read_names(&mut self) -> Result<HashMap<i64, String>> {
        let n = self.count()?;
        let mut names = HashMap::new();
        for _ in 0..n {
            let (line, text) = self.next()?;
            let mut parts = text.splitn(3, char::is_whitespace);
            let _dim = parts.next();
            let id: i64 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| self.err(line, "malformed physical name entry"))?;
            let name = parts
                .next()
                .map(|s| s.trim().trim_matches('"').to_string())
                .ok_or_else(|| self.err(line, "physical name missing"))?;
            names.insert(id, name);
        }
        self.expect("$EndPhysicalNames")?;
        Ok(names)
    }

    fn read_nodes(&mut self) -> Result<(HashMap<i64, usize>, Vec<Point2<f64>>)> {
        let n = self.count()?;
        let mut ids = HashMap::with_capacity(n);
        let mut coords = Vec::with_capacity(n);
        for _ in 0..n {
            let (line, text) = self.next()?;
            let f: Vec<&str> = text.split_whitespace().collect();
            if f.len() != 4 {
                return Err(self.err(line, format!("node record needs 4 fields, found {}", f.len())));
            }
            let id: i64 = f[0].parse().map_err(|_| self.err(line, "bad node id"))?;
            let xyz: Vec<f64> = f[1..]
                .iter()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| self.err(line, "bad node coordinate"))?;
            if xyz[2] != 0.0 {
                return Err(self.err(line, format!("node {id} has nonzero z = {}", xyz[2])));
            }
            if ids.insert(id, coords.len()).is_some() {
                return Err(self.err(line, format!("duplicate node id {id}")));
            }
            coords.push(Point2::new(xyz[0], xyz[1]));
        }
        self.expect("$EndNodes")?;
        Ok((ids, coords))
    }

    fn read_elements(&mut self) -> Result<Vec<RawElement>> {
        let n = self.count()?;
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let (line, text) = self.next()?;
            let f: Vec<i64> = text
                .split_whitespace()
                .map(|s| s.parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| self.err(line, "malformed element record"))?;
            if f.len() < 3 {
                return Err(self.err(line, "element record too short"));
            }
            let kind = f[1] as u32;
            let ntags = f[2] as usize;
            let expected_nodes = match kind {
                1 => 2,
                2 => 3,
                15 => 1,
                other => return Err(self.err(line, format!("unsupported element type {other}"))),
            };
            if f.len() != 3 + ntags + expected_nodes {
                return Err(self.err(line, "element record has the wrong number of fields"));
            }
            let physical = if ntags > 0 { f[3] } else { 0 };
            out.push(RawElement {
                line,
                kind,
                physical,
                nodes: f[3 + ntags..].to_vec(),
            });
        }
        self.expect("$EndElements")?;
        Ok(out)
    }

    fn skip_section(&mut self, line: usize, header: &str) -> Result<()> {
        let end = format!("$End{}", &header[1..]);
        loop {
            let (_, text) = self
                .next()
                .map_err(|_| self.err(line, format!("section {header} is never closed")))?;
            if text == end {
                return Ok(());
            }
        }
    }

    fn build(
        &self,
        options: &MshOptions,
        names: &HashMap<i64, String>,
        ids: &HashMap<i64, usize>,
        coords: &[Point2<f64>],
        elements: &[RawElement],
    ) -> Result<Mesh> {
        let resolve = |e: &RawElement| -> Result<Vec<usize>> {
            e.nodes
                .iter()
                .map(|id| {
                    ids.get(id)
                        .copied()
                        .ok_or_else(|| self.err(e.line, format!("element references missing node {id}")))
                })
                .collect()
        };

        // compact to the nodes used by triangles, keeping file order
        let mut raw_cells = Vec::new();
        let mut used = vec![false; coords.len()];
        for e in elements.iter().filter(|e| e.kind == 2) {
            let nodes = resolve(e)?;
            for &raw in &nodes {
                used[raw] = true;
            }
            raw_cells.push((e.line, [nodes[0], nodes[1], nodes[2]]));
        }
        let mut remap = vec![usize::MAX; coords.len()];
        let mut vertices = Vec::new();
        for raw in (0..coords.len()).filter(|&r| used[r]) {
            remap[raw] = vertices.len();
            vertices.push(coords[raw]);
        }
        let mut cells = Vec::new();
        for (line, raw) in raw_cells {
            let mut tri = raw.map(|r| remap[r]);
            let area = signed_area(&vertices[tri[0]], &vertices[tri[1]], &vertices[tri[2]]);
            if area == 0.0 {
                return Err(self.err(line, "degenerate triangle"));
            }
            if area < 0.0 {
                tri.swap(1, 2);
            }
            cells.push(tri);
        }
        if cells.is_empty() {
            return Err(self.err(self.last_line(), "no triangle elements"));
        }

        let mut tagged = Vec::new();
        for e in elements.iter().filter(|e| e.kind == 1) {
            let tag = options
                .physical_tags
                .get(&e.physical)
                .copied()
                .or_else(|| names.get(&e.physical).and_then(|n| BoundaryTag::from_name(n)))
                .filter(|t| t.is_boundary())
                .ok_or_else(|| {
                    self.err(
                        e.line,
                        format!("line element has physical group {} with no boundary tag", e.physical),
                    )
                })?;
            let nodes = resolve(e)?;
            let [a, b] = [nodes[0], nodes[1]].map(|raw| remap[raw]);
            if a == usize::MAX || b == usize::MAX {
                return Err(self.err(e.line, "line element references a node outside every triangle"));
            }
            tagged.push(([a, b], tag));
        }
        Mesh::from_tagged_edges(vertices, cells, &tagged)
    }
}

const DOMAIN_PHYSICAL: i64 = 100;

fn physical_id(tag: BoundaryTag) -> i64 {
    match tag {
        BoundaryTag::Interior => 0,
        BoundaryTag::SquareTop => 1,
        BoundaryTag::SquareWallsFloor => 2,
        BoundaryTag::AnnulusInner => 3,
        BoundaryTag::AnnulusOuter => 4,
    }
}

/// Writes `mesh` as MSH ASCII 2.2 with one physical line group per boundary
/// tag (named after the tag) and one physical surface `"domain"`.
pub fn write_msh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, msh_string(mesh)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn msh_string(mesh: &Mesh) -> String {
    let boundary = mesh.oriented_boundary_edges();
    let mut tags: Vec<BoundaryTag> = boundary.iter().map(|(_, t)| *t).collect();
    tags.sort();
    tags.dedup();

    let mut s = String::new();
    s.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n");
    let _ = writeln!(s, "$PhysicalNames\n{}", tags.len() + 1);
    for t in &tags {
        let _ = writeln!(s, "1 {} \"{}\"", physical_id(*t), t.name());
    }
    let _ = writeln!(s, "2 {DOMAIN_PHYSICAL} \"domain\"\n$EndPhysicalNames");
    let _ = writeln!(s, "$Nodes\n{}", mesh.n_vertices());
    for (i, p) in mesh.vertices().iter().enumerate() {
        let _ = writeln!(s, "{} {:?} {:?} 0", i + 1, p.x, p.y);
    }
    s.push_str("$EndNodes\n");
    let _ = writeln!(s, "$Elements\n{}", boundary.len() + mesh.n_cells());
    let mut id = 1;
    for ([a, b], t) in &boundary {
        let p = physical_id(*t);
        let _ = writeln!(s, "{id} 1 2 {p} {p} {} {}", a + 1, b + 1);
        id += 1;
    }
    for [a, b, c] in mesh.cells() {
        let _ = writeln!(s, "{id} 2 2 {DOMAIN_PHYSICAL} 1 {} {} {}", a + 1, b + 1, c + 1);
        id += 1;
    }
    s.push_str("$EndElements\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";

    #[test]
    fn rejects_v4() {
        let err = read_msh_str("$MeshFormat\n4.1 0 8\n$EndMeshFormat\n", &MshOptions::default());
        assert!(matches!(err, Err(Error::MshVersion { line: 2, ref version, .. }) if version == "4.1"));
    }

    #[test]
    fn nonzero_z_reports_line() {
        let text = format!("{HEADER}$Nodes\n1\n1 0 0 0.5\n$EndNodes\n");
        match read_msh_str(&text, &MshOptions::default()) {
            Err(Error::MshParse { line, message, .. }) => {
                assert_eq!(line, 6);
                assert!(message.contains("nonzero z"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dangling_node_reports_line() {
        let text = format!(
            "{HEADER}$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 0\n$EndNodes\n$Elements\n1\n1 2 2 0 1 1 2 9\n$EndElements\n"
        );
        match read_msh_str(&text, &MshOptions::default()) {
            Err(Error::MshParse { line, message, .. }) => {
                assert_eq!(line, 12);
                assert!(message.contains("missing node 9"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_section_reports_line() {
        let text = format!("{HEADER}$Nodes\n2\n1 0 0 0\n$EndNodes\n");
        match read_msh_str(&text, &MshOptions::default()) {
            Err(Error::MshParse { line, .. }) => assert_eq!(line, 7),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_sections_are_skipped() {
        let text = format!(
            "{HEADER}$Comments\nanything\n$EndComments\n$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 0\n$EndNodes\n\
             $Elements\n4\n1 1 2 7 1 1 2\n2 1 2 7 1 2 3\n3 1 2 7 1 3 1\n4 2 2 1 1 1 2 3\n$EndElements\n"
        );
        let mut options = MshOptions::default();
        options.physical_tags.insert(7, BoundaryTag::SquareWallsFloor);
        let mesh = read_msh_str(&text, &options).unwrap();
        assert_eq!(mesh.n_cells(), 1);
    }
}
