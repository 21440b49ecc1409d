use std::path::PathBuf;

use o3flow::mesh::{
    canonical_cells, eccentric_annulus_mesh, read_dump, read_msh, tag_map, unit_square_mesh, write_dump, write_msh,
    BoundaryTag, MshOptions,
};
use o3flow::Error;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[test]
fn handwritten_square_matches_generator() {
    let read = read_msh(fixture("unit_square_2tri.msh"), &MshOptions::default()).unwrap();
    let gen = unit_square_mesh(1).unwrap();
    assert_eq!(read.vertices(), gen.vertices());
    assert_eq!(canonical_cells(read.cells()), canonical_cells(gen.cells()));
    assert_eq!(tag_map(&read), tag_map(&gen));
}

#[test]
fn external_annulus_satisfies_euler() {
    let mesh = read_msh(fixture("annulus_scipy.msh"), &MshOptions::default()).unwrap();
    let (v, e, t) = (mesh.n_vertices() as i64, mesh.n_edges() as i64, mesh.n_cells() as i64);
    assert_eq!(v - e + t, 0);
    assert!(mesh.has_tag(BoundaryTag::AnnulusInner) && mesh.has_tag(BoundaryTag::AnnulusOuter));
    for e in 0..mesh.n_edges() {
        let n = mesh.cells_sharing_edge(e);
        assert_eq!(n == 1, mesh.boundary_tags()[e].is_boundary());
    }
}

#[test]
fn explicit_physical_mapping_overrides_names() {
    let mut options = MshOptions::default();
    options.physical_tags.insert(1, BoundaryTag::SquareWallsFloor);
    let mesh = read_msh(fixture("unit_square_2tri.msh"), &options).unwrap();
    assert!(!mesh.has_tag(BoundaryTag::SquareTop));
}

#[test]
fn msh_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (name, mesh) in [
        ("sq.msh", unit_square_mesh(6).unwrap()),
        ("an.msh", eccentric_annulus_mesh(1.0, 0.5, 0.25, 0.1).unwrap()),
    ] {
        let path = dir.path().join(name);
        write_msh(&mesh, &path).unwrap();
        let back = read_msh(&path, &MshOptions::default()).unwrap();
        assert_eq!(back.vertices(), mesh.vertices());
        assert_eq!(back.cells(), mesh.cells());
        assert_eq!(tag_map(&back), tag_map(&mesh));
    }
}

#[test]
fn dump_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = eccentric_annulus_mesh(1.0, 0.5, 0.25, 0.1).unwrap();
    let path = dir.path().join("mesh.txt");
    write_dump(&mesh, &path).unwrap();
    let back = read_dump(&path).unwrap();
    assert_eq!(back.vertices(), mesh.vertices());
    assert_eq!(back.cells(), mesh.cells());
}

#[test]
fn missing_file_is_io_error() {
    let err = read_msh(fixture("nope.msh"), &MshOptions::default()).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
}
