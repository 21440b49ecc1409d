use std::sync::Arc;

use o3flow::benchmarks::{NewtonianComparison, NewtonianPoint, StudyRow, SweepPoint};
use o3flow::fem::{build_space, FEFunction, Family, ValueShape};
use o3flow::mesh::unit_square_mesh;
use o3flow_cli::config::{parse_config_text, RunConfig};
use o3flow_cli::table::{
    read_newtonian, read_slope, read_study, read_sweep, sig4, write_newtonian, write_slope, write_study, write_sweep,
};
use o3flow_cli::vtk::{render_vtk, validate_vtk, ArrayKind};
use proptest::prelude::*;

#[test]
fn four_significant_digits() {
    assert_eq!(sig4(3.00613), "3.006");
    assert_eq!(sig4(2.0), "2.000");
    assert_eq!(sig4(8.8158e-4), "8.816e-4");
    assert_eq!(sig4(0.0125), "0.01250");
    assert_eq!(sig4(9.99996), "10.00");
    assert_eq!(sig4(-1.4164e-5), "-1.416e-5");
    assert_eq!(sig4(123456.0), "1.235e5");
    assert_eq!(sig4(0.0), "0");
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6f64..1e6, 1e-12f64..1e-3, Just(0.0)]
}

prop_compose! {
    fn study_row()(h in 1e-4f64..1.0, e in prop::array::uniform3(finite()), r in prop::array::uniform3(prop::option::of(finite())), c in any::<bool>()) -> StudyRow {
        StudyRow { h, l2_err_u: e[0], l2_rate_u: r[0], h1_err_u: e[1], h1_rate_u: r[1], l2_err_p: e[2], l2_rate_p: r[2], converged: c }
    }
}

proptest! {
    #[test]
    fn study_table_round_trips(rows in prop::collection::vec(study_row(), 0..6)) {
        let mut buf = Vec::new();
        write_study(&mut buf, &rows).unwrap();
        prop_assert_eq!(read_study(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn sweep_table_round_trips(wi in prop::collection::vec((1e-3f64..3.0, any::<bool>(), 0usize..30, finite()), 0..8)) {
        let points: Vec<SweepPoint> = wi
            .iter()
            .map(|&(w, c, it, res)| SweepPoint {
                wi: w,
                lambda1: w / 2.0,
                converged: c,
                iterations: it,
                final_residual: res,
                seconds: 0.25,
                note: (!c).then(|| "stage-1 Newton stopped, \"Diverged\"".to_string()),
            })
            .collect();
        let mut buf = Vec::new();
        write_sweep(&mut buf, &points).unwrap();
        prop_assert_eq!(read_sweep(buf.as_slice()).unwrap(), points);
    }
}

#[test]
fn study_header_names_the_row_fields() {
    let mut buf = Vec::new();
    write_study(&mut buf, &[]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("h,l2_err_u,l2_rate_u,h1_err_u,h1_rate_u,l2_err_p,l2_rate_p,converged,h_full,"));
}

#[test]
fn newtonian_tables_round_trip() {
    let points = vec![
        NewtonianPoint {
            lambda1: 1e-3,
            h1_difference: 1.6425e-4,
            converged: true,
            note: None,
        },
        NewtonianPoint {
            lambda1: 0.3,
            h1_difference: f64::NAN,
            converged: false,
            note: Some("Newton stopped with Diverged".into()),
        },
    ];
    let mut buf = Vec::new();
    write_newtonian(&mut buf, &points).unwrap();
    let back = read_newtonian(buf.as_slice()).unwrap();
    assert_eq!(back[0], points[0]);
    assert!(back[1].h1_difference.is_nan() && back[1].note == points[1].note);

    let c = NewtonianComparison {
        points,
        slope: Some(0.9932936262286197),
    };
    let mut buf = Vec::new();
    write_slope(&mut buf, &c).unwrap();
    assert_eq!(read_slope(buf.as_slice()).unwrap(), c.slope);
    assert!(String::from_utf8(buf).unwrap().contains("0.9933,1,"));
}

#[test]
fn vtk_output_passes_the_validator() {
    let mesh = Arc::new(unit_square_mesh(3).unwrap());
    let u = FEFunction::interpolate(&build_space(&mesh, Family::P2, ValueShape::Vector2), |p, out| {
        out[0] = p.x * p.y;
        out[1] = -p.y;
    });
    let p = FEFunction::interpolate(&build_space(&mesh, Family::P1, ValueShape::Scalar), |q, out| {
        out[0] = q.x
    });
    let t = FEFunction::zeros(&build_space(&mesh, Family::P2, ValueShape::SymTensor2));
    let d = FEFunction::zeros(&build_space(&mesh, Family::P1, ValueShape::SymTensor2Traceless));
    let fields = [("u", &u), ("p", &p), ("T", &t), ("D", &d)];

    let coarse = validate_vtk(&render_vtk("t", &mesh, &fields, false)).unwrap();
    assert_eq!((coarse.n_points, coarse.n_cells), (16, 18));
    let kinds: Vec<ArrayKind> = coarse.arrays.iter().map(|a| a.1.clone()).collect();
    assert_eq!(
        kinds,
        [
            ArrayKind::Vectors,
            ArrayKind::Scalars,
            ArrayKind::Tensors,
            ArrayKind::Tensors
        ]
    );

    let fine_text = render_vtk("t", &mesh, &fields, true);
    let fine = validate_vtk(&fine_text).unwrap();
    assert_eq!(fine.n_points, mesh.n_vertices() + mesh.n_edges());
    assert_eq!(fine.n_cells, 4 * mesh.n_cells());
    // P1 pressure p = x at a refined midpoint is still exact.
    let lines: Vec<&str> = fine_text.lines().collect();
    let start = lines.iter().position(|l| l.starts_with("SCALARS p")).unwrap() + 2;
    let pts = lines.iter().position(|l| l.starts_with("POINTS")).unwrap() + 1;
    for i in 0..fine.n_points {
        let x: f64 = lines[pts + i].split_whitespace().next().unwrap().parse().unwrap();
        let v: f64 = lines[start + i].trim().parse().unwrap();
        assert!((x - v).abs() < 1e-14);
    }
}

#[test]
fn vtk_validator_rejects_malformed_files() {
    let mesh = Arc::new(unit_square_mesh(2).unwrap());
    let p = FEFunction::zeros(&build_space(&mesh, Family::P1, ValueShape::Scalar));
    let good = render_vtk("t", &mesh, &[("p", &p)], false);
    assert!(validate_vtk(&good).is_ok());
    let bad = [
        good.replace("ASCII", "BINARY"),
        good.replace("POINTS 9", "POINTS 10"),
        good.replace("CELL_TYPES 8", "CELL_TYPES 7"),
        good.replace("POINT_DATA 9", "POINT_DATA 8"),
        good.replacen("\n5\n", "\n9\n", 1),
        good.replace("LOOKUP_TABLE default\n", ""),
        good.lines()
            .take(good.lines().count() - 1)
            .collect::<Vec<_>>()
            .join("\n"),
    ];
    for (i, text) in bad.iter().enumerate() {
        assert!(validate_vtk(text).is_err(), "case {i} accepted");
    }
}

#[test]
fn config_rules() {
    let map = parse_config_text("# cavity\nproblem = ldc\nlambda1 = 0.05\nmodel = corotational\nn = 20\n").unwrap();
    let cfg = RunConfig::from_map(&map).unwrap();
    assert_eq!(cfg.params().unwrap().mu1, 0.0);
    assert!(parse_config_text("bogus = 1").is_err());
    assert!(parse_config_text("no equals sign").is_err());
    let both = parse_config_text("lambda1 = 0.1\nmu1 = 0.1\nmodel = ucm").unwrap();
    assert!(RunConfig::from_map(&both).is_err());
    let bad_mu = parse_config_text("lambda1 = 0.1\nmu1 = 0.2").unwrap();
    assert!(RunConfig::from_map(&bad_mu).is_err());
    let two_meshes = parse_config_text("n = 10\nh = 0.1").unwrap();
    assert!(RunConfig::from_map(&two_meshes).is_err());
}
