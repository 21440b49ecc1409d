use std::path::Path;
use std::process::{Command, Output};

use o3flow_cli::table::{read_slope, read_study, read_sweep};
use o3flow_cli::vtk::validate_vtk;

fn o3flow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_o3flow")).args(args).output().unwrap()
}

fn summary_value(dir: &Path, key: &str) -> String {
    let text = std::fs::read_to_string(dir.join("summary.txt")).unwrap();
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")).map(String::from))
        .unwrap_or_else(|| panic!("{key} missing from summary"))
}

#[test]
fn solve_converges_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = o3flow(&[
        "solve",
        "--problem",
        "ldc",
        "--method",
        "srtd",
        "--lambda1",
        "0.01",
        "--n",
        "40",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(summary_value(&out, "Wi"), "0.01");
    assert_eq!(summary_value(&out, "converged"), "true");
    for f in ["u", "p", "pi", "T"] {
        let text = std::fs::read_to_string(out.join(format!("{f}.vtk"))).unwrap();
        let s = validate_vtk(&text).unwrap();
        assert_eq!(s.n_points, 41 * 41);
    }
    let hist = std::fs::read_to_string(out.join("residuals.csv")).unwrap();
    assert!(hist.starts_with("residual,increment,iteration"));
}

#[test]
fn solve_reports_non_convergence_with_status_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = o3flow(&[
        "solve",
        "--problem",
        "ldc",
        "--lambda1",
        "0.2",
        "--n",
        "20",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(summary_value(dir.path(), "converged"), "false");
}

#[test]
fn configuration_errors_exit_with_status_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = o3flow(&[
        "solve",
        "--lambda1",
        "0.1",
        "--mu1",
        "0.1",
        "--model",
        "ucm",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("only one of"));
    assert_eq!(
        o3flow(&["solve", "--problem", "pipe", "--out", out]).status.code(),
        Some(1)
    );
    assert_eq!(o3flow(&["solve", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(
        o3flow(&["solve", "--config", "/nonexistent/run.cfg"]).status.code(),
        Some(1)
    );
    assert_eq!(o3flow(&["--help"]).status.code(), Some(0));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("out");
    std::fs::write(
        &cfg,
        format!(
            "problem = jb\nmethod = evss\nlambda1 = 0.05\nmodel = ucm\nh = 0.2\nout = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let o = o3flow(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--lambda1",
        "0.25",
        "--model",
        "corotational",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(summary_value(&out, "problem"), "jb");
    assert_eq!(summary_value(&out, "lambda1"), "0.25");
    assert_eq!(summary_value(&out, "mu1"), "0");
    assert_eq!(summary_value(&out, "Wi"), "0.5");
    assert!(out.join("Sigma.vtk").exists() && out.join("D.vtk").exists());
}

#[test]
fn study_writes_one_row_per_refinement() {
    let dir = tempfile::tempdir().unwrap();
    let o = o3flow(&[
        "study",
        "--problem",
        "mms",
        "--method",
        "nse",
        "--meshes",
        "4,8,16",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_study(std::fs::File::open(dir.path().join("study.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].l2_rate_u, None);
    assert!(rows[1].l2_rate_u.unwrap() > 2.5);
}

#[test]
fn sweep_lists_every_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = o3flow(&[
        "sweep",
        "--problem",
        "ldc",
        "--method",
        "srtd",
        "--n",
        "8",
        "--grid",
        "0.01,0.02,0.5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let points = read_sweep(std::fs::File::open(dir.path().join("sweep.csv")).unwrap()).unwrap();
    assert_eq!(points.len(), 3);
    assert!(points[0].converged && points[1].converged && !points[2].converged);
    assert!(String::from_utf8_lossy(&o.stdout).contains("limit Wi = 0.02"));
}

#[test]
fn compare_newtonian_writes_a_slope() {
    let dir = tempfile::tempdir().unwrap();
    let o = o3flow(&[
        "compare-newtonian",
        "--problem",
        "jb",
        "--h",
        "0.2",
        "--lambdas",
        "0.001,0.002,0.004",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let slope = read_slope(std::fs::File::open(dir.path().join("newtonian_slope.csv")).unwrap()).unwrap();
    assert!((slope.unwrap() - 1.0).abs() < 0.1);
}

#[test]
fn timing_records_every_repeat() {
    let dir = tempfile::tempdir().unwrap();
    let o = o3flow(&[
        "time",
        "--problem",
        "ldc",
        "--lambda1",
        "0.01",
        "--meshes",
        "4,8",
        "--repeats",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("timing.csv")).unwrap();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let h = r.headers().unwrap().clone();
    let col = |n: &str| h.iter().position(|c| c == n).unwrap();
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    for row in &rows {
        assert_eq!(&row[col("repeats")], "3");
        assert!(row[col("srtd_std_full")].parse::<f64>().unwrap() > 0.0);
    }
}
