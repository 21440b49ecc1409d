use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use o3flow::benchmarks::{
    convergence_study, newtonian_comparison, timing_comparison, weissenberg_sweep, Method, MethodOptions, ProblemSpec,
};
use o3flow::fem::FEFunction;
use o3flow::mesh::{read_msh, Mesh, MshOptions};
use o3flow::solvers::{evss_solve, evss_space, navier_stokes_solve_with, srtd_solve, taylor_hood_space};

use crate::config::{MeshSource, RunConfig};
use crate::table::{self, sig4};
use crate::vtk::write_vtk;

pub type CmdResult = Result<Outcome, Box<dyn std::error::Error>>;

/// How a command finished, short of an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Converged,
    NotConverged,
}

impl Outcome {
    fn from_flag(converged: bool) -> Self {
        if converged {
            Outcome::Converged
        } else {
            Outcome::NotConverged
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Converged => 0,
            Outcome::NotConverged => 2,
        }
    }
}

pub fn method_options(cfg: &RunConfig) -> MethodOptions {
    let mut o = MethodOptions::default();
    if let Some(tol) = cfg.tol {
        o.srtd.tol = tol;
        o.evss.newton.rtol = tol;
        o.nse.rtol = tol;
    }
    if let Some(m) = cfg.max_iter {
        o.srtd.max_iter = m;
        o.evss.newton.max_iter = m;
        o.nse.max_iter = m;
    }
    if let Some(s) = cfg.supg {
        o.srtd.supg = s;
        o.evss.supg = s;
    }
    o.srtd.newton = o.nse;
    o
}

fn load_mesh(cfg: &RunConfig, problem: &ProblemSpec) -> Result<Arc<Mesh>, Box<dyn std::error::Error>> {
    Ok(match &cfg.mesh {
        MeshSource::Generated(res) => problem.mesh(*res)?,
        MeshSource::File(path) => {
            let opts = MshOptions {
                physical_tags: cfg.physical_tags.clone(),
            };
            Arc::new(read_msh(path, &opts)?)
        }
    })
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Box<dyn std::error::Error>> {
    let path = dir.join(name);
    Ok(BufWriter::new(
        File::create(&path).map_err(|e| format!("{}: {e}", path.display()))?,
    ))
}

fn prepare_out(cfg: &RunConfig) -> Result<(), Box<dyn std::error::Error>> {
    std::fs::create_dir_all(&cfg.out).map_err(|e| format!("{}: {e}", cfg.out.display()))?;
    Ok(())
}

fn header_lines(cfg: &RunConfig, problem: &ProblemSpec) -> Result<String, Box<dyn std::error::Error>> {
    let params = cfg.params()?;
    let mut s = String::new();
    writeln!(s, "problem = {}", cfg.problem)?;
    writeln!(s, "method = {}", cfg.method)?;
    writeln!(s, "eta0 = {}", params.eta0)?;
    writeln!(s, "lambda1 = {}", params.lambda1)?;
    writeln!(s, "mu1 = {}", params.mu1)?;
    writeln!(s, "U = {}", cfg.speed)?;
    writeln!(s, "Wi = {}", problem.wi_of(params.lambda1))?;
    writeln!(s, "Re = {}", problem.re_of(params.eta0))?;
    Ok(s)
}

/// Single solve: VTK fields, residual history and a run summary.
pub fn cmd_solve(cfg: &RunConfig) -> CmdResult {
    let problem = cfg.problem_spec()?;
    let params = cfg.params()?;
    let mesh = load_mesh(cfg, &problem)?;
    let opts = method_options(cfg);
    prepare_out(cfg)?;
    let mut summary = header_lines(cfg, &problem)?;
    let title = format!("{} {} lambda1={}", cfg.problem, cfg.method, params.lambda1);
    let vtk = |name: &str, f: &FEFunction| -> std::io::Result<()> {
        write_vtk(
            &cfg.out.join(format!("{name}.vtk")),
            &title,
            &mesh,
            &[(name, f)],
            cfg.refined,
        )
    };

    let start = Instant::now();
    let (converged, iterations, dofs, note) = match cfg.method {
        Method::Srtd => {
            let r = srtd_solve(&problem, &params, &mesh, &opts.srtd)?;
            let ms = taylor_hood_space(&mesh);
            let dofs = ms.n_dofs() + r.p.space().n_dofs() + r.t.space().n_dofs();
            for (name, f) in [("u", &r.u), ("p", &r.p), ("pi", &r.pi), ("T", &r.t)] {
                vtk(name, f)?;
            }
            table::write_history(
                create(&cfg.out, "residuals.csv")?,
                &r.residual_history,
                &r.increment_history,
            )?;
            writeln!(summary, "best_iteration = {}", r.best_iteration + 1)?;
            (r.converged, r.residual_history.len(), dofs, r.failure)
        }
        Method::Evss => {
            let r = evss_solve(&problem, &params, &mesh, &opts.evss)?;
            for (name, f) in [
                ("u", &r.u),
                ("p", &r.p),
                ("Sigma", &r.sigma),
                ("D", &r.d),
                ("T", &r.t_recovered),
            ] {
                vtk(name, f)?;
            }
            table::write_history(create(&cfg.out, "residuals.csv")?, &r.newton.residual_history, &[])?;
            let note = (!r.converged).then(|| format!("Newton stopped with {:?}", r.newton.stop));
            (r.converged, r.newton.iterations, evss_space(&mesh).n_dofs(), note)
        }
        Method::Nse => {
            let dofs = taylor_hood_space(&mesh).n_dofs();
            match navier_stokes_solve_with(&problem, params.eta0, &mesh, &opts.nse) {
                Ok(r) => {
                    vtk("u", &r.u)?;
                    vtk("p", &r.p)?;
                    table::write_history(create(&cfg.out, "residuals.csv")?, &r.newton.residual_history, &[])?;
                    (true, r.newton.iterations, dofs, None)
                }
                Err(e @ (o3flow::Error::NotConverged(_) | o3flow::Error::Singular(_))) => {
                    (false, 0, dofs, Some(e.to_string()))
                }
                Err(e) => return Err(e.into()),
            }
        }
    };
    let seconds = start.elapsed().as_secs_f64();
    writeln!(summary, "vertices = {}", mesh.n_vertices())?;
    writeln!(summary, "cells = {}", mesh.n_cells())?;
    writeln!(summary, "dofs = {dofs}")?;
    writeln!(summary, "iterations = {iterations}")?;
    writeln!(summary, "converged = {converged}")?;
    writeln!(summary, "wall_time_s = {}", sig4(seconds))?;
    if let Some(n) = note {
        writeln!(summary, "note = {n}")?;
    }
    std::fs::write(cfg.out.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(Outcome::from_flag(converged))
}

/// Mesh-refinement study over `cfg.meshes`.
pub fn cmd_study(cfg: &RunConfig) -> CmdResult {
    let problem = cfg.problem_spec()?;
    let rows = convergence_study(&problem, cfg.method, &cfg.params()?, &cfg.meshes, &method_options(cfg))?;
    prepare_out(cfg)?;
    table::write_study(create(&cfg.out, "study.csv")?, &rows)?;
    println!("{}", header_lines(cfg, &problem)?.trim_end());
    println!("h, l2_err_u, l2_rate_u, h1_err_u, h1_rate_u, l2_err_p, l2_rate_p, converged");
    let rate = |r: Option<f64>| r.map(sig4).unwrap_or_else(|| "-".into());
    for r in &rows {
        println!(
            "{}, {}, {}, {}, {}, {}, {}, {}",
            sig4(r.h),
            sig4(r.l2_err_u),
            rate(r.l2_rate_u),
            sig4(r.h1_err_u),
            rate(r.h1_rate_u),
            sig4(r.l2_err_p),
            rate(r.l2_rate_p),
            r.converged
        );
    }
    Ok(Outcome::from_flag(rows.iter().all(|r| r.converged)))
}

/// Weissenberg sweep over the relaxation times `cfg.grid`.
pub fn cmd_sweep(cfg: &RunConfig) -> CmdResult {
    let problem = cfg.problem_spec()?;
    let mesh = load_mesh(cfg, &problem)?;
    let wi: Vec<f64> = cfg.grid.iter().map(|&l| problem.wi_of(l)).collect();
    let r = weissenberg_sweep(
        &problem,
        cfg.method,
        cfg.model(),
        cfg.eta0,
        &wi,
        &mesh,
        &method_options(cfg),
        cfg.stop_after,
    )?;
    prepare_out(cfg)?;
    table::write_sweep(create(&cfg.out, "sweep.csv")?, &r.points)?;
    for p in &r.points {
        println!(
            "Wi = {}: converged = {}, iterations = {}",
            sig4(p.wi),
            p.converged,
            p.iterations
        );
    }
    match r.limit {
        Some(l) => println!("limit Wi = {}", sig4(l)),
        None => println!("no converged grid point"),
    }
    Ok(Outcome::Converged)
}

/// Distance to the Navier–Stokes velocity over `cfg.lambdas`.
pub fn cmd_compare_newtonian(cfg: &RunConfig) -> CmdResult {
    let problem = cfg.problem_spec()?;
    let mesh = load_mesh(cfg, &problem)?;
    let c = newtonian_comparison(
        &problem,
        cfg.method,
        cfg.model(),
        cfg.eta0,
        &cfg.lambdas,
        &mesh,
        &method_options(cfg),
    )?;
    prepare_out(cfg)?;
    table::write_newtonian(create(&cfg.out, "newtonian.csv")?, &c.points)?;
    table::write_slope(create(&cfg.out, "newtonian_slope.csv")?, &c)?;
    for p in &c.points {
        match &p.note {
            Some(n) if !p.converged => println!("lambda1 = {}: dropped ({n})", sig4(p.lambda1)),
            _ => println!("lambda1 = {}: {}", sig4(p.lambda1), sig4(p.h1_difference)),
        }
    }
    match c.slope {
        Some(s) => println!("log-log slope = {}", sig4(s)),
        None => println!("too few converged points for a slope"),
    }
    Ok(Outcome::Converged)
}

/// Repeated SRTD and EVSS wall-clock timings over `cfg.meshes`.
pub fn cmd_time(cfg: &RunConfig) -> CmdResult {
    let problem = cfg.problem_spec()?;
    let rows = timing_comparison(&problem, &cfg.params()?, &cfg.meshes, cfg.repeats, &method_options(cfg))?;
    prepare_out(cfg)?;
    table::write_timing(create(&cfg.out, "timing.csv")?, &rows)?;
    for r in &rows {
        let ((sm, ss), (em, es)) = (r.srtd(), r.evss());
        println!(
            "h = {}: srtd {} ± {} s, evss {} ± {} s, ratio {}",
            sig4(r.h),
            sig4(sm),
            sig4(ss),
            sig4(em),
            sig4(es),
            sig4(r.ratio())
        );
    }
    Ok(Outcome::from_flag(rows.iter().all(|r| r.converged)))
}
