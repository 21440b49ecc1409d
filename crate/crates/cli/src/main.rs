use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use o3flow_cli::commands::{cmd_compare_newtonian, cmd_solve, cmd_study, cmd_sweep, cmd_time, CmdResult};
use o3flow_cli::config::{read_config_file, RunConfig};

/// Steady viscoelastic flow solvers (SRTD and EVSS) for the O3 model.
///
/// Exit status: 0 converged, 2 not converged, 1 error.
#[derive(Parser, Debug)]
#[command(name = "o3flow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve once and write fields, residuals and a summary.
    Solve(Flags),
    /// Mesh-refinement study over --meshes.
    Study(Flags),
    /// Weissenberg sweep over the relaxation times --grid.
    Sweep(Flags),
    /// H1 distance to the Navier-Stokes velocity over --lambdas.
    CompareNewtonian(Flags),
    /// Wall-clock timing of SRTD against EVSS over --meshes.
    Time(Flags),
}

/// Flags override values read from --config.
#[derive(Args, Debug)]
struct Flags {
    /// Flat `key = value` file using the flag names as keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// ldc, jb or mms.
    #[arg(long)]
    problem: Option<String>,
    /// srtd, evss or nse.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    eta0: Option<String>,
    #[arg(long)]
    lambda1: Option<String>,
    #[arg(long)]
    mu1: Option<String>,
    /// ucm or corotational.
    #[arg(long)]
    model: Option<String>,
    /// Slip parameter, mu1 = a * lambda1.
    #[arg(long)]
    a: Option<String>,
    /// Characteristic speed.
    #[arg(long = "U")]
    speed: Option<String>,
    /// Unit-square divisions.
    #[arg(long)]
    n: Option<String>,
    /// Target mesh size.
    #[arg(long)]
    h: Option<String>,
    /// Gmsh MSH 2.2 mesh.
    #[arg(long)]
    mesh_file: Option<String>,
    /// Physical group to boundary tag, e.g. `3=annulus_inner`.
    #[arg(long = "tag", value_name = "ID=NAME")]
    tags: Vec<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    max_iter: Option<String>,
    /// Streamline upwinding (default off for srtd, on for evss).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    supg: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Also write fields on the once-refined mesh.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    refined: Option<String>,
    /// Comma-separated divisions or mesh sizes.
    #[arg(long)]
    meshes: Option<String>,
    /// Comma-separated relaxation times for a sweep.
    #[arg(long)]
    grid: Option<String>,
    /// Comma-separated relaxation times for compare-newtonian.
    #[arg(long)]
    lambdas: Option<String>,
    #[arg(long)]
    repeats: Option<String>,
    /// End a sweep after this many consecutive failures.
    #[arg(long)]
    stop_after: Option<String>,
}

impl Flags {
    fn resolve(&self) -> Result<RunConfig, Box<dyn std::error::Error>> {
        let mut map = match &self.config {
            Some(path) => read_config_file(path)?,
            None => BTreeMap::new(),
        };
        let pairs = [
            ("problem", &self.problem),
            ("method", &self.method),
            ("eta0", &self.eta0),
            ("lambda1", &self.lambda1),
            ("mu1", &self.mu1),
            ("model", &self.model),
            ("a", &self.a),
            ("U", &self.speed),
            ("n", &self.n),
            ("h", &self.h),
            ("mesh-file", &self.mesh_file),
            ("tol", &self.tol),
            ("max-iter", &self.max_iter),
            ("supg", &self.supg),
            ("out", &self.out),
            ("refined", &self.refined),
            ("meshes", &self.meshes),
            ("grid", &self.grid),
            ("lambdas", &self.lambdas),
            ("repeats", &self.repeats),
            ("stop-after", &self.stop_after),
        ];
        // A mesh or relaxation flag replaces the file's alternatives.
        if self.n.is_some() || self.h.is_some() || self.mesh_file.is_some() {
            for k in ["n", "h", "mesh-file"] {
                map.remove(k);
            }
        }
        if self.mu1.is_some() || self.model.is_some() || self.a.is_some() {
            for k in ["mu1", "model", "a"] {
                map.remove(k);
            }
        }
        for (k, v) in pairs {
            if let Some(v) = v {
                map.insert(k.to_string(), v.clone());
            }
        }
        for t in &self.tags {
            let (id, name) = t.split_once('=').ok_or(format!("--tag expects ID=NAME, got {t:?}"))?;
            map.insert(format!("tag.{}", id.trim()), name.trim().to_string());
        }
        Ok(RunConfig::from_map(&map)?)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (flags, run): (&Flags, fn(&RunConfig) -> CmdResult) = match &cli.command {
        Command::Solve(f) => (f, cmd_solve),
        Command::Study(f) => (f, cmd_study),
        Command::Sweep(f) => (f, cmd_sweep),
        Command::CompareNewtonian(f) => (f, cmd_compare_newtonian),
        Command::Time(f) => (f, cmd_time),
    };
    let result = flags.resolve().and_then(|cfg| run(&cfg));
    match result {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e.downcast_ref::<o3flow::Error>(), Some(o3flow::Error::NotConverged(_))) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
