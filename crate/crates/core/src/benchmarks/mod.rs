//! Benchmark problems and the experiment drivers built on them.

mod compare;
mod methods;
mod problems;
mod study;
mod sweep;

pub use compare::{
    log_log_slope, mean_std, newtonian_comparison, timing_comparison, NewtonianComparison, NewtonianPoint, TimingRow,
};
pub use methods::{run_method, Method, MethodOptions, Solved};
pub use problems::{
    journal_bearing, lid_driven_cavity, lid_profile, manufactured_navier_stokes, ExactSolution, Geometry,
    MeshResolution, ProblemKind, ProblemSpec, BEARING_ECCENTRICITY, BEARING_INNER, BEARING_OUTER,
};
pub use study::{convergence_study, fill_rates, observed_rate, solution_differences, StudyRow};
pub use sweep::{default_weissenberg_grid, sweep_limit, weissenberg_sweep, SweepPoint, SweepResult};
