//! Command-line front end of the o3flow solvers: run configuration,
//! subcommands, CSV tables and VTK output.

pub mod commands;
pub mod config;
pub mod table;
pub mod vtk;
