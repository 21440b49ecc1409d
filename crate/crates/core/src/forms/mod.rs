//! Weak forms: the Navier–Stokes operator, the three SRTD stages and the
//! coupled EVSS system.

mod evss;
mod mixed;
mod nse;
mod params;
mod stage1;
pub mod tensor;
mod transport;

pub use evss::{check_evss_space, evss_coupling, EvssSystem, EVSS_D, EVSS_P, EVSS_SIGMA, EVSS_U};
pub use mixed::{pressure_pin, Constraints, MixedSpace, VectorField};
pub use nse::{body_force_source, NavierStokesSystem};
pub use params::{Model, ModelParams};
pub use stage1::{stage1_source, stage1_system, PreviousIterate};
pub use tensor::{deformation, o3_constitutive_lhs, spin};
pub use transport::{assemble_stage2, assemble_stage2_on, assemble_stage3, assemble_stage3_on, transport_pattern};
