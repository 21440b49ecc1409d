//! Lagrange finite elements on triangles: quadrature, bases, function spaces,
//! point location, interpolation, norms and Dirichlet constraints.

mod basis;
mod dirichlet;
mod element;
mod function;
mod interpolate;
mod locate;
mod norms;
mod quadrature;
mod space;

pub use basis::{eval_basis, BasisValues, Family};
pub use dirichlet::{apply_dirichlet, boundary_nodes, dirichlet_dofs};
pub use element::{CellGeometry, CellQuadrature, FamilyTable};
pub use function::FEFunction;
pub use interpolate::{eval_at, interpolate_to, interpolate_to_with, InterpolationOptions};
pub use locate::{Location, PointLocator};
pub use norms::{demean, demeaned, error_norm, error_norm_with, integrate, norm, Norm};
pub use quadrature::{QuadratureRule, ASSEMBLY_DEGREE};
pub use space::{build_space, FunctionSpace, ValueShape};
