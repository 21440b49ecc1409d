//! Sparse matrices, a sparse direct solver and a Newton driver.

mod lu;
mod newton;
mod sparse;

pub use lu::{lu_solve, LuSolver};
pub use newton::{
    jacobian_fd_error, newton_solve, newton_solve_with, norm2, norm_inf, NewtonOptions, NewtonReport, NewtonStop,
    NonlinearSystem,
};
pub use sparse::{triplet_assemble, SparseMatrix, SparsityPattern};
