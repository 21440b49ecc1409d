use std::sync::Arc;

use super::sparse::{SparseMatrix, SparsityPattern};
use crate::error::{Error, Result};

#[cfg(feature = "umfpack")]
use umf::Backend;

#[cfg(all(feature = "faer", not(feature = "umfpack")))]
use native::Backend;

#[cfg(not(any(feature = "umfpack", feature = "faer")))]
compile_error!("enable the `umfpack` or `faer` feature for the sparse LU");

/// Sparse direct solver with partial pivoting.
///
/// With the `umfpack` feature (the default) this links SuiteSparse's UMFPACK;
/// without it, faer's sparse LU is used. UMFPACK orders saddle-point FEM
/// matrices with far less fill, which is what makes the finest meshes fit in
/// memory.
///
/// The symbolic analysis is cached per sparsity pattern, so refactoring a
/// matrix that shares its pattern (same `Arc`) with the previous one only
/// redoes the numeric phase.
#[derive(Default)]
pub struct LuSolver {
    pattern: Option<Arc<SparsityPattern>>,
    backend: Backend,
}

impl LuSolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn factor(&mut self, a: &SparseMatrix) -> Result<()> {
        let n = a.n_rows();
        if a.n_cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "LU needs a square matrix, got {} x {}",
                a.n_rows(),
                a.n_cols()
            )));
        }
        let p = a.pattern();
        let reuse = matches!(&self.pattern, Some(q) if Arc::ptr_eq(q, p));
        if !reuse {
            self.pattern = None;
            self.backend.analyze(p)?;
            self.pattern = Some(p.clone());
        }
        self.backend.factor(a)
    }

    /// Solves `A x = b` with the last factored matrix. A non-finite solution
    /// (zero pivot) is reported as [`Error::Singular`].
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = match &self.pattern {
            Some(p) => p.n_rows(),
            None => return Err(Error::Singular("no factorization available".into())),
        };
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "rhs has length {}, matrix has {n} rows",
                b.len()
            )));
        }
        let x = self.backend.solve(b)?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular("zero pivot in sparse LU".into()));
        }
        Ok(x)
    }
}

// CSR arrays of A are the CSC arrays of A^T. Both backends factor A^T and
// use a transposed solve.

#[cfg(feature = "umfpack")]
mod umf {
    use std::os::raw::{c_int, c_void};
    use std::ptr;
    use std::sync::Arc;

    use super::super::sparse::{SparseMatrix, SparsityPattern};
    use crate::error::{Error, Result};

    type Long = i64;
    const CONTROL: usize = 20;
    const INFO: usize = 90;
    const SYS_AT: c_int = 1;
    const OK: Long = 0;
    const WARNING_SINGULAR: Long = 1;
    const OUT_OF_MEMORY: Long = -1;
    const STRATEGY: usize = 5;
    const ORDERING: usize = 10;
    const IRSTEP: usize = 7;
    const ALLOC_INIT: usize = 6;
    const STRATEGY_SYMMETRIC: f64 = 3.0;
    const ORDERING_METIS: f64 = 3.0;

    // usize and i64 share size and alignment on the targets UMFPACK's `dl`
    // interface exists for, and every index fits in i64.
    const _: () = assert!(std::mem::size_of::<usize>() == std::mem::size_of::<Long>());

    #[link(name = "umfpack")]
    extern "C" {
        fn umfpack_dl_defaults(control: *mut f64);
        fn umfpack_dl_symbolic(
            n_row: Long,
            n_col: Long,
            ap: *const Long,
            ai: *const Long,
            ax: *const f64,
            symbolic: *mut *mut c_void,
            control: *const f64,
            info: *mut f64,
        ) -> Long;
        fn umfpack_dl_numeric(
            ap: *const Long,
            ai: *const Long,
            ax: *const f64,
            symbolic: *mut c_void,
            numeric: *mut *mut c_void,
            control: *const f64,
            info: *mut f64,
        ) -> Long;
        fn umfpack_dl_solve(
            sys: c_int,
            ap: *const Long,
            ai: *const Long,
            ax: *const f64,
            x: *mut f64,
            b: *const f64,
            numeric: *mut c_void,
            control: *const f64,
            info: *mut f64,
        ) -> Long;
        fn umfpack_dl_free_symbolic(symbolic: *mut *mut c_void);
        fn umfpack_dl_free_numeric(numeric: *mut *mut c_void);
    }

    pub struct Backend {
        pattern: Option<Arc<SparsityPattern>>,
        control: [f64; CONTROL],
        symbolic: *mut c_void,
        numeric: *mut c_void,
    }

    // The handles are owned heap objects that UMFPACK never shares.
    unsafe impl Send for Backend {}

    impl Default for Backend {
        fn default() -> Self {
            let mut control = [0.0; CONTROL];
            unsafe { umfpack_dl_defaults(control.as_mut_ptr()) };
            control[STRATEGY] = STRATEGY_SYMMETRIC;
            control[ORDERING] = ORDERING_METIS;
            // refinement would need a second copy of the matrix values
            control[IRSTEP] = 0.0;
            // start from the bare minimum and grow, collecting garbage on the way
            control[ALLOC_INIT] = -1.0;
            Backend {
                pattern: None,
                control,
                symbolic: ptr::null_mut(),
                numeric: ptr::null_mut(),
            }
        }
    }

    fn status_error(stage: &str, status: Long) -> Error {
        match status {
            WARNING_SINGULAR => Error::Singular(format!("{stage}: singular matrix")),
            OUT_OF_MEMORY => Error::Singular(format!("{stage}: out of memory")),
            s => Error::Singular(format!("{stage} failed with UMFPACK status {s}")),
        }
    }

    impl Backend {
        fn free(&mut self) {
            unsafe {
                if !self.numeric.is_null() {
                    umfpack_dl_free_numeric(&mut self.numeric);
                }
                if !self.symbolic.is_null() {
                    umfpack_dl_free_symbolic(&mut self.symbolic);
                }
            }
            self.numeric = ptr::null_mut();
            self.symbolic = ptr::null_mut();
        }

        fn arrays(&self) -> (*const Long, *const Long) {
            let p = self.pattern.as_ref().expect("analyzed pattern");
            (p.row_ptr().as_ptr() as *const Long, p.col_idx().as_ptr() as *const Long)
        }

        pub fn analyze(&mut self, p: &Arc<SparsityPattern>) -> Result<()> {
            self.free();
            self.pattern = Some(p.clone());
            let (ap, ai) = self.arrays();
            let mut info = [0.0; INFO];
            let n = p.n_rows() as Long;
            let status = unsafe {
                umfpack_dl_symbolic(
                    n,
                    n,
                    ap,
                    ai,
                    ptr::null(),
                    &mut self.symbolic,
                    self.control.as_ptr(),
                    info.as_mut_ptr(),
                )
            };
            if status != OK {
                self.symbolic = ptr::null_mut();
                return Err(status_error("symbolic LU", status));
            }
            Ok(())
        }

        pub fn factor(&mut self, a: &SparseMatrix) -> Result<()> {
            unsafe {
                if !self.numeric.is_null() {
                    umfpack_dl_free_numeric(&mut self.numeric);
                }
            }
            self.numeric = ptr::null_mut();
            let (ap, ai) = self.arrays();
            let mut info = [0.0; INFO];
            let status = unsafe {
                umfpack_dl_numeric(
                    ap,
                    ai,
                    a.values().as_ptr(),
                    self.symbolic,
                    &mut self.numeric,
                    self.control.as_ptr(),
                    info.as_mut_ptr(),
                )
            };
            if status != OK {
                unsafe {
                    if !self.numeric.is_null() {
                        umfpack_dl_free_numeric(&mut self.numeric);
                    }
                }
                self.numeric = ptr::null_mut();
                return Err(status_error("numeric LU", status));
            }
            Ok(())
        }

        pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
            if self.numeric.is_null() {
                return Err(Error::Singular("no factorization available".into()));
            }
            let (ap, ai) = self.arrays();
            let mut x = vec![0.0; b.len()];
            let mut info = [0.0; INFO];
            let status = unsafe {
                umfpack_dl_solve(
                    SYS_AT,
                    ap,
                    ai,
                    ptr::null(),
                    x.as_mut_ptr(),
                    b.as_ptr(),
                    self.numeric,
                    self.control.as_ptr(),
                    info.as_mut_ptr(),
                )
            };
            if status != OK {
                return Err(status_error("LU solve", status));
            }
            Ok(x)
        }
    }

    impl Drop for Backend {
        fn drop(&mut self) {
            self.free();
        }
    }
}

#[cfg(all(feature = "faer", not(feature = "umfpack")))]
mod native {
    use faer::linalg::solvers::Solve;
    use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
    use faer::sparse::linalg::LuError;
    use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
    use faer::MatMut;
    use std::sync::Arc;

    use super::super::sparse::{SparseMatrix, SparsityPattern};
    use crate::error::{Error, Result};

    #[derive(Default)]
    pub struct Backend {
        symbolic: Option<SymbolicLu<usize>>,
        numeric: Option<Lu<usize, f64>>,
    }

    impl Backend {
        pub fn analyze(&mut self, p: &Arc<SparsityPattern>) -> Result<()> {
            self.symbolic = None;
            self.numeric = None;
            let n = p.n_rows();
            let s = SymbolicSparseColMatRef::new_checked(n, n, p.row_ptr(), None, p.col_idx());
            let sym = SymbolicLu::try_new(s).map_err(|e| Error::Singular(format!("symbolic LU failed: {e:?}")))?;
            self.symbolic = Some(sym);
            Ok(())
        }

        pub fn factor(&mut self, a: &SparseMatrix) -> Result<()> {
            self.numeric = None;
            let p = a.pattern();
            let n = p.n_rows();
            let s = SymbolicSparseColMatRef::new_checked(n, n, p.row_ptr(), None, p.col_idx());
            let sym = self
                .symbolic
                .clone()
                .ok_or_else(|| Error::Singular("no symbolic analysis".into()))?;
            let lu = Lu::try_new_with_symbolic(sym, SparseColMatRef::new(s, a.values())).map_err(|e| match e {
                LuError::SymbolicSingular { index } => {
                    Error::Singular(format!("structurally singular matrix at pivot {index}"))
                }
                LuError::Generic(err) => Error::Singular(format!("numeric LU failed: {err:?}")),
            })?;
            self.numeric = Some(lu);
            Ok(())
        }

        pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
            let lu = self
                .numeric
                .as_ref()
                .ok_or_else(|| Error::Singular("no factorization available".into()))?;
            let mut x = b.to_vec();
            let n = x.len();
            lu.solve_transpose_in_place(MatMut::from_column_major_slice_mut(&mut x, n, 1));
            Ok(x)
        }
    }
}

/// One-shot factor and solve of `A x = b`.
pub fn lu_solve(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "rhs has length {}, matrix has {} rows",
            b.len(),
            a.n_rows()
        )));
    }
    let mut solver = LuSolver::new();
    solver.factor(a)?;
    solver.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::triplet_assemble;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_returns_rhs() {
        let a = SparseMatrix::identity(5);
        let b = [1.0, -2.0, 3.5, 0.0, 7.0];
        assert_eq!(lu_solve(&a, &b).unwrap(), b.to_vec());
    }

    #[test]
    fn two_by_two() {
        let a = triplet_assemble(2, 2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)]).unwrap();
        let x = lu_solve(&a, &[3.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nonsymmetric_orientation() {
        let a = triplet_assemble(2, 2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 1, 1.0)]).unwrap();
        let x = lu_solve(&a, &[5.0, 2.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0]);
    }

    #[test]
    fn singular_is_reported() {
        let a = triplet_assemble(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]).unwrap();
        assert!(matches!(lu_solve(&a, &[1.0, 2.0]), Err(Error::Singular(_))));
        let z = triplet_assemble(2, 2, &[(0, 0, 1.0), (1, 0, 1.0)]).unwrap();
        assert!(matches!(lu_solve(&z, &[1.0, 2.0]), Err(Error::Singular(_))));
    }

    #[test]
    fn random_diagonally_dominant_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200;
        let mut trips = Vec::new();
        let mut dense = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            let mut off = 0.0;
            for _ in 0..6 {
                let j = rng.gen_range(0..n);
                if j != i {
                    let v: f64 = rng.gen_range(-1.0..1.0);
                    trips.push((i, j, v));
                    dense[(i, j)] += v;
                    off += v.abs();
                }
            }
            trips.push((i, i, off + 1.0));
            dense[(i, i)] += off + 1.0;
        }
        let a = triplet_assemble(n, n, &trips).unwrap();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = lu_solve(&a, &b).unwrap();
        let xd = dense.lu().solve(&nalgebra::DVector::from_vec(b)).unwrap();
        for i in 0..n {
            assert!((x[i] - xd[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn symbolic_reuse_with_new_values() {
        let a = triplet_assemble(2, 2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)]).unwrap();
        let mut solver = LuSolver::new();
        solver.factor(&a).unwrap();
        let mut b = a.clone();
        for v in b.values_mut() {
            *v *= 2.0;
        }
        solver.factor(&b).unwrap();
        let x = solver.solve(&[6.0, 8.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }
}
