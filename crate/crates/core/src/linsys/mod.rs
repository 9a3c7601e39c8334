//! Sparse linear algebra used by both physics solvers and by the readout
//! emulator's hidden oracle: CSR storage, products, preconditioned CG and a
//! small dense LU used as a test oracle.

mod cg;
mod csr;
mod dense;
mod lsp;

pub use cg::{cg_solve, CgSettings, CgSolution, Preconditioner};
pub use csr::{csr_from_triplets, spmv, SparseMatrix};
pub use dense::{direct_solve_dense, DenseMatrix};
pub use lsp::Lsp;

/// Guards the relative residual against a zero right-hand side.
pub const EPS_FLOOR: f64 = 1e-30;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
