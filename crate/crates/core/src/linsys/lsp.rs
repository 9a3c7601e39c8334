use std::sync::{Arc, OnceLock};

use super::cg::{cg_solve, CgSettings, CgSolution};
use super::csr::SparseMatrix;
use crate::error::{Error, Result};

/// A linear system `A x = b`, optionally regularised by a rank-one mean pin
/// `A + (gamma / n) 1 1^T` applied matrix-free.
///
/// The reference solution is computed at most once, on first request, and
/// cached. Simulation loops treat it as hidden: deciders only see statistics
/// derived from it.
#[derive(Debug)]
pub struct Lsp {
    matrix: Arc<SparseMatrix>,
    rhs: Vec<f64>,
    mean_pin: f64,
    initial_guess: Option<Vec<f64>>,
    reference: OnceLock<std::result::Result<CgSolution, Error>>,
}

impl Clone for Lsp {
    fn clone(&self) -> Self {
        let reference = OnceLock::new();
        if let Some(r) = self.reference.get() {
            let _ = reference.set(r.clone());
        }
        Lsp {
            matrix: Arc::clone(&self.matrix),
            rhs: self.rhs.clone(),
            mean_pin: self.mean_pin,
            initial_guess: self.initial_guess.clone(),
            reference,
        }
    }
}

impl Lsp {
    pub fn new(matrix: SparseMatrix, rhs: Vec<f64>) -> Result<Self> {
        Self::shared(Arc::new(matrix), rhs)
    }

    pub fn shared(matrix: Arc<SparseMatrix>, rhs: Vec<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Invalid(format!(
                "system matrix must be square, got {}x{}",
                matrix.n_rows(),
                matrix.n_cols()
            )));
        }
        if rhs.len() != matrix.n_rows() {
            return Err(Error::DimensionMismatch { expected: matrix.n_rows(), got: rhs.len() });
        }
        Ok(Lsp { matrix, rhs, mean_pin: 0.0, initial_guess: None, reference: OnceLock::new() })
    }

    /// Adds the rank-one term `(gamma / n) 1 1^T`.
    pub fn with_mean_pin(mut self, gamma: f64) -> Self {
        self.mean_pin = gamma;
        self.reference = OnceLock::new();
        self
    }

    pub fn with_initial_guess(mut self, x0: Vec<f64>) -> Self {
        if x0.len() == self.rhs.len() {
            self.initial_guess = Some(x0);
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn shared_matrix(&self) -> Arc<SparseMatrix> {
        Arc::clone(&self.matrix)
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn mean_pin(&self) -> f64 {
        self.mean_pin
    }

    pub fn initial_guess(&self) -> Option<&[f64]> {
        self.initial_guess.as_deref()
    }

    /// `out = (A + pin) v`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        self.matrix.mul_into(v, out);
        if self.mean_pin != 0.0 {
            let shift = self.mean_pin * v.iter().sum::<f64>() / v.len() as f64;
            out.iter_mut().for_each(|o| *o += shift);
        }
    }

    /// Diagonal of the regularised operator.
    pub fn operator_diagonal(&self) -> Vec<f64> {
        let n = self.dim() as f64;
        self.matrix.diagonal().into_iter().map(|d| d + self.mean_pin / n).collect()
    }

    /// Relative residual `|A x - b| / max(|b|, floor)`.
    pub fn relative_residual(&self, x: &[f64]) -> f64 {
        let mut ax = vec![0.0; self.dim()];
        self.apply(x, &mut ax);
        let r: f64 = ax.iter().zip(&self.rhs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        r / super::norm2(&self.rhs).max(super::EPS_FLOOR)
    }

    /// Solves once with `settings` and caches the outcome.
    pub fn solve(&self, settings: &CgSettings) -> Result<&CgSolution> {
        self.reference
            .get_or_init(|| cg_solve(self, settings))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// The cached solution, if a solve has already happened.
    pub fn cached_solution(&self) -> Option<&CgSolution> {
        self.reference.get().and_then(|r| r.as_ref().ok())
    }
}
