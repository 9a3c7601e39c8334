use serde::{Deserialize, Serialize};

use super::lsp::Lsp;
use super::{dot, norm2, EPS_FLOOR};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preconditioner {
    None,
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CgSettings {
    pub tol: f64,
    /// `None` means ten times the system dimension.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    pub precond: Preconditioner,
}

impl Default for CgSettings {
    fn default() -> Self {
        CgSettings { tol: 1e-8, max_iter: None, precond: Preconditioner::Jacobi }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Preconditioned conjugate gradient on the (possibly mean-pinned) system.
///
/// Starts from the system's initial guess when one is attached. A zero
/// right-hand side returns the zero vector without iterating.
pub fn cg_solve(lsp: &Lsp, settings: &CgSettings) -> Result<CgSolution> {
    if !(settings.tol > 0.0) {
        return Err(Error::Invalid(format!("cg tolerance must be positive, got {}", settings.tol)));
    }
    let n = lsp.dim();
    let b = lsp.rhs();
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok(CgSolution { x: vec![0.0; n], iterations: 0, residual: 0.0 });
    }
    let denom = b_norm.max(EPS_FLOOR);
    let max_iter = settings.max_iter.unwrap_or(10 * n.max(1));

    let inv_diag: Vec<f64> = match settings.precond {
        Preconditioner::None => vec![1.0; n],
        Preconditioner::Jacobi => lsp
            .operator_diagonal()
            .into_iter()
            .map(|d| if d.abs() > 0.0 { 1.0 / d } else { 1.0 })
            .collect(),
    };

    let mut x = lsp.initial_guess().map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; n]);
    let mut ap = vec![0.0; n];
    lsp.apply(&x, &mut ap);
    let mut r: Vec<f64> = b.iter().zip(&ap).map(|(bi, ai)| bi - ai).collect();
    let mut res = norm2(&r) / denom;
    if res <= settings.tol {
        return Ok(CgSolution { x, iterations: 0, residual: res });
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);

    for it in 1..=max_iter {
        lsp.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            // operator is not positive definite along p
            return Err(Error::NotConverged { iterations: it, residual: res });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = norm2(&r) / denom;
        if !res.is_finite() {
            return Err(Error::NotConverged { iterations: it, residual: res });
        }
        if res <= settings.tol {
            return Ok(CgSolution { x, iterations: it, residual: res });
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NotConverged { iterations: max_iter, residual: res })
}
