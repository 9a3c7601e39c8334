use super::grid::{charge_density, PhaseSpaceGrid};
use crate::error::{Error, Result};
use crate::linsys::{CgSettings, Lsp, SparseMatrix};

/// Periodic `-d2/dx2` on `nx` nodes. Rows sum to zero; the constant null
/// space is left for the mean pin.
pub fn assemble_poisson_1d(nx: usize, dx: f64) -> Result<SparseMatrix> {
    if nx < 3 || !(dx > 0.0) {
        return Err(Error::Invalid(format!("periodic Poisson needs nx >= 3 and dx > 0 (got {nx}, {dx})")));
    }
    let c = 1.0 / (dx * dx);
    let rows: Vec<Vec<(usize, f64)>> =
        (0..nx).map(|i| vec![((i + nx - 1) % nx, -c), (i, 2.0 * c), ((i + 1) % nx, -c)]).collect();
    SparseMatrix::from_rows(nx, &rows)
}

/// `-phi'' = rho / eps0` with the rank-one mean pin. The source is shifted
/// to zero mean; subtracting the first entry before averaging keeps a
/// uniform source exactly zero.
pub fn poisson_lsp(matrix: &SparseMatrix, rho: &[f64], eps0: f64) -> Result<Lsp> {
    let r0 = rho.first().copied().unwrap_or(0.0);
    let mean = rho.iter().map(|r| r - r0).sum::<f64>() / rho.len() as f64;
    let rhs: Vec<f64> = rho.iter().map(|r| ((r - r0) - mean) / eps0).collect();
    let gamma = matrix.diagonal().iter().map(|d| d.abs()).sum::<f64>() / matrix.n_rows() as f64;
    Ok(Lsp::new(matrix.clone(), rhs)?.with_mean_pin(gamma))
}

/// `E = -dphi/dx` by centred differences.
pub fn field_from_potential(phi: &[f64], dx: f64) -> Vec<f64> {
    let n = phi.len();
    (0..n).map(|i| -(phi[(i + 1) % n] - phi[(i + n - 1) % n]) / (2.0 * dx)).collect()
}

/// Potential and field as last delivered to the particles.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub phi: Vec<f64>,
    pub e_field: Vec<f64>,
    pub last_update_step: usize,
    /// Largest |E| at start, the scale for the blow-up check.
    pub reference_e: f64,
}

impl FieldState {
    pub fn from_potential(phi: Vec<f64>, dx: f64, step: usize) -> Self {
        let e_field = field_from_potential(&phi, dx);
        let reference_e = e_field.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        FieldState { phi, e_field, last_update_step: step, reference_e }
    }

    /// Direct solve for the current distribution.
    pub fn solve(grid: &PhaseSpaceGrid, solver: &CgSettings) -> Result<Self> {
        let a = assemble_poisson_1d(grid.nx, grid.dx)?;
        let lsp = poisson_lsp(&a, &charge_density(grid), grid.eps0)?;
        Ok(Self::from_potential(lsp.solve(solver)?.x.clone(), grid.dx, 0))
    }

    pub fn update(&mut self, phi: Vec<f64>, dx: f64, step: usize) {
        self.e_field = field_from_potential(&phi, dx);
        self.phi = phi;
        self.last_update_step = step;
    }
}
