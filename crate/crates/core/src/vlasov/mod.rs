//! 1D-1V Vlasov–Poisson: semi-Lagrangian transport with the periodic
//! Poisson solve routed through the predictor-corrector.

mod advect;
mod grid;
mod poisson;
mod step;

pub use advect::{advect_v, advect_x};
pub use grid::{charge_density, energies, init_two_stream, PhaseSpaceGrid, TwoStreamSpec};
pub use poisson::{assemble_poisson_1d, field_from_potential, poisson_lsp, FieldState};
pub use step::{vlasov_step, FIELD_BLOW_UP};
