//! Incompressible SPH with a projection step whose pressure solve is exposed
//! to the predictor-corrector.

mod kernel;
mod neighbors;
mod operators;
mod ppe;
mod step;
mod system;

pub use kernel::{kernel_grad_w, kernel_w, KernelSpec, H_OVER_DX};
pub use neighbors::{build_neighbors, Domain, NeighborTable, Pair};
pub use operators::{
    concentration, concentration_gradient, gradient_correction, sph_divergence, sph_divergence_with, sph_gradient,
    sph_gradient_with, sph_laplacian_morris, sph_laplacian_morris_vec,
};
pub use ppe::{
    assemble_ppe, free_surface_flags, position_divergence, ppe_rows, pressure_gradient, scatter_pressures, wall_ghost_offset};
pub use step::{apply_pressures, finish_step, isph_step, predict, predicted_ppe, projected_velocity, Predicted, StepReport};
pub use system::{ParticleKind, ParticleSystem, SphParams};
