//! Emulated-readout predictor-corrector for time-stepped linear solves, with
//! an incompressible SPH solver and a 1D Vlasov–Poisson solver as hosts.

pub mod cases;
pub mod error;
pub mod harness;
pub mod isph;
pub mod linsys;
pub mod pcore;
pub mod qemu;
pub mod vlasov;

pub use error::{Error, Result};
