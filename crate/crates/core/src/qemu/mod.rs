//! Emulated HHL outputs. The solution of a linear system is computed
//! classically and only its measurement statistics are exposed: basis-state
//! readout histograms and swap-test ancilla counts.

mod readout;
mod rng;
mod swap;

pub use readout::{distribution_from_solution, sample_readout, Histogram, ReadoutDistribution};
pub use rng::{derive_seed, stream_rng, SimRng};
pub use swap::{sample_ancilla, swap_test_probability, SwapTestResult};

use crate::error::{Error, Result};
use crate::linsys::Lsp;

/// Splits `A x = b` into one system driven by the negative entries of `b` and
/// one driven by the positive entries. Both share the matrix, and the two
/// right-hand sides sum to `b`.
pub fn sign_split(lsp: &Lsp) -> Result<(Lsp, Lsp)> {
    let neg: Vec<f64> = lsp.rhs().iter().map(|&b| if b < 0.0 { b } else { 0.0 }).collect();
    let pos: Vec<f64> = lsp.rhs().iter().map(|&b| if b > 0.0 { b } else { 0.0 }).collect();
    let pin = lsp.mean_pin();
    Ok((
        Lsp::shared(lsp.shared_matrix(), neg)?.with_mean_pin(pin),
        Lsp::shared(lsp.shared_matrix(), pos)?.with_mean_pin(pin),
    ))
}

/// Shots needed so a Bernoulli proportion is within `e` at Z-score `z`:
/// `ceil(z^2 p (1 - p) / e^2)`.
pub fn required_samples(z: f64, p: f64, e: f64) -> Result<u64> {
    if !(e > 0.0) {
        return Err(Error::Invalid(format!("margin of error must be positive, got {e}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Invalid(format!("probability must lie in [0, 1], got {p}")));
    }
    let n = z * z * p * (1.0 - p) / (e * e);
    // guard against 384.00000000000006-style round-up of exact products
    let rounded = n.round();
    if (n - rounded).abs() <= 1e-9 * rounded.max(1.0) {
        Ok(rounded as u64)
    } else {
        Ok(n.ceil() as u64)
    }
}
