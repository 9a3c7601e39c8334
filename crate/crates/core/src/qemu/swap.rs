use rand_distr::{Binomial, Distribution};

use super::rng::stream_rng;
use crate::error::{Error, Result};
use crate::linsys::{dot, norm2};

/// Swap-test statistics for two prepared states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapTestResult {
    /// `|<x|y>|` of the normalised states.
    pub true_overlap: f64,
    /// Probability of reading the ancilla as `|0>`: `1/2 + overlap/2`.
    pub p0: f64,
    pub estimate_p0: Option<f64>,
    pub samples: u64,
}

pub fn swap_test_probability(x: &[f64], y: &[f64]) -> Result<SwapTestResult> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    let (nx, ny) = (norm2(x), norm2(y));
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::ZeroSolution);
    }
    let overlap = (dot(x, y) / (nx * ny)).abs().min(1.0);
    Ok(SwapTestResult { true_overlap: overlap, p0: 0.5 + 0.5 * overlap, estimate_p0: None, samples: 0 })
}

/// Measures the ancilla `n` times; the estimate is the fraction of `|0>` outcomes.
pub fn sample_ancilla(result: SwapTestResult, n: u64, seed: u64) -> Result<SwapTestResult> {
    if n == 0 {
        return Err(Error::Invalid("ancilla shot count must be at least 1".into()));
    }
    let p = result.p0.clamp(0.0, 1.0);
    let zeros = if p >= 1.0 {
        n
    } else {
        let mut rng = stream_rng(seed, 0);
        Binomial::new(n, p).expect("valid binomial parameters").sample(&mut rng)
    };
    Ok(SwapTestResult { estimate_p0: Some(zeros as f64 / n as f64), samples: n, ..result })
}
