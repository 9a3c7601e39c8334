use rand_distr::{Binomial, Distribution};

use super::rng::stream_rng;
use crate::error::{Error, Result};

/// Squared-amplitude measurement statistics of a solution vector.
///
/// The zero vector has no defined distribution; it is represented by the
/// zero-solution sentinel (`norm == 0`, no probabilities).
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutDistribution {
    probabilities: Vec<f64>,
    norm: f64,
    source_dim: usize,
}

impl ReadoutDistribution {
    pub fn zero(source_dim: usize) -> Self {
        ReadoutDistribution { probabilities: Vec::new(), norm: 0.0, source_dim }
    }

    pub fn is_zero(&self) -> bool {
        self.norm == 0.0
    }

    /// Empty for the zero sentinel.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }
}

pub fn distribution_from_solution(x: &[f64]) -> Result<ReadoutDistribution> {
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::Invalid(format!("solution entry {i} is not finite")));
    }
    // scale first so tiny or huge vectors do not under/overflow when squared
    let amax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if amax == 0.0 {
        return Ok(ReadoutDistribution::zero(x.len()));
    }
    let squares: Vec<f64> = x.iter().map(|v| (v / amax) * (v / amax)).collect();
    let total: f64 = squares.iter().sum();
    Ok(ReadoutDistribution {
        probabilities: squares.iter().map(|s| s / total).collect(),
        norm: amax * total.sqrt(),
        source_dim: x.len(),
    })
}

/// Counts of measured basis states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub counts: Vec<u64>,
    pub total: u64,
    pub seed: u64,
}

impl Histogram {
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.total.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// `index,count` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            s.push_str(&format!("{i},{c}\n"));
        }
        s
    }
}

/// `n` independent categorical draws from `dist`, drawn as a multinomial by
/// conditional binomials so the cost is linear in the dimension.
pub fn sample_readout(dist: &ReadoutDistribution, n: u64, seed: u64) -> Result<Histogram> {
    if dist.is_zero() {
        return Err(Error::ZeroSolution);
    }
    if n == 0 {
        return Err(Error::Invalid("sample count must be at least 1".into()));
    }
    let p = dist.probabilities();
    // suffix sums avoid the cancellation of 1 - prefix
    let mut tail = vec![0.0; p.len() + 1];
    for i in (0..p.len()).rev() {
        tail[i] = tail[i + 1] + p[i];
    }
    let mut rng = stream_rng(seed, 0);
    let mut counts = vec![0u64; p.len()];
    let mut left = n;
    for i in 0..p.len() {
        if left == 0 {
            break;
        }
        if tail[i + 1] <= 0.0 {
            counts[i] = left;
            left = 0;
            break;
        }
        let q = (p[i] / tail[i]).clamp(0.0, 1.0);
        let c = if q <= 0.0 {
            0
        } else if q >= 1.0 {
            left
        } else {
            Binomial::new(left, q).expect("valid binomial parameters").sample(&mut rng)
        };
        counts[i] = c;
        left -= c;
    }
    if left > 0 {
        // only reachable through rounding in the tail sums
        let last = p.iter().rposition(|&x| x > 0.0).unwrap_or(p.len() - 1);
        counts[last] += left;
    }
    Ok(Histogram { counts, total: n, seed })
}
