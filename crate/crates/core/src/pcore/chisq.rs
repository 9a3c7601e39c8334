use serde::{Deserialize, Serialize};

use super::gamma::regularized_gamma_q;
use crate::error::{Error, Result};
use crate::qemu::{Histogram, ReadoutDistribution};

/// Minimum expected count for a bin to be tested on its own.
pub const MIN_EXPECTED: f64 = 5.0;

/// How bins whose expected count falls below [`MIN_EXPECTED`] are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Pooling {
    /// All sparse bins go into one aggregate bin appended after the others.
    Aggregate,
    /// Consecutive bins (in index order) are merged until each group reaches
    /// the minimum expected count; a short final group joins its predecessor.
    #[default]
    Adjacent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquaredResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Number of original bins that were merged with others.
    pub pooled_bins: usize,
}

/// Pearson test with sparse bins folded into one aggregate bin.
pub fn chi_squared_test(observed: &Histogram, expected: &ReadoutDistribution) -> Result<ChiSquaredResult> {
    chi_squared_test_pooled(observed, expected, Pooling::Aggregate)
}

pub fn chi_squared_test_pooled(
    observed: &Histogram,
    expected: &ReadoutDistribution,
    pooling: Pooling,
) -> Result<ChiSquaredResult> {
    if expected.is_zero() {
        return Err(Error::ZeroSolution);
    }
    let p = expected.probabilities();
    if observed.counts.len() != p.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), got: observed.counts.len() });
    }
    if observed.total == 0 {
        return Err(Error::Invalid("observed histogram is empty".into()));
    }
    let n = observed.total as f64;
    let bins = match pooling {
        Pooling::Aggregate => aggregate(&observed.counts, p, n),
        Pooling::Adjacent => adjacent(&observed.counts, p, n),
    };
    if bins.groups.len() < 2 {
        return Err(Error::DegenerateTest { retained: bins.groups.len() });
    }
    let mut statistic = 0.0;
    for &(o, e) in &bins.groups {
        if e > 0.0 {
            statistic += (o - e) * (o - e) / e;
        } else if o > 0.0 {
            // mass where the reference distribution has none
            statistic = f64::INFINITY;
        }
    }
    let dof = bins.groups.len() - 1;
    let p_value = if statistic.is_infinite() { 0.0 } else { regularized_gamma_q(dof as f64 / 2.0, statistic / 2.0)? };
    Ok(ChiSquaredResult { statistic, dof, p_value, pooled_bins: bins.pooled })
}

struct Binned {
    groups: Vec<(f64, f64)>,
    pooled: usize,
}

fn aggregate(counts: &[u64], p: &[f64], n: f64) -> Binned {
    let mut groups = Vec::new();
    let (mut po, mut pe, mut pooled) = (0.0, 0.0, 0);
    for (&c, &pi) in counts.iter().zip(p) {
        let e = n * pi;
        if e >= MIN_EXPECTED {
            groups.push((c as f64, e));
        } else {
            po += c as f64;
            pe += e;
            pooled += 1;
        }
    }
    if pe > 0.0 || po > 0.0 {
        groups.push((po, pe));
    }
    Binned { groups, pooled }
}

fn adjacent(counts: &[u64], p: &[f64], n: f64) -> Binned {
    let mut groups: Vec<(f64, f64)> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    let (mut o, mut e, mut size) = (0.0, 0.0, 0usize);
    for (&c, &pi) in counts.iter().zip(p) {
        o += c as f64;
        e += n * pi;
        size += 1;
        if e >= MIN_EXPECTED {
            groups.push((o, e));
            sizes.push(size);
            o = 0.0;
            e = 0.0;
            size = 0;
        }
    }
    if size > 0 && (e > 0.0 || o > 0.0) {
        match groups.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
                *sizes.last_mut().unwrap() += size;
            }
            None => {
                groups.push((o, e));
                sizes.push(size);
            }
        }
    }
    let pooled = sizes.iter().filter(|&&s| s > 1).sum();
    Binned { groups, pooled }
}
