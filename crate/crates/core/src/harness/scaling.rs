use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::{CaseKind, ExperimentConfig};
use crate::cases::tgv_init;
use crate::error::{Error, Result};
use crate::isph::isph_step;
use crate::pcore::{chi_squared_test_pooled, Corrector, PcConfig, PcMode, Pooling};
use crate::qemu::{derive_seed, distribution_from_solution, required_samples, sample_readout, ReadoutDistribution};

/// Sample counts at one resolution. `None` marks a method whose search
/// failed for at least one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n_side: usize,
    /// Number of unknowns.
    pub n: usize,
    pub samples_dfs: Option<f64>,
    pub samples_hpc: Option<f64>,
    pub samples_qpc: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
    pub failures: Vec<String>,
    pub slope_dfs: Option<f64>,
    pub slope_hpc: Option<f64>,
    pub slope_qpc: Option<f64>,
}

impl ScalingTable {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut s = String::from("n_side,n,samples_dfs,samples_hpc,samples_qpc\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{},{}", r.n_side, r.n, opt(r.samples_dfs), opt(r.samples_hpc), r.samples_qpc);
        }
        s
    }
}

/// Least-squares slope of `ln y` against `ln x`; `None` below two points.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Smallest `m` in `[1, max]` with `ok(m)`, by doubling then bisection.
/// `None` when doubling passes `max` without success.
pub fn smallest_passing(max: u64, mut ok: impl FnMut(u64) -> Result<bool>) -> Result<Option<u64>> {
    let mut hi = 1u64;
    while !ok(hi)? {
        if hi >= max {
            return Ok(None);
        }
        hi = (hi * 2).min(max);
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Relative L2 error of the amplitudes `sqrt(count / m)` against the
/// normalized magnitudes of the exact solution.
pub fn dfs_error(dist: &ReadoutDistribution, m: u64, seed: u64) -> Result<f64> {
    let h = sample_readout(dist, m, seed)?;
    let sq: f64 = h
        .frequencies()
        .iter()
        .zip(dist.probabilities())
        .map(|(f, p)| (f.sqrt() - p.sqrt()).powi(2))
        .sum();
    Ok(sq.sqrt())
}

/// Whether `m` shots of `candidate` reject the hypothesis that they follow
/// `reference` at level `p_value`. Degenerate tests do not count.
pub fn hpc_detects(
    candidate: &ReadoutDistribution,
    reference: &ReadoutDistribution,
    m: u64,
    seed: u64,
    p_value: f64,
    pooling: Pooling,
) -> Result<bool> {
    let h = sample_readout(candidate, m, seed)?;
    match chi_squared_test_pooled(&h, reference, pooling) {
        Ok(r) => Ok(r.p_value < p_value),
        Err(Error::DegenerateTest { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Full-solve TGV pressure solutions of the first step ending at or after
/// `base_time` and of the step `separation` later, with the first step's index.
pub fn tgv_solution_pair(
    cfg: &ExperimentConfig,
    n_side: usize,
    base_time: f64,
    separation: usize,
) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let spec = crate::cases::TgvSpec { n_side, ..cfg.tgv.clone() };
    let mut sys = tgv_init(&spec, cfg.sph_params())?;
    let mut corr = Corrector::new(PcConfig::new(PcMode::Fcs), cfg.solver)?;
    let solution = |c: &Corrector| c.last_known().map(<[f64]>::to_vec).unwrap_or_default();
    loop {
        isph_step(&mut sys, &mut corr)?;
        if sys.time >= base_time {
            break;
        }
    }
    let base_step = sys.step - 1;
    let first = solution(&corr);
    for _ in 0..separation {
        isph_step(&mut sys, &mut corr)?;
    }
    Ok((first, solution(&corr), base_step))
}

fn mean_over_seeds(
    seeds: usize,
    max: u64,
    mut search: impl FnMut(u64, u64) -> Result<bool>,
    master: u64,
) -> Result<Option<f64>> {
    let mut total = 0.0;
    for k in 0..seeds {
        let seed = derive_seed(master, k as u64);
        match smallest_passing(max, |m| search(m, seed))? {
            Some(m) => total += m as f64,
            None => return Ok(None),
        }
    }
    Ok(Some(total / seeds as f64))
}

/// Required samples per method over the configured TGV resolutions.
pub fn scaling_experiment(cfg: &ExperimentConfig) -> Result<ScalingTable> {
    cfg.validate()?;
    if cfg.case != CaseKind::Tgv {
        return Err(Error::Config(format!("the scaling study runs on tgv, not {}", cfg.case)));
    }
    let sc = &cfg.scaling;
    let qpc = required_samples(1.96, 0.5, 0.05)?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (i, &n_side) in sc.n_sides.iter().enumerate() {
        let (early, late, _) = tgv_solution_pair(cfg, n_side, sc.base_time, sc.separation)?;
        let reference = distribution_from_solution(&early)?;
        let candidate = distribution_from_solution(&late)?;
        let master = derive_seed(cfg.seed, i as u64);
        let dfs = mean_over_seeds(
            sc.seeds,
            sc.max_samples,
            |m, seed| Ok(dfs_error(&reference, m, seed)? <= sc.dfs_tolerance),
            master,
        )?;
        let hpc = mean_over_seeds(
            sc.seeds,
            sc.max_samples,
            |m, seed| hpc_detects(&candidate, &reference, m, seed, sc.p_value, cfg.pc.pooling),
            derive_seed(master, u64::MAX),
        )?;
        if dfs.is_none() {
            failures.push(format!("n_side {n_side}: dfs search passed {} samples", sc.max_samples));
        }
        if hpc.is_none() {
            failures.push(format!("n_side {n_side}: hpc search passed {} samples", sc.max_samples));
        }
        if dfs.is_some() || hpc.is_some() {
            rows.push(ScalingRow { n_side, n: early.len(), samples_dfs: dfs, samples_hpc: hpc, samples_qpc: qpc });
        }
    }
    let fit = |f: &dyn Fn(&ScalingRow) -> Option<f64>| {
        let pts: Vec<(f64, f64)> = rows.iter().filter_map(|r| f(r).map(|y| (r.n as f64, y))).collect();
        loglog_slope(&pts)
    };
    let slope_dfs = fit(&|r| r.samples_dfs);
    let slope_hpc = fit(&|r| r.samples_hpc);
    let slope_qpc = fit(&|r| Some(r.samples_qpc as f64));
    Ok(ScalingTable { rows, failures, slope_dfs, slope_hpc, slope_qpc })
}
