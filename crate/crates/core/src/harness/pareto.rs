use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::run::{error_metrics, reference_run, run_case, CaseRun};
use crate::error::{Error, Result};
use crate::pcore::{PcConfig, PcMode};
use crate::qemu::derive_seed;

/// Aggregate over the repetitions of one (sample size, threshold) pair. The
/// full-solve sentinel has both set to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoCell {
    pub sample_size: u64,
    pub p_value_threshold: f64,
    pub runs: usize,
    /// Means over the completed runs; NaN when every run failed.
    pub mean_skips: f64,
    pub mean_skip_fraction: f64,
    pub mean_error: f64,
    pub failures: usize,
    pub on_front: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoResult {
    /// Sentinel first, then sample sizes outer and thresholds inner.
    pub cells: Vec<ParetoCell>,
}

impl ParetoResult {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "sample_size,p_value_threshold,runs,mean_skips,mean_skip_fraction,mean_error,failures,on_front\n",
        );
        for c in &self.cells {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                c.sample_size,
                c.p_value_threshold,
                c.runs,
                c.mean_skips,
                c.mean_skip_fraction,
                c.mean_error,
                c.failures,
                u8::from(c.on_front)
            );
        }
        s
    }

    pub fn total_runs(&self) -> usize {
        self.cells.iter().skip(1).map(|c| c.runs).sum()
    }

    pub fn total_failures(&self) -> usize {
        self.cells.iter().skip(1).map(|c| c.failures).sum()
    }
}

/// Largest `*_vs_fcs` error of a run.
fn run_error(cfg: &ExperimentConfig, run: &CaseRun, reference: &CaseRun) -> Result<f64> {
    let e = error_metrics(cfg, run, Some(reference))?;
    Ok(e.iter().filter(|(k, _)| k.ends_with("_vs_fcs")).map(|(_, v)| *v).fold(0.0, f64::max))
}

struct Outcome {
    skips: usize,
    skip_fraction: f64,
    error: f64,
    failed: bool,
}

fn aggregate(sample_size: u64, p_value_threshold: f64, outcomes: &[Outcome]) -> ParetoCell {
    let ok: Vec<&Outcome> = outcomes.iter().filter(|o| !o.failed).collect();
    let mean = |f: &dyn Fn(&Outcome) -> f64| {
        if ok.is_empty() {
            f64::NAN
        } else {
            ok.iter().map(|o| f(o)).sum::<f64>() / ok.len() as f64
        }
    };
    ParetoCell {
        sample_size,
        p_value_threshold,
        runs: outcomes.len(),
        mean_skips: mean(&|o| o.skips as f64),
        mean_skip_fraction: mean(&|o| o.skip_fraction),
        mean_error: mean(&|o| o.error),
        failures: outcomes.len() - ok.len(),
        on_front: false,
    }
}

/// Mark cells not dominated in (more skips, less error).
pub fn mark_front(cells: &mut [ParetoCell]) {
    let pts: Vec<(f64, f64)> = cells.iter().map(|c| (c.mean_skips, c.mean_error)).collect();
    for (i, c) in cells.iter_mut().enumerate() {
        let (s, e) = pts[i];
        c.on_front = !s.is_nan()
            && !e.is_nan()
            && !pts.iter().any(|&(s2, e2)| s2 >= s && e2 <= e && (s2 > s || e2 < e));
    }
}

/// H-PC runs over the configured grid with `cfg.repetitions` seeds per pair.
/// Individual divergences are counted, not raised. Results do not depend on
/// the worker count.
pub fn pareto_sweep(cfg: &ExperimentConfig) -> Result<ParetoResult> {
    cfg.validate()?;
    let grid = &cfg.pareto;
    let reference = reference_run(cfg)?;
    if let Some((step, reason)) = &reference.failure {
        return Err(Error::Diverged { step: *step, reason: format!("full-solve reference failed: {reason}") });
    }
    let combos: Vec<(u64, f64)> = grid
        .sample_sizes
        .iter()
        .flat_map(|&n| grid.p_value_thresholds.iter().map(move |&t| (n, t)))
        .collect();
    let jobs: Vec<(usize, usize)> =
        (0..combos.len()).flat_map(|c| (0..cfg.repetitions).map(move |r| (c, r))).collect();
    let job = |&(c, r): &(usize, usize)| -> Result<Outcome> {
        let (n, t) = combos[c];
        let pc = PcConfig {
            mode: PcMode::Hpc,
            sample_count: n,
            p_value_threshold: t,
            seed: derive_seed(derive_seed(cfg.seed, c as u64), r as u64),
            ..cfg.pc.clone()
        };
        let run = run_case(cfg, &pc)?;
        Ok(Outcome {
            skips: run.ledger.skips(),
            skip_fraction: run.ledger.skip_fraction(),
            error: run_error(cfg, &run, &reference)?,
            failed: run.failure.is_some(),
        })
    };
    let outcomes: Vec<Outcome> = if grid.workers == 1 {
        jobs.iter().map(job).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(grid.workers)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
        pool.install(|| jobs.par_iter().map(job).collect::<Result<_>>())?
    };
    let mut cells = vec![ParetoCell {
        sample_size: 0,
        p_value_threshold: 0.0,
        runs: 1,
        mean_skips: 0.0,
        mean_skip_fraction: 0.0,
        mean_error: run_error(cfg, &reference, &reference)?,
        failures: 0,
        on_front: false,
    }];
    for (c, &(n, t)) in combos.iter().enumerate() {
        let block = &outcomes[c * cfg.repetitions..(c + 1) * cfg.repetitions];
        cells.push(aggregate(n, t, block));
    }
    mark_front(&mut cells);
    Ok(ParetoResult { cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::CaseKind;

    fn cell(s: f64, e: f64) -> ParetoCell {
        ParetoCell {
            sample_size: 1,
            p_value_threshold: 0.1,
            runs: 1,
            mean_skips: s,
            mean_skip_fraction: 0.0,
            mean_error: e,
            failures: 0,
            on_front: false,
        }
    }

    #[test]
    fn front_keeps_non_dominated() {
        let mut cells = vec![cell(0.0, 0.0), cell(5.0, 0.1), cell(4.0, 0.2), cell(8.0, 0.3), cell(f64::NAN, f64::NAN)];
        mark_front(&mut cells);
        let on: Vec<bool> = cells.iter().map(|c| c.on_front).collect();
        assert_eq!(on, [true, true, false, true, false]);
    }

    #[test]
    fn serial_and_parallel_agree() {
        let mut c = ExperimentConfig::new(CaseKind::Tgv);
        c.tgv.n_side = 8;
        c.t_end = Some(0.1);
        c.repetitions = 2;
        c.pareto.sample_sizes = vec![50, 385];
        c.pareto.p_value_thresholds = vec![0.01, 0.2];
        c.pareto.workers = 1;
        let serial = pareto_sweep(&c).unwrap();
        c.pareto.workers = 3;
        let parallel = pareto_sweep(&c).unwrap();
        assert_eq!(serial.to_csv(), parallel.to_csv());
        assert_eq!(serial.cells.len(), 5);
        assert_eq!(serial.total_runs(), 8);
        let fcs = &serial.cells[0];
        assert_eq!((fcs.sample_size, fcs.mean_skips, fcs.mean_error), (0, 0.0, 0.0));
    }
}
