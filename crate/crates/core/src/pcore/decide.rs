use rand::{Rng, RngCore};

use super::chisq::chi_squared_test_pooled;
use super::config::{PcConfig, PcMode};
use super::ledger::{Action, PcDecision};
use crate::error::{Error, Result};
use crate::linsys::{CgSettings, Lsp};
use crate::qemu::{distribution_from_solution, sample_ancilla, sample_readout, swap_test_probability, SimRng};

fn is_zero(x: &[f64]) -> bool {
    x.iter().all(|&v| v == 0.0)
}

/// Both states zero: skip. Exactly one zero: update.
fn zero_state_rule(step: usize, last_known: &[f64], candidate: &[f64]) -> Option<PcDecision> {
    match (is_zero(last_known), is_zero(candidate)) {
        (true, true) => Some(PcDecision::skip(step)),
        (false, false) => None,
        _ => Some(PcDecision::update(step)),
    }
}

/// Hybrid decider: chi-squared test of candidate readout samples against the
/// last known solution's distribution.
pub fn hpc_decide(
    step: usize,
    last_known: &[f64],
    candidate: &Lsp,
    cfg: &PcConfig,
    solver: &CgSettings,
    rng: &mut SimRng,
) -> Result<PcDecision> {
    let x = &candidate.solve(solver)?.x;
    if let Some(d) = zero_state_rule(step, last_known, x) {
        return Ok(d);
    }
    let n = cfg.sample_count;
    let hist = sample_readout(&distribution_from_solution(x)?, n, rng.next_u64())?;
    let reference = distribution_from_solution(last_known)?;
    let spent = PcDecision { samples_spent: n, ..PcDecision::update(step) };
    match chi_squared_test_pooled(&hist, &reference, cfg.pooling) {
        Ok(r) => {
            let action = if r.p_value >= cfg.p_value_threshold { Action::Skip } else { Action::Update };
            Ok(PcDecision { action, p_value: Some(r.p_value), ..spent })
        }
        Err(Error::DegenerateTest { .. }) => Ok(spent),
        Err(e) => Err(e),
    }
}

/// Quantum decider: swap test between the last known solution and the
/// candidate, estimated from ancilla shots.
pub fn qpc_decide(
    step: usize,
    last_known: &[f64],
    candidate: &Lsp,
    cfg: &PcConfig,
    solver: &CgSettings,
    rng: &mut SimRng,
) -> Result<PcDecision> {
    let x = &candidate.solve(solver)?.x;
    if let Some(d) = zero_state_rule(step, last_known, x) {
        return Ok(d);
    }
    let n = cfg.sample_count;
    let est = sample_ancilla(swap_test_probability(last_known, x)?, n, rng.next_u64())?;
    let p0 = est.estimate_p0.unwrap_or(0.0);
    let action = if p0 >= cfg.p0_cutoff() { Action::Skip } else { Action::Update };
    Ok(PcDecision { action, p_value: None, p0_estimate: Some(p0), samples_spent: n, step_index: step })
}

/// Whether step `n` of the evenly spread pattern with update fraction
/// `1 - skip_rate` is an update. Over `T` steps from zero this gives exactly
/// `ceil((1 - skip_rate) T)` updates.
pub fn periodic_update(n: usize, skip_rate: f64) -> bool {
    let u = 1.0 - skip_rate;
    let c = |k: usize| (k as f64 * u - 1e-9).ceil();
    c(n + 1) > c(n)
}

pub fn baseline_decide(mode: PcMode, step: usize, cfg: &PcConfig, rng: &mut SimRng) -> Result<PcDecision> {
    let skip = match mode {
        PcMode::Fcs => false,
        PcMode::RandomSkip => cfg.skip_rate > 0.0 && rng.random::<f64>() < cfg.skip_rate,
        PcMode::PeriodicSkip => !periodic_update(step, cfg.skip_rate),
        PcMode::Hpc | PcMode::Qpc => {
            return Err(Error::Invalid(format!("{mode} is not a baseline policy")));
        }
    };
    Ok(if skip { PcDecision::skip(step) } else { PcDecision::update(step) })
}
