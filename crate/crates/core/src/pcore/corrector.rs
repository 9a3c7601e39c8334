use serde::{Deserialize, Serialize};

use super::config::{PcConfig, PcMode};
use super::decide::{baseline_decide, hpc_decide, qpc_decide};
use super::ledger::{Action, PcDecision, SkipLedger};
use crate::error::Result;
use crate::linsys::{CgSettings, Lsp};
use crate::qemu::{stream_rng, SimRng};

/// One-step-delayed wrapper: the action emitted at step `n` was decided at
/// step `n - 1` from that step's candidate and the solution known then.
#[derive(Debug, Clone, Default)]
pub struct StagedQueue {
    pending: Option<(Option<Vec<f64>>, Lsp)>,
    inner_calls: usize,
}

impl StagedQueue {
    pub fn new() -> Self {
        Self::default()
    }

    /// Decision for `step`, computed by `inner` on the queued state.
    /// With nothing queued (step 0) the result is a forced update.
    pub fn take<F>(&mut self, step: usize, inner: F) -> Result<PcDecision>
    where
        F: FnOnce(Option<&[f64]>, &Lsp) -> Result<PcDecision>,
    {
        match self.pending.take() {
            None => Ok(PcDecision::update(step)),
            Some((last_known, lsp)) => {
                self.inner_calls += 1;
                let d = inner(last_known.as_deref(), &lsp)?;
                Ok(PcDecision { step_index: step, ..d })
            }
        }
    }

    pub fn push(&mut self, last_known: Option<Vec<f64>>, candidate: Lsp) {
        self.pending = Some((last_known, candidate));
    }

    pub fn inner_calls(&self) -> usize {
        self.inner_calls
    }
}

/// Work counters, split between classical solves the simulation consumes and
/// hidden-oracle solves made only to emulate readout.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub classical_solves: usize,
    pub classical_iterations: usize,
    pub oracle_solves: usize,
    pub oracle_iterations: usize,
}

/// Per-simulation predictor-corrector: owns the policy, its rng stream, the
/// last known solution and the ledger.
#[derive(Debug, Clone)]
pub struct Corrector {
    cfg: PcConfig,
    solver: CgSettings,
    rng: SimRng,
    ledger: SkipLedger,
    last_known: Option<Vec<f64>>,
    staged: Option<StagedQueue>,
    stats: SolveStats,
    warm_start: bool,
}

impl Corrector {
    pub fn new(cfg: PcConfig, solver: CgSettings) -> Result<Self> {
        cfg.validate()?;
        let rng = stream_rng(cfg.seed, 0);
        let staged = cfg.async_staged.then(StagedQueue::new);
        Ok(Corrector {
            cfg,
            solver,
            rng,
            ledger: SkipLedger::new(),
            last_known: None,
            staged,
            stats: SolveStats::default(),
            warm_start: true,
        })
    }

    /// Start CG from the last known solution (default on).
    pub fn with_warm_start(mut self, on: bool) -> Self {
        self.warm_start = on;
        self
    }

    pub fn config(&self) -> &PcConfig {
        &self.cfg
    }

    pub fn ledger(&self) -> &SkipLedger {
        &self.ledger
    }

    pub fn stats(&self) -> SolveStats {
        self.stats
    }

    pub fn last_known(&self) -> Option<&[f64]> {
        self.last_known.as_deref()
    }

    pub fn inner_calls(&self) -> Option<usize> {
        self.staged.as_ref().map(StagedQueue::inner_calls)
    }

    /// Decide for this step's system. Returns the fresh solution on update and
    /// `None` on skip, in which case the caller keeps its previous values.
    pub fn advance(&mut self, step: usize, lsp: Lsp) -> Result<Option<Vec<f64>>> {
        let lsp = match (&self.last_known, self.warm_start) {
            (Some(x0), true) if x0.len() == lsp.dim() => lsp.with_initial_guess(x0.clone()),
            _ => lsp,
        };
        let snapshot = self.last_known.clone();
        let decision = match self.staged.take() {
            Some(mut queue) => {
                let d = queue.take(step, |lk, cand| self.inner_decide(step, lk, cand));
                self.staged = Some(queue);
                d?
            }
            None => {
                let lk = self.last_known.take();
                let d = self.inner_decide(step, lk.as_deref(), &lsp);
                self.last_known = lk;
                d?
            }
        };
        let out = match decision.action {
            Action::Update => {
                let sol = lsp.solve(&self.solver)?;
                self.stats.classical_solves += 1;
                self.stats.classical_iterations += sol.iterations;
                let x = sol.x.clone();
                self.last_known = Some(x.clone());
                Some(x)
            }
            Action::Skip => None,
        };
        if let Some(q) = self.staged.as_mut() {
            q.push(snapshot, lsp);
        }
        self.ledger.record(decision);
        Ok(out)
    }

    fn inner_decide(&mut self, step: usize, last_known: Option<&[f64]>, candidate: &Lsp) -> Result<PcDecision> {
        match self.cfg.mode {
            PcMode::Hpc | PcMode::Qpc => {
                // nothing known yet reads as the zero state
                let zeros;
                let lk = match last_known {
                    Some(lk) => lk,
                    None => {
                        zeros = vec![0.0; candidate.dim()];
                        &zeros
                    }
                };
                let fresh = candidate.cached_solution().is_none();
                let d = if self.cfg.mode == PcMode::Hpc {
                    hpc_decide(step, lk, candidate, &self.cfg, &self.solver, &mut self.rng)?
                } else {
                    qpc_decide(step, lk, candidate, &self.cfg, &self.solver, &mut self.rng)?
                };
                if fresh {
                    self.stats.oracle_solves += 1;
                    self.stats.oracle_iterations += candidate.cached_solution().map_or(0, |s| s.iterations);
                }
                Ok(d)
            }
            _ if last_known.is_none() => Ok(PcDecision::update(step)),
            mode => baseline_decide(mode, step, &self.cfg, &mut self.rng),
        }
    }
}
