//! Predictor-corrector policies and skip bookkeeping.

mod chisq;
mod config;
mod corrector;
mod decide;
mod gamma;
mod ledger;

pub use chisq::{chi_squared_test, chi_squared_test_pooled, ChiSquaredResult, Pooling, MIN_EXPECTED};
pub use config::{PcConfig, PcMode};
pub use corrector::{Corrector, SolveStats, StagedQueue};
pub use decide::{baseline_decide, hpc_decide, periodic_update, qpc_decide};
pub use gamma::{ln_gamma, regularized_gamma_q};
pub use ledger::{ledger_run_lengths, Action, PcDecision, RunLengths, SkipLedger};
