//! Benchmark scenarios and error metrics.

mod dambreak;
mod metrics;
mod tgv;

pub use dambreak::{dambreak_init, leading_edge, DamBreakSpec};
pub use metrics::rms_rel_error;
pub use tgv::{tgv_init, tgv_umax_analytic, tgv_velocity, TgvSpec};
