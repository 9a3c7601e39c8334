use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{CaseKind, ExperimentConfig};
use crate::cases::{dambreak_init, leading_edge, rms_rel_error, tgv_init, tgv_umax_analytic};
use crate::error::{Error, Result};
use crate::isph::{isph_step, ParticleSystem};
use crate::pcore::{Action, Corrector, PcConfig, PcMode, SkipLedger, SolveStats};
use crate::vlasov::{energies, init_two_stream, vlasov_step, FieldState, PhaseSpaceGrid};

/// Scalar outcome of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub case: CaseKind,
    pub mode: PcMode,
    pub async_staged: bool,
    pub seed: u64,
    pub t_end: f64,
    pub final_time: f64,
    pub total_steps: usize,
    pub update_count: usize,
    pub skip_count: usize,
    pub skip_fraction: f64,
    pub samples_spent: u64,
    pub classical_solves: usize,
    pub classical_iterations: usize,
    pub oracle_solves: usize,
    pub oracle_iterations: usize,
    /// Mean skip run over the first and last quarter of the updates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run_length_quartiles: Option<[f64; 2]>,
    /// Named rms errors, relative to the peak of the reference.
    pub errors: BTreeMap<String, f64>,
    pub wall_time_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_step: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_reason: Option<String>,
}

impl RunSummary {
    pub fn failed(&self) -> bool {
        self.failure_step.is_some()
    }

    /// `key,value` lines of every field except the wall time.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("key,value\n");
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k},{v}");
        };
        kv("case", self.case.to_string());
        kv("mode", self.mode.to_string());
        kv("async_staged", self.async_staged.to_string());
        kv("seed", self.seed.to_string());
        kv("t_end", self.t_end.to_string());
        kv("final_time", self.final_time.to_string());
        kv("total_steps", self.total_steps.to_string());
        kv("update_count", self.update_count.to_string());
        kv("skip_count", self.skip_count.to_string());
        kv("skip_fraction", self.skip_fraction.to_string());
        kv("samples_spent", self.samples_spent.to_string());
        kv("classical_solves", self.classical_solves.to_string());
        kv("classical_iterations", self.classical_iterations.to_string());
        kv("oracle_solves", self.oracle_solves.to_string());
        kv("oracle_iterations", self.oracle_iterations.to_string());
        if let Some([a, b]) = self.run_length_quartiles {
            kv("run_length_first_quartile", a.to_string());
            kv("run_length_last_quartile", b.to_string());
        }
        for (k, v) in &self.errors {
            kv(&format!("error_{k}"), v.to_string());
        }
        kv("failure_step", self.failure_step.map(|s| s.to_string()).unwrap_or_default());
        kv("failure_reason", self.failure_reason.as_deref().map(csv_text).unwrap_or_default());
        s
    }
}

fn csv_text(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Per-step diagnostics with named columns; the first row is the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    fn new(columns: &[&'static str]) -> Self {
        Series { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// `(x, y)` pairs of two columns.
    pub fn pairs(&self, x: &str, y: &str) -> Option<Vec<(f64, f64)>> {
        Some(self.column(x)?.into_iter().zip(self.column(y)?).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|v| v.to_string()).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }
}

/// Everything one case run produces, before comparison with a reference.
#[derive(Debug, Clone)]
pub struct CaseRun {
    pub series: Series,
    pub ledger: SkipLedger,
    pub stats: SolveStats,
    pub final_time: f64,
    /// `(step, csv)` snapshots.
    pub snapshots: Vec<(usize, String)>,
    pub failure: Option<(usize, String)>,
    pub wall_time_s: f64,
}

/// A finished run: summary, artifacts and the config that produced it.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub summary: RunSummary,
    pub run: CaseRun,
}

/// Run `cfg.case` under `pc` without any reference comparison. Divergence is
/// reported in the result; only setup errors are returned as `Err`.
pub fn run_case(cfg: &ExperimentConfig, pc: &PcConfig) -> Result<CaseRun> {
    cfg.validate()?;
    let corrector = Corrector::new(pc.clone(), cfg.solver)?;
    let start = Instant::now();
    let mut run = match cfg.case {
        CaseKind::Tgv => {
            let sys = tgv_init(&cfg.tgv, cfg.sph_params())?;
            run_isph(cfg, sys, corrector)?
        }
        CaseKind::Dambreak => {
            let sys = dambreak_init(&cfg.dambreak, cfg.sph_params())?;
            run_isph(cfg, sys, corrector)?
        }
        CaseKind::TwoStream => run_vlasov(cfg, corrector)?,
    };
    run.wall_time_s = start.elapsed().as_secs_f64();
    Ok(run)
}

fn isph_columns(case: CaseKind) -> &'static [&'static str] {
    match case {
        CaseKind::Dambreak => &["t", "t_star", "leading_edge", "max_speed", "updated"],
        _ => &["t", "u_max", "u_max_analytic", "updated"],
    }
}

fn isph_row(cfg: &ExperimentConfig, sys: &ParticleSystem, updated: f64) -> Result<Vec<f64>> {
    Ok(match cfg.case {
        CaseKind::Dambreak => {
            let d = &cfg.dambreak;
            vec![sys.time, d.nondim_time(sys.time), leading_edge(sys)? / d.width, sys.max_speed(), updated]
        }
        _ => vec![sys.time, sys.max_speed(), tgv_umax_analytic(&cfg.tgv, sys.time), updated],
    })
}

fn run_isph(cfg: &ExperimentConfig, mut sys: ParticleSystem, mut corrector: Corrector) -> Result<CaseRun> {
    let t_end = cfg.effective_t_end();
    let mut series = Series::new(isph_columns(cfg.case));
    series.rows.push(isph_row(cfg, &sys, 1.0)?);
    let mut snapshots = Vec::new();
    let mut failure = None;
    loop {
        if cfg.snapshot_stride > 0 && sys.step.is_multiple_of(cfg.snapshot_stride) {
            snapshots.push((sys.step, sys.snapshot_csv()));
        }
        if sys.time >= t_end * (1.0 - 1e-12) {
            break;
        }
        match isph_step(&mut sys, &mut corrector) {
            Ok(r) => series.rows.push(isph_row(cfg, &sys, f64::from(r.action == Action::Update))?),
            Err(Error::Diverged { step, reason }) => {
                failure = Some((step, reason));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(CaseRun {
        series,
        ledger: corrector.ledger().clone(),
        stats: corrector.stats(),
        final_time: sys.time,
        snapshots,
        failure,
        wall_time_s: 0.0,
    })
}

fn phase_space_csv(g: &PhaseSpaceGrid) -> String {
    let mut s = String::from("ix,iv,x,v,f\n");
    for ix in 0..g.nx {
        for iv in 0..g.nv {
            let _ = writeln!(s, "{ix},{iv},{},{},{}", g.x(ix), g.v(iv), g.f[ix * g.nv + iv]);
        }
    }
    s
}

fn run_vlasov(cfg: &ExperimentConfig, mut corrector: Corrector) -> Result<CaseRun> {
    let spec = &cfg.two_stream;
    let mut grid = init_two_stream(spec)?;
    let mut field = FieldState::solve(&grid, &cfg.solver)?;
    let steps = (cfg.effective_t_end() / spec.dt).round() as usize;
    let mut series = Series::new(&["t", "u_k", "u_e", "updated"]);
    let (uk, ue) = energies(&grid, &field.e_field);
    series.rows.push(vec![0.0, uk, ue, 1.0]);
    let mut snapshots = Vec::new();
    let mut failure = None;
    let mut time = 0.0;
    for n in 0..=steps {
        if cfg.snapshot_stride > 0 && n % cfg.snapshot_stride == 0 {
            snapshots.push((n, phase_space_csv(&grid)));
        }
        if n == steps {
            break;
        }
        match vlasov_step(&mut grid, &mut field, n, spec.dt, &mut corrector) {
            Ok(action) => {
                time = (n + 1) as f64 * spec.dt;
                let (uk, ue) = energies(&grid, &field.e_field);
                series.rows.push(vec![time, uk, ue, f64::from(action == Action::Update)]);
            }
            Err(Error::Diverged { step, reason }) => {
                failure = Some((step, reason));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(CaseRun {
        series,
        ledger: corrector.ledger().clone(),
        stats: corrector.stats(),
        final_time: time,
        snapshots,
        failure,
        wall_time_s: 0.0,
    })
}

/// The corrector settings of repetition `rep`.
pub fn run_pc_config(cfg: &ExperimentConfig, rep: usize) -> PcConfig {
    PcConfig { seed: cfg.run_seed(rep), ..cfg.pc.clone() }
}

/// Full-solve run of the same case, the reference for error metrics.
pub fn reference_run(cfg: &ExperimentConfig) -> Result<CaseRun> {
    run_case(cfg, &PcConfig::new(PcMode::Fcs))
}

/// Errors of `run` against the analytic solution (TGV) and, when given, the
/// full-solve reference.
pub fn error_metrics(cfg: &ExperimentConfig, run: &CaseRun, reference: Option<&CaseRun>) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    let mut add = |name: &str, x: &str, y: &str, against: &Series| -> Result<()> {
        let (Some(a), Some(b)) = (run.series.pairs(x, y), against.pairs(x, y)) else {
            return Ok(());
        };
        if a.len() > 1 {
            let e = rms_rel_error(&a[1..], &b)?;
            if e.is_finite() {
                out.insert(name.to_string(), e);
            }
        }
        Ok(())
    };
    match cfg.case {
        CaseKind::Tgv => {
            let analytic = Series {
                columns: vec!["t", "u_max"],
                rows: run.series.rows.iter().map(|r| vec![r[0], r[2]]).collect(),
            };
            add("u_max_vs_analytic", "t", "u_max", &analytic)?;
            if let Some(r) = reference {
                add("u_max_vs_fcs", "t", "u_max", &r.series)?;
            }
        }
        CaseKind::Dambreak => {
            if let Some(r) = reference {
                add("leading_edge_vs_fcs", "t_star", "leading_edge", &r.series)?;
            }
        }
        CaseKind::TwoStream => {
            if let Some(r) = reference {
                add("u_k_vs_fcs", "t", "u_k", &r.series)?;
                add("u_e_vs_fcs", "t", "u_e", &r.series)?;
            }
        }
    }
    Ok(out)
}

/// Mean skip run over the first and last quarter of the updates, when there
/// are at least four.
pub fn run_length_quartiles(ledger: &SkipLedger) -> Option<[f64; 2]> {
    let runs = ledger.run_lengths().runs;
    let q = runs.len() / 4;
    if q == 0 {
        return None;
    }
    let mean = |s: &[usize]| s.iter().sum::<usize>() as f64 / s.len() as f64;
    Some([mean(&runs[..q]), mean(&runs[runs.len() - q..])])
}

pub fn summarize(
    cfg: &ExperimentConfig,
    pc: &PcConfig,
    run: &CaseRun,
    reference: Option<&CaseRun>,
) -> Result<RunSummary> {
    let l = &run.ledger;
    Ok(RunSummary {
        case: cfg.case,
        mode: pc.mode,
        async_staged: pc.async_staged,
        seed: pc.seed,
        t_end: cfg.effective_t_end(),
        final_time: run.final_time,
        total_steps: l.total_steps(),
        update_count: l.updates(),
        skip_count: l.skips(),
        skip_fraction: l.skip_fraction(),
        samples_spent: l.samples_spent(),
        classical_solves: run.stats.classical_solves,
        classical_iterations: run.stats.classical_iterations,
        oracle_solves: run.stats.oracle_solves,
        oracle_iterations: run.stats.oracle_iterations,
        run_length_quartiles: run_length_quartiles(l),
        errors: error_metrics(cfg, run, reference)?,
        wall_time_s: run.wall_time_s,
        failure_step: run.failure.as_ref().map(|f| f.0),
        failure_reason: run.failure.as_ref().map(|f| f.1.clone()),
    })
}

/// Repetition `rep` of the configured experiment. A full-solve reference is
/// run (or `reference` reused) when `cfg.reference` is set and the policy is
/// not already the full solve.
pub fn run_simulation_with(cfg: &ExperimentConfig, rep: usize, reference: Option<&CaseRun>) -> Result<RunOutput> {
    cfg.validate()?;
    let pc = run_pc_config(cfg, rep);
    let run = run_case(cfg, &pc)?;
    let owned;
    let reference = match reference {
        Some(r) => Some(r),
        None if cfg.reference && pc.mode != PcMode::Fcs => {
            owned = reference_run(cfg)?;
            Some(&owned)
        }
        None => None,
    };
    let summary = summarize(cfg, &pc, &run, reference)?;
    let mut config = cfg.clone();
    config.pc.seed = pc.seed;
    Ok(RunOutput { config, summary, run })
}

pub fn run_simulation(cfg: &ExperimentConfig) -> Result<RunOutput> {
    run_simulation_with(cfg, 0, None)
}
