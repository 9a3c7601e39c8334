use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cases::{DamBreakSpec, TgvSpec};
use crate::error::{Error, Result};
use crate::isph::SphParams;
use crate::linsys::CgSettings;
use crate::pcore::PcConfig;
use crate::vlasov::TwoStreamSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    Tgv,
    Dambreak,
    TwoStream,
}

impl CaseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseKind::Tgv => "tgv",
            CaseKind::Dambreak => "dambreak",
            CaseKind::TwoStream => "two_stream",
        }
    }
}

impl std::fmt::Display for CaseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Settings of the sample-scaling study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingConfig {
    pub n_sides: Vec<usize>,
    /// Seeds averaged per resolution.
    pub seeds: usize,
    /// Relative L2 error the sampled reconstruction must reach.
    pub dfs_tolerance: f64,
    /// Steps between the two solutions H-PC has to tell apart.
    pub separation: usize,
    /// Simulated time of the earlier solution, so every resolution is
    /// compared at the same stage of the flow.
    pub base_time: f64,
    pub p_value: f64,
    /// Searches that pass this many samples give up.
    pub max_samples: u64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            n_sides: vec![8, 12, 16, 24, 32],
            seeds: 10,
            dfs_tolerance: 0.05,
            separation: 10,
            base_time: 0.3,
            p_value: 0.05,
            max_samples: 1 << 26,
        }
    }
}

/// Grid of the H-PC parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParetoConfig {
    pub sample_sizes: Vec<u64>,
    pub p_value_thresholds: Vec<f64>,
    /// Worker threads; 0 uses every available core, 1 runs serially.
    pub workers: usize,
}

impl Default for ParetoConfig {
    fn default() -> Self {
        ParetoConfig {
            sample_sizes: vec![100, 385, 1000],
            p_value_thresholds: vec![0.01, 0.05, 0.2],
            workers: 0,
        }
    }
}

/// One experiment as read from a TOML file. Sections that do not apply to
/// `case` are ignored; `sph` falls back to the case's own defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub case: CaseKind,
    /// Master seed; repetition `r` runs with `derive_seed(seed, r)`.
    #[serde(default)]
    pub seed: u64,
    /// Simulated time. Defaults: two velocity e-folds for tgv, `T* = 6` for
    /// dambreak, 50 for two_stream.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Steps between snapshots; 0 writes none.
    #[serde(default)]
    pub snapshot_stride: usize,
    #[serde(default = "one")]
    pub repetitions: usize,
    /// Also run the full-solve reference and report errors against it.
    #[serde(default = "yes")]
    pub reference: bool,
    #[serde(default)]
    pub pc: PcConfig,
    #[serde(default)]
    pub solver: CgSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sph: Option<SphParams>,
    #[serde(default)]
    pub tgv: TgvSpec,
    #[serde(default)]
    pub dambreak: DamBreakSpec,
    #[serde(default)]
    pub two_stream: TwoStreamSpec,
    #[serde(default)]
    pub scaling: ScalingConfig,
    #[serde(default)]
    pub pareto: ParetoConfig,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

impl ExperimentConfig {
    pub fn new(case: CaseKind) -> Self {
        ExperimentConfig {
            case,
            seed: 0,
            t_end: None,
            output_dir: default_output_dir(),
            snapshot_stride: 0,
            repetitions: 1,
            reference: true,
            pc: PcConfig::default(),
            solver: CgSettings::default(),
            sph: None,
            tgv: TgvSpec::default(),
            dambreak: DamBreakSpec::default(),
            two_stream: TwoStreamSpec::default(),
            scaling: ScalingConfig::default(),
            pareto: ParetoConfig::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.pc.validate()?;
        if !(self.solver.tol > 0.0) {
            return Err(Error::Config(format!("solver.tol must be positive, got {}", self.solver.tol)));
        }
        if let Some(t) = self.t_end {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("t_end must be positive, got {t}")));
            }
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        match self.case {
            CaseKind::Tgv => self.tgv.validate()?,
            CaseKind::Dambreak => self.dambreak.validate()?,
            CaseKind::TwoStream => {
                self.two_stream.validate()?;
                if self.sph.is_some() {
                    return Err(Error::Config("[sph] does not apply to two_stream".into()));
                }
            }
        }
        if let Some(p) = &self.sph {
            if !(p.cfl > 0.0 && p.cfl_gravity > 0.0 && p.cfl_viscous > 0.0 && p.blow_up_factor > 0.0) {
                return Err(Error::Config(format!("invalid [sph] settings {p:?}")));
            }
            if p.dt_max.is_some_and(|d| !(d > 0.0)) {
                return Err(Error::Config("sph.dt_max must be positive".into()));
            }
        }
        let s = &self.scaling;
        if s.n_sides.iter().any(|&n| n < 4) || s.seeds == 0 || !(s.dfs_tolerance > 0.0) || s.separation == 0 || !(s.base_time >= 0.0) {
            return Err(Error::Config(format!("invalid [scaling] settings {s:?}")));
        }
        if !(s.p_value > 0.0 && s.p_value < 1.0) || s.max_samples < 2 {
            return Err(Error::Config(format!("invalid [scaling] settings {s:?}")));
        }
        let p = &self.pareto;
        if p.sample_sizes.contains(&0) || p.p_value_thresholds.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
            return Err(Error::Config(format!("invalid [pareto] grid {p:?}")));
        }
        Ok(())
    }

    /// SPH tunables in effect for this case.
    pub fn sph_params(&self) -> SphParams {
        self.sph.clone().unwrap_or_else(|| match self.case {
            CaseKind::Dambreak => dambreak_sph_defaults(),
            _ => SphParams::default(),
        })
    }

    pub fn effective_t_end(&self) -> f64 {
        self.t_end.unwrap_or_else(|| match self.case {
            CaseKind::Tgv => 2.0 * self.tgv.e_folding_time(),
            CaseKind::Dambreak => 6.0 / (2.0 * self.dambreak.gravity / self.dambreak.width).sqrt(),
            CaseKind::TwoStream => 50.0,
        })
    }

    /// Seed of repetition `rep`.
    pub fn run_seed(&self, rep: usize) -> u64 {
        crate::qemu::derive_seed(self.seed, rep as u64)
    }
}

/// Free-surface detection, shifting and gradient renormalization on.
pub fn dambreak_sph_defaults() -> SphParams {
    SphParams { free_surface_threshold: 0.85, kernel_correction: true, shifting: true, ..SphParams::default() }
}
