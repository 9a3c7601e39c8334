use serde::{Deserialize, Serialize};

use super::chisq::Pooling;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PcMode {
    Fcs,
    Hpc,
    Qpc,
    RandomSkip,
    PeriodicSkip,
}

impl PcMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PcMode::Fcs => "fcs",
            PcMode::Hpc => "hpc",
            PcMode::Qpc => "qpc",
            PcMode::RandomSkip => "random_skip",
            PcMode::PeriodicSkip => "periodic_skip",
        }
    }

    pub fn is_baseline(self) -> bool {
        matches!(self, PcMode::Fcs | PcMode::RandomSkip | PcMode::PeriodicSkip)
    }
}

impl std::fmt::Display for PcMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PcMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fcs" => PcMode::Fcs,
            "hpc" => PcMode::Hpc,
            "qpc" => PcMode::Qpc,
            "random_skip" => PcMode::RandomSkip,
            "periodic_skip" => PcMode::PeriodicSkip,
            other => return Err(Error::Config(format!("unknown policy '{other}'"))),
        })
    }
}

/// Predictor-corrector settings. Fields not used by `mode` may be left at
/// their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PcConfig {
    pub mode: PcMode,
    pub async_staged: bool,
    /// Histogram size for H-PC, ancilla shots for Q-PC.
    pub sample_count: u64,
    pub p_value_threshold: f64,
    /// Critical overlap `c`; Q-PC skips when the estimated `P(0) >= (1 + c) / 2`.
    pub overlap_threshold: f64,
    pub skip_rate: f64,
    pub seed: u64,
    pub pooling: Pooling,
}

impl Default for PcConfig {
    fn default() -> Self {
        PcConfig {
            mode: PcMode::Fcs,
            async_staged: false,
            sample_count: 385,
            p_value_threshold: 0.05,
            overlap_threshold: 0.98,
            skip_rate: 0.0,
            seed: 0,
            pooling: Pooling::default(),
        }
    }
}

impl PcConfig {
    pub fn new(mode: PcMode) -> Self {
        PcConfig { mode, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            PcMode::Hpc => {
                if self.sample_count == 0 {
                    return Err(Error::Config("hpc needs sample_count >= 1".into()));
                }
                if !(self.p_value_threshold > 0.0 && self.p_value_threshold < 1.0) {
                    return Err(Error::Config(format!("p_value_threshold must lie in (0,1), got {}", self.p_value_threshold)));
                }
            }
            PcMode::Qpc => {
                if self.sample_count == 0 {
                    return Err(Error::Config("qpc needs sample_count >= 1".into()));
                }
                if !(self.overlap_threshold > 0.0 && self.overlap_threshold <= 1.0) {
                    return Err(Error::Config(format!("overlap_threshold must lie in (0,1], got {}", self.overlap_threshold)));
                }
            }
            PcMode::RandomSkip | PcMode::PeriodicSkip => {
                if !(0.0..1.0).contains(&self.skip_rate) {
                    return Err(Error::Config(format!("skip_rate must lie in [0,1), got {}", self.skip_rate)));
                }
            }
            PcMode::Fcs => {}
        }
        Ok(())
    }

    /// Ancilla cutoff on the estimated `P(0)`.
    pub fn p0_cutoff(&self) -> f64 {
        0.5 + 0.5 * self.overlap_threshold
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_round_trip() {
        for m in [PcMode::Fcs, PcMode::Hpc, PcMode::Qpc, PcMode::RandomSkip, PcMode::PeriodicSkip] {
            assert_eq!(m.as_str().parse::<PcMode>().unwrap(), m);
        }
        assert!("bogus".parse::<PcMode>().is_err());
    }

    #[test]
    fn validation_is_mode_specific() {
        let mut c = PcConfig::new(PcMode::Hpc);
        c.p_value_threshold = 1.5;
        assert!(c.validate().is_err());
        c.mode = PcMode::Qpc;
        assert!(c.validate().is_ok());
        c.overlap_threshold = 0.0;
        assert!(c.validate().is_err());
        c.mode = PcMode::PeriodicSkip;
        c.skip_rate = 1.0;
        assert!(c.validate().is_err());
        c.skip_rate = 0.84;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(toml::from_str::<PcConfig>("mode = \"qpc\"\nsample_count = 10").is_ok());
        assert!(toml::from_str::<PcConfig>("mode = \"qpc\"\nsamples = 10").is_err());
    }
}
