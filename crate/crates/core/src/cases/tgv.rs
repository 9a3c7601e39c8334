use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isph::{Domain, ParticleKind, ParticleSystem, SphParams};

/// Periodic Taylor–Green vortex on `[0, L)^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TgvSpec {
    pub n_side: usize,
    pub length: f64,
    pub velocity: f64,
    pub reynolds: f64,
    pub rho0: f64,
}

impl Default for TgvSpec {
    fn default() -> Self {
        TgvSpec { n_side: 32, length: 1.0, velocity: 1.0, reynolds: 100.0, rho0: 1.0 }
    }
}

impl TgvSpec {
    pub fn with_side(n_side: usize) -> Self {
        TgvSpec { n_side, ..Default::default() }
    }

    pub fn nu(&self) -> f64 {
        self.velocity * self.length / self.reynolds
    }

    /// Time for the velocity amplitude to fall by `e`.
    pub fn e_folding_time(&self) -> f64 {
        self.length * self.length / (8.0 * PI * PI * self.nu())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_side < 4 || !(self.length > 0.0 && self.velocity > 0.0 && self.reynolds > 0.0 && self.rho0 > 0.0) {
            return Err(Error::Config(format!("invalid tgv spec {self:?}")));
        }
        Ok(())
    }
}

pub fn tgv_velocity(spec: &TgvSpec, p: [f64; 2]) -> [f64; 2] {
    let k = 2.0 * PI / spec.length;
    let u = spec.velocity;
    [u * (k * p[0]).sin() * (k * p[1]).cos(), -u * (k * p[0]).cos() * (k * p[1]).sin()]
}

pub fn tgv_init(spec: &TgvSpec, params: SphParams) -> Result<ParticleSystem> {
    spec.validate()?;
    let n = spec.n_side;
    let dx = spec.length / n as f64;
    let mut pos = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            pos.push([i as f64 * dx, j as f64 * dx]);
        }
    }
    let vel = pos.iter().map(|&p| tgv_velocity(spec, p)).collect();
    ParticleSystem::new(
        pos,
        vel,
        vec![ParticleKind::Fluid; n * n],
        dx,
        spec.rho0,
        spec.nu(),
        [0.0, 0.0],
        Domain::periodic_box([0.0, 0.0], [spec.length, spec.length]),
        params,
    )
}

pub fn tgv_umax_analytic(spec: &TgvSpec, t: f64) -> f64 {
    spec.velocity * (-8.0 * PI * PI * spec.nu() * t / (spec.length * spec.length)).exp()
}
