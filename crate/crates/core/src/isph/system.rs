use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use super::neighbors::Domain;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParticleKind {
    Fluid,
    Boundary,
}

impl ParticleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ParticleKind::Fluid => "fluid",
            ParticleKind::Boundary => "boundary",
        }
    }
}

/// Tunables of the projection scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SphParams {
    /// Coefficient on the advective limit `h / u_max`.
    pub cfl: f64,
    /// Coefficient on the gravity limit `sqrt(h / |g|)`.
    pub cfl_gravity: f64,
    /// Coefficient on the viscous limit `h^2 / nu`.
    pub cfl_viscous: f64,
    /// Upper bound on the step; needed when no other limit applies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt_max: Option<f64>,
    /// `eta^2 = eta_factor^2 * h^2` in the Morris denominators.
    pub eta_factor: f64,
    /// Fluid particles whose concentration falls below this are free-surface
    /// (Dirichlet `P = 0`) rows. Zero disables surface detection.
    pub free_surface_threshold: f64,
    /// Renormalize kernel gradients in the divergence and pressure gradient.
    pub kernel_correction: bool,
    pub shifting: bool,
    pub shifting_coefficient: f64,
    pub blow_up_factor: f64,
}

impl Default for SphParams {
    fn default() -> Self {
        SphParams {
            cfl: 0.25,
            cfl_gravity: 0.25,
            cfl_viscous: 0.125,
            dt_max: None,
            eta_factor: 0.1,
            free_surface_threshold: 0.0,
            kernel_correction: false,
            shifting: false,
            shifting_coefficient: 0.5,
            blow_up_factor: 50.0,
        }
    }
}

/// SPH particle state plus fluid parameters. All particles share one volume
/// `dx^2`, so `mass = rho0 * dx^2`.
#[derive(Debug, Clone)]
pub struct ParticleSystem {
    pub positions: Vec<[f64; 2]>,
    pub velocities: Vec<[f64; 2]>,
    pub pressures: Vec<f64>,
    pub kinds: Vec<ParticleKind>,
    pub dx: f64,
    pub mass: f64,
    pub rho0: f64,
    pub nu: f64,
    pub gravity: [f64; 2],
    pub dt: f64,
    pub eta2: f64,
    pub kernel: KernelSpec,
    pub domain: Domain,
    pub params: SphParams,
    /// Speed scale for the blow-up detector.
    pub reference_speed: f64,
    /// Outward wall normal per boundary particle (zero for fluid).
    pub wall_normals: Vec<[f64; 2]>,
    pub time: f64,
    pub step: usize,
}

impl ParticleSystem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        positions: Vec<[f64; 2]>,
        velocities: Vec<[f64; 2]>,
        kinds: Vec<ParticleKind>,
        dx: f64,
        rho0: f64,
        nu: f64,
        gravity: [f64; 2],
        domain: Domain,
        params: SphParams,
    ) -> Result<Self> {
        let n = positions.len();
        if velocities.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: velocities.len() });
        }
        if kinds.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: kinds.len() });
        }
        if !(dx > 0.0 && rho0 > 0.0 && nu >= 0.0) {
            return Err(Error::Invalid(format!("need dx > 0, rho0 > 0, nu >= 0 (dx={dx}, rho0={rho0}, nu={nu})")));
        }
        let kernel = KernelSpec::from_spacing(dx);
        let mut velocities = velocities;
        for (v, k) in velocities.iter_mut().zip(&kinds) {
            if *k == ParticleKind::Boundary {
                *v = [0.0, 0.0];
            }
        }
        let mut sys = ParticleSystem {
            positions: positions.into_iter().map(|p| domain.wrap(p)).collect(),
            velocities,
            pressures: vec![0.0; n],
            kinds,
            dx,
            mass: rho0 * dx * dx,
            rho0,
            nu,
            gravity,
            dt: 0.0,
            eta2: (params.eta_factor * kernel.h).powi(2),
            kernel,
            domain,
            params,
            reference_speed: 0.0,
            wall_normals: vec![[0.0, 0.0]; n],
            time: 0.0,
            step: 0,
        };
        sys.reference_speed = sys.max_speed();
        sys.dt = sys.stable_dt();
        Ok(sys)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn volume(&self) -> f64 {
        self.dx * self.dx
    }

    pub fn is_fluid(&self, i: usize) -> bool {
        self.kinds[i] == ParticleKind::Fluid
    }

    pub fn fluid_count(&self) -> usize {
        self.kinds.iter().filter(|&&k| k == ParticleKind::Fluid).count()
    }

    pub fn max_speed(&self) -> f64 {
        self.velocities.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max)
    }

    /// Advective, gravity and viscous limits at the current maximum speed.
    pub fn stable_dt(&self) -> f64 {
        let h = self.kernel.h;
        let p = &self.params;
        let umax = self.max_speed();
        let g = self.gravity[0].hypot(self.gravity[1]);
        let mut dt = p.dt_max.unwrap_or(f64::INFINITY);
        if umax > 0.0 {
            dt = dt.min(p.cfl * h / umax);
        }
        if g > 0.0 {
            dt = dt.min(p.cfl_gravity * (h / g).sqrt());
        }
        if self.nu > 0.0 {
            dt = dt.min(p.cfl_viscous * h * h / self.nu);
        }
        dt
    }

    /// Total momentum of the fluid particles.
    pub fn momentum(&self) -> [f64; 2] {
        let mut m = [0.0, 0.0];
        for (v, k) in self.velocities.iter().zip(&self.kinds) {
            if *k == ParticleKind::Fluid {
                m[0] += self.mass * v[0];
                m[1] += self.mass * v[1];
            }
        }
        m
    }

    /// Snapshot CSV with columns `id,kind,x,y,u,v,p`.
    pub fn snapshot_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::from("id,kind,x,y,u,v,p\n");
        for i in 0..self.len() {
            let (p, v) = (self.positions[i], self.velocities[i]);
            let _ = writeln!(s, "{i},{},{},{},{},{},{}", self.kinds[i].as_str(), p[0], p[1], v[0], v[1], self.pressures[i]);
        }
        s
    }
}
