use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isph::{Domain, ParticleKind, ParticleSystem, SphParams};

/// Collapsing water column against the left wall of an open tank.
///
/// The column is `fluid_cols x fluid_rows` particles at spacing
/// `dx = width / fluid_cols`; walls are `wall_layers` staggered layers of
/// fixed particles. The defaults give 2278 fluid and 1660 wall particles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DamBreakSpec {
    /// Column width `a`.
    pub width: f64,
    pub fluid_cols: usize,
    pub fluid_rows: usize,
    /// Tank floor length in particle spacings.
    pub tank_cols: usize,
    /// Side wall height in particle spacings.
    pub wall_rows: usize,
    pub wall_layers: usize,
    pub gravity: f64,
    pub rho0: f64,
    pub nu: f64,
    pub hydrostatic: bool,
}

impl Default for DamBreakSpec {
    fn default() -> Self {
        DamBreakSpec {
            width: 0.146,
            fluid_cols: 34,
            fluid_rows: 67,
            tank_cols: 136,
            wall_rows: 206,
            wall_layers: 3,
            gravity: 9.81,
            rho0: 1000.0,
            nu: 1e-6,
            hydrostatic: true,
        }
    }
}

impl DamBreakSpec {
    pub fn dx(&self) -> f64 {
        self.width / self.fluid_cols as f64
    }

    pub fn column_height(&self) -> f64 {
        self.fluid_rows as f64 * self.dx()
    }

    pub fn tank_length(&self) -> f64 {
        self.tank_cols as f64 * self.dx()
    }

    /// Nondimensional time `t sqrt(2 g / a)`.
    pub fn nondim_time(&self, t: f64) -> f64 {
        t * (2.0 * self.gravity / self.width).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.width > 0.0
            && self.fluid_cols > 0
            && self.fluid_rows > 0
            && self.tank_cols > self.fluid_cols
            && self.wall_rows >= self.fluid_rows
            && self.wall_layers > 0
            && self.gravity >= 0.0
            && self.rho0 > 0.0
            && self.nu >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid dam-break spec {self:?}")))
        }
    }
}

pub fn dambreak_init(spec: &DamBreakSpec, params: SphParams) -> Result<ParticleSystem> {
    spec.validate()?;
    let dx = spec.dx();
    let layers = spec.wall_layers;
    let mut pos = Vec::new();
    for j in 0..spec.fluid_rows {
        for i in 0..spec.fluid_cols {
            pos.push([(i as f64 + 0.5) * dx, (j as f64 + 0.5) * dx]);
        }
    }
    let n_fluid = pos.len();
    let right = spec.tank_length();
    let mut normals = vec![[0.0, 0.0]; n_fluid];
    for k in 0..layers {
        let stagger = if k % 2 == 1 { 0.5 } else { 0.0 };
        let y = -(k as f64 + 0.5) * dx;
        normals.extend(std::iter::repeat_n([0.0, -1.0], spec.tank_cols + 2 * layers));
        for i in 0..spec.tank_cols + 2 * layers {
            pos.push([(i as f64 - layers as f64 + 0.5 + stagger) * dx, y]);
        }
    }
    for k in 0..layers {
        let stagger = if k % 2 == 1 { 0.5 } else { 0.0 };
        let off = (k as f64 + 0.5) * dx;
        for j in 0..spec.wall_rows - k % 2 {
            let y = (j as f64 + 0.5 + stagger) * dx;
            pos.push([-off, y]);
            pos.push([right + off, y]);
            normals.push([-1.0, 0.0]);
            normals.push([1.0, 0.0]);
        }
    }
    let n = pos.len();
    let mut kinds = vec![ParticleKind::Boundary; n];
    kinds[..n_fluid].fill(ParticleKind::Fluid);
    let margin = layers as f64 * dx;
    let mut domain = Domain::closed_box([-margin, -margin], [right + margin, (spec.wall_rows as f64 + 1.0) * dx]);
    domain.open_top = true;
    let mut sys = ParticleSystem::new(
        pos,
        vec![[0.0, 0.0]; n],
        kinds,
        dx,
        spec.rho0,
        spec.nu,
        [0.0, -spec.gravity],
        domain,
        params,
    )?;
    sys.wall_normals = normals;
    if spec.hydrostatic {
        let h = spec.column_height();
        for i in 0..n_fluid {
            sys.pressures[i] = spec.rho0 * spec.gravity * (h - sys.positions[i][1]);
        }
    }
    sys.reference_speed = (2.0 * spec.gravity * spec.column_height()).sqrt();
    sys.dt = sys.stable_dt();
    Ok(sys)
}

/// Front position: rightmost fluid particle plus half a spacing, so the
/// undisturbed column reports exactly its width.
pub fn leading_edge(sys: &ParticleSystem) -> Result<f64> {
    (0..sys.len())
        .filter(|&i| sys.is_fluid(i))
        .map(|i| sys.positions[i][0])
        .reduce(f64::max)
        .map(|x| x + 0.5 * sys.dx)
        .ok_or_else(|| Error::Invalid("no fluid particles".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_counts() {
        let spec = DamBreakSpec::default();
        let sys = dambreak_init(&spec, SphParams::default()).unwrap();
        assert_eq!(sys.fluid_count(), 2278);
        assert_eq!(sys.len() - sys.fluid_count(), 1660);
        assert!(sys.velocities.iter().all(|v| v == &[0.0, 0.0]));
    }

    #[test]
    fn column_geometry() {
        let spec = DamBreakSpec::default();
        let sys = dambreak_init(&spec, SphParams::default()).unwrap();
        assert!((leading_edge(&sys).unwrap() - spec.width).abs() < 1e-12);
        let top = (0..sys.len()).filter(|&i| sys.is_fluid(i)).map(|i| sys.positions[i][1]).fold(0.0, f64::max);
        assert!((top + 0.5 * spec.dx() - spec.column_height()).abs() < 1e-12);
        assert!((spec.column_height() / spec.width - 2.0).abs() < 0.03);
        assert!(leading_edge(&sys).unwrap() <= spec.tank_length());
    }

    #[test]
    fn hydrostatic_pressure_optional() {
        let spec = DamBreakSpec { hydrostatic: false, ..Default::default() };
        let sys = dambreak_init(&spec, SphParams::default()).unwrap();
        assert!(sys.pressures.iter().all(|&p| p == 0.0));
        let sys = dambreak_init(&DamBreakSpec::default(), SphParams::default()).unwrap();
        assert!(sys.pressures[0] > 0.0);
    }
}
