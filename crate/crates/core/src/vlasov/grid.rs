use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution function `f(x, v)` on a uniform periodic-in-x grid.
///
/// Storage is row-major by position: `f[ix * nv + iv]`. Velocity nodes run
/// from `-v_max` to `v_max` inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceGrid {
    pub nx: usize,
    pub nv: usize,
    pub length: f64,
    pub v_max: f64,
    pub dx: f64,
    pub dv: f64,
    pub charge: f64,
    pub mass: f64,
    pub eps0: f64,
    /// Neutralising background density.
    pub background: f64,
    pub f: Vec<f64>,
}

impl PhaseSpaceGrid {
    pub fn new(nx: usize, nv: usize, length: f64, v_max: f64, background: f64) -> Result<Self> {
        if nx < 3 || nv < 4 || !(length > 0.0) || !(v_max > 0.0) || !(background >= 0.0) {
            return Err(Error::Config(format!(
                "invalid phase-space grid nx={nx} nv={nv} L={length} v_max={v_max} n0={background}"
            )));
        }
        Ok(PhaseSpaceGrid {
            nx,
            nv,
            length,
            v_max,
            dx: length / nx as f64,
            dv: 2.0 * v_max / (nv - 1) as f64,
            charge: -1.0,
            mass: 1.0,
            eps0: 1.0,
            background,
            f: vec![0.0; nx * nv],
        })
    }

    pub fn x(&self, ix: usize) -> f64 {
        ix as f64 * self.dx
    }

    pub fn v(&self, iv: usize) -> f64 {
        -self.v_max + iv as f64 * self.dv
    }

    pub fn row(&self, ix: usize) -> &[f64] {
        &self.f[ix * self.nv..(ix + 1) * self.nv]
    }

    /// Trapezoid weight of velocity node `iv`.
    fn v_weight(&self, iv: usize) -> f64 {
        if iv == 0 || iv + 1 == self.nv {
            0.5 * self.dv
        } else {
            self.dv
        }
    }

    /// `int f dv` at each position.
    pub fn density(&self) -> Vec<f64> {
        (0..self.nx)
            .map(|ix| self.row(ix).iter().enumerate().map(|(iv, f)| self.v_weight(iv) * f).sum())
            .collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.density().iter().sum::<f64>() * self.dx
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.f.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

/// Two counter-streaming Maxwellian beams with a cosine density perturbation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwoStreamSpec {
    pub nx: usize,
    pub nv: usize,
    /// Fundamental wavenumber; the box length is `2 pi / k`.
    pub wavenumber: f64,
    pub k_mode: usize,
    pub v0: f64,
    pub vt: f64,
    pub alpha: f64,
    pub background: f64,
    pub v_max: f64,
    /// Common velocity added to both beams.
    pub drift: f64,
    pub dt: f64,
}

impl Default for TwoStreamSpec {
    fn default() -> Self {
        TwoStreamSpec {
            nx: 64,
            nv: 128,
            wavenumber: 0.5,
            k_mode: 1,
            v0: 1.2,
            vt: 0.3,
            alpha: 0.01,
            background: 1.0,
            v_max: 9.0,
            drift: 2.0,
            dt: 0.1,
        }
    }
}

impl TwoStreamSpec {
    pub fn length(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavenumber
    }

    pub fn validate(&self) -> Result<()> {
        let reach = self.drift.abs() + self.v0.abs() + 6.0 * self.vt;
        let ok = self.nx >= 3
            && self.nv >= 4
            && self.wavenumber > 0.0
            && self.vt > 0.0
            && self.background >= 0.0
            && self.alpha.abs() < 1.0
            && self.dt > 0.0
            && self.v_max >= reach;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid two-stream spec {self:?} (v_max must reach |drift| + v0 + 6 vt)")))
        }
    }
}

pub fn init_two_stream(spec: &TwoStreamSpec) -> Result<PhaseSpaceGrid> {
    spec.validate()?;
    let mut g = PhaseSpaceGrid::new(spec.nx, spec.nv, spec.length(), spec.v_max, spec.background)?;
    let norm = spec.background / (2.0 * (2.0 * std::f64::consts::PI).sqrt() * spec.vt);
    let k = 2.0 * std::f64::consts::PI * spec.k_mode as f64 / g.length;
    let s2 = 2.0 * spec.vt * spec.vt;
    for ix in 0..g.nx {
        let shape = 1.0 + spec.alpha * (k * g.x(ix)).cos();
        for iv in 0..g.nv {
            let v = g.v(iv) - spec.drift;
            let beams = (-(v - spec.v0).powi(2) / s2).exp() + (-(v + spec.v0).powi(2) / s2).exp();
            g.f[ix * g.nv + iv] = norm * beams * shape;
        }
    }
    Ok(g)
}

/// `q (int f dv - n0)`. The background is subtracted per node so an
/// unperturbed state gives exactly the same value everywhere.
pub fn charge_density(grid: &PhaseSpaceGrid) -> Vec<f64> {
    grid.density().into_iter().map(|n| grid.charge * (n - grid.background)).collect()
}

/// Kinetic and electrostatic energy `(U_K, U_E)`.
pub fn energies(grid: &PhaseSpaceGrid, e_field: &[f64]) -> (f64, f64) {
    let mut uk = 0.0;
    for ix in 0..grid.nx {
        for (iv, f) in grid.row(ix).iter().enumerate() {
            let v = grid.v(iv);
            uk += grid.v_weight(iv) * v * v * f;
        }
    }
    let uk = 0.5 * grid.mass * uk * grid.dx;
    let ue = 0.5 * grid.eps0 * e_field.iter().map(|e| e * e).sum::<f64>() * grid.dx;
    (uk, ue)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> TwoStreamSpec {
        TwoStreamSpec::default()
    }

    #[test]
    fn unperturbed_is_uniform_in_x() {
        let g = init_two_stream(&TwoStreamSpec { alpha: 0.0, ..spec() }).unwrap();
        for ix in 1..g.nx {
            assert_eq!(g.row(ix), g.row(0));
        }
        let rho = charge_density(&g);
        assert!(rho.iter().all(|&r| r.abs() < 1e-10 && r == rho[0]));
    }

    #[test]
    fn mass_matches_background() {
        let s = spec();
        let g = init_two_stream(&s).unwrap();
        assert!((g.total_mass() - s.background * g.length).abs() < 1e-8);
    }

    #[test]
    fn single_maxwellian_peaks_at_zero() {
        let g = init_two_stream(&TwoStreamSpec { v0: 0.0, drift: 0.0, ..spec() }).unwrap();
        let row = g.row(0);
        let imax = (0..g.nv).max_by(|&a, &b| row[a].partial_cmp(&row[b]).unwrap()).unwrap();
        assert!(g.v(imax).abs() <= 0.5 * g.dv + 1e-12);
    }

    #[test]
    fn perturbation_amplitude_in_charge() {
        let s = spec();
        let g = init_two_stream(&s).unwrap();
        let rho = charge_density(&g);
        let k = 2.0 * std::f64::consts::PI / g.length;
        for (ix, r) in rho.iter().enumerate() {
            let want = g.charge * s.background * s.alpha * (k * g.x(ix)).cos();
            assert!((r - want).abs() < 1e-6, "{ix}: {r} vs {want}");
        }
    }

    #[test]
    fn energies_of_unperturbed_beams() {
        let s = TwoStreamSpec { alpha: 0.0, ..spec() };
        let g = init_two_stream(&s).unwrap();
        let (uk, ue) = energies(&g, &vec![0.0; g.nx]);
        let want = 0.5 * s.background * g.length * (s.v0 * s.v0 + s.vt * s.vt + s.drift * s.drift);
        assert!((uk - want).abs() < 1e-8 * want, "{uk} vs {want}");
        assert_eq!(ue, 0.0);
    }

    #[test]
    fn energies_of_empty_grid() {
        let g = PhaseSpaceGrid::new(8, 8, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(energies(&g, &[0.0; 8]), (0.0, 0.0));
        let (_, ue) = energies(&g, &[2.0; 8]);
        assert!((ue - 0.5 * 4.0 * 1.0).abs() < 1e-12);
    }

    #[test]
    fn velocity_range_is_checked() {
        assert!(init_two_stream(&TwoStreamSpec { v_max: 2.0, ..spec() }).is_err());
        assert!(init_two_stream(&TwoStreamSpec { v_max: 4.0, drift: 0.0, ..spec() }).is_ok());
    }
}
