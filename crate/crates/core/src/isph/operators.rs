use super::neighbors::NeighborTable;
use super::system::ParticleSystem;

/// Per-particle kernel-gradient renormalization `(-sum_j V_j x_ij grad_i W_ij^T)^-1`,
/// which makes [`sph_gradient`] and [`sph_divergence`] exact for linear fields.
/// Rows with a near-singular moment matrix fall back to the identity.
pub fn gradient_correction(sys: &ParticleSystem, table: &NeighborTable) -> Vec<[f64; 4]> {
    let vol = sys.volume();
    (0..sys.len())
        .map(|i| {
            let mut m = [0.0; 4];
            for p in table.of(i) {
                let f = -sys.kernel.grad_factor(p.r) * vol;
                m[0] += f * p.rij[0] * p.rij[0];
                m[1] += f * p.rij[0] * p.rij[1];
                m[3] += f * p.rij[1] * p.rij[1];
            }
            m[2] = m[1];
            let det = m[0] * m[3] - m[1] * m[2];
            if det > 1e-3 && m[0] > 0.0 {
                [m[3] / det, -m[1] / det, -m[2] / det, m[0] / det]
            } else {
                [1.0, 0.0, 0.0, 1.0]
            }
        })
        .collect()
}

#[inline]
pub(crate) fn corrected(c: Option<&[[f64; 4]]>, i: usize, g: [f64; 2]) -> [f64; 2] {
    match c {
        Some(c) => [c[i][0] * g[0] + c[i][1] * g[1], c[i][2] * g[0] + c[i][3] * g[1]],
        None => g,
    }
}

/// Difference-form gradient `-sum_j V_j (phi_i - phi_j) grad_i W_ij`.
pub fn sph_gradient(field: &[f64], sys: &ParticleSystem, table: &NeighborTable) -> Vec<[f64; 2]> {
    sph_gradient_with(field, sys, table, None)
}

/// [`sph_gradient`] with an optional per-particle correction matrix.
pub fn sph_gradient_with(
    field: &[f64],
    sys: &ParticleSystem,
    table: &NeighborTable,
    correction: Option<&[[f64; 4]]>,
) -> Vec<[f64; 2]> {
    let vol = sys.volume();
    (0..field.len())
        .map(|i| {
            let mut g = [0.0, 0.0];
            for p in table.of(i) {
                let f = sys.kernel.grad_factor(p.r) * vol * (field[i] - field[p.j]);
                g[0] -= f * p.rij[0];
                g[1] -= f * p.rij[1];
            }
            corrected(correction, i, g)
        })
        .collect()
}

/// Difference-form divergence `-sum_j V_j (u_i - u_j) . grad_i W_ij`.
pub fn sph_divergence(field: &[[f64; 2]], sys: &ParticleSystem, table: &NeighborTable) -> Vec<f64> {
    sph_divergence_with(field, sys, table, None)
}

/// [`sph_divergence`] with an optional per-particle correction matrix.
pub fn sph_divergence_with(
    field: &[[f64; 2]],
    sys: &ParticleSystem,
    table: &NeighborTable,
    correction: Option<&[[f64; 4]]>,
) -> Vec<f64> {
    let vol = sys.volume();
    (0..field.len())
        .map(|i| {
            let mut d = 0.0;
            for p in table.of(i) {
                let du = [field[i][0] - field[p.j][0], field[i][1] - field[p.j][1]];
                let gw = corrected(correction, i, [p.rij[0], p.rij[1]]);
                d -= sys.kernel.grad_factor(p.r) * vol * (du[0] * gw[0] + du[1] * gw[1]);
            }
            d
        })
        .collect()
}

/// Morris pair weight `m_j (a_i + a_j) x_ij . grad_i W_ij / (rho_j (r^2 + eta^2))`.
#[inline]
pub(crate) fn morris_weight(sys: &ParticleSystem, ai: f64, aj: f64, r: f64) -> f64 {
    let f = sys.kernel.grad_factor(r);
    sys.volume() * (ai + aj) * f * r * r / (r * r + sys.eta2)
}

/// Morris operator `(div a grad b)_i` for a scalar field.
pub fn sph_laplacian_morris(coeff: &[f64], field: &[f64], sys: &ParticleSystem, table: &NeighborTable) -> Vec<f64> {
    (0..field.len())
        .map(|i| table.of(i).iter().map(|p| morris_weight(sys, coeff[i], coeff[p.j], p.r) * (field[i] - field[p.j])).sum())
        .collect()
}

/// Morris operator applied componentwise to a vector field.
pub fn sph_laplacian_morris_vec(
    coeff: &[f64],
    field: &[[f64; 2]],
    sys: &ParticleSystem,
    table: &NeighborTable,
) -> Vec<[f64; 2]> {
    (0..field.len())
        .map(|i| {
            let mut out = [0.0, 0.0];
            for p in table.of(i) {
                let w = morris_weight(sys, coeff[i], coeff[p.j], p.r);
                out[0] += w * (field[i][0] - field[p.j][0]);
                out[1] += w * (field[i][1] - field[p.j][1]);
            }
            out
        })
        .collect()
}

/// Kernel-sum particle concentration `sum_j V_j W_ij` including self.
pub fn concentration(sys: &ParticleSystem, table: &NeighborTable) -> Vec<f64> {
    let vol = sys.volume();
    let w0 = sys.kernel.w(0.0);
    (0..sys.len()).map(|i| vol * (w0 + table.of(i).iter().map(|p| sys.kernel.w(p.r)).sum::<f64>())).collect()
}

/// `sum_j V_j grad_i W_ij`, the gradient of [`concentration`].
pub fn concentration_gradient(sys: &ParticleSystem, table: &NeighborTable) -> Vec<[f64; 2]> {
    let vol = sys.volume();
    (0..sys.len())
        .map(|i| {
            let mut g = [0.0, 0.0];
            for p in table.of(i) {
                let f = sys.kernel.grad_factor(p.r) * vol;
                g[0] += f * p.rij[0];
                g[1] += f * p.rij[1];
            }
            g
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isph::{build_neighbors, Domain, ParticleKind, SphParams};

    fn lattice(n: usize, periodic: bool) -> (ParticleSystem, NeighborTable) {
        let dx = 1.0 / n as f64;
        let mut pos = Vec::new();
        for j in 0..n {
            for i in 0..n {
                pos.push([(i as f64 + 0.5) * dx, (j as f64 + 0.5) * dx]);
            }
        }
        let domain = Domain { lo: [0.0, 0.0], hi: [1.0, 1.0], periodic: [periodic, periodic], open_top: false };
        let m = pos.len();
        let sys = ParticleSystem::new(
            pos,
            vec![[0.0; 2]; m],
            vec![ParticleKind::Fluid; m],
            dx,
            1.0,
            0.0,
            [0.0, 0.0],
            domain,
            SphParams::default(),
        )
        .unwrap();
        let t = build_neighbors(&sys.positions, sys.kernel.support_radius(), &sys.domain);
        (sys, t)
    }

    fn interior(sys: &ParticleSystem, i: usize) -> bool {
        let p = sys.positions[i];
        let m = 3.0 * sys.kernel.h;
        p[0] > m && p[0] < 1.0 - m && p[1] > m && p[1] < 1.0 - m
    }

    #[test]
    fn constant_field_has_zero_gradient() {
        let (mut sys, _) = lattice(12, false);
        // disorder the particles; the difference form stays exact
        for (k, p) in sys.positions.iter_mut().enumerate() {
            p[0] += 0.2 * sys.dx * ((k * 7919 % 13) as f64 / 13.0 - 0.5);
            p[1] += 0.2 * sys.dx * ((k * 104_729 % 17) as f64 / 17.0 - 0.5);
        }
        let t = build_neighbors(&sys.positions, sys.kernel.support_radius(), &sys.domain);
        let g = sph_gradient(&vec![3.7; sys.len()], &sys, &t);
        assert!(g.iter().all(|v| v[0] == 0.0 && v[1] == 0.0));
        let l = sph_laplacian_morris(&vec![1.0; sys.len()], &vec![3.7; sys.len()], &sys, &t);
        assert!(l.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_field_gradient() {
        let (sys, t) = lattice(24, false);
        let field: Vec<f64> = sys.positions.iter().map(|p| 2.0 * p[0] - 0.5 * p[1]).collect();
        let g = sph_gradient(&field, &sys, &t);
        for i in (0..sys.len()).filter(|&i| interior(&sys, i)) {
            assert!((g[i][0] - 2.0).abs() < 0.05 * 2.0, "{:?}", g[i]);
            assert!((g[i][1] + 0.5).abs() < 0.05 * 2.0, "{:?}", g[i]);
        }
    }

    #[test]
    fn quadratic_field_laplacian() {
        let (sys, t) = lattice(24, false);
        let field: Vec<f64> = sys.positions.iter().map(|p| p[0] * p[0]).collect();
        let l = sph_laplacian_morris(&vec![1.0; sys.len()], &field, &sys, &t);
        for i in (0..sys.len()).filter(|&i| interior(&sys, i)) {
            assert!((l[i] - 2.0).abs() < 0.2, "{}", l[i]);
        }
    }

    #[test]
    fn isolated_particle_has_empty_sums() {
        let sys = ParticleSystem::new(
            vec![[0.5, 0.5]],
            vec![[1.0, 0.0]],
            vec![ParticleKind::Fluid],
            0.1,
            1.0,
            0.0,
            [0.0, 0.0],
            Domain::closed_box([0.0, 0.0], [1.0, 1.0]),
            SphParams::default(),
        )
        .unwrap();
        let t = build_neighbors(&sys.positions, sys.kernel.support_radius(), &sys.domain);
        assert_eq!(sph_gradient(&[5.0], &sys, &t), vec![[0.0, 0.0]]);
        assert_eq!(sph_divergence(&[[1.0, 2.0]], &sys, &t), vec![0.0]);
    }

    #[test]
    fn coincident_particles_stay_finite() {
        let sys = ParticleSystem::new(
            vec![[0.5, 0.5], [0.5, 0.5]],
            vec![[0.0; 2]; 2],
            vec![ParticleKind::Fluid; 2],
            0.1,
            1.0,
            0.0,
            [0.0, 0.0],
            Domain::closed_box([0.0, 0.0], [1.0, 1.0]),
            SphParams::default(),
        )
        .unwrap();
        let t = build_neighbors(&sys.positions, sys.kernel.support_radius(), &sys.domain);
        let l = sph_laplacian_morris(&[1.0, 1.0], &[0.0, 1.0], &sys, &t);
        assert!(l.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn periodic_lattice_concentration_is_uniform() {
        let (sys, t) = lattice(16, true);
        let c = concentration(&sys, &t);
        for v in &c {
            assert!((v - c[0]).abs() < 1e-12);
            assert!((v - 1.0).abs() < 1.1e-2);
        }
        let g = concentration_gradient(&sys, &t);
        assert!(g.iter().all(|v| v[0].abs() < 1e-10 && v[1].abs() < 1e-10));
    }
}
