use super::neighbors::{NeighborTable, Pair};
use super::operators::{concentration, corrected, morris_weight};
use super::system::{ParticleKind, ParticleSystem};

use crate::error::Result;
use crate::linsys::{Lsp, SparseMatrix};

/// Position divergence below which a particle counts as surface; the
/// interior value in 2D is 2.
pub const SURFACE_DIV_R: f64 = 1.5;

/// Kernel estimate of `div x` per particle.
pub fn position_divergence(sys: &ParticleSystem, table: &NeighborTable) -> Vec<f64> {
    let v = sys.volume();
    (0..sys.len())
        .map(|i| table.of(i).iter().map(|p| -v * sys.kernel.grad_factor(p.r) * p.r * p.r).sum())
        .collect()
}

/// Fluid particles held at `P = 0`: those whose concentration is below the
/// configured threshold or whose position divergence is below
/// [`SURFACE_DIV_R`], plus the least concentrated particle of any fluid
/// cluster that would otherwise have no such row (its block would be singular).
pub fn free_surface_flags(sys: &ParticleSystem, table: &NeighborTable) -> Vec<bool> {
    let thr = sys.params.free_surface_threshold;
    if thr <= 0.0 {
        return vec![false; sys.len()];
    }
    let c = concentration(sys, table);
    let div_r = position_divergence(sys, table);
    let mut flags: Vec<bool> =
        (0..sys.len()).map(|i| sys.is_fluid(i) && (c[i] < thr || div_r[i] < SURFACE_DIV_R)).collect();
    let mut parent: Vec<usize> = (0..sys.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in (0..sys.len()).filter(|&i| sys.is_fluid(i)) {
        for j in table.indices(i).filter(|&j| sys.is_fluid(j)) {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut pinned = vec![false; sys.len()];
    let mut weakest: Vec<Option<usize>> = vec![None; sys.len()];
    for i in (0..sys.len()).filter(|&i| sys.is_fluid(i)) {
        let root = find(&mut parent, i);
        pinned[root] |= flags[i];
        if weakest[root].is_none_or(|k| c[i] < c[k]) {
            weakest[root] = Some(i);
        }
    }
    for root in 0..sys.len() {
        if let (false, Some(k)) = (pinned[root], weakest[root]) {
            flags[k] = true;
        }
    }
    flags
}

/// Unknown index of each particle: fluid particles in order, walls excluded.
pub fn ppe_rows(sys: &ParticleSystem) -> Vec<Option<usize>> {
    let mut next = 0;
    sys.kinds
        .iter()
        .map(|k| {
            (*k == ParticleKind::Fluid).then(|| {
                next += 1;
                next - 1
            })
        })
        .collect()
}

/// Wall pressure seen by fluid particle `i` through wall neighbour `p`:
/// `P_w = P_i + (rho / dt) (u*_i . n) (n . (x_w - x_i))`, a pairwise Neumann
/// condition that cancels the normal intermediate velocity.
#[inline]
pub fn wall_ghost_offset(sys: &ParticleSystem, u_star_i: [f64; 2], p: &Pair, dt: f64) -> f64 {
    let n = sys.wall_normals[p.j];
    let un = u_star_i[0] * n[0] + u_star_i[1] * n[1];
    let dn = -(p.rij[0] * n[0] + p.rij[1] * n[1]);
    sys.rho0 / dt * un * dn
}

/// Pressure-Poisson system `-div(grad P / rho) = -div(u*) / dt` over the
/// fluid particles. Wall neighbours enter through [`wall_ghost_offset`];
/// free-surface rows become `P = 0` with their columns removed so the matrix
/// stays symmetric. Without any such row the null space is pinned by a
/// rank-one mean term scaled by the mean diagonal.
pub fn assemble_ppe(sys: &ParticleSystem, table: &NeighborTable, u_star: &[[f64; 2]]) -> Result<Lsp> {
    let correction = sys.params.kernel_correction.then(|| super::operators::gradient_correction(sys, table));
    let dirichlet = free_surface_flags(sys, table);
    let row_of = ppe_rows(sys);
    let n = row_of.iter().flatten().count();
    let a = 1.0 / sys.rho0;
    let vol = sys.volume();
    let dt = sys.dt;
    let mut rows = Vec::with_capacity(n);
    let mut rhs = vec![0.0; n];
    let mut diag_sum = 0.0;
    let any_dirichlet = dirichlet.iter().any(|&d| d);
    for i in 0..sys.len() {
        let Some(r) = row_of[i] else { continue };
        if dirichlet[i] {
            rows.push(vec![(r, 1.0)]);
            diag_sum += 1.0;
            continue;
        }
        let mut row = Vec::with_capacity(table.of(i).len() + 1);
        let mut diag = 0.0;
        let mut div = 0.0;
        let mut wall = 0.0;
        for p in table.of(i) {
            let w = morris_weight(sys, a, a, p.r);
            match row_of[p.j] {
                Some(c) => {
                    diag -= w;
                    if !dirichlet[p.j] {
                        row.push((c, w));
                    }
                    let du = [u_star[i][0] - u_star[p.j][0], u_star[i][1] - u_star[p.j][1]];
                    let gw = corrected(correction.as_deref(), i, p.rij);
                    div -= sys.kernel.grad_factor(p.r) * vol * (du[0] * gw[0] + du[1] * gw[1]);
                }
                None => wall += w * wall_ghost_offset(sys, u_star[i], p, dt),
            }
        }
        if diag == 0.0 && any_dirichlet {
            // isolated particle with nothing to pin it
            rows.push(vec![(r, 1.0)]);
            diag_sum += 1.0;
            continue;
        }
        row.push((r, diag));
        row.sort_unstable_by_key(|e| e.0);
        rows.push(row);
        diag_sum += diag;
        rhs[r] = -div / dt - wall;
    }
    let matrix = SparseMatrix::from_rows(n, &rows)?;
    let lsp = Lsp::new(matrix, rhs)?;
    Ok(if any_dirichlet { lsp } else { lsp.with_mean_pin(diag_sum / n as f64) })
}

/// Difference-form pressure gradient at fluid particles, with wall
/// neighbours carrying their ghost pressures. Zero at wall particles.
pub fn pressure_gradient(
    sys: &ParticleSystem,
    table: &NeighborTable,
    u_star: &[[f64; 2]],
    dt: f64,
    correction: Option<&[[f64; 4]]>,
) -> Vec<[f64; 2]> {
    let vol = sys.volume();
    (0..sys.len())
        .map(|i| {
            if !sys.is_fluid(i) {
                return [0.0, 0.0];
            }
            let mut g = [0.0, 0.0];
            for p in table.of(i) {
                let dp = if sys.is_fluid(p.j) {
                    sys.pressures[p.j] - sys.pressures[i]
                } else {
                    wall_ghost_offset(sys, u_star[i], p, dt)
                };
                let f = sys.kernel.grad_factor(p.r) * vol * dp;
                g[0] += f * p.rij[0];
                g[1] += f * p.rij[1];
            }
            corrected(correction, i, g)
        })
        .collect()
}

/// Scatter a solution over PPE rows back onto particle pressures; wall
/// particles get the mean ghost pressure of their fluid neighbours.
pub fn scatter_pressures(sys: &mut ParticleSystem, table: &NeighborTable, u_star: &[[f64; 2]], dt: f64, x: &[f64]) {
    let row_of = ppe_rows(sys);
    for (i, r) in row_of.iter().enumerate() {
        if let Some(r) = r {
            sys.pressures[i] = x[*r];
        }
    }
    for i in 0..sys.len() {
        if row_of[i].is_some() {
            continue;
        }
        let (mut num, mut den) = (0.0, 0.0);
        for p in table.of(i) {
            if row_of[p.j].is_none() {
                continue;
            }
            // pair seen from the fluid side: x_j - x_w
            let back = Pair { j: i, rij: [-p.rij[0], -p.rij[1]], r: p.r };
            let w = sys.kernel.w(p.r);
            num += w * (sys.pressures[p.j] + wall_ghost_offset(sys, u_star[p.j], &back, dt));
            den += w;
        }
        sys.pressures[i] = if den > 0.0 { num / den } else { 0.0 };
    }
}
