use super::neighbors::{build_neighbors, NeighborTable};
use super::operators::{
    concentration, concentration_gradient, gradient_correction, sph_laplacian_morris_vec,
};
use super::ppe::{assemble_ppe, pressure_gradient, scatter_pressures};
use super::system::{ParticleKind, ParticleSystem};
use crate::error::{Error, Result};
use crate::linsys::Lsp;
use crate::pcore::{Action, Corrector};

/// Concentration below which shifting keeps only the tangential component.
const SURFACE_SHIFT_BAND: f64 = 0.95;

/// Intermediate state of one projection step, before the pressure is known.
#[derive(Debug, Clone)]
pub struct Predicted {
    pub dt: f64,
    pub x_star: Vec<[f64; 2]>,
    pub table: NeighborTable,
    pub u_star: Vec<[f64; 2]>,
    pub correction: Option<Vec<[f64; 4]>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub step: usize,
    pub time: f64,
    pub dt: f64,
    pub action: Action,
    pub max_speed: f64,
}

/// Advect to `x*`, search neighbours there and form `u* = u + (nu lap u + g) dt`.
pub fn predict(sys: &ParticleSystem) -> Predicted {
    let dt = sys.stable_dt();
    let x_star: Vec<[f64; 2]> = (0..sys.len())
        .map(|i| {
            let (p, v) = (sys.positions[i], sys.velocities[i]);
            if sys.is_fluid(i) {
                sys.domain.wrap([p[0] + v[0] * dt, p[1] + v[1] * dt])
            } else {
                p
            }
        })
        .collect();
    let table = build_neighbors(&x_star, sys.kernel.support_radius(), &sys.domain);
    let visc = if sys.nu > 0.0 {
        sph_laplacian_morris_vec(&vec![sys.nu; sys.len()], &sys.velocities, sys, &table)
    } else {
        vec![[0.0, 0.0]; sys.len()]
    };
    let g = sys.gravity;
    let u_star = (0..sys.len())
        .map(|i| {
            if sys.is_fluid(i) {
                let v = sys.velocities[i];
                [v[0] + (visc[i][0] + g[0]) * dt, v[1] + (visc[i][1] + g[1]) * dt]
            } else {
                [0.0, 0.0]
            }
        })
        .collect();
    let correction = sys.params.kernel_correction.then(|| gradient_correction(sys, &table));
    Predicted { dt, x_star, table, u_star, correction }
}

/// Pressure system of a predicted step.
pub fn predicted_ppe(sys: &mut ParticleSystem, pred: &Predicted) -> Result<Lsp> {
    sys.dt = pred.dt;
    assemble_ppe(sys, &pred.table, &pred.u_star)
}

/// Overwrite particle pressures from a PPE solution.
pub fn apply_pressures(sys: &mut ParticleSystem, pred: &Predicted, x: &[f64]) {
    scatter_pressures(sys, &pred.table, &pred.u_star, pred.dt, x);
}

/// Velocity after projection with the current particle pressures.
pub fn projected_velocity(sys: &ParticleSystem, pred: &Predicted) -> Vec<[f64; 2]> {
    let grad = pressure_gradient(sys, &pred.table, &pred.u_star, pred.dt, pred.correction.as_deref());
    let s = pred.dt / sys.rho0;
    (0..sys.len())
        .map(|i| {
            if sys.is_fluid(i) {
                [pred.u_star[i][0] - s * grad[i][0], pred.u_star[i][1] - s * grad[i][1]]
            } else {
                [0.0, 0.0]
            }
        })
        .collect()
}

/// Finish the step from the current pressures: project, move, shift, check.
pub fn finish_step(sys: &mut ParticleSystem, pred: &Predicted) -> Result<()> {
    let dt = pred.dt;
    let u_new = projected_velocity(sys, pred);
    for i in 0..sys.len() {
        if sys.kinds[i] != ParticleKind::Fluid {
            continue;
        }
        let (p, u0, u1) = (sys.positions[i], sys.velocities[i], u_new[i]);
        sys.positions[i] = sys.domain.wrap([p[0] + 0.5 * (u0[0] + u1[0]) * dt, p[1] + 0.5 * (u0[1] + u1[1]) * dt]);
    }
    sys.velocities = u_new;
    if sys.params.shifting {
        shift_particles(sys, dt);
    }
    sys.time += dt;
    sys.step += 1;
    check_state(sys)
}

/// Fickian shifting `dr = -D grad C` with `D = k h u_max dt`; near the free
/// surface only the tangential part is applied.
fn shift_particles(sys: &mut ParticleSystem, dt: f64) {
    let table = build_neighbors(&sys.positions, sys.kernel.support_radius(), &sys.domain);
    let c = concentration(sys, &table);
    let gc = concentration_gradient(sys, &table);
    let d = sys.params.shifting_coefficient * sys.kernel.h * sys.max_speed() * dt;
    for i in 0..sys.len() {
        if sys.kinds[i] != ParticleKind::Fluid {
            continue;
        }
        let mut dr = [-d * gc[i][0], -d * gc[i][1]];
        if c[i] < SURFACE_SHIFT_BAND {
            let norm = gc[i][0].hypot(gc[i][1]);
            if norm > 0.0 {
                let n = [gc[i][0] / norm, gc[i][1] / norm];
                let dn = dr[0] * n[0] + dr[1] * n[1];
                dr = [dr[0] - dn * n[0], dr[1] - dn * n[1]];
            }
        }
        let p = sys.positions[i];
        sys.positions[i] = sys.domain.wrap([p[0] + dr[0], p[1] + dr[1]]);
    }
}

/// Checks the state after step `sys.step - 1`, which is the step reported.
fn check_state(sys: &ParticleSystem) -> Result<()> {
    let step = sys.step.saturating_sub(1);
    let finite = sys.positions.iter().chain(&sys.velocities).all(|v| v[0].is_finite() && v[1].is_finite())
        && sys.pressures.iter().all(|p| p.is_finite());
    if !finite {
        return Err(Error::Diverged { step, reason: "non-finite particle state".into() });
    }
    let vmax = sys.max_speed();
    let limit = sys.params.blow_up_factor * sys.reference_speed;
    if sys.reference_speed > 0.0 && vmax > limit {
        return Err(Error::Diverged { step, reason: format!("max speed {vmax:.4e} exceeds {limit:.4e}") });
    }
    if let Some(i) = (0..sys.len()).find(|&i| sys.is_fluid(i) && !sys.domain.contains(sys.positions[i])) {
        return Err(Error::Diverged { step, reason: format!("fluid particle {i} left the domain at {:?}", sys.positions[i]) });
    }
    Ok(())
}

/// One projection step with the pressure solve gated by `corrector`.
pub fn isph_step(sys: &mut ParticleSystem, corrector: &mut Corrector) -> Result<StepReport> {
    let step = sys.step;
    let pred = predict(sys);
    let lsp = predicted_ppe(sys, &pred)?;
    let out = corrector.advance(step, lsp).map_err(|e| match e {
        Error::NotConverged { iterations, residual } => Error::Diverged {
            step,
            reason: format!("pressure solve stalled after {iterations} iterations (residual {residual:.3e})"),
        },
        other => other,
    })?;
    let action = match out {
        Some(p) => {
            apply_pressures(sys, &pred, &p);
            Action::Update
        }
        None => Action::Skip,
    };
    finish_step(sys, &pred)?;
    Ok(StepReport { step, time: sys.time, dt: pred.dt, action, max_speed: sys.max_speed() })
}
