use super::advect::{advect_v, advect_x};
use super::grid::{charge_density, PhaseSpaceGrid};
use super::poisson::{assemble_poisson_1d, poisson_lsp, FieldState};
use crate::error::{Error, Result};
use crate::pcore::{Action, Corrector};

/// Growth of max |E| over its initial value that counts as divergence.
pub const FIELD_BLOW_UP: f64 = 1e6;

/// Strang-split step: half drift, field decision, full kick, half drift.
/// On a skip the previous field is reused for the kick.
pub fn vlasov_step(
    grid: &mut PhaseSpaceGrid,
    field: &mut FieldState,
    step: usize,
    dt: f64,
    corrector: &mut Corrector,
) -> Result<Action> {
    advect_x(grid, 0.5 * dt);
    let a = assemble_poisson_1d(grid.nx, grid.dx)?;
    let lsp = poisson_lsp(&a, &charge_density(grid), grid.eps0)?;
    let action = match corrector.advance(step, lsp).map_err(|e| match e {
        Error::NotConverged { iterations, residual } => Error::Diverged {
            step,
            reason: format!("Poisson solve stalled after {iterations} iterations (residual {residual:.3e})"),
        },
        other => other,
    })? {
        Some(phi) => {
            field.update(phi, grid.dx, step);
            Action::Update
        }
        None => Action::Skip,
    };
    advect_v(grid, &field.e_field, dt);
    advect_x(grid, 0.5 * dt);
    check_state(grid, field, step)?;
    Ok(action)
}

fn check_state(grid: &PhaseSpaceGrid, field: &FieldState, step: usize) -> Result<()> {
    if grid.f.iter().chain(&field.e_field).any(|v| !v.is_finite()) {
        return Err(Error::Diverged { step, reason: "non-finite distribution or field".into() });
    }
    let emax = field.e_field.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    if field.reference_e > 0.0 && emax > FIELD_BLOW_UP * field.reference_e {
        return Err(Error::Diverged {
            step,
            reason: format!("max |E| {emax:.4e} exceeds {:.0e} x initial", FIELD_BLOW_UP),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linsys::CgSettings;
    use crate::pcore::{PcConfig, PcMode};
    use crate::vlasov::{energies, init_two_stream, TwoStreamSpec};

    fn run(spec: &TwoStreamSpec, mode: PcMode, steps: usize) -> (PhaseSpaceGrid, FieldState, Corrector) {
        let mut g = init_two_stream(spec).unwrap();
        let mut field = FieldState::solve(&g, &CgSettings::default()).unwrap();
        let mut corr = Corrector::new(PcConfig::new(mode), CgSettings::default()).unwrap();
        for n in 0..steps {
            vlasov_step(&mut g, &mut field, n, spec.dt, &mut corr).unwrap();
        }
        (g, field, corr)
    }

    #[test]
    fn unperturbed_state_skips_everything() {
        let spec = TwoStreamSpec { alpha: 0.0, ..Default::default() };
        let (g, field, corr) = run(&spec, PcMode::Qpc, 30);
        assert!(field.e_field.iter().all(|&e| e == 0.0));
        assert_eq!(corr.ledger().skips(), 30);
        assert_eq!(corr.stats().classical_iterations, 0);
        let g0 = init_two_stream(&spec).unwrap();
        assert_eq!(g.f, g0.f);
    }

    #[test]
    fn mass_is_conserved() {
        let spec = TwoStreamSpec::default();
        let g0 = init_two_stream(&spec).unwrap();
        let (g, _, _) = run(&spec, PcMode::Fcs, 50);
        let (m0, m1) = (g0.total_mass(), g.total_mass());
        assert!(((m1 - m0) / m0).abs() < 50.0 * 1e-8);
    }

    #[test]
    fn fcs_energy_is_bounded() {
        let spec = TwoStreamSpec::default();
        let g0 = init_two_stream(&spec).unwrap();
        let f0 = FieldState::solve(&g0, &CgSettings::default()).unwrap();
        let (uk0, ue0) = energies(&g0, &f0.e_field);
        let (g, f, corr) = run(&spec, PcMode::Fcs, 100);
        let (uk, ue) = energies(&g, &f.e_field);
        assert!(((uk + ue) - (uk0 + ue0)).abs() < 0.02 * (uk0 + ue0));
        assert_eq!(corr.ledger().skips(), 0);
    }
}
