//! Benchmark fixtures.

use qpc_core::cases::{tgv_init, TgvSpec};
use qpc_core::isph::{predict, predicted_ppe, ParticleSystem, SphParams};
use qpc_core::linsys::Lsp;
use qpc_core::vlasov::{assemble_poisson_1d, charge_density, init_two_stream, poisson_lsp, TwoStreamSpec};

/// TGV particles on an `n x n` lattice after one full-solve step.
pub fn tgv_system(n: usize) -> ParticleSystem {
    tgv_init(&TgvSpec::with_side(n), SphParams::default()).expect("valid tgv spec")
}

/// Pressure system of the first TGV step at `n x n`.
pub fn tgv_ppe(n: usize) -> Lsp {
    let mut sys = tgv_system(n);
    let pred = predict(&sys);
    predicted_ppe(&mut sys, &pred).expect("assembles")
}

/// Periodic Poisson system of the default two-stream start.
pub fn two_stream_poisson() -> Lsp {
    let g = init_two_stream(&TwoStreamSpec::default()).expect("valid spec");
    let a = assemble_poisson_1d(g.nx, g.dx).expect("valid grid");
    poisson_lsp(&a, &charge_density(&g), g.eps0).expect("assembles")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(tgv_ppe(8).dim(), 64);
        assert_eq!(two_stream_poisson().dim(), 64);
    }
}
