use proptest::prelude::*;
use qpc_core::linsys::{csr_from_triplets, CgSettings, Lsp, SparseMatrix};
use qpc_core::pcore::{
    chi_squared_test, chi_squared_test_pooled, hpc_decide, qpc_decide, regularized_gamma_q, Action, Corrector,
    PcConfig, PcMode, Pooling,
};
use qpc_core::qemu::{derive_seed, distribution_from_solution, sample_readout, stream_rng};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn tridiagonal(n: usize) -> SparseMatrix {
    let mut e = Vec::new();
    for i in 0..n {
        e.push((i, i, 4.0));
        if i + 1 < n {
            e.push((i, i + 1, -1.0));
            e.push((i + 1, i, -1.0));
        }
    }
    csr_from_triplets(n, &e).unwrap()
}

/// Slowly drifting right-hand sides, one per step.
fn drifting_systems(n: usize, steps: usize) -> Vec<Lsp> {
    let a = tridiagonal(n);
    (0..steps)
        .map(|k| {
            let b = (0..n).map(|i| (i as f64 * 0.4 + 0.05 * k as f64).sin() + 0.2).collect();
            Lsp::new(a.clone(), b).unwrap()
        })
        .collect()
}

#[test]
fn gamma_identities_hold() {
    for k in 0..=400 {
        let x = k as f64 * 0.1;
        assert!((regularized_gamma_q(1.0, x).unwrap() - (-x).exp()).abs() <= 1e-8, "x={x}");
        let erfc = statrs::function::erf::erfc(x.sqrt());
        assert!((regularized_gamma_q(0.5, x).unwrap() - erfc).abs() <= 1e-8, "x={x}");
    }
}

#[test]
fn gamma_matches_independent_implementation() {
    for s in [0.5, 1.0, 1.5, 2.0, 3.5, 7.0, 15.0, 40.0] {
        for x in [0.01, 0.3, 1.0, 2.5, 6.0, 12.0, 30.0, 80.0] {
            let ours = regularized_gamma_q(s, x).unwrap();
            let theirs = statrs::function::gamma::gamma_ur(s, x);
            assert!((ours - theirs).abs() <= 1e-10 * theirs.max(1e-300).max(1e-12), "s={s} x={x}: {ours} {theirs}");
        }
    }
}

#[test]
fn chi_squared_p_value_matches_distribution() {
    let x: Vec<f64> = (0..12).map(|i| 1.0 + (i % 5) as f64).collect();
    let d = distribution_from_solution(&x).unwrap();
    for seed in 0..20 {
        let h = sample_readout(&d, 2000, seed).unwrap();
        let r = chi_squared_test(&h, &d).unwrap();
        let cdf = ChiSquared::new(r.dof as f64).unwrap().cdf(r.statistic);
        assert!((r.p_value - (1.0 - cdf)).abs() < 1e-9, "{r:?}");
    }
}

#[test]
fn chi_squared_false_rejection_rate_is_calibrated() {
    let uniform = distribution_from_solution(&[1.0; 16]).unwrap();
    for pooling in [Pooling::Aggregate, Pooling::Adjacent] {
        let rejected = (0..2000u64)
            .filter(|&t| {
                let h = sample_readout(&uniform, 385, derive_seed(2024, t)).unwrap();
                chi_squared_test_pooled(&h, &uniform, pooling).unwrap().p_value < 0.05
            })
            .count();
        let rate = rejected as f64 / 2000.0;
        assert!((rate - 0.05).abs() <= 0.02, "{pooling:?}: {rate}");
    }
}

#[test]
fn fcs_never_skips_or_samples() {
    let mut c = Corrector::new(PcConfig::new(PcMode::Fcs), CgSettings::default()).unwrap();
    for (k, lsp) in drifting_systems(20, 40).into_iter().enumerate() {
        assert!(c.advance(k, lsp).unwrap().is_some());
    }
    assert_eq!(c.ledger().skips(), 0);
    assert_eq!(c.ledger().samples_spent(), 0);
    assert_eq!(c.stats().classical_solves, 40);
    assert_eq!(c.stats().oracle_solves, 0);
}

#[test]
fn staged_policy_calls_inner_decider_t_minus_one_times() {
    for mode in [PcMode::Qpc, PcMode::Hpc] {
        for steps in [1usize, 2, 17, 60] {
            let cfg = PcConfig { async_staged: true, seed: 4, ..PcConfig::new(mode) };
            let mut c = Corrector::new(cfg, CgSettings::default()).unwrap();
            for (k, lsp) in drifting_systems(16, steps).into_iter().enumerate() {
                c.advance(k, lsp).unwrap();
            }
            assert_eq!(c.inner_calls(), Some(steps - 1));
            assert_eq!(c.ledger().decisions()[0].action, Action::Update);
            assert_eq!(c.ledger().decisions()[0].samples_spent, 0);
        }
    }
}

#[test]
fn skipped_steps_do_no_classical_work() {
    let cfg = PcConfig { seed: 8, ..PcConfig::new(PcMode::Qpc) };
    let mut c = Corrector::new(cfg, CgSettings::default()).unwrap();
    for (k, lsp) in drifting_systems(24, 80).into_iter().enumerate() {
        c.advance(k, lsp).unwrap();
    }
    assert!(c.ledger().skips() > 0);
    assert_eq!(c.stats().classical_solves, c.ledger().updates());
}

#[test]
fn qpc_skips_drift_and_catches_jumps() {
    let a = tridiagonal(16);
    let b: Vec<f64> = (0..16).map(|i| 1.0 + i as f64).collect();
    let x0 = Lsp::new(a.clone(), b.clone()).unwrap().solve(&CgSettings::default()).unwrap().x.clone();
    let cfg = PcConfig { overlap_threshold: 0.9, ..PcConfig::new(PcMode::Qpc) };
    let mut rng = stream_rng(1, 0);
    let scaled = Lsp::new(a.clone(), b.iter().map(|v| 3.0 * v).collect()).unwrap();
    let d = qpc_decide(0, &x0, &scaled, &cfg, &CgSettings::default(), &mut rng).unwrap();
    assert_eq!(d.action, Action::Skip);
    let flipped: Vec<f64> = b.iter().enumerate().map(|(i, v)| if i % 2 == 0 { *v } else { -v }).collect();
    let d = qpc_decide(1, &x0, &Lsp::new(a, flipped).unwrap(), &cfg, &CgSettings::default(), &mut rng).unwrap();
    assert_eq!(d.action, Action::Update);
}

fn pow2() -> impl Strategy<Value = f64> {
    // powers of two keep the scaled solves bitwise proportional
    (-20i32..20, any::<bool>()).prop_map(|(e, neg)| if neg { -(2f64.powi(e)) } else { 2f64.powi(e) })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decisions_ignore_scale(
        seed in any::<u64>(),
        alpha in pow2(),
        beta in pow2(),
        shift in 0.0f64..0.6,
    ) {
        let n = 12;
        let a = tridiagonal(n);
        let b0: Vec<f64> = (0..n).map(|i| (i as f64 * 0.5).cos() + 0.3).collect();
        let b1: Vec<f64> = (0..n).map(|i| (i as f64 * 0.5 + shift).cos() + 0.3).collect();
        let last = Lsp::new(a.clone(), b0).unwrap().solve(&CgSettings::default()).unwrap().x.clone();
        let last_scaled: Vec<f64> = last.iter().map(|v| alpha * v).collect();
        let cand = Lsp::new(a.clone(), b1.clone()).unwrap();
        let cand_scaled = Lsp::new(a, b1.iter().map(|v| beta * v).collect()).unwrap();
        let solver = CgSettings::default();
        for mode in [PcMode::Hpc, PcMode::Qpc] {
            let cfg = PcConfig::new(mode);
            let decide = |lk: &[f64], c: &Lsp| {
                let mut rng = stream_rng(seed, 0);
                match mode {
                    PcMode::Hpc => hpc_decide(3, lk, c, &cfg, &solver, &mut rng).unwrap(),
                    _ => qpc_decide(3, lk, c, &cfg, &solver, &mut rng).unwrap(),
                }
            };
            prop_assert_eq!(decide(&last, &cand).action, decide(&last_scaled, &cand_scaled).action);
        }
    }

    #[test]
    fn ledger_counts_are_consistent(seed in any::<u64>(), steps in 1usize..60) {
        let cfg = PcConfig { seed, ..PcConfig::new(PcMode::Hpc) };
        let mut c = Corrector::new(cfg, CgSettings::default()).unwrap();
        for (k, lsp) in drifting_systems(10, steps).into_iter().enumerate() {
            c.advance(k, lsp).unwrap();
        }
        let l = c.ledger();
        prop_assert_eq!(l.total_steps(), steps);
        prop_assert_eq!(l.updates() + l.skips(), steps);
        prop_assert_eq!(l.decisions()[0].action, Action::Update);
        prop_assert!(l.samples_spent() <= 385 * steps as u64);
    }
}
