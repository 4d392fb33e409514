use std::f64::consts::PI;

use nalgebra::DMatrix;
use qdlc_core::costmodel::CostConfig;
use qdlc_core::families;
use qdlc_core::simulator::{run, verify_plan, VerifyStatus};
use qdlc_core::stateprep::qrom::{code_angle, angle_code};
use qdlc_core::stateprep::{
    build_alias_table, grover_rudolph_angles, mps_compress, solve_alias_mu, solve_mottonen, solve_mps_delta,
    solve_qrom_bits, synth_alias, synth_fsl, synth_mottonen, synth_mps, synth_qrom_stateprep, synth_sparse_sos,
};
use qdlc_core::{ErrorBudget, GateKind, TargetVector, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> CostConfig {
    CostConfig::default()
}

fn exact() -> ErrorBudget {
    ErrorBudget::new(1e-3, 1.0).unwrap()
}

/// Budget with the given approximation share and a generous precision share.
fn with_eps_a(eps_a: f64) -> ErrorBudget {
    let eps = eps_a + 1e-3;
    ErrorBudget::new(eps, 1e-3 / eps).unwrap()
}

fn sim_error(ir: &qdlc_core::CircuitIR, t: &TargetVector) -> f64 {
    let out = run(ir).unwrap();
    out.amplitudes[..t.dim()].iter().zip(&t.amplitudes).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

#[test]
fn mottonen_tolerance_fixtures() {
    assert_eq!(solve_mottonen(1, 0.1), 0.1);
    assert!((solve_mottonen(11, 1e-3) - 1e-3 / 2047f64.sqrt()).abs() < 1e-18);
    assert!((solve_mottonen(11, 1e-3) - 2.210e-5).abs() < 1e-8);
    // pinned: 5e-4 / sqrt(2^20 - 1)
    assert!((solve_mottonen(20, 5e-4) - 4.882815e-7).abs() < 1e-12);
}

#[test]
fn qrom_bit_fixtures() {
    assert_eq!(solve_qrom_bits(1, PI / 2.0), 1);
    assert_eq!(solve_qrom_bits(11, 1e-3), 18);
    // pinned: pi * sqrt(2^14 - 1) * 1e4 is about 4.02e6, so 22 bits
    assert_eq!(solve_qrom_bits(14, 1e-4), 22);
}

#[test]
fn grover_rudolph_fixtures() {
    let a = grover_rudolph_angles(&TargetVector::state(&[1.0, 0.0]).unwrap()).unwrap();
    assert_eq!(a.ry, vec![vec![0.0]]);
    let a = grover_rudolph_angles(&TargetVector::state(&[1.0, 1.0]).unwrap()).unwrap();
    assert!((a.ry[0][0] - PI / 2.0).abs() < 1e-15);
    let a = grover_rudolph_angles(&TargetVector::state(&[0.6, 0.8]).unwrap()).unwrap();
    assert!((a.ry[0][0] - 2.0 * 0.6f64.acos()).abs() < 1e-15);
    assert!((a.ry[0][0] - 1.8546).abs() < 1e-4);
}

#[test]
fn mottonen_examples() {
    let t = TargetVector::state(&[1.0, 0.0]).unwrap();
    let (p, ir) = synth_mottonen(&t, exact(), &cfg()).unwrap();
    assert_eq!(p.resources.rotation_count, 1);
    assert!(sim_error(&ir, &t) < 1e-15);

    let t = TargetVector::state(&[0.5; 4]).unwrap();
    let (p, ir) = synth_mottonen(&t, exact(), &cfg()).unwrap();
    assert_eq!(p.resources.rotation_count, 3);
    assert!(sim_error(&ir, &t) < 1e-12);
    let a = grover_rudolph_angles(&t).unwrap();
    assert!(a.ry.iter().flatten().all(|&x| (x - PI / 2.0).abs() < 1e-15));

    let g = families::gaussian(11, 0.5).unwrap();
    let (p, _) = synth_mottonen(&g, exact(), &cfg()).unwrap();
    assert_eq!(p.resources.rotation_count, 2047);
}

/// Amplitudes of the rotation cascade for a nonnegative target with every
/// angle moved to the m-bit grid.
fn rounded_cascade(levels: &[Vec<f64>], m: u32) -> Vec<f64> {
    let n = levels.len();
    (0..1usize << n)
        .map(|i| {
            (0..n)
                .map(|k| {
                    let bit = (i >> (n - 1 - k)) & 1;
                    let prefix = i >> (n - k);
                    let th = code_angle(angle_code(levels[k][prefix], m), m);
                    if bit == 0 {
                        (th / 2.0).cos()
                    } else {
                        (th / 2.0).sin()
                    }
                })
                .product()
        })
        .collect()
}

#[test]
fn qrom_matches_rounded_angle_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let v: Vec<f64> = (0..8).map(|_| rng.random_range(0.0..1.0)).collect();
    let t = TargetVector::state(&v).unwrap();
    let eps_p = 2.0 * PI * 7f64.sqrt() * (2f64).powi(-18);
    let (p, ir) = synth_qrom_stateprep(&t, ErrorBudget::new(eps_p, 1.0).unwrap(), &cfg(), false).unwrap();
    assert_eq!(p.param("m"), Some(18.0));
    let oracle = rounded_cascade(&grover_rudolph_angles(&t).unwrap().ry, 18);
    let out = run(&ir).unwrap();
    for (a, b) in out.amplitudes[..8].iter().zip(&oracle) {
        assert!((a - C64::new(*b, 0.0)).norm() < 1e-12);
    }
    assert!(sim_error(&ir, &t) <= eps_p);

    // degenerate single-qubit lookup
    let t = TargetVector::state(&[0.6, 0.8]).unwrap();
    let (p, ir) = synth_qrom_stateprep(&t, ErrorBudget::new(1e-2, 1.0).unwrap(), &cfg(), false).unwrap();
    let m = p.param("m").unwrap() as usize;
    let lookups = ir.gates.iter().filter(|g| g.kind == GateKind::QROMLookup).count();
    let rotations = ir.gates.iter().filter(|g| g.kind == GateKind::RY).count();
    assert_eq!(lookups, 2, "compute and uncompute");
    assert!(ir.gates.iter().filter(|g| g.kind == GateKind::QROMLookup).all(|g| g.table.as_ref().unwrap().len() == 1));
    assert_eq!(rotations, m + 1);
}

#[test]
fn sparse_fixtures() {
    let t = TargetVector::state(&[0.5, 0.0, 0.5, 0.0, 0.0, 0.5, 0.0, 0.5]).unwrap();
    let (p, ir) = synth_sparse_sos(&t, exact(), &cfg()).unwrap();
    assert_eq!(p.param("D"), Some(4.0));
    assert!(sim_error(&ir, &t) < 1e-12);

    // keeping only the first entry renormalizes it to 1: error^2 = 2 (1 - sqrt(.97))
    let t = TargetVector::state(&[0.97f64.sqrt(), 0.1, 0.1, 0.1]).unwrap();
    let (p, ir) = synth_sparse_sos(&t, with_eps_a(0.2), &cfg()).unwrap();
    assert_eq!(p.param("D"), Some(1.0));
    let oracle = (2.0 * (1.0 - 0.97f64.sqrt())).sqrt();
    assert!((p.eps_a_predicted - oracle).abs() < 1e-12);
    assert!((oracle - 0.17386).abs() < 1e-5);
    let v = verify_plan(&p, &ir, &t).unwrap();
    assert!((v.achieved_error.unwrap() - oracle).abs() < 1e-10);
}

#[test]
fn mps_compression_fixtures() {
    let mut zero = vec![0.0; 16];
    zero[0] = 1.0;
    let f = mps_compress(&TargetVector::state(&zero).unwrap(), 1).unwrap();
    assert!(f.error < 1e-12);

    let bell = TargetVector::state(&[1.0, 0.0, 0.0, 1.0]).unwrap();
    assert!(mps_compress(&bell, 1).unwrap().error > 0.2);
    assert!(mps_compress(&bell, 2).unwrap().error < 1e-12);

    // optimal rank-2 error of a single cut is the singular-value tail
    let t = families::random_state(6, true, 12).unwrap();
    let m = DMatrix::from_fn(2, 32, |r, c| t.amplitudes[r * 32 + c]);
    let sv = m.singular_values();
    let f = mps_compress(&t, 1).unwrap();
    assert!(f.error >= sv.min() - 1e-12);
}

#[test]
fn mps_tolerance_fixtures() {
    assert_eq!(solve_mps_delta(&[1], 0.3).unwrap(), 0.15);
    assert!((solve_mps_delta(&[2; 11], 1e-3).unwrap() - 1e-3 / 176f64.sqrt()).abs() < 1e-18);
    assert!((solve_mps_delta(&[2; 11], 1e-3).unwrap() - 7.54e-5).abs() < 1e-7);
    // pinned: 1e-3 / sqrt(4 * 11 * 1024)
    assert!((solve_mps_delta(&[32; 11], 1e-3).unwrap() - 4.7111e-6).abs() < 1e-9);
    assert!(solve_mps_delta(&[], 1e-3).is_err());
}

#[test]
fn mps_synthesis_fixtures() {
    let mut v = vec![0.0; 8];
    v[5] = 1.0;
    let t = TargetVector::state(&v).unwrap();
    let (p, ir) = synth_mps(&t, exact(), &cfg()).unwrap();
    assert_eq!(p.param("chi"), Some(1.0));
    assert_eq!(ir.gates.iter().filter(|g| g.kind == GateKind::BlockGate).count(), 3);
    assert!(sim_error(&ir, &t) < 1e-12);

    let smooth = TargetVector::state(
        &(0..2048).map(|i| (-((i as f64 / 2048.0) - 0.5).powi(2) / 0.08).exp()).collect::<Vec<_>>(),
    )
    .unwrap();
    // sweep truncation sits between the worst single-cut tail and the root-sum of all tails
    let tails: Vec<f64> = (1..11)
        .map(|k| {
            let m = DMatrix::from_fn(1 << k, 2048 >> k, |r, c| smooth.amplitudes[r * (2048 >> k) + c].re);
            let sv = m.singular_values();
            let mut s: Vec<f64> = sv.iter().copied().collect();
            s.sort_by(|a, b| b.total_cmp(a));
            s[2..].iter().map(|x| x * x).sum::<f64>().sqrt()
        })
        .collect();
    let lo = tails.iter().copied().fold(0.0, f64::max);
    let hi = tails.iter().map(|t| t * t).sum::<f64>().sqrt();
    let two = mps_compress(&smooth, 2).unwrap().error;
    assert!(two >= lo - 1e-12 && two <= hi + 1e-12, "chi=2 error {two} outside [{lo}, {hi}]");
    let (p, ir) = synth_mps(&smooth, with_eps_a(3e-4), &cfg()).unwrap();
    let chi = p.param("chi").unwrap() as usize;
    assert!(mps_compress(&smooth, chi / 2).unwrap().error > 3e-4, "chi {chi} is not minimal");
    assert!(sim_error(&ir, &smooth) <= 3e-4);

    let mut ghz = vec![0.0; 16];
    ghz[0] = 1.0;
    ghz[15] = 1.0;
    let t = TargetVector::state(&ghz).unwrap();
    let (p, ir) = synth_mps(&t, exact(), &cfg()).unwrap();
    assert_eq!(p.param("chi"), Some(2.0));
    assert!(sim_error(&ir, &t) < 1e-12);
}

#[test]
fn fsl_fixtures() {
    let (p, ir) = synth_fsl(&TargetVector::state(&[1.0; 32]).unwrap(), exact(), &cfg()).unwrap();
    assert_eq!(p.param("d"), Some(1.0));
    assert!(sim_error(&ir, &TargetVector::state(&[1.0; 32]).unwrap()) < 1e-12);

    let cosine: Vec<f64> = (0..256).map(|j| (2.0 * PI * 3.0 * j as f64 / 256.0).cos()).collect();
    let t = TargetVector::state(&cosine).unwrap();
    let (p, ir) = synth_fsl(&t, exact(), &cfg()).unwrap();
    assert_eq!(p.param("d"), Some(2.0));
    assert!(sim_error(&ir, &t) < 1e-12);

    // 32 coefficients leave 9.1e-4 on this grid, so the tighter share needs 64
    let g = families::gaussian(11, 0.5).unwrap();
    let (p, ir) = synth_fsl(&g, with_eps_a(9.5e-4), &cfg()).unwrap();
    assert_eq!(p.param("d"), Some(32.0));
    assert!(sim_error(&ir, &g) <= 9.5e-4);
    let (p, ir) = synth_fsl(&g, with_eps_a(4e-4), &cfg()).unwrap();
    assert_eq!(p.param("d"), Some(64.0));
    assert!(sim_error(&ir, &g) <= 4e-4);
}

#[test]
fn fsl_error_equals_inverse_dft_prediction() {
    // truncation oracle: keep the 8 largest DFT coefficients, renormalize, invert
    let dim = 64;
    let v: Vec<f64> = (0..dim).map(|j| (-((j as f64 / dim as f64) - 0.4).powi(2) / 0.01).exp()).collect();
    let t = TargetVector::state(&v).unwrap();
    let amp = &t.amplitudes;
    let coef: Vec<C64> = (0..dim)
        .map(|k| {
            (0..dim).map(|j| amp[j] * C64::from_polar(1.0, 2.0 * PI * (j * k) as f64 / dim as f64)).sum::<C64>()
                / (dim as f64).sqrt()
        })
        .collect();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| coef[b].norm().total_cmp(&coef[a].norm()));
    let kept: f64 = order[..8].iter().map(|&k| coef[k].norm_sqr()).sum();
    let predicted = (2.0 * (1.0 - kept.sqrt())).sqrt();

    let (p, ir) = synth_fsl(&t, with_eps_a(predicted * 1.0001), &cfg()).unwrap();
    assert_eq!(p.param("d"), Some(8.0));
    assert!((p.eps_a_predicted - predicted).abs() < 1e-10);
    let v = verify_plan(&p, &ir, &t).unwrap();
    assert!((v.achieved_error.unwrap() - predicted).abs() < 1e-10);
}

#[test]
fn alias_table_fixtures() {
    let t = build_alias_table(&[0.25; 4], 2).unwrap();
    assert_eq!(t.thresholds, vec![4; 4]);

    let t = build_alias_table(&[0.75, 0.25], 2).unwrap();
    assert_eq!(t.thresholds, vec![4, 2]);
    assert_eq!(t.destinations[1], 0);

    // reconstruct by counting blocks: outcome i keeps t_i of 2^mu blocks and
    // receives the rest of every j that exports to it
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let w: Vec<f64> = (0..8).map(|_| rng.random_range(0.0..1.0)).collect();
    let s: f64 = w.iter().sum();
    let p: Vec<f64> = w.iter().map(|x| x / s).collect();
    let mu = 10;
    let t = build_alias_table(&p, mu).unwrap();
    let blocks = (1u64 << mu) as f64;
    let mut q = vec![0.0; 8];
    for j in 0..8 {
        q[j] += t.thresholds[j] as f64 / blocks / 8.0;
        q[t.destinations[j]] += (blocks - t.thresholds[j] as f64) / blocks / 8.0;
    }
    let err = q.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    assert!(err <= (2f64).powi(-10) * 8f64.sqrt());
}

#[test]
fn alias_mu_fixtures() {
    assert_eq!(solve_alias_mu(0.5), 1);
    assert_eq!(solve_alias_mu(1e-3), 10);
    assert_eq!(solve_alias_mu((2f64).powi(-15)), 15);
}

fn marginal(ir: &qdlc_core::CircuitIR, dim: usize) -> Vec<f64> {
    let out = run(ir).unwrap();
    let mut q = vec![0.0; dim];
    for (i, a) in out.amplitudes.iter().enumerate() {
        q[i % dim] += a.norm_sqr();
    }
    q
}

#[test]
fn alias_synthesis_fixtures() {
    let t = TargetVector::state(&[0.5; 4]).unwrap();
    let (_, ir) = synth_alias(&t, ErrorBudget::new(0.1, 1.0).unwrap(), &cfg()).unwrap();
    assert!(marginal(&ir, 4).iter().all(|q| (q - 0.25).abs() < 1e-12));

    let t = TargetVector::state(&[0.75f64.sqrt(), 0.5]).unwrap();
    let (p, ir) = synth_alias(&t, ErrorBudget::new(0.25, 1.0).unwrap(), &cfg()).unwrap();
    assert_eq!(p.param("mu"), Some(2.0));
    let q = marginal(&ir, 2);
    assert!((q[0] - 0.75).abs() < 1e-12 && (q[1] - 0.25).abs() < 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let v: Vec<f64> = (0..16).map(|_| rng.random_range(0.0..1.0)).collect();
    let t = TargetVector::state(&v).unwrap();
    let (_, ir) = synth_alias(&t, ErrorBudget::new(1e-3, 1.0).unwrap(), &cfg()).unwrap();
    let q = marginal(&ir, 16);
    let err = q.iter().zip(&t.amplitudes).map(|(a, b)| (a - b.norm_sqr()).powi(2)).sum::<f64>().sqrt();
    assert!(err <= 1e-3);
}

#[test]
fn verification_examples() {
    let t = families::random_state(6, true, 6).unwrap();
    let (p, ir) = synth_mottonen(&t, exact(), &cfg()).unwrap();
    let v = verify_plan(&p, &ir, &t).unwrap();
    assert_eq!(v.status, VerifyStatus::Pass);
    assert!(v.achieved_error.unwrap() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn alias_tables_reconstruct_within_grid(w in proptest::collection::vec(0.0f64..1.0, 16), mu in 2u32..14) {
        let s: f64 = w.iter().sum();
        prop_assume!(s > 1e-6);
        let p: Vec<f64> = w.iter().map(|x| x / s).collect();
        let t = build_alias_table(&p, mu).unwrap();
        let blocks = (1u64 << mu) as f64;
        let mut q = vec![0.0; 16];
        for j in 0..16 {
            prop_assert!(t.thresholds[j] <= 1 << mu);
            q[j] += t.thresholds[j] as f64 / blocks / 16.0;
            q[t.destinations[j]] += (blocks - t.thresholds[j] as f64) / blocks / 16.0;
        }
        prop_assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let err = q.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        prop_assert!(err <= (2f64).powi(-(mu as i32)) * 4.0 + 1e-12);
    }

    #[test]
    fn loaders_emit_unit_states(seed in 0u64..10_000, n in 1usize..=5) {
        let t = families::random_state(n, seed % 2 == 1, seed).unwrap();
        let b = ErrorBudget::new(1e-2, 0.5).unwrap();
        for (p, ir) in [
            synth_mottonen(&t, b, &cfg()).unwrap(),
            synth_sparse_sos(&t, b, &cfg()).unwrap(),
            synth_mps(&t, b, &cfg()).unwrap(),
            synth_fsl(&t, b, &cfg()).unwrap(),
        ] {
            prop_assert!((run(&ir).unwrap().norm() - 1.0).abs() < 1e-10);
            prop_assert!(p.eps_a_predicted <= b.eps_a + 1e-15 || !p.feasible);
        }
    }
}
