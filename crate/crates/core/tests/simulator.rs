use nalgebra::DMatrix;
use proptest::prelude::*;
use qdlc_core::costmodel::CostConfig;
use qdlc_core::diagenc::walsh_term_circuit;
use qdlc_core::families;
use qdlc_core::simulator::{
    apply, extract_block, kl_divergence, run, shots_to_tolerance, verify_plan, verify_plan_with_limits,
    SamplingStudy, StateVector, Transform, VerifyLimits, VerifyStatus,
};
use qdlc_core::stateprep::{synth_mottonen, synth_sparse_sos};
use qdlc_core::{CircuitIR, ErrorBudget, GateRecord, QdlcError, TargetVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let v: Vec<C64> = (0..1 << n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let s = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(v.into_iter().map(|a| a / s).collect()).unwrap()
}

fn random_program(n: usize, rng: &mut ChaCha8Rng, len: usize) -> CircuitIR {
    let mut ir = CircuitIR::new(n, 0);
    for _ in 0..len {
        let q = rng.random_range(0..n);
        let o = (q + 1 + rng.random_range(0..n - 1)) % n;
        let th = rng.random_range(-3.0..3.0);
        ir.push(match rng.random_range(0..7) {
            0 => GateRecord::h(q),
            1 => GateRecord::ry(q, th),
            2 => GateRecord::rz(q, th),
            3 => GateRecord::cnot(q, o),
            4 => GateRecord::crz(q, o, th),
            5 => GateRecord::mux_ry(&[o], q, vec![th, -0.5 * th]),
            _ => GateRecord::s(q).with_controls(&[(o, false)]),
        });
    }
    ir
}

#[test]
fn apply_fixtures() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let psi = random_state(3, &mut rng);
    assert_eq!(apply(&CircuitIR::new(3, 0), &psi).unwrap(), psi);

    let mut ir = CircuitIR::new(1, 0);
    ir.push(GateRecord::h(0));
    let out = run(&ir).unwrap();
    let h = 0.5f64.sqrt();
    assert!((out.amplitudes[0] - C64::new(h, 0.0)).norm() < 1e-15 && (out.amplitudes[1] - C64::new(h, 0.0)).norm() < 1e-15);

    // a Walsh term is a diagonal phase exp(i c (-1)^{popcount(j & k)})
    let psi = random_state(4, &mut rng);
    for k in [1usize, 6, 11, 15] {
        let c = 0.37 * k as f64;
        let out = apply(&walsh_term_circuit(4, k, c), &psi).unwrap();
        for j in 0..16 {
            let s = if (j & k).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            assert!((out.amplitudes[j] - psi.amplitudes[j] * C64::from_polar(1.0, c * s)).norm() < 1e-12);
        }
    }
}

#[test]
fn apply_rejects_bad_programs() {
    let mut ir = CircuitIR::new(2, 0);
    ir.push(GateRecord::cnot(0, 5));
    assert!(run(&ir).is_err());
    let mut ir = CircuitIR::new(2, 0);
    ir.push(GateRecord::cnot(1, 1));
    assert!(run(&ir).is_err());
    assert!(matches!(apply(&CircuitIR::new(2, 0), &StateVector::zero(3).unwrap()), Err(_)));
    assert!(matches!(StateVector::zero(27), Err(QdlcError::Resource(_))));
}

#[test]
fn extract_block_fixtures() {
    let ir = CircuitIR::new(2, 1);
    let b = extract_block(&ir, 1).unwrap();
    assert_eq!(b, DMatrix::<C64>::identity(4, 4));
    assert!(matches!(extract_block(&CircuitIR::new(10, 3), 3), Err(QdlcError::Resource(_))));
}

#[test]
fn verify_fixtures() {
    let t = families::random_state(6, true, 3).unwrap();
    let cfg = CostConfig::default();
    let (p, ir) = synth_mottonen(&t, ErrorBudget::new(1e-3, 1.0).unwrap(), &cfg).unwrap();
    let v = verify_plan(&p, &ir, &t).unwrap();
    assert_eq!(v.status, VerifyStatus::Pass);
    assert!(v.pass && v.norm == "l2" && v.achieved_error.unwrap() < 1e-10);

    let t = TargetVector::state(&[0.97f64.sqrt(), 0.1, 0.1, 0.1]).unwrap();
    let (p, ir) = synth_sparse_sos(&t, ErrorBudget::new(0.201, 0.001 / 0.201).unwrap(), &cfg).unwrap();
    let v = verify_plan(&p, &ir, &t).unwrap();
    assert!((v.achieved_error.unwrap() - 0.17386).abs() < 1e-5);

    // a circuit for the wrong state fails against its own prediction
    let other = families::random_state(6, true, 4).unwrap();
    let (p, ir) = synth_mottonen(&other, ErrorBudget::new(1e-3, 1.0).unwrap(), &cfg).unwrap();
    let v = verify_plan(&p, &ir, &families::random_state(6, true, 3).unwrap()).unwrap();
    assert_eq!(v.status, VerifyStatus::Fail);
    assert!(!v.pass);

    let big = families::sparse_random(16, 4, 1).unwrap();
    let (p, ir) = synth_sparse_sos(&big, ErrorBudget::new(1e-3, 1.0).unwrap(), &cfg).unwrap();
    let v = verify_plan_with_limits(&p, &ir, &big, VerifyLimits { system: 10, total: 22 }).unwrap();
    assert_eq!(v.status, VerifyStatus::UnverifiedAtScale);
    assert!(v.achieved_error.is_none());
}

#[test]
fn kl_fixtures() {
    let p = [0.2, 0.3, 0.5];
    assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
    assert!((kl_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap() - 2f64.ln()).abs() < 1e-15);
    assert!((kl_divergence(&[0.75, 0.25], &[0.25, 0.75]).unwrap() - 0.5 * 3f64.ln()).abs() < 1e-15);
    assert!((kl_divergence(&[0.75, 0.25], &[0.25, 0.75]).unwrap() - 0.5493).abs() < 1e-4);
    assert!(kl_divergence(&[1.2, -0.2], &[0.5, 0.5]).is_err());
}

#[test]
fn shot_study_fixtures() {
    let mut delta = vec![C64::new(0.0, 0.0); 8];
    delta[3] = C64::new(1.0, 0.0);
    let grid = SamplingStudy::log_grid(0, 4, 1);
    assert_eq!(grid, vec![1, 10, 100, 1000, 10000]);
    let study = SamplingStudy { transforms: vec![Transform::Identity], ..SamplingStudy::new(delta, grid.clone(), 10, 1) };
    let (res, rows) = shots_to_tolerance(&study, 0.1).unwrap();
    assert_eq!(res[0].shots, Some(1));
    assert!(rows.iter().all(|r| r.kl == 0.0));

    // uniform amplitudes are a single Walsh outcome
    let uniform = vec![C64::new(0.25, 0.0); 16];
    let study = SamplingStudy::new(uniform, grid, 10, 2);
    let (res, _) = shots_to_tolerance(&study, 0.1).unwrap();
    let shots = |t: Transform| res.iter().find(|r| r.transform == t).unwrap().shots;
    assert_eq!(shots(Transform::Walsh), Some(1));
    assert!(shots(Transform::Identity).is_none_or(|s| s > 1));

    let study = SamplingStudy::new(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)], vec![10], 5, 0);
    assert!(shots_to_tolerance(&study, 0.1).is_err());
}

#[test]
fn kl_vanishes_with_many_shots() {
    let amps: Vec<C64> = [0.1f64, 0.2, 0.3, 0.4].iter().map(|p| C64::new(p.sqrt(), 0.0)).collect();
    let study = SamplingStudy { transforms: vec![Transform::Identity], ..SamplingStudy::new(amps, vec![1_000_000], 10, 5) };
    let (res, _) = shots_to_tolerance(&study, 1e-3).unwrap();
    assert_eq!(res[0].shots, Some(1_000_000));
    assert!(res[0].last_mean_kl < 1e-3);
}

#[test]
fn studies_are_reproducible() {
    let t = families::gaussian(5, 0.2).unwrap();
    let study = SamplingStudy::new(t.amplitudes.clone(), vec![10, 100], 10, 42);
    let (a, ra) = shots_to_tolerance(&study, 0.1).unwrap();
    let (b, rb) = shots_to_tolerance(&study, 0.1).unwrap();
    assert_eq!(a, b);
    assert_eq!(ra, rb);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn programs_preserve_norm(seed in 0u64..100_000, n in 2usize..=6, len in 0usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ir = random_program(n, &mut rng, len);
        let psi = random_state(n, &mut rng);
        prop_assert!((apply(&ir, &psi).unwrap().norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn interpreter_is_linear(seed in 0u64..100_000, n in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ir = random_program(n, &mut rng, 24);
        let (a, b) = (random_state(n, &mut rng), random_state(n, &mut rng));
        let (x, y) = (C64::new(0.6, 0.2), C64::new(-0.3, 0.7));
        let mixed: Vec<C64> = a.amplitudes.iter().zip(&b.amplitudes).map(|(p, q)| x * p + y * q).collect();
        let s = mixed.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let out = apply(&ir, &StateVector::from_amplitudes(mixed.iter().map(|z| z / s).collect()).unwrap()).unwrap();
        let (oa, ob) = (apply(&ir, &a).unwrap(), apply(&ir, &b).unwrap());
        for j in 0..1 << n {
            let want = (x * oa.amplitudes[j] + y * ob.amplitudes[j]) / s;
            prop_assert!((out.amplitudes[j] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn kl_is_nonnegative(v in proptest::collection::vec(0.01f64..1.0, 12)) {
        let (p, q) = v.split_at(6);
        let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
        let p: Vec<f64> = p.iter().map(|x| x / sp).collect();
        let q: Vec<f64> = q.iter().map(|x| x / sq).collect();
        prop_assert!(kl_divergence(&p, &q).unwrap() >= 0.0);
    }
}
