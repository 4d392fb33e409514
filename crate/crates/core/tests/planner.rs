use proptest::prelude::*;
use qdlc_core::families;
use qdlc_core::planner::{check_hyperparams, hybrid_plan, omega_tradeoff_curve, synthesize_selected};
use qdlc_core::simulator::{run, verify_plan, VerifyStatus};
use qdlc_core::{sweep, Method, PlanRequest, QdlcError, TargetVector};

fn l2_to_target(ir: &qdlc_core::CircuitIR, t: &TargetVector) -> f64 {
    let out = run(ir).unwrap();
    out.amplitudes[..t.dim()].iter().zip(&t.amplitudes).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

#[test]
fn single_qubit_basis_state_costs_nothing() {
    // every loader is exact here; sparse needs no rotation at all and wins on T count
    let t = TargetVector::state(&[1.0, 0.0]).unwrap();
    let r = sweep(&PlanRequest::new(t.clone(), 1e-3)).unwrap();
    let s = r.selected.as_ref().unwrap();
    assert_eq!(s.method, Method::SparseSOS);
    assert_eq!(s.resources.t_count, 0);
    let m = r.per_method_per_omega.iter().find(|p| p.method == Method::Mottonen).unwrap();
    assert!(m.feasible);
    assert_eq!(m.resources.rotation_count, 1);
}

#[test]
fn gaussian_selects_fourier_loader() {
    let g = families::gaussian(11, 0.5).unwrap();
    let r = sweep(&PlanRequest::new(g.clone(), 1e-3)).unwrap();
    let s = r.selected.clone().unwrap();
    assert_eq!(s.method, Method::FSL);
    assert!(s.param("d").unwrap() <= 32.0);
    for m in [Method::Mottonen, Method::QromStatePrep, Method::SparseSOS] {
        let best = r.best_per_method().into_iter().find(|p| p.method == m).unwrap();
        assert!(best.resources.t_count > s.resources.t_count, "{m} beat fsl");
    }
    let (p, ir) = synthesize_selected(&r, &g, &Default::default()).unwrap();
    assert!(l2_to_target(&ir, &g) <= p.eps_a_predicted + 1e-10);
}

#[test]
fn twenty_qubit_sparse_vector_selects_sparse() {
    let t = families::sparse_random(20, 16, 9).unwrap();
    let r = sweep(&PlanRequest::new(t, 1e-3)).unwrap();
    let s = r.selected.clone().unwrap();
    assert_eq!(s.method, Method::SparseSOS);
    let m = r.best_per_method().into_iter().find(|p| p.method == Method::Mottonen).unwrap();
    assert!(m.resources.t_count > 1000 * s.resources.t_count);
}

#[test]
fn selected_plans_pass_independent_checks() {
    for (t, eps) in [
        (families::gaussian(8, 0.3).unwrap(), 1e-3),
        (families::random_state(5, true, 4).unwrap(), 1e-2),
        (families::parabolic_diagonal(6).unwrap(), 1e-4),
        (families::sparse_random(7, 5, 2).unwrap(), 1e-3),
    ] {
        let r = sweep(&PlanRequest::new(t.clone(), eps)).unwrap();
        let s = r.selected.clone().unwrap();
        assert!(s.feasible);
        assert!(s.eps_a_predicted <= s.budget.eps_a * (1.0 + 1e-12) + 1e-15);
        check_hyperparams(&s, t.n_qubits).unwrap();
        let (p, ir) = synthesize_selected(&r, &t, &Default::default()).unwrap();
        let v = verify_plan(&p, &ir, &t).unwrap();
        assert_eq!(v.status, VerifyStatus::Pass, "{} {:?}", s.method, v.achieved_error);
    }
}

#[test]
fn omega_one_has_no_approximation_error() {
    let t = families::gaussian(6, 0.3).unwrap();
    let r = sweep(&PlanRequest::new(t, 1e-3)).unwrap();
    for p in r.per_method_per_omega.iter().filter(|p| p.budget.omega == 1.0) {
        assert!(p.eps_a_predicted == 0.0 || !p.feasible, "{} {}", p.method, p.eps_a_predicted);
    }
}

#[test]
fn mottonen_cost_falls_with_omega() {
    let t = families::gaussian(9, 0.5).unwrap();
    let rows = omega_tradeoff_curve(&PlanRequest::new(t, 1e-3), Method::Mottonen).unwrap();
    assert_eq!(rows.len(), 20);
    assert_eq!(rows.last().unwrap().omega, 1.0);
    assert!(rows.windows(2).all(|w| w[1].t_count <= w[0].t_count));
    assert!(rows.iter().all(|r| r.feasible && r.eps_a_predicted == 0.0));
}

#[test]
fn fsl_tradeoff_curve_is_pinned() {
    let t = families::gaussian(14, 0.9).unwrap();
    let rows = omega_tradeoff_curve(&PlanRequest::new(t, 5e-3), Method::FSL).unwrap();
    let feasible: Vec<_> = rows.iter().filter(|r| r.feasible).collect();
    assert!(!feasible.is_empty());
    let best = feasible.iter().min_by_key(|r| r.t_count).unwrap();
    // interior optimum: neither end of the grid is cheapest
    assert!(best.omega > 0.05 && best.omega < 1.0, "best omega {}", best.omega);
    assert!(feasible.iter().all(|r| r.eps_a_predicted <= (1.0 - r.omega) * 5e-3 + 1e-15));
}

#[test]
fn hybrid_splits_sparse_and_smooth_halves() {
    let t = families::sparse_then_smooth(10, 8, 1).unwrap();
    let flat = sweep(&PlanRequest::new(t.clone(), 1e-3)).unwrap();
    let req = PlanRequest { hybrid_max_depth: 1, ..PlanRequest::new(t.clone(), 1e-3) };
    let r = hybrid_plan(&req).unwrap();
    let s = r.selected.clone().unwrap();
    assert_eq!(s.method, Method::Hybrid);
    assert!(s.resources.t_count < flat.selected.unwrap().resources.t_count);
    let h = r.hybrid.clone().unwrap();
    assert_eq!(h.segments.len(), 2);
    assert_eq!((h.segments[0].prefix, h.segments[0].method), (0, Method::SparseSOS));
    assert_eq!(h.segments[1].prefix, 1);
    assert!(matches!(h.segments[1].method, Method::FSL | Method::MPS));

    let (_, ir) = synthesize_selected(&r, &t, &Default::default()).unwrap();
    assert!(l2_to_target(&ir, &t) <= 1e-3);
}

#[test]
fn hybrid_never_beats_flat_on_a_gaussian() {
    let g = families::gaussian(10, 0.5).unwrap();
    let flat = sweep(&PlanRequest::new(g.clone(), 1e-3)).unwrap();
    let r = hybrid_plan(&PlanRequest { hybrid_max_depth: 2, ..PlanRequest::new(g, 1e-3) }).unwrap();
    assert_eq!(r.selected, flat.selected);
}

#[test]
fn depth_zero_is_the_plain_sweep() {
    let t = families::sparse_then_smooth(8, 4, 2).unwrap();
    let a = sweep(&PlanRequest::new(t.clone(), 1e-3)).unwrap();
    let b = sweep(&PlanRequest { hybrid_max_depth: 0, ..PlanRequest::new(t, 1e-3) }).unwrap();
    assert_eq!(a.per_method_per_omega, b.per_method_per_omega);
    assert_eq!(a.selected, b.selected);
    assert!(b.hybrid.is_none());
}

#[test]
fn infeasible_requests_list_every_method() {
    let t = families::parabolic_diagonal(8).unwrap();
    let r = sweep(&PlanRequest::new(t, 1e-12).with_methods(&[Method::QspDiag])).unwrap();
    assert!(r.selected.is_none());
    assert_eq!(r.infeasibility.len(), 1);
    assert_eq!(r.infeasibility[0].method, Method::QspDiag);

    let t = families::gaussian(4, 0.3).unwrap();
    let bad = PlanRequest::new(t.clone(), 1e-3).with_methods(&[Method::WalshDiag]);
    assert!(matches!(sweep(&bad), Err(QdlcError::UnsupportedTarget(_))));
    assert!(sweep(&PlanRequest::new(t.clone(), 0.0)).is_err());
    assert!(sweep(&PlanRequest { omega_step: 0.0, ..PlanRequest::new(t, 1e-3) }).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sweep_is_deterministic(seed in 0u64..10_000, n in 2usize..=6) {
        let t = families::random_state(n, seed % 2 == 0, seed).unwrap();
        let req = PlanRequest::new(t, 1e-2);
        let a = serde_json::to_string(&sweep(&req).unwrap()).unwrap();
        let b = serde_json::to_string(&sweep(&req).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn selection_is_metric_minimal(seed in 0u64..10_000) {
        let t = families::sparse_random(6, 1 + (seed % 10) as usize, seed).unwrap();
        let r = sweep(&PlanRequest::new(t, 1e-3)).unwrap();
        let s = r.selected.clone().unwrap();
        for p in r.per_method_per_omega.iter().filter(|p| p.feasible) {
            prop_assert!(s.resources.t_count <= p.resources.t_count);
        }
    }
}
