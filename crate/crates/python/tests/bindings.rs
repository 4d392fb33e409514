use num_complex::Complex64;
use qdlc::{build_target, gate_kind, plan_request};
use qdlc_core::{planner, GateKind, Method, Task};

#[test]
fn targets_need_power_of_two_lengths() {
    let one = Complex64::new(1.0, 0.0);
    assert!(build_target(vec![one; 3], Task::StatePrep).is_err());
    assert!(build_target(vec![one], Task::StatePrep).is_err());
    let t = build_target(vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)], Task::StatePrep).unwrap();
    assert_eq!((t.n_qubits, t.scale), (1, 2.0));
}

#[test]
fn plan_request_parses_names() {
    let t = build_target(vec![Complex64::new(0.5, 0.0); 4], Task::StatePrep).unwrap();
    let req = plan_request(&t, 1e-3, Some(vec!["mottonen".into(), "fsl".into()]), 0.25, 0, "cnot-count").unwrap();
    assert_eq!(req.method_list(), vec![Method::Mottonen, Method::FSL]);
    assert_eq!(req.omega_grid(), vec![0.25, 0.5, 0.75, 1.0]);
    let r = planner::sweep(&req).unwrap();
    assert_eq!(r.per_method_per_omega.len(), 8);
    assert!(plan_request(&t, 1e-3, Some(vec!["nope".into()]), 0.05, 0, "t-count").is_err());
    assert!(plan_request(&t, 1e-3, None, 0.05, 0, "fastest").is_err());
}

#[test]
fn gate_kinds_use_wire_names() {
    let name = serde_json::to_value(GateKind::QROMLookup).unwrap();
    assert_eq!(gate_kind(name.as_str().unwrap()), Some(GateKind::QROMLookup));
    assert_eq!(gate_kind("not-a-gate"), None);
}
