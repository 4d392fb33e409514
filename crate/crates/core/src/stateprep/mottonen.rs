use crate::circuit::CircuitIR;
use crate::costmodel::{estimate_circuit, CostConfig};
use crate::error::Result;
use crate::stateprep::grover_rudolph::{cascade_gates, grover_rudolph_angles};
use crate::types::{ErrorBudget, Method, MethodPlan, TargetVector};

/// Uniform per-rotation tolerance for the 2^n - 1 rotations of the cascade.
pub fn solve_mottonen(n: usize, eps_p: f64) -> f64 {
    eps_p / ((2f64).powi(n as i32) - 1.0).sqrt()
}

pub fn synth_mottonen(target: &TargetVector, budget: ErrorBudget, cfg: &CostConfig) -> Result<(MethodPlan, CircuitIR)> {
    let angles = grover_rudolph_angles(target)?;
    let n = target.n_qubits;
    let rotations = angles.rotation_count();
    // complex targets carry a second (RZ) cascade, so the budget is spread
    // over the actual rotation count
    let delta = if rotations == (1 << n) - 1 {
        solve_mottonen(n, budget.eps_p)
    } else {
        budget.eps_p / (rotations as f64).sqrt()
    };
    let qubits: Vec<usize> = (0..n).collect();
    let mut ir = CircuitIR::new(n, 0);
    ir.extend(cascade_gates(&angles, &qubits));
    let mut plan = MethodPlan::new(Method::Mottonen, budget);
    plan.set("delta_g", delta);
    plan.resources = estimate_circuit(&ir, cfg, delta)?;
    Ok((plan, ir))
}
