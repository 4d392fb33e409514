use std::f64::consts::PI;

use crate::circuit::{CircuitIR, GateRecord};
use crate::costmodel::{estimate_circuit, CostConfig};
use crate::diagenc::real_diagonal;
use crate::error::Result;
use crate::stateprep::qrom::{angle_code, bits_for_rotations, code_angle};
use crate::types::{ErrorBudget, Method, MethodPlan, TargetVector};

/// delta_g = eps_p * 2^(-n/2).
pub fn solve_diag_mottonen(n: usize, eps_p: f64) -> f64 {
    eps_p * (2f64).powf(-(n as f64) / 2.0)
}

pub fn diag_angles(alpha: &[f64]) -> Vec<f64> {
    alpha.iter().map(|a| 2.0 * a.acos()).collect()
}

pub fn synth_diag_multiplexer(
    target: &TargetVector,
    budget: ErrorBudget,
    cfg: &CostConfig,
    via_qrom: bool,
) -> Result<(MethodPlan, CircuitIR)> {
    let alpha = real_diagonal(target)?;
    let n = target.n_qubits;
    let sys: Vec<usize> = (0..n).collect();
    let flag = n;
    let angles = diag_angles(&alpha);
    if !via_qrom {
        let mut ir = CircuitIR::new(n, 1);
        ir.push(GateRecord::mux_ry(&sys, flag, angles));
        let delta = solve_diag_mottonen(n, budget.eps_p);
        let mut plan = MethodPlan::new(Method::MottonenDiag, budget);
        plan.set("delta_g", delta);
        plan.resources = estimate_circuit(&ir, cfg, delta)?;
        return Ok((plan, ir));
    }
    let m = bits_for_rotations((1u64 << n) as f64, budget.eps_p / 2.0);
    let w = m as usize + 1;
    let code: Vec<usize> = (n + 1..n + 1 + w).collect();
    let table: Vec<i64> = angles.iter().map(|&t| angle_code(t, m)).collect();
    let mut ir = CircuitIR::new(n, 1 + w);
    ir.push(GateRecord::qrom(&sys, &code, table.clone()));
    for (b, &q) in code.iter().enumerate() {
        let theta = 2.0 * PI * (1u64 << b) as f64 / (1u64 << m) as f64;
        ir.push(GateRecord::ry(flag, theta).with_controls(&[(q, true)]));
    }
    ir.push(GateRecord::qrom(&sys, &code, table.clone()));
    let delta = budget.eps_p / 2.0 / ((2 * w) as f64).sqrt();
    let table_err = table
        .iter()
        .zip(&alpha)
        .map(|(&c, &a)| ((code_angle(c, m) / 2.0).cos() - a).abs())
        .fold(0.0, f64::max);
    let mut plan = MethodPlan::new(Method::QromDiag, budget);
    plan.set("m", m as f64);
    plan.set("delta_g", delta);
    plan.table_error_predicted = table_err;
    plan.resources = estimate_circuit(&ir, cfg, delta)?;
    Ok((plan, ir))
}
