use std::f64::consts::PI;

use crate::circuit::{CircuitIR, GateRecord};
use crate::costmodel::{estimate_circuit, CostConfig};
use crate::error::Result;
use crate::metrics::l2_distance;
use crate::stateprep::grover_rudolph::{cascade_state, grover_rudolph_angles, GroverRudolphAngles};
use crate::types::{ErrorBudget, Method, MethodPlan, TargetVector};

/// Smallest phase-register width m with 2^-m * pi * sqrt(2^n - 1) <= eps_p.
pub fn solve_qrom_bits(n: usize, eps_p: f64) -> u32 {
    bits_for_rotations(((1u64 << n) - 1) as f64, eps_p)
}

pub(crate) fn bits_for_rotations(count: f64, eps_p: f64) -> u32 {
    let x = (PI / eps_p * count.sqrt()).log2().ceil();
    let mut m = if x < 0.0 { 0 } else { x as u32 };
    // guard the ceil against rounding on exact powers of two
    while m > 0 && (2f64).powi(-(m as i32 - 1)) * PI * count.sqrt() <= eps_p {
        m -= 1;
    }
    while (2f64).powi(-(m as i32)) * PI * count.sqrt() > eps_p {
        m += 1;
    }
    m
}

/// Angle code for `theta` on a grid of 2 pi / 2^m, kept modulo 4 pi in m+1 bits.
pub fn angle_code(theta: f64, m: u32) -> i64 {
    let w = 1i64 << (m + 1);
    let c = (theta * (1u64 << m) as f64 / (2.0 * PI)).round() as i64;
    c.rem_euclid(w)
}

pub fn code_angle(code: i64, m: u32) -> f64 {
    2.0 * PI * code as f64 / (1u64 << m) as f64
}

/// The angles actually realized after rounding to m-bit codes.
pub fn rounded_angles(angles: &GroverRudolphAngles, m: u32) -> GroverRudolphAngles {
    let round = |levels: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        levels.iter().map(|l| l.iter().map(|&t| code_angle(angle_code(t, m), m)).collect()).collect()
    };
    GroverRudolphAngles { ry: round(&angles.ry), rz: angles.rz.as_ref().map(round), global_phase: angles.global_phase }
}

pub fn synth_qrom_stateprep(
    target: &TargetVector,
    budget: ErrorBudget,
    cfg: &CostConfig,
    use_phase_gradient: bool,
) -> Result<(MethodPlan, CircuitIR)> {
    let angles = grover_rudolph_angles(target)?;
    let n = target.n_qubits;
    // half of eps_p for the angle codes, half for synthesizing the fixed rotations
    let m = solve_qrom_bits(n, budget.eps_p / 2.0);
    let w = m as usize + 1;
    let code: Vec<usize> = (n..n + w).collect();
    let grad: Vec<usize> = if use_phase_gradient { (n + w..n + 2 * w).collect() } else { Vec::new() };
    let mut ir = CircuitIR::new(n, w + grad.len());

    let mut grad_prep = Vec::new();
    for (i, &q) in grad.iter().enumerate() {
        grad_prep.push(GateRecord::h(q));
        grad_prep.push(GateRecord::rz(q, -2.0 * PI * (1u64 << i) as f64 / (1u64 << w) as f64));
    }
    ir.extend(grad_prep.iter().cloned());

    let mut levels: Vec<(bool, usize, &Vec<f64>)> = angles.ry.iter().enumerate().map(|(k, l)| (true, k, l)).collect();
    if let Some(rz) = &angles.rz {
        levels.extend(rz.iter().enumerate().map(|(k, l)| (false, k, l)));
    }
    for (is_ry, k, level) in levels {
        let t = n - 1 - k;
        let select: Vec<usize> = (n - k..n).collect();
        let table: Vec<i64> = level.iter().map(|&a| angle_code(a, m)).collect();
        ir.push(GateRecord::qrom(&select, &code, table.clone()));
        if use_phase_gradient {
            if is_ry {
                ir.push(GateRecord::sdg(t));
                ir.push(GateRecord::h(t));
            }
            ir.push(GateRecord::adder(&grad, &code).with_controls(&[(t, true)]));
            ir.push(GateRecord::adder(&grad, &code).adjointed().with_controls(&[(t, false)]));
            if is_ry {
                ir.push(GateRecord::h(t));
                ir.push(GateRecord::s(t));
            }
        } else {
            for (b, &q) in code.iter().enumerate() {
                let theta = 2.0 * PI * (1u64 << b) as f64 / (1u64 << m) as f64;
                let g = if is_ry { GateRecord::ry(t, theta) } else { GateRecord::rz(t, theta) };
                ir.push(g.with_controls(&[(q, true)]));
            }
        }
        ir.push(GateRecord::qrom(&select, &code, table));
    }
    if angles.rz.is_some() {
        ir.push(GateRecord::global_phase(angles.global_phase));
    }
    ir.extend(crate::circuit::adjoint_gates(&grad_prep));

    let fixed_rotations = if use_phase_gradient {
        2 * w
    } else {
        let levels = angles.ry.len() + angles.rz.as_ref().map_or(0, |z| z.len());
        2 * levels * w
    };
    let delta = budget.eps_p / 2.0 / (fixed_rotations as f64).sqrt();

    let realized = cascade_state(&rounded_angles(&angles, m));
    let mut plan = MethodPlan::new(Method::QromStatePrep, budget);
    plan.set("m", m as f64);
    plan.set("delta_g", delta);
    plan.set("phase_gradient", if use_phase_gradient { 1.0 } else { 0.0 });
    plan.table_error_predicted = l2_distance(&realized, &target.amplitudes)?;
    plan.resources = estimate_circuit(&ir, cfg, delta)?;
    Ok((plan, ir))
}
