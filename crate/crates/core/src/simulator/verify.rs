use serde::{Deserialize, Serialize};

use crate::circuit::CircuitIR;
use crate::error::{QdlcError, Result};
use crate::metrics::{l2_distance, linf_distance};
use crate::types::{Method, MethodPlan, TargetVector, Task, C64};

use super::{block_diagonal, extract_block, run, DEFAULT_BLOCK_LIMIT};
use crate::blockenc::Operator;

/// Desk-scale limits; larger circuits are reported as unverified rather
/// than simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyLimits {
    /// System register size.
    pub system: usize,
    /// System plus ancilla qubits in one statevector.
    pub total: usize,
}

impl Default for VerifyLimits {
    fn default() -> Self {
        VerifyLimits { system: 14, total: 22 }
    }
}

/// Slack added to every verification bound.
pub const VERIFY_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyStatus {
    Pass,
    Fail,
    UnverifiedAtScale,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub method: Method,
    pub achieved_error: Option<f64>,
    pub bound: f64,
    pub pass: bool,
    pub norm: String,
    pub status: VerifyStatus,
}

pub fn verify_plan(plan: &MethodPlan, ir: &CircuitIR, target: &TargetVector) -> Result<Verification> {
    verify_plan_with_limits(plan, ir, target, VerifyLimits::default())
}

pub fn verify_plan_with_limits(
    plan: &MethodPlan,
    ir: &CircuitIR,
    target: &TargetVector,
    limits: VerifyLimits,
) -> Result<Verification> {
    if ir.num_system_qubits != target.n_qubits {
        return Err(QdlcError::Dimension(format!(
            "circuit has {} system qubits, target has {}",
            ir.num_system_qubits, target.n_qubits
        )));
    }
    let bound = plan.verification_bound() + VERIFY_SLACK;
    let norm = match target.task {
        Task::StatePrep => "l2",
        Task::DiagonalEncode => "linf",
    };
    let n = target.n_qubits;
    // diagonal checks cost one run per system basis state
    let total = ir.total_qubits();
    let too_big = n > limits.system
        || total > limits.total
        || (target.task == Task::DiagonalEncode && total + n > limits.total + 8);
    if too_big {
        return Ok(Verification {
            method: plan.method,
            achieved_error: None,
            bound,
            pass: false,
            norm: norm.into(),
            status: VerifyStatus::UnverifiedAtScale,
        });
    }
    let achieved = match target.task {
        Task::StatePrep => {
            let out = run(ir)?;
            let t = normalized(&target.amplitudes);
            if plan.method == Method::AliasSampling {
                let q = out.marginal(n);
                let p: Vec<f64> = t.iter().map(|a| a.norm_sqr()).collect();
                q.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
            } else {
                l2_distance(&out.system_slice(n), &t)?
            }
        }
        Task::DiagonalEncode => {
            let diag = block_diagonal(ir, ir.num_ancilla_qubits)?;
            linf_distance(&diag, &target.amplitudes)?
        }
    };
    let pass = achieved <= bound;
    Ok(Verification {
        method: plan.method,
        achieved_error: Some(achieved),
        bound,
        pass,
        norm: norm.into(),
        status: if pass { VerifyStatus::Pass } else { VerifyStatus::Fail },
    })
}

fn normalized(v: &[C64]) -> Vec<C64> {
    let n = crate::metrics::l2_norm(v);
    v.iter().map(|a| a / n).collect()
}

/// Checks a structured block encoding against its reference operator.
pub fn verify_operator(plan: &MethodPlan, ir: &CircuitIR, op: &Operator, limits: VerifyLimits) -> Result<Verification> {
    if ir.num_system_qubits != op.system_qubits() {
        return Err(QdlcError::Dimension(format!(
            "circuit has {} system qubits, operator has {}",
            ir.num_system_qubits,
            op.system_qubits()
        )));
    }
    let bound = plan.verification_bound() + VERIFY_SLACK;
    let total = ir.total_qubits();
    let (norm, too_big) = match op {
        Operator::Kinetic(_) => ("linf", total > limits.total || total + op.system_qubits() > limits.total + 8),
        Operator::DDiagonal(_) => ("spectral", total > DEFAULT_BLOCK_LIMIT),
    };
    let unverified = |status| Verification {
        method: plan.method,
        achieved_error: None,
        bound,
        pass: false,
        norm: norm.into(),
        status,
    };
    if too_big || op.system_qubits() > limits.system {
        return Ok(unverified(VerifyStatus::UnverifiedAtScale));
    }
    let achieved = match op {
        Operator::Kinetic(k) => {
            let diag = block_diagonal(ir, ir.num_ancilla_qubits)?;
            let want: Vec<C64> = k.target_diagonal().iter().map(|&x| C64::new(x, 0.0)).collect();
            linf_distance(&diag, &want)?
        }
        Operator::DDiagonal(s) => {
            let block = extract_block(ir, ir.num_ancilla_qubits)?;
            (block - s.matrix()).singular_values().max()
        }
    };
    let pass = achieved <= bound;
    Ok(Verification {
        method: plan.method,
        achieved_error: Some(achieved),
        bound,
        pass,
        norm: norm.into(),
        status: if pass { VerifyStatus::Pass } else { VerifyStatus::Fail },
    })
}
