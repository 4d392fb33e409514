//! Dyadic splitting of a state-prep target on its most significant qubit.
//!
//! Each half is planned on its own with `SEGMENT_SHARE` of the budget and
//! runs as a sub-circuit controlled on the prefix qubit; a single RY on the
//! prefix loads the weights of the two halves with the remaining share as
//! rotation tolerance. The controlled-gate surcharge comes from the cost
//! model's `controlled_surcharge`.

use serde::{Deserialize, Serialize};

use super::{select, sweep, sweep_cells, synthesize, PlanReport, PlanRequest};
use crate::circuit::{remap_gates, BlockAction, CircuitIR, GateRecord};
use crate::costmodel::{finish_estimate, tally_gates};
use crate::error::{QdlcError, Result};
use crate::types::{ErrorBudget, Method, MethodPlan, ResourceEstimate, Task, TargetVector};

/// Fraction of the budget handed to the segments.
pub const SEGMENT_SHARE: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridSegment {
    /// Value of the most significant qubit selecting this segment.
    pub prefix: usize,
    pub weight: f64,
    pub method: Method,
    pub omega: f64,
    pub eps_a_predicted: f64,
    pub t_count: u64,
    /// Nested split, when the segment itself is hybrid.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub segments: Vec<HybridSegment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridSummary {
    pub depth: usize,
    pub resources: ResourceEstimate,
    pub eps_a_predicted: f64,
    pub segments: Vec<HybridSegment>,
}

struct Node {
    plan: MethodPlan,
    ir: CircuitIR,
    segments: Vec<HybridSegment>,
}

fn better(a: &MethodPlan, b: &MethodPlan, req: &PlanRequest) -> bool {
    let k = |p: &MethodPlan| (req.metric.score(&p.resources), p.resources.cnot_count, p.resources.total_qubits);
    k(a) < k(b)
}

/// Cheapest plan for one segment, flat or split again.
fn best_segment(target: &TargetVector, eps: f64, depth: usize, req: &PlanRequest) -> Result<Option<Node>> {
    let sub = PlanRequest { target: target.clone(), epsilon: eps, hybrid_max_depth: 0, ..req.clone() };
    let cells = sweep_cells(&sub)?;
    let mut best = match select(cells.iter(), req.metric) {
        Some(p) => {
            let (plan, ir) = synthesize(p.method, target, p.budget, &req.cost_config)?;
            Some(Node { plan, ir, segments: Vec::new() })
        }
        None => None,
    };
    if depth > 0 && target.n_qubits >= 2 {
        if let Some(h) = build(target, eps, depth, req)? {
            if best.as_ref().is_none_or(|b| better(&h.plan, &b.plan, req)) {
                best = Some(h);
            }
        }
    }
    Ok(best)
}

fn build(target: &TargetVector, eps: f64, depth: usize, req: &PlanRequest) -> Result<Option<Node>> {
    let n = target.n_qubits;
    let m = n - 1;
    let half = 1usize << m;
    let cfg = &req.cost_config;
    let weights: Vec<f64> = (0..2)
        .map(|b| target.amplitudes[b * half..(b + 1) * half].iter().map(|a| a.norm_sqr()).sum())
        .collect();

    let mut children = Vec::new();
    for b in 0..2 {
        if weights[b] == 0.0 {
            continue;
        }
        let amps = target.amplitudes[b * half..(b + 1) * half].to_vec();
        let child = TargetVector::new(m, amps, Task::StatePrep)?;
        match best_segment(&child, SEGMENT_SHARE * eps, depth - 1, req)? {
            Some(node) => children.push((b, node)),
            None => return Ok(None),
        }
    }

    let ancillas = children.iter().map(|(_, c)| c.ir.num_ancilla_qubits).max().unwrap_or(0);
    let mut ir = CircuitIR::new(n, ancillas);
    let prefix_delta = (1.0 - SEGMENT_SHARE) * eps;
    let theta = 2.0 * weights[1].sqrt().atan2(weights[0].sqrt());
    let prefix = vec![GateRecord::ry(m, theta)];
    let mut parts = vec![tally_gates(&prefix, cfg, prefix_delta)?];
    ir.extend(prefix);

    let mut segments = Vec::new();
    let (mut ea, mut et, mut ebudget) = (0.0, 0.0, 0.0);
    let mut feasible = true;
    for (b, node) in &children {
        let map = |q: usize| if q < m { q } else { n + (q - m) };
        let gates = remap_gates(&node.ir.gates, &map);
        let mut targets: Vec<usize> = (0..m).collect();
        targets.extend(n..n + node.ir.num_ancilla_qubits);
        let mut cost = node.plan.resources;
        // declared ancillas are counted once, by the enclosing circuit
        cost.ancilla_qubits = cost.ancilla_qubits.saturating_sub(node.ir.num_ancilla_qubits as u64);
        let label = format!("segment{}-{}", b, node.plan.method.name());
        let g = GateRecord::block(&targets, &label, BlockAction::Circuit { gates })
            .with_controls(&[(m, *b == 1)])
            .with_cost(cost);
        parts.push(tally_gates(std::slice::from_ref(&g), cfg, 1.0)?);
        ir.push(g);

        let p = weights[*b];
        ea += p * node.plan.eps_a_predicted.powi(2);
        et += p * node.plan.table_error_predicted.powi(2);
        ebudget += p * node.plan.budget.eps_a.powi(2);
        feasible &= node.plan.feasible;
        segments.push(HybridSegment {
            prefix: *b,
            weight: p,
            method: node.plan.method,
            omega: node.plan.budget.omega,
            eps_a_predicted: node.plan.eps_a_predicted,
            t_count: node.plan.resources.t_count,
            segments: node.segments.clone(),
        });
    }

    // the split's approximation allowance is the weighted allowance of its segments
    let omega = (1.0 - ebudget.sqrt() / eps).clamp(f64::MIN_POSITIVE, 1.0);
    let mut plan = MethodPlan::new(Method::Hybrid, ErrorBudget::new(eps, omega)?);
    plan.set("depth", (depth as f64).max(1.0));
    plan.set("segments", segments.len() as f64);
    plan.set("delta_prefix", prefix_delta);
    plan.eps_a_predicted = ea.sqrt();
    plan.table_error_predicted = et.sqrt();
    plan.feasible = feasible;
    plan.resources = finish_estimate(&ir, &parts);
    Ok(Some(Node { plan, ir, segments }))
}

fn clamped_depth(req: &PlanRequest) -> Result<usize> {
    if req.target.task != Task::StatePrep {
        return Err(QdlcError::UnsupportedTarget("hybrid splitting applies to state preparation only".into()));
    }
    let n = req.target.n_qubits;
    if n < 2 {
        return Ok(0);
    }
    if req.hybrid_max_depth > n - 1 {
        log::warn!("hybrid depth {} clamped to {}", req.hybrid_max_depth, n - 1);
    }
    Ok(req.hybrid_max_depth.min(n - 1))
}

pub(crate) fn best_hybrid(req: &PlanRequest) -> Result<Option<(MethodPlan, HybridSummary)>> {
    let depth = clamped_depth(req)?;
    if depth == 0 {
        return Ok(None);
    }
    Ok(build(&req.target, req.epsilon, depth, req)?.map(|node| {
        let mut plan = node.plan;
        plan.set("depth", depth as f64);
        let summary = HybridSummary {
            depth,
            resources: plan.resources,
            eps_a_predicted: plan.eps_a_predicted,
            segments: node.segments,
        };
        (plan, summary)
    }))
}

/// The hybrid plan together with its circuit.
pub(crate) fn hybrid_circuit(req: &PlanRequest) -> Result<Option<(MethodPlan, CircuitIR)>> {
    let depth = clamped_depth(req)?.max(1);
    if req.target.n_qubits < 2 {
        return Ok(None);
    }
    Ok(build(&req.target, req.epsilon, depth, req)?.map(|node| {
        let mut plan = node.plan;
        plan.set("depth", depth as f64);
        (plan, node.ir)
    }))
}

/// Grid search with the hybrid split enabled (depth at least one).
pub fn hybrid_plan(req: &PlanRequest) -> Result<PlanReport> {
    sweep(&PlanRequest { hybrid_max_depth: req.hybrid_max_depth.max(1), ..req.clone() })
}
