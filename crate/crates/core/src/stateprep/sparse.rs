use crate::circuit::{CircuitIR, GateRecord};
use crate::costmodel::{finish_estimate, tally_gates, CostConfig};
use crate::error::Result;
use crate::stateprep::grover_rudolph::state_prep_gates;
use crate::types::{ErrorBudget, Method, MethodPlan, TargetVector, C64};

/// Indices ordered by decreasing magnitude, ties to the lower index.
pub fn magnitude_order(amps: &[C64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..amps.len()).collect();
    idx.sort_by(|&a, &b| amps[b].norm_sqr().total_cmp(&amps[a].norm_sqr()).then(a.cmp(&b)));
    idx
}

/// Error after dropping a fraction `dropped` of a unit vector's weight and
/// renormalizing: sqrt(2 - 2 sqrt(1 - dropped)), in a cancellation-free form.
pub fn renormalized_truncation_error(dropped: f64) -> f64 {
    let r = dropped.clamp(0.0, 1.0);
    (2.0 * r / (1.0 + (1.0 - r).sqrt())).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSelection {
    /// Kept indices in increasing order.
    pub kept: Vec<usize>,
    pub error: f64,
}

/// Smallest D whose top-D truncation meets `eps_a`.
pub fn select_sparsity(target: &TargetVector, eps_a: f64) -> SparseSelection {
    let order = magnitude_order(&target.amplitudes);
    let total: f64 = target.amplitudes.iter().map(|a| a.norm_sqr()).sum();
    // tail[k]: weight outside the top k entries
    let mut tail = vec![0.0; order.len() + 1];
    for k in (0..order.len()).rev() {
        tail[k] = tail[k + 1] + target.amplitudes[order[k]].norm_sqr();
    }
    let mut d = order.len();
    let mut err = 0.0;
    for k in 1..=order.len() {
        let mut e = renormalized_truncation_error(tail[k] / total);
        if e < crate::stateprep::mps::EXACT_FLOOR {
            e = 0.0;
        }
        if e <= eps_a {
            d = k;
            err = e;
            break;
        }
    }
    let mut kept: Vec<usize> = order[..d].to_vec();
    kept.sort_unstable();
    SparseSelection { kept, error: err }
}

/// Greedy set of bit positions on which the kept indices are pairwise distinct.
pub fn distinguishing_bits(kept: &[usize], n: usize) -> Vec<usize> {
    let mut bits: Vec<usize> = Vec::new();
    let classes = |bits: &[usize]| -> usize {
        let mut keys: Vec<usize> = kept.iter().map(|&x| bits.iter().enumerate().map(|(k, &b)| ((x >> b) & 1) << k).sum()).collect();
        keys.sort_unstable();
        keys.dedup();
        keys.len()
    };
    while classes(&bits) < kept.len() {
        let best = (0..n)
            .filter(|b| !bits.contains(b))
            .max_by_key(|&b| {
                let mut with = bits.clone();
                with.push(b);
                // prefer more classes, then the lower bit
                (classes(&with), std::cmp::Reverse(b))
            })
            .expect("indices are distinct on all bits");
        bits.push(best);
    }
    bits.sort_unstable();
    bits
}

pub fn synth_sparse_sos(target: &TargetVector, budget: ErrorBudget, cfg: &CostConfig) -> Result<(MethodPlan, CircuitIR)> {
    let n = target.n_qubits;
    let sel = select_sparsity(target, budget.eps_a);
    let d = sel.kept.len();
    let w = if d <= 1 { 0 } else { (d - 1).ilog2() as usize + 1 };
    let kept_norm: f64 = sel.kept.iter().map(|&i| target.amplitudes[i].norm_sqr()).sum::<f64>().sqrt();
    let mut beta: Vec<C64> = sel.kept.iter().map(|&i| target.amplitudes[i] / kept_norm).collect();
    beta.resize(1 << w, C64::new(0.0, 0.0));

    let sys: Vec<usize> = (0..n).collect();
    let compact: Vec<usize> = (n..n + w).collect();
    let mut ir = CircuitIR::new(n, w);
    let (prep, prep_rotations) = state_prep_gates(&beta, &compact);
    let delta = if prep_rotations > 0 { budget.eps_p / (prep_rotations as f64).sqrt() } else { 1.0 };
    let mut parts = vec![tally_gates(&prep, cfg, delta)?];
    ir.extend(prep);

    let mut rest = Vec::new();
    if w == 0 {
        let x = sel.kept[0];
        for q in 0..n {
            if (x >> q) & 1 == 1 {
                rest.push(GateRecord::x(q));
            }
        }
    } else {
        let table: Vec<i64> = sel.kept.iter().map(|&x| x as i64).collect();
        rest.push(GateRecord::qrom(&compact, &sys, table));
        let bits = distinguishing_bits(&sel.kept, n);
        let mut ident = vec![0i64; 1 << bits.len()];
        for (j, &x) in sel.kept.iter().enumerate() {
            let key: usize = bits.iter().enumerate().map(|(k, &b)| ((x >> b) & 1) << k).sum();
            ident[key] = j as i64;
        }
        rest.push(GateRecord::qrom(&bits, &compact, ident));
    }
    parts.push(tally_gates(&rest, cfg, 1.0)?);
    ir.extend(rest);

    let mut plan = MethodPlan::new(Method::SparseSOS, budget);
    plan.set("D", d as f64);
    plan.set("delta_g", delta);
    plan.eps_a_predicted = sel.error;
    plan.feasible = sel.error <= budget.eps_a;
    plan.resources = finish_estimate(&ir, &parts);
    Ok((plan, ir))
}
