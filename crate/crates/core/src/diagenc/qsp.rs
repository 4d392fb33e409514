use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::circuit::{BlockAction, CircuitIR, GateRecord};
use crate::costmodel::{t_count_for_rotation, tally_gates, CostConfig};
use crate::diagenc::real_diagonal;
use crate::error::Result;
use crate::stateprep::mps::EXACT_FLOOR;
use crate::types::{ErrorBudget, Method, MethodPlan, ResourceEstimate, TargetVector, C64};

pub const DEFAULT_MAX_DEGREE: usize = 32;

/// Points used for the least-squares fit; larger grids are strided down to
/// this size and the residual is still checked on every point.
const FIT_POINTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalEmbedding {
    /// s_j = sin(2 pi j / N)
    Sin,
    /// s_j = j / N
    Linear,
}

impl SignalEmbedding {
    pub fn signal(&self, j: usize, dim: usize) -> f64 {
        match self {
            SignalEmbedding::Sin => (2.0 * PI * j as f64 / dim as f64).sin(),
            SignalEmbedding::Linear => j as f64 / dim as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QspDiagonalSpec {
    /// Chebyshev coefficients, index = order; entries of the wrong parity are zero.
    pub polynomial: Vec<f64>,
    pub degree: usize,
    pub signal_embedding: SignalEmbedding,
    pub predicted_diagonal: Vec<C64>,
    pub residual: f64,
}

/// Sum a_k T_k(x) by Clenshaw recurrence.
pub fn chebyshev_eval(a: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ak in a.iter().skip(1).rev() {
        let b0 = ak + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    a.first().copied().unwrap_or(0.0) + x * b1 - b2
}

fn chebyshev_row(x: f64, degree: usize) -> Vec<f64> {
    let mut t = vec![1.0; degree + 1];
    if degree >= 1 {
        t[1] = x;
    }
    for k in 2..=degree {
        t[k] = 2.0 * x * t[k - 1] - t[k - 2];
    }
    t
}

/// delta_g = eps_p / sqrt(d).
pub fn solve_qsp_delta(degree: usize, eps_p: f64) -> f64 {
    eps_p / (degree.max(1) as f64).sqrt()
}

/// Least-squares fit of parity `degree % 2`; `None` when the polynomial leaves [-1, 1].
pub fn fit_diagonal(alpha: &[f64], emb: SignalEmbedding, degree: usize) -> Option<QspDiagonalSpec> {
    let dim = alpha.len();
    let orders: Vec<usize> = (degree % 2..=degree).step_by(2).collect();
    let stride = dim.div_ceil(FIT_POINTS).max(1);
    let pts: Vec<usize> = (0..dim).step_by(stride).chain(std::iter::once(dim - 1)).collect();
    let a = DMatrix::from_fn(pts.len(), orders.len(), |r, c| {
        chebyshev_row(emb.signal(pts[r], dim), degree)[orders[c]]
    });
    let y = DVector::from_iterator(pts.len(), pts.iter().map(|&j| alpha[j]));
    let sol = a.clone().svd(true, true).solve(&y, 1e-13).ok()?;
    let mut poly = vec![0.0; degree + 1];
    for (c, &k) in orders.iter().enumerate() {
        poly[k] = sol[c];
    }
    let bounded = (0..=2000).map(|i| -1.0 + i as f64 / 1000.0).all(|x| chebyshev_eval(&poly, x).abs() <= 1.0 + 1e-12);
    if !bounded {
        return None;
    }
    let values: Vec<f64> = (0..dim).map(|j| chebyshev_eval(&poly, emb.signal(j, dim)).clamp(-1.0, 1.0)).collect();
    let mut residual = values.iter().zip(alpha).map(|(p, a)| (p - a).abs()).fold(0.0, f64::max);
    if residual < EXACT_FLOOR {
        residual = 0.0;
    }
    Some(QspDiagonalSpec {
        polynomial: poly,
        degree,
        signal_embedding: emb,
        predicted_diagonal: values.iter().map(|&v| C64::new(v, 0.0)).collect(),
        residual,
    })
}

/// Lowest degree (Linear before Sin at equal degree) meeting `eps_a`, or the
/// best fit found when none does.
pub fn select_polynomial(alpha: &[f64], eps_a: f64, max_degree: usize) -> Option<(QspDiagonalSpec, bool)> {
    let mut best: Option<QspDiagonalSpec> = None;
    for d in 0..=max_degree {
        for emb in [SignalEmbedding::Linear, SignalEmbedding::Sin] {
            if let Some(s) = fit_diagonal(alpha, emb, d) {
                if s.residual <= eps_a {
                    return Some((s, true));
                }
                if best.as_ref().is_none_or(|b| s.residual < b.residual) {
                    best = Some(s);
                }
            }
        }
    }
    best.map(|b| (b, false))
}

/// Cost of one signal-operator call: a controlled adder pair into the
/// phase-gradient register, plus the angle lookups for the linear embedding.
fn signal_cost(n: usize, emb: SignalEmbedding, cfg: &CostConfig) -> Result<crate::costmodel::GateTally> {
    let sys: Vec<usize> = (0..n).collect();
    let flag = n;
    let grad: Vec<usize> = (n + 1..2 * n + 2).collect();
    let mut gates = Vec::new();
    if emb == SignalEmbedding::Linear {
        gates.push(GateRecord::qrom(&sys, &grad[..n + 1], vec![0; 1 << n]));
    }
    gates.push(GateRecord::adder(&grad, &sys).with_controls(&[(flag, true)]));
    gates.push(GateRecord::adder(&grad, &sys).adjointed().with_controls(&[(flag, false)]));
    if emb == SignalEmbedding::Linear {
        gates.push(GateRecord::qrom(&sys, &grad[..n + 1], vec![0; 1 << n]));
    }
    tally_gates(&gates, cfg, 1.0)
}

/// Cost of a degree-`d` sequence on an n-qubit diagonal: d signal calls and
/// d+1 phase rotations at tolerance `delta`.
pub fn qsp_block_cost(n: usize, emb: SignalEmbedding, d: usize, delta: f64, cfg: &CostConfig) -> Result<ResourceEstimate> {
    let sig = signal_cost(n, emb, cfg)?;
    let t_rot = t_count_for_rotation(delta, cfg)?;
    let dd = d as u64;
    let grad_bits = n as u64 + 1;
    Ok(ResourceEstimate {
        t_count: dd * sig.counts.t_count + (dd + 1) * t_rot,
        cnot_count: dd * sig.counts.cnot_count,
        rotation_count: dd + 1,
        toffoli_count: dd * sig.counts.toffoli_count,
        ancilla_qubits: grad_bits + sig.workspace,
        total_qubits: n as u64 + 1 + grad_bits + sig.workspace,
    })
}

pub fn synth_diag_qsp(
    target: &TargetVector,
    budget: ErrorBudget,
    cfg: &CostConfig,
    max_degree: usize,
) -> Result<(MethodPlan, CircuitIR)> {
    let alpha = real_diagonal(target)?;
    let n = target.n_qubits;
    let mut plan = MethodPlan::new(Method::QspDiag, budget);
    let mut ir = CircuitIR::new(n, 1);
    let Some((spec, ok)) = select_polynomial(&alpha, budget.eps_a, max_degree) else {
        plan.feasible = false;
        plan.eps_a_predicted = f64::INFINITY;
        plan.note = Some(format!("no bounded polynomial up to degree {max_degree}"));
        return Ok((plan, ir));
    };
    let d = spec.degree;
    let delta = solve_qsp_delta(d, budget.eps_p);
    let cost = qsp_block_cost(n, spec.signal_embedding, d, delta, cfg)?;
    let values: Vec<f64> = spec.predicted_diagonal.iter().map(|z| z.re).collect();
    let mut targets = vec![n];
    targets.extend(0..n);
    ir.push(
        GateRecord::block(&targets, &format!("qsp-sequence({d})"), BlockAction::DiagonalEncoding { values })
            .with_cost(cost),
    );
    plan.set("d", d as f64);
    plan.set("delta_g", delta);
    plan.set("embedding", if spec.signal_embedding == SignalEmbedding::Sin { 0.0 } else { 1.0 });
    plan.eps_a_predicted = spec.residual;
    plan.feasible = ok;
    if !ok {
        plan.note = Some(format!("best residual {:.3e} above eps_a up to degree {max_degree}", spec.residual));
    }
    plan.resources = crate::costmodel::estimate_circuit(&ir, cfg, delta)?;
    Ok((plan, ir))
}
