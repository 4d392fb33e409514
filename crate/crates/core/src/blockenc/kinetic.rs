use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circuit::{adjoint_gates, BlockAction, CircuitIR, GateRecord};
use crate::costmodel::{finish_estimate, tally_gates, CostConfig};
use crate::diagenc::qsp::{qsp_block_cost, solve_qsp_delta, SignalEmbedding};
use crate::error::{QdlcError, Result};
use crate::stateprep::grover_rudolph::state_prep_gates;
use crate::types::{ErrorBudget, Method, MethodPlan, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KineticSpec {
    pub qubits_per_axis: usize,
    /// Cell volume.
    pub omega: f64,
    /// Requested subnormalization; the minimum is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

impl KineticSpec {
    pub fn new(qubits_per_axis: usize, omega: f64) -> Self {
        KineticSpec { qubits_per_axis, omega, lambda: None }
    }

    /// (1/2) (2 pi / omega^{1/3})^2
    pub fn prefactor(&self) -> f64 {
        0.5 * (2.0 * PI / self.omega.cbrt()).powi(2)
    }

    /// Smallest subnormalization: three branches, each bounded by prefactor N^2.
    pub fn min_lambda(&self) -> f64 {
        let dim = (1u64 << self.qubits_per_axis) as f64;
        3.0 * self.prefactor() * dim * dim
    }

    pub fn lambda_t(&self) -> f64 {
        self.lambda.unwrap_or_else(|| self.min_lambda())
    }

    /// Encoded diagonal energy / lambda_T, x on the lowest qubits.
    pub fn target_diagonal(&self) -> Vec<f64> {
        let dim = 1usize << self.qubits_per_axis;
        let lam = self.lambda_t();
        let mut v = Vec::with_capacity(dim * dim * dim);
        for z in 0..dim {
            for y in 0..dim {
                for x in 0..dim {
                    v.push(self.energy(x, y, z) / lam);
                }
            }
        }
        v
    }

    /// prefactor (x^2 + y^2 + z^2) at grid index (x, y, z).
    pub fn energy(&self, x: usize, y: usize, z: usize) -> f64 {
        self.prefactor() * ((x * x + y * y + z * z) as f64)
    }
}

pub fn synth_kinetic(spec: &KineticSpec, budget: ErrorBudget, cfg: &CostConfig) -> Result<(MethodPlan, CircuitIR)> {
    let n = spec.qubits_per_axis;
    if n == 0 {
        return Err(QdlcError::Domain("at least one qubit per axis".into()));
    }
    if !(spec.omega > 0.0) || !spec.omega.is_finite() {
        return Err(QdlcError::Domain("cell volume must be positive".into()));
    }
    let lam = spec.lambda_t();
    let lmin = spec.min_lambda();
    if lam < lmin * (1.0 - 1e-12) {
        return Err(QdlcError::NormViolation(format!(
            "lambda {lam} is below the minimum {lmin}; the encoded entries would exceed 1"
        )));
    }
    let ratio = (lmin / lam).min(1.0);
    let dim = 1usize << n;
    // per-axis P(s) = ratio * s^2 with s = j / N
    let values: Vec<f64> = (0..dim).map(|j| ratio * (j as f64 / dim as f64).powi(2)).collect();

    let b0 = 3 * n;
    let b1 = 3 * n + 1;
    let flag = 3 * n + 2;
    let mut ir = CircuitIR::new(3 * n, 3);
    let third = C64::new((1.0f64 / 3.0).sqrt(), 0.0);
    let (prep, prep_rot) = state_prep_gates(&[third, third, third, C64::new(0.0, 0.0)], &[b0, b1]);
    let unprep = adjoint_gates(&prep);
    let delta_prep = crate::blockenc::ddiagonal::PREP_SHARE * budget.eps_p / (prep_rot.max(1) as f64).sqrt();
    let delta = solve_qsp_delta(2, (1.0 - crate::blockenc::ddiagonal::PREP_SHARE) * budget.eps_p / 3f64.sqrt());
    let cost = qsp_block_cost(n, SignalEmbedding::Linear, 2, delta, cfg)?;
    let mut mid = Vec::new();
    for (axis, (c0, c1)) in [(false, false), (true, false), (false, true)].into_iter().enumerate() {
        let mut targets = vec![flag];
        targets.extend(axis * n..(axis + 1) * n);
        let label = ["qsp-sequence(2)-x", "qsp-sequence(2)-y", "qsp-sequence(2)-z"][axis];
        mid.push(
            GateRecord::block(&targets, label, BlockAction::DiagonalEncoding { values: values.clone() })
                .with_cost(cost)
                .with_controls(&[(b0, c0), (b1, c1)]),
        );
    }
    let parts = [
        tally_gates(&prep, cfg, delta_prep)?,
        tally_gates(&mid, cfg, delta)?,
        tally_gates(&unprep, cfg, delta_prep)?,
    ];
    ir.extend(prep);
    ir.extend(mid);
    ir.extend(unprep);

    let mut plan = MethodPlan::new(Method::Kinetic, budget);
    plan.set("lambda_t", lam);
    plan.set("prefactor", spec.prefactor());
    plan.set("d", 2.0);
    plan.set("delta_g", delta);
    plan.resources = finish_estimate(&ir, &parts);
    Ok((plan, ir))
}
