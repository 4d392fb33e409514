use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::circuit::{adjoint_gates, CircuitIR, GateRecord};
use crate::costmodel::{finish_estimate, tally_gates, CostConfig};
use crate::diagenc::multiplexer::solve_diag_mottonen;
use crate::error::{QdlcError, Result};
use crate::stateprep::grover_rudolph::state_prep_gates;
use crate::types::{ErrorBudget, Method, MethodPlan, C64};

/// Share of eps_p spent on the coefficient preparation.
pub const PREP_SHARE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagonal {
    pub shift: i64,
    pub weight: f64,
    /// c_j, applied as |j + shift><j|.
    pub entries: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DDiagonalSpec {
    pub n_qubits: usize,
    pub diagonals: Vec<Diagonal>,
}

impl DDiagonalSpec {
    pub fn lcu_norm(&self) -> f64 {
        self.diagonals.iter().map(|d| d.weight).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let dim = 1i64 << self.n_qubits;
        if self.diagonals.is_empty() {
            return Err(QdlcError::Domain("at least one diagonal is required".into()));
        }
        for (i, d) in self.diagonals.iter().enumerate() {
            if d.shift.abs() >= dim {
                return Err(QdlcError::Range(format!("shift {} of diagonal {i} exceeds the register", d.shift)));
            }
            if !(d.weight > 0.0) || !d.weight.is_finite() {
                return Err(QdlcError::Domain(format!(
                    "weight of diagonal {i} must be positive; absorb signs into the entries"
                )));
            }
            if d.entries.len() as i64 != dim {
                return Err(QdlcError::Dimension(format!("diagonal {i} needs {dim} entries")));
            }
            if let Some(c) = d.entries.iter().find(|c| !c.is_finite() || c.abs() > 1.0 + 1e-12) {
                return Err(QdlcError::NormViolation(format!("entry {c} of diagonal {i} outside [-1, 1]")));
            }
        }
        Ok(())
    }

    /// Address width of the diagonal index register.
    pub fn index_bits(&self) -> usize {
        let d = self.diagonals.len();
        if d <= 1 {
            0
        } else {
            (d - 1).ilog2() as usize + 1
        }
    }

    /// Dense sum_i w_i D_i / lambda; source indices shifted out of range drop.
    pub fn matrix(&self) -> DMatrix<C64> {
        let dim = 1usize << self.n_qubits;
        let lambda = self.lcu_norm();
        let mut m = DMatrix::zeros(dim, dim);
        for d in &self.diagonals {
            for (j, c) in d.entries.iter().enumerate() {
                let row = j as i64 + d.shift;
                if row >= 0 && row < dim as i64 {
                    m[(row as usize, j)] += C64::new(d.weight * c / lambda, 0.0);
                }
            }
        }
        m
    }

    /// Entries of the unified diagonal, block a holding c_{a, j'-k_a} at
    /// output row j'; rows fed from a wrapped source are zero.
    pub fn unified_entries(&self) -> Vec<f64> {
        let dim = 1usize << self.n_qubits;
        let blocks = 1usize << self.index_bits();
        let mut e = vec![1.0; dim * blocks];
        for (a, d) in self.diagonals.iter().enumerate() {
            for jp in 0..dim {
                let src = jp as i64 - d.shift;
                e[a * dim + jp] = if src >= 0 && src < dim as i64 { d.entries[src as usize].clamp(-1.0, 1.0) } else { 0.0 };
            }
        }
        e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdderCount {
    pub emitted: usize,
    /// One adder per diagonal, the per-term construction.
    pub baseline: usize,
}

pub fn adder_count(spec: &DDiagonalSpec) -> AdderCount {
    AdderCount { emitted: 1, baseline: spec.diagonals.len() }
}

/// Two's-complement image of `k` in `bits` bits.
fn twos(k: i64, bits: usize) -> i64 {
    k.rem_euclid(1i64 << bits)
}

pub fn synth_ddiagonal(spec: &DDiagonalSpec, budget: ErrorBudget, cfg: &CostConfig) -> Result<(MethodPlan, CircuitIR)> {
    spec.validate()?;
    let n = spec.n_qubits;
    let w = spec.index_bits();
    let lambda = spec.lcu_norm();
    let sys: Vec<usize> = (0..n).collect();
    let idx: Vec<usize> = (n..n + w).collect();
    let shift: Vec<usize> = (n + w..2 * n + w).collect();
    let flag = 2 * n + w;
    let mut ir = CircuitIR::new(n, w + n + 1);

    let mut amps: Vec<C64> = spec.diagonals.iter().map(|d| C64::new((d.weight / lambda).sqrt(), 0.0)).collect();
    amps.resize(1 << w, C64::new(0.0, 0.0));
    let (prep, prep_rot) = state_prep_gates(&amps, &idx);
    let unprep = adjoint_gates(&prep);
    let delta_prep = if prep_rot > 0 { PREP_SHARE * budget.eps_p / (prep_rot as f64).sqrt() } else { 1.0 };

    let shifts: Vec<i64> = spec.diagonals.iter().map(|d| twos(d.shift, n)).chain(std::iter::repeat(0)).take(1 << w).collect();
    let load = GateRecord::const_adder(&shift, &idx, shifts);
    let mut select = sys.clone();
    select.extend(&idx);
    let angles: Vec<f64> = spec.unified_entries().iter().map(|c| 2.0 * c.acos()).collect();
    let mid = vec![
        load.clone(),
        GateRecord::adder(&sys, &shift),
        load.adjointed(),
        GateRecord::mux_ry(&select, flag, angles),
    ];
    let delta_mux = solve_diag_mottonen(n + w, (1.0 - PREP_SHARE) * budget.eps_p);

    let parts = [
        tally_gates(&prep, cfg, delta_prep)?,
        tally_gates(&mid, cfg, delta_mux)?,
        tally_gates(&unprep, cfg, delta_prep)?,
    ];
    ir.extend(prep);
    ir.extend(mid);
    ir.extend(unprep);

    let mut plan = MethodPlan::new(Method::DDiagonal, budget);
    plan.set("d", spec.diagonals.len() as f64);
    plan.set("lambda", lambda);
    plan.set("s_d", 1.0);
    plan.set("delta_g", delta_mux);
    plan.set("delta_prep", delta_prep);
    plan.resources = finish_estimate(&ir, &parts);
    Ok((plan, ir))
}
