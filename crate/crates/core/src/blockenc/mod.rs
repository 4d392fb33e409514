//! Block encodings built from diagonal encoders.

pub mod ddiagonal;
pub mod kinetic;

pub use ddiagonal::{adder_count, synth_ddiagonal, AdderCount, DDiagonalSpec, Diagonal};
pub use kinetic::{synth_kinetic, KineticSpec};

use crate::circuit::CircuitIR;
use crate::costmodel::CostConfig;
use crate::error::Result;
use crate::types::{ErrorBudget, Method, MethodPlan};

/// A structured operator input.
#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    DDiagonal(DDiagonalSpec),
    Kinetic(KineticSpec),
}

impl Operator {
    pub fn method(&self) -> Method {
        match self {
            Operator::DDiagonal(_) => Method::DDiagonal,
            Operator::Kinetic(_) => Method::Kinetic,
        }
    }

    pub fn system_qubits(&self) -> usize {
        match self {
            Operator::DDiagonal(s) => s.n_qubits,
            Operator::Kinetic(s) => 3 * s.qubits_per_axis,
        }
    }

    pub fn synthesize(&self, budget: ErrorBudget, cfg: &CostConfig) -> Result<(MethodPlan, CircuitIR)> {
        match self {
            Operator::DDiagonal(s) => synth_ddiagonal(s, budget, cfg),
            Operator::Kinetic(s) => synth_kinetic(s, budget, cfg),
        }
    }
}
