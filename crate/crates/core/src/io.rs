//! JSON file formats for vectors, circuits and structured operators.
//!
//! Floats go through serde_json, which writes the shortest decimal that
//! round-trips to the same f64.

use serde::{Deserialize, Serialize};

use crate::blockenc::{DDiagonalSpec, KineticSpec, Operator};
use crate::circuit::{CircuitIR, GateRecord};
use crate::error::{QdlcError, Result};
use crate::types::{MethodPlan, Task, TargetVector, C64};

pub const CIRCUIT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorFile {
    pub n_qubits: usize,
    pub task: Task,
    pub amplitudes: Vec<[f64; 2]>,
}

impl From<&TargetVector> for VectorFile {
    fn from(t: &TargetVector) -> Self {
        VectorFile { n_qubits: t.n_qubits, task: t.task, amplitudes: t.amplitudes.iter().map(|a| [a.re, a.im]).collect() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircuitFile {
    #[serde(default = "circuit_version")]
    pub schema_version: u32,
    pub system_qubits: usize,
    pub ancilla_qubits: usize,
    pub gates: Vec<GateRecord>,
    /// Plan the circuit was synthesized from; carries the verification bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<MethodPlan>,
}

fn circuit_version() -> u32 {
    CIRCUIT_SCHEMA_VERSION
}

fn parse<T: for<'de> Deserialize<'de>>(what: &str, text: &str) -> Result<T> {
    // serde_json messages carry "at line L column C"
    serde_json::from_str(text).map_err(|e| QdlcError::Parse(format!("{what}: {e}")))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| QdlcError::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn vector_from_json(text: &str) -> Result<TargetVector> {
    let f: VectorFile = parse("vector file", text)?;
    let amps = f.amplitudes.iter().map(|a| C64::new(a[0], a[1])).collect();
    TargetVector::new(f.n_qubits, amps, f.task)
}

pub fn vector_to_json(t: &TargetVector) -> Result<String> {
    to_json(&VectorFile::from(t))
}

pub fn circuit_from_json(text: &str) -> Result<CircuitIR> {
    circuit_file_from_json(text).map(|(ir, _)| ir)
}

/// Circuit and, when present, the embedded plan.
pub fn circuit_file_from_json(text: &str) -> Result<(CircuitIR, Option<MethodPlan>)> {
    let f: CircuitFile = parse("circuit file", text)?;
    if f.schema_version != CIRCUIT_SCHEMA_VERSION {
        return Err(QdlcError::Validation(format!("unsupported circuit schema version {}", f.schema_version)));
    }
    let ir = CircuitIR { num_system_qubits: f.system_qubits, num_ancilla_qubits: f.ancilla_qubits, gates: f.gates };
    ir.validate()?;
    Ok((ir, f.plan))
}

pub fn circuit_to_json(ir: &CircuitIR, plan: Option<&MethodPlan>) -> Result<String> {
    to_json(&CircuitFile {
        schema_version: CIRCUIT_SCHEMA_VERSION,
        system_qubits: ir.num_system_qubits,
        ancilla_qubits: ir.num_ancilla_qubits,
        gates: ir.gates.clone(),
        plan: plan.cloned(),
    })
}

/// Any input accepted by the command line.
#[derive(Debug, Clone)]
pub enum InputFile {
    Vector(TargetVector),
    Operator(Operator),
}

pub fn input_from_json(text: &str) -> Result<InputFile> {
    let v: serde_json::Value = parse("input file", text)?;
    if v.get("amplitudes").is_some() {
        vector_from_json(text).map(InputFile::Vector)
    } else if v.get("diagonals").is_some() {
        let s: DDiagonalSpec = parse("d-diagonal file", text)?;
        s.validate()?;
        Ok(InputFile::Operator(Operator::DDiagonal(s)))
    } else if v.get("qubits_per_axis").is_some() {
        parse::<KineticSpec>("kinetic file", text).map(|k| InputFile::Operator(Operator::Kinetic(k)))
    } else {
        Err(QdlcError::Parse(
            "input file: expected \"amplitudes\", \"diagonals\" or \"qubits_per_axis\"".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_round_trip_is_exact() {
        let t = TargetVector::new(1, vec![C64::new(0.1, 0.2), C64::new(-0.3, 1.0 / 3.0)], Task::StatePrep).unwrap();
        let back = vector_from_json(&vector_to_json(&t).unwrap()).unwrap();
        assert_eq!(back.amplitudes, t.amplitudes);
    }

    #[test]
    fn parse_errors_carry_line() {
        let e = vector_from_json("{\n\"n_qubits\": 1,\n\"task\": oops}").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
    }
}
