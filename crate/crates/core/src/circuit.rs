//! Semantic circuit IR.
//!
//! Qubit `q` is bit `q` of a basis index. Registers are listed least
//! significant qubit first. System qubits are `0..num_system_qubits`, ancillas
//! follow.
//!
//! Per-kind conventions for the register fields:
//!
//! | kind | targets | controls | extra |
//! |------|---------|----------|-------|
//! | H, X, S, RY, RZ | one qubit | plain controls | `adjoint` on S |
//! | CNOT | one qubit | one control | |
//! | SWAP | two qubits | plain | |
//! | ControlledRZ | one qubit | one control | |
//! | MultiplexedRY/RZ | one qubit | select register (polarity true) | `params[s]` per select value |
//! | QROMLookup | output register | address register | XORs `table[addr]` |
//! | InPlaceAdder | accumulator | plain | `operand` register added mod 2^b |
//! | ConstantAdder | accumulator | address register | adds `table[addr]` mod 2^b |
//! | Comparator | flag | address register | flag ^= `[operand >= table[addr]]` |
//! | CSwap | two equal halves | plain | |
//! | BlockGate | block qubits | plain | `block` payload |

use serde::{Deserialize, Serialize};

use crate::error::{QdlcError, Result};
use crate::types::{ResourceEstimate, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    S,
    RY,
    RZ,
    CNOT,
    SWAP,
    ControlledRZ,
    MultiplexedRY,
    MultiplexedRZ,
    QROMLookup,
    InPlaceAdder,
    ConstantAdder,
    Comparator,
    CSwap,
    BlockGate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Table {
    Int(Vec<i64>),
    Real(Vec<f64>),
}

impl Table {
    pub fn len(&self) -> usize {
        match self {
            Table::Int(v) => v.len(),
            Table::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn int(&self, i: usize) -> i64 {
        match self {
            Table::Int(v) => v.get(i).copied().unwrap_or(0),
            Table::Real(v) => v.get(i).map(|x| *x as i64).unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum BlockAction {
    /// Row-major dense unitary on the block qubits (first target = bit 0).
    Dense { dim: usize, re: Vec<f64>, im: Vec<f64> },
    /// Acts on `[flag, system..]`: for each system basis state `j` the flag
    /// sees the reflection `[[a_j, s_j], [s_j, -a_j]]`, `s_j = sqrt(1 - a_j^2)`.
    DiagonalEncoding { values: Vec<f64> },
    Qft { inverse: bool },
    /// Basis permutation `|x> -> |map[x]>` on the block register.
    Permutation { map: Vec<usize> },
    Circuit { gates: Vec<GateRecord> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockPayload {
    pub label: String,
    pub action: BlockAction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<ResourceEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    #[serde(default)]
    pub controls: Vec<(usize, bool)>,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default)]
    pub table: Option<Table>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub operand: Vec<usize>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub adjoint: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<Box<BlockPayload>>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl GateRecord {
    fn bare(kind: GateKind, targets: Vec<usize>) -> Self {
        GateRecord {
            kind,
            targets,
            controls: Vec::new(),
            params: Vec::new(),
            table: None,
            operand: Vec::new(),
            adjoint: false,
            block: None,
        }
    }

    pub fn h(q: usize) -> Self {
        Self::bare(GateKind::H, vec![q])
    }

    pub fn x(q: usize) -> Self {
        Self::bare(GateKind::X, vec![q])
    }

    pub fn s(q: usize) -> Self {
        Self::bare(GateKind::S, vec![q])
    }

    pub fn sdg(q: usize) -> Self {
        let mut g = Self::bare(GateKind::S, vec![q]);
        g.adjoint = true;
        g
    }

    pub fn ry(q: usize, theta: f64) -> Self {
        let mut g = Self::bare(GateKind::RY, vec![q]);
        g.params = vec![theta];
        g
    }

    pub fn rz(q: usize, theta: f64) -> Self {
        let mut g = Self::bare(GateKind::RZ, vec![q]);
        g.params = vec![theta];
        g
    }

    pub fn cnot(c: usize, t: usize) -> Self {
        let mut g = Self::bare(GateKind::CNOT, vec![t]);
        g.controls = vec![(c, true)];
        g
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::bare(GateKind::SWAP, vec![a, b])
    }

    pub fn crz(c: usize, t: usize, theta: f64) -> Self {
        let mut g = Self::bare(GateKind::ControlledRZ, vec![t]);
        g.controls = vec![(c, true)];
        g.params = vec![theta];
        g
    }

    pub fn mux_ry(select: &[usize], t: usize, angles: Vec<f64>) -> Self {
        let mut g = Self::bare(GateKind::MultiplexedRY, vec![t]);
        g.controls = select.iter().map(|&q| (q, true)).collect();
        g.params = angles;
        g
    }

    pub fn mux_rz(select: &[usize], t: usize, angles: Vec<f64>) -> Self {
        let mut g = Self::bare(GateKind::MultiplexedRZ, vec![t]);
        g.controls = select.iter().map(|&q| (q, true)).collect();
        g.params = angles;
        g
    }

    pub fn qrom(address: &[usize], out: &[usize], table: Vec<i64>) -> Self {
        let mut g = Self::bare(GateKind::QROMLookup, out.to_vec());
        g.controls = address.iter().map(|&q| (q, true)).collect();
        g.table = Some(Table::Int(table));
        g
    }

    pub fn adder(acc: &[usize], operand: &[usize]) -> Self {
        let mut g = Self::bare(GateKind::InPlaceAdder, acc.to_vec());
        g.operand = operand.to_vec();
        g
    }

    pub fn const_adder(acc: &[usize], address: &[usize], table: Vec<i64>) -> Self {
        let mut g = Self::bare(GateKind::ConstantAdder, acc.to_vec());
        g.controls = address.iter().map(|&q| (q, true)).collect();
        g.table = Some(Table::Int(table));
        g
    }

    pub fn comparator(flag: usize, operand: &[usize], address: &[usize], thresholds: Vec<i64>) -> Self {
        let mut g = Self::bare(GateKind::Comparator, vec![flag]);
        g.operand = operand.to_vec();
        g.controls = address.iter().map(|&q| (q, true)).collect();
        g.table = Some(Table::Int(thresholds));
        g
    }

    pub fn cswap(control: usize, a: &[usize], b: &[usize]) -> Self {
        let mut t = a.to_vec();
        t.extend_from_slice(b);
        let mut g = Self::bare(GateKind::CSwap, t);
        g.controls = vec![(control, true)];
        g
    }

    pub fn block(targets: &[usize], label: &str, action: BlockAction) -> Self {
        let mut g = Self::bare(GateKind::BlockGate, targets.to_vec());
        g.block = Some(Box::new(BlockPayload { label: label.to_string(), action, cost: None }));
        g
    }

    pub fn dense(targets: &[usize], label: &str, m: &[C64]) -> Self {
        let dim = 1usize << targets.len();
        assert_eq!(m.len(), dim * dim);
        Self::block(
            targets,
            label,
            BlockAction::Dense {
                dim,
                re: m.iter().map(|z| z.re).collect(),
                im: m.iter().map(|z| z.im).collect(),
            },
        )
    }

    /// Zero-qubit block multiplying the state by `e^{i phi}`; costs nothing.
    pub fn global_phase(phi: f64) -> Self {
        let z = C64::from_polar(1.0, phi);
        let mut g = Self::dense(&[], "global-phase", &[z]);
        g.block.as_mut().unwrap().cost = Some(ResourceEstimate::zero());
        g
    }

    pub fn with_controls(mut self, controls: &[(usize, bool)]) -> Self {
        self.controls.extend_from_slice(controls);
        self
    }

    pub fn with_cost(mut self, cost: ResourceEstimate) -> Self {
        if let Some(b) = self.block.as_mut() {
            b.cost = Some(cost);
        }
        self
    }

    pub fn adjointed(mut self) -> Self {
        self.adjoint = !self.adjoint;
        self
    }

    pub fn payload(&self) -> Option<&BlockPayload> {
        self.block.as_deref()
    }

    /// Every qubit the record touches.
    pub fn qubits(&self) -> Vec<usize> {
        let mut q: Vec<usize> = self.targets.clone();
        q.extend(self.controls.iter().map(|c| c.0));
        q.extend(self.operand.iter().copied());
        if let Some(BlockPayload { action: BlockAction::Circuit { gates }, .. }) = self.payload() {
            for g in gates {
                q.extend(g.qubits());
            }
        }
        q
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitIR {
    pub num_system_qubits: usize,
    pub num_ancilla_qubits: usize,
    pub gates: Vec<GateRecord>,
}

impl CircuitIR {
    pub fn new(num_system_qubits: usize, num_ancilla_qubits: usize) -> Self {
        CircuitIR { num_system_qubits, num_ancilla_qubits, gates: Vec::new() }
    }

    pub fn total_qubits(&self) -> usize {
        self.num_system_qubits + self.num_ancilla_qubits
    }

    pub fn push(&mut self, g: GateRecord) {
        self.gates.push(g);
    }

    pub fn extend<I: IntoIterator<Item = GateRecord>>(&mut self, gates: I) {
        self.gates.extend(gates);
    }

    pub fn count_kind(&self, kind: GateKind) -> usize {
        fn walk(gates: &[GateRecord], kind: GateKind) -> usize {
            gates
                .iter()
                .map(|g| {
                    let inner = match g.payload() {
                        Some(BlockPayload { action: BlockAction::Circuit { gates }, .. }) => walk(gates, kind),
                        _ => 0,
                    };
                    inner + usize::from(g.kind == kind)
                })
                .sum()
        }
        walk(&self.gates, kind)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.total_qubits();
        for (i, g) in self.gates.iter().enumerate() {
            validate_gate(g, n).map_err(|e| QdlcError::Validation(format!("gate {i} ({:?}): {e}", g.kind)))?;
        }
        Ok(())
    }
}

fn validate_gate(g: &GateRecord, n: usize) -> std::result::Result<(), String> {
    let own: Vec<usize> = g
        .targets
        .iter()
        .copied()
        .chain(g.controls.iter().map(|c| c.0))
        .chain(g.operand.iter().copied())
        .collect();
    if let Some(&q) = own.iter().find(|&&q| q >= n) {
        return Err(format!("qubit {q} out of range (register has {n})"));
    }
    let mut seen = own.clone();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err("repeated qubit within record".into());
    }
    let c = g.controls.len();
    let want_params = |k: usize| -> std::result::Result<(), String> {
        if g.params.len() != k {
            return Err(format!("expected {k} params, got {}", g.params.len()));
        }
        if g.params.iter().any(|p| !p.is_finite()) {
            return Err("non-finite angle".into());
        }
        Ok(())
    };
    let want_targets = |k: usize| -> std::result::Result<(), String> {
        if g.targets.len() != k {
            return Err(format!("expected {k} targets, got {}", g.targets.len()));
        }
        Ok(())
    };
    match g.kind {
        GateKind::H | GateKind::X | GateKind::S => want_targets(1)?,
        GateKind::RY | GateKind::RZ => {
            want_targets(1)?;
            want_params(1)?;
        }
        GateKind::CNOT => {
            want_targets(1)?;
            if c != 1 {
                return Err("CNOT needs exactly one control".into());
            }
        }
        GateKind::SWAP => want_targets(2)?,
        GateKind::ControlledRZ => {
            want_targets(1)?;
            want_params(1)?;
            if c != 1 {
                return Err("ControlledRZ needs exactly one control".into());
            }
        }
        GateKind::MultiplexedRY | GateKind::MultiplexedRZ => {
            want_targets(1)?;
            if c >= 31 {
                return Err("select register too wide".into());
            }
            want_params(1 << c)?;
            if g.controls.iter().any(|x| !x.1) {
                return Err("multiplexer select qubits must have positive polarity".into());
            }
        }
        GateKind::QROMLookup | GateKind::ConstantAdder => {
            if g.targets.is_empty() || g.targets.len() > 62 {
                return Err("bad output register width".into());
            }
            let t = g.table.as_ref().ok_or("missing table")?;
            if !matches!(t, Table::Int(_)) {
                return Err("table must hold integers".into());
            }
            if c < 63 && t.len() > 1usize << c {
                return Err("table longer than the address space".into());
            }
            if g.kind == GateKind::ConstantAdder && c == 0 && t.len() != 1 {
                return Err("unaddressed constant adder needs exactly one constant".into());
            }
        }
        GateKind::InPlaceAdder => {
            if g.targets.is_empty() || g.operand.is_empty() {
                return Err("adder needs accumulator and operand registers".into());
            }
        }
        GateKind::Comparator => {
            want_targets(1)?;
            if g.operand.is_empty() {
                return Err("comparator needs an operand register".into());
            }
            let t = g.table.as_ref().ok_or("missing threshold table")?;
            if c < 63 && t.len() > 1usize << c {
                return Err("threshold table longer than the address space".into());
            }
        }
        GateKind::CSwap => {
            if g.targets.is_empty() || g.targets.len() % 2 != 0 {
                return Err("CSwap needs two equal halves".into());
            }
        }
        GateKind::BlockGate => {
            let p = g.payload().ok_or("missing block payload")?;
            let m = g.targets.len();
            match &p.action {
                BlockAction::Dense { dim, re, im } => {
                    if *dim != 1usize << m || re.len() != dim * dim || im.len() != dim * dim {
                        return Err("dense block has wrong dimensions".into());
                    }
                }
                BlockAction::DiagonalEncoding { values } => {
                    if m == 0 || values.len() != 1usize << (m - 1) {
                        return Err("diagonal encoding needs 2^(m-1) values".into());
                    }
                    if values.iter().any(|v| !v.is_finite() || v.abs() > 1.0 + 1e-12) {
                        return Err("diagonal encoding values must lie in [-1,1]".into());
                    }
                }
                BlockAction::Qft { .. } => {
                    if m == 0 {
                        return Err("QFT on an empty register".into());
                    }
                }
                BlockAction::Permutation { map } => {
                    if map.len() != 1usize << m {
                        return Err("permutation has wrong length".into());
                    }
                    let mut seen = vec![false; map.len()];
                    for &x in map {
                        if x >= map.len() || seen[x] {
                            return Err("map is not a permutation".into());
                        }
                        seen[x] = true;
                    }
                }
                BlockAction::Circuit { gates } => {
                    for inner in gates {
                        validate_gate(inner, n)?;
                        if inner.qubits().iter().any(|q| g.controls.iter().any(|c| c.0 == *q)) {
                            return Err("sub-circuit touches a control of its block".into());
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Inverse of a gate sequence: reversed order, each gate inverted.
pub fn adjoint_gates(gates: &[GateRecord]) -> Vec<GateRecord> {
    gates.iter().rev().map(adjoint_gate).collect()
}

pub fn adjoint_gate(g: &GateRecord) -> GateRecord {
    let mut a = g.clone();
    match g.kind {
        GateKind::H | GateKind::X | GateKind::CNOT | GateKind::SWAP | GateKind::QROMLookup | GateKind::CSwap => {}
        GateKind::Comparator => {}
        GateKind::S | GateKind::InPlaceAdder | GateKind::ConstantAdder => a.adjoint = !g.adjoint,
        GateKind::RY | GateKind::RZ | GateKind::ControlledRZ | GateKind::MultiplexedRY | GateKind::MultiplexedRZ => {
            a.params = g.params.iter().map(|p| -p).collect();
        }
        GateKind::BlockGate => {
            let p = a.block.as_mut().expect("validated block");
            p.action = match &p.action {
                BlockAction::Dense { dim, re, im } => {
                    let d = *dim;
                    let mut r2 = vec![0.0; d * d];
                    let mut i2 = vec![0.0; d * d];
                    for i in 0..d {
                        for j in 0..d {
                            r2[j * d + i] = re[i * d + j];
                            i2[j * d + i] = -im[i * d + j];
                        }
                    }
                    BlockAction::Dense { dim: d, re: r2, im: i2 }
                }
                BlockAction::DiagonalEncoding { values } => BlockAction::DiagonalEncoding { values: values.clone() },
                BlockAction::Qft { inverse } => BlockAction::Qft { inverse: !inverse },
                BlockAction::Permutation { map } => {
                    let mut inv = vec![0; map.len()];
                    for (x, &y) in map.iter().enumerate() {
                        inv[y] = x;
                    }
                    BlockAction::Permutation { map: inv }
                }
                BlockAction::Circuit { gates } => BlockAction::Circuit { gates: adjoint_gates(gates) },
            };
            p.label = if let Some(stripped) = p.label.strip_suffix("-dg") {
                stripped.to_string()
            } else {
                format!("{}-dg", p.label)
            };
        }
    }
    a
}

/// Relabels every qubit index through `f`.
pub fn remap_gates(gates: &[GateRecord], f: &dyn Fn(usize) -> usize) -> Vec<GateRecord> {
    gates
        .iter()
        .map(|g| {
            let mut h = g.clone();
            h.targets = g.targets.iter().map(|&q| f(q)).collect();
            h.controls = g.controls.iter().map(|&(q, p)| (f(q), p)).collect();
            h.operand = g.operand.iter().map(|&q| f(q)).collect();
            if let Some(p) = h.block.as_mut() {
                if let BlockAction::Circuit { gates } = &p.action {
                    p.action = BlockAction::Circuit { gates: remap_gates(gates, f) };
                }
            }
            h
        })
        .collect()
}
