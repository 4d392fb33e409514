use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QdlcError, Result};

pub type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Task {
    #[serde(rename = "state-prep")]
    StatePrep,
    #[serde(rename = "diagonal")]
    DiagonalEncode,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Task::StatePrep => write!(f, "state-prep"),
            Task::DiagonalEncode => write!(f, "diagonal"),
        }
    }
}

impl FromStr for Task {
    type Err = QdlcError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "state-prep" | "stateprep" => Ok(Task::StatePrep),
            "diagonal" | "diag" => Ok(Task::DiagonalEncode),
            other => Err(QdlcError::Parse(format!("unknown task '{other}'"))),
        }
    }
}

/// The vector to load. `scale` records the factor removed by normalization
/// (1.0 when the input was already normalized or is a diagonal).
#[derive(Debug, Clone, PartialEq)]
pub struct TargetVector {
    pub n_qubits: usize,
    pub amplitudes: Vec<C64>,
    pub task: Task,
    pub scale: f64,
}

impl TargetVector {
    /// Validated target; state-prep inputs are normalized.
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>, task: Task) -> Result<Self> {
        if n_qubits == 0 {
            return Err(QdlcError::Dimension("n_qubits must be positive".into()));
        }
        if n_qubits >= usize::BITS as usize || amplitudes.len() != 1usize << n_qubits {
            return Err(QdlcError::Dimension(format!(
                "expected 2^{} amplitudes, got {}",
                n_qubits,
                amplitudes.len()
            )));
        }
        validate_target(&TargetVector { n_qubits, amplitudes, task, scale: 1.0 })
    }

    pub fn from_real(n_qubits: usize, values: &[f64], task: Task) -> Result<Self> {
        Self::new(n_qubits, values.iter().map(|&x| C64::new(x, 0.0)).collect(), task)
    }

    /// Builds and validates a state-prep target from real samples.
    pub fn state(values: &[f64]) -> Result<Self> {
        Self::from_real(log2_exact(values.len())?, values, Task::StatePrep)
    }

    /// Builds and validates a diagonal target from real samples.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::from_real(log2_exact(values.len())?, values, Task::DiagonalEncode)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_real(&self) -> bool {
        self.amplitudes.iter().all(|a| a.im == 0.0)
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.re).collect()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

pub(crate) fn log2_exact(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(QdlcError::Dimension(format!("length {len} is not a power of two >= 2")));
    }
    Ok(len.trailing_zeros() as usize)
}

/// Normalizes state-prep targets (recording the removed scale) and checks the
/// sup-norm contract of diagonal targets.
pub fn validate_target(v: &TargetVector) -> Result<TargetVector> {
    if v.amplitudes.len() != 1usize << v.n_qubits {
        return Err(QdlcError::Dimension(format!(
            "expected 2^{} amplitudes, got {}",
            v.n_qubits,
            v.amplitudes.len()
        )));
    }
    if v.amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(QdlcError::Domain("non-finite amplitude".into()));
    }
    let norm = crate::metrics::l2_norm(&v.amplitudes);
    if norm == 0.0 {
        return Err(QdlcError::Degenerate("zero vector".into()));
    }
    match v.task {
        Task::StatePrep => {
            let mut out = v.clone();
            if (norm - 1.0).abs() > 1e-12 {
                for a in out.amplitudes.iter_mut() {
                    *a /= norm;
                }
                out.scale = v.scale * norm;
            }
            Ok(out)
        }
        Task::DiagonalEncode => {
            let sup = crate::metrics::linf_norm(&v.amplitudes);
            if sup > 1.0 + 1e-12 {
                return Err(QdlcError::NormViolation(format!(
                    "diagonal entries must satisfy |a| <= 1, max is {sup}"
                )));
            }
            Ok(v.clone())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub epsilon: f64,
    pub omega: f64,
    pub eps_p: f64,
    pub eps_a: f64,
}

impl ErrorBudget {
    pub fn new(epsilon: f64, omega: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(QdlcError::Domain(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(omega > 0.0 && omega <= 1.0) {
            return Err(QdlcError::Domain(format!("omega must lie in (0,1], got {omega}")));
        }
        Ok(ErrorBudget {
            epsilon,
            omega,
            eps_p: omega * epsilon,
            eps_a: (1.0 - omega) * epsilon,
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceEstimate {
    pub t_count: u64,
    pub cnot_count: u64,
    pub rotation_count: u64,
    /// Toffolis already folded into `t_count`; kept separately so controlled
    /// surcharges can tell rotation T gates from Toffoli T gates.
    pub toffoli_count: u64,
    pub ancilla_qubits: u64,
    pub total_qubits: u64,
}

impl ResourceEstimate {
    pub fn zero() -> Self {
        Self::default()
    }
}

// Counts add; qubit counts take the maximum, since concatenated circuits
// reuse the same registers.
impl Add for ResourceEstimate {
    type Output = ResourceEstimate;
    fn add(self, o: ResourceEstimate) -> ResourceEstimate {
        ResourceEstimate {
            t_count: self.t_count + o.t_count,
            cnot_count: self.cnot_count + o.cnot_count,
            rotation_count: self.rotation_count + o.rotation_count,
            toffoli_count: self.toffoli_count + o.toffoli_count,
            ancilla_qubits: self.ancilla_qubits.max(o.ancilla_qubits),
            total_qubits: self.total_qubits.max(o.total_qubits),
        }
    }
}

impl AddAssign for ResourceEstimate {
    fn add_assign(&mut self, o: ResourceEstimate) {
        *self = *self + o;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "mottonen")]
    Mottonen,
    #[serde(rename = "qrom")]
    QromStatePrep,
    #[serde(rename = "sparse")]
    SparseSOS,
    #[serde(rename = "mps")]
    MPS,
    #[serde(rename = "fsl")]
    FSL,
    #[serde(rename = "alias")]
    AliasSampling,
    #[serde(rename = "diag-mottonen")]
    MottonenDiag,
    #[serde(rename = "diag-qrom")]
    QromDiag,
    #[serde(rename = "diag-qsp")]
    QspDiag,
    #[serde(rename = "diag-walsh")]
    WalshDiag,
    #[serde(rename = "hybrid")]
    Hybrid,
    #[serde(rename = "ddiagonal")]
    DDiagonal,
    #[serde(rename = "kinetic")]
    Kinetic,
}

impl Method {
    pub const ALL: [Method; 13] = [
        Method::Mottonen,
        Method::QromStatePrep,
        Method::SparseSOS,
        Method::MPS,
        Method::FSL,
        Method::AliasSampling,
        Method::MottonenDiag,
        Method::QromDiag,
        Method::QspDiag,
        Method::WalshDiag,
        Method::Hybrid,
        Method::DDiagonal,
        Method::Kinetic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Mottonen => "mottonen",
            Method::QromStatePrep => "qrom",
            Method::SparseSOS => "sparse",
            Method::MPS => "mps",
            Method::FSL => "fsl",
            Method::AliasSampling => "alias",
            Method::MottonenDiag => "diag-mottonen",
            Method::QromDiag => "diag-qrom",
            Method::QspDiag => "diag-qsp",
            Method::WalshDiag => "diag-walsh",
            Method::Hybrid => "hybrid",
            Method::DDiagonal => "ddiagonal",
            Method::Kinetic => "kinetic",
        }
    }

    pub fn task(&self) -> Task {
        match self {
            Method::MottonenDiag
            | Method::QromDiag
            | Method::QspDiag
            | Method::WalshDiag
            | Method::DDiagonal
            | Method::Kinetic => {
                Task::DiagonalEncode
            }
            _ => Task::StatePrep,
        }
    }

    /// Methods the planner tries when no allowlist is given. Alias sampling
    /// leaves a garbage register behind, so it is opt-in only.
    pub fn defaults_for(task: Task) -> Vec<Method> {
        match task {
            Task::StatePrep => vec![
                Method::Mottonen,
                Method::QromStatePrep,
                Method::SparseSOS,
                Method::MPS,
                Method::FSL,
            ],
            Task::DiagonalEncode => vec![
                Method::MottonenDiag,
                Method::QromDiag,
                Method::QspDiag,
                Method::WalshDiag,
            ],
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = QdlcError;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| QdlcError::Parse(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodPlan {
    pub method: Method,
    pub hyperparams: BTreeMap<String, f64>,
    pub budget: ErrorBudget,
    pub resources: ResourceEstimate,
    pub feasible: bool,
    pub eps_a_predicted: f64,
    /// Error from finite-width classical tables (angle codes, alias blocks)
    /// that the simulator reproduces; zero for methods without such tables.
    #[serde(default)]
    pub table_error_predicted: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl MethodPlan {
    pub fn new(method: Method, budget: ErrorBudget) -> Self {
        MethodPlan {
            method,
            hyperparams: BTreeMap::new(),
            budget,
            resources: ResourceEstimate::zero(),
            feasible: true,
            eps_a_predicted: 0.0,
            table_error_predicted: 0.0,
            note: None,
        }
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.hyperparams.get(key).copied()
    }

    pub fn set(&mut self, key: &str, value: f64) {
        self.hyperparams.insert(key.to_string(), value);
    }

    /// Bound used by verification: approximation error plus classical table error.
    pub fn verification_bound(&self) -> f64 {
        self.eps_a_predicted + self.table_error_predicted
    }
}
