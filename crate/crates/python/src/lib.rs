//! Python bindings: targets, budgets, plan reports and circuits, plus the
//! plan / synthesize / verify pipeline.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qdlc_core::costmodel::{t_count_for_rotation as t_count, CostConfig};
use qdlc_core::diagenc::walsh_transform as wht;
use qdlc_core::io::{circuit_file_from_json, circuit_to_json, to_json};
use qdlc_core::planner::{self, PlanReport, PlanRequest, SelectionMetric};
use qdlc_core::simulator::{self, Verification, VerifyLimits};
use qdlc_core::{families, metrics, CircuitIR, ErrorBudget, GateKind, Method, MethodPlan, QdlcError, Task, TargetVector};

create_exception!(qdlc, QdlcException, PyValueError);
create_exception!(qdlc, InfeasibleError, QdlcException);

fn err(e: QdlcError) -> PyErr {
    match e {
        QdlcError::Infeasible(m) => InfeasibleError::new_err(m),
        other => QdlcException::new_err(other.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = QdlcError>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

/// A validated state-prep or diagonal target.
#[pyclass(name = "Target", module = "qdlc", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyTarget {
    pub inner: TargetVector,
}

#[pymethods]
impl PyTarget {
    #[new]
    #[pyo3(signature = (amplitudes, task = "state-prep"))]
    fn new(amplitudes: Vec<Complex64>, task: &str) -> PyResult<Self> {
        Ok(PyTarget { inner: build_target(amplitudes, parse(task)?).map_err(err)? })
    }

    #[staticmethod]
    fn gaussian(n_qubits: usize, sigma: f64) -> PyResult<Self> {
        Ok(PyTarget { inner: families::gaussian(n_qubits, sigma).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (n_qubits, nonzeros, seed = 0))]
    fn sparse(n_qubits: usize, nonzeros: usize, seed: u64) -> PyResult<Self> {
        Ok(PyTarget { inner: families::sparse_random(n_qubits, nonzeros, seed).map_err(err)? })
    }

    #[staticmethod]
    fn parabola(n_qubits: usize) -> PyResult<Self> {
        Ok(PyTarget { inner: families::parabolic_diagonal(n_qubits).map_err(err)? })
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits
    }

    #[getter]
    fn task(&self) -> String {
        self.inner.task.to_string()
    }

    /// Factor removed by normalization.
    #[getter]
    fn scale(&self) -> f64 {
        self.inner.scale
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes.clone()
    }

    fn __len__(&self) -> usize {
        self.inner.dim()
    }

    fn __repr__(&self) -> String {
        format!("Target(n_qubits={}, task='{}')", self.inner.n_qubits, self.inner.task)
    }
}

pub fn build_target(amplitudes: Vec<Complex64>, task: Task) -> qdlc_core::Result<TargetVector> {
    let n = amplitudes.len();
    if n < 2 || !n.is_power_of_two() {
        return Err(QdlcError::Dimension(format!("length {n} is not a power of two >= 2")));
    }
    TargetVector::new(n.trailing_zeros() as usize, amplitudes, task)
}

#[pyclass(name = "Budget", module = "qdlc", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
pub struct PyBudget {
    pub inner: ErrorBudget,
}

#[pymethods]
impl PyBudget {
    #[new]
    fn new(epsilon: f64, omega: f64) -> PyResult<Self> {
        Ok(PyBudget { inner: ErrorBudget::new(epsilon, omega).map_err(err)? })
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega
    }

    #[getter]
    fn eps_p(&self) -> f64 {
        self.inner.eps_p
    }

    #[getter]
    fn eps_a(&self) -> f64 {
        self.inner.eps_a
    }

    fn __repr__(&self) -> String {
        format!("Budget(epsilon={}, omega={})", self.inner.epsilon, self.inner.omega)
    }
}

/// One method at one error split.
#[pyclass(name = "MethodPlan", module = "qdlc", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyMethodPlan {
    pub inner: MethodPlan,
}

#[pymethods]
impl PyMethodPlan {
    #[getter]
    fn method(&self) -> String {
        self.inner.method.to_string()
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.budget.omega
    }

    #[getter]
    fn feasible(&self) -> bool {
        self.inner.feasible
    }

    #[getter]
    fn eps_a_predicted(&self) -> f64 {
        self.inner.eps_a_predicted
    }

    #[getter]
    fn t_count(&self) -> u64 {
        self.inner.resources.t_count
    }

    #[getter]
    fn cnot_count(&self) -> u64 {
        self.inner.resources.cnot_count
    }

    #[getter]
    fn rotation_count(&self) -> u64 {
        self.inner.resources.rotation_count
    }

    #[getter]
    fn total_qubits(&self) -> u64 {
        self.inner.resources.total_qubits
    }

    /// Hyperparameter by name (m, d, chi, kappa, ...).
    fn param(&self, key: &str) -> Option<f64> {
        self.inner.param(key)
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "MethodPlan(method='{}', omega={}, t_count={}, feasible={})",
            self.inner.method, self.inner.budget.omega, self.inner.resources.t_count, self.inner.feasible
        )
    }
}

#[pyclass(name = "PlanReport", module = "qdlc", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyPlanReport {
    pub inner: PlanReport,
}

#[pymethods]
impl PyPlanReport {
    #[getter]
    fn selected(&self) -> Option<PyMethodPlan> {
        self.inner.selected.clone().map(|inner| PyMethodPlan { inner })
    }

    /// Every (method, omega) cell of the sweep.
    #[getter]
    fn rows(&self) -> Vec<PyMethodPlan> {
        self.inner.per_method_per_omega.iter().cloned().map(|inner| PyMethodPlan { inner }).collect()
    }

    /// Methods with no feasible split, with the limiting reason.
    #[getter]
    fn infeasibility(&self) -> Vec<(String, String)> {
        self.inner.infeasibility.iter().map(|i| (i.method.to_string(), i.reason.clone())).collect()
    }

    fn table(&self) -> String {
        self.inner.table()
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        match &self.inner.selected {
            Some(s) => format!("PlanReport(selected='{}', t_count={})", s.method, s.resources.t_count),
            None => "PlanReport(selected=None)".into(),
        }
    }
}

#[pyclass(name = "Circuit", module = "qdlc", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyCircuit {
    pub ir: CircuitIR,
    pub plan: Option<MethodPlan>,
}

#[pymethods]
impl PyCircuit {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let (ir, plan) = circuit_file_from_json(text).map_err(err)?;
        Ok(PyCircuit { ir, plan })
    }

    fn to_json(&self) -> PyResult<String> {
        circuit_to_json(&self.ir, self.plan.as_ref()).map_err(err)
    }

    #[getter]
    fn system_qubits(&self) -> usize {
        self.ir.num_system_qubits
    }

    #[getter]
    fn ancilla_qubits(&self) -> usize {
        self.ir.num_ancilla_qubits
    }

    #[getter]
    fn plan(&self) -> Option<PyMethodPlan> {
        self.plan.clone().map(|inner| PyMethodPlan { inner })
    }

    /// Number of top-level gates.
    fn __len__(&self) -> usize {
        self.ir.gates.len()
    }

    /// Gates of one kind, counting inside nested blocks.
    fn count(&self, kind: &str) -> PyResult<usize> {
        let k = gate_kind(kind).ok_or_else(|| QdlcException::new_err(format!("unknown gate kind '{kind}'")))?;
        Ok(self.ir.count_kind(k))
    }

    /// Output amplitudes on |0...0>, all qubits, little-endian.
    fn simulate(&self, py: Python<'_>) -> PyResult<Vec<Complex64>> {
        let ir = self.ir.clone();
        let out = py.detach(move || simulator::run(&ir)).map_err(err)?;
        Ok(out.amplitudes)
    }

    fn __repr__(&self) -> String {
        format!(
            "Circuit(system_qubits={}, ancilla_qubits={}, gates={})",
            self.ir.num_system_qubits,
            self.ir.num_ancilla_qubits,
            self.ir.gates.len()
        )
    }
}

pub fn gate_kind(name: &str) -> Option<GateKind> {
    serde_json::from_value(serde_json::Value::String(name.to_string())).ok()
}

#[pyclass(name = "Verification", module = "qdlc", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyVerification {
    pub inner: Verification,
}

#[pymethods]
impl PyVerification {
    #[getter]
    fn status(&self) -> String {
        serde_json::to_value(self.inner.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
    }

    #[getter]
    fn passed(&self) -> bool {
        self.inner.pass
    }

    #[getter]
    fn achieved_error(&self) -> Option<f64> {
        self.inner.achieved_error
    }

    #[getter]
    fn bound(&self) -> f64 {
        self.inner.bound
    }

    #[getter]
    fn norm(&self) -> String {
        self.inner.norm.clone()
    }

    fn __repr__(&self) -> String {
        format!("Verification(status='{}', achieved_error={:?}, bound={})", self.status(), self.inner.achieved_error, self.inner.bound)
    }
}

pub fn plan_request(
    target: &TargetVector,
    epsilon: f64,
    methods: Option<Vec<String>>,
    omega_step: f64,
    hybrid_depth: usize,
    metric: &str,
) -> qdlc_core::Result<PlanRequest> {
    let methods = methods
        .map(|v| v.iter().map(|m| m.parse::<Method>()).collect::<qdlc_core::Result<Vec<_>>>())
        .transpose()?;
    Ok(PlanRequest {
        methods,
        omega_step,
        hybrid_max_depth: hybrid_depth,
        metric: metric.parse::<SelectionMetric>()?,
        ..PlanRequest::new(target.clone(), epsilon)
    })
}

/// Grid search over the error split and every allowed method.
#[pyfunction]
#[pyo3(signature = (target, epsilon, methods = None, omega_step = 0.05, hybrid_depth = 0, metric = "t-count"))]
fn plan(
    py: Python<'_>,
    target: &PyTarget,
    epsilon: f64,
    methods: Option<Vec<String>>,
    omega_step: f64,
    hybrid_depth: usize,
    metric: &str,
) -> PyResult<PyPlanReport> {
    let req = plan_request(&target.inner, epsilon, methods, omega_step, hybrid_depth, metric).map_err(err)?;
    let inner = py.detach(move || planner::sweep(&req)).map_err(err)?;
    Ok(PyPlanReport { inner })
}

/// Circuit for the report's selected plan.
#[pyfunction]
fn synthesize(py: Python<'_>, report: &PyPlanReport, target: &PyTarget) -> PyResult<PyCircuit> {
    let (r, t) = (report.inner.clone(), target.inner.clone());
    let (plan, ir) = py.detach(move || planner::synthesize_selected(&r, &t, &CostConfig::default())).map_err(err)?;
    Ok(PyCircuit { ir, plan: Some(plan) })
}

/// One method at a fixed budget, bypassing the grid search.
#[pyfunction]
fn synthesize_method(py: Python<'_>, method: &str, target: &PyTarget, budget: &PyBudget) -> PyResult<PyCircuit> {
    let m: Method = parse(method)?;
    let (t, b) = (target.inner.clone(), budget.inner);
    let (plan, ir) = py.detach(move || planner::synthesize(m, &t, b, &CostConfig::default())).map_err(err)?;
    Ok(PyCircuit { ir, plan: Some(plan) })
}

/// Simulates the circuit against the target; needs the circuit's embedded plan.
#[pyfunction]
#[pyo3(signature = (circuit, target, bound = None))]
fn verify(py: Python<'_>, circuit: &PyCircuit, target: &PyTarget, bound: Option<f64>) -> PyResult<PyVerification> {
    let mut plan = circuit.plan.clone().ok_or_else(|| QdlcException::new_err("circuit carries no plan"))?;
    if let Some(b) = bound {
        plan.eps_a_predicted = b;
        plan.table_error_predicted = 0.0;
    }
    let (ir, t) = (circuit.ir.clone(), target.inner.clone());
    let inner = py
        .detach(move || simulator::verify_plan_with_limits(&plan, &ir, &t, VerifyLimits::default()))
        .map_err(err)?;
    Ok(PyVerification { inner })
}

#[pyfunction]
fn t_count_for_rotation(delta_g: f64) -> PyResult<u64> {
    t_count(delta_g, &CostConfig::default()).map_err(err)
}

#[pyfunction]
fn walsh_transform(samples: Vec<f64>) -> PyResult<Vec<f64>> {
    wht(&samples).map_err(err)
}

#[pyfunction]
fn kl_divergence(p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
    simulator::kl_divergence(&p, &q).map_err(err)
}

#[pyfunction]
fn l2_distance(a: Vec<Complex64>, b: Vec<Complex64>) -> PyResult<f64> {
    metrics::l2_distance(&a, &b).map_err(err)
}

#[pymodule]
fn qdlc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("QdlcException", m.py().get_type::<QdlcException>())?;
    m.add("InfeasibleError", m.py().get_type::<InfeasibleError>())?;
    m.add_class::<PyTarget>()?;
    m.add_class::<PyBudget>()?;
    m.add_class::<PyMethodPlan>()?;
    m.add_class::<PyPlanReport>()?;
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyVerification>()?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize_method, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(t_count_for_rotation, m)?)?;
    m.add_function(wrap_pyfunction!(walsh_transform, m)?)?;
    m.add_function(wrap_pyfunction!(kl_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(l2_distance, m)?)?;
    Ok(())
}
