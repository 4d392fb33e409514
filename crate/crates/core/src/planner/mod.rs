//! Grid search over the precision/approximation split and cost-based method
//! selection.

mod hybrid;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blockenc::Operator;
use crate::circuit::CircuitIR;
use crate::costmodel::CostConfig;
use crate::diagenc::qsp::DEFAULT_MAX_DEGREE;
use crate::diagenc::{synth_diag_multiplexer, synth_diag_qsp, synth_diag_walsh};
use crate::error::{QdlcError, Result};
use crate::stateprep::{
    synth_alias, synth_fsl, synth_fsl_with, synth_mottonen, synth_mps, synth_mps_cached, synth_qrom_stateprep,
    synth_sparse_sos, FourierData, MpsFactorization,
};
use crate::types::{ErrorBudget, Method, MethodPlan, ResourceEstimate, Task, TargetVector};

pub use hybrid::{hybrid_plan, HybridSegment, HybridSummary, SEGMENT_SHARE};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_OMEGA_STEP: f64 = 0.05;
/// Above this size the planner keeps plans only and never simulates.
pub const ESTIMATE_ONLY_QUBITS: usize = 24;

/// Relative slack on the hyperparameter inequalities, for rounding in the
/// synthesizers' own arithmetic.
const CHECK_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionMetric {
    #[default]
    TCount,
    CnotCount,
    /// T count plus CNOT count.
    WeightedSum,
}

impl SelectionMetric {
    pub fn score(&self, r: &ResourceEstimate) -> u64 {
        match self {
            SelectionMetric::TCount => r.t_count,
            SelectionMetric::CnotCount => r.cnot_count,
            SelectionMetric::WeightedSum => r.t_count + r.cnot_count,
        }
    }
}

impl std::str::FromStr for SelectionMetric {
    type Err = QdlcError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t-count" | "t" => Ok(SelectionMetric::TCount),
            "cnot-count" | "cnot" => Ok(SelectionMetric::CnotCount),
            "weighted-sum" => Ok(SelectionMetric::WeightedSum),
            other => Err(QdlcError::Parse(format!("unknown selection metric '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlanRequest {
    pub target: TargetVector,
    pub epsilon: f64,
    pub omega_step: f64,
    /// Allowlist; `None` means the defaults for the target's task.
    pub methods: Option<Vec<Method>>,
    pub hybrid_max_depth: usize,
    pub cost_config: CostConfig,
    pub metric: SelectionMetric,
}

impl PlanRequest {
    pub fn new(target: TargetVector, epsilon: f64) -> Self {
        PlanRequest {
            target,
            epsilon,
            omega_step: DEFAULT_OMEGA_STEP,
            methods: None,
            hybrid_max_depth: 0,
            cost_config: CostConfig::default(),
            metric: SelectionMetric::TCount,
        }
    }

    pub fn with_methods(mut self, methods: &[Method]) -> Self {
        self.methods = Some(methods.to_vec());
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(QdlcError::Domain(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.omega_step > 0.0 && self.omega_step <= 1.0) {
            return Err(QdlcError::Domain(format!("omega step must lie in (0,1], got {}", self.omega_step)));
        }
        self.cost_config.validate()?;
        for m in self.method_list() {
            if m.task() != self.target.task {
                return Err(QdlcError::UnsupportedTarget(format!("method {m} does not handle {} targets", self.target.task)));
            }
            if matches!(m, Method::Hybrid | Method::DDiagonal | Method::Kinetic) {
                return Err(QdlcError::UnsupportedTarget(format!("method {m} is not a vector loader")));
            }
        }
        Ok(())
    }

    pub fn method_list(&self) -> Vec<Method> {
        let mut v = self.methods.clone().unwrap_or_else(|| Method::defaults_for(self.target.task));
        v.sort();
        v.dedup();
        v
    }

    pub fn omega_grid(&self) -> Vec<f64> {
        omega_grid(self.omega_step)
    }
}

/// k * step for k = 1, 2, ... below one, then 1.
pub fn omega_grid(step: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut k = 1u64;
    loop {
        let w = ((k as f64 * step) * 1e12).round() / 1e12;
        if w >= 1.0 {
            break;
        }
        grid.push(w);
        k += 1;
    }
    grid.push(1.0);
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Infeasibility {
    pub method: Method,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub schema_version: u32,
    pub task: Task,
    pub n_qubits: usize,
    pub epsilon: f64,
    pub omega_grid: Vec<f64>,
    pub methods: Vec<Method>,
    pub selection_metric: SelectionMetric,
    /// One row per (omega, method), omega-major.
    pub per_method_per_omega: Vec<MethodPlan>,
    pub selected: Option<MethodPlan>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub infeasibility: Vec<Infeasibility>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hybrid: Option<HybridSummary>,
}

impl PlanReport {
    /// Cheapest feasible row for each method, in method order.
    pub fn best_per_method(&self) -> Vec<&MethodPlan> {
        let mut methods: Vec<Method> = self.per_method_per_omega.iter().map(|p| p.method).collect();
        methods.sort();
        methods.dedup();
        methods
            .into_iter()
            .filter_map(|m| {
                let rows: Vec<&MethodPlan> = self.per_method_per_omega.iter().filter(|p| p.method == m).collect();
                select(rows.into_iter(), self.selection_metric)
            })
            .collect()
    }

    /// Text table of the best row per method.
    pub fn table(&self) -> String {
        let mut s = format!("{:<14} {:>6} {:>14} {:>14} {:>8}\n", "method", "omega", "CNOT", "T", "qubits");
        for p in self.best_per_method() {
            let mark = if self.selected.as_ref().is_some_and(|x| x.method == p.method) { " *" } else { "" };
            s.push_str(&format!(
                "{:<14} {:>6.2} {:>14} {:>14} {:>8}{}\n",
                p.method.name(),
                p.budget.omega,
                p.resources.cnot_count,
                p.resources.t_count,
                p.resources.total_qubits,
                mark
            ));
        }
        if let Some(h) = &self.selected {
            if h.method == Method::Hybrid {
                s.push_str(&format!(
                    "{:<14} {:>6} {:>14} {:>14} {:>8} *\n",
                    "hybrid", "-", h.resources.cnot_count, h.resources.t_count, h.resources.total_qubits
                ));
            }
        }
        s
    }
}

/// Runs one synthesizer.
pub fn synthesize(method: Method, target: &TargetVector, budget: ErrorBudget, cfg: &CostConfig) -> Result<(MethodPlan, CircuitIR)> {
    if method.task() != target.task {
        return Err(QdlcError::UnsupportedTarget(format!("method {method} does not handle {} targets", target.task)));
    }
    match method {
        Method::Mottonen => synth_mottonen(target, budget, cfg),
        Method::QromStatePrep => synth_qrom_stateprep(target, budget, cfg, false),
        Method::SparseSOS => synth_sparse_sos(target, budget, cfg),
        Method::MPS => synth_mps(target, budget, cfg),
        Method::FSL => synth_fsl(target, budget, cfg),
        Method::AliasSampling => synth_alias(target, budget, cfg),
        Method::MottonenDiag => synth_diag_multiplexer(target, budget, cfg, false),
        Method::QromDiag => synth_diag_multiplexer(target, budget, cfg, true),
        Method::QspDiag => synth_diag_qsp(target, budget, cfg, DEFAULT_MAX_DEGREE),
        Method::WalshDiag => synth_diag_walsh(target, budget, cfg),
        Method::Hybrid => {
            let req = PlanRequest { hybrid_max_depth: 1, ..PlanRequest::new(target.clone(), budget.epsilon) };
            hybrid::hybrid_circuit(&req).and_then(|h| {
                h.ok_or_else(|| QdlcError::Infeasible("no hybrid split has a feasible plan in every segment".into()))
            })
        }
        Method::DDiagonal | Method::Kinetic => {
            Err(QdlcError::UnsupportedTarget(format!("{method} encodes a structured operator, not a vector")))
        }
    }
}

/// Rebuilds the circuit of a report's selected plan.
pub fn synthesize_selected(report: &PlanReport, target: &TargetVector, cfg: &CostConfig) -> Result<(MethodPlan, CircuitIR)> {
    let plan = report
        .selected
        .as_ref()
        .ok_or_else(|| QdlcError::Infeasible("the plan report has no selected method".into()))?;
    if target.n_qubits != report.n_qubits || target.task != report.task {
        return Err(QdlcError::Validation(format!(
            "plan is for a {}-qubit {} target, input is a {}-qubit {} target",
            report.n_qubits, report.task, target.n_qubits, target.task
        )));
    }
    if plan.method == Method::Hybrid {
        let step = report.omega_grid.first().copied().unwrap_or(DEFAULT_OMEGA_STEP);
        let req = PlanRequest {
            target: target.clone(),
            epsilon: report.epsilon,
            omega_step: step,
            methods: Some(report.methods.clone()),
            hybrid_max_depth: plan.param("depth").unwrap_or(1.0) as usize,
            cost_config: cfg.clone(),
            metric: report.selection_metric,
        };
        return hybrid::hybrid_circuit(&req)?
            .ok_or_else(|| QdlcError::Infeasible("no hybrid split has a feasible plan in every segment".into()));
    }
    synthesize(plan.method, target, plan.budget, cfg)
}

fn le(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + CHECK_SLACK)
}

fn need(plan: &MethodPlan, key: &str) -> std::result::Result<f64, String> {
    plan.param(key).ok_or_else(|| format!("missing hyperparameter {key}"))
}

/// Re-checks a plan's hyperparameters against their error inequalities
/// without trusting the synthesizer's arithmetic.
pub fn check_hyperparams(plan: &MethodPlan, n: usize) -> std::result::Result<(), String> {
    let b = &plan.budget;
    if !le(plan.eps_a_predicted, b.eps_a) {
        return Err(format!("approximation error {:.3e} exceeds eps_a {:.3e}", plan.eps_a_predicted, b.eps_a));
    }
    let eps_p = b.eps_p;
    let dim = (n as f64).exp2();
    let rot_bound = |rotations: f64| -> std::result::Result<(), String> {
        let delta = need(plan, "delta_g")?;
        if rotations <= 0.0 || le(delta * rotations.sqrt(), eps_p) {
            Ok(())
        } else {
            Err(format!("delta_g {delta:.3e} over {rotations} rotations exceeds eps_p {eps_p:.3e}"))
        }
    };
    match plan.method {
        Method::Mottonen => rot_bound(dim - 1.0),
        Method::FSL => rot_bound(need(plan, "d")? - 1.0 + (n * (n - 1)) as f64),
        Method::SparseSOS => rot_bound(need(plan, "D")? - 1.0),
        Method::MPS => rot_bound(4.0 * need(plan, "bond_sq_sum")?),
        Method::MottonenDiag => {
            let delta = need(plan, "delta_g")?;
            if le(delta, eps_p * (-(n as f64) / 2.0).exp2()) {
                Ok(())
            } else {
                Err(format!("delta_g {delta:.3e} exceeds eps_p 2^(-n/2)"))
            }
        }
        Method::QspDiag => rot_bound(need(plan, "d")?.max(1.0)),
        Method::WalshDiag => rot_bound(need(plan, "kappa")?.max(1.0)),
        Method::QromStatePrep | Method::QromDiag => {
            let m = need(plan, "m")?;
            let count = if plan.method == Method::QromStatePrep { dim - 1.0 } else { dim };
            if le((-m).exp2() * std::f64::consts::PI * count.sqrt(), eps_p / 2.0) {
                Ok(())
            } else {
                Err(format!("{m} angle bits leave rounding error above eps_p/2"))
            }
        }
        Method::AliasSampling => {
            let mu = need(plan, "mu")?;
            if le((-mu).exp2(), eps_p) {
                Ok(())
            } else {
                Err(format!("mu = {mu} leaves 2^-mu above eps_p"))
            }
        }
        Method::Hybrid | Method::DDiagonal | Method::Kinetic => Ok(()),
    }
}

/// Work shared by every omega of one method on one target.
enum Prepared {
    Fsl(FourierData),
    Mps(BTreeMap<usize, MpsFactorization>),
    Plain,
}

impl Prepared {
    fn new(method: Method, target: &TargetVector) -> Self {
        match method {
            Method::FSL => Prepared::Fsl(FourierData::new(target)),
            Method::MPS => Prepared::Mps(BTreeMap::new()),
            _ => Prepared::Plain,
        }
    }

    fn synthesize(
        &mut self,
        method: Method,
        target: &TargetVector,
        budget: ErrorBudget,
        cfg: &CostConfig,
    ) -> Result<(MethodPlan, CircuitIR)> {
        match self {
            Prepared::Fsl(data) => synth_fsl_with(target, data, budget, cfg),
            Prepared::Mps(cache) => synth_mps_cached(target, budget, cfg, cache),
            Prepared::Plain => synthesize(method, target, budget, cfg),
        }
    }
}

/// Plan for one grid cell. Synthesis errors and failed re-checks become
/// infeasible rows.
fn cell(prep: &mut Prepared, method: Method, target: &TargetVector, budget: ErrorBudget, cfg: &CostConfig) -> MethodPlan {
    match prep.synthesize(method, target, budget, cfg) {
        Ok((mut plan, _)) => {
            if plan.feasible {
                if let Err(why) = check_hyperparams(&plan, target.n_qubits) {
                    plan.feasible = false;
                    plan.note = Some(why);
                }
            }
            plan
        }
        Err(e) => {
            let mut plan = MethodPlan::new(method, budget);
            plan.feasible = false;
            plan.eps_a_predicted = f64::INFINITY;
            plan.note = Some(e.to_string());
            plan
        }
    }
}

/// Evaluates every (omega, method) cell, omega-major. Methods run in
/// parallel; each walks its omega column in order so it can reuse work.
pub fn sweep_cells(req: &PlanRequest) -> Result<Vec<MethodPlan>> {
    req.validate()?;
    let methods = req.method_list();
    let grid = req.omega_grid();
    let budgets: Vec<ErrorBudget> = grid.iter().map(|&w| ErrorBudget::new(req.epsilon, w)).collect::<Result<_>>()?;
    let columns: Vec<Vec<MethodPlan>> = methods
        .par_iter()
        .map(|&m| {
            let mut prep = Prepared::new(m, &req.target);
            budgets.iter().map(|&b| cell(&mut prep, m, &req.target, b, &req.cost_config)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(grid.len() * methods.len());
    for i in 0..grid.len() {
        for col in &columns {
            out.push(col[i].clone());
        }
    }
    Ok(out)
}

/// Feasible minimum under (metric, CNOT, total qubits, method order, larger omega).
pub fn select<'a>(plans: impl Iterator<Item = &'a MethodPlan>, metric: SelectionMetric) -> Option<&'a MethodPlan> {
    plans.filter(|p| p.feasible).min_by(|a, b| {
        let key = |p: &MethodPlan| (metric.score(&p.resources), p.resources.cnot_count, p.resources.total_qubits, p.method);
        key(a).cmp(&key(b)).then(b.budget.omega.total_cmp(&a.budget.omega))
    })
}

fn infeasibility_report(cells: &[MethodPlan], methods: &[Method]) -> Vec<Infeasibility> {
    methods
        .iter()
        .filter(|&&m| !cells.iter().any(|p| p.method == m && p.feasible))
        .map(|&m| {
            // the cell closest to feasibility explains the limiting constraint
            let best = cells
                .iter()
                .filter(|p| p.method == m)
                .min_by(|a, b| (a.eps_a_predicted - a.budget.eps_a).total_cmp(&(b.eps_a_predicted - b.budget.eps_a)));
            let reason = match best {
                Some(p) if p.note.is_some() && !p.eps_a_predicted.is_finite() => p.note.clone().unwrap_or_default(),
                Some(p) if p.eps_a_predicted > p.budget.eps_a => format!(
                    "approximation error {:.3e} exceeds eps_a {:.3e} at best (omega {})",
                    p.eps_a_predicted, p.budget.eps_a, p.budget.omega
                ),
                Some(p) => p.note.clone().unwrap_or_else(|| "no feasible cell".into()),
                None => "not evaluated".into(),
            };
            Infeasibility { method: m, reason }
        })
        .collect()
}

/// Full grid search. With `hybrid_max_depth > 0` the hybrid split competes
/// with the best flat plan.
pub fn sweep(req: &PlanRequest) -> Result<PlanReport> {
    let cells = sweep_cells(req)?;
    let methods = req.method_list();
    let selected = select(cells.iter(), req.metric).cloned();
    let mut report = PlanReport {
        schema_version: SCHEMA_VERSION,
        task: req.target.task,
        n_qubits: req.target.n_qubits,
        epsilon: req.epsilon,
        omega_grid: req.omega_grid(),
        methods: methods.clone(),
        selection_metric: req.metric,
        infeasibility: if selected.is_none() { infeasibility_report(&cells, &methods) } else { Vec::new() },
        per_method_per_omega: cells,
        selected,
        hybrid: None,
    };
    if req.hybrid_max_depth > 0 && req.target.task == Task::StatePrep {
        if let Some((plan, summary)) = hybrid::best_hybrid(req)? {
            let better = report.selected.as_ref().is_none_or(|flat| {
                let k = |p: &MethodPlan| (req.metric.score(&p.resources), p.resources.cnot_count);
                k(&plan) < k(flat)
            });
            if better {
                report.selected = Some(plan);
                report.infeasibility.clear();
            }
            report.hybrid = Some(summary);
        }
    }
    Ok(report)
}

/// Grid search for a structured operator; its single construction competes
/// with itself across omega.
pub fn sweep_operator(
    op: &Operator,
    epsilon: f64,
    omega_step: f64,
    cfg: &CostConfig,
    metric: SelectionMetric,
) -> Result<PlanReport> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(QdlcError::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(omega_step > 0.0 && omega_step <= 1.0) {
        return Err(QdlcError::Domain(format!("omega step must lie in (0,1], got {omega_step}")));
    }
    cfg.validate()?;
    let grid = omega_grid(omega_step);
    let method = op.method();
    let cells: Vec<MethodPlan> = grid
        .iter()
        .map(|&w| {
            let budget = ErrorBudget::new(epsilon, w)?;
            Ok(match op.synthesize(budget, cfg) {
                Ok((plan, _)) => plan,
                Err(e) => {
                    let mut plan = MethodPlan::new(method, budget);
                    plan.feasible = false;
                    plan.eps_a_predicted = f64::INFINITY;
                    plan.note = Some(e.to_string());
                    plan
                }
            })
        })
        .collect::<Result<_>>()?;
    let selected = select(cells.iter(), metric).cloned();
    Ok(PlanReport {
        schema_version: SCHEMA_VERSION,
        task: Task::DiagonalEncode,
        n_qubits: op.system_qubits(),
        epsilon,
        omega_grid: grid,
        methods: vec![method],
        selection_metric: metric,
        infeasibility: if selected.is_none() { infeasibility_report(&cells, &[method]) } else { Vec::new() },
        per_method_per_omega: cells,
        selected,
        hybrid: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffRow {
    pub omega: f64,
    pub t_count: u64,
    pub cnot_count: u64,
    pub feasible: bool,
    pub eps_a_predicted: f64,
}

/// Per-omega cost of a single method.
pub fn omega_tradeoff_curve(req: &PlanRequest, method: Method) -> Result<Vec<TradeoffRow>> {
    let req = PlanRequest { methods: Some(vec![method]), hybrid_max_depth: 0, ..req.clone() };
    Ok(sweep_cells(&req)?
        .into_iter()
        .map(|p| TradeoffRow {
            omega: p.budget.omega,
            t_count: p.resources.t_count,
            cnot_count: p.resources.cnot_count,
            feasible: p.feasible,
            eps_a_predicted: p.eps_a_predicted,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_ends_at_one() {
        let t = TargetVector::state(&[1.0, 0.0]).unwrap();
        let mut r = PlanRequest::new(t, 1e-3);
        assert_eq!(r.omega_grid().len(), 20);
        assert_eq!(*r.omega_grid().last().unwrap(), 1.0);
        r.omega_step = 0.3;
        assert_eq!(r.omega_grid(), vec![0.3, 0.6, 0.9, 1.0]);
    }
}
