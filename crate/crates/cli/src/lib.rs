//! Commands behind the `qdlc` binary.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use qdlc_core::costmodel::cost_ledger_markdown;
use qdlc_core::diagenc::multiplexer::diag_angles;
use qdlc_core::diagenc::{kappa_error_curve, WalshSpectrum};
use qdlc_core::families;
use qdlc_core::io::{circuit_file_from_json, circuit_to_json, input_from_json, to_json, InputFile};
use qdlc_core::planner::{
    omega_tradeoff_curve, sweep, sweep_operator, synthesize_selected, PlanReport, PlanRequest, SelectionMetric,
    DEFAULT_OMEGA_STEP,
};
use qdlc_core::simulator::{
    shots_to_tolerance, verify_operator, verify_plan_with_limits, SamplingStudy, Verification, VerifyLimits,
    VerifyStatus,
};
use qdlc_core::stateprep::mps_compress;
use qdlc_core::{CostConfig, ErrorBudget, Method, QdlcError, Task, TargetVector};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INFEASIBLE: u8 = 2;
pub const EXIT_UNVERIFIED: u8 = 3;
pub const EXIT_VERIFY_FAIL: u8 = 4;

pub const RECORD_SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<QdlcError> for Failure {
    fn from(e: QdlcError) -> Self {
        let code = if matches!(e, QdlcError::Infeasible(_)) { EXIT_INFEASIBLE } else { EXIT_USAGE };
        Failure { code, message: e.to_string() }
    }
}

/// Exit code of a finished command plus the text meant for the console.
#[derive(Debug, Default)]
pub struct Done {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

impl Done {
    fn out(&mut self, line: impl AsRef<str>) {
        self.stdout.push_str(line.as_ref());
        self.stdout.push('\n');
    }

    fn err(&mut self, line: impl AsRef<str>) {
        self.stderr.push_str(line.as_ref());
        self.stderr.push('\n');
    }
}

type CmdResult = std::result::Result<Done, Failure>;

#[derive(Parser, Debug)]
#[command(name = "qdlc", version, about = "Resource-aware compiler for loading classical vectors onto quantum circuits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Search the error split and method space; write a plan report.
    Plan(PlanArgs),
    /// Build the circuit of a plan's selected method.
    Synthesize(SynthArgs),
    /// Simulate a circuit and check it against its target.
    Verify(VerifyArgs),
    /// Benchmark sweeps written as CSV.
    Bench(BenchArgs),
    /// Write the cost model's constants and formulas as Markdown.
    CostLedger(LedgerArgs),
}

#[derive(Args, Debug)]
pub struct PlanArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Overrides the task recorded in the vector file.
    #[arg(long)]
    pub task: Option<Task>,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_OMEGA_STEP)]
    pub omega_step: f64,
    /// Comma-separated allowlist of method names.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<Method>>,
    #[arg(long, default_value_t = 0)]
    pub hybrid_depth: usize,
    #[arg(long)]
    pub cost_model: Option<PathBuf>,
    #[arg(long, default_value = "t-count")]
    pub metric: SelectionMetric,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub cost_model: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    /// Error bound to check against when the circuit file carries no plan.
    #[arg(long)]
    pub bound: Option<f64>,
    #[arg(long, default_value_t = VerifyLimits::default().system)]
    pub max_system_qubits: usize,
    #[arg(long, default_value_t = VerifyLimits::default().total)]
    pub max_total_qubits: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchKind {
    OmegaCurve,
    MpsChi,
    WalshKappa,
    KlShots,
    MethodTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Gaussian,
    Cavity,
    Parabola,
    Sparse,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub kind: BenchKind,
    /// Vector file; replaces the built-in family where one applies.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    #[arg(long)]
    pub qubits: Option<usize>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub epsilon: Option<Vec<f64>>,
    #[arg(long)]
    pub method: Option<Method>,
    #[arg(long, default_value_t = DEFAULT_OMEGA_STEP)]
    pub omega_step: f64,
    #[arg(long, default_value_t = 11)]
    pub min_qubits: usize,
    #[arg(long, default_value_t = 14)]
    pub max_qubits: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub threshold: f64,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.1)]
    pub tolerance: f64,
    /// Shots grid points per decade, from 10 to 10^max_shots_exp.
    #[arg(long, default_value_t = 4)]
    pub shots_per_decade: u32,
    #[arg(long, default_value_t = 6)]
    pub max_shots_exp: u32,
    #[arg(long)]
    pub cost_model: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct LedgerArgs {
    #[arg(long)]
    pub cost_model: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Plan(a) => cmd_plan(&a),
        Command::Synthesize(a) => cmd_synthesize(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::CostLedger(a) => cmd_cost_ledger(&a),
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Collects written files and their hashes for the run manifest.
struct Outputs {
    command: &'static str,
    config: BTreeMap<String, Value>,
    inputs: Vec<(String, String)>,
    outputs: Vec<(String, String)>,
}

impl Outputs {
    fn new(command: &'static str) -> Self {
        Outputs { command, config: BTreeMap::new(), inputs: Vec::new(), outputs: Vec::new() }
    }

    fn config(&mut self, key: &str, v: impl Serialize) {
        self.config.insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    fn input(&mut self, path: &Path, text: &str) {
        self.inputs.push((file_name(path), sha256_hex(text.as_bytes())));
    }

    fn write(&mut self, path: &Path, text: &str) -> std::result::Result<(), Failure> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))?;
        }
        fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
        self.outputs.push((file_name(path), sha256_hex(text.as_bytes())));
        Ok(())
    }

    /// Writes the manifest at `path`. Paths are recorded by file name so
    /// that runs in different directories produce identical manifests.
    fn finish(self, path: &Path) -> std::result::Result<(), Failure> {
        let entries = |v: &[(String, String)]| -> Vec<Value> {
            v.iter().map(|(f, h)| json!({"file": f, "sha256": h})).collect()
        };
        let m = json!({
            "schema_version": RECORD_SCHEMA_VERSION,
            "tool": "qdlc",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": self.config,
            "inputs": entries(&self.inputs),
            "outputs": entries(&self.outputs),
        });
        let text = to_json(&m)?;
        fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    out.with_file_name(format!("{stem}.manifest.json"))
}

fn load_cost(path: &Option<PathBuf>, o: &mut Outputs) -> std::result::Result<CostConfig, Failure> {
    match path {
        None => Ok(CostConfig::default()),
        Some(p) => {
            let text = read(p)?;
            o.input(p, &text);
            Ok(CostConfig::from_json(&text)?)
        }
    }
}

fn load_input(path: &Path, o: &mut Outputs) -> std::result::Result<InputFile, Failure> {
    let text = read(path)?;
    let input = input_from_json(&text)?;
    o.input(path, &text);
    Ok(input)
}

pub fn cmd_plan(a: &PlanArgs) -> CmdResult {
    let mut o = Outputs::new("plan");
    let input = load_input(&a.input, &mut o)?;
    let cfg = load_cost(&a.cost_model, &mut o)?;
    o.config("epsilon", a.epsilon);
    o.config("omega_step", a.omega_step);
    o.config("methods", &a.methods);
    o.config("hybrid_depth", a.hybrid_depth);
    o.config("metric", a.metric);
    o.config("task", a.task);
    let report = match input {
        InputFile::Vector(t) => {
            let t = match a.task {
                Some(task) if task != t.task => TargetVector::new(t.n_qubits, t.amplitudes, task)?,
                _ => t,
            };
            let req = PlanRequest {
                target: t,
                epsilon: a.epsilon,
                omega_step: a.omega_step,
                methods: a.methods.clone(),
                hybrid_max_depth: a.hybrid_depth,
                cost_config: cfg,
                metric: a.metric,
            };
            sweep(&req)?
        }
        InputFile::Operator(op) => {
            if a.methods.as_ref().is_some_and(|m| m.iter().any(|&x| x != op.method())) {
                return Err(Failure::usage(format!("this input only admits method {}", op.method())));
            }
            sweep_operator(&op, a.epsilon, a.omega_step, &cfg, a.metric)?
        }
    };
    o.write(&a.out, &to_json(&report)?)?;
    let table = report.table();
    o.write(&a.out.with_extension("txt"), &table)?;
    o.finish(&manifest_path(&a.out))?;
    let mut done = Done { stdout: table, ..Done::default() };
    match &report.selected {
        Some(p) => done.out(format!("selected {} at omega {}", p.method, p.budget.omega)),
        None => {
            done.code = EXIT_INFEASIBLE;
            done.err("no feasible plan:");
            for i in &report.infeasibility {
                done.err(format!("  {}: {}", i.method, i.reason));
            }
        }
    }
    Ok(done)
}

pub fn cmd_synthesize(a: &SynthArgs) -> CmdResult {
    let mut o = Outputs::new("synthesize");
    let plan_text = read(&a.plan)?;
    let report: PlanReport = serde_json::from_str(&plan_text)
        .map_err(|e| Failure::usage(format!("plan file {}: {e}", a.plan.display())))?;
    o.input(&a.plan, &plan_text);
    let input = load_input(&a.input, &mut o)?;
    let cfg = load_cost(&a.cost_model, &mut o)?;
    let Some(selected) = report.selected.as_ref() else {
        return Err(Failure { code: EXIT_INFEASIBLE, message: "the plan report has no selected method".into() });
    };
    let (plan, ir) = match input {
        InputFile::Vector(t) => {
            // the plan may have overridden the file's task
            let t = if t.task != report.task { TargetVector::new(t.n_qubits, t.amplitudes, report.task)? } else { t };
            synthesize_selected(&report, &t, &cfg)?
        }
        InputFile::Operator(op) => {
            if op.method() != selected.method || op.system_qubits() != report.n_qubits {
                return Err(Failure::usage("plan and operator input do not match"));
            }
            op.synthesize(selected.budget, &cfg)?
        }
    };
    o.config("method", plan.method);
    o.config("omega", plan.budget.omega);
    o.write(&a.out, &circuit_to_json(&ir, Some(&plan))?)?;
    o.finish(&manifest_path(&a.out))?;
    let mut done = Done::default();
    done.out(format!(
        "{}: {} gates on {}+{} qubits, T {} CNOT {}",
        plan.method,
        ir.gates.len(),
        ir.num_system_qubits,
        ir.num_ancilla_qubits,
        plan.resources.t_count,
        plan.resources.cnot_count
    ));
    Ok(done)
}

#[derive(Serialize)]
struct VerifyRecord<'a> {
    schema_version: u32,
    #[serde(flatten)]
    v: &'a Verification,
}

pub fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let mut o = Outputs::new("verify");
    let text = read(&a.circuit)?;
    let (ir, plan) = circuit_file_from_json(&text)?;
    o.input(&a.circuit, &text);
    let input = load_input(&a.input, &mut o)?;
    let mut plan = match (plan, a.bound) {
        (Some(p), _) => p,
        (None, Some(b)) => {
            let method = match &input {
                InputFile::Vector(t) => Method::defaults_for(t.task)[0],
                InputFile::Operator(op) => op.method(),
            };
            let mut p = qdlc_core::MethodPlan::new(method, ErrorBudget::new(b.max(f64::MIN_POSITIVE), 1.0)?);
            p.eps_a_predicted = b;
            p
        }
        (None, None) => return Err(Failure::usage("circuit file carries no plan; pass --bound")),
    };
    if let Some(b) = a.bound {
        plan.eps_a_predicted = b;
        plan.table_error_predicted = 0.0;
    }
    let limits = VerifyLimits { system: a.max_system_qubits, total: a.max_total_qubits };
    o.config("limits", limits);
    o.config("bound", a.bound);
    let v = match &input {
        InputFile::Vector(t) => {
            let t = if t.task != plan.method.task() {
                TargetVector::new(t.n_qubits, t.amplitudes.clone(), plan.method.task())?
            } else {
                t.clone()
            };
            verify_plan_with_limits(&plan, &ir, &t, limits)?
        }
        InputFile::Operator(op) => verify_operator(&plan, &ir, op, limits)?,
    };
    o.write(&a.out, &to_json(&VerifyRecord { schema_version: RECORD_SCHEMA_VERSION, v: &v })?)?;
    o.finish(&manifest_path(&a.out))?;
    let mut done = Done::default();
    match v.status {
        VerifyStatus::Pass => {
            done.out(format!("pass: {} error {:.3e} <= {:.3e}", v.norm, v.achieved_error.unwrap_or(0.0), v.bound));
        }
        VerifyStatus::Fail => {
            done.code = EXIT_VERIFY_FAIL;
            done.err(format!("fail: {} error {:.3e} > {:.3e}", v.norm, v.achieved_error.unwrap_or(f64::NAN), v.bound));
        }
        VerifyStatus::UnverifiedAtScale => {
            done.code = EXIT_UNVERIFIED;
            done.err(format!("unverified-at-scale: {} qubits exceed the desk-scale limits", ir.total_qubits()));
        }
    }
    Ok(done)
}

fn csv_text<T: Serialize>(rows: &[T]) -> std::result::Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::usage(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::usage(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::usage(e.to_string()))
}

fn bench_target(a: &BenchArgs, o: &mut Outputs, default: Family, n: usize) -> std::result::Result<TargetVector, Failure> {
    if let Some(p) = &a.input {
        return match load_input(p, o)? {
            InputFile::Vector(t) => Ok(t),
            InputFile::Operator(_) => Err(Failure::usage("bench inputs must be vector files")),
        };
    }
    let fam = a.family.unwrap_or(default);
    let n = a.qubits.unwrap_or(n);
    o.config("family", format!("{fam:?}").to_lowercase());
    o.config("qubits", n);
    Ok(family_target(fam, n, a.sigma, a.seed)?)
}

/// Built-in families. Cavity splits the qubits between x and y, x taking
/// the extra qubit.
pub fn family_target(fam: Family, n: usize, sigma: Option<f64>, seed: u64) -> qdlc_core::Result<TargetVector> {
    match fam {
        Family::Gaussian => families::gaussian(n, sigma.unwrap_or(0.9)),
        Family::Cavity => families::cavity_field(n.div_ceil(2), n / 2),
        Family::Parabola => families::parabolic_diagonal(n),
        Family::Sparse => families::sparse_random(n, 16, seed),
    }
}

#[derive(Serialize)]
struct OmegaRow {
    epsilon: f64,
    omega: f64,
    t_count: u64,
    cnot_count: u64,
    feasible: bool,
    eps_a_predicted: f64,
}

#[derive(Serialize)]
struct ChiRow {
    n_qubits: usize,
    chi: usize,
    error: f64,
}

#[derive(Serialize)]
struct KappaRow {
    kappa: usize,
    linf_error: f64,
}

#[derive(Serialize)]
struct SummaryRow {
    transform: &'static str,
    shots: String,
    last_mean_kl: f64,
    tolerance: f64,
    trials: usize,
    seed: u64,
}

#[derive(Serialize)]
struct MethodRow {
    state: String,
    method: Method,
    omega: f64,
    cnot_count: u64,
    t_count: u64,
    rotation_count: u64,
    total_qubits: u64,
    eps_a_predicted: f64,
    selected: bool,
    seed: u64,
}

/// Error of the chi-truncated MPS for every power-of-two chi up to the exact bond.
pub fn mps_chi_rows(t: &TargetVector) -> qdlc_core::Result<Vec<(usize, f64)>> {
    let full = 1usize << (t.n_qubits / 2);
    let mut rows = Vec::new();
    let mut chi = 1;
    while chi <= full {
        rows.push((chi, mps_compress(t, chi)?.error));
        chi *= 2;
    }
    Ok(rows)
}

/// Realized block error of the Walsh encoding for every kappa.
pub fn walsh_kappa_rows(t: &TargetVector) -> qdlc_core::Result<Vec<(usize, f64)>> {
    let alpha = qdlc_core::diagenc::real_diagonal(t)?;
    let spec = WalshSpectrum::new(&diag_angles(&alpha))?;
    Ok(kappa_error_curve(&spec, &alpha).into_iter().enumerate().map(|(i, e)| (i + 1, e)).collect())
}

pub fn cmd_bench(a: &BenchArgs) -> CmdResult {
    let mut o = Outputs::new("bench");
    let mut done = Done::default();
    let dir = &a.out;
    let cfg = load_cost(&a.cost_model, &mut o)?;
    o.config("kind", format!("{:?}", a.kind));
    match a.kind {
        BenchKind::OmegaCurve => {
            let t = bench_target(a, &mut o, Family::Gaussian, 14)?;
            let method = a.method.unwrap_or(Method::FSL);
            let eps = a.epsilon.clone().unwrap_or_else(|| vec![5e-1, 5e-2, 5e-3, 5e-4]);
            o.config("method", method);
            o.config("epsilon", &eps);
            o.config("omega_step", a.omega_step);
            let mut rows = Vec::new();
            for &e in &eps {
                let req = PlanRequest { omega_step: a.omega_step, cost_config: cfg.clone(), ..PlanRequest::new(t.clone(), e) };
                for r in omega_tradeoff_curve(&req, method)? {
                    rows.push(OmegaRow {
                        epsilon: e,
                        omega: r.omega,
                        t_count: r.t_count,
                        cnot_count: r.cnot_count,
                        feasible: r.feasible,
                        eps_a_predicted: r.eps_a_predicted,
                    });
                }
            }
            o.write(&dir.join("omega_curve.csv"), &csv_text(&rows)?)?;
        }
        BenchKind::MpsChi => {
            let fam = a.family.unwrap_or(Family::Gaussian);
            o.config("family", format!("{fam:?}").to_lowercase());
            o.config("sigma", a.sigma);
            o.config("qubits", [a.min_qubits, a.max_qubits]);
            let mut rows = Vec::new();
            for n in a.min_qubits..=a.max_qubits {
                let t = family_target(fam, n, a.sigma, a.seed)?;
                for (chi, error) in mps_chi_rows(&t)? {
                    rows.push(ChiRow { n_qubits: n, chi, error });
                }
            }
            o.write(&dir.join("mps_chi.csv"), &csv_text(&rows)?)?;
        }
        BenchKind::WalshKappa => {
            let t = bench_target(a, &mut o, Family::Parabola, 11)?;
            let t = if t.task == Task::StatePrep { TargetVector::new(t.n_qubits, t.amplitudes, Task::DiagonalEncode)? } else { t };
            let rows: Vec<KappaRow> =
                walsh_kappa_rows(&t)?.into_iter().map(|(kappa, linf_error)| KappaRow { kappa, linf_error }).collect();
            if let Some(r) = rows.iter().find(|r| r.linf_error < a.threshold) {
                done.out(format!("kappa {} reaches linf < {:e}", r.kappa, a.threshold));
            }
            o.config("threshold", a.threshold);
            o.write(&dir.join("walsh_kappa.csv"), &csv_text(&rows)?)?;
        }
        BenchKind::KlShots => {
            let t = bench_target(a, &mut o, Family::Cavity, 11)?;
            let grid = SamplingStudy::log_grid(a.shots_per_decade as i32, (a.max_shots_exp * a.shots_per_decade) as i32, a.shots_per_decade);
            let study = SamplingStudy::new(t.amplitudes.clone(), grid, a.trials, a.seed);
            o.config("trials", a.trials);
            o.config("seed", a.seed);
            o.config("tolerance", a.tolerance);
            o.config("shots_grid", &study.shots_grid);
            let (results, rows) = shots_to_tolerance(&study, a.tolerance)?;
            let summary: Vec<SummaryRow> = results
                .iter()
                .map(|r| SummaryRow {
                    transform: r.transform.name(),
                    shots: r.shots.map_or("beyond-grid".into(), |s| s.to_string()),
                    last_mean_kl: r.last_mean_kl,
                    tolerance: a.tolerance,
                    trials: a.trials,
                    seed: a.seed,
                })
                .collect();
            for s in &summary {
                done.out(format!("{}: {} shots", s.transform, s.shots));
            }
            o.write(&dir.join("kl_shots.csv"), &csv_text(&rows)?)?;
            o.write(&dir.join("kl_summary.csv"), &csv_text(&summary)?)?;
        }
        BenchKind::MethodTable => {
            let eps = a.epsilon.as_ref().and_then(|e| e.first().copied()).unwrap_or(1e-3);
            o.config("epsilon", eps);
            o.config("seed", a.seed);
            let states: Vec<(String, TargetVector)> = match &a.input {
                Some(_) => vec![("input".into(), bench_target(a, &mut o, Family::Gaussian, 11)?)],
                None => vec![
                    ("gaussian".into(), families::gaussian(11, 0.5)?),
                    ("sparse".into(), families::sparse_random(11, 16, a.seed)?),
                    ("cavity".into(), families::cavity_field(6, 5)?),
                ],
            };
            let mut rows = Vec::new();
            for (name, t) in states {
                let req = PlanRequest { omega_step: a.omega_step, cost_config: cfg.clone(), ..PlanRequest::new(t, eps) };
                let report = sweep(&req)?;
                for p in report.best_per_method() {
                    rows.push(MethodRow {
                        state: name.clone(),
                        method: p.method,
                        omega: p.budget.omega,
                        cnot_count: p.resources.cnot_count,
                        t_count: p.resources.t_count,
                        rotation_count: p.resources.rotation_count,
                        total_qubits: p.resources.total_qubits,
                        eps_a_predicted: p.eps_a_predicted,
                        selected: report.selected.as_ref().is_some_and(|s| s.method == p.method),
                        seed: a.seed,
                    });
                }
            }
            o.write(&dir.join("method_table.csv"), &csv_text(&rows)?)?;
        }
    }
    o.finish(&dir.join("manifest.json"))?;
    Ok(done)
}

pub fn cmd_cost_ledger(a: &LedgerArgs) -> CmdResult {
    let mut o = Outputs::new("cost-ledger");
    let cfg = load_cost(&a.cost_model, &mut o)?;
    o.write(&a.out, &cost_ledger_markdown(&cfg))?;
    o.finish(&manifest_path(&a.out))?;
    Ok(Done::default())
}
