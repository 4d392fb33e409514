//! Dense statevector interpreter for [`CircuitIR`].

mod sampling;
mod verify;

pub use sampling::{
    kl_divergence, kl_study, mean_curve, sample_counts, shots_to_tolerance, smoothed_empirical, transform_distribution,
    KlRow, SamplingStudy, ShotsResult, Transform,
};
pub use verify::{verify_operator, verify_plan, verify_plan_with_limits, Verification, VerifyLimits, VerifyStatus};

use nalgebra::DMatrix;
use rustfft::FftPlanner;

use crate::circuit::{BlockAction, CircuitIR, GateKind, GateRecord};
use crate::error::{QdlcError, Result};
use crate::types::C64;

/// Dense simulation refuses registers above this many qubits.
pub const MEMORY_GUARD_QUBITS: usize = 26;
pub const DEFAULT_BLOCK_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub n_qubits: usize,
    pub amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        guard(n_qubits)?;
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = C64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amplitudes })
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(n_qubits)?;
        s.amplitudes[0] = C64::new(0.0, 0.0);
        s.amplitudes[index] = C64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let n = amplitudes.len().trailing_zeros() as usize;
        if !amplitudes.len().is_power_of_two() {
            return Err(QdlcError::Dimension("statevector length must be a power of two".into()));
        }
        guard(n)?;
        Ok(StateVector { n_qubits: n, amplitudes })
    }

    pub fn norm(&self) -> f64 {
        crate::metrics::l2_norm(&self.amplitudes)
    }

    /// Amplitudes of the lowest `n_sys` qubits with every higher qubit in |0>.
    pub fn system_slice(&self, n_sys: usize) -> Vec<C64> {
        self.amplitudes[..1 << n_sys].to_vec()
    }

    /// Probabilities of the lowest `n_sys` qubits with the rest traced out.
    pub fn marginal(&self, n_sys: usize) -> Vec<f64> {
        let mask = (1usize << n_sys) - 1;
        let mut p = vec![0.0; 1 << n_sys];
        for (i, a) in self.amplitudes.iter().enumerate() {
            p[i & mask] += a.norm_sqr();
        }
        p
    }
}

fn guard(n: usize) -> Result<()> {
    if n > MEMORY_GUARD_QUBITS {
        return Err(QdlcError::Resource(format!(
            "{n} qubits exceeds the dense-simulation guard of {MEMORY_GUARD_QUBITS}"
        )));
    }
    Ok(())
}

pub fn apply(ir: &CircuitIR, initial: &StateVector) -> Result<StateVector> {
    if initial.n_qubits != ir.total_qubits() {
        return Err(QdlcError::Dimension(format!(
            "circuit acts on {} qubits, state has {}",
            ir.total_qubits(),
            initial.n_qubits
        )));
    }
    guard(ir.total_qubits())?;
    ir.validate()?;
    let mut state = initial.clone();
    let mut sim = Sim::new(&mut state.amplitudes);
    for g in &ir.gates {
        sim.gate(g, Cond::default());
    }
    Ok(state)
}

/// Runs `ir` on |0...0>.
pub fn run(ir: &CircuitIR) -> Result<StateVector> {
    apply(ir, &StateVector::zero(ir.total_qubits())?)
}

/// `<0_anc, i| U |0_anc, j>` for every system pair, with `ancilla_count`
/// qubits above the system register.
pub fn extract_block(ir: &CircuitIR, ancilla_count: usize) -> Result<DMatrix<C64>> {
    extract_block_with_limit(ir, ancilla_count, DEFAULT_BLOCK_LIMIT)
}

pub fn extract_block_with_limit(ir: &CircuitIR, ancilla_count: usize, limit: usize) -> Result<DMatrix<C64>> {
    let total = ir.total_qubits();
    if total > limit {
        return Err(QdlcError::Resource(format!("block extraction limited to {limit} qubits, circuit has {total}")));
    }
    if ancilla_count > total {
        return Err(QdlcError::Dimension("more ancillas than qubits".into()));
    }
    let n_sys = total - ancilla_count;
    let d = 1usize << n_sys;
    let mut m = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for j in 0..d {
        let out = apply(ir, &StateVector::basis(total, j)?)?;
        for i in 0..d {
            m[(i, j)] = out.amplitudes[i];
        }
    }
    Ok(m)
}

/// Diagonal of the system block, `<0_anc, j| U |0_anc, j>`, one run per column.
pub fn block_diagonal(ir: &CircuitIR, ancilla_count: usize) -> Result<Vec<C64>> {
    let total = ir.total_qubits();
    if ancilla_count > total {
        return Err(QdlcError::Dimension("more ancillas than qubits".into()));
    }
    let d = 1usize << (total - ancilla_count);
    (0..d).map(|j| Ok(apply(ir, &StateVector::basis(total, j)?)?.amplitudes[j])).collect()
}

/// Extra condition inherited from an enclosing controlled block.
#[derive(Clone, Copy, Default)]
struct Cond {
    mask: usize,
    val: usize,
}

impl Cond {
    fn with(self, controls: &[(usize, bool)]) -> Cond {
        let mut c = self;
        for &(q, pol) in controls {
            c.mask |= 1 << q;
            if pol {
                c.val |= 1 << q;
            }
        }
        c
    }

    #[inline]
    fn ok(&self, i: usize) -> bool {
        i & self.mask == self.val
    }
}

#[inline]
fn gather(i: usize, qubits: &[usize]) -> usize {
    let mut v = 0;
    for (k, &q) in qubits.iter().enumerate() {
        v |= ((i >> q) & 1) << k;
    }
    v
}

#[inline]
fn scatter(i: usize, qubits: &[usize], value: usize) -> usize {
    let mut r = i;
    for (k, &q) in qubits.iter().enumerate() {
        r = (r & !(1 << q)) | (((value >> k) & 1) << q);
    }
    r
}

fn wrap(v: i128, bits: usize) -> usize {
    let m = 1i128 << bits;
    (((v % m) + m) % m) as usize
}

type M2 = [[C64; 2]; 2];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn ry_matrix(theta: f64) -> M2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

pub(crate) fn rz_matrix(theta: f64) -> M2 {
    [[C64::from_polar(1.0, -theta / 2.0), c(0.0, 0.0)], [c(0.0, 0.0), C64::from_polar(1.0, theta / 2.0)]]
}

struct Sim<'a> {
    s: &'a mut Vec<C64>,
    scratch: Vec<C64>,
    fft: FftPlanner<f64>,
}

impl<'a> Sim<'a> {
    fn new(s: &'a mut Vec<C64>) -> Self {
        Sim { s, scratch: Vec::new(), fft: FftPlanner::new() }
    }

    fn one_qubit(&mut self, t: usize, cond: Cond, m: &M2) {
        let bit = 1 << t;
        for i in 0..self.s.len() {
            if i & bit == 0 && cond.ok(i) {
                let a = self.s[i];
                let b = self.s[i | bit];
                self.s[i] = m[0][0] * a + m[0][1] * b;
                self.s[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    fn multiplexed(&mut self, t: usize, select: &[usize], cond: Cond, angles: &[f64], ry: bool) {
        let mats: Vec<M2> = angles.iter().map(|&a| if ry { ry_matrix(a) } else { rz_matrix(a) }).collect();
        let bit = 1 << t;
        for i in 0..self.s.len() {
            if i & bit == 0 && cond.ok(i) {
                let m = &mats[gather(i, select)];
                let a = self.s[i];
                let b = self.s[i | bit];
                self.s[i] = m[0][0] * a + m[0][1] * b;
                self.s[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    /// Applies the basis permutation `f` on indices satisfying `cond`.
    fn permute(&mut self, cond: Cond, f: impl Fn(usize) -> usize) {
        let n = self.s.len();
        self.scratch.clear();
        self.scratch.resize(n, C64::new(0.0, 0.0));
        for i in 0..n {
            let j = if cond.ok(i) { f(i) } else { i };
            self.scratch[j] = self.s[i];
        }
        std::mem::swap(self.s, &mut self.scratch);
    }

    fn gate(&mut self, g: &GateRecord, outer: Cond) {
        let t0 = g.targets.first().copied().unwrap_or(0);
        match g.kind {
            GateKind::H => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                self.one_qubit(t0, outer.with(&g.controls), &[[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]);
            }
            GateKind::X | GateKind::CNOT => {
                let cond = outer.with(&g.controls);
                let bit = 1 << t0;
                for i in 0..self.s.len() {
                    if i & bit == 0 && cond.ok(i) {
                        self.s.swap(i, i | bit);
                    }
                }
            }
            GateKind::S => {
                let p = if g.adjoint { c(0.0, -1.0) } else { c(0.0, 1.0) };
                self.one_qubit(t0, outer.with(&g.controls), &[[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), p]]);
            }
            GateKind::RY => self.one_qubit(t0, outer.with(&g.controls), &ry_matrix(g.params[0])),
            GateKind::RZ | GateKind::ControlledRZ => {
                self.one_qubit(t0, outer.with(&g.controls), &rz_matrix(g.params[0]))
            }
            GateKind::SWAP => {
                let (a, b) = (g.targets[0], g.targets[1]);
                self.permute(outer.with(&g.controls), |i| {
                    let (x, y) = ((i >> a) & 1, (i >> b) & 1);
                    (i & !(1 << a) & !(1 << b)) | (y << a) | (x << b)
                });
            }
            GateKind::MultiplexedRY | GateKind::MultiplexedRZ => {
                let select: Vec<usize> = g.controls.iter().map(|c| c.0).collect();
                self.multiplexed(t0, &select, outer, &g.params, g.kind == GateKind::MultiplexedRY);
            }
            GateKind::QROMLookup => {
                let addr: Vec<usize> = g.controls.iter().map(|c| c.0).collect();
                let table = g.table.as_ref().expect("validated");
                let mask = (1usize << g.targets.len()) - 1;
                let targets = &g.targets;
                self.permute(outer, |i| {
                    let v = table.int(gather(i, &addr)) as usize & mask;
                    scatter(i, targets, gather(i, targets) ^ v)
                });
            }
            GateKind::InPlaceAdder => {
                let b = g.targets.len();
                let sign: i128 = if g.adjoint { -1 } else { 1 };
                let (acc, op) = (&g.targets, &g.operand);
                self.permute(outer.with(&g.controls), |i| {
                    let v = gather(i, acc) as i128 + sign * gather(i, op) as i128;
                    scatter(i, acc, wrap(v, b))
                });
            }
            GateKind::ConstantAdder => {
                let addr: Vec<usize> = g.controls.iter().map(|c| c.0).collect();
                let table = g.table.as_ref().expect("validated");
                let b = g.targets.len();
                let sign: i128 = if g.adjoint { -1 } else { 1 };
                let acc = &g.targets;
                self.permute(outer, |i| {
                    let k = table.int(gather(i, &addr)) as i128;
                    scatter(i, acc, wrap(gather(i, acc) as i128 + sign * k, b))
                });
            }
            GateKind::Comparator => {
                let addr: Vec<usize> = g.controls.iter().map(|c| c.0).collect();
                let table = g.table.as_ref().expect("validated");
                let op = &g.operand;
                let flag = 1 << t0;
                self.permute(outer, |i| {
                    if gather(i, op) as i64 >= table.int(gather(i, &addr)) {
                        i ^ flag
                    } else {
                        i
                    }
                });
            }
            GateKind::CSwap => {
                let half = g.targets.len() / 2;
                let (a, b) = g.targets.split_at(half);
                self.permute(outer.with(&g.controls), |i| {
                    let (x, y) = (gather(i, a), gather(i, b));
                    scatter(scatter(i, a, y), b, x)
                });
            }
            GateKind::BlockGate => self.block(g, outer.with(&g.controls)),
        }
    }

    fn block(&mut self, g: &GateRecord, cond: Cond) {
        let p = g.payload().expect("validated");
        let t = &g.targets;
        let m = t.len();
        let tmask: usize = t.iter().map(|&q| 1usize << q).sum();
        match &p.action {
            BlockAction::Dense { dim, re, im } => {
                let d = *dim;
                let u: Vec<C64> = re.iter().zip(im).map(|(&a, &b)| c(a, b)).collect();
                let offsets: Vec<usize> = (0..d).map(|x| scatter(0, t, x)).collect();
                let mut buf = vec![c(0.0, 0.0); d];
                for base in 0..self.s.len() {
                    if base & tmask != 0 || !cond.ok(base) {
                        continue;
                    }
                    for x in 0..d {
                        buf[x] = self.s[base | offsets[x]];
                    }
                    for r in 0..d {
                        let mut acc = c(0.0, 0.0);
                        for k in 0..d {
                            acc += u[r * d + k] * buf[k];
                        }
                        self.s[base | offsets[r]] = acc;
                    }
                }
            }
            BlockAction::DiagonalEncoding { values } => {
                let flag = 1 << t[0];
                let sys = &t[1..];
                for i in 0..self.s.len() {
                    if i & flag == 0 && cond.ok(i) {
                        let a = values[gather(i, sys)].clamp(-1.0, 1.0);
                        let s = (1.0 - a * a).max(0.0).sqrt();
                        let x0 = self.s[i];
                        let x1 = self.s[i | flag];
                        self.s[i] = x0 * a + x1 * s;
                        self.s[i | flag] = x0 * s - x1 * a;
                    }
                }
            }
            BlockAction::Qft { inverse } => {
                let d = 1usize << m;
                // QFT|j> = d^{-1/2} sum_k e^{+2 pi i jk/d}|k>, which is rustfft's inverse direction.
                let plan = if *inverse { self.fft.plan_fft_forward(d) } else { self.fft.plan_fft_inverse(d) };
                let scale = 1.0 / (d as f64).sqrt();
                let offsets: Vec<usize> = (0..d).map(|x| scatter(0, t, x)).collect();
                let mut buf = vec![c(0.0, 0.0); d];
                for base in 0..self.s.len() {
                    if base & tmask != 0 || !cond.ok(base) {
                        continue;
                    }
                    for x in 0..d {
                        buf[x] = self.s[base | offsets[x]];
                    }
                    plan.process(&mut buf);
                    for x in 0..d {
                        self.s[base | offsets[x]] = buf[x] * scale;
                    }
                }
            }
            BlockAction::Permutation { map } => {
                self.permute(cond, |i| scatter(i, t, map[gather(i, t)]));
            }
            BlockAction::Circuit { gates } => {
                for inner in gates {
                    self.gate(inner, cond);
                }
            }
        }
    }
}

/// Dense unitary of a small circuit (test oracle helper).
pub fn unitary(ir: &CircuitIR) -> Result<DMatrix<C64>> {
    let n = ir.total_qubits();
    if n > DEFAULT_BLOCK_LIMIT {
        return Err(QdlcError::Resource("unitary extraction limited to 12 qubits".into()));
    }
    extract_block_with_limit(ir, 0, DEFAULT_BLOCK_LIMIT)
}
