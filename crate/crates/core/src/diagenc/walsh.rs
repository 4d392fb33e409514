use std::ops::{Add, Mul, Sub};

use crate::circuit::{CircuitIR, GateRecord};
use crate::costmodel::{estimate_circuit, CostConfig};
use crate::diagenc::multiplexer::diag_angles;
use crate::diagenc::real_diagonal;
use crate::error::{QdlcError, Result};
use crate::stateprep::mps::EXACT_FLOOR;
use crate::types::{ErrorBudget, Method, MethodPlan, TargetVector};

/// Grids up to this size get an exhaustive scan over kappa.
const EXHAUSTIVE_SCAN: usize = 4096;

/// Orthonormal Walsh-Hadamard transform in natural (bit) order.
pub fn fwht_in_place<T>(v: &mut [T])
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = v.len();
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
    let s = 1.0 / (n as f64).sqrt();
    for x in v.iter_mut() {
        *x = *x * s;
    }
}

/// c_k = N^{-1/2} sum_j g_j (-1)^{popcount(j & k)}.
pub fn walsh_transform(samples: &[f64]) -> Result<Vec<f64>> {
    if !samples.len().is_power_of_two() {
        return Err(QdlcError::Dimension("Walsh transform needs a power-of-two length".into()));
    }
    let mut v = samples.to_vec();
    fwht_in_place(&mut v);
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalshSpectrum {
    pub coefficients: Vec<f64>,
    /// Retained k, in decreasing |c_k| (ties to the lower k).
    pub kept_indices: Vec<usize>,
    pub truncation_order: usize,
}

impl WalshSpectrum {
    pub fn new(phases: &[f64]) -> Result<Self> {
        let coefficients = walsh_transform(phases)?;
        Ok(WalshSpectrum { coefficients, kept_indices: Vec::new(), truncation_order: 0 })
    }

    pub fn ranked(&self) -> Vec<usize> {
        let c = &self.coefficients;
        let mut idx: Vec<usize> = (0..c.len()).collect();
        idx.sort_by(|&a, &b| c[b].abs().total_cmp(&c[a].abs()).then(a.cmp(&b)));
        idx
    }

    /// Phases rebuilt from the first `kappa` ranked coefficients.
    pub fn truncated_phases(&self, kappa: usize) -> Vec<f64> {
        let mut masked = vec![0.0; self.coefficients.len()];
        for &k in self.ranked().iter().take(kappa) {
            masked[k] = self.coefficients[k];
        }
        fwht_in_place(&mut masked);
        masked
    }
}

/// Block error of the realized diagonal cos(g'/2) against alpha.
fn block_error(phases: &[f64], alpha: &[f64]) -> f64 {
    let e = phases.iter().zip(alpha).map(|(g, a)| ((g / 2.0).cos() - a).abs()).fold(0.0, f64::max);
    if e < EXACT_FLOOR {
        0.0
    } else {
        e
    }
}

/// Block error for every kappa from 1 to the full spectrum, built up one
/// ranked coefficient at a time.
pub fn kappa_error_curve(spec: &WalshSpectrum, alpha: &[f64]) -> Vec<f64> {
    let dim = alpha.len();
    let s = 1.0 / (dim as f64).sqrt();
    let mut g = vec![0.0; dim];
    let mut out = Vec::with_capacity(dim);
    for k in spec.ranked() {
        let c = spec.coefficients[k] * s;
        for (j, gj) in g.iter_mut().enumerate() {
            *gj += if (j & k).count_ones() % 2 == 0 { c } else { -c };
        }
        out.push(block_error(&g, alpha));
    }
    out
}

/// Smallest kappa whose realized block error meets `eps_a`. Large grids use a
/// doubling search followed by bisection.
pub fn select_kappa(spec: &WalshSpectrum, alpha: &[f64], eps_a: f64) -> (usize, f64) {
    let dim = alpha.len();
    if dim <= EXHAUSTIVE_SCAN {
        let curve = kappa_error_curve(spec, alpha);
        let i = curve.iter().position(|&e| e <= eps_a).unwrap_or(dim - 1);
        return (i + 1, curve[i]);
    }
    let err = |kappa: usize| block_error(&spec.truncated_phases(kappa), alpha);
    let mut hi = 1;
    while hi < dim && err(hi) > eps_a {
        hi *= 2;
    }
    let hi = hi.min(dim);
    let mut lo = hi / 2;
    let mut hi = hi;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if err(mid) <= eps_a {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (hi, err(hi))
}

/// exp(i c Z^k) on n qubits: a CNOT ladder onto the highest set bit of k and RZ(-2c).
pub fn walsh_term_circuit(n: usize, k: usize, c: f64) -> CircuitIR {
    let mut ir = CircuitIR::new(n, 0);
    if k == 0 {
        ir.push(GateRecord::global_phase(c));
        return ir;
    }
    let top = (usize::BITS - 1 - k.leading_zeros()) as usize;
    let ladder: Vec<GateRecord> = (0..top).filter(|q| (k >> q) & 1 == 1).map(|q| GateRecord::cnot(q, top)).collect();
    ir.extend(ladder.iter().cloned());
    ir.push(GateRecord::rz(top, -2.0 * c));
    ir.extend(ladder.into_iter().rev());
    ir
}

fn star(bits: usize, n: usize, flag: usize) -> Vec<GateRecord> {
    (0..n).filter(|q| (bits >> q) & 1 == 1).map(|q| GateRecord::cnot(q, flag)).collect()
}

fn gray_rank(k: usize) -> usize {
    let mut x = k;
    let mut s = x >> 1;
    while s > 0 {
        x ^= s;
        s >>= 1;
    }
    x
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WalshOptions {
    /// Emit terms in Gray-code order and fuse adjacent CNOT stars.
    pub gray_order: bool,
}

pub fn synth_diag_walsh(target: &TargetVector, budget: ErrorBudget, cfg: &CostConfig) -> Result<(MethodPlan, CircuitIR)> {
    synth_diag_walsh_with(target, budget, cfg, WalshOptions::default())
}

pub fn synth_diag_walsh_with(
    target: &TargetVector,
    budget: ErrorBudget,
    cfg: &CostConfig,
    opts: WalshOptions,
) -> Result<(MethodPlan, CircuitIR)> {
    let alpha = real_diagonal(target)?;
    let n = target.n_qubits;
    let dim = alpha.len();
    let phases = diag_angles(&alpha);
    let mut spec = WalshSpectrum::new(&phases)?;
    let (kappa, err) = select_kappa(&spec, &alpha, budget.eps_a);
    spec.kept_indices = spec.ranked().into_iter().take(kappa).collect();
    spec.truncation_order = kappa;

    let flag = n;
    let s = 1.0 / (dim as f64).sqrt();
    let mut terms = spec.kept_indices.clone();
    if opts.gray_order {
        terms.sort_by_key(|&k| gray_rank(k));
    }
    let mut ir = CircuitIR::new(n, 1);
    ir.push(GateRecord::sdg(flag));
    ir.push(GateRecord::h(flag));
    let mut prev = 0usize;
    for (i, &k) in terms.iter().enumerate() {
        let w = spec.coefficients[k] * s / 2.0;
        if opts.gray_order {
            ir.extend(star(prev ^ k, n, flag));
            prev = k;
        } else {
            ir.extend(star(k, n, flag));
        }
        ir.push(GateRecord::rz(flag, 2.0 * w));
        if !opts.gray_order {
            ir.extend(star(k, n, flag));
        } else if i + 1 == terms.len() {
            ir.extend(star(prev, n, flag));
        }
    }
    ir.push(GateRecord::h(flag));
    ir.push(GateRecord::s(flag));

    let delta = budget.eps_p / (kappa.max(1) as f64).sqrt();
    let mut plan = MethodPlan::new(Method::WalshDiag, budget);
    plan.set("kappa", kappa as f64);
    plan.set("delta_g", delta);
    plan.set("gray_order", if opts.gray_order { 1.0 } else { 0.0 });
    plan.eps_a_predicted = err;
    plan.feasible = err <= budget.eps_a;
    plan.resources = estimate_circuit(&ir, cfg, delta)?;
    Ok((plan, ir))
}
