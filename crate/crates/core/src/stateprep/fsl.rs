use rustfft::FftPlanner;

use crate::circuit::{BlockAction, CircuitIR, GateRecord};
use crate::costmodel::{estimate_circuit, CostConfig};
use crate::error::Result;
use crate::stateprep::grover_rudolph::state_prep_gates;
use crate::stateprep::mps::EXACT_FLOOR;
use crate::stateprep::sparse::renormalized_truncation_error;
use crate::types::{ErrorBudget, Method, MethodPlan, TargetVector, C64};

#[derive(Debug, Clone)]
pub struct FourierTruncation {
    /// (frequency, coefficient) in compact-register order.
    pub kept_coefficients: Vec<(usize, C64)>,
    pub num_kept: usize,
    pub predicted_state: Vec<C64>,
    pub error: f64,
    /// Kept frequencies fit the wrap-around band reachable by a CNOT fan-out.
    pub band: bool,
}

/// c = QFT psi with QFT|j> = N^{-1/2} sum_k e^{2 pi i jk/N}|k>.
pub fn qft_coefficients(amps: &[C64]) -> Vec<C64> {
    let mut buf = amps.to_vec();
    let n = buf.len();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let s = 1.0 / (n as f64).sqrt();
    buf.iter().map(|z| z * s).collect()
}

/// psi = QFT^dagger c.
pub fn inverse_qft(coeffs: &[C64]) -> Vec<C64> {
    let mut buf = coeffs.to_vec();
    let n = buf.len();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let s = 1.0 / (n as f64).sqrt();
    buf.iter().map(|z| z * s).collect()
}

/// Position of frequency k in the order 0, N-1, 1, N-2, ...
pub fn band_rank(k: usize, n_dim: usize) -> usize {
    if k == 0 {
        0
    } else if k < n_dim - k {
        2 * k
    } else {
        2 * (n_dim - k) - 1
    }
}

/// Top-d coefficients, ties by band rank. Magnitudes are compared after
/// rounding so that floating noise does not override the band order.
fn ranked(c: &[C64]) -> Vec<usize> {
    let n = c.len();
    let q = |k: usize| (c[k].norm_sqr() * 1e12).round();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| q(b).total_cmp(&q(a)).then(band_rank(a, n).cmp(&band_rank(b, n))));
    idx
}

/// Spectrum and coefficient ranking of a target, shared across truncation levels.
#[derive(Debug, Clone)]
pub struct FourierData {
    pub coefficients: Vec<C64>,
    pub order: Vec<usize>,
    /// dropped[d] = weight fraction outside the top-d coefficients.
    dropped: Vec<f64>,
}

impl FourierData {
    pub fn new(target: &TargetVector) -> Self {
        let norm = crate::metrics::l2_norm(&target.amplitudes);
        let psi: Vec<C64> = target.amplitudes.iter().map(|a| a / norm).collect();
        let coefficients = qft_coefficients(&psi);
        let order = ranked(&coefficients);
        let total: f64 = coefficients.iter().map(|z| z.norm_sqr()).sum();
        // tail sums avoid cancellation when almost all weight is kept
        let mut tail = vec![0.0; order.len() + 1];
        for k in (0..order.len()).rev() {
            tail[k] = tail[k + 1] + coefficients[order[k]].norm_sqr();
        }
        let dropped = tail.iter().map(|t| t / total).collect();
        FourierData { coefficients, order, dropped }
    }

    pub fn truncation_error(&self, d: usize) -> f64 {
        let d = d.min(self.order.len());
        let e = renormalized_truncation_error(self.dropped[d]);
        if e < EXACT_FLOOR {
            0.0
        } else {
            e
        }
    }

    pub fn smallest_power_of_two(&self, eps_a: f64) -> usize {
        let dim = self.order.len();
        let mut d = 1;
        while d < dim && self.truncation_error(d) > eps_a {
            d *= 2;
        }
        d
    }

    pub fn truncate(&self, d: usize) -> FourierTruncation {
        let c = &self.coefficients;
        let n_dim = c.len();
        let d = d.min(n_dim);
        let keep = &self.order[..d];
        let w = d.trailing_zeros() as usize;
        let half = if w == 0 { 0 } else { 1usize << (w - 1) };
        let band = keep.iter().all(|&k| k < half.max(1) || k >= n_dim - half);
        let kept_norm = keep.iter().map(|&k| c[k].norm_sqr()).sum::<f64>().sqrt();
        let mut kept: Vec<(usize, C64)> = keep.iter().map(|&k| (k, c[k] / kept_norm)).collect();
        kept.sort_by_key(|&(k, _)| if band && k >= half.max(1) { k - (n_dim - (1 << w)) } else { k });
        let mut padded = vec![C64::new(0.0, 0.0); n_dim];
        for &(k, z) in &kept {
            padded[k] = z;
        }
        FourierTruncation {
            kept_coefficients: kept,
            num_kept: d,
            predicted_state: inverse_qft(&padded),
            error: self.truncation_error(d),
            band,
        }
    }
}

pub fn fourier_truncate(target: &TargetVector, d: usize) -> FourierTruncation {
    FourierData::new(target).truncate(d)
}

/// Smallest power-of-two d meeting `eps_a`.
pub fn select_fourier(target: &TargetVector, eps_a: f64) -> FourierTruncation {
    let data = FourierData::new(target);
    data.truncate(data.smallest_power_of_two(eps_a))
}

pub fn fsl_circuit(t: &FourierTruncation, n: usize) -> (CircuitIR, usize) {
    let n_dim = 1usize << n;
    let w = t.num_kept.trailing_zeros() as usize;
    let compact: Vec<usize> = (0..w).collect();
    let mut beta = vec![C64::new(0.0, 0.0); 1 << w];
    let mut ir = CircuitIR::new(n, 0);
    let rotations;
    if w == n {
        for &(k, z) in &t.kept_coefficients {
            beta[k] = z;
        }
        let (g, r) = state_prep_gates(&beta, &compact);
        ir.extend(g);
        rotations = r;
    } else if t.band {
        let shift = n_dim - (1 << w);
        let half = if w == 0 { 1 } else { 1usize << (w - 1) };
        for &(k, z) in &t.kept_coefficients {
            beta[if k < half { k } else { k - shift }] = z;
        }
        let (g, r) = state_prep_gates(&beta, &compact);
        ir.extend(g);
        rotations = r;
        if w > 0 {
            for q in w..n {
                ir.push(GateRecord::cnot(w - 1, q));
            }
        }
    } else {
        for (i, &(_, z)) in t.kept_coefficients.iter().enumerate() {
            beta[i] = z;
        }
        let (g, r) = state_prep_gates(&beta, &compact);
        ir.extend(g);
        rotations = r;
        let mut map = vec![usize::MAX; n_dim];
        let mut used = vec![false; n_dim];
        for (i, &(k, _)) in t.kept_coefficients.iter().enumerate() {
            map[i] = k;
            used[k] = true;
        }
        let mut free = (0..n_dim).filter(|&k| !used[k]);
        for slot in map.iter_mut().skip(t.kept_coefficients.len()) {
            *slot = free.next().expect("permutation completion");
        }
        let all: Vec<usize> = (0..n).collect();
        ir.push(GateRecord::block(&all, "fsl-map", BlockAction::Permutation { map }));
    }
    let all: Vec<usize> = (0..n).collect();
    ir.push(GateRecord::block(&all, "qft-dg", BlockAction::Qft { inverse: true }));
    (ir, rotations)
}

pub fn synth_fsl(target: &TargetVector, budget: ErrorBudget, cfg: &CostConfig) -> Result<(MethodPlan, CircuitIR)> {
    synth_fsl_with(target, &FourierData::new(target), budget, cfg)
}

/// As `synth_fsl` with a precomputed spectrum of `target`.
pub fn synth_fsl_with(
    target: &TargetVector,
    data: &FourierData,
    budget: ErrorBudget,
    cfg: &CostConfig,
) -> Result<(MethodPlan, CircuitIR)> {
    let n = target.n_qubits;
    let t = data.truncate(data.smallest_power_of_two(budget.eps_a));
    let (ir, rotations) = fsl_circuit(&t, n);
    // the inverse QFT's controlled phases are synthesized at the same tolerance
    let total = rotations + n * (n - 1);
    let delta = if total > 0 { budget.eps_p / (total as f64).sqrt() } else { 1.0 };
    let mut plan = MethodPlan::new(Method::FSL, budget);
    plan.set("d", t.num_kept as f64);
    plan.set("delta_g", delta);
    plan.eps_a_predicted = t.error;
    plan.feasible = t.error <= budget.eps_a;
    plan.resources = estimate_circuit(&ir, cfg, delta)?;
    Ok((plan, ir))
}
