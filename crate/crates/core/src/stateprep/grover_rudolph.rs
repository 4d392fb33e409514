use serde::{Deserialize, Serialize};

use crate::circuit::GateRecord;
use crate::error::{QdlcError, Result};
use crate::types::{Task, TargetVector, C64};

/// Rotation angles of the multiplexed cascade. `ry[k]` has 2^k entries and
/// rotates qubit n-1-k conditioned on the k higher qubits. For complex
/// targets `rz` holds the phase cascade and `global_phase` the leftover phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroverRudolphAngles {
    pub ry: Vec<Vec<f64>>,
    pub rz: Option<Vec<Vec<f64>>>,
    pub global_phase: f64,
}

impl GroverRudolphAngles {
    pub fn n_qubits(&self) -> usize {
        self.ry.len()
    }

    pub fn rotation_count(&self) -> usize {
        let ry: usize = self.ry.iter().map(|l| l.len()).sum();
        ry + self.rz.as_ref().map_or(0, |z| z.iter().map(|l| l.len()).sum())
    }
}

pub fn grover_rudolph_angles(target: &TargetVector) -> Result<GroverRudolphAngles> {
    if target.task != Task::StatePrep {
        return Err(QdlcError::UnsupportedTarget("Grover-Rudolph angles need a state-prep target".into()));
    }
    Ok(angles_for(&target.amplitudes))
}

/// Angles for any power-of-two amplitude list (not necessarily normalized).
pub fn angles_for(amps: &[C64]) -> GroverRudolphAngles {
    let n = amps.len().trailing_zeros() as usize;
    let real = amps.iter().all(|a| a.im == 0.0);
    // mass[k][p]: squared norm of the node with k-bit prefix p
    let mut mass: Vec<Vec<f64>> = vec![Vec::new(); n + 1];
    mass[n] = amps.iter().map(|a| a.norm_sqr()).collect();
    for k in (0..n).rev() {
        mass[k] = (0..1 << k).map(|p| mass[k + 1][2 * p] + mass[k + 1][2 * p + 1]).collect();
    }
    let mut ry = Vec::with_capacity(n);
    for k in 0..n {
        let level: Vec<f64> = (0..1usize << k)
            .map(|p| {
                if real && k + 1 == n {
                    let (a0, a1) = (amps[2 * p].re, amps[2 * p + 1].re);
                    if a0 == 0.0 && a1 == 0.0 {
                        0.0
                    } else {
                        2.0 * a1.atan2(a0)
                    }
                } else {
                    let node = mass[k][p];
                    if node <= 0.0 {
                        0.0
                    } else {
                        2.0 * (mass[k + 1][2 * p] / node).sqrt().min(1.0).acos()
                    }
                }
            })
            .collect();
        ry.push(level);
    }
    if real {
        return GroverRudolphAngles { ry, rz: None, global_phase: 0.0 };
    }
    let mut phase: Vec<f64> = amps.iter().map(|a| if a.norm() == 0.0 { 0.0 } else { a.arg() }).collect();
    let mut rz = vec![Vec::new(); n];
    for k in (0..n).rev() {
        let half = phase.len() / 2;
        let mut theta = Vec::with_capacity(half);
        let mut mean = Vec::with_capacity(half);
        for p in 0..half {
            theta.push(phase[2 * p + 1] - phase[2 * p]);
            mean.push(0.5 * (phase[2 * p] + phase[2 * p + 1]));
        }
        rz[k] = theta;
        phase = mean;
    }
    GroverRudolphAngles { ry, rz: Some(rz), global_phase: phase[0] }
}

/// Multiplexer cascade preparing the state on `qubits` (least significant first).
pub fn cascade_gates(angles: &GroverRudolphAngles, qubits: &[usize]) -> Vec<GateRecord> {
    let n = qubits.len();
    assert_eq!(n, angles.n_qubits());
    let mut gates = Vec::new();
    for (k, level) in angles.ry.iter().enumerate() {
        gates.push(GateRecord::mux_ry(&qubits[n - k..], qubits[n - 1 - k], level.clone()));
    }
    if let Some(rz) = &angles.rz {
        for (k, level) in rz.iter().enumerate() {
            gates.push(GateRecord::mux_rz(&qubits[n - k..], qubits[n - 1 - k], level.clone()));
        }
        gates.push(GateRecord::global_phase(angles.global_phase));
    }
    gates
}

/// State produced by the cascade, computed classically.
pub fn cascade_state(angles: &GroverRudolphAngles) -> Vec<C64> {
    let n = angles.n_qubits();
    let mut v = vec![C64::new(1.0, 0.0)];
    for level in &angles.ry {
        let mut next = Vec::with_capacity(v.len() * 2);
        for (p, a) in v.iter().enumerate() {
            let (s, c) = (level[p] / 2.0).sin_cos();
            next.push(a * c);
            next.push(a * s);
        }
        v = next;
    }
    if let Some(rz) = &angles.rz {
        for (i, a) in v.iter_mut().enumerate() {
            let mut ph = angles.global_phase;
            for (k, level) in rz.iter().enumerate() {
                let p = i >> (n - k);
                let bit = (i >> (n - 1 - k)) & 1;
                ph += if bit == 1 { level[p] / 2.0 } else { -level[p] / 2.0 };
            }
            *a *= C64::from_polar(1.0, ph);
        }
    }
    v
}

/// Exact preparation of `amps` (normalized) on `qubits`, with its rotation count.
/// A single amplitude reduces to a global phase.
pub fn state_prep_gates(amps: &[C64], qubits: &[usize]) -> (Vec<GateRecord>, usize) {
    assert_eq!(amps.len(), 1 << qubits.len());
    if qubits.is_empty() {
        let ph = amps[0].arg();
        return (if ph != 0.0 { vec![GateRecord::global_phase(ph)] } else { Vec::new() }, 0);
    }
    let a = angles_for(amps);
    let r = a.rotation_count();
    (cascade_gates(&a, qubits), r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::to_complex;

    #[test]
    fn small_examples() {
        let t = TargetVector::state(&[1.0, 0.0]).unwrap();
        assert_eq!(grover_rudolph_angles(&t).unwrap().ry, vec![vec![0.0]]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let t = TargetVector::state(&[h, h]).unwrap();
        let a = grover_rudolph_angles(&t).unwrap();
        assert!((a.ry[0][0] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let t = TargetVector::state(&[0.6, 0.8]).unwrap();
        let a = grover_rudolph_angles(&t).unwrap();
        assert!((a.ry[0][0] - 2.0 * 0.6f64.acos()).abs() < 1e-14);
    }

    #[test]
    fn classical_cascade_reproduces_signed_and_complex() {
        let v = to_complex(&[0.1, -0.5, 0.3, 0.0, -0.2, 0.4, 0.0, 0.0]);
        let norm = crate::metrics::l2_norm(&v);
        let v: Vec<C64> = v.iter().map(|a| a / norm).collect();
        let back = cascade_state(&angles_for(&v));
        assert!(crate::metrics::l2_distance(&v, &back).unwrap() < 1e-14);
        let w: Vec<C64> = (0..8).map(|i| C64::from_polar(1.0 / 8f64.sqrt(), 0.7 * i as f64 - 1.0)).collect();
        let back = cascade_state(&angles_for(&w));
        assert!(crate::metrics::l2_distance(&w, &back).unwrap() < 1e-14);
    }
}
