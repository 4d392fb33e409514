//! Diagonal block encoders. Every encoder puts a flag qubit at index n and
//! realizes diag(alpha) as the flag-|0> block.

pub mod multiplexer;
pub mod qsp;
pub mod walsh;

pub use multiplexer::{solve_diag_mottonen, synth_diag_multiplexer};
pub use qsp::{solve_qsp_delta, synth_diag_qsp, QspDiagonalSpec, SignalEmbedding};
pub use walsh::{kappa_error_curve, select_kappa, synth_diag_walsh, walsh_term_circuit, walsh_transform, WalshSpectrum};

use crate::error::{QdlcError, Result};
use crate::types::{Task, TargetVector};

/// Real diagonal entries of a diagonal target, clamped into [-1, 1].
pub fn real_diagonal(target: &TargetVector) -> Result<Vec<f64>> {
    if target.task != Task::DiagonalEncode {
        return Err(QdlcError::UnsupportedTarget("expected a diagonal-encoding target".into()));
    }
    if !target.is_real() {
        return Err(QdlcError::UnsupportedTarget("diagonal encoders take real entries".into()));
    }
    let v = target.real_parts();
    if let Some(x) = v.iter().find(|x| x.abs() > 1.0 + 1e-12) {
        return Err(QdlcError::NormViolation(format!("diagonal entry {x} outside [-1, 1]")));
    }
    Ok(v.iter().map(|x| x.clamp(-1.0, 1.0)).collect())
}
