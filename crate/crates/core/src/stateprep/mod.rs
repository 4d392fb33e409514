//! State-preparation synthesizers.

pub mod alias;
pub mod fsl;
pub mod grover_rudolph;
pub mod mottonen;
pub mod mps;
pub mod qrom;
pub mod sparse;

pub use alias::{build_alias_table, solve_alias_mu, synth_alias, AliasTable};
pub use fsl::{synth_fsl, synth_fsl_with, FourierData, FourierTruncation};
pub use grover_rudolph::{grover_rudolph_angles, GroverRudolphAngles};
pub use mottonen::{solve_mottonen, synth_mottonen};
pub use mps::{mps_compress, solve_mps_delta, synth_mps, synth_mps_cached, MpsFactorization};
pub use qrom::{solve_qrom_bits, synth_qrom_stateprep};
pub use sparse::synth_sparse_sos;
