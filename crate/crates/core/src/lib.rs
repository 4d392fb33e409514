//! Resource-aware compilation of classical vectors into state-preparation
//! circuits and diagonal block encodings.

pub mod blockenc;
pub mod circuit;
pub mod costmodel;
pub mod diagenc;
pub mod error;
pub mod families;
pub mod io;
pub mod metrics;
pub mod planner;
pub mod simulator;
pub mod stateprep;
pub mod types;

pub use circuit::{BlockAction, CircuitIR, GateKind, GateRecord};
pub use costmodel::CostConfig;
pub use error::{QdlcError, Result};
pub use planner::{sweep, PlanReport, PlanRequest, SelectionMetric};
pub use types::{ErrorBudget, Method, MethodPlan, ResourceEstimate, Task, TargetVector, C64};
