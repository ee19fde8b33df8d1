//! Sampling-based verification of every identity and bound in the crate.

pub mod checks;
pub mod report;
pub mod sampling;
pub mod spec;
pub mod witness;

pub use checks::run_checks;
pub use report::{CheckReport, InvariantReport, Provenance, Row, Witness, SCHEMA_VERSION};
pub use sampling::{sample_physical, trial_rng};
pub use spec::{Check, CheckKind, ExperimentSpec, FrameConfig, SystemConfig};
pub use witness::{find_tradeoff_violation, reverify_witness, tradeoff_gap};
