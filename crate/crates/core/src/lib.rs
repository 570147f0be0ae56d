//! Entanglement structure of multi-qubit pure states.
//!
//! States are dense statevectors with qubit 0 as the most significant bit.
//! The crate computes local Pauli expectations, per-qubit entanglement
//! degrees, the entanglement metric over a chosen axis set, optimal
//! measurement axes, and the block partition that bounds how many
//! measurements are needed to fully disentangle a state.

#![allow(clippy::needless_range_loop)]

pub mod entanglement;
pub mod error;
pub mod measurement;
pub mod optimize;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod report;
pub mod states;
pub mod statevec;
pub mod structure;

pub use entanglement::{
    ed_all, ed_single, em_element, em_matrix, is_maximally_entangled, total_entanglement, EntanglementMetric,
    MaxEntanglement,
};
pub use error::{Error, Result};
pub use measurement::{
    measure_sequence, measure_sequence_with, project, sequential_expectation_formula, MeasurementRecord,
    Outcome,
};
pub use num_complex::Complex64;
pub use optimize::{
    mieb_matrix, optimal_axis_set, optimal_breaking_axis, optimal_pair_axes, spin_correlation_matrix,
    AxisSolution, BreakingAxis, PairOptimum,
};
pub use states::{bell, brs_chain, ghz, supersinglet_s4, BellKind, StateSpec, SupersingletParams};
pub use statevec::{Axis, PauliFactor, QubitId, StateVector};
pub use structure::{
    block_partition, persistency_upper_bound, quantize_em, BlockPartition, PersistencyBound,
};

/// Sizes the global rayon pool from `ENTANGLYZE_THREADS`, if set.
///
/// Returns the thread count that was applied. Calling it after the pool is
/// already initialized is harmless.
pub fn configure_threads() -> Option<usize> {
    let n = std::env::var("ENTANGLYZE_THREADS").ok()?.trim().parse::<usize>().ok()?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok()?;
    Some(n)
}
