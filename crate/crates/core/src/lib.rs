//! Simulation of multi-dimensional entangled coherent states generated by a
//! Kerr medium and a 50/50 beamsplitter.
//!
//! Two state representations are provided: [`fock`] is a truncated
//! number-basis backend used as a reference at small amplitude, and [`css`]
//! represents states exactly as finite sums of coherent-state products.
//! [`entanglement`] computes reduced-state entropies and [`teleport`] runs the
//! probabilistic teleportation protocol built on these states.

pub mod css;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod special;
pub mod table;
pub mod teleport;

pub use css::{CoherentBranch, CssState, RevivalCoeffs};
pub use entanglement::{Partition, SpectrumResult};
pub use error::{Error, Result};
pub use fock::{FockMat, FockVec, KerrParams};
pub use table::{SweepTable, Value};
pub use teleport::{ProtocolStats, TeleportConfig, TrialOutcome};

pub use num_complex::Complex64;
