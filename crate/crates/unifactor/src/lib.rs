//! Numerical instantiation of parameterized quantum circuits.
//!
//! The core algorithm keeps the overlap `Tr(V† U)` between a target unitary
//! `V` and the circuit unitary `U` as a contracted tensor, peels individual
//! gates off it, and replaces each gate by the exact maximizer of the local
//! overlap (an SVD update for free unitaries, closed-form updates for RZ and
//! U3 gates). A limited-memory quasi-Newton optimizer over gate angles is
//! provided as a general-purpose baseline, and a partition-and-resynthesize
//! pass uses either optimizer to delete gates from large circuits.
//!
//! Multistarts and per-partition work run in parallel through rayon when the
//! default `parallel` feature is enabled; without it everything falls back to
//! sequential loops with identical results.

pub mod baseline;
pub mod circuit;
pub mod compile;
pub mod exec;
pub mod linalg;
pub mod qfactor;
pub mod tensor;

pub use circuit::{Circuit, GateCounts, GateKind, LocatedGate};
pub use linalg::ComplexMatrix;
pub use qfactor::{HyperParams, InstantiationResult, Termination};
