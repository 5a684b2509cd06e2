//! Gate and circuit data model: gate unitaries and analytic parameter
//! gradients, a QASM 2.0 subset parser/writer, benchmark circuit generators,
//! and direct dense circuit-unitary simulation.

mod gates;
mod generate;
mod qasm;

pub use gates::{
    expand_to_n_qubits, unitary_to_u3, wrap_angle, Circuit, GateCounts, GateKind, LocatedGate,
    U3Angles,
};
pub use generate::{gen_benchmark, BenchmarkFamily};
pub use qasm::{parse_qasm, write_qasm, QasmError};

use crate::linalg::LinalgError;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum CircuitError {
    /// Gate built with the wrong number of parameters.
    WrongParamCount {
        kind: &'static str,
        expected: usize,
        got: usize,
    },
    /// Location is out of range, wrong arity, or repeats a qubit.
    BadLocation(String),
    /// A gate-kind constructor or lowering step received a non-unitary or
    /// mis-shaped matrix.
    BadGateMatrix(String),
    /// Writing a circuit that still contains a multi-qubit matrix gate.
    UnloweredUnitaryGate { arity: usize },
    /// Gradient requested for a gate without parameters.
    NotParameterized(&'static str),
    /// Unknown benchmark family name.
    UnknownFamily(String),
    /// Generator parameters out of range.
    BadGeneratorParams(String),
    Qasm(QasmError),
    Linalg(LinalgError),
}

impl fmt::Display for CircuitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircuitError::WrongParamCount { kind, expected, got } => {
                write!(f, "{kind} takes {expected} parameters, got {got}")
            }
            CircuitError::BadLocation(msg) => write!(f, "bad gate location: {msg}"),
            CircuitError::BadGateMatrix(msg) => write!(f, "bad gate matrix: {msg}"),
            CircuitError::UnloweredUnitaryGate { arity } => write!(
                f,
                "cannot serialize a {arity}-qubit matrix gate; lower it to the supported gate set first"
            ),
            CircuitError::NotParameterized(kind) => {
                write!(f, "{kind} has no parameters to differentiate")
            }
            CircuitError::UnknownFamily(name) => write!(f, "unknown benchmark family '{name}'"),
            CircuitError::BadGeneratorParams(msg) => write!(f, "bad generator parameters: {msg}"),
            CircuitError::Qasm(e) => write!(f, "{e}"),
            CircuitError::Linalg(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CircuitError {}

impl From<LinalgError> for CircuitError {
    fn from(e: LinalgError) -> Self {
        CircuitError::Linalg(e)
    }
}

impl From<QasmError> for CircuitError {
    fn from(e: QasmError) -> Self {
        CircuitError::Qasm(e)
    }
}
