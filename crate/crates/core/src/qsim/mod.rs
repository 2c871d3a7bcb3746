//! Dense statevector simulation of parametric quantum circuits with exact
//! gradients.
//!
//! A circuit alternates data-dependent encoder layers `V_k(x)` with parameter
//! rotations `exp(-i θ_k G_k / 2)` generated by Pauli strings, and the model
//! value is the expectation of a Pauli observable in the prepared state.
//! Gradients come from an adjoint sweep that touches each gate a constant
//! number of times; the parameter-shift rule is kept as an independent
//! cross-check.

mod circuit;
mod pauli;
mod state;

pub use circuit::{apply_encoder, apply_pauli_rotation, CircuitSpec, EncoderLayer, RotationAxis, MAX_QUBITS};
pub use pauli::{parse_pauli_label, Pauli, PauliString};
pub use state::StateVector;
