//! Statevector simulator: gates, circuits, register layout and field encoding.

mod circuit;
mod encode;
mod gate;
mod layout;
pub mod mcx;
mod state;

pub use circuit::{Circuit, Section};
pub use encode::{decode_field, encode_field};
pub use gate::{Control, Gate, GateKind, Instruction, UniformlyControlledGate};
pub use layout::RegisterLayout;
pub use mcx::apply_multi_controlled_x;
pub use state::{Observable, QuantumState, MAX_QUBITS};
