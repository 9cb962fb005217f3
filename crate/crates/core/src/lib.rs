//! Time-dependent Dirac equation on a lattice, solved twice.
//!
//! The [`classical`] module advances a [`lattice::SpinorField`] with an exact-streaming
//! split-operator scheme. The [`circuits`] module builds the same time step as a
//! gate-level quantum walk that runs on the [`qcore`] statevector simulator, so the two
//! paths check each other amplitude by amplitude.
//!
//! Around that core sit the splitting-coefficient machinery ([`splitting`]), general
//! state preparation with uniformly controlled gates ([`stateprep`]), the dispersion and
//! Feit-Fleck spectral tools ([`spectral`]) and a Clifford+T resource estimator
//! ([`resources`]).
//!
//! Per-site and per-amplitude kernels are data parallel through rayon when the
//! `parallel` feature is enabled (the default). The [`exec`] module selects the backend
//! at runtime so both paths can be compared; results are identical bit for bit.

pub mod circuits;
pub mod classical;
pub mod error;
pub mod exec;
pub mod lattice;
pub mod linalg;
pub mod qcore;
pub mod resources;
pub mod spectral;
pub mod splitting;
pub mod stateprep;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
