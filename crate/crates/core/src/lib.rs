//! Mode-mismatch model of a post-selected linear-optical CNOT gate.
//!
//! Photons carry Gaussian wavepacket labels that are displaced at five
//! locations in the circuit (τ1…τ5). Detection traces the labels out, so
//! imperfect overlap shows up as mixture in the qubit process. The crate
//! simulates the gate in this extended space, fits τ to coincidence data by
//! minimising the worst-case prediction error, and reconstructs the process
//! matrix directly from the fitted model.

pub mod circuit;
pub mod error;
pub mod fitting;
pub mod fock;
pub mod synth;
pub mod tomography;
pub mod wavepacket;

pub use error::{Error, Result};
