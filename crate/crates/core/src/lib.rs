//! Dipole-dipole mediated two-qubit gates for neutral atoms in optical lattices.

pub mod angular;
pub mod dipole_tensor;
pub mod ensemble_protocol;
pub mod error;
pub mod fidelity_budget;
pub mod figures_of_merit;
pub mod gate_sim;
pub mod interaction;
pub mod optimize;
pub mod oscillator_basis;
pub mod quadrature;

pub use error::{Error, Result};
