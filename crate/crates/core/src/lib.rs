//! Digital-analog simulation toolkit for Schrödinger-cat states in the
//! Dicke-Ising model.
//!
//! The crate is organised by engine:
//!
//! * [`model`]: Hilbert space, operators, Hamiltonians, special states.
//! * [`exact`]: Lanczos ground states, Krylov quench evolution, reductions, fidelity.
//! * [`circuit`]: Jaynes-Cummings / Rabi / Dicke / Dicke-Ising gates, Trotter schedules,
//!   parity readout and gate counting.
//! * [`noise`]: Lindblad windows interleaved with the Trotter circuit.
//! * [`tomography`]: Wigner functions (closed form and displaced parity), marginals,
//!   ancilla Ramsey readout.
//! * [`field`]: free energies, magnon bands, critical couplings, instantons,
//!   angular mean field and Gaussian fluctuations.

pub mod circuit;
pub mod error;
pub mod exact;
pub mod field;
pub mod linalg;
pub mod model;
pub mod noise;
pub mod state;
pub mod tomography;

pub use error::{Error, Result};
pub use linalg::{LinearOperator, C64};
pub use model::{Boundary, HamiltonianKind, ModelParams, Parity};
pub use state::{DensityMatrix, QuantumState};
