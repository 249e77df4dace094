//! Thermal measurement-induced nonlocality (MIN) of the spin-1/2 Ising-XXZ
//! diamond chain with a Dzyaloshinskii-Moriya interaction, solved exactly in
//! the thermodynamic limit with the transfer-matrix method.
//!
//! The pipeline is
//! [`model`] (block spectrum) → [`transfer`] (reduced dimer state) →
//! [`min`] (correlation measures) → [`analysis`] (sweeps, derivatives,
//! critical points, threshold boundaries). Each stage ships with an
//! independent numerical oracle used by the tests and by `diamond-min selftest`.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod min;
pub mod model;
pub mod output;
pub mod presets;
pub mod selftest;
pub mod transfer;

pub use error::{Error, Result};
pub use min::{min_xstate, MinResult};
pub use model::{IsingPair, IsingSpin, ModelParams};
pub use transfer::{thermal_state, ThermalState, TransferMatrix};
