//! Rate and fidelity simulator for a cavity-QED / Rydberg-array quantum
//! repeater.
//!
//! The crate is layered bottom-up:
//!
//! - [`quantum`]: dense density matrices, Bell basis, Kraus channels.
//! - [`noise`]: noisy two-qubit gates, noisy Z measurement, swap and
//!   transport channels.
//! - [`cavity`]: heralded-link reflection amplitudes, loss budget and timing.
//! - [`purification`]: bilateral-CNOT purification rounds and their nesting.
//! - [`scheduler`]: pipeline timing `T_EG,N` and effective rates.
//! - [`chain`]: entanglement swapping across repeater stations and the
//!   `(N1, N2)` schedule search.
//! - [`config`] and [`report`]: configuration files and CSV/JSON emission.

pub mod cavity;
pub mod chain;
pub mod config;
mod error;
pub mod noise;
pub mod purification;
pub mod quantum;
pub mod report;
pub mod scheduler;

pub use error::{Error, Result};
