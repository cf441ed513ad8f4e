//! Encoding information into resources destroyed by twirling channels: quantum
//! information primitives, one-shot and second-order entropic bounds, Schur-Weyl
//! tools for collective twirls, and a random-coding simulator with PGM decoding.

pub mod bounds;
pub mod codesim;
pub mod entropy;
pub mod error;
pub mod io;
pub mod qcore;
pub mod schurweyl;
pub mod twirl;

pub use error::{Error, Result};
