//! Probe-wave pulse-train formation in a two-level gas dressed by a
//! sigmoid-switched pump.
//!
//! The computation chain is
//! [`specfun`] → [`dressed`] → [`response`] → [`propagation`] (+ [`doppler`]),
//! with [`verify`] providing brute-force oracles for each analytic stage.

pub mod config;
pub mod doppler;
pub mod dressed;
pub mod error;
pub mod plot;
pub mod propagation;
pub mod quad;
pub mod response;
pub mod run;
pub mod specfun;
pub mod units;
pub mod validation;
pub mod verify;

pub use error::{Error, Result};
