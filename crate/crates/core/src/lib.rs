//! Probe absorption of a three-level Λ atom coupled to a single cavity mode.
//!
//! The vacuum-field spectrum has a closed form ([`analytic`]); pumped or
//! thermal cavities are handled numerically by building the Lindblad
//! superoperator on a truncated Fock space ([`liouvillian`]) and solving for
//! steady states and linear response ([`solver`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod dressed;
pub mod error;
pub mod liouvillian;
pub mod model;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
pub use model::{DecayRates, Level, Pump, SystemParams};
