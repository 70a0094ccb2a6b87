//! Ancilla-driven blind quantum computation.
//!
//! Statevector simulation ([`qsim`]), ancilla gadgets and Pauli-frame algebra
//! ([`gadgets`]), the two-party protocols with trap verification
//! ([`protocols`]), attack models ([`adversary`]) and blindness audits
//! ([`blindness`]), plus reproducible run manifests ([`manifest`]).

pub mod adversary;
pub mod blindness;
pub mod error;
pub mod gadgets;
pub mod manifest;
pub mod protocols;
pub mod qsim;
pub mod rng;

pub use error::{Error, Result};
