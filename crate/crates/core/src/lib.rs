//! Quantum spectra from Bethe-like root systems, exact WKB periods and
//! thermodynamic Bethe ansatz equations, with independent Airy-function and
//! Schrödinger-shooting oracles.
//!
//! Units default to `hbar = 1`, `2m = 1`; every routine that depends on them
//! takes them from its [`potentials::PotentialSpec`].

#![allow(
    clippy::excessive_precision,
    clippy::needless_range_loop,
    clippy::neg_cmp_op_on_partial_ord
)]

pub mod airy;
pub mod bethe;
pub mod eqc;
pub mod error;
pub mod interp;
pub mod oracle;
pub mod potentials;
pub mod quadrature;
pub mod spectrum;
pub mod tba;
pub mod wkb;

pub use error::{Error, Result};
