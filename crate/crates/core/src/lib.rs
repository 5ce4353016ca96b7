//! Numerical laboratory for the free-energy upper bound of the dilute Bose
//! gas: lattice scattering solve, Bogoliubov coefficients, thermal sums and
//! the assembled Lee–Huang–Yang formula, plus an exact truncated Fock-space
//! simulator for the operator identities behind the construction.

pub mod error;
pub mod lattice;
pub mod par;
pub mod quadrature;
pub mod regime;
pub mod scattering;
pub mod stats;

pub use error::{Error, Result};
pub mod bogoliubov;
pub mod thermal;
pub mod fockmicro;
pub mod localization;
pub mod pipeline;
