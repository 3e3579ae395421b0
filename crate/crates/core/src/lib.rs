//! Central values of level-one modular L-functions and their quadratic twists,
//! computed from exact q-expansions.
//!
//! The crate is organised bottom-up:
//!
//! - [`exactseries`]: exact truncated q-series and the level-one / level-four generators
//! - [`linalg`]: exact matrices, characteristic polynomials and certified real roots
//! - [`eigenforms`]: Hecke eigenforms of level one and their normalized eigenvalues
//! - [`characters`]: fundamental discriminants and Kronecker symbols
//! - [`specialfn`]: error-bounded high-precision special functions
//! - [`lcentral`]: central values, harmonic weights and moment sums
//! - [`petersson`]: Kloosterman sums and both sides of the Petersson formula
//! - [`resonance`]: resonator coefficients, Euler products and divisor-sum identities
//! - [`kohnenplus`]: the Kohnen plus space and the Waldspurger checks

pub mod characters;
pub mod eigenforms;
pub mod error;
pub mod exactseries;
pub mod kohnenplus;
pub mod lcentral;
pub mod linalg;
pub mod petersson;
pub mod resonance;
pub mod specialfn;

pub use error::{Error, Result};

/// Working precision used when callers do not ask for one.
pub const DEFAULT_PREC_BITS: u32 = 128;
