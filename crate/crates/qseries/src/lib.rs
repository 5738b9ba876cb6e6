//! Exact-arithmetic engine for truncated formal power series in q, built to
//! verify and rediscover Rogers-Ramanujan type identities.
//!
//! The crate is organized around six layers:
//!
//! - [`series`]: truncated Laurent series in q^{1/s} over exact rationals
//! - [`qobjects`]: q-Pochhammer symbols, conjugate-pair rewrites, Jacobi
//!   triple product
//! - [`hypergeometric`]: direct evaluation of r-phi-s series plus closed-form
//!   oracles for the classical summation formulas
//! - [`transforms`]: both sides of the parameterized transformation theorems
//! - [`productrec`]: eta-quotient recognition (exponent profile extraction,
//!   modulus detection, reconstruction)
//! - [`registry`]: the machine-readable identity catalog, its parser and
//!   evaluators
//!
//! [`verify`] drives catalog verification with an optional rayon worker pool
//! (feature `parallel`, on by default; disable for a strictly sequential
//! build).

pub mod error;
pub mod hypergeometric;
pub mod productrec;
pub mod qobjects;
pub mod registry;
pub mod series;
pub mod transforms;
pub mod verify;

pub use error::{QError, QResult};
pub use qobjects::Monomial;
pub use series::{Coeff, Exp, Mismatch, Series};
