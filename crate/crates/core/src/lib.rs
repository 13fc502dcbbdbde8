//! Numerical exterior calculus on embedded pseudo-spheres.
//!
//! Every quantity is propagated as an order-2 jet, so derivatives of frames,
//! structure coefficients and fields are exact up to rounding. The crate
//! builds adapted frames on de Sitter, anti-de Sitter and round spheres,
//! evaluates Laplace–de Rham and Laplace–Beltrami operators both
//! compositionally and through frame formulas, and checks the restriction
//! and extension identities that relate the ambient and intrinsic operators.

// Index loops mirror the tensor formulas they implement.
#![allow(clippy::needless_range_loop)]

pub mod ambient;
pub mod calculus;
pub mod connection;
pub mod error;
pub mod exec;
pub mod expr;
pub mod extension;
pub mod frames;
pub mod jets;
pub mod report;
pub mod restriction;
pub mod suite;

pub use error::{Error, Result};
pub use jets::{seed_coordinates, Jet};
