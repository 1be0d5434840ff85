//! Spectral shift function laboratory for Schrödinger pairs `H = -Δ + V`,
//! `H₀ = -Δ` on finite grids.

pub mod config;
pub mod error;
pub mod experiment;
pub mod excess;
pub mod operators;
pub mod scattering;
pub mod spectral;
pub mod ssf;

pub use error::{Error, Result};
