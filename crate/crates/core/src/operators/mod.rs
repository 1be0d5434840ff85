//! Finite-difference Schrödinger operators on one-dimensional boxes and
//! radial half-lines.
//!
//! Units are fixed by `ħ²/2m = 1`, so the free operator is exactly `-Δ` and
//! energies carry units of inverse length squared.

mod grid;
mod hamiltonian;
mod potential;

pub use grid::{Grid, GridKind};
pub use hamiltonian::{build_free, build_perturbed, HamiltonianMatrix, OperatorLabel};
pub use potential::{certify_decay, DecayCertificate, DecayReport, Potential, Shape};

/// Japanese bracket `⟨x⟩ = sqrt(1 + x²)`.
#[inline]
pub fn japanese(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}
