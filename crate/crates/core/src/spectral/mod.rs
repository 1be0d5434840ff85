//! Eigendecompositions, counting functions and the two sides of the Krein
//! trace identity `Tr[f(H) - f(H₀)] = -∫ f'(λ) ξ(λ) dλ`.

mod curve;
mod eigensystem;
mod krein;
mod test_function;
pub mod tridiagonal;

pub use curve::{counting_curve, simpson, Route, SsfCurve};
pub use eigensystem::{
    counting_difference, eigendecompose, eigendecompose_below, eigenvalues_only, EigenSystem,
};
pub use krein::{krein_lhs, krein_rhs};
pub use test_function::{Side, TestFunction};
