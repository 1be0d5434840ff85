//! Spectral shift function from boundary values of the resolvent.
//!
//! The pair `(H, H₀)` is mapped to bounded operators `A = (H + M)^{-ℓ}`,
//! `A₀ = (H₀ + M)^{-ℓ}`; `ξ(λ; H, H₀) = -ξ(μ(λ); A, A₀)` with
//! `μ(λ) = (λ + M)^{-ℓ}`. The transformed shift is read off either from a
//! contour integral of `Tr[(A - w)^{-1} - (A₀ - w)^{-1}]` or from the
//! perturbation determinant, at height `η` above the real axis, and then
//! extrapolated to `η → 0`.

mod contour;
mod determinant;
mod extrapolate;
mod probes;
pub mod quadrature;
mod transform;

pub use contour::{ssf_contour, ssf_contour_at, ssf_curve, Contour, EtaSchedule, SsfPoint, QUAD_TOL};
pub use determinant::{log_perturbation_determinant, ssf_determinant, ssf_determinant_at};
pub use extrapolate::{extrapolate_to_zero, Extrapolation};
pub use probes::{beta_window, boundary_limit_probe, check_beta, w_trace_probe, BoundaryProbe, WeightProbe};
pub use transform::{trace_resolvent_diff, transform_spectrum, TransformParams, TransformedPair};
