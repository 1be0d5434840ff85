//! Partial-wave phase shifts and the total scattering phase
//! `θ(λ) = (1/2πi) log det S(λ)`.

mod bessel;
mod numerov;
mod phase;

pub use bessel::riccati;
pub use numerov::{
    default_matching_radius, default_step, phase_shift, phase_shift_1d_parity, phase_shift_radial, principal,
    Channel, PhaseOptions, RANGE_TOL,
};
pub use phase::{
    l_max_policy, levinson_check, momentum_grid, phase_curve, tail_bound, total_phase_1d, total_phase_3d,
    unwrap_phase, unwrap_raw, LevinsonCheck, PhaseCurve, TotalPhase, ANCHOR_LIMIT, LEVINSON_TOL,
};
