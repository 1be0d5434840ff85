//! Cutoff excess charge `Z_R(λ) = Tr[ϑ_R (E_H(λ) - E_{H₀}(λ)) ϑ_R]` and its
//! `R → ∞` limit.

mod charge;
mod fit;
mod profile;

pub use charge::{
    assemble_channels, excess_at, excess_radii, excess_charge_r, ChannelSum, ExcessResult, ExcessTable, CHANNEL_CUTOFF,
};
pub use fit::{exponent_floor, extrapolate_r, RFit, EXPONENT_MAX};
pub use profile::{cutoff_weights, CutoffProfile, BOX_FRACTION};
