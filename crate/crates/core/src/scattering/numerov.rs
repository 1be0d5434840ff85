use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use super::bessel::riccati;
use crate::error::{Error, Result};
use crate::operators::Potential;

/// Scattering channel of a spherically symmetric or even potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "channel", rename_all = "snake_case")]
pub enum Channel {
    Radial { l: u32 },
    Even,
    Odd,
}

impl Channel {
    pub fn label(&self) -> String {
        match self {
            Channel::Radial { l } => format!("l={l}"),
            Channel::Even => "even".into(),
            Channel::Odd => "odd".into(),
        }
    }

    fn centrifugal(&self) -> f64 {
        match *self {
            Channel::Radial { l } => (l as f64) * (l as f64 + 1.0),
            _ => 0.0,
        }
    }
}

/// Integration controls; `None` picks the defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseOptions {
    /// Maximal Numerov step.
    pub step: Option<f64>,
    /// Matching radius `r_m`.
    pub matching_radius: Option<f64>,
}

/// Tolerance on `|V(r)| r²` that defines the edge of the potential.
pub const RANGE_TOL: f64 = 1e-10;
const RK_SUBSTEPS: usize = 16;
const RESCALE: f64 = 1e100;

/// `r_m`: edge of the potential plus one de Broglie wavelength.
pub fn default_matching_radius(potential: &Potential, k: f64) -> f64 {
    potential.effective_radius(RANGE_TOL) + 2.0 * PI / k
}

/// `min(0.005, 0.03 / k_loc)` with `k_loc = sqrt(k² + max|V|)`.
pub fn default_step(potential: &Potential, k: f64) -> f64 {
    let k_loc = (k * k + potential.max_abs()).sqrt();
    0.005f64.min(0.03 / k_loc)
}

struct Equation<'a> {
    potential: &'a Potential,
    centrifugal: f64,
    k2: f64,
}

impl Equation<'_> {
    /// `q(r)` with `u'' = q u`, using the smooth continuation of `piece`.
    fn q(&self, r: f64, piece: usize) -> f64 {
        let c = if self.centrifugal == 0.0 { 0.0 } else { self.centrifugal / (r * r) };
        c + self.potential.value_in_piece(r, piece) - self.k2
    }

    /// One RK4 step of `(u, u')` over `[r, r + h]` on a fixed piece.
    fn rk4(&self, r: f64, h: f64, u: f64, du: f64, piece: usize) -> (f64, f64) {
        let f = |r: f64, u: f64, du: f64| (du, self.q(r, piece) * u);
        let (a1, b1) = f(r, u, du);
        let (a2, b2) = f(r + 0.5 * h, u + 0.5 * h * a1, du + 0.5 * h * b1);
        let (a3, b3) = f(r + 0.5 * h, u + 0.5 * h * a2, du + 0.5 * h * b2);
        let (a4, b4) = f(r + h, u + h * a3, du + h * b3);
        (
            u + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
            du + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4),
        )
    }
}

/// Series `u = r^{ℓ+1}(1 + c₂r² + c₄r⁴)` of the regular solution near the
/// origin for a potential `V₀ + V₂ r² + …`.
fn regular_series(eq: &Equation, l: u32, r: f64) -> f64 {
    let v0 = eq.potential.value_in_piece(0.0, 0);
    let d = 1e-4 * eq.potential.length_scale().max(1e-3);
    let v2 = (eq.potential.value_in_piece(d, 0) - v0) / (d * d);
    let q0 = v0 - eq.k2;
    let lf = l as f64;
    let c2 = q0 / (2.0 * (2.0 * lf + 3.0));
    let c4 = (q0 * c2 + v2) / (4.0 * (2.0 * lf + 5.0));
    let r2 = r * r;
    r.powi(l as i32 + 1) * (1.0 + c2 * r2 + c4 * r2 * r2)
}

/// Integrates `u'' = (ℓ(ℓ+1)/r² + V - k²) u` from the origin to `r_end`
/// with Numerov steps, restarting at every jump of the potential. Returns
/// `(u(r_end), u'(r_end))`.
fn integrate(potential: &Potential, channel: Channel, k: f64, r_end: f64, max_step: f64) -> (f64, f64) {
    let eq = Equation {
        potential,
        centrifugal: channel.centrifugal(),
        k2: k * k,
    };
    let mut edges: Vec<f64> = vec![0.0];
    edges.extend(potential.breakpoints().into_iter().filter(|&b| b > 0.0 && b < r_end));
    edges.push(r_end);

    // Current state: u at r - h (prev) and r (cur) on `piece`.
    let (mut u_prev, mut u_cur, mut r, mut h);
    {
        let len = edges[1] - edges[0];
        let n = ((len / max_step).ceil() as usize).max(4);
        h = len / n as f64;
        let g = h * h / 12.0;
        match channel {
            Channel::Radial { l: 0 } | Channel::Odd => {
                u_prev = 0.0;
                u_cur = h;
                r = h;
            }
            Channel::Radial { l } => {
                u_prev = regular_series(&eq, l, h);
                u_cur = regular_series(&eq, l, 2.0 * h);
                r = 2.0 * h;
            }
            Channel::Even => {
                let (q0, q1) = (eq.q(0.0, 0), eq.q(h, 0));
                u_prev = 1.0;
                u_cur = (1.0 + 5.0 * g * q0) / (1.0 - g * q1);
                r = h;
            }
        }
    }

    let last = edges.len() - 2;
    for piece in 0..=last {
        let end = edges[piece + 1];
        if piece > 0 {
            // Restart on the new piece from (u, u') at the jump.
            let len = end - edges[piece];
            let n = ((len / max_step).ceil() as usize).max(4);
            h = len / n as f64;
        }
        let g = h * h / 12.0;
        let steps = ((end - r) / h).round() as usize;
        let mut q_prev = eq.q(r - h, piece);
        let mut q_cur = eq.q(r, piece);
        for i in 0..=steps {
            // The pass with i == steps reaches one node past `end` with the
            // same smooth piece, for the derivative at `end`.
            let r_next = if i == steps { end + h } else { r + h };
            let q_next = eq.q(r_next, piece);
            let u_next = (2.0 * (1.0 + 5.0 * g * q_cur) * u_cur - (1.0 - g * q_prev) * u_prev) / (1.0 - g * q_next);
            if i == steps {
                let du = ((1.0 - 2.0 * g * q_next) * u_next - (1.0 - 2.0 * g * q_prev) * u_prev) / (2.0 * h);
                if piece == last {
                    return (u_cur, du);
                }
                // Carry (u, u') across the jump and take the first step of
                // the next piece with RK4 substeps.
                let next_len = edges[piece + 2] - end;
                let n = ((next_len / max_step).ceil() as usize).max(4);
                let h_next = next_len / n as f64;
                let sub = h_next / RK_SUBSTEPS as f64;
                let (mut u, mut d) = (u_cur, du);
                for s in 0..RK_SUBSTEPS {
                    (u, d) = eq.rk4(end + s as f64 * sub, sub, u, d, piece + 1);
                }
                u_prev = u_cur;
                u_cur = u;
                r = end + h_next;
                break;
            }
            u_prev = u_cur;
            u_cur = u_next;
            q_prev = q_cur;
            q_cur = q_next;
            r = r_next;
            if u_cur.abs() > RESCALE {
                u_prev /= RESCALE;
                u_cur /= RESCALE;
            }
        }
    }
    unreachable!("the last piece returns")
}

/// Free solution pair `(f, f', g, g')` at `x = k r` for the channel.
fn free_pair(channel: Channel, x: f64) -> (f64, f64, f64, f64) {
    match channel {
        Channel::Radial { l } => riccati(l, x),
        Channel::Even => {
            let (s, c) = x.sin_cos();
            (c, -s, -s, -c)
        }
        Channel::Odd => {
            let (s, c) = x.sin_cos();
            (s, c, c, -s)
        }
    }
}

/// Reduces an angle to `(-π/2, π/2]`.
pub fn principal(delta: f64) -> f64 {
    let mut d = delta % PI;
    if d > FRAC_PI_2 {
        d -= PI;
    } else if d <= -FRAC_PI_2 {
        d += PI;
    }
    d
}

/// Phase shift `δ(k)` of one channel modulo `π`, in `(-π/2, π/2]`.
pub fn phase_shift(potential: &Potential, channel: Channel, k: f64, options: &PhaseOptions) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::DomainCoverage(format!("momentum k = {k} must be positive")));
    }
    potential.validate()?;
    if potential.center != 0.0 {
        return Err(Error::InvalidPotential(
            "phase shifts need a potential centered at the origin".into(),
        ));
    }
    if potential.is_zero() {
        return Ok(0.0);
    }
    let r_m = options.matching_radius.unwrap_or_else(|| default_matching_radius(potential, k));
    let tail = potential.value(r_m).abs() * r_m * r_m;
    if tail >= RANGE_TOL || potential.breakpoints().iter().any(|&b| b >= r_m) {
        return Err(Error::DomainCoverage(format!(
            "matching radius {r_m} lies inside the potential (|V| r² = {tail:e})"
        )));
    }
    let step = options.step.unwrap_or_else(|| default_step(potential, k));
    let (u, du) = integrate(potential, channel, k, r_m, step);
    let (f, fp, g, gp) = free_pair(channel, k * r_m);
    let num = k * u * fp - du * f;
    let den = du * g - k * u * gp;
    if den.abs() < 1e-14 * (num.abs() + den.abs()) {
        return Err(Error::ResonantMatching {
            radius: r_m,
            denominator: den,
        });
    }
    Ok(principal(num.atan2(den)))
}

/// `δ_ℓ(k)` for the radial channel `ℓ`.
pub fn phase_shift_radial(potential: &Potential, l: u32, k: f64, options: &PhaseOptions) -> Result<f64> {
    phase_shift(potential, Channel::Radial { l }, k, options)
}

/// `δ_±(k)` of the even (`true`) or odd (`false`) channel of an even
/// potential on the line.
pub fn phase_shift_1d_parity(potential: &Potential, even: bool, k: f64, options: &PhaseOptions) -> Result<f64> {
    phase_shift(potential, if even { Channel::Even } else { Channel::Odd }, k, options)
}
