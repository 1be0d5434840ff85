use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::japanese;
use crate::error::{Error, Result};

/// Radial profile of a potential. Depths are signed: negative is attractive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Zero,
    /// `V₀ exp(-r²/a²)`.
    Gaussian { depth: f64, range: f64 },
    /// `V₀` for `r < a`, `V₀/2` at `r = a`, zero outside.
    SquareWell { depth: f64, range: f64 },
    /// `V₀ exp(1 - 1/(1 - (r/a)²))` inside `r < a`; smooth with compact support.
    SmoothBump { depth: f64, range: f64 },
    /// `V₀ ⟨r⟩^{-p}`; only used to exercise decay certification.
    PowerLaw { depth: f64, exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayCertificate {
    pub alpha: f64,
    pub constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub shape: Shape,
    #[serde(default)]
    pub center: f64,
    #[serde(default)]
    pub decay: Option<DecayCertificate>,
}

impl Potential {
    pub fn new(shape: Shape) -> Self {
        Self {
            shape,
            center: 0.0,
            decay: None,
        }
    }

    pub fn zero() -> Self {
        Self::new(Shape::Zero)
    }

    pub fn gaussian(depth: f64, range: f64) -> Self {
        Self::new(Shape::Gaussian { depth, range })
    }

    pub fn square_well(depth: f64, range: f64) -> Self {
        Self::new(Shape::SquareWell { depth, range })
    }

    pub fn smooth_bump(depth: f64, range: f64) -> Self {
        Self::new(Shape::SmoothBump { depth, range })
    }

    pub fn power_law(depth: f64, exponent: f64) -> Self {
        Self::new(Shape::PowerLaw { depth, exponent })
    }

    pub fn with_center(mut self, center: f64) -> Self {
        self.center = center;
        self
    }

    pub fn with_certificate(mut self, certificate: DecayCertificate) -> Self {
        self.decay = Some(certificate);
        self
    }

    pub fn is_zero(&self) -> bool {
        match self.shape {
            Shape::Zero => true,
            Shape::Gaussian { depth, .. }
            | Shape::SquareWell { depth, .. }
            | Shape::SmoothBump { depth, .. }
            | Shape::PowerLaw { depth, .. } => depth == 0.0,
        }
    }

    /// Even about the origin, which is what the parity decomposition needs.
    pub fn is_even(&self) -> bool {
        self.center == 0.0 || self.is_zero()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidPotential(msg.to_string()));
        if !self.center.is_finite() {
            return bad("center must be finite");
        }
        match self.shape {
            Shape::Zero => Ok(()),
            Shape::Gaussian { depth, range }
            | Shape::SquareWell { depth, range }
            | Shape::SmoothBump { depth, range } => {
                if !depth.is_finite() {
                    bad("depth must be finite")
                } else if !(range.is_finite() && range > 0.0) {
                    bad("range must be positive")
                } else {
                    Ok(())
                }
            }
            Shape::PowerLaw { depth, exponent } => {
                if !depth.is_finite() || !exponent.is_finite() || exponent <= 0.0 {
                    bad("power law needs finite depth and positive exponent")
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Potential at coordinate `x` (a line coordinate or a radius).
    pub fn value(&self, x: f64) -> f64 {
        profile(self.shape, (x - self.center).abs(), None)
    }

    /// Radii (distance from the center) where the potential jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.shape {
            Shape::SquareWell { depth, range } if depth != 0.0 => vec![range],
            _ => Vec::new(),
        }
    }

    /// Smooth continuation of the piece of the potential that lives on the
    /// `piece`-th interval between breakpoints, evaluated at radius `r`.
    pub fn value_in_piece(&self, r: f64, piece: usize) -> f64 {
        profile(self.shape, r.abs(), Some(piece))
    }

    pub fn max_abs(&self) -> f64 {
        match self.shape {
            Shape::Zero => 0.0,
            Shape::Gaussian { depth, .. }
            | Shape::SquareWell { depth, .. }
            | Shape::SmoothBump { depth, .. }
            | Shape::PowerLaw { depth, .. } => depth.abs(),
        }
    }

    /// Length scale of the potential, used for partial-wave truncation.
    pub fn length_scale(&self) -> f64 {
        match self.shape {
            Shape::Zero => 0.0,
            Shape::Gaussian { range, .. }
            | Shape::SquareWell { range, .. }
            | Shape::SmoothBump { range, .. } => range,
            Shape::PowerLaw { .. } => 1.0,
        }
    }

    /// Smallest radius beyond which `|V(r)| r² < tol` for every larger radius.
    pub fn effective_radius(&self, tol: f64) -> f64 {
        match self.shape {
            Shape::Zero => 0.0,
            Shape::SquareWell { range, .. } | Shape::SmoothBump { range, .. } => {
                if self.is_zero() {
                    0.0
                } else {
                    range
                }
            }
            Shape::Gaussian { .. } | Shape::PowerLaw { .. } => {
                if self.is_zero() {
                    return 0.0;
                }
                // r² V(r) is eventually decreasing; march out then bisect.
                let f = |r: f64| profile(self.shape, r, None).abs() * r * r;
                let mut hi = self.length_scale().max(1.0);
                let mut guard = 0;
                while f(hi) >= tol || f(2.0 * hi) >= tol {
                    hi *= 2.0;
                    guard += 1;
                    if guard > 60 {
                        return f64::INFINITY;
                    }
                }
                let mut lo = 0.0;
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid) >= tol {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
        }
    }
}

fn profile(shape: Shape, r: f64, piece: Option<usize>) -> f64 {
    match shape {
        Shape::Zero => 0.0,
        Shape::Gaussian { depth, range } => depth * (-(r / range).powi(2)).exp(),
        Shape::SquareWell { depth, range } => match piece {
            Some(0) => depth,
            Some(_) => 0.0,
            None => {
                if r < range {
                    depth
                } else if r == range {
                    0.5 * depth
                } else {
                    0.0
                }
            }
        },
        Shape::SmoothBump { depth, range } => {
            let s = r / range;
            if s >= 1.0 {
                0.0
            } else {
                depth * (1.0 - 1.0 / (1.0 - s * s)).exp()
            }
        }
        Shape::PowerLaw { depth, exponent } => depth * japanese(r).powf(-exponent),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    /// `sup |V(x)| ⟨x⟩^α` over the samples.
    pub c_fit: f64,
    pub pass: bool,
    /// Same supremum restricted to the inner half of the sampling range.
    pub c_inner: f64,
    pub sample_range: f64,
}

/// Sampled check of `|V(x)| ≤ C ⟨x⟩^{-α}` with `α > n + 3`.
///
/// Samples mix a uniform lattice and seeded uniform draws on `[0, X]`. The
/// certificate passes when the supremum over `[0, X]` is already attained on
/// `[0, X/2]`: a bound that keeps growing with the sampling range has no
/// finite constant.
pub fn certify_decay(
    potential: &Potential,
    alpha: f64,
    dimension: usize,
    sample_count: usize,
    seed: u64,
) -> Result<DecayReport> {
    let needed = dimension as f64 + 3.0;
    if !(alpha > needed) {
        return Err(Error::CertificateRejected(format!(
            "alpha = {alpha} must exceed n + 3 = {needed}"
        )));
    }
    if sample_count < 1000 {
        return Err(Error::CertificateRejected(format!(
            "need at least 1000 samples, got {sample_count}"
        )));
    }
    potential.validate()?;

    let range = 20.0 * potential.length_scale().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lattice = sample_count / 2;
    let mut c_fit: f64 = 0.0;
    let mut c_inner: f64 = 0.0;
    let mut record = |r: f64| {
        let weighted = potential.value(potential.center + r).abs() * japanese(r).powf(alpha);
        c_fit = c_fit.max(weighted);
        if r <= 0.5 * range {
            c_inner = c_inner.max(weighted);
        }
    };
    for i in 0..lattice {
        record(range * i as f64 / (lattice - 1) as f64);
    }
    for _ in lattice..sample_count {
        record(rng.gen_range(0.0..=range));
    }

    let pass = c_fit.is_finite() && c_fit <= c_inner * (1.0 + 1e-9) + f64::MIN_POSITIVE;
    Ok(DecayReport {
        c_fit,
        pass,
        c_inner,
        sample_range: range,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_well_is_half_depth_on_edge() {
        let v = Potential::square_well(-2.0, 1.0);
        assert_eq!(v.value(0.999), -2.0);
        assert_eq!(v.value(1.0), -1.0);
        assert_eq!(v.value(-1.0), -1.0);
        assert_eq!(v.value(1.001), 0.0);
        assert_eq!(v.breakpoints(), vec![1.0]);
        assert_eq!(v.value_in_piece(1.5, 0), -2.0);
        assert_eq!(v.value_in_piece(0.5, 1), 0.0);
    }

    #[test]
    fn bump_is_compact() {
        let v = Potential::smooth_bump(-3.0, 2.0);
        assert_eq!(v.value(0.0), -3.0);
        assert_eq!(v.value(2.0), 0.0);
        assert!(v.value(1.99).abs() < 1e-10);
    }

    #[test]
    fn zero_potential_certifies_with_zero_constant() {
        let r = certify_decay(&Potential::zero(), 7.0, 3, 2000, 1).unwrap();
        assert_eq!(r.c_fit, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn gaussian_certifies() {
        let v = Potential::gaussian(-1.0, 1.0);
        let r = certify_decay(&v, 7.0, 3, 4000, 7).unwrap();
        assert!(r.pass);
        // Independent oracle: dense scan of |V| ⟨x⟩^7 on |x| ≤ 20.
        let oracle = (0..=200_000)
            .map(|i| {
                let x = 20.0 * i as f64 / 200_000.0;
                (-x * x).exp() * (1.0 + x * x).powf(3.5)
            })
            .fold(0.0, f64::max);
        assert!((r.c_fit - oracle).abs() / oracle < 1e-3);
    }

    #[test]
    fn slow_power_law_fails() {
        let v = Potential::power_law(1.0, 4.0);
        let r = certify_decay(&v, 7.0, 3, 4000, 7).unwrap();
        assert!(!r.pass);
        // |V| ⟨x⟩^7 = ⟨x⟩^3 grows like range³.
        let expected = (1.0f64 + 400.0).powf(1.5);
        assert!((r.c_fit - expected).abs() / expected < 1e-9);
        assert!(r.c_fit > 7.0 * r.c_inner);
    }

    #[test]
    fn rejects_weak_alpha() {
        let v = Potential::gaussian(-1.0, 1.0);
        assert!(matches!(
            certify_decay(&v, 6.0, 3, 2000, 0),
            Err(Error::CertificateRejected(_))
        ));
        assert!(matches!(
            certify_decay(&v, 7.0, 3, 10, 0),
            Err(Error::CertificateRejected(_))
        ));
    }

    #[test]
    fn effective_radius_of_gaussian() {
        let v = Potential::gaussian(-1.0, 1.0);
        let r = v.effective_radius(1e-10);
        assert!((r * r * (-r * r).exp() - 1e-10).abs() < 1e-14);
        assert!(r > 4.0 && r < 6.0);
    }
}
