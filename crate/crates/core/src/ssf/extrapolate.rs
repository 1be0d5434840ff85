use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Limit of a sequence sampled at decreasing smoothing heights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub value: f64,
    /// Spread between the two highest-order extrapolants.
    pub spread: f64,
    pub degree: usize,
}

/// Neville value at `x = 0` of the polynomial through `(xs[i], ys[i])`.
fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i]);
        }
    }
    p[0]
}

/// Polynomial extrapolation of `ys(η)` to `η = 0` of degree
/// `min(2, n - 1)` through the smallest heights; the error estimate is the
/// difference to the next lower degree.
pub fn extrapolate_to_zero(etas: &[f64], values: &[f64]) -> Result<Extrapolation> {
    let n = etas.len();
    if n == 0 || n != values.len() {
        return Err(Error::ExtrapolationUnreliable(format!(
            "need matching nonempty η and value columns (got {} and {})",
            n,
            values.len()
        )));
    }
    if etas.iter().any(|&e| !(e > 0.0) || !e.is_finite()) || etas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::ExtrapolationUnreliable(
            "η schedule must be positive and strictly decreasing".into(),
        ));
    }
    let degree = 2.min(n - 1);
    let take = degree + 1;
    let value = neville_at_zero(&etas[n - take..], &values[n - take..]);
    let spread = if degree == 0 {
        0.0
    } else {
        let lower = neville_at_zero(&etas[n - degree..], &values[n - degree..]);
        (value - lower).abs()
    };
    Ok(Extrapolation { value, spread, degree })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_data_is_recovered() {
        let etas = [0.4, 0.2, 0.1];
        let vals: Vec<f64> = etas.iter().map(|e| 3.0 - 2.0 * e + 5.0 * e * e).collect();
        let x = extrapolate_to_zero(&etas, &vals).unwrap();
        assert!((x.value - 3.0).abs() < 1e-13);
        assert_eq!(x.degree, 2);
    }

    #[test]
    fn uses_the_smallest_heights() {
        let etas = [10.0, 0.4, 0.2, 0.1];
        let mut vals: Vec<f64> = etas.iter().map(|e| 1.0 + e).collect();
        vals[0] = 1e6;
        let x = extrapolate_to_zero(&etas, &vals).unwrap();
        assert!((x.value - 1.0).abs() < 1e-12);
        assert!(x.spread < 1e-12);
    }

    #[test]
    fn single_point_has_zero_spread() {
        let x = extrapolate_to_zero(&[0.1], &[2.0]).unwrap();
        assert_eq!((x.value, x.spread, x.degree), (2.0, 0.0, 0));
    }

    #[test]
    fn rejects_increasing_schedule() {
        assert!(extrapolate_to_zero(&[0.1, 0.2], &[0.0, 0.0]).is_err());
    }
}
