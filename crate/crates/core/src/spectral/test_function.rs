use serde::{Deserialize, Serialize};

/// Smooth test functions `f` for the trace identity, with closed-form
/// derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunction {
    /// `exp(-(λ-c)²/(2σ²))`.
    Gaussian { center: f64, width: f64 },
    /// `exp(-tλ)`.
    HeatKernel { time: f64 },
    /// `exp(1 - 1/(1 - s²))`, `s = (λ-c)/w`, supported on `|λ-c| < w`.
    Bump { center: f64, half_width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

impl TestFunction {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            TestFunction::Gaussian { center, width } => {
                (-(x - center).powi(2) / (2.0 * width * width)).exp()
            }
            TestFunction::HeatKernel { time } => (-time * x).exp(),
            TestFunction::Bump { center, half_width } => {
                let s = (x - center) / half_width;
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - s * s)).exp()
                }
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            TestFunction::Gaussian { center, width } => {
                -(x - center) / (width * width) * self.value(x)
            }
            TestFunction::HeatKernel { time } => -time * self.value(x),
            TestFunction::Bump { center, half_width } => {
                let s = (x - center) / half_width;
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    let q = 1.0 - s * s;
                    -2.0 * s / (q * q) / half_width * self.value(x)
                }
            }
        }
    }

    /// Width over which `f'` varies; grids must resolve it with ≥ 20 samples.
    pub fn scale(&self) -> f64 {
        match *self {
            TestFunction::Gaussian { width, .. } => width,
            TestFunction::HeatKernel { time } => 1.0 / time,
            // f' of the bump turns over within a tenth of the support near its edges.
            TestFunction::Bump { half_width, .. } => half_width / 10.0,
        }
    }

    /// `sup |f'(y)|` over `y` beyond `x` on the given side.
    pub fn derivative_tail(&self, x: f64, side: Side) -> f64 {
        match *self {
            TestFunction::Gaussian { center, width } => {
                let outward = match side {
                    Side::Above => x - center,
                    Side::Below => center - x,
                };
                if outward >= width {
                    self.derivative(x).abs()
                } else {
                    (-0.5f64).exp() / width
                }
            }
            TestFunction::HeatKernel { time } => match side {
                Side::Above => time * (-time * x).exp(),
                Side::Below => f64::INFINITY,
            },
            TestFunction::Bump { center, half_width } => {
                let outside = match side {
                    Side::Above => x >= center + half_width,
                    Side::Below => x <= center - half_width,
                };
                if outside {
                    0.0
                } else {
                    // Peak of |f'| for the bump, attained inside the support.
                    self.max_abs_derivative()
                }
            }
        }
    }

    fn max_abs_derivative(&self) -> f64 {
        match *self {
            TestFunction::Gaussian { width, .. } => (-0.5f64).exp() / width,
            TestFunction::HeatKernel { .. } => f64::INFINITY,
            TestFunction::Bump { center, half_width } => (1..2000)
                .map(|i| self.derivative(center + half_width * i as f64 / 2000.0).abs())
                .fold(0.0, f64::max),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_derivative(f: TestFunction, xs: &[f64]) {
        for &x in xs {
            let h = 1e-5;
            let fd = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
            assert!((fd - f.derivative(x)).abs() < 1e-7, "{f:?} at {x}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        check_derivative(TestFunction::HeatKernel { time: 0.5 }, &[-1.0, 0.0, 2.0]);
        check_derivative(TestFunction::Gaussian { center: 1.0, width: 0.3 }, &[0.5, 1.0, 1.4]);
        check_derivative(TestFunction::Bump { center: 1.0, half_width: 2.0 }, &[-0.5, 1.0, 2.5]);
    }

    #[test]
    fn bump_tail_is_zero_outside_support() {
        let f = TestFunction::Bump { center: 0.0, half_width: 1.0 };
        assert_eq!(f.derivative_tail(1.0, Side::Above), 0.0);
        assert_eq!(f.derivative_tail(-1.0, Side::Below), 0.0);
        assert!(f.derivative_tail(0.5, Side::Above) > 0.0);
    }
}
