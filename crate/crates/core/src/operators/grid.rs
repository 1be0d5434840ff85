use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    /// Symmetric interval `[-L, L]` with Dirichlet walls.
    Line,
    /// Half-line `[0, L]` for one partial-wave channel, Dirichlet at both ends.
    Radial { angular_momentum: u32 },
}

/// Uniform interior nodes of a Dirichlet box.
///
/// For a line grid the nodes are `x_i = -L + i h` and for a radial grid
/// `r_i = i h`, with `i = 1..=N` and `h = (box length) / (N + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    kind: GridKind,
    half_width: f64,
    points: usize,
}

impl Grid {
    pub fn line(half_width: f64, points: usize) -> Result<Self> {
        Self::new(GridKind::Line, half_width, points)
    }

    /// Radial channel grid; `radius` is the position of the outer wall.
    pub fn radial(radius: f64, points: usize, angular_momentum: u32) -> Result<Self> {
        Self::new(GridKind::Radial { angular_momentum }, radius, points)
    }

    pub fn new(kind: GridKind, half_width: f64, points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half width must be positive and finite, got {half_width}"
            )));
        }
        if points < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 interior points, got {points}"
            )));
        }
        Ok(Self {
            kind,
            half_width,
            points,
        })
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn angular_momentum(&self) -> Option<u32> {
        match self.kind {
            GridKind::Line => None,
            GridKind::Radial { angular_momentum } => Some(angular_momentum),
        }
    }

    /// Length of the Dirichlet box: `2L` on a line, `L` on a half-line.
    pub fn box_length(&self) -> f64 {
        match self.kind {
            GridKind::Line => 2.0 * self.half_width,
            GridKind::Radial { .. } => self.half_width,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.box_length() / (self.points + 1) as f64
    }

    /// Coordinate of node `i` (zero based).
    pub fn node(&self, i: usize) -> f64 {
        let h = self.spacing();
        let step = (i + 1) as f64 * h;
        match self.kind {
            GridKind::Line => -self.half_width + step,
            GridKind::Radial { .. } => step,
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.node(i)).collect()
    }

    /// Mean spacing of free-box eigenvalues near energy `energy`,
    /// `2π sqrt(λ) / (box length)`.
    pub fn level_spacing(&self, energy: f64) -> f64 {
        2.0 * PI * energy.max(0.0).sqrt() / self.box_length()
    }

    /// Same box, different number of interior points.
    pub fn with_points(&self, points: usize) -> Result<Self> {
        Self::new(self.kind, self.half_width, points)
    }

    /// Same spacing, box scaled by `factor`.
    pub fn scaled_box(&self, factor: f64) -> Result<Self> {
        let n = ((self.points + 1) as f64 * factor).round() as usize - 1;
        Self::new(self.kind, self.half_width * factor, n)
    }

    pub fn with_angular_momentum(&self, angular_momentum: u32) -> Result<Self> {
        match self.kind {
            GridKind::Radial { .. } => Self::radial(self.half_width, self.points, angular_momentum),
            GridKind::Line => Err(Error::InvalidGrid(
                "angular momentum only applies to radial grids".into(),
            )),
        }
    }
}
