//! Extraction configuration: scaling direction, stopping rule, norm choice,
//! and the probe grid the extractors evaluate on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::Point;

/// Scaling direction of the stability iteration. Contraction evaluates
/// `f(x / 2^n)`, dilation evaluates `f(2^n x)`. Which direction converges
/// depends on the growth of the perturbation envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Contraction,
    Dilation,
}

impl Direction {
    /// Signed exponent convention: contraction is `s = 1` (arguments
    /// `x / 2^n`), dilation is `s = -1` (arguments `2^n x`).
    pub fn sign(&self) -> i32 {
        match self {
            Direction::Contraction => 1,
            Direction::Dilation => -1,
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::Contraction => write!(f, "contraction"),
            Direction::Dilation => write!(f, "dilation"),
        }
    }
}

/// Direction choice in a configuration: fixed, or selected per component
/// from the envelope's growth class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DirectionChoice {
    #[default]
    Auto,
    Fixed(Direction),
}

/// Knobs for the component extractors.
#[derive(Debug, Clone)]
pub struct ExtractionConfig {
    pub direction: DirectionChoice,
    /// Hard cap on the iteration index (default 40).
    pub max_iterations: usize,
    /// Stopping tolerance on the max probe-point delta between successive
    /// iterates. Choose it at or above the noise scale of the input; the
    /// certified bound never depends on it.
    pub tolerance: f64,
    pub norm: crate::space::NormSpec,
    /// Largest admissible argument norm in dilation mode, checked before
    /// polynomial evaluators can overflow (default 1e12).
    pub argument_cap: f64,
    /// Half-width of the probe grid (default 2.0).
    pub probe_radius: f64,
    /// Probe points per axis (default 41, so the grid contains 0).
    pub probe_points: usize,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            direction: DirectionChoice::Auto,
            max_iterations: 40,
            tolerance: 1e-9,
            norm: crate::space::NormSpec::MaxCoordinate,
            argument_cap: 1e12,
            probe_radius: 2.0,
            probe_points: 41,
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(Error::InvalidInput("max_iterations must be >= 1".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidInput("tolerance must be positive".into()));
        }
        if !(self.argument_cap.is_finite() && self.argument_cap > 0.0) {
            return Err(Error::InvalidInput("argument_cap must be positive".into()));
        }
        if !(self.probe_radius.is_finite() && self.probe_radius > 0.0) {
            return Err(Error::InvalidInput("probe_radius must be positive".into()));
        }
        if self.probe_points < 2 {
            return Err(Error::InvalidInput("probe_points must be >= 2".into()));
        }
        Ok(())
    }
}

/// Equispaced grid on `[-radius, radius]^dim`, `points` per axis. With an
/// odd point count the grid contains the origin exactly.
pub fn probe_grid(dim: usize, radius: f64, points: usize) -> Vec<Point> {
    let axis: Vec<f64> = (0..points)
        .map(|i| -radius + 2.0 * radius * i as f64 / (points - 1) as f64)
        .collect();
    let mut out = Vec::with_capacity(axis.len().pow(dim as u32));
    let mut idx = vec![0usize; dim];
    loop {
        let coords: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
        out.push(Point::new(coords).expect("grid coordinates are finite"));
        let mut k = 0;
        loop {
            if k == dim {
                return out;
            }
            idx[k] += 1;
            if idx[k] < axis.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
