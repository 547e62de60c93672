//! Points of the domain space, values of the target space, and the two
//! supported norms.
//!
//! Both spaces are finite-dimensional real vector spaces; coordinates are
//! always finite `f64`s, enforced at construction. The dimension is fixed
//! per session and mixing dimensions is an error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_coords(coords: &[f64], context: &'static str) -> Result<()> {
    if coords.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{context} needs at least one coordinate"
        )));
    }
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite { context });
    }
    Ok(())
}

/// A point of the domain space X.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

/// A value of the target space Y.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Value {
    coords: Vec<f64>,
}

macro_rules! vector_impl {
    ($name:ident, $label:literal) => {
        impl $name {
            pub fn new(coords: Vec<f64>) -> Result<Self> {
                check_coords(&coords, $label)?;
                Ok(Self { coords })
            }

            /// One-dimensional convenience constructor.
            pub fn scalar(x: f64) -> Result<Self> {
                Self::new(vec![x])
            }

            pub fn zero(dim: usize) -> Self {
                Self {
                    coords: vec![0.0; dim.max(1)],
                }
            }

            pub fn dim(&self) -> usize {
                self.coords.len()
            }

            pub fn coords(&self) -> &[f64] {
                &self.coords
            }

            /// Coordinate of a one-dimensional vector.
            pub fn as_scalar(&self) -> Result<f64> {
                if self.coords.len() != 1 {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        actual: self.coords.len(),
                    });
                }
                Ok(self.coords[0])
            }

            pub fn scaled(&self, k: f64) -> Result<Self> {
                Self::new(self.coords.iter().map(|c| c * k).collect())
            }

            pub fn negated(&self) -> Self {
                Self {
                    coords: self.coords.iter().map(|c| -c).collect(),
                }
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                if self.dim() != other.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim(),
                        actual: other.dim(),
                    });
                }
                Self::new(
                    self.coords
                        .iter()
                        .zip(&other.coords)
                        .map(|(a, b)| a + b)
                        .collect(),
                )
            }

            pub fn sub(&self, other: &Self) -> Result<Self> {
                if self.dim() != other.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim(),
                        actual: other.dim(),
                    });
                }
                Self::new(
                    self.coords
                        .iter()
                        .zip(&other.coords)
                        .map(|(a, b)| a - b)
                        .collect(),
                )
            }

            /// Weighted sum of several vectors of equal dimension.
            pub fn linear_combination(terms: &[(f64, &Self)]) -> Result<Self> {
                let dim = terms
                    .first()
                    .map(|(_, v)| v.dim())
                    .ok_or_else(|| Error::InvalidInput("empty linear combination".into()))?;
                let mut acc = vec![0.0; dim];
                for (coeff, v) in terms {
                    if v.dim() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            actual: v.dim(),
                        });
                    }
                    for (a, c) in acc.iter_mut().zip(v.coords()) {
                        *a += coeff * c;
                    }
                }
                Self::new(acc)
            }
        }
    };
}

vector_impl!(Point, "Point");
vector_impl!(Value, "Value");

/// Which norm the target space carries. The theory allows any norm; the
/// artifact exposes two and treats the choice as configuration. Defaults to
/// max-coordinate so certified bounds read coordinatewise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NormSpec {
    #[default]
    #[serde(rename = "max-coordinate")]
    MaxCoordinate,
    #[serde(rename = "euclidean")]
    Euclidean,
}

impl NormSpec {
    /// Applies the norm to a raw coordinate slice.
    pub fn apply(&self, coords: &[f64]) -> f64 {
        match self {
            NormSpec::MaxCoordinate => coords.iter().fold(0.0, |m, c| m.max(c.abs())),
            NormSpec::Euclidean => coords.iter().map(|c| c * c).sum::<f64>().sqrt(),
        }
    }
}

impl std::fmt::Display for NormSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormSpec::MaxCoordinate => write!(f, "max-coordinate"),
            NormSpec::Euclidean => write!(f, "euclidean"),
        }
    }
}

/// Norm of a target-space value.
pub fn norm(v: &Value, spec: NormSpec) -> Result<f64> {
    check_coords(v.coords(), "norm input")?;
    Ok(spec.apply(v.coords()))
}

/// Norm of a domain-space point (used by power-type envelopes).
pub fn point_norm(p: &Point, spec: NormSpec) -> f64 {
    spec.apply(p.coords())
}
