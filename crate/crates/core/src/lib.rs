//! Certified decomposition of approximately polynomial functions into
//! quadratic, cubic, and quartic components.
//!
//! The library is organized around a single functional equation whose
//! polynomial solutions are exactly the span of `x^2`, `x^3`, and `x^4`:
//!
//! ```text
//! 3 (f(x+2y) + f(x-2y)) = 12 (f(x+y) + f(x-y)) + 4 f(3y) - 18 f(2y)
//!                         + 36 f(y) - 18 f(x)
//! ```
//!
//! A function that satisfies the equation only approximately, with the
//! residual bounded by an envelope `phi(x, y)`, is still uniformly close
//! to an exact solution, and the distance is an explicit series in `phi`.
//! The crate evaluates the residual operators ([`diffops`]), splits inputs
//! into even and odd parts, runs the constructive component extractions
//! ([`decompose`], [`stability`]), and certifies the result with truncated
//! series plus geometric tail majorants ([`bounds`]).
//!
//! Quick tour:
//!
//! ```
//! use stabilis_core::envelope::PerturbationBound;
//! use stabilis_core::config::ExtractionConfig;
//! use stabilis_core::function::FunctionHandle;
//! use stabilis_core::stability::extract_all;
//!
//! let f = FunctionHandle::poly1(2.0, -1.0, 0.5).unwrap();
//! let phi = PerturbationBound::constant(0.0).unwrap();
//! let report = extract_all(&f, &phi, &ExtractionConfig::default()).unwrap();
//! let (a, b, c) = report.diagonal_coefficients_1d().unwrap();
//! assert!((a - 2.0).abs() < 1e-8 && (b + 1.0).abs() < 1e-8 && (c - 0.5).abs() < 1e-8);
//! ```

pub mod bounds;
pub mod canonical;
pub mod config;
pub mod decompose;
pub mod diffops;
pub mod envelope;
pub mod error;
pub mod forms;
pub mod function;
pub mod harness;
mod par;
pub mod space;
pub mod stability;

pub use config::{Direction, DirectionChoice, ExtractionConfig};
pub use envelope::{GrowthClass, PerturbationBound};
pub use error::{Error, Result};
pub use function::{FunctionHandle, FunctionSpec};
pub use space::{norm, NormSpec, Point, Value};
pub use stability::{extract_all, ComponentKind, DecompositionReport};
