//! The perturbation envelope: a nonnegative bound on the residual of the
//! mixed difference operator, evaluated pointwise on pairs of domain points.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::{point_norm, NormSpec, Point};

/// Declared growth of a custom envelope. Direction selection has to decide
/// which scaling direction keeps the bound series summable, so envelopes
/// that are not built from a closed form must state their growth class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthClass {
    /// Bounded above by a constant.
    Bounded,
    /// Grows like `theta * (|x|^p + |y|^p)`.
    Power(f64),
}

type EnvelopeFn = Arc<dyn Fn(&Point, &Point) -> f64 + Send + Sync>;

/// The envelope `phi(x, y) >= ||D_f(x, y)||`.
#[derive(Clone)]
pub enum PerturbationBound {
    /// `phi = epsilon` everywhere.
    Constant(f64),
    /// `phi(x, y) = theta * (|x|^p + |y|^p)`.
    Power { theta: f64, p: f64 },
    /// User-supplied evaluator with a declared growth class.
    Custom {
        evaluator: EnvelopeFn,
        growth: GrowthClass,
    },
}

impl PerturbationBound {
    pub fn constant(epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::InvalidEnvelope { value: epsilon });
        }
        Ok(PerturbationBound::Constant(epsilon))
    }

    pub fn power(theta: f64, p: f64) -> Result<Self> {
        if !theta.is_finite() || theta < 0.0 {
            return Err(Error::InvalidEnvelope { value: theta });
        }
        if !p.is_finite() {
            return Err(Error::InvalidEnvelope { value: p });
        }
        Ok(PerturbationBound::Power { theta, p })
    }

    pub fn custom<F>(evaluator: F, growth: GrowthClass) -> Self
    where
        F: Fn(&Point, &Point) -> f64 + Send + Sync + 'static,
    {
        PerturbationBound::Custom {
            evaluator: Arc::new(evaluator),
            growth,
        }
    }

    pub fn growth_class(&self) -> GrowthClass {
        match self {
            PerturbationBound::Constant(_) => GrowthClass::Bounded,
            PerturbationBound::Power { p, .. } => GrowthClass::Power(*p),
            PerturbationBound::Custom { growth, .. } => *growth,
        }
    }

    /// Envelope valid for the even and odd parts of a function whose own
    /// residual is bounded by `self`: the average of the envelope at
    /// `(x, y)` and `(-x, -y)`. Constant and power envelopes are already
    /// symmetric under negation.
    pub fn symmetrized(&self) -> PerturbationBound {
        match self {
            PerturbationBound::Custom { evaluator, growth } => {
                let inner = Arc::clone(evaluator);
                PerturbationBound::Custom {
                    evaluator: Arc::new(move |x: &Point, y: &Point| {
                        0.5 * (inner(x, y) + inner(&x.negated(), &y.negated()))
                    }),
                    growth: *growth,
                }
            }
            other => other.clone(),
        }
    }
}

impl std::fmt::Display for PerturbationBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PerturbationBound::Constant(eps) => write!(f, "constant:{eps}"),
            PerturbationBound::Power { theta, p } => write!(f, "power:{theta},{p}"),
            PerturbationBound::Custom { growth, .. } => match growth {
                GrowthClass::Bounded => write!(f, "custom(bounded)"),
                GrowthClass::Power(p) => write!(f, "custom(power:{p})"),
            },
        }
    }
}

/// Evaluates the envelope at a pair of points. The result is always a
/// finite nonnegative real; anything else is an error.
pub fn phi_eval(bound: &PerturbationBound, x: &Point, y: &Point, norm: NormSpec) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            actual: y.dim(),
        });
    }
    let value = match bound {
        PerturbationBound::Constant(eps) => *eps,
        PerturbationBound::Power { theta, p } => {
            theta * (point_norm(x, norm).powf(*p) + point_norm(y, norm).powf(*p))
        }
        PerturbationBound::Custom { evaluator, .. } => evaluator(x, y),
    };
    if !value.is_finite() || value < 0.0 {
        return Err(Error::InvalidEnvelope { value });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64) -> Point {
        Point::scalar(x).unwrap()
    }

    #[test]
    fn constant_ignores_arguments() {
        let phi = PerturbationBound::constant(0.5).unwrap();
        let v = phi_eval(&phi, &pt(3.0), &pt(-7.0), NormSpec::MaxCoordinate).unwrap();
        assert_eq!(v, 0.5);
    }

    #[test]
    fn power_envelope_matches_closed_form() {
        let phi = PerturbationBound::power(1.0, 2.0).unwrap();
        let v = phi_eval(&phi, &pt(1.0), &pt(2.0), NormSpec::Euclidean).unwrap();
        assert_eq!(v, 5.0);
    }

    #[test]
    fn power_zero_exponent_is_twice_theta() {
        let phi = PerturbationBound::power(2.0, 0.0).unwrap();
        let v = phi_eval(&phi, &pt(7.0), &pt(9.0), NormSpec::MaxCoordinate).unwrap();
        assert_eq!(v, 4.0);
    }

    #[test]
    fn negative_custom_envelope_rejected() {
        let phi = PerturbationBound::custom(|_, _| -1.0, GrowthClass::Bounded);
        assert!(matches!(
            phi_eval(&phi, &pt(0.0), &pt(0.0), NormSpec::MaxCoordinate),
            Err(Error::InvalidEnvelope { .. })
        ));
    }

    #[test]
    fn negative_parameters_rejected() {
        assert!(PerturbationBound::constant(-0.1).is_err());
        assert!(PerturbationBound::power(-1.0, 2.0).is_err());
    }

    #[test]
    fn symmetrized_custom_averages_reflections() {
        let phi = PerturbationBound::custom(
            |x: &Point, _: &Point| (x.coords()[0] + 1.0).abs(),
            GrowthClass::Power(1.0),
        );
        let sym = phi.symmetrized();
        let a = phi_eval(&sym, &pt(2.0), &pt(0.0), NormSpec::MaxCoordinate).unwrap();
        // (|2+1| + |-2+1|) / 2 = 2
        assert_eq!(a, 2.0);
    }
}
