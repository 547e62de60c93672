//! Difference operators for the quadratic, cubic, quartic, and mixed
//! functional equations, the even/odd split, and the residual-identity
//! suite used as property tests.
//!
//! Every operator is a signed combination `sum_k c_k f(a_k x + b_k y)`.
//! The residual of an exact solution vanishes; floating point leaves a
//! remainder proportional to the largest intermediate term, so residuals
//! are reported against the scale `1 + max_k |c_k| * |f(a_k x + b_k y)|`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::FunctionHandle;
use crate::par;
use crate::space::{NormSpec, Point, Value};

/// One weighted evaluation `coeff * f(cx * x + cy * y)`.
type Term = (f64, f64, f64);

/// Residual of the quadratic equation
/// `f(x+y) + f(x-y) = 2 f(x) + 2 f(y)`.
const QUADRATIC_TERMS: &[Term] = &[
    (1.0, 1.0, 1.0),
    (1.0, 1.0, -1.0),
    (-2.0, 1.0, 0.0),
    (-2.0, 0.0, 1.0),
];

/// Residual of the cubic equation
/// `f(2x+y) + f(2x-y) = 2 f(x+y) + 2 f(x-y) + 12 f(x)`.
const CUBIC_TERMS: &[Term] = &[
    (1.0, 2.0, 1.0),
    (1.0, 2.0, -1.0),
    (-2.0, 1.0, 1.0),
    (-2.0, 1.0, -1.0),
    (-12.0, 1.0, 0.0),
];

/// Residual of the quartic equation
/// `f(2x+y) + f(2x-y) = 4 (f(x+y) + f(x-y)) + 24 f(x) - 6 f(y)`.
const QUARTIC_TERMS: &[Term] = &[
    (1.0, 2.0, 1.0),
    (1.0, 2.0, -1.0),
    (-4.0, 1.0, 1.0),
    (-4.0, 1.0, -1.0),
    (-24.0, 1.0, 0.0),
    (6.0, 0.0, 1.0),
];

/// The mixed difference operator
/// `D_f(x,y) = 3[f(x+2y) + f(x-2y)] - 12[f(x+y) + f(x-y)]
///             - 4 f(3y) + 18 f(2y) - 36 f(y) + 18 f(x)`,
/// whose kernel over polynomials is spanned by `x^2`, `x^3`, `x^4`.
const MIXED_TERMS: &[Term] = &[
    (3.0, 1.0, 2.0),
    (3.0, 1.0, -2.0),
    (-12.0, 1.0, 1.0),
    (-12.0, 1.0, -1.0),
    (-4.0, 0.0, 3.0),
    (18.0, 0.0, 2.0),
    (-36.0, 0.0, 1.0),
    (18.0, 1.0, 0.0),
];

/// Sum of the absolute operator coefficients of the mixed operator
/// (3+3+12+12+4+18+36+18). A pointwise perturbation bounded by `eps`
/// yields a mixed residual bounded by this constant times `eps`.
pub const MIXED_COEFFICIENT_SUM: f64 = 106.0;

/// Which functional equation a residual refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationKind {
    Quadratic,
    Cubic,
    Quartic,
    Mixed,
}

impl EquationKind {
    fn terms(&self) -> &'static [Term] {
        match self {
            EquationKind::Quadratic => QUADRATIC_TERMS,
            EquationKind::Cubic => CUBIC_TERMS,
            EquationKind::Quartic => QUARTIC_TERMS,
            EquationKind::Mixed => MIXED_TERMS,
        }
    }
}

impl std::str::FromStr for EquationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" => Ok(EquationKind::Quadratic),
            "cubic" => Ok(EquationKind::Cubic),
            "quartic" => Ok(EquationKind::Quartic),
            "mixed" => Ok(EquationKind::Mixed),
            other => Err(Error::InvalidInput(format!(
                "unknown equation kind {other:?}"
            ))),
        }
    }
}

/// A residual value together with its cancellation scale.
#[derive(Debug, Clone)]
pub struct Residual {
    pub value: Value,
    /// `1 + max |coeff| * max-norm(f(arg))` over the operator's terms.
    pub scale: f64,
}

impl Residual {
    /// Residual norm divided by the cancellation scale.
    pub fn normalized(&self, norm: NormSpec) -> f64 {
        norm.apply(self.value.coords()) / self.scale
    }
}

fn weighted_sum(f: &FunctionHandle, terms: &[Term], x: &Point, y: &Point) -> Result<Residual> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            actual: y.dim(),
        });
    }
    let mut acc = vec![0.0; f.dim_out()];
    let mut max_term = 0.0f64;
    for &(coeff, cx, cy) in terms {
        let arg = Point::linear_combination(&[(cx, x), (cy, y)])?;
        let v = f.eval(&arg)?;
        max_term = max_term.max(coeff.abs() * NormSpec::MaxCoordinate.apply(v.coords()));
        for (a, c) in acc.iter_mut().zip(v.coords()) {
            *a += coeff * c;
        }
    }
    Ok(Residual {
        value: Value::new(acc)?,
        scale: 1.0 + max_term,
    })
}

/// Residual of the given equation at `(x, y)`, with its scale.
pub fn equation_residual(
    kind: EquationKind,
    f: &FunctionHandle,
    x: &Point,
    y: &Point,
) -> Result<Residual> {
    weighted_sum(f, kind.terms(), x, y)
}

/// The mixed difference operator `D_f(x, y)`.
pub fn d_mixed(f: &FunctionHandle, x: &Point, y: &Point) -> Result<Value> {
    Ok(equation_residual(EquationKind::Mixed, f, x, y)?.value)
}

/// Residual of the quadratic equation at `(x, y)`.
pub fn d_quadratic(f: &FunctionHandle, x: &Point, y: &Point) -> Result<Value> {
    Ok(equation_residual(EquationKind::Quadratic, f, x, y)?.value)
}

/// Residual of the cubic equation at `(x, y)`.
pub fn d_cubic(f: &FunctionHandle, x: &Point, y: &Point) -> Result<Value> {
    Ok(equation_residual(EquationKind::Cubic, f, x, y)?.value)
}

/// Residual of the quartic equation at `(x, y)`.
pub fn d_quartic(f: &FunctionHandle, x: &Point, y: &Point) -> Result<Value> {
    Ok(equation_residual(EquationKind::Quartic, f, x, y)?.value)
}

/// Splits `f` into its even part `(f(x) + f(-x)) / 2` and odd part
/// `(f(x) - f(-x)) / 2`. Sample-backed handles must cover a domain
/// symmetric about the origin.
pub fn even_odd_split(f: &FunctionHandle) -> Result<(FunctionHandle, FunctionHandle)> {
    if let Some(bbox) = f.bbox() {
        for (lo, hi) in bbox {
            if (lo + hi).abs() > 1e-9 * (1.0 + (hi - lo).abs()) {
                return Err(Error::Domain(format!(
                    "sample domain [{lo}, {hi}] is not symmetric about the origin"
                )));
            }
        }
    }
    let half_sum = {
        let f = f.clone();
        let g = f.reflect_argument();
        f.add(&g)?.scale_output(0.5)
    };
    let half_diff = {
        let f = f.clone();
        let g = f.reflect_argument();
        f.sub(&g)?.scale_output(0.5)
    };
    Ok((half_sum, half_diff))
}

/// Which part of the split an identity constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityPart {
    Even,
    Odd,
}

struct IdentitySpec {
    id: &'static str,
    part: ParityPart,
    terms: &'static [Term],
}

/// The eight checked identities. Exact solutions of the mixed equation
/// satisfy every one of them; each serves as an independent consistency
/// probe of the even/odd parts.
const IDENTITIES: &[IdentitySpec] = &[
    // e(3y) = 6 e(2y) - 15 e(y)
    IdentitySpec {
        id: "2.1",
        part: ParityPart::Even,
        terms: &[(1.0, 0.0, 3.0), (-6.0, 0.0, 2.0), (15.0, 0.0, 1.0)],
    },
    // e(x+2y) + e(x-2y) = 4 e(x+y) + 4 e(x-y) - 8 e(y) + 2 e(2y) - 6 e(x)
    IdentitySpec {
        id: "2.2",
        part: ParityPart::Even,
        terms: &[
            (1.0, 1.0, 2.0),
            (1.0, 1.0, -2.0),
            (-4.0, 1.0, 1.0),
            (-4.0, 1.0, -1.0),
            (8.0, 0.0, 1.0),
            (-2.0, 0.0, 2.0),
            (6.0, 1.0, 0.0),
        ],
    },
    // e(2x+y) + e(2x-y) = 4 e(x+y) + 4 e(x-y) - 8 e(x) + 2 e(2x) - 6 e(y)
    IdentitySpec {
        id: "2.3",
        part: ParityPart::Even,
        terms: &[
            (1.0, 2.0, 1.0),
            (1.0, 2.0, -1.0),
            (-4.0, 1.0, 1.0),
            (-4.0, 1.0, -1.0),
            (8.0, 1.0, 0.0),
            (-2.0, 2.0, 0.0),
            (6.0, 0.0, 1.0),
        ],
    },
    // e(4x) = 20 e(2x) - 64 e(x)
    IdentitySpec {
        id: "2.13",
        part: ParityPart::Even,
        terms: &[(1.0, 4.0, 0.0), (-20.0, 2.0, 0.0), (64.0, 1.0, 0.0)],
    },
    // 2 o(3y) = 9 o(2y) - 18 o(y)
    IdentitySpec {
        id: "2.16",
        part: ParityPart::Odd,
        terms: &[(2.0, 0.0, 3.0), (-9.0, 0.0, 2.0), (18.0, 0.0, 1.0)],
    },
    // o(x+2y) + o(x-2y) = 4 o(x+y) + 4 o(x-y) - 6 o(x)
    IdentitySpec {
        id: "2.17",
        part: ParityPart::Odd,
        terms: &[
            (1.0, 1.0, 2.0),
            (1.0, 1.0, -2.0),
            (-4.0, 1.0, 1.0),
            (-4.0, 1.0, -1.0),
            (6.0, 1.0, 0.0),
        ],
    },
    // o(3y) = 6 o(2y) - 21 o(y)
    IdentitySpec {
        id: "2.18",
        part: ParityPart::Odd,
        terms: &[(1.0, 0.0, 3.0), (-6.0, 0.0, 2.0), (21.0, 0.0, 1.0)],
    },
    // o(2y) = 8 o(y)
    IdentitySpec {
        id: "2.19",
        part: ParityPart::Odd,
        terms: &[(1.0, 0.0, 2.0), (-8.0, 0.0, 1.0)],
    },
];

/// Largest argument multiplier appearing in any identity (the `4x` term),
/// used to shrink grids into bounded sample domains.
const CLOSURE_FACTOR: f64 = 4.0;

/// Worst residual of one identity over a grid.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityResult {
    pub identity: String,
    /// Max over the grid of the scale-normalized residual norm.
    pub max_residual: f64,
    /// The `(x, y)` pair attaining the max.
    pub argmax: (Point, Point),
}

/// Report of the full identity suite.
#[derive(Debug, Clone, Serialize)]
pub struct IdentitySuiteReport {
    pub entries: Vec<IdentityResult>,
    /// Factor the grid was shrunk by to keep closure arguments inside a
    /// bounded sample domain (1.0 when untouched).
    pub grid_scale: f64,
    pub tolerance: f64,
}

impl IdentitySuiteReport {
    pub fn pass(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.max_residual <= self.tolerance)
    }

    pub fn worst(&self) -> Option<&IdentityResult> {
        self.entries
            .iter()
            .max_by(|a, b| a.max_residual.total_cmp(&b.max_residual))
    }
}

/// Runs the residual-identity suite for the even/odd parts over a grid of
/// `(x, y)` pairs. Residuals are normalized by the cancellation scale; for
/// exact solutions every entry stays below the tolerance.
///
/// If the parts live on a bounded domain, the grid is shrunk so that all
/// closure arguments (up to `4x` and `3y`) remain evaluatable.
pub fn verify_identity_suite(
    f_even: &FunctionHandle,
    f_odd: &FunctionHandle,
    grid: &[(Point, Point)],
    tolerance: f64,
) -> Result<IdentitySuiteReport> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("identity grid is empty".into()));
    }
    let radius = match (f_even.domain_radius(), f_odd.domain_radius()) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (Some(a), None) | (None, Some(a)) => Some(a),
        (None, None) => None,
    };
    let mut grid_scale = 1.0;
    let scaled: Vec<(Point, Point)> = match radius {
        Some(r) => {
            let needed = grid.iter().fold(0.0f64, |m, (x, y)| {
                m.max(NormSpec::MaxCoordinate.apply(x.coords()))
                    .max(NormSpec::MaxCoordinate.apply(y.coords()))
            }) * CLOSURE_FACTOR;
            if needed > r {
                grid_scale = r / needed * (1.0 - 1e-12);
            }
            grid.iter()
                .map(|(x, y)| Ok((x.scaled(grid_scale)?, y.scaled(grid_scale)?)))
                .collect::<Result<_>>()?
        }
        None => grid.to_vec(),
    };

    let mut entries = Vec::with_capacity(IDENTITIES.len());
    for spec in IDENTITIES {
        let part = match spec.part {
            ParityPart::Even => f_even,
            ParityPart::Odd => f_odd,
        };
        let residuals = par::try_map(&scaled, |(x, y)| {
            weighted_sum(part, spec.terms, x, y).map(|r| r.normalized(NormSpec::MaxCoordinate))
        })?;
        let (argmax, max_residual) =
            residuals
                .iter()
                .enumerate()
                .fold(
                    (0usize, f64::MIN),
                    |(bi, bv), (i, &v)| {
                        if v > bv {
                            (i, v)
                        } else {
                            (bi, bv)
                        }
                    },
                );
        entries.push(IdentityResult {
            identity: spec.id.to_string(),
            max_residual,
            argmax: scaled[argmax].clone(),
        });
    }
    Ok(IdentitySuiteReport {
        entries,
        grid_scale,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::FunctionHandle;
    use proptest::prelude::*;

    fn pt(x: f64) -> Point {
        Point::scalar(x).unwrap()
    }

    fn pair_grid(radius: f64, n: usize) -> Vec<(Point, Point)> {
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let x = -radius + 2.0 * radius * i as f64 / (n - 1) as f64;
                let y = -radius + 2.0 * radius * j as f64 / (n - 1) as f64;
                pairs.push((pt(x), pt(y)));
            }
        }
        pairs
    }

    #[test]
    fn pure_quartic_in_mixed_kernel() {
        let f = FunctionHandle::poly1(0.0, 0.0, 1.0).unwrap();
        let v = d_mixed(&f, &pt(1.0), &pt(1.0)).unwrap();
        assert_eq!(v.as_scalar().unwrap(), 0.0);
    }

    #[test]
    fn additive_map_leaves_minus_twelve_y() {
        let f = FunctionHandle::from_fn(1, 1, "x", |p| Value::scalar(p.coords()[0]));
        let v = d_mixed(&f, &pt(0.0), &pt(1.0)).unwrap();
        assert_eq!(v.as_scalar().unwrap(), -12.0);
        // The full expansion is -12 y at every pair.
        let v = d_mixed(&f, &pt(5.0), &pt(-2.5)).unwrap();
        assert_eq!(v.as_scalar().unwrap(), 30.0);
    }

    #[test]
    fn zero_function_in_kernel() {
        let f = FunctionHandle::zero(1, 1);
        let v = d_mixed(&f, &pt(3.0), &pt(4.0)).unwrap();
        assert_eq!(v.as_scalar().unwrap(), 0.0);
    }

    #[test]
    fn classical_equations_on_their_monomials() {
        let sq = FunctionHandle::poly1(1.0, 0.0, 0.0).unwrap();
        assert_eq!(
            d_quadratic(&sq, &pt(2.0), &pt(3.0))
                .unwrap()
                .as_scalar()
                .unwrap(),
            0.0
        );
        let cu = FunctionHandle::poly1(0.0, 1.0, 0.0).unwrap();
        assert_eq!(
            d_cubic(&cu, &pt(1.0), &pt(2.0))
                .unwrap()
                .as_scalar()
                .unwrap(),
            0.0
        );
        // x^3 fails the quartic equation: 28 - 50 = -22 at (1, 1).
        let v = d_quartic(&cu, &pt(1.0), &pt(1.0)).unwrap();
        assert_eq!(v.as_scalar().unwrap(), -22.0);
    }

    #[test]
    fn non_kernel_maps_detected() {
        let lin = FunctionHandle::from_fn(1, 1, "x", |p| Value::scalar(p.coords()[0]));
        assert!(
            d_mixed(&lin, &pt(0.0), &pt(1.0))
                .unwrap()
                .as_scalar()
                .unwrap()
                .abs()
                > 1.0
        );
        let quintic =
            FunctionHandle::from_fn(1, 1, "x^5", |p| Value::scalar(p.coords()[0].powi(5)));
        assert!(
            d_mixed(&quintic, &pt(1.0), &pt(1.0))
                .unwrap()
                .as_scalar()
                .unwrap()
                .abs()
                > 1.0
        );
    }

    #[test]
    fn split_separates_monomials() {
        let f = FunctionHandle::poly1(1.0, 1.0, 0.0).unwrap();
        let (fe, fo) = even_odd_split(&f).unwrap();
        let x = pt(1.5);
        assert!((fe.eval(&x).unwrap().as_scalar().unwrap() - 2.25).abs() < 1e-12);
        assert!((fo.eval(&x).unwrap().as_scalar().unwrap() - 3.375).abs() < 1e-12);
    }

    #[test]
    fn split_of_exponential_gives_cosh_sinh() {
        let f = FunctionHandle::from_fn(1, 1, "exp", |p| Value::scalar(p.coords()[0].exp()));
        let (fe, fo) = even_odd_split(&f).unwrap();
        for x in [-2.0, -0.5, 0.0, 1.0, 2.5] {
            let e = fe.eval(&pt(x)).unwrap().as_scalar().unwrap();
            let o = fo.eval(&pt(x)).unwrap().as_scalar().unwrap();
            assert!((e - x.cosh()).abs() <= 1e-12 * x.cosh());
            assert!((o - x.sinh()).abs() <= 1e-12 * (1.0 + x.sinh().abs()));
        }
    }

    #[test]
    fn even_input_has_zero_odd_part() {
        let f = FunctionHandle::poly1(2.0, 0.0, -1.0).unwrap();
        let (_, fo) = even_odd_split(&f).unwrap();
        for x in [-2.0, -1.0, 0.5, 2.0] {
            assert_eq!(fo.eval(&pt(x)).unwrap().as_scalar().unwrap(), 0.0);
        }
    }

    #[test]
    fn asymmetric_sample_domain_rejected() {
        let points: Vec<Vec<f64>> = (0..=4).map(|i| vec![i as f64]).collect();
        let values: Vec<Vec<f64>> = (0..=4).map(|i| vec![i as f64]).collect();
        let spec = crate::function::FunctionSpec::Samples { points, values };
        let f = spec.to_handle().unwrap();
        assert!(matches!(even_odd_split(&f), Err(Error::Domain(_))));
    }

    #[test]
    fn identity_suite_passes_on_exact_solutions() {
        let f = FunctionHandle::poly1(-3.0, 2.0, 4.5).unwrap();
        let (fe, fo) = even_odd_split(&f).unwrap();
        let report = verify_identity_suite(&fe, &fo, &pair_grid(2.0, 9), 1e-9).unwrap();
        assert!(report.pass(), "worst: {:?}", report.worst());
        assert_eq!(report.entries.len(), 8);
        assert_eq!(report.grid_scale, 1.0);
    }

    #[test]
    fn identity_suite_shrinks_for_bounded_domains() {
        // Samples of x^2 on [-8, 8]; a grid of radius 4 would push the 4x
        // closure argument to 16, so the suite must shrink it.
        let points: Vec<Vec<f64>> = (-8..=8).map(|i| vec![i as f64]).collect();
        let values: Vec<Vec<f64>> = (-8..=8).map(|i| vec![(i * i) as f64]).collect();
        let spec = crate::function::FunctionSpec::Samples { points, values };
        let f = spec.to_handle().unwrap();
        let (fe, fo) = even_odd_split(&f).unwrap();
        let report = verify_identity_suite(&fe, &fo, &pair_grid(4.0, 5), 1.0).unwrap();
        assert!(report.grid_scale < 0.51);
        assert!(report.grid_scale > 0.49);
    }

    #[test]
    fn identity_report_serializes_per_spec() {
        let f = FunctionHandle::poly1(1.0, 1.0, 1.0).unwrap();
        let (fe, fo) = even_odd_split(&f).unwrap();
        let report = verify_identity_suite(&fe, &fo, &pair_grid(1.0, 3), 1e-9).unwrap();
        let json = serde_json::to_value(&report.entries[0]).unwrap();
        assert_eq!(json["identity"], "2.1");
        assert!(json["max_residual"].is_number());
        assert!(json["argmax"].is_array());
    }

    proptest! {
        // Exact solutions a x^2 + b x^3 + c x^4 lie in the operator kernel.
        #[test]
        fn kernel_property(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0,
                           x in -10.0f64..10.0, y in -10.0f64..10.0) {
            let f = FunctionHandle::poly1(a, b, c).unwrap();
            let r = equation_residual(EquationKind::Mixed, &f, &pt(x), &pt(y)).unwrap();
            prop_assert!(r.normalized(NormSpec::MaxCoordinate) <= 1e-9);
        }

        // The operator is linear in the function argument.
        #[test]
        fn linearity(a in -3.0f64..3.0, b in -3.0f64..3.0,
                     c1 in -2.0f64..2.0, c2 in -2.0f64..2.0,
                     x in -4.0f64..4.0, y in -4.0f64..4.0) {
            let f = FunctionHandle::poly1(c1, 0.5, -c2).unwrap();
            let g = FunctionHandle::from_fn(1, 1, "x^5", |p| {
                Value::scalar(p.coords()[0].powi(5))
            });
            let combo = f.scale_output(a).add(&g.scale_output(b)).unwrap();
            let lhs = d_mixed(&combo, &pt(x), &pt(y)).unwrap().as_scalar().unwrap();
            let rf = d_mixed(&f, &pt(x), &pt(y)).unwrap().as_scalar().unwrap();
            let rg = d_mixed(&g, &pt(x), &pt(y)).unwrap().as_scalar().unwrap();
            let rhs = a * rf + b * rg;
            let scale = 1.0 + lhs.abs().max(rhs.abs());
            prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);
        }

        // Even and odd parts reconstruct the input.
        #[test]
        fn split_reconstructs(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0,
                              x in -2.0f64..2.0) {
            let f = FunctionHandle::poly1(a, b, c).unwrap();
            let (fe, fo) = even_odd_split(&f).unwrap();
            let direct = f.eval(&pt(x)).unwrap().as_scalar().unwrap();
            let sum = fe.eval(&pt(x)).unwrap().as_scalar().unwrap()
                + fo.eval(&pt(x)).unwrap().as_scalar().unwrap();
            prop_assert!((direct - sum).abs() <= 1e-12 * (1.0 + direct.abs()));
        }

        // The suite holds for random exact solutions.
        #[test]
        fn identity_suite_random_solutions(a in -5.0f64..5.0, b in -5.0f64..5.0,
                                           c in -5.0f64..5.0) {
            let f = FunctionHandle::poly1(a, b, c).unwrap();
            let (fe, fo) = even_odd_split(&f).unwrap();
            let report = verify_identity_suite(&fe, &fo, &pair_grid(2.0, 5), 1e-9).unwrap();
            prop_assert!(report.pass());
        }
    }
}
