//! Deterministic evaluatable maps from the domain space to the target
//! space, plus their JSON wire format.
//!
//! A [`FunctionHandle`] wraps a side-effect-free evaluator. Repeated
//! evaluation at the same point yields bitwise-identical values, and the
//! evaluator must be safe to invoke concurrently. Handles are either
//! unbounded (closed-form polynomial plus perturbation) or carry a bounding
//! box (grid-interpolated samples, which reject evaluation outside their
//! convex hull).

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{CubicForm, QuadraticForm, QuarticForm};
use crate::space::{Point, Value};

type Evaluator = Arc<dyn Fn(&Point) -> Result<Value> + Send + Sync>;

/// A deterministic map `X -> Y`.
#[derive(Clone)]
pub struct FunctionHandle {
    eval: Evaluator,
    dim_in: usize,
    dim_out: usize,
    /// Per-axis closed intervals for bounded (sample-backed) handles.
    bbox: Option<Vec<(f64, f64)>>,
    description: Option<String>,
}

impl std::fmt::Debug for FunctionHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FunctionHandle")
            .field("dim_in", &self.dim_in)
            .field("dim_out", &self.dim_out)
            .field("bbox", &self.bbox)
            .field("description", &self.description)
            .finish()
    }
}

impl FunctionHandle {
    pub fn from_fn<F>(dim_in: usize, dim_out: usize, description: &str, eval: F) -> Self
    where
        F: Fn(&Point) -> Result<Value> + Send + Sync + 'static,
    {
        FunctionHandle {
            eval: Arc::new(eval),
            dim_in,
            dim_out,
            bbox: None,
            description: if description.is_empty() {
                None
            } else {
                Some(description.to_string())
            },
        }
    }

    fn with_bbox(mut self, bbox: Option<Vec<(f64, f64)>>) -> Self {
        self.bbox = bbox;
        self
    }

    /// The one-dimensional polynomial `a x^2 + b x^3 + c x^4`.
    pub fn poly1(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::NonFinite {
                context: "polynomial coefficients",
            });
        }
        Ok(FunctionHandle::from_fn(
            1,
            1,
            &format!("poly:{a},{b},{c}"),
            move |p: &Point| {
                let x = p.coords()[0];
                let x2 = x * x;
                Value::scalar(x2 * (a + x * (b + c * x)))
            },
        ))
    }

    /// The zero map of the given dimensions.
    pub fn zero(dim_in: usize, dim_out: usize) -> Self {
        FunctionHandle::from_fn(dim_in, dim_out, "zero", move |_| Ok(Value::zero(dim_out)))
    }

    /// Sum of the diagonal evaluations of a quadratic, cubic, and quartic
    /// form sharing dimensions.
    pub fn from_forms(q1: &QuadraticForm, c: &CubicForm, q2: &QuarticForm) -> Result<Self> {
        let dim = q1.dim();
        let out = q1.out_dim();
        for (d, o) in [(c.dim(), c.out_dim()), (q2.dim(), q2.out_dim())] {
            if d != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: d,
                });
            }
            if o != out {
                return Err(Error::DimensionMismatch {
                    expected: out,
                    actual: o,
                });
            }
        }
        let (q1, c, q2) = (q1.clone(), c.clone(), q2.clone());
        Ok(FunctionHandle::from_fn(dim, out, "forms", move |x| {
            let a = q1.eval(x)?;
            let b = c.eval(x)?;
            let d = q2.eval(x)?;
            a.add(&b)?.add(&d)
        }))
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn description(&self) -> Option<&str> {
        self.description.as_deref()
    }

    pub fn bbox(&self) -> Option<&[(f64, f64)]> {
        self.bbox.as_deref()
    }

    /// Radius of the largest origin-centred max-norm ball inside the
    /// domain, or `None` for unbounded handles.
    pub fn domain_radius(&self) -> Option<f64> {
        self.bbox.as_ref().map(|bbox| {
            bbox.iter()
                .map(|(lo, hi)| (-lo).min(*hi).max(0.0))
                .fold(f64::INFINITY, f64::min)
        })
    }

    /// Evaluates the handle, checking dimensions on the way in and
    /// finiteness on the way out.
    pub fn eval(&self, x: &Point) -> Result<Value> {
        if x.dim() != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                actual: x.dim(),
            });
        }
        let v = (self.eval)(x)?;
        if v.dim() != self.dim_out {
            return Err(Error::DimensionMismatch {
                expected: self.dim_out,
                actual: v.dim(),
            });
        }
        Ok(v)
    }

    pub fn add(&self, other: &FunctionHandle) -> Result<FunctionHandle> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &FunctionHandle) -> Result<FunctionHandle> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &FunctionHandle, sign: f64) -> Result<FunctionHandle> {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                actual: other.dim_in,
            });
        }
        let bbox = intersect_bbox(self.bbox.as_deref(), other.bbox.as_deref())?;
        let (a, b) = (self.clone(), other.clone());
        Ok(
            FunctionHandle::from_fn(self.dim_in, self.dim_out, "", move |x| {
                let u = a.eval(x)?;
                let v = b.eval(x)?.scaled(sign)?;
                u.add(&v)
            })
            .with_bbox(bbox),
        )
    }

    /// `x -> k * f(x)`.
    pub fn scale_output(&self, k: f64) -> FunctionHandle {
        let f = self.clone();
        FunctionHandle::from_fn(self.dim_in, self.dim_out, "", move |x| f.eval(x)?.scaled(k))
            .with_bbox(self.bbox.clone())
    }

    /// `x -> f(k * x)`. The domain box scales inversely.
    pub fn scale_argument(&self, k: f64) -> Result<FunctionHandle> {
        if k == 0.0 || !k.is_finite() {
            return Err(Error::InvalidInput(
                "argument scale must be finite and nonzero".into(),
            ));
        }
        let bbox = self.bbox.as_ref().map(|bbox| {
            bbox.iter()
                .map(|(lo, hi)| {
                    let (a, b) = (lo / k, hi / k);
                    (a.min(b), a.max(b))
                })
                .collect()
        });
        let f = self.clone();
        Ok(
            FunctionHandle::from_fn(self.dim_in, self.dim_out, "", move |x| {
                f.eval(&x.scaled(k)?)
            })
            .with_bbox(bbox),
        )
    }

    /// `x -> f(-x)`.
    pub fn reflect_argument(&self) -> FunctionHandle {
        let bbox = self
            .bbox
            .as_ref()
            .map(|bbox| bbox.iter().map(|(lo, hi)| (-hi, -lo)).collect());
        let f = self.clone();
        FunctionHandle::from_fn(self.dim_in, self.dim_out, "", move |x| f.eval(&x.negated()))
            .with_bbox(bbox)
    }

    /// `x -> f(x) - c`.
    pub fn sub_value(&self, c: &Value) -> Result<FunctionHandle> {
        if c.dim() != self.dim_out {
            return Err(Error::DimensionMismatch {
                expected: self.dim_out,
                actual: c.dim(),
            });
        }
        let f = self.clone();
        let c = c.clone();
        Ok(
            FunctionHandle::from_fn(self.dim_in, self.dim_out, "", move |x| f.eval(x)?.sub(&c))
                .with_bbox(self.bbox.clone()),
        )
    }
}

fn intersect_bbox(
    a: Option<&[(f64, f64)]>,
    b: Option<&[(f64, f64)]>,
) -> Result<Option<Vec<(f64, f64)>>> {
    match (a, b) {
        (None, None) => Ok(None),
        (Some(x), None) | (None, Some(x)) => Ok(Some(x.to_vec())),
        (Some(x), Some(y)) => {
            let merged: Vec<(f64, f64)> = x
                .iter()
                .zip(y)
                .map(|((alo, ahi), (blo, bhi))| (alo.max(*blo), ahi.min(*bhi)))
                .collect();
            if merged.iter().any(|(lo, hi)| lo > hi) {
                return Err(Error::Domain("handle domains do not overlap".into()));
            }
            Ok(Some(merged))
        }
    }
}

/// Serializable description of a function handle.
///
/// `poly` is the one-dimensional closed form `a x^2 + b x^3 + c x^4`;
/// `samples` is a full tensor-product grid of points with values, evaluated
/// by multilinear interpolation and rejected outside the grid's hull;
/// `forms` carries coefficient tensors for dimensions above one.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FunctionSpec {
    Poly {
        a: f64,
        b: f64,
        c: f64,
    },
    Samples {
        points: Vec<Vec<f64>>,
        values: Vec<Vec<f64>>,
    },
    Forms {
        quadratic: QuadraticForm,
        cubic: CubicForm,
        quartic: QuarticForm,
    },
}

impl FunctionSpec {
    pub fn to_handle(&self) -> Result<FunctionHandle> {
        match self {
            FunctionSpec::Poly { a, b, c } => FunctionHandle::poly1(*a, *b, *c),
            FunctionSpec::Samples { points, values } => sample_handle(points, values),
            FunctionSpec::Forms {
                quadratic,
                cubic,
                quartic,
            } => FunctionHandle::from_forms(quadratic, cubic, quartic),
        }
    }

    pub fn from_json(text: &str) -> Result<FunctionSpec> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Multilinear interpolation over a tensor-product sample grid.
struct SampleGrid {
    axes: Vec<Vec<f64>>,
    /// Row-major over the axes, innermost axis last.
    values: Vec<Value>,
    dim_out: usize,
}

impl SampleGrid {
    fn build(points: &[Vec<f64>], values: &[Vec<f64>]) -> Result<Self> {
        if points.is_empty() || points.len() != values.len() {
            return Err(Error::InvalidInput(
                "samples need matching nonempty point and value lists".into(),
            ));
        }
        let dim_in = points[0].len();
        let dim_out = values[0].len();
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidInput(
                "samples must not be zero-dimensional".into(),
            ));
        }
        let mut axes: Vec<Vec<f64>> = vec![Vec::new(); dim_in];
        for p in points {
            if p.len() != dim_in {
                return Err(Error::DimensionMismatch {
                    expected: dim_in,
                    actual: p.len(),
                });
            }
            for (axis, &c) in axes.iter_mut().zip(p) {
                if !c.is_finite() {
                    return Err(Error::NonFinite {
                        context: "sample points",
                    });
                }
                if !axis.contains(&c) {
                    axis.push(c);
                }
            }
        }
        for axis in &mut axes {
            axis.sort_by(f64::total_cmp);
            if axis.len() < 2 {
                return Err(Error::InvalidInput(
                    "each sample axis needs at least two distinct coordinates".into(),
                ));
            }
        }
        let total: usize = axes.iter().map(Vec::len).product();
        if total != points.len() {
            return Err(Error::InvalidInput(format!(
                "samples must form a full grid: expected {total} points, got {}",
                points.len()
            )));
        }
        // Place each sample at its grid slot, keyed by exact coordinates.
        let index_of = |axis: &[f64], c: f64| axis.iter().position(|&a| a == c).unwrap();
        let mut slot: HashMap<usize, Value> = HashMap::with_capacity(total);
        for (p, v) in points.iter().zip(values) {
            if v.len() != dim_out {
                return Err(Error::DimensionMismatch {
                    expected: dim_out,
                    actual: v.len(),
                });
            }
            let mut flat = 0usize;
            for (axis, &c) in axes.iter().zip(p) {
                flat = flat * axis.len() + index_of(axis, c);
            }
            if slot.insert(flat, Value::new(v.clone())?).is_some() {
                return Err(Error::InvalidInput("duplicate sample point".into()));
            }
        }
        let mut grid_values = Vec::with_capacity(total);
        for flat in 0..total {
            grid_values.push(
                slot.remove(&flat)
                    .ok_or_else(|| Error::InvalidInput("samples must form a full grid".into()))?,
            );
        }
        Ok(SampleGrid {
            axes,
            values: grid_values,
            dim_out,
        })
    }

    fn bbox(&self) -> Vec<(f64, f64)> {
        self.axes
            .iter()
            .map(|a| (a[0], *a.last().unwrap()))
            .collect()
    }

    fn eval(&self, x: &Point) -> Result<Value> {
        // Per axis: enclosing cell plus interpolation weight.
        let mut cells = Vec::with_capacity(self.axes.len());
        for (axis, &c) in self.axes.iter().zip(x.coords()) {
            if c < axis[0] || c > *axis.last().unwrap() {
                return Err(Error::Domain(format!(
                    "sample evaluation at {c} outside [{}, {}]",
                    axis[0],
                    axis.last().unwrap()
                )));
            }
            let hi = axis.partition_point(|&a| a < c).min(axis.len() - 1).max(1);
            let lo = hi - 1;
            let w = (c - axis[lo]) / (axis[hi] - axis[lo]);
            cells.push((lo, w));
        }
        // Blend the 2^d cell corners.
        let d = cells.len();
        let mut acc = vec![0.0; self.dim_out];
        for corner in 0..(1usize << d) {
            let mut weight = 1.0;
            let mut flat = 0usize;
            for (k, (lo, w)) in cells.iter().enumerate() {
                let up = (corner >> k) & 1 == 1;
                weight *= if up { *w } else { 1.0 - *w };
                flat = flat * self.axes[k].len() + lo + usize::from(up);
            }
            if weight == 0.0 {
                continue;
            }
            for (a, v) in acc.iter_mut().zip(self.values[flat].coords()) {
                *a += weight * v;
            }
        }
        Value::new(acc)
    }
}

fn sample_handle(points: &[Vec<f64>], values: &[Vec<f64>]) -> Result<FunctionHandle> {
    let grid = SampleGrid::build(points, values)?;
    let bbox = grid.bbox();
    let (dim_in, dim_out) = (grid.axes.len(), grid.dim_out);
    Ok(
        FunctionHandle::from_fn(dim_in, dim_out, "samples", move |x| grid.eval(x))
            .with_bbox(Some(bbox)),
    )
}
