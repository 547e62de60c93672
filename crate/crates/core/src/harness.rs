//! Batch helpers: generators for exact solutions with bounded
//! perturbations, and an independent least-squares oracle for coefficient
//! recovery. The oracle deliberately shares no code with the stability
//! extractors so the two can cross-check each other.

use crate::error::{Error, Result};
use crate::function::FunctionHandle;
use crate::space::{Point, Value};

/// Perturbation added on top of the exact polynomial.
#[derive(Debug, Clone, PartialEq)]
pub enum Perturbation {
    None,
    /// `amplitude * sin(sum of coordinates)`; bounded by the amplitude
    /// everywhere.
    Trig {
        amplitude: f64,
    },
    /// Deterministic hash noise in `[-amplitude, amplitude]`; the seed
    /// fixes the stream, so equal seeds give bitwise-equal handles.
    UniformNoise {
        amplitude: f64,
        seed: u64,
    },
}

/// Description of a generated test function `a x^2 + b x^3 + c x^4 +
/// perturbation` (one-dimensional).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub perturbation: Perturbation,
    pub domain_radius: f64,
}

impl GeneratorSpec {
    pub fn exact(a: f64, b: f64, c: f64) -> Self {
        GeneratorSpec {
            a,
            b,
            c,
            perturbation: Perturbation::None,
            domain_radius: 2.0,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Hash noise in `[-1, 1)`, a pure function of the seed and the point.
pub fn hash_noise(seed: u64, coords: &[f64]) -> f64 {
    let mut h = splitmix64(seed ^ 0x517cc1b727220a95);
    for c in coords {
        h = splitmix64(h ^ c.to_bits());
    }
    (h >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

/// Builds the generated handle. The perturbation sup-norm never exceeds
/// the amplitude, on the domain or anywhere else.
pub fn generate(spec: &GeneratorSpec) -> Result<FunctionHandle> {
    if !(spec.a.is_finite() && spec.b.is_finite() && spec.c.is_finite()) {
        return Err(Error::NonFinite {
            context: "generator coefficients",
        });
    }
    if !(spec.domain_radius.is_finite() && spec.domain_radius > 0.0) {
        return Err(Error::InvalidInput("domain_radius must be positive".into()));
    }
    let (a, b, c) = (spec.a, spec.b, spec.c);
    let poly = move |x: f64| x * x * (a + x * (b + c * x));
    match spec.perturbation {
        Perturbation::None => Ok(FunctionHandle::from_fn(
            1,
            1,
            &format!("poly:{a},{b},{c}"),
            move |p: &Point| Value::scalar(poly(p.coords()[0])),
        )),
        Perturbation::Trig { amplitude } => {
            if !(amplitude.is_finite() && amplitude >= 0.0) {
                return Err(Error::InvalidInput("amplitude must be >= 0".into()));
            }
            Ok(FunctionHandle::from_fn(
                1,
                1,
                &format!("poly:{a},{b},{c}+trig:{amplitude}"),
                move |p: &Point| {
                    let x = p.coords()[0];
                    Value::scalar(poly(x) + amplitude * x.sin())
                },
            ))
        }
        Perturbation::UniformNoise { amplitude, seed } => {
            if !(amplitude.is_finite() && amplitude >= 0.0) {
                return Err(Error::InvalidInput("amplitude must be >= 0".into()));
            }
            Ok(FunctionHandle::from_fn(
                1,
                1,
                &format!("poly:{a},{b},{c}+noise:{amplitude},{seed}"),
                move |p: &Point| {
                    Value::scalar(poly(p.coords()[0]) + amplitude * hash_noise(seed, p.coords()))
                },
            ))
        }
    }
}

/// Least-squares fit of `a x^2 + b x^3 + c x^4` coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub residual_rms: f64,
}

/// Solves a small symmetric linear system by Gaussian elimination with
/// partial pivoting. Pivots below the relative threshold signal a
/// rank-deficient design.
fn solve_dense(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
    let n = rhs.len();
    let scale = m
        .iter()
        .flatten()
        .fold(0.0f64, |s, v| s.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[pivot_row][col].abs() <= 1e-12 * scale {
            return Err(Error::SingularFit);
        }
        m.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        let pivot = m[col].clone();
        for row in col + 1..n {
            let factor = m[row][col] / pivot[col];
            for (entry, p) in m[row][col..].iter_mut().zip(&pivot[col..]) {
                *entry -= factor * p;
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Ok(x)
}

/// Fits `a x^2 + b x^3 + c x^4` to the handle's values over the grid by
/// minimizing the summed squared residual (normal equations). Degenerate
/// designs (too few points, all at zero, or symmetric collapses) are
/// rejected as singular.
pub fn oracle_fit(f: &FunctionHandle, grid: &[Point]) -> Result<OracleFit> {
    if f.dim_in() != 1 || f.dim_out() != 1 {
        return Err(Error::InvalidInput(
            "the least-squares oracle handles one-dimensional scalar functions".into(),
        ));
    }
    if grid.len() < 3 {
        return Err(Error::SingularFit);
    }
    let mut normal = vec![vec![0.0; 3]; 3];
    let mut rhs = vec![0.0; 3];
    let mut samples = Vec::with_capacity(grid.len());
    for p in grid {
        let x = p.coords()[0];
        let basis = [x * x, x * x * x, x * x * x * x];
        let y = f.eval(p)?.as_scalar()?;
        for i in 0..3 {
            for j in 0..3 {
                normal[i][j] += basis[i] * basis[j];
            }
            rhs[i] += basis[i] * y;
        }
        samples.push((basis, y));
    }
    let coeffs = solve_dense(normal, rhs)?;
    let mut sq = 0.0;
    for (basis, y) in &samples {
        let fit: f64 = basis.iter().zip(&coeffs).map(|(b, c)| b * c).sum();
        sq += (y - fit) * (y - fit);
    }
    Ok(OracleFit {
        a: coeffs[0],
        b: coeffs[1],
        c: coeffs[2],
        residual_rms: (sq / samples.len() as f64).sqrt(),
    })
}
