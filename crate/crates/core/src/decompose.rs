//! Constructive decomposition machinery: the extraction maps `g` and `h`
//! that isolate the quadratic and quartic components of an even function,
//! recombination, quadratic polarization, finite-difference
//! multilinearization, and exact-solution construction from forms.
//!
//! For an even function `e`, `g(x) = e(2x) - 16 e(x)` annihilates the
//! quartic component and scales the quadratic one by -12, while
//! `h(x) = e(2x) - 4 e(x)` annihilates the quadratic component and scales
//! the quartic one by 12; `e = (h - g) / 12` recovers the input.

use crate::error::{Error, Result};
use crate::forms::{CubicForm, QuadraticForm, QuarticForm};
use crate::function::FunctionHandle;
use crate::space::{Point, Value};

fn doubling_difference(f_even: &FunctionHandle, subtract: f64) -> Result<FunctionHandle> {
    let doubled = f_even.scale_argument(2.0)?;
    doubled.sub(&f_even.scale_output(subtract))
}

/// `x -> e(2x) - 16 e(x)`: quadratic for exact even solutions of the mixed
/// equation (the quadratic component scaled by -12).
pub fn extract_g(f_even: &FunctionHandle) -> Result<FunctionHandle> {
    doubling_difference(f_even, 16.0)
}

/// `x -> e(2x) - 4 e(x)`: quartic for exact even solutions of the mixed
/// equation (the quartic component scaled by 12).
pub fn extract_h(f_even: &FunctionHandle) -> Result<FunctionHandle> {
    doubling_difference(f_even, 4.0)
}

/// `(h - g) / 12`, the inverse of the `g`/`h` extraction pair.
pub fn recombine(g: &FunctionHandle, h: &FunctionHandle) -> Result<FunctionHandle> {
    Ok(h.sub(g)?.scale_output(1.0 / 12.0))
}

/// The polarization `B(x, y) = (f(x+y) - f(x-y)) / 4`. When `f` is an
/// exact quadratic this is the symmetric bilinear form with `B(x, x) =
/// f(x)`; for anything else the bilinearity check fails, which callers use
/// as a negative control.
pub fn polarize_quadratic(f: &FunctionHandle, x: &Point, y: &Point) -> Result<Value> {
    let plus = f.eval(&x.add(y)?)?;
    let minus = f.eval(&Point::linear_combination(&[(1.0, x), (-1.0, y)])?)?;
    plus.sub(&minus)?.scaled(0.25)
}

/// The symmetric `degree`-linear form of an (approximately) homogeneous
/// polynomial, recovered by iterated forward differences at the origin:
/// `(1/degree!) * (Delta_{a_1} ... Delta_{a_degree} f)(0)`.
///
/// For an exact degree-k homogeneous polynomial this equals the unique
/// symmetric k-linear form evaluated at the arguments; in particular the
/// diagonal reproduces `f`.
pub fn multilinearize(f: &FunctionHandle, degree: usize, args: &[Point]) -> Result<Value> {
    if !(2..=4).contains(&degree) {
        return Err(Error::InvalidInput(format!(
            "multilinearize supports degrees 2..=4, got {degree}"
        )));
    }
    if args.len() != degree {
        return Err(Error::Arity {
            expected: degree,
            actual: args.len(),
        });
    }
    let dim = f.dim_in();
    for a in args {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: a.dim(),
            });
        }
    }
    let mut acc = vec![0.0; f.dim_out()];
    for mask in 0..(1u32 << degree) {
        let picked: Vec<(f64, &Point)> = (0..degree)
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| (1.0, &args[k]))
            .collect();
        let at = if picked.is_empty() {
            Point::zero(dim)
        } else {
            Point::linear_combination(&picked)?
        };
        let sign = if (degree as u32 - mask.count_ones()).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        let v = f.eval(&at)?;
        for (a, c) in acc.iter_mut().zip(v.coords()) {
            *a += sign * c;
        }
    }
    let factorial: f64 = (1..=degree).product::<usize>() as f64;
    Value::new(acc)?.scaled(1.0 / factorial)
}

fn basis(dim: usize, i: usize) -> Point {
    let mut coords = vec![0.0; dim];
    coords[i] = 1.0;
    Point::new(coords).expect("basis vector is finite")
}

fn tensor_entries(f: &FunctionHandle, degree: usize) -> Result<Vec<f64>> {
    let dim = f.dim_in();
    let out = f.dim_out();
    let block = dim.pow(degree as u32);
    let mut raw = vec![0.0; out * block];
    let mut idx = vec![0usize; degree];
    loop {
        let args: Vec<Point> = idx.iter().map(|&i| basis(dim, i)).collect();
        let v = multilinearize(f, degree, &args)?;
        let flat = idx.iter().fold(0, |acc, &i| acc * dim + i);
        for (o, c) in v.coords().iter().enumerate() {
            raw[o * block + flat] = *c;
        }
        let mut k = degree;
        loop {
            if k == 0 {
                return Ok(raw);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < dim {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Full symmetric bilinear coefficient tensor of a quadratic-like handle.
pub fn quadratic_form_of(f: &FunctionHandle) -> Result<QuadraticForm> {
    QuadraticForm::new(f.dim_in(), f.dim_out(), tensor_entries(f, 2)?)
}

/// Full symmetric trilinear coefficient tensor of a cubic-like handle.
pub fn cubic_form_of(f: &FunctionHandle) -> Result<CubicForm> {
    CubicForm::new(f.dim_in(), f.dim_out(), tensor_entries(f, 3)?)
}

/// Full symmetric quadrilinear coefficient tensor of a quartic-like handle.
pub fn quartic_form_of(f: &FunctionHandle) -> Result<QuarticForm> {
    QuarticForm::new(f.dim_in(), f.dim_out(), tensor_entries(f, 4)?)
}

/// Builds the exact solution `x -> Q1(x,x) + C(x,x,x) + Q2(x,x,x,x)`.
/// The result lies in the kernel of the mixed difference operator.
pub fn build_solution(
    q1: &QuadraticForm,
    c: &CubicForm,
    q2: &QuarticForm,
) -> Result<FunctionHandle> {
    FunctionHandle::from_forms(q1, c, q2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffops::{d_cubic, d_mixed, d_quadratic, d_quartic, even_odd_split};
    use proptest::prelude::*;

    fn pt(x: f64) -> Point {
        Point::scalar(x).unwrap()
    }

    fn even_poly(a: f64, c: f64) -> FunctionHandle {
        FunctionHandle::poly1(a, 0.0, c).unwrap()
    }

    #[test]
    fn g_scales_quadratic_and_kills_quartic() {
        let fe = even_poly(3.0, 7.0);
        let g = extract_g(&fe).unwrap();
        for x in [-2.0, -0.5, 1.0, 1.75] {
            let got = g.eval(&pt(x)).unwrap().as_scalar().unwrap();
            let want = -12.0 * 3.0 * x * x;
            assert!((got - want).abs() <= 1e-10 * (1.0 + want.abs()));
        }
        let pure_quartic = even_poly(0.0, 1.0);
        let g = extract_g(&pure_quartic).unwrap();
        assert_eq!(g.eval(&pt(1.5)).unwrap().as_scalar().unwrap(), 0.0);
    }

    #[test]
    fn h_scales_quartic_and_kills_quadratic() {
        let fe = even_poly(3.0, 7.0);
        let h = extract_h(&fe).unwrap();
        for x in [-2.0, -0.5, 1.0, 1.75] {
            let got = h.eval(&pt(x)).unwrap().as_scalar().unwrap();
            let want = 12.0 * 7.0 * x.powi(4);
            assert!((got - want).abs() <= 1e-10 * (1.0 + want.abs()));
        }
        let pure_quadratic = even_poly(1.0, 0.0);
        let h = extract_h(&pure_quadratic).unwrap();
        assert_eq!(h.eval(&pt(1.5)).unwrap().as_scalar().unwrap(), 0.0);
    }

    #[test]
    fn zero_input_gives_zero_extractions() {
        let zero = FunctionHandle::zero(1, 1);
        let g = extract_g(&zero).unwrap();
        let h = extract_h(&zero).unwrap();
        assert_eq!(g.eval(&pt(2.0)).unwrap().as_scalar().unwrap(), 0.0);
        assert_eq!(h.eval(&pt(2.0)).unwrap().as_scalar().unwrap(), 0.0);
    }

    #[test]
    fn recombine_inverts_extraction_pair() {
        let g = FunctionHandle::poly1(-12.0, 0.0, 0.0).unwrap();
        let h = FunctionHandle::poly1(0.0, 0.0, 12.0).unwrap();
        let f = recombine(&g, &h).unwrap();
        let got = f.eval(&pt(2.0)).unwrap().as_scalar().unwrap();
        assert!((got - (4.0 + 16.0)).abs() < 1e-12);
        // g = h collapses to zero.
        let same = recombine(&g, &g).unwrap();
        assert_eq!(same.eval(&pt(3.0)).unwrap().as_scalar().unwrap(), 0.0);
    }

    #[test]
    fn polarization_of_quadratic_is_bilinear() {
        let f = FunctionHandle::poly1(2.5, 0.0, 0.0).unwrap();
        let b = polarize_quadratic(&f, &pt(3.0), &pt(-1.5)).unwrap();
        assert!((b.as_scalar().unwrap() - 2.5 * 3.0 * -1.5).abs() < 1e-10);
    }

    #[test]
    fn polarization_of_euclidean_square_is_dot_product() {
        let f = FunctionHandle::from_fn(2, 1, "|x|^2", |p| {
            Value::scalar(p.coords().iter().map(|c| c * c).sum())
        });
        let x = Point::new(vec![1.0, 0.0]).unwrap();
        let y = Point::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(
            polarize_quadratic(&f, &x, &y).unwrap().as_scalar().unwrap(),
            0.0
        );
    }

    #[test]
    fn polarization_flags_quartic_input() {
        let f = FunctionHandle::poly1(0.0, 0.0, 1.0).unwrap();
        let b11 = polarize_quadratic(&f, &pt(1.0), &pt(1.0))
            .unwrap()
            .as_scalar()
            .unwrap();
        let b21 = polarize_quadratic(&f, &pt(2.0), &pt(1.0))
            .unwrap()
            .as_scalar()
            .unwrap();
        assert_eq!(b11, 4.0);
        assert_eq!(b21, 20.0);
        // Bilinearity would require b21 = 2 * b11.
        assert!((b21 - 2.0 * b11).abs() > 1.0);
    }

    #[test]
    fn multilinearize_matches_known_differences() {
        let cu = FunctionHandle::poly1(0.0, 1.0, 0.0).unwrap();
        let ones = vec![pt(1.0), pt(1.0), pt(1.0)];
        let v = multilinearize(&cu, 3, &ones).unwrap();
        assert!((v.as_scalar().unwrap() - 1.0).abs() < 1e-12);

        let qu = FunctionHandle::poly1(0.0, 0.0, 1.0).unwrap();
        let ones4 = vec![pt(1.0); 4];
        let v = multilinearize(&qu, 4, &ones4).unwrap();
        assert!((v.as_scalar().unwrap() - 1.0).abs() < 1e-12);

        // A zero direction collapses the difference.
        let v = multilinearize(&qu, 2, &[pt(0.0), pt(3.0)]).unwrap();
        assert_eq!(v.as_scalar().unwrap(), 0.0);
    }

    #[test]
    fn multilinearize_checks_arity() {
        let f = FunctionHandle::poly1(1.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            multilinearize(&f, 3, &[pt(1.0), pt(1.0)]),
            Err(Error::Arity { .. })
        ));
    }

    #[test]
    fn build_solution_lands_in_kernel() {
        let f = build_solution(
            &QuadraticForm::scalar(1.0).unwrap(),
            &CubicForm::scalar(1.0).unwrap(),
            &QuarticForm::scalar(1.0).unwrap(),
        )
        .unwrap();
        let v = d_mixed(&f, &pt(1.0), &pt(1.0)).unwrap();
        assert!(v.as_scalar().unwrap().abs() < 1e-9);
        let zero = build_solution(
            &QuadraticForm::scalar(0.0).unwrap(),
            &CubicForm::scalar(0.0).unwrap(),
            &QuarticForm::scalar(0.0).unwrap(),
        )
        .unwrap();
        assert_eq!(zero.eval(&pt(2.0)).unwrap().as_scalar().unwrap(), 0.0);
        let pure = build_solution(
            &QuadraticForm::scalar(2.0).unwrap(),
            &CubicForm::scalar(0.0).unwrap(),
            &QuarticForm::scalar(0.0).unwrap(),
        )
        .unwrap();
        assert_eq!(
            d_quadratic(&pure, &pt(1.0), &pt(2.0))
                .unwrap()
                .as_scalar()
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn two_dimensional_solution_in_kernel() {
        let q1 = QuadraticForm::new(2, 1, vec![1.0, 0.5, 0.5, -2.0]).unwrap();
        let mut c_raw = vec![0.0; 8];
        c_raw[0] = 1.0; // x0^3
        c_raw[7] = -0.5; // x1^3
        let c = CubicForm::new(2, 1, c_raw).unwrap();
        let mut q_raw = vec![0.0; 16];
        q_raw[0] = 0.25; // x0^4
        let q2 = QuarticForm::new(2, 1, q_raw).unwrap();
        let f = build_solution(&q1, &c, &q2).unwrap();
        for (x, y) in [
            (vec![1.0, -0.5], vec![0.5, 2.0]),
            (vec![-2.0, 1.0], vec![1.0, 1.0]),
        ] {
            let r = crate::diffops::equation_residual(
                crate::diffops::EquationKind::Mixed,
                &f,
                &Point::new(x).unwrap(),
                &Point::new(y).unwrap(),
            )
            .unwrap();
            assert!(r.normalized(crate::space::NormSpec::MaxCoordinate) <= 1e-9);
        }
    }

    #[test]
    fn tensor_recovery_round_trips_homogeneous_parts() {
        // Multilinearization recovers the tensor of each homogeneous
        // component; it is applied after the components are separated.
        let q1 = QuadraticForm::new(2, 1, vec![1.0, 0.5, 0.5, -2.0]).unwrap();
        let c = CubicForm::new(2, 1, {
            let mut raw = vec![0.0; 8];
            raw[0] = 3.0;
            raw[7] = -1.0;
            raw
        })
        .unwrap();
        let q2 = QuarticForm::new(2, 1, {
            let mut raw = vec![0.0; 16];
            raw[0] = 0.25;
            raw[15] = 1.5;
            raw
        })
        .unwrap();
        let f_q = {
            let q1 = q1.clone();
            FunctionHandle::from_fn(2, 1, "q1", move |x| q1.eval(x))
        };
        let f_c = {
            let c = c.clone();
            FunctionHandle::from_fn(2, 1, "c", move |x| c.eval(x))
        };
        let f_h = {
            let q2 = q2.clone();
            FunctionHandle::from_fn(2, 1, "q2", move |x| q2.eval(x))
        };
        let q1_back = quadratic_form_of(&f_q).unwrap();
        assert!(q1_back.tensor().max_abs_diff(q1.tensor()).unwrap() < 1e-9);
        let c_back = cubic_form_of(&f_c).unwrap();
        assert!(c_back.tensor().max_abs_diff(c.tensor()).unwrap() < 1e-9);
        let q2_back = quartic_form_of(&f_h).unwrap();
        assert!(q2_back.tensor().max_abs_diff(q2.tensor()).unwrap() < 1e-9);
    }

    #[test]
    fn corollary_style_component_checks() {
        // Even exact solutions: g output solves the quadratic equation,
        // h output solves the quartic one; odd exact solutions solve the
        // cubic equation directly.
        let f = FunctionHandle::poly1(2.0, -3.0, 1.5).unwrap();
        let (fe, fo) = even_odd_split(&f).unwrap();
        let g = extract_g(&fe).unwrap();
        let h = extract_h(&fe).unwrap();
        for (x, y) in [(1.0, 0.5), (-2.0, 1.5), (0.25, -1.0)] {
            let rq = d_quadratic(&g, &pt(x), &pt(y))
                .unwrap()
                .as_scalar()
                .unwrap();
            assert!(rq.abs() <= 1e-9 * (1.0 + 12.0 * 2.0 * (x * x + y * y)));
            let rh = d_quartic(&h, &pt(x), &pt(y)).unwrap().as_scalar().unwrap();
            assert!(rh.abs() <= 1e-8 * (1.0 + 12.0 * 1.5 * (x.powi(4) + y.powi(4))));
            let rc = d_cubic(&fo, &pt(x), &pt(y)).unwrap().as_scalar().unwrap();
            assert!(rc.abs() <= 1e-9 * (1.0 + 3.0 * (x.abs().powi(3) + y.abs().powi(3))));
        }
    }

    proptest! {
        // recombine(extract_g, extract_h) reproduces the even part.
        #[test]
        fn round_trip(a in -5.0f64..5.0, c in -5.0f64..5.0, x in -4.0f64..4.0) {
            let fe = even_poly(a, c);
            let g = extract_g(&fe).unwrap();
            let h = extract_h(&fe).unwrap();
            let back = recombine(&g, &h).unwrap();
            let want = fe.eval(&pt(x)).unwrap().as_scalar().unwrap();
            let got = back.eval(&pt(x)).unwrap().as_scalar().unwrap();
            prop_assert!((want - got).abs() <= 1e-10 * (1.0 + want.abs()));
        }

        // Polarization is bilinear for exact quadratics and matches the
        // diagonal.
        #[test]
        fn polarization_bilinearity(a in -5.0f64..5.0, alpha in -3.0f64..3.0,
                                    beta in -3.0f64..3.0, x1 in -2.0f64..2.0,
                                    x2 in -2.0f64..2.0, y in -2.0f64..2.0) {
            let f = FunctionHandle::poly1(a, 0.0, 0.0).unwrap();
            let combo = pt(alpha * x1 + beta * x2);
            let lhs = polarize_quadratic(&f, &combo, &pt(y)).unwrap().as_scalar().unwrap();
            let b1 = polarize_quadratic(&f, &pt(x1), &pt(y)).unwrap().as_scalar().unwrap();
            let b2 = polarize_quadratic(&f, &pt(x2), &pt(y)).unwrap().as_scalar().unwrap();
            let rhs = alpha * b1 + beta * b2;
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs().max(rhs.abs())));
            let diag = polarize_quadratic(&f, &pt(x1), &pt(x1)).unwrap().as_scalar().unwrap();
            let fx = f.eval(&pt(x1)).unwrap().as_scalar().unwrap();
            prop_assert!((diag - fx).abs() <= 1e-10 * (1.0 + fx.abs()));
        }

        // The multilinearization diagonal reproduces homogeneous inputs.
        #[test]
        fn multilinearize_diagonal(k in 2usize..=4, coeff in -5.0f64..5.0,
                                   x in -2.0f64..2.0) {
            let f = match k {
                2 => FunctionHandle::poly1(coeff, 0.0, 0.0).unwrap(),
                3 => FunctionHandle::poly1(0.0, coeff, 0.0).unwrap(),
                _ => FunctionHandle::poly1(0.0, 0.0, coeff).unwrap(),
            };
            let args = vec![pt(x); k];
            let got = multilinearize(&f, k, &args).unwrap().as_scalar().unwrap();
            let want = f.eval(&pt(x)).unwrap().as_scalar().unwrap();
            prop_assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()));
        }
    }
}
