//! Symmetric coefficient tensors for the quadratic, cubic, and quartic
//! components. Tensors are symmetrized on construction so that equality
//! checks and the uniqueness tests can compare entrywise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Point, Value};

/// Dense symmetric tensor of a fixed rank, one block per output coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor {
    rank: usize,
    dim: usize,
    out_dim: usize,
    /// `[out][dim^rank]`, row-major over the index tuple.
    data: Vec<f64>,
}

impl SymTensor {
    pub fn new(rank: usize, dim: usize, out_dim: usize, raw: Vec<f64>) -> Result<Self> {
        if !(2..=4).contains(&rank) {
            return Err(Error::InvalidInput(format!(
                "unsupported tensor rank {rank}"
            )));
        }
        if dim == 0 || out_dim == 0 {
            return Err(Error::InvalidInput(
                "tensor dimensions must be positive".into(),
            ));
        }
        let block = dim.pow(rank as u32);
        if raw.len() != out_dim * block {
            return Err(Error::DimensionMismatch {
                expected: out_dim * block,
                actual: raw.len(),
            });
        }
        if raw.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                context: "tensor coefficients",
            });
        }
        let mut t = SymTensor {
            rank,
            dim,
            out_dim,
            data: raw,
        };
        t.symmetrize();
        Ok(t)
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    fn symmetrize(&mut self) {
        let block = self.dim.pow(self.rank as u32);
        let mut idx = vec![0usize; self.rank];
        for out in 0..self.out_dim {
            let base = out * block;
            let input = self.data[base..base + block].to_vec();
            idx.iter_mut().for_each(|i| *i = 0);
            loop {
                let mut sum = 0.0;
                let mut count = 0.0;
                let mut perm = idx.clone();
                let dim = self.dim;
                permutations(&mut perm, 0, &mut |p| {
                    sum += input[p.iter().fold(0, |acc, &i| acc * dim + i)];
                    count += 1.0;
                });
                let flat = self.flat(&idx);
                self.data[base + flat] = sum / count;
                if !advance(&mut idx, self.dim) {
                    break;
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn entry(&self, out: usize, idx: &[usize]) -> f64 {
        let block = self.dim.pow(self.rank as u32);
        self.data[out * block + self.flat(idx)]
    }

    /// Largest entrywise absolute difference against another tensor.
    pub fn max_abs_diff(&self, other: &SymTensor) -> Result<f64> {
        if self.rank != other.rank || self.dim != other.dim || self.out_dim != other.out_dim {
            return Err(Error::DimensionMismatch {
                expected: self.data.len(),
                actual: other.data.len(),
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Diagonal evaluation `x -> T(x, ..., x)`.
    pub fn eval(&self, x: &Point) -> Result<Value> {
        let args = vec![x; self.rank];
        self.eval_multi(&args)
    }

    /// Multilinear evaluation at `rank` separate arguments.
    pub fn eval_multi(&self, args: &[&Point]) -> Result<Value> {
        if args.len() != self.rank {
            return Err(Error::Arity {
                expected: self.rank,
                actual: args.len(),
            });
        }
        for a in args {
            if a.dim() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    actual: a.dim(),
                });
            }
        }
        let block = self.dim.pow(self.rank as u32);
        let mut out = vec![0.0; self.out_dim];
        let mut idx = vec![0usize; self.rank];
        loop {
            let mut weight = 1.0;
            for (slot, &i) in idx.iter().enumerate() {
                weight *= args[slot].coords()[i];
            }
            if weight != 0.0 {
                let flat = self.flat(&idx);
                for (o, acc) in out.iter_mut().enumerate() {
                    *acc += weight * self.data[o * block + flat];
                }
            }
            if !advance(&mut idx, self.dim) {
                break;
            }
        }
        Value::new(out)
    }

    fn to_nested(&self) -> serde_json::Value {
        fn build(data: &[f64], dims: &[usize]) -> serde_json::Value {
            if dims.is_empty() {
                return serde_json::json!(data[0]);
            }
            let chunk = data.len() / dims[0];
            serde_json::Value::Array(
                (0..dims[0])
                    .map(|i| build(&data[i * chunk..(i + 1) * chunk], &dims[1..]))
                    .collect(),
            )
        }
        let mut dims = vec![self.out_dim];
        dims.extend(std::iter::repeat_n(self.dim, self.rank));
        build(&self.data, &dims)
    }
}

fn advance(idx: &mut [usize], dim: usize) -> bool {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < dim {
            return true;
        }
        idx[i] = 0;
    }
    false
}

fn permutations(idx: &mut Vec<usize>, from: usize, visit: &mut impl FnMut(&[usize])) {
    if from == idx.len() {
        visit(idx);
        return;
    }
    for i in from..idx.len() {
        idx.swap(from, i);
        permutations(idx, from + 1, visit);
        idx.swap(from, i);
    }
}

fn flatten_nested(v: &serde_json::Value, out: &mut Vec<f64>) -> Result<()> {
    match v {
        serde_json::Value::Array(items) => {
            for item in items {
                flatten_nested(item, out)?;
            }
            Ok(())
        }
        serde_json::Value::Number(n) => {
            out.push(n.as_f64().ok_or(Error::NonFinite {
                context: "tensor coefficients",
            })?);
            Ok(())
        }
        _ => Err(Error::InvalidInput(
            "tensor coefficients must be nested arrays of numbers".into(),
        )),
    }
}

fn nested_dims(v: &serde_json::Value) -> Vec<usize> {
    let mut dims = Vec::new();
    let mut cur = v;
    while let serde_json::Value::Array(items) = cur {
        dims.push(items.len());
        match items.first() {
            Some(first) => cur = first,
            None => break,
        }
    }
    dims
}

macro_rules! form_type {
    ($name:ident, $rank:literal, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(try_from = "FormRepr", into = "FormRepr")]
        pub struct $name(SymTensor);

        impl $name {
            /// Builds the form from raw coefficients, symmetrizing them.
            /// `raw` is `[out][dim^rank]` row-major.
            pub fn new(dim: usize, out_dim: usize, raw: Vec<f64>) -> Result<Self> {
                Ok(Self(SymTensor::new($rank, dim, out_dim, raw)?))
            }

            /// One-dimensional form with a single diagonal coefficient.
            pub fn scalar(coefficient: f64) -> Result<Self> {
                Self::new(1, 1, vec![coefficient])
            }

            pub fn dim(&self) -> usize {
                self.0.dim()
            }

            pub fn out_dim(&self) -> usize {
                self.0.out_dim()
            }

            pub fn tensor(&self) -> &SymTensor {
                &self.0
            }

            /// Diagonal evaluation.
            pub fn eval(&self, x: &Point) -> Result<Value> {
                self.0.eval(x)
            }
        }

        impl TryFrom<FormRepr> for $name {
            type Error = Error;

            fn try_from(repr: FormRepr) -> Result<Self> {
                if repr.degree != $rank {
                    return Err(Error::InvalidInput(format!(
                        "expected degree {}, got {}",
                        $rank, repr.degree
                    )));
                }
                let dims = nested_dims(&repr.coefficients);
                if dims.len() != $rank + 1 {
                    return Err(Error::InvalidInput(format!(
                        "degree-{} coefficients need {} nesting levels",
                        $rank,
                        $rank + 1
                    )));
                }
                let mut raw = Vec::new();
                flatten_nested(&repr.coefficients, &mut raw)?;
                Self::new(dims[1], dims[0], raw)
            }
        }

        impl From<$name> for FormRepr {
            fn from(form: $name) -> FormRepr {
                FormRepr {
                    degree: $rank,
                    coefficients: form.0.to_nested(),
                }
            }
        }
    };
}

/// Wire format shared by the three forms: a degree tag plus nested
/// coefficient arrays (`[out][dim]...[dim]`).
#[derive(Debug, Clone, Serialize, Deserialize)]
struct FormRepr {
    degree: usize,
    coefficients: serde_json::Value,
}

form_type!(
    QuadraticForm,
    2,
    "Symmetric bilinear coefficients; evaluates as `x -> sum m[i][j] x_i x_j` per output coordinate."
);
form_type!(
    CubicForm,
    3,
    "Symmetric trilinear coefficients; evaluates the rank-3 diagonal."
);
form_type!(
    QuarticForm,
    4,
    "Symmetric quadrilinear coefficients; evaluates the rank-4 diagonal."
);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_forms_evaluate_monomials() {
        let q = QuadraticForm::scalar(2.0).unwrap();
        let c = CubicForm::scalar(3.0).unwrap();
        let h = QuarticForm::scalar(4.0).unwrap();
        let x = Point::scalar(2.0).unwrap();
        assert_eq!(q.eval(&x).unwrap().as_scalar().unwrap(), 8.0);
        assert_eq!(c.eval(&x).unwrap().as_scalar().unwrap(), 24.0);
        assert_eq!(h.eval(&x).unwrap().as_scalar().unwrap(), 64.0);
    }

    #[test]
    fn construction_symmetrizes() {
        // Asymmetric input [[0, 2], [0, 0]] averages to [[0, 1], [1, 0]].
        let q = QuadraticForm::new(2, 1, vec![0.0, 2.0, 0.0, 0.0]).unwrap();
        assert_eq!(q.tensor().entry(0, &[0, 1]), 1.0);
        assert_eq!(q.tensor().entry(0, &[1, 0]), 1.0);
        let x = Point::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(q.eval(&x).unwrap().as_scalar().unwrap(), 2.0);
    }

    #[test]
    fn cubic_symmetry_under_all_permutations() {
        let mut raw = vec![0.0; 8];
        raw[0b001] = 6.0; // t[0][0][1]
        let c = CubicForm::new(2, 1, raw).unwrap();
        for idx in [[0, 0, 1], [0, 1, 0], [1, 0, 0]] {
            assert_eq!(c.tensor().entry(0, &idx), 2.0);
        }
    }

    #[test]
    fn json_round_trip() {
        let q = QuadraticForm::new(2, 1, vec![1.0, 0.5, 0.5, 2.0]).unwrap();
        let text = serde_json::to_string(&q).unwrap();
        assert!(text.contains("\"degree\":2"));
        let back: QuadraticForm = serde_json::from_str(&text).unwrap();
        assert_eq!(back.tensor().max_abs_diff(q.tensor()).unwrap(), 0.0);
    }

    #[test]
    fn degree_mismatch_rejected() {
        let text = r#"{"degree":3,"coefficients":[[[1.0]]]}"#;
        assert!(serde_json::from_str::<QuadraticForm>(text).is_err());
    }

    #[test]
    fn multilinear_evaluation_on_basis() {
        let q = QuadraticForm::new(2, 1, vec![1.0, 2.0, 2.0, 5.0]).unwrap();
        let e0 = Point::new(vec![1.0, 0.0]).unwrap();
        let e1 = Point::new(vec![0.0, 1.0]).unwrap();
        let v = q.tensor().eval_multi(&[&e0, &e1]).unwrap();
        assert_eq!(v.as_scalar().unwrap(), 2.0);
    }
}
