//! Finite-dimensional commutative associative unital algebras presented by a
//! structure-constant table over an exact field.
//!
//! Elements are coordinate vectors in the chosen basis. Construction
//! validates commutativity, associativity and the unit eagerly and names the
//! offending basis indices on failure, so everything downstream may assume a
//! genuine commutative algebra.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::field_linalg::{FieldTag, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraError {
    ZeroDimension,
    BadShape { what: &'static str, expected: usize, got: usize },
    FieldMismatch,
    NotCommutative { i: usize, j: usize },
    NotAssociative { i: usize, j: usize, k: usize },
    UnitNotNeutral { i: usize },
    NotGraded,
    GradingMismatch { i: usize, j: usize, k: usize },
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::ZeroDimension => write!(f, "algebra dimension must be at least 1"),
            AlgebraError::BadShape { what, expected, got } => {
                write!(f, "bad shape for {what}: expected {expected}, got {got}")
            }
            AlgebraError::FieldMismatch => write!(f, "field mismatch"),
            AlgebraError::NotCommutative { i, j } => {
                write!(f, "multiplication table is not commutative at ({i}, {j})")
            }
            AlgebraError::NotAssociative { i, j, k } => {
                write!(f, "multiplication table is not associative at ({i}, {j}, {k})")
            }
            AlgebraError::UnitNotNeutral { i } => {
                write!(f, "declared unit does not fix basis element {i}")
            }
            AlgebraError::NotGraded => {
                write!(f, "algebra carries no monomial grading (needed for the Euler derivation)")
            }
            AlgebraError::GradingMismatch { i, j, k } => write!(
                f,
                "grading is not additive: (e{i} * e{j}) has a component on e{k} of the wrong \
                 weight"
            ),
        }
    }
}

impl core::error::Error for AlgebraError {}

/// A commutative associative unital algebra of dimension `d` with a fixed
/// basis, exact structure constants, and optional monomial grading.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    dim: usize,
    tag: FieldTag,
    unit: Vec<Scalar>,
    /// `table[i * dim + j]` = coordinates of `e_i * e_j`.
    table: Vec<Vec<Scalar>>,
    labels: Vec<String>,
    /// Monomial weights when the algebra came from a graded constructor
    /// (weight of `x^k` is `k`, of `x^i y^j` is `i + j`).
    grading: Option<Vec<usize>>,
}

impl Algebra {
    /// Validates and builds an algebra from a `d x d` table of coordinate
    /// vectors. `labels` may be empty (defaults to `e0, e1, ...`).
    pub fn new(
        tag: FieldTag,
        dim: usize,
        unit: Vec<Scalar>,
        table: Vec<Vec<Scalar>>,
        labels: Vec<String>,
    ) -> Result<Algebra, AlgebraError> {
        if dim == 0 {
            return Err(AlgebraError::ZeroDimension);
        }
        if unit.len() != dim {
            return Err(AlgebraError::BadShape { what: "unit", expected: dim, got: unit.len() });
        }
        if table.len() != dim * dim {
            return Err(AlgebraError::BadShape {
                what: "table",
                expected: dim * dim,
                got: table.len(),
            });
        }
        for row in &table {
            if row.len() != dim {
                return Err(AlgebraError::BadShape {
                    what: "table entry",
                    expected: dim,
                    got: row.len(),
                });
            }
        }
        if unit.iter().any(|v| v.tag() != tag)
            || table.iter().flatten().any(|v| v.tag() != tag)
        {
            return Err(AlgebraError::FieldMismatch);
        }
        let labels = if labels.is_empty() {
            (0..dim).map(|i| format!("e{i}")).collect()
        } else {
            if labels.len() != dim {
                return Err(AlgebraError::BadShape {
                    what: "labels",
                    expected: dim,
                    got: labels.len(),
                });
            }
            labels
        };
        let a = Algebra { dim, tag, unit, table, labels, grading: None };
        a.validate()?;
        Ok(a)
    }

    /// Attaches a monomial grading, after checking it is additive on every
    /// nonzero structure constant.
    pub fn with_grading(mut self, weights: Vec<usize>) -> Result<Algebra, AlgebraError> {
        if weights.len() != self.dim {
            return Err(AlgebraError::BadShape {
                what: "grading",
                expected: self.dim,
                got: weights.len(),
            });
        }
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                for (k, v) in self.table[i * d + j].iter().enumerate() {
                    if !v.is_zero() && weights[k] != weights[i] + weights[j] {
                        return Err(AlgebraError::GradingMismatch { i, j, k });
                    }
                }
            }
        }
        self.grading = Some(weights);
        Ok(self)
    }

    fn validate(&self) -> Result<(), AlgebraError> {
        let d = self.dim;
        for i in 0..d {
            for j in 0..i {
                if self.table[i * d + j] != self.table[j * d + i] {
                    return Err(AlgebraError::NotCommutative { i, j });
                }
            }
        }
        for i in 0..d {
            let e_i = self.basis_el(i);
            if self.mul(&self.unit, &e_i) != e_i {
                return Err(AlgebraError::UnitNotNeutral { i });
            }
        }
        for i in 0..d {
            for j in 0..d {
                let ij = &self.table[i * d + j];
                for k in 0..d {
                    let left = self.mul(ij, &self.basis_el(k));
                    let right = self.mul(&self.basis_el(i), &self.table[j * d + k]);
                    if left != right {
                        return Err(AlgebraError::NotAssociative { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn grading(&self) -> Option<&[usize]> {
        self.grading.as_deref()
    }

    pub fn unit_el(&self) -> Vec<Scalar> {
        self.unit.clone()
    }

    pub fn zero_el(&self) -> Vec<Scalar> {
        vec![Scalar::zero(self.tag); self.dim]
    }

    pub fn basis_el(&self, i: usize) -> Vec<Scalar> {
        let mut v = self.zero_el();
        v[i] = Scalar::one(self.tag);
        v
    }

    /// Product of two basis elements, straight from the table.
    pub fn basis_mul(&self, i: usize, j: usize) -> &[Scalar] {
        &self.table[i * self.dim + j]
    }

    /// Bilinear product of two coordinate vectors.
    pub fn mul(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        debug_assert_eq!(a.len(), self.dim);
        debug_assert_eq!(b.len(), self.dim);
        let mut out = self.zero_el();
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let c = ai * bj;
                for (o, t) in out.iter_mut().zip(self.table[i * self.dim + j].iter()) {
                    if !t.is_zero() {
                        *o = &*o + &(&c * t);
                    }
                }
            }
        }
        out
    }

    /// Product of a sequence of elements; the empty product is the unit.
    pub fn product<'a>(&self, factors: impl IntoIterator<Item = &'a [Scalar]>) -> Vec<Scalar> {
        let mut acc = self.unit_el();
        for f in factors {
            acc = self.mul(&acc, f);
        }
        acc
    }

    /// The ground field viewed as an algebra of dimension 1.
    pub fn ground(tag: FieldTag) -> Algebra {
        Algebra::truncated_poly(tag, 1)
    }

    /// Dual numbers `k[x]/(x^2)`.
    pub fn dual_numbers(tag: FieldTag) -> Algebra {
        Algebra::truncated_poly(tag, 2)
    }

    /// Truncated polynomial algebra `k[x]/(x^m)` with basis `1, x, ..,
    /// x^(m-1)` and monomial grading.
    pub fn truncated_poly(tag: FieldTag, m: usize) -> Algebra {
        assert!(m >= 1, "truncation order must be at least 1");
        let dim = m;
        let mut table = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut row = vec![Scalar::zero(tag); dim];
                if i + j < m {
                    row[i + j] = Scalar::one(tag);
                }
                table.push(row);
            }
        }
        let labels = (0..dim)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            })
            .collect();
        let mut unit = vec![Scalar::zero(tag); dim];
        unit[0] = Scalar::one(tag);
        let mut a = Algebra { dim, tag, unit, table, labels, grading: None };
        debug_assert!(a.validate().is_ok());
        a.grading = Some((0..dim).collect());
        a
    }

    /// Tensor product of two truncated polynomial algebras,
    /// `k[x]/(x^m) (x) k[y]/(y^n)`, basis `x^i y^j` ordered by `(i, j)`,
    /// graded by total degree `i + j`.
    pub fn truncated_poly2(tag: FieldTag, m: usize, n: usize) -> Algebra {
        assert!(m >= 1 && n >= 1, "truncation orders must be at least 1");
        let dim = m * n;
        let idx = |i: usize, j: usize| i * n + j;
        let mut table = Vec::with_capacity(dim * dim);
        for a in 0..dim {
            let (i1, j1) = (a / n, a % n);
            for b in 0..dim {
                let (i2, j2) = (b / n, b % n);
                let mut row = vec![Scalar::zero(tag); dim];
                if i1 + i2 < m && j1 + j2 < n {
                    row[idx(i1 + i2, j1 + j2)] = Scalar::one(tag);
                }
                table.push(row);
            }
        }
        let power = |name: &str, e: usize| match e {
            0 => String::new(),
            1 => name.to_string(),
            _ => format!("{name}^{e}"),
        };
        let labels = (0..dim)
            .map(|a| {
                let (i, j) = (a / n, a % n);
                let (px, py) = (power("x", i), power("y", j));
                match (px.is_empty(), py.is_empty()) {
                    (true, true) => "1".to_string(),
                    (false, true) => px,
                    (true, false) => py,
                    (false, false) => format!("{px}*{py}"),
                }
            })
            .collect();
        let mut unit = vec![Scalar::zero(tag); dim];
        unit[0] = Scalar::one(tag);
        let mut alg = Algebra { dim, tag, unit, table, labels, grading: None };
        debug_assert!(alg.validate().is_ok());
        alg.grading = Some((0..dim).map(|a| a / n + a % n).collect());
        alg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> FieldTag {
        FieldTag::Fp(101)
    }

    fn s(v: i64) -> Scalar {
        Scalar::from_i64(t(), v)
    }

    #[test]
    fn truncated_poly_products() {
        let a = Algebra::truncated_poly(t(), 3);
        assert_eq!(a.dim(), 3);
        // x * x = x^2, x * x^2 = 0.
        assert_eq!(a.basis_mul(1, 1), &a.basis_el(2)[..]);
        assert!(a.basis_mul(1, 2).iter().all(Scalar::is_zero));
        assert_eq!(a.labels(), &["1", "x", "x^2"]);
        assert_eq!(a.grading(), Some(&[0, 1, 2][..]));
        // (1 + x)^2 = 1 + 2x + x^2.
        let one_plus_x = vec![s(1), s(1), s(0)];
        assert_eq!(a.mul(&one_plus_x, &one_plus_x), vec![s(1), s(2), s(1)]);
    }

    #[test]
    fn two_variable_truncation() {
        let a = Algebra::truncated_poly2(t(), 2, 2);
        assert_eq!(a.dim(), 4);
        assert_eq!(a.labels(), &["1", "y", "x", "x*y"]);
        assert_eq!(a.grading(), Some(&[0, 1, 1, 2][..]));
        // x * y = xy, (xy) * x = 0.
        assert_eq!(a.basis_mul(2, 1), &a.basis_el(3)[..]);
        assert!(a.basis_mul(3, 2).iter().all(Scalar::is_zero));
    }

    #[test]
    fn empty_product_is_unit() {
        let a = Algebra::dual_numbers(t());
        assert_eq!(a.product([]), a.unit_el());
        let fs = [a.basis_el(1), a.basis_el(1)];
        assert_eq!(a.product(fs.iter().map(|v| &v[..])), a.zero_el());
    }

    #[test]
    fn rejects_noncommutative_table() {
        // e1 * e0 = 0 but e0 * e1 = e1.
        let z = || vec![Scalar::zero(t()), Scalar::zero(t())];
        let e1 = || vec![s(0), s(1)];
        let table = vec![vec![s(1), s(0)], e1(), z(), z()];
        let unit = vec![s(1), s(0)];
        let err = Algebra::new(t(), 2, unit, table, Vec::new()).unwrap_err();
        assert_eq!(err, AlgebraError::NotCommutative { i: 1, j: 0 });
    }

    #[test]
    fn rejects_nonassociative_table() {
        // Commutative unital dim 3: u*u = v, u*v = 1, v*v = 0 gives
        // (u*u)*v = 0 but u*(u*v) = u.
        let s3 = |a: i64, b: i64, c: i64| vec![s(a), s(b), s(c)];
        let table = vec![
            s3(1, 0, 0), s3(0, 1, 0), s3(0, 0, 1), // 1 * -
            s3(0, 1, 0), s3(0, 0, 1), s3(1, 0, 0), // u * -
            s3(0, 0, 1), s3(1, 0, 0), s3(0, 0, 0), // v * -
        ];
        let err = Algebra::new(t(), 3, s3(1, 0, 0), table, Vec::new()).unwrap_err();
        assert_eq!(err, AlgebraError::NotAssociative { i: 1, j: 1, k: 2 });
    }

    #[test]
    fn rejects_bad_unit() {
        // Table of k[x]/(x^2) but declared unit = x.
        let good = Algebra::truncated_poly(t(), 2);
        let table: Vec<Vec<Scalar>> = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| good.basis_mul(i, j).to_vec())
            .collect();
        let err = Algebra::new(t(), 2, vec![s(0), s(1)], table, Vec::new()).unwrap_err();
        assert_eq!(err, AlgebraError::UnitNotNeutral { i: 0 });
    }

    #[test]
    fn rational_algebra_works() {
        let a = Algebra::truncated_poly(FieldTag::Rat, 4);
        let half_x = vec![
            Scalar::zero(FieldTag::Rat),
            Scalar::rational(1, 2).unwrap(),
            Scalar::zero(FieldTag::Rat),
            Scalar::zero(FieldTag::Rat),
        ];
        let sq = a.mul(&half_x, &half_x);
        assert_eq!(sq[2], Scalar::rational(1, 4).unwrap());
    }

    #[test]
    fn gradings_must_be_additive() {
        let base = Algebra::truncated_poly(FieldTag::Rat, 3);
        let rebuilt = Algebra::new(
            FieldTag::Rat,
            3,
            base.unit_el().to_vec(),
            (0..3)
                .flat_map(|i| (0..3).map(move |j| (i, j)))
                .map(|(i, j)| base.basis_mul(i, j).to_vec())
                .collect(),
            Vec::new(),
        )
        .unwrap();
        assert!(rebuilt.grading().is_none());
        let graded = rebuilt.clone().with_grading(vec![0, 1, 2]).unwrap();
        assert_eq!(graded.grading(), Some(&[0, 1, 2][..]));
        let err = rebuilt.with_grading(vec![0, 1, 3]).unwrap_err();
        assert!(matches!(err, AlgebraError::GradingMismatch { .. }));
    }
}
