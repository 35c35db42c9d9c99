//! The triangle-tensor cochain complex and its closed-form differential.
//!
//! A degree-`n` cochain is a multilinear map from `n(n-1)/2` copies of the
//! algebra — one tensor slot per index pair `(i, j)` with `1 <= i < j <= n`,
//! listed row by row — back into the algebra. The differential of `f` at an
//! upper-triangular input `T` of size `n + 1` is the alternating sum
//!
//! ```text
//! d f(T) = f(T drop row/col 1) * prod of row 1
//!        + sum_(i=1..n) (-1)^i T[i,i+1] * f(T with i, i+1 merged)
//!        + (-1)^(n+1) f(T drop row/col n+1) * prod of column n+1
//! ```
//!
//! where merging multiplies all entries that land on a common pair. This is
//! implemented directly from the index combinatorics; the generic simplicial
//! boundary in [`crate::simplicial`] recomputes the same operator along an
//! entirely different route and the two are compared in tests.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_core::RngCore;

use crate::algebra::Algebra;
use crate::field_linalg::{FieldTag, Matrix, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComplexError {
    CapExceeded { needed: usize, cap: usize },
    ShapeMismatch { what: &'static str },
}

impl fmt::Display for ComplexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexError::CapExceeded { needed, cap } => {
                write!(f, "cochain table of size {needed} exceeds the cap {cap}")
            }
            ComplexError::ShapeMismatch { what } => write!(f, "shape mismatch: {what}"),
        }
    }
}

impl core::error::Error for ComplexError {}

/// Number of tensor slots in degree `n`.
pub fn tri_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Slot of the pair `(i, j)`, `1 <= i < j <= n`, in row-major order.
pub fn pos_of_pair(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(1 <= i && i < j && j <= n);
    (i - 1) * (2 * n - i) / 2 + (j - i - 1)
}

/// Inverse of [`pos_of_pair`].
pub fn pair_of_pos(n: usize, p: usize) -> (usize, usize) {
    debug_assert!(p < tri_count(n));
    let mut i = 1;
    let mut base = 0;
    while base + (n - i) <= p {
        base += n - i;
        i += 1;
    }
    (i, i + 1 + (p - base))
}

/// Slot of the sphere-model element `D(a, b, c)` at level `n` under the
/// identification `D(a, b, c) <-> (a + 1, a + b + 2)`.
pub fn pos_of_simplex(n: usize, a: usize, b: usize) -> usize {
    pos_of_pair(n, a + 1, a + b + 2)
}

/// Inverse of [`pos_of_simplex`]: the composition `(a, b, c)` at slot `p`.
pub fn simplex_of_pos(n: usize, p: usize) -> (usize, usize, usize) {
    let (i, j) = pair_of_pos(n, p);
    (i - 1, j - i - 1, n - j)
}

/// Big-endian rank of a basis tuple with `d` symbols.
pub fn tuple_rank(d: usize, entries: &[usize]) -> usize {
    entries.iter().fold(0, |acc, &x| {
        debug_assert!(x < d);
        acc * d + x
    })
}

/// Inverse of [`tuple_rank`] for a fixed tuple length.
pub fn tuple_unrank(d: usize, len: usize, mut r: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for s in (0..len).rev() {
        out[s] = r % d;
        r /= d;
    }
    debug_assert_eq!(r, 0);
    out
}

/// Table length `d^slots * d` for degree `n`, checked against `cap`.
pub fn table_len(d: usize, n: usize, cap: usize) -> Result<usize, ComplexError> {
    let mut len = d;
    for _ in 0..tri_count(n) {
        len = len
            .checked_mul(d)
            .ok_or(ComplexError::CapExceeded { needed: usize::MAX, cap })?;
    }
    if len > cap {
        return Err(ComplexError::CapExceeded { needed: len, cap });
    }
    Ok(len)
}

/// A degree-`n` cochain tabulated on basis tuples: entry `r * d + o` is
/// coordinate `o` of the value on the tuple of rank `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    degree: usize,
    dim: usize,
    tag: FieldTag,
    values: Vec<Scalar>,
}

impl Cochain {
    pub fn zero(
        tag: FieldTag,
        dim: usize,
        degree: usize,
        cap: usize,
    ) -> Result<Cochain, ComplexError> {
        let len = table_len(dim, degree, cap)?;
        Ok(Cochain { degree, dim, tag, values: vec![Scalar::zero(tag); len] })
    }

    pub fn from_fn(
        tag: FieldTag,
        dim: usize,
        degree: usize,
        cap: usize,
        mut f: impl FnMut(&[usize]) -> Vec<Scalar>,
    ) -> Result<Cochain, ComplexError> {
        let mut c = Cochain::zero(tag, dim, degree, cap)?;
        let slots = tri_count(degree);
        for r in 0..c.values.len() / dim {
            let tuple = tuple_unrank(dim, slots, r);
            let v = f(&tuple);
            assert_eq!(v.len(), dim, "value must have one coordinate per basis element");
            c.values[r * dim..(r + 1) * dim].clone_from_slice(&v);
        }
        Ok(c)
    }

    /// The cochain dual to table entry `index` (a single 1 in the table).
    pub fn basis(
        tag: FieldTag,
        dim: usize,
        degree: usize,
        cap: usize,
        index: usize,
    ) -> Result<Cochain, ComplexError> {
        let mut c = Cochain::zero(tag, dim, degree, cap)?;
        c.values[index] = Scalar::one(tag);
        Ok(c)
    }

    pub fn random(
        tag: FieldTag,
        dim: usize,
        degree: usize,
        cap: usize,
        rng: &mut dyn RngCore,
    ) -> Result<Cochain, ComplexError> {
        let len = table_len(dim, degree, cap)?;
        let values = (0..len).map(|_| Scalar::random(tag, rng)).collect();
        Ok(Cochain { degree, dim, tag, values })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Scalar::is_zero)
    }

    /// Value on a tuple of basis elements, as a coordinate vector slice.
    pub fn value(&self, tuple: &[usize]) -> &[Scalar] {
        assert_eq!(tuple.len(), tri_count(self.degree));
        self.value_at_rank(tuple_rank(self.dim, tuple))
    }

    pub fn value_at_rank(&self, r: usize) -> &[Scalar] {
        &self.values[r * self.dim..(r + 1) * self.dim]
    }

    fn assert_same_shape(&self, other: &Cochain) {
        assert_eq!(self.degree, other.degree, "cochain degrees differ");
        assert_eq!(self.dim, other.dim, "cochain dimensions differ");
        assert_eq!(self.tag, other.tag, "cochain fields differ");
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        self.assert_same_shape(other);
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Cochain { values, ..*self }
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        self.assert_same_shape(other);
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Cochain { values, ..*self }
    }

    pub fn neg(&self) -> Cochain {
        Cochain { values: self.values.iter().map(|a| -a).collect(), ..*self }
    }

    pub fn scale(&self, s: &Scalar) -> Cochain {
        assert_eq!(s.tag(), self.tag, "scalar field differs");
        Cochain { values: self.values.iter().map(|a| a * s).collect(), ..*self }
    }

    /// The coefficient vector of the cochain in the table basis.
    pub fn to_vec(&self) -> Vec<Scalar> {
        self.values.clone()
    }

    pub fn from_vec(
        tag: FieldTag,
        dim: usize,
        degree: usize,
        values: Vec<Scalar>,
    ) -> Result<Cochain, ComplexError> {
        let expect = table_len(dim, degree, usize::MAX).map_err(|_| ComplexError::ShapeMismatch {
            what: "table length overflows",
        })?;
        if values.len() != expect {
            return Err(ComplexError::ShapeMismatch { what: "value vector length" });
        }
        Ok(Cochain { degree, dim, tag, values })
    }
}

/// One face of the differential: the slots of the big triangle whose product
/// multiplies the output, and for each slot of the small triangle the slots
/// whose product feeds it.
struct CollapsePlan {
    negative: bool,
    coeff_positions: Vec<usize>,
    groups: Vec<Vec<usize>>,
}

/// Plans for all `n + 2` faces of the differential out of degree `n`.
fn collapse_plans(n: usize) -> Vec<CollapsePlan> {
    let m = n + 1; // size of the input triangle
    let small = tri_count(n);
    let mut plans = Vec::with_capacity(n + 2);
    // Face 0: row 1 becomes the coefficient, the rest shifts down.
    plans.push(CollapsePlan {
        negative: false,
        coeff_positions: (2..=m).map(|j| pos_of_pair(m, 1, j)).collect(),
        groups: (0..small)
            .map(|q| {
                let (r, c) = pair_of_pos(n, q);
                vec![pos_of_pair(m, r + 1, c + 1)]
            })
            .collect(),
    });
    // Faces 1..n: entry (i, i+1) becomes the coefficient and indices i, i+1
    // merge, multiplying entries that land on a common pair.
    for i in 1..=n {
        let mu = |r: usize| if r <= i { r } else { r - 1 };
        let mut groups = vec![Vec::new(); small];
        for r in 1..m {
            for c in r + 1..=m {
                if (r, c) == (i, i + 1) {
                    continue;
                }
                groups[pos_of_pair(n, mu(r), mu(c))].push(pos_of_pair(m, r, c));
            }
        }
        plans.push(CollapsePlan {
            negative: i % 2 == 1,
            coeff_positions: vec![pos_of_pair(m, i, i + 1)],
            groups,
        });
    }
    // Face n + 1: column n + 1 becomes the coefficient.
    plans.push(CollapsePlan {
        negative: n % 2 == 0,
        coeff_positions: (1..=n).map(|j| pos_of_pair(m, j, m)).collect(),
        groups: (0..small)
            .map(|q| {
                let (r, c) = pair_of_pos(n, q);
                vec![pos_of_pair(m, r, c)]
            })
            .collect(),
    });
    plans
}

/// All basis tuples with nonzero coefficient in the multilinear expansion of
/// the given factors.
pub(crate) fn expand_factors(tag: FieldTag, factors: &[Vec<Scalar>]) -> Vec<(Vec<usize>, Scalar)> {
    let mut acc = vec![(Vec::new(), Scalar::one(tag))];
    for f in factors {
        let mut next = Vec::new();
        for (tuple, kappa) in &acc {
            for (c, v) in f.iter().enumerate() {
                if !v.is_zero() {
                    let mut t = tuple.clone();
                    t.push(c);
                    next.push((t, kappa * v));
                }
            }
        }
        acc = next;
        if acc.is_empty() {
            break;
        }
    }
    acc
}

/// Applies one collapse plan to a basis tuple of the input triangle,
/// yielding the coefficient element and the per-slot products.
fn apply_plan(alg: &Algebra, plan: &CollapsePlan, tuple: &[usize]) -> (Vec<Scalar>, Vec<Vec<Scalar>>) {
    let prod = |positions: &[usize]| -> Vec<Scalar> {
        let mut acc = alg.unit_el();
        for &p in positions {
            acc = alg.mul(&acc, &alg.basis_el(tuple[p]));
        }
        acc
    };
    let coeff = prod(&plan.coeff_positions);
    let inputs = plan.groups.iter().map(|g| prod(g)).collect();
    (coeff, inputs)
}

/// The differential applied to a cochain, evaluated slot by slot.
pub fn delta(alg: &Algebra, f: &Cochain, cap: usize) -> Result<Cochain, ComplexError> {
    assert_eq!(alg.dim(), f.dim(), "cochain dimension does not match the algebra");
    assert_eq!(alg.tag(), f.tag(), "cochain field does not match the algebra");
    let n = f.degree();
    let plans = collapse_plans(n);
    let d = alg.dim();
    Cochain::from_fn(alg.tag(), d, n + 1, cap, |tuple| {
        let mut out = alg.zero_el();
        for plan in &plans {
            let (coeff, inputs) = apply_plan(alg, plan, tuple);
            let mut acc = alg.zero_el();
            for (choice, kappa) in expand_factors(alg.tag(), &inputs) {
                for (a, v) in acc.iter_mut().zip(f.value(&choice)) {
                    *a = &*a + &(&kappa * v);
                }
            }
            let term = alg.mul(&coeff, &acc);
            for (o, t) in out.iter_mut().zip(term.iter()) {
                *o = if plan.negative { &*o - t } else { &*o + t };
            }
        }
        out
    })
}

/// Matrix of the differential out of degree `n` in the table bases
/// (rows: degree `n + 1`, columns: degree `n`).
pub fn delta_matrix(alg: &Algebra, n: usize, cap: usize) -> Result<Matrix, ComplexError> {
    let d = alg.dim();
    let tag = alg.tag();
    let cols = table_len(d, n, cap)?;
    let rows = table_len(d, n + 1, cap)?;
    let plans = collapse_plans(n);
    let slots = tri_count(n + 1);
    let mut triplets: Vec<(usize, usize, Scalar)> = Vec::new();
    for t_rank in 0..rows / d {
        let tuple = tuple_unrank(d, slots, t_rank);
        for plan in &plans {
            let (coeff, inputs) = apply_plan(alg, plan, &tuple);
            for (choice, kappa) in expand_factors(tag, &inputs) {
                let kappa = if plan.negative { -&kappa } else { kappa };
                let col_base = tuple_rank(d, &choice) * d;
                for o_in in 0..d {
                    let out = alg.mul(&coeff, &alg.basis_el(o_in));
                    for (o, v) in out.iter().enumerate() {
                        if !v.is_zero() {
                            triplets.push((t_rank * d + o, col_base + o_in, &kappa * v));
                        }
                    }
                }
            }
        }
    }
    Ok(Matrix::from_triplets(rows, cols, tag, triplets).expect("differential triplets are well-formed"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::s2_model;
    use crate::DEFAULT_CAP;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f101() -> FieldTag {
        FieldTag::Fp(101)
    }

    #[test]
    fn pair_indexing_round_trips() {
        for n in 0..=7usize {
            let mut p = 0;
            for i in 1..=n {
                for j in i + 1..=n {
                    assert_eq!(pos_of_pair(n, i, j), p);
                    assert_eq!(pair_of_pos(n, p), (i, j));
                    p += 1;
                }
            }
            assert_eq!(p, tri_count(n));
        }
    }

    #[test]
    fn simplex_positions_enumerate_lexicographically() {
        // D(a, b, c) listed lexicographically must land on slots 0, 1, 2, ..
        for n in 2..=6usize {
            let mut expected = 0;
            for a in 0..=n - 2 {
                for b in 0..=n - 2 - a {
                    let c = n - 2 - a - b;
                    assert_eq!(pos_of_simplex(n, a, b), expected);
                    assert_eq!(simplex_of_pos(n, expected), (a, b, c));
                    expected += 1;
                }
            }
        }
    }

    #[test]
    fn degree_one_differential_is_multiplication_by_input() {
        // f in C^1 is an element v of A; (d f)(a) = a * v.
        let alg = Algebra::truncated_poly(f101(), 3);
        let v = alg.basis_el(1);
        let f = Cochain::from_fn(f101(), 3, 1, DEFAULT_CAP, |_| v.clone()).unwrap();
        let df = delta(&alg, &f, DEFAULT_CAP).unwrap();
        assert_eq!(df.degree(), 2);
        for a in 0..3 {
            assert_eq!(df.value(&[a]), &alg.mul(&alg.basis_el(a), &v)[..], "input {a}");
        }
    }

    #[test]
    fn degree_zero_differential_vanishes() {
        for alg in [Algebra::dual_numbers(f101()), Algebra::truncated_poly(FieldTag::Rat, 3)] {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let f = Cochain::random(alg.tag(), alg.dim(), 0, DEFAULT_CAP, &mut rng).unwrap();
            assert!(delta(&alg, &f, DEFAULT_CAP).unwrap().is_zero());
        }
    }

    #[test]
    fn degree_two_differential_matches_hand_formula() {
        // (d f)(a, b, c) = ab f(c) - a f(bc) + c f(ab) - f(a) bc, with the
        // inputs read off the slots (1,2), (1,3), (2,3).
        let alg = Algebra::truncated_poly2(f101(), 2, 2);
        let d = alg.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = Cochain::random(f101(), d, 2, DEFAULT_CAP, &mut rng).unwrap();
        let df = delta(&alg, &f, DEFAULT_CAP).unwrap();
        let eval = |x: &[Scalar]| -> Vec<Scalar> {
            // multilinear extension of f to one general input
            let mut acc = alg.zero_el();
            for (c, v) in x.iter().enumerate() {
                if !v.is_zero() {
                    for (a, w) in acc.iter_mut().zip(f.value(&[c])) {
                        *a = &*a + &(v * w);
                    }
                }
            }
            acc
        };
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let (ea, eb, ec) = (alg.basis_el(a), alg.basis_el(b), alg.basis_el(c));
                    let ab = alg.mul(&ea, &eb);
                    let bc = alg.mul(&eb, &ec);
                    let mut expect = alg.mul(&ab, &eval(&ec));
                    for (e, v) in expect.iter_mut().zip(alg.mul(&ea, &eval(&bc))) {
                        *e = &*e - &v;
                    }
                    for (e, v) in expect.iter_mut().zip(alg.mul(&ec, &eval(&ab))) {
                        *e = &*e + &v;
                    }
                    for (e, v) in expect.iter_mut().zip(alg.mul(&eval(&ea), &bc)) {
                        *e = &*e - &v;
                    }
                    assert_eq!(df.value(&[a, b, c]), &expect[..], "({a}, {b}, {c})");
                }
            }
        }
    }

    #[test]
    fn matrix_agrees_with_evaluation() {
        for alg in [Algebra::dual_numbers(f101()), Algebra::dual_numbers(FieldTag::Rat)] {
            let mut rng = ChaCha8Rng::seed_from_u64(23);
            for n in 0..=3 {
                let f = Cochain::random(alg.tag(), alg.dim(), n, DEFAULT_CAP, &mut rng).unwrap();
                let df = delta(&alg, &f, DEFAULT_CAP).unwrap();
                let m = delta_matrix(&alg, n, DEFAULT_CAP).unwrap();
                assert_eq!(m.mul_vec(&f.to_vec()).unwrap(), df.to_vec(), "degree {n}");
            }
        }
    }

    #[test]
    fn differential_squares_to_zero_in_small_degrees() {
        let alg = Algebra::truncated_poly(f101(), 3);
        for n in 0..=2 {
            let d1 = delta_matrix(&alg, n, DEFAULT_CAP).unwrap();
            let d2 = delta_matrix(&alg, n + 1, DEFAULT_CAP).unwrap();
            assert!(d2.matmul(&d1).unwrap().is_zero(), "degree {n}");
        }
    }

    #[test]
    fn closed_form_matches_simplicial_boundary() {
        let model = s2_model(5);
        let alg = Algebra::dual_numbers(f101());
        for n in 0..=3 {
            let closed = delta_matrix(&alg, n, DEFAULT_CAP).unwrap();
            let generic = model.boundary_matrix(&alg, n, DEFAULT_CAP).unwrap();
            assert_eq!(closed, generic, "degree {n}");
        }
    }

    #[test]
    fn cochain_arithmetic_and_ranks() {
        let t = f101();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = Cochain::random(t, 2, 3, DEFAULT_CAP, &mut rng).unwrap();
        let g = Cochain::random(t, 2, 3, DEFAULT_CAP, &mut rng).unwrap();
        assert_eq!(f.add(&g).sub(&g), f);
        assert_eq!(f.sub(&f).is_zero(), true);
        assert_eq!(f.neg().add(&f).is_zero(), true);
        let two = Scalar::from_i64(t, 2);
        assert_eq!(f.scale(&two), f.add(&f));
        // Ranks are big-endian in the tuple.
        assert_eq!(tuple_rank(3, &[2, 1, 0]), 2 * 9 + 1 * 3);
        assert_eq!(tuple_unrank(3, 3, 21), vec![2, 1, 0]);
        // Same seed, same cochain.
        let mut rng2 = ChaCha8Rng::seed_from_u64(1);
        let f2 = Cochain::random(t, 2, 3, DEFAULT_CAP, &mut rng2).unwrap();
        assert_eq!(f, f2);
    }

    #[test]
    fn caps_are_enforced() {
        assert!(matches!(
            Cochain::zero(f101(), 3, 4, 100),
            Err(ComplexError::CapExceeded { needed: 2187, cap: 100 })
        ));
        let alg = Algebra::truncated_poly(f101(), 3);
        assert!(matches!(
            delta_matrix(&alg, 3, 1000),
            Err(ComplexError::CapExceeded { .. })
        ));
        assert!(Cochain::from_vec(f101(), 2, 2, vec![Scalar::one(f101())]).is_err());
    }
}
