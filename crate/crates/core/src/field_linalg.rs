//! Tagged exact scalars (prime field or rational) and immutable sparse
//! matrices with deterministic Gaussian elimination.
//!
//! Every scalar carries its field: `Fp { p, val }` with `val` canonical in
//! `[0, p)`, or an arbitrary-precision rational kept reduced with positive
//! denominator. Mixing tags is a caller error; matrix constructors and
//! solvers report it as [`LinalgError::FieldMismatch`], the scalar `ops`
//! impls panic (they are only reachable after a boundary check).
//!
//! Elimination is plain Gauss over `F_p` (rows specialized to machine
//! integers internally) and fraction-free over `Q`: rows are cleared to
//! integer vectors, updated by cross-multiplication, reduced by their content
//! gcd, and divided only during back-substitution. Pivots are chosen as the
//! first nonzero in column order and rows are consumed in natural order, so
//! ranks, kernel bases and solutions are deterministic.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand_core::RngCore;

/// Largest admissible prime modulus. Keeping `p < 2^31` lets products of two
/// canonical representatives fit in `u64` without overflow.
pub const MAX_PRIME: u64 = 1 << 31;

/// Identifies the field a scalar or matrix lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldTag {
    /// Prime field `F_p`.
    Fp(u64),
    /// The rationals.
    Rat,
}

impl FieldTag {
    /// Prime-field tag, validating primality by trial division.
    pub fn fp(p: u64) -> Result<FieldTag, LinalgError> {
        if p >= MAX_PRIME {
            return Err(LinalgError::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(LinalgError::NotPrime(p));
        }
        Ok(FieldTag::Fp(p))
    }

    pub fn rational() -> FieldTag {
        FieldTag::Rat
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Fp(p) => write!(f, "F_{p}"),
            FieldTag::Rat => write!(f, "Q"),
        }
    }
}

/// Deterministic trial-division primality test (moduli are desk-scale).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// An exact scalar tagged with its field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    /// Element of `F_p`, canonical representative in `[0, p)`.
    Fp { p: u64, val: u64 },
    /// Reduced rational with positive denominator (maintained by
    /// `BigRational` itself). Boxed to keep the enum small.
    Rat(Box<BigRational>),
}

impl Scalar {
    pub fn tag(&self) -> FieldTag {
        match self {
            Scalar::Fp { p, .. } => FieldTag::Fp(*p),
            Scalar::Rat(_) => FieldTag::Rat,
        }
    }

    pub fn zero(tag: FieldTag) -> Scalar {
        Scalar::from_i64(tag, 0)
    }

    pub fn one(tag: FieldTag) -> Scalar {
        Scalar::from_i64(tag, 1)
    }

    /// Embeds an integer into the field.
    pub fn from_i64(tag: FieldTag, n: i64) -> Scalar {
        match tag {
            FieldTag::Fp(p) => {
                let r = n.rem_euclid(p as i64) as u64;
                Scalar::Fp { p, val: r }
            }
            FieldTag::Rat => Scalar::Rat(Box::new(BigRational::from_integer(BigInt::from(n)))),
        }
    }

    /// Rational `a/b`; errors on `b = 0` and reduces otherwise.
    pub fn rational(num: i64, den: i64) -> Result<Scalar, LinalgError> {
        if den == 0 {
            return Err(LinalgError::ZeroDenominator);
        }
        Ok(Scalar::Rat(Box::new(BigRational::new(
            BigInt::from(num),
            BigInt::from(den),
        ))))
    }

    /// `a/b` reduced into `F_p` (errors if `p | b`).
    pub fn fp_fraction(p: u64, num: i64, den: i64) -> Result<Scalar, LinalgError> {
        let d = Scalar::from_i64(FieldTag::Fp(p), den);
        let inv = d.inv().ok_or(LinalgError::ZeroDenominator)?;
        Ok(&Scalar::from_i64(FieldTag::Fp(p), num) * &inv)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Fp { val, .. } => *val == 0,
            Scalar::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Fp { val, .. } => *val == 1,
            Scalar::Rat(r) => r.is_one(),
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::Fp { p, val } => {
                if *val == 0 {
                    None
                } else {
                    Some(Scalar::Fp { p: *p, val: fp_inv(*p, *val) })
                }
            }
            Scalar::Rat(r) => {
                if r.is_zero() {
                    None
                } else {
                    Some(Scalar::Rat(Box::new(r.recip())))
                }
            }
        }
    }

    /// Uniform field element for `F_p` (rejection sampling); small integer in
    /// `[-9, 9]` for `Q`. Deterministic given the generator state.
    pub fn random(tag: FieldTag, rng: &mut dyn RngCore) -> Scalar {
        match tag {
            FieldTag::Fp(p) => {
                let zone = u64::MAX - (u64::MAX % p);
                loop {
                    let x = rng.next_u64();
                    if x < zone {
                        return Scalar::Fp { p, val: x % p };
                    }
                }
            }
            FieldTag::Rat => {
                let x = (rng.next_u64() % 19) as i64 - 9;
                Scalar::from_i64(FieldTag::Rat, x)
            }
        }
    }

    fn assert_same_tag(&self, other: &Scalar) {
        assert_eq!(
            self.tag(),
            other.tag(),
            "scalar arithmetic across different fields"
        );
    }
}

fn fp_pow(p: u64, mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn fp_inv(p: u64, val: u64) -> u64 {
    fp_pow(p, val, p - 2)
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Fp { val, .. } => write!(f, "{val}"),
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

impl core::ops::Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.assert_same_tag(rhs);
        match (self, rhs) {
            (Scalar::Fp { p, val: a }, Scalar::Fp { val: b, .. }) => {
                Scalar::Fp { p: *p, val: (a + b) % p }
            }
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(Box::new(&**a + &**b)),
            _ => unreachable!(),
        }
    }
}

impl core::ops::Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.assert_same_tag(rhs);
        match (self, rhs) {
            (Scalar::Fp { p, val: a }, Scalar::Fp { val: b, .. }) => {
                Scalar::Fp { p: *p, val: (a + p - b) % p }
            }
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(Box::new(&**a - &**b)),
            _ => unreachable!(),
        }
    }
}

impl core::ops::Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.assert_same_tag(rhs);
        match (self, rhs) {
            (Scalar::Fp { p, val: a }, Scalar::Fp { val: b, .. }) => {
                Scalar::Fp { p: *p, val: mulmod(*a, *b, *p) }
            }
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(Box::new(&**a * &**b)),
            _ => unreachable!(),
        }
    }
}

impl core::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Fp { p, val } => Scalar::Fp { p: *p, val: (p - val) % p },
            Scalar::Rat(r) => Scalar::Rat(Box::new(-&**r)),
        }
    }
}

/// Errors from scalar and matrix construction or solving.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinalgError {
    /// Operands or entries carry different field tags.
    FieldMismatch,
    /// Shapes are incompatible for the requested operation.
    DimMismatch { expected: usize, got: usize, what: &'static str },
    /// Entry coordinates outside the declared shape.
    OutOfBounds { row: usize, col: usize, rows: usize, cols: usize },
    NotPrime(u64),
    ModulusTooLarge(u64),
    ZeroDenominator,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::FieldMismatch => write!(f, "field mismatch"),
            LinalgError::DimMismatch { expected, got, what } => {
                write!(f, "dimension mismatch for {what}: expected {expected}, got {got}")
            }
            LinalgError::OutOfBounds { row, col, rows, cols } => {
                write!(f, "entry ({row}, {col}) outside {rows}x{cols} matrix")
            }
            LinalgError::NotPrime(p) => write!(f, "{p} is not prime"),
            LinalgError::ModulusTooLarge(p) => {
                write!(f, "modulus {p} exceeds the supported bound {MAX_PRIME}")
            }
            LinalgError::ZeroDenominator => write!(f, "zero denominator"),
        }
    }
}

impl core::error::Error for LinalgError {}

/// Immutable sparse matrix over a single field.
///
/// Absent entries are zero; stored entries are nonzero and all share the
/// matrix tag. Zero-row and zero-column shapes are legal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    tag: FieldTag,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize, tag: FieldTag) -> Matrix {
        Matrix { rows, cols, tag, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize, tag: FieldTag) -> Matrix {
        let mut entries = BTreeMap::new();
        for i in 0..n {
            entries.insert((i, i), Scalar::one(tag));
        }
        Matrix { rows: n, cols: n, tag, entries }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicate positions
    /// are summed; explicit zeros (and sums that cancel) are dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        tag: FieldTag,
        triplets: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Result<Matrix, LinalgError> {
        let mut entries: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(LinalgError::OutOfBounds { row: r, col: c, rows, cols });
            }
            if v.tag() != tag {
                return Err(LinalgError::FieldMismatch);
            }
            match entries.entry((r, c)) {
                alloc::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(v);
                }
                alloc::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = &*e.get() + &v;
                    if sum.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = sum;
                    }
                }
            }
        }
        entries.retain(|_, v| !v.is_zero());
        Ok(Matrix { rows, cols, tag, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry at `(r, c)` (zero when absent).
    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.entries
            .get(&(r, c))
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.tag))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn transpose(&self) -> Matrix {
        let mut entries = BTreeMap::new();
        for (&(r, c), v) in &self.entries {
            entries.insert((c, r), v.clone());
        }
        Matrix { rows: self.cols, cols: self.rows, tag: self.tag, entries }
    }

    /// Exact sparse product `self * rhs`.
    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix, LinalgError> {
        if self.tag != rhs.tag {
            return Err(LinalgError::FieldMismatch);
        }
        if self.cols != rhs.rows {
            return Err(LinalgError::DimMismatch {
                expected: self.cols,
                got: rhs.rows,
                what: "matmul inner dimension",
            });
        }
        let mut acc: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
        for (&(i, k), v) in &self.entries {
            for (&(rk, j), w) in rhs.entries.range((k, 0)..(k, usize::MAX)) {
                debug_assert_eq!(rk, k);
                let prod = v * w;
                if prod.is_zero() {
                    continue;
                }
                match acc.entry((i, j)) {
                    alloc::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(prod);
                    }
                    alloc::collections::btree_map::Entry::Occupied(mut e) => {
                        let sum = &*e.get() + &prod;
                        if sum.is_zero() {
                            e.remove();
                        } else {
                            *e.get_mut() = sum;
                        }
                    }
                }
            }
        }
        Ok(Matrix { rows: self.rows, cols: rhs.cols, tag: self.tag, entries: acc })
    }

    /// Exact matrix-vector product.
    pub fn mul_vec(&self, x: &[Scalar]) -> Result<Vec<Scalar>, LinalgError> {
        if x.len() != self.cols {
            return Err(LinalgError::DimMismatch {
                expected: self.cols,
                got: x.len(),
                what: "mul_vec length",
            });
        }
        for v in x {
            if v.tag() != self.tag {
                return Err(LinalgError::FieldMismatch);
            }
        }
        let mut out = vec![Scalar::zero(self.tag); self.rows];
        for (&(r, c), v) in &self.entries {
            if x[c].is_zero() {
                continue;
            }
            out[r] = &out[r] + &(v * &x[c]);
        }
        Ok(out)
    }

    /// Keeps only the listed rows, in the order given.
    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut entries = BTreeMap::new();
        for (new_r, &r) in rows.iter().enumerate() {
            for (&(_, c), v) in self.entries.range((r, 0)..(r, usize::MAX)) {
                entries.insert((new_r, c), v.clone());
            }
        }
        Matrix { rows: rows.len(), cols: self.cols, tag: self.tag, entries }
    }

    fn row_data(&self) -> Vec<Vec<(usize, Scalar)>> {
        let mut rows = vec![Vec::new(); self.rows];
        for (&(r, c), v) in &self.entries {
            rows[r].push((c, v.clone()));
        }
        rows
    }

    fn eliminate(&self, aug: &[Vec<Scalar>]) -> Result<Elimination, LinalgError> {
        for b in aug {
            if b.len() != self.rows {
                return Err(LinalgError::DimMismatch {
                    expected: self.rows,
                    got: b.len(),
                    what: "right-hand side length",
                });
            }
            for v in b {
                if v.tag() != self.tag {
                    return Err(LinalgError::FieldMismatch);
                }
            }
        }
        match self.tag {
            FieldTag::Fp(p) => Ok(Elimination::Fp(FpElim::run(self, p, aug))),
            FieldTag::Rat => Ok(Elimination::Rat(RatElim::run(self, aug))),
        }
    }

    /// Rank over the matrix field.
    pub fn rank(&self) -> usize {
        self.eliminate(&[]).expect("no rhs to mismatch").rank()
    }

    /// Original indices of a deterministic row basis: rows that raised the
    /// running rank when consumed in natural order. `rank()` equals the
    /// returned length, and the selected submatrix has the same kernel as the
    /// full matrix.
    pub fn row_basis_indices(&self) -> Vec<usize> {
        self.eliminate(&[]).expect("no rhs to mismatch").row_basis()
    }

    /// Deterministic basis of the right kernel `{x : Mx = 0}`: one vector per
    /// free column in ascending order, with `1` at that free column, `0` at
    /// the other free columns, and back-substituted pivot entries.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        self.eliminate(&[]).expect("no rhs to mismatch").kernel_basis(self.tag, self.cols)
    }

    /// First solution of `Mx = b` in pivot order (free variables zero), or
    /// `None` when the system is inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Vec<Scalar>>, LinalgError> {
        Ok(self.solve_batch(core::slice::from_ref(&b.to_vec()))?.pop().unwrap())
    }

    /// Solves `Mx = b` for several right-hand sides with one elimination.
    pub fn solve_batch(&self, bs: &[Vec<Scalar>]) -> Result<Vec<Option<Vec<Scalar>>>, LinalgError> {
        let elim = self.eliminate(bs)?;
        Ok(elim.solutions(self.tag, self.cols, bs.len()))
    }

    /// Is `v` in the column span of the matrix?
    pub fn in_span(&self, v: &[Scalar]) -> Result<bool, LinalgError> {
        Ok(self.solve(v)?.is_some())
    }
}

/// Outcome of one elimination pass, engine-specific.
enum Elimination {
    Fp(FpElim),
    Rat(RatElim),
}

impl Elimination {
    fn rank(&self) -> usize {
        match self {
            Elimination::Fp(e) => e.row_basis.len(),
            Elimination::Rat(e) => e.row_basis.len(),
        }
    }

    fn row_basis(self) -> Vec<usize> {
        match self {
            Elimination::Fp(e) => e.row_basis,
            Elimination::Rat(e) => e.row_basis,
        }
    }

    fn kernel_basis(&self, tag: FieldTag, cols: usize) -> Vec<Vec<Scalar>> {
        match self {
            Elimination::Fp(e) => e.kernel_basis(cols),
            Elimination::Rat(e) => e.kernel_basis(tag, cols),
        }
    }

    fn solutions(&self, tag: FieldTag, cols: usize, n: usize) -> Vec<Option<Vec<Scalar>>> {
        match self {
            Elimination::Fp(e) => e.solutions(cols, n),
            Elimination::Rat(e) => e.solutions(tag, cols, n),
        }
    }
}

// ---------------------------------------------------------------------------
// F_p engine: compact machine-integer rows.
// ---------------------------------------------------------------------------

struct FpRow {
    /// Sorted by column, values in `(0, p)`, leading value normalized to 1.
    coeffs: Vec<(usize, u64)>,
    aug: Vec<u64>,
}

struct FpElim {
    p: u64,
    /// Pivot column -> row, leading entry 1 at that column.
    pivots: BTreeMap<usize, FpRow>,
    /// Augmented parts of rows whose coefficients eliminated to zero.
    residuals: Vec<Vec<u64>>,
    row_basis: Vec<usize>,
}

impl FpElim {
    fn run(m: &Matrix, p: u64, aug: &[Vec<Scalar>]) -> FpElim {
        let naug = aug.len();
        let mut elim = FpElim {
            p,
            pivots: BTreeMap::new(),
            residuals: Vec::new(),
            row_basis: Vec::new(),
        };
        let rows = m.row_data();
        for (ri, row) in rows.into_iter().enumerate() {
            let coeffs: Vec<(usize, u64)> = row
                .into_iter()
                .map(|(c, v)| match v {
                    Scalar::Fp { val, .. } => (c, val),
                    Scalar::Rat(_) => unreachable!("tag checked at construction"),
                })
                .collect();
            let a: Vec<u64> = (0..naug)
                .map(|k| match &aug[k][ri] {
                    Scalar::Fp { val, .. } => *val,
                    Scalar::Rat(_) => unreachable!("tag checked by eliminate"),
                })
                .collect();
            elim.consume(ri, coeffs, a);
        }
        elim
    }

    fn consume(&mut self, orig_index: usize, mut coeffs: Vec<(usize, u64)>, mut aug: Vec<u64>) {
        let p = self.p;
        loop {
            let Some(&(lead_col, lead_val)) = coeffs.first() else {
                if aug.iter().any(|&x| x != 0) {
                    self.residuals.push(aug);
                }
                return;
            };
            match self.pivots.get(&lead_col) {
                Some(piv) => {
                    // coeffs -= lead_val * pivot  (pivot lead is 1)
                    coeffs = fp_row_sub(p, &coeffs, lead_val, &piv.coeffs);
                    for (x, y) in aug.iter_mut().zip(&piv.aug) {
                        *x = (*x + p - mulmod(lead_val, *y, p)) % p;
                    }
                }
                None => {
                    let inv = fp_inv(p, lead_val);
                    for (_, v) in coeffs.iter_mut() {
                        *v = mulmod(*v, inv, p);
                    }
                    for x in aug.iter_mut() {
                        *x = mulmod(*x, inv, p);
                    }
                    self.pivots.insert(lead_col, FpRow { coeffs, aug });
                    self.row_basis.push(orig_index);
                    return;
                }
            }
        }
    }

    fn free_cols(&self, cols: usize) -> Vec<usize> {
        (0..cols).filter(|c| !self.pivots.contains_key(c)).collect()
    }

    /// Back-substitution over the echelon rows, descending through pivot
    /// columns. `fixed` assigns values to the free columns; `rhs` picks an
    /// augmented column (or all-zero for the homogeneous system).
    fn back_substitute(&self, cols: usize, fixed: &BTreeMap<usize, u64>, rhs: Option<usize>) -> Vec<u64> {
        let p = self.p;
        let mut x = vec![0u64; cols];
        for (&c, &v) in fixed {
            x[c] = v;
        }
        for (&c, row) in self.pivots.iter().rev() {
            let mut acc = rhs.map_or(0, |k| row.aug[k]);
            for &(cc, v) in row.coeffs.iter().skip(1) {
                if x[cc] != 0 {
                    acc = (acc + p - mulmod(v, x[cc], p)) % p;
                }
            }
            x[c] = acc;
        }
        x
    }

    fn kernel_basis(&self, cols: usize) -> Vec<Vec<Scalar>> {
        let p = self.p;
        self.free_cols(cols)
            .into_iter()
            .map(|f| {
                let mut fixed = BTreeMap::new();
                fixed.insert(f, 1u64);
                self.back_substitute(cols, &fixed, None)
                    .into_iter()
                    .map(|val| Scalar::Fp { p, val })
                    .collect()
            })
            .collect()
    }

    fn solutions(&self, cols: usize, n: usize) -> Vec<Option<Vec<Scalar>>> {
        let p = self.p;
        (0..n)
            .map(|k| {
                if self.residuals.iter().any(|r| r[k] != 0) {
                    return None;
                }
                let x = self.back_substitute(cols, &BTreeMap::new(), Some(k));
                Some(x.into_iter().map(|val| Scalar::Fp { p, val }).collect())
            })
            .collect()
    }
}

/// `a - s * b` over `F_p` on sorted sparse rows.
fn fp_row_sub(p: u64, a: &[(usize, u64)], s: u64, b: &[(usize, u64)]) -> Vec<(usize, u64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(ca, va)), Some(&(cb, vb))) if ca == cb => {
                let v = (va + p - mulmod(s, vb, p)) % p;
                if v != 0 {
                    out.push((ca, v));
                }
                i += 1;
                j += 1;
            }
            (Some(&(ca, va)), Some(&(cb, _))) if ca < cb => {
                out.push((ca, va));
                i += 1;
            }
            (Some(_), Some(&(cb, vb))) => {
                let v = (p - mulmod(s, vb, p)) % p;
                if v != 0 {
                    out.push((cb, v));
                }
                j += 1;
            }
            (Some(&(ca, va)), None) => {
                out.push((ca, va));
                i += 1;
            }
            (None, Some(&(cb, vb))) => {
                let v = (p - mulmod(s, vb, p)) % p;
                if v != 0 {
                    out.push((cb, v));
                }
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Q engine: fraction-free rows (integer vectors, content-reduced).
// ---------------------------------------------------------------------------

struct RatRow {
    /// Sorted by column; integer entries with content gcd 1 (including aug).
    coeffs: Vec<(usize, BigInt)>,
    aug: Vec<BigInt>,
}

struct RatElim {
    pivots: BTreeMap<usize, RatRow>,
    residuals: Vec<Vec<BigInt>>,
    row_basis: Vec<usize>,
}

impl RatElim {
    fn run(m: &Matrix, aug: &[Vec<Scalar>]) -> RatElim {
        let naug = aug.len();
        let mut elim = RatElim {
            pivots: BTreeMap::new(),
            residuals: Vec::new(),
            row_basis: Vec::new(),
        };
        let rows = m.row_data();
        for (ri, row) in rows.into_iter().enumerate() {
            // Clear denominators across the whole augmented row.
            let rat = |v: &Scalar| match v {
                Scalar::Rat(r) => (**r).clone(),
                Scalar::Fp { .. } => unreachable!("tag checked at construction"),
            };
            let mut lcm = BigInt::one();
            let rrow: Vec<(usize, BigRational)> = row.iter().map(|(c, v)| (*c, rat(v))).collect();
            let raug: Vec<BigRational> = (0..naug).map(|k| rat(&aug[k][ri])).collect();
            for (_, r) in &rrow {
                lcm = lcm.lcm(r.denom());
            }
            for r in &raug {
                lcm = lcm.lcm(r.denom());
            }
            let coeffs: Vec<(usize, BigInt)> = rrow
                .into_iter()
                .map(|(c, r)| (c, (r * BigRational::from_integer(lcm.clone())).to_integer()))
                .collect();
            let a: Vec<BigInt> = raug
                .into_iter()
                .map(|r| (r * BigRational::from_integer(lcm.clone())).to_integer())
                .collect();
            elim.consume(ri, coeffs, a);
        }
        elim
    }

    fn consume(&mut self, orig_index: usize, mut coeffs: Vec<(usize, BigInt)>, mut aug: Vec<BigInt>) {
        loop {
            reduce_content(&mut coeffs, &mut aug);
            let Some((lead_col, lead_val)) = coeffs.first().map(|(c, v)| (*c, v.clone())) else {
                if aug.iter().any(|x| !x.is_zero()) {
                    self.residuals.push(aug);
                }
                return;
            };
            match self.pivots.get(&lead_col) {
                Some(piv) => {
                    // Cross-multiplication keeps everything integral:
                    // row := pivot_lead * row - lead * pivot.
                    let plead = piv.coeffs[0].1.clone();
                    coeffs = int_row_combine(&plead, &coeffs, &lead_val, &piv.coeffs);
                    let new_aug: Vec<BigInt> = aug
                        .iter()
                        .zip(&piv.aug)
                        .map(|(x, y)| &plead * x - &lead_val * y)
                        .collect();
                    aug = new_aug;
                }
                None => {
                    self.pivots.insert(lead_col, RatRow { coeffs, aug });
                    self.row_basis.push(orig_index);
                    return;
                }
            }
        }
    }

    fn free_cols(&self, cols: usize) -> Vec<usize> {
        (0..cols).filter(|c| !self.pivots.contains_key(c)).collect()
    }

    fn back_substitute(
        &self,
        cols: usize,
        fixed: &BTreeMap<usize, BigRational>,
        rhs: Option<usize>,
    ) -> Vec<BigRational> {
        let mut x = vec![BigRational::zero(); cols];
        for (c, v) in fixed {
            x[*c] = v.clone();
        }
        for (&c, row) in self.pivots.iter().rev() {
            let mut acc = rhs.map_or_else(BigRational::zero, |k| {
                BigRational::from_integer(row.aug[k].clone())
            });
            for (cc, v) in row.coeffs.iter().skip(1) {
                if !x[*cc].is_zero() {
                    acc -= BigRational::from_integer(v.clone()) * &x[*cc];
                }
            }
            x[c] = acc / BigRational::from_integer(row.coeffs[0].1.clone());
        }
        x
    }

    fn kernel_basis(&self, tag: FieldTag, cols: usize) -> Vec<Vec<Scalar>> {
        debug_assert_eq!(tag, FieldTag::Rat);
        self.free_cols(cols)
            .into_iter()
            .map(|f| {
                let mut fixed = BTreeMap::new();
                fixed.insert(f, BigRational::one());
                self.back_substitute(cols, &fixed, None)
                    .into_iter()
                    .map(|r| Scalar::Rat(Box::new(r)))
                    .collect()
            })
            .collect()
    }

    fn solutions(&self, tag: FieldTag, cols: usize, n: usize) -> Vec<Option<Vec<Scalar>>> {
        debug_assert_eq!(tag, FieldTag::Rat);
        (0..n)
            .map(|k| {
                if self.residuals.iter().any(|r| !r[k].is_zero()) {
                    return None;
                }
                let x = self.back_substitute(cols, &BTreeMap::new(), Some(k));
                Some(x.into_iter().map(|r| Scalar::Rat(Box::new(r))).collect())
            })
            .collect()
    }
}

/// Divides an integer row (coefficients and augmented part together) by its
/// content gcd.
fn reduce_content(coeffs: &mut Vec<(usize, BigInt)>, aug: &mut [BigInt]) {
    coeffs.retain(|(_, v)| !v.is_zero());
    let mut g = BigInt::zero();
    for (_, v) in coeffs.iter() {
        g = g.gcd(v);
    }
    for v in aug.iter() {
        g = g.gcd(v);
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for (_, v) in coeffs.iter_mut() {
        *v = &*v / &g;
    }
    for v in aug.iter_mut() {
        *v = &*v / &g;
    }
}

/// `s * a - t * b` on sorted integer rows.
fn int_row_combine(
    s: &BigInt,
    a: &[(usize, BigInt)],
    t: &BigInt,
    b: &[(usize, BigInt)],
) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some((ca, va)), Some((cb, vb))) if ca == cb => {
                let v = s * va - t * vb;
                if !v.is_zero() {
                    out.push((*ca, v));
                }
                i += 1;
                j += 1;
            }
            (Some((ca, va)), Some((cb, _))) if ca < cb => {
                out.push((*ca, s * va));
                i += 1;
            }
            (Some(_), Some((cb, vb))) => {
                out.push((*cb, -(t * vb)));
                j += 1;
            }
            (Some((ca, va)), None) => {
                out.push((*ca, s * va));
                i += 1;
            }
            (None, Some((cb, vb))) => {
                out.push((*cb, -(t * vb)));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Formats a scalar vector for debugging and reports.
pub fn format_vec(v: &[Scalar]) -> String {
    use core::fmt::Write;
    let mut s = String::from("[");
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{x}");
    }
    s.push(']');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7(v: i64) -> Scalar {
        Scalar::from_i64(FieldTag::Fp(7), v)
    }

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::rational(n, d).unwrap()
    }

    #[test]
    fn prime_checks() {
        assert!(is_prime(2));
        assert!(is_prime(101));
        assert!(!is_prime(1));
        assert!(!is_prime(91)); // 7 * 13
        assert!(FieldTag::fp(101).is_ok());
        assert_eq!(FieldTag::fp(91), Err(LinalgError::NotPrime(91)));
    }

    #[test]
    fn fp_scalar_arithmetic_is_canonical() {
        assert_eq!(&f7(3) + &f7(5), f7(1));
        assert_eq!(&f7(3) - &f7(5), f7(5));
        assert_eq!(&f7(3) * &f7(5), f7(1));
        assert_eq!(-&f7(0), f7(0));
        // Full inverse table of F_7.
        for v in 1..7 {
            let inv = f7(v).inv().unwrap();
            assert_eq!(&f7(v) * &inv, f7(1));
        }
        assert_eq!(f7(0).inv(), None);
    }

    #[test]
    fn rational_arithmetic_reduces() {
        let a = q(1, 2);
        let b = q(1, 3);
        assert_eq!(&a + &b, q(5, 6));
        assert_eq!(&a - &b, q(1, 6));
        assert_eq!(&a * &b, q(1, 6));
        assert_eq!(q(2, 4), q(1, 2));
        assert_eq!(q(1, -2), q(-1, 2));
        assert_eq!(q(3, 4).inv().unwrap(), q(4, 3));
    }

    #[test]
    fn random_scalars_are_reproducible() {
        use rand_chacha::rand_core::SeedableRng;
        let mut r1 = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut r2 = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            assert_eq!(
                Scalar::random(FieldTag::Fp(101), &mut r1),
                Scalar::random(FieldTag::Fp(101), &mut r2)
            );
        }
    }

    #[test]
    fn matrix_construction_validates() {
        let t = FieldTag::Fp(7);
        let err = Matrix::from_triplets(2, 2, t, vec![(2, 0, f7(1))]);
        assert!(matches!(err, Err(LinalgError::OutOfBounds { .. })));
        let err = Matrix::from_triplets(2, 2, t, vec![(0, 0, q(1, 1))]);
        assert_eq!(err.unwrap_err(), LinalgError::FieldMismatch);
        // Duplicates accumulate and may cancel away.
        let m = Matrix::from_triplets(1, 1, t, vec![(0, 0, f7(3)), (0, 0, f7(4))]).unwrap();
        assert!(m.is_zero());
    }

    #[test]
    fn identity_and_product() {
        let t = FieldTag::Fp(7);
        let m = Matrix::from_triplets(2, 3, t, vec![(0, 0, f7(2)), (0, 2, f7(3)), (1, 1, f7(4))])
            .unwrap();
        let id = Matrix::identity(3, t);
        assert_eq!(m.matmul(&id).unwrap(), m);
        let mt = m.transpose();
        assert_eq!(mt.rows(), 3);
        assert_eq!(mt.get(2, 0), f7(3));
    }

    #[test]
    fn rank_and_kernel_small_rational() {
        // Rows: (1,2,3), (2,4,6), (1,0,1) — rank 2, kernel spanned by
        // (-1, -1, 1).
        let t = FieldTag::Rat;
        let m = Matrix::from_triplets(
            3,
            3,
            t,
            vec![
                (0, 0, q(1, 1)),
                (0, 1, q(2, 1)),
                (0, 2, q(3, 1)),
                (1, 0, q(2, 1)),
                (1, 1, q(4, 1)),
                (1, 2, q(6, 1)),
                (2, 0, q(1, 1)),
                (2, 2, q(1, 1)),
            ],
        )
        .unwrap();
        assert_eq!(m.rank(), 2);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![q(-1, 1), q(-1, 1), q(1, 1)]);
        assert_eq!(m.row_basis_indices(), vec![0, 2]);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let t = FieldTag::Rat;
        // x + 2y = 5; 3y = 3  ->  x = 3, y = 1.
        let m = Matrix::from_triplets(
            2,
            2,
            t,
            vec![(0, 0, q(1, 1)), (0, 1, q(2, 1)), (1, 1, q(3, 1))],
        )
        .unwrap();
        let x = m.solve(&[q(5, 1), q(3, 1)]).unwrap().unwrap();
        assert_eq!(x, vec![q(3, 1), q(1, 1)]);
        // Duplicated equation with clashing rhs is inconsistent.
        let m2 = Matrix::from_triplets(2, 1, t, vec![(0, 0, q(1, 1)), (1, 0, q(1, 1))]).unwrap();
        assert_eq!(m2.solve(&[q(1, 1), q(2, 1)]).unwrap(), None);
        assert!(!m2.in_span(&[q(1, 1), q(2, 1)]).unwrap());
        assert!(m2.in_span(&[q(2, 1), q(2, 1)]).unwrap());
    }

    #[test]
    fn zero_shapes_are_legal() {
        let t = FieldTag::Fp(5);
        let m = Matrix::zero(0, 3, t);
        assert_eq!(m.rank(), 0);
        assert_eq!(m.kernel_basis().len(), 3);
        let m = Matrix::zero(3, 0, t);
        assert_eq!(m.rank(), 0);
        assert_eq!(m.kernel_basis().len(), 0);
        // 0-column solve: consistent iff b = 0.
        assert_eq!(
            m.solve(&vec![Scalar::zero(t); 3]).unwrap(),
            Some(Vec::new())
        );
        let b = [Scalar::zero(t), Scalar::one(t), Scalar::zero(t)];
        assert_eq!(m.solve(&b).unwrap(), None);
    }

    #[test]
    fn fraction_free_path_hits_big_numerators() {
        // A 5x5 integer matrix whose plain rational elimination would churn
        // fractions; check against the known determinant-driven rank and a
        // verified solution.
        let t = FieldTag::Rat;
        let mut triplets = Vec::new();
        for i in 0..5usize {
            for j in 0..5usize {
                // Vandermonde on 2..6 — nonsingular.
                let v = ((i + 2) as i64).pow(j as u32);
                triplets.push((i, j, q(v, 1)));
            }
        }
        let m = Matrix::from_triplets(5, 5, t, triplets).unwrap();
        assert_eq!(m.rank(), 5);
        let b: Vec<Scalar> = (0..5).map(|i| q(i as i64 + 1, 1)).collect();
        let x = m.solve(&b).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), b);
    }
}
