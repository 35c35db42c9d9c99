//! Finite pointed simplicial sets and the cochain complexes they induce.
//!
//! A model stores every level up to a chosen truncation together with all
//! face and degeneracy maps, validated against the simplicial identities.
//! For an algebra `A`, level `n` with `v` non-basepoint elements induces the
//! cochain space `Hom(A^(x)v, A)`; a pointed map pulls cochains back by
//! multiplying the inputs lying over each element, with the factors over the
//! basepoint acting on the output by multiplication. The boundary operator
//! is the alternating sum of the face pullbacks.
//!
//! This route is deliberately simple and generic: it serves as the
//! independent cross-check for the specialised closed-form differential in
//! [`crate::s2_complex`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::Algebra;
use crate::field_linalg::{FieldTag, Matrix, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimplicialError {
    LevelOutOfRange { level: usize, max: usize },
    MapShape { expected: usize, got: usize },
    NotPointed,
    TargetOutOfRange,
    FaceIdentity { level: usize, i: usize, j: usize },
    DegeneracyIdentity { level: usize, i: usize, j: usize },
    MixedIdentity { level: usize, i: usize, j: usize },
    CapExceeded { needed: usize, cap: usize },
}

impl fmt::Display for SimplicialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimplicialError::LevelOutOfRange { level, max } => {
                write!(f, "level {level} out of range (model is truncated at {max})")
            }
            SimplicialError::MapShape { expected, got } => {
                write!(f, "pointed map has wrong source size: expected {expected}, got {got}")
            }
            SimplicialError::NotPointed => write!(f, "map does not send the basepoint to itself"),
            SimplicialError::TargetOutOfRange => write!(f, "map value exceeds target size"),
            SimplicialError::FaceIdentity { level, i, j } => {
                write!(f, "face identity d{i} d{j} failed at level {level}")
            }
            SimplicialError::DegeneracyIdentity { level, i, j } => {
                write!(f, "degeneracy identity s{i} s{j} failed at level {level}")
            }
            SimplicialError::MixedIdentity { level, i, j } => {
                write!(f, "mixed identity d{i} s{j} failed at level {level}")
            }
            SimplicialError::CapExceeded { needed, cap } => {
                write!(f, "table of size {needed} exceeds the cap {cap}")
            }
        }
    }
}

impl core::error::Error for SimplicialError {}

/// A finite pointed set; index 0 is always the basepoint `*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedSet {
    names: Vec<String>,
}

impl PointedSet {
    pub fn new(mut names: Vec<String>) -> PointedSet {
        if names.is_empty() {
            names.push("*".to_string());
        }
        names[0] = "*".to_string();
        PointedSet { names }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    /// Number of non-basepoint elements, i.e. tensor slots of the cochain
    /// space this level induces.
    pub fn slots(&self) -> usize {
        self.names.len() - 1
    }
}

/// A basepoint-preserving map of finite pointed sets, stored as an index
/// table over the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedMap {
    target_size: usize,
    map: Vec<usize>,
}

impl PointedMap {
    pub fn new(target_size: usize, map: Vec<usize>) -> Result<PointedMap, SimplicialError> {
        if map.is_empty() || map[0] != 0 {
            return Err(SimplicialError::NotPointed);
        }
        if map.iter().any(|&v| v >= target_size) {
            return Err(SimplicialError::TargetOutOfRange);
        }
        Ok(PointedMap { target_size, map })
    }

    pub fn source_size(&self) -> usize {
        self.map.len()
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn entries(&self) -> &[usize] {
        &self.map
    }

    /// `other` after `self` (apply `self` first).
    fn then(&self, other: &PointedMap) -> Vec<usize> {
        self.map.iter().map(|&x| other.map[x]).collect()
    }
}

/// A pointed simplicial set truncated at `max_level`, with faces
/// `d_i : X_m -> X_(m-1)` and degeneracies `s_i : X_m -> X_(m+1)`.
#[derive(Clone, Debug)]
pub struct SimplicialModel {
    name: String,
    levels: Vec<PointedSet>,
    faces: Vec<Vec<PointedMap>>,
    degens: Vec<Vec<PointedMap>>,
}

impl SimplicialModel {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> Result<&PointedSet, SimplicialError> {
        self.levels.get(n).ok_or(SimplicialError::LevelOutOfRange {
            level: n,
            max: self.max_level(),
        })
    }

    /// Face `d_i : X_m -> X_(m-1)`, defined for `1 <= m <= max_level` and
    /// `0 <= i <= m`.
    pub fn face(&self, m: usize, i: usize) -> &PointedMap {
        &self.faces[m][i]
    }

    /// Degeneracy `s_i : X_m -> X_(m+1)`, defined for `m < max_level` and
    /// `0 <= i <= m`.
    pub fn degeneracy(&self, m: usize, i: usize) -> &PointedMap {
        &self.degens[m][i]
    }

    /// Checks shapes, pointedness and the full set of simplicial identities
    /// expressible within the truncation.
    pub fn validate(&self) -> Result<(), SimplicialError> {
        let top = self.max_level();
        for m in 0..=top {
            let size = self.levels[m].len();
            let expect_maps = |maps: &[PointedMap], tgt: usize| -> Result<(), SimplicialError> {
                for p in maps {
                    if p.source_size() != size {
                        return Err(SimplicialError::MapShape {
                            expected: size,
                            got: p.source_size(),
                        });
                    }
                    if p.target_size() != tgt {
                        return Err(SimplicialError::TargetOutOfRange);
                    }
                }
                Ok(())
            };
            if m >= 1 {
                expect_maps(&self.faces[m], self.levels[m - 1].len())?;
            }
            if m < top {
                expect_maps(&self.degens[m], self.levels[m + 1].len())?;
            }
        }
        // d_i d_j = d_(j-1) d_i for i < j.
        for m in 2..=top {
            for j in 1..=m {
                for i in 0..j {
                    let lhs = self.faces[m][j].then(&self.faces[m - 1][i]);
                    let rhs = self.faces[m][i].then(&self.faces[m - 1][j - 1]);
                    if lhs != rhs {
                        return Err(SimplicialError::FaceIdentity { level: m, i, j });
                    }
                }
            }
        }
        // s_i s_j = s_(j+1) s_i for i <= j.
        for m in 0..top.saturating_sub(1) {
            for j in 0..=m {
                for i in 0..=j {
                    let lhs = self.degens[m][j].then(&self.degens[m + 1][i]);
                    let rhs = self.degens[m][i].then(&self.degens[m + 1][j + 1]);
                    if lhs != rhs {
                        return Err(SimplicialError::DegeneracyIdentity { level: m, i, j });
                    }
                }
            }
        }
        // d_i s_j: identity for i = j, j + 1; otherwise shuffles past.
        for m in 0..top {
            for j in 0..=m {
                for i in 0..=m + 1 {
                    let lhs = self.degens[m][j].then(&self.faces[m + 1][i]);
                    let ok = if i == j || i == j + 1 {
                        lhs == (0..self.levels[m].len()).collect::<Vec<_>>()
                    } else if i < j {
                        m >= 1 && lhs == self.faces[m][i].then(&self.degens[m - 1][j - 1])
                    } else {
                        m >= 1 && lhs == self.faces[m][i - 1].then(&self.degens[m - 1][j])
                    };
                    if !ok {
                        return Err(SimplicialError::MixedIdentity { level: m, i, j });
                    }
                }
            }
        }
        Ok(())
    }

    /// Matrix of the boundary `C^n -> C^(n+1)` for the induced cochain
    /// complex of `alg`: the alternating sum over `i` of the pullback along
    /// `d_i : X_(n+1) -> X_n`.
    pub fn boundary_matrix(
        &self,
        alg: &Algebra,
        n: usize,
        cap: usize,
    ) -> Result<Matrix, SimplicialError> {
        if n + 1 > self.max_level() {
            return Err(SimplicialError::LevelOutOfRange {
                level: n + 1,
                max: self.max_level(),
            });
        }
        let d = alg.dim();
        let tag = alg.tag();
        let src_slots = self.levels[n].slots();
        let dst_slots = self.levels[n + 1].slots();
        let cols = checked_table_len(d, src_slots, cap)?;
        let rows = checked_table_len(d, dst_slots, cap)?;
        let mut triplets: Vec<(usize, usize, Scalar)> = Vec::new();
        for i in 0..=n + 1 {
            let phi = &self.faces[n + 1][i];
            let negative = i % 2 == 1;
            for t_rank in 0..rows / d {
                let tuple = tuple_unrank(d, dst_slots, t_rank);
                let (b0, inner) = fiber_products(alg, phi, &tuple);
                for (choice, kappa) in expand(tag, &inner) {
                    let kappa = if negative { -&kappa } else { kappa };
                    let col_base = tuple_rank(d, &choice) * d;
                    for o_in in 0..d {
                        let out = alg.mul(&b0, &alg.basis_el(o_in));
                        for (o, val) in out.iter().enumerate() {
                            if !val.is_zero() {
                                triplets.push((t_rank * d + o, col_base + o_in, &kappa * val));
                            }
                        }
                    }
                }
            }
        }
        Ok(Matrix::from_triplets(rows, cols, tag, triplets)
            .expect("boundary triplets are well-formed"))
    }
}

/// A multilinear map `A^(x)slots -> A` tabulated on basis tuples. Ranks are
/// big-endian in the tuple with the output coordinate least significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericCochain {
    slots: usize,
    dim: usize,
    tag: FieldTag,
    values: Vec<Scalar>,
}

impl GenericCochain {
    pub fn zero(tag: FieldTag, dim: usize, slots: usize, cap: usize) -> Result<GenericCochain, SimplicialError> {
        let len = checked_table_len(dim, slots, cap)?;
        Ok(GenericCochain { slots, dim, tag, values: vec![Scalar::zero(tag); len] })
    }

    pub fn from_fn(
        tag: FieldTag,
        dim: usize,
        slots: usize,
        cap: usize,
        mut f: impl FnMut(&[usize]) -> Vec<Scalar>,
    ) -> Result<GenericCochain, SimplicialError> {
        let mut c = GenericCochain::zero(tag, dim, slots, cap)?;
        for r in 0..c.values.len() / dim {
            let tuple = tuple_unrank(dim, slots, r);
            let v = f(&tuple);
            assert_eq!(v.len(), dim, "value must have one coordinate per basis element");
            c.values[r * dim..(r + 1) * dim].clone_from_slice(&v);
        }
        Ok(c)
    }

    pub fn slots(&self) -> usize {
        self.slots
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

    /// Value on a tuple of basis elements, as a coordinate vector.
    pub fn value(&self, tuple: &[usize]) -> &[Scalar] {
        assert_eq!(tuple.len(), self.slots);
        let r = tuple_rank(self.dim, tuple);
        &self.values[r * self.dim..(r + 1) * self.dim]
    }
}

/// Pullback of a cochain along a pointed map `phi : X -> Y`: inputs over a
/// common element of `Y` are multiplied, and inputs over the basepoint act
/// on the output by multiplication.
pub fn pullback(
    alg: &Algebra,
    phi: &PointedMap,
    f: &GenericCochain,
    cap: usize,
) -> Result<GenericCochain, SimplicialError> {
    assert_eq!(f.slots + 1, phi.target_size(), "cochain does not match the map target");
    assert_eq!(f.dim, alg.dim());
    let d = alg.dim();
    let dst_slots = phi.source_size() - 1;
    GenericCochain::from_fn(alg.tag(), d, dst_slots, cap, |tuple| {
        let (b0, inner) = fiber_products(alg, phi, tuple);
        let mut acc = alg.zero_el();
        for (choice, kappa) in expand(alg.tag(), &inner) {
            for (a, v) in acc.iter_mut().zip(f.value(&choice)) {
                *a = &*a + &(&kappa * v);
            }
        }
        alg.mul(&b0, &acc)
    })
}

/// For a basis tuple over the source of `phi`, the product of inputs lying
/// over the basepoint (`b0`) and over each non-basepoint target element.
fn fiber_products(alg: &Algebra, phi: &PointedMap, tuple: &[usize]) -> (Vec<Scalar>, Vec<Vec<Scalar>>) {
    let w = phi.target_size() - 1;
    let mut out: Vec<Vec<Scalar>> = vec![alg.unit_el(); w + 1];
    for (slot, &basis) in tuple.iter().enumerate() {
        let tgt = phi.apply(slot + 1);
        out[tgt] = alg.mul(&out[tgt], &alg.basis_el(basis));
    }
    let b0 = out.remove(0);
    (b0, out)
}

/// All basis tuples with a nonzero coefficient in the multilinear expansion
/// of `factors[0] (x) ... (x) factors.last()`.
fn expand(tag: FieldTag, factors: &[Vec<Scalar>]) -> Vec<(Vec<usize>, Scalar)> {
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

pub fn tuple_rank(d: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &x| {
        debug_assert!(x < d);
        acc * d + x
    })
}

pub fn tuple_unrank(d: usize, slots: usize, mut r: usize) -> Vec<usize> {
    let mut out = vec![0; slots];
    for s in (0..slots).rev() {
        out[s] = r % d;
        r /= d;
    }
    debug_assert_eq!(r, 0);
    out
}

fn checked_table_len(d: usize, slots: usize, cap: usize) -> Result<usize, SimplicialError> {
    let mut len = d;
    for _ in 0..slots {
        len = len.checked_mul(d).ok_or(SimplicialError::CapExceeded { needed: usize::MAX, cap })?;
    }
    if len > cap {
        return Err(SimplicialError::CapExceeded { needed: len, cap });
    }
    Ok(len)
}

/// The pointed simplicial circle, truncated at `max_level`. Level `n` holds
/// the basepoint and elements `v1..vn`; the faces collapse or merge adjacent
/// inputs so that the induced complex is the classical Hochschild complex.
pub fn s1_model(max_level: usize) -> SimplicialModel {
    let mut levels = Vec::with_capacity(max_level + 1);
    for n in 0..=max_level {
        let mut names = vec!["*".to_string()];
        names.extend((1..=n).map(|j| format!("v{j}")));
        levels.push(PointedSet::new(names));
    }
    // At level n, vj stands for the word with j zeros then n + 1 - j ones;
    // v0 and v(n+1) are the collapsed constant words, i.e. the basepoint.
    let pointed = |n: usize, j: usize| if j == 0 || j > n { 0 } else { j };
    let mut faces = vec![Vec::new()];
    for m in 1..=max_level {
        let mut level_faces = Vec::with_capacity(m + 1);
        for i in 0..=m {
            // Deleting letter i sends vj to v(j-1) when i < j, else vj.
            let mut map = vec![0];
            map.extend((1..=m).map(|j| pointed(m - 1, if i < j { j - 1 } else { j })));
            level_faces.push(PointedMap::new(m, map).expect("valid face map"));
        }
        faces.push(level_faces);
    }
    let mut degens = Vec::with_capacity(max_level + 1);
    for m in 0..max_level {
        let mut level_degens = Vec::with_capacity(m + 1);
        for i in 0..=m {
            // Doubling letter i sends vj to v(j+1) when i < j, else vj.
            let mut map = vec![0];
            map.extend((1..=m).map(|j| pointed(m + 1, if i < j { j + 1 } else { j })));
            level_degens.push(PointedMap::new(m + 2, map).expect("valid degeneracy map"));
        }
        degens.push(level_degens);
    }
    degens.push(Vec::new());
    let model = SimplicialModel { name: "circle".to_string(), levels, faces, degens };
    debug_assert_eq!(model.validate(), Ok(()));
    model
}

/// A pointed simplicial model of the 2-sphere, truncated at `max_level`.
/// Level `n` holds the basepoint and one element `D(a,b,c)` for each
/// composition `a + b + c = n - 2`, listed lexicographically by `(a, b)`.
pub fn s2_model(max_level: usize) -> SimplicialModel {
    let comps = |n: usize| -> Vec<(usize, usize, usize)> {
        if n < 2 {
            return Vec::new();
        }
        let total = n - 2;
        let mut out = Vec::new();
        for a in 0..=total {
            for b in 0..=total - a {
                out.push((a, b, total - a - b));
            }
        }
        out
    };
    let index_of = |n: usize, a: usize, b: usize| -> usize {
        // Position of (a, b, c) in the lex list, plus 1 for the basepoint.
        let total = n - 2;
        let before_a: usize = (0..a).map(|x| total - x + 1).sum();
        1 + before_a + b
    };
    let mut levels = Vec::with_capacity(max_level + 1);
    for n in 0..=max_level {
        let mut names = vec!["*".to_string()];
        names.extend(comps(n).into_iter().map(|(a, b, c)| format!("D({a},{b},{c})")));
        levels.push(PointedSet::new(names));
    }
    let face_image = |n: usize, (a, b, c): (usize, usize, usize), i: usize| -> usize {
        if i <= a {
            if a == 0 { 0 } else { index_of(n - 1, a - 1, b) }
        } else if i <= a + b + 1 {
            if b == 0 { 0 } else { index_of(n - 1, a, b - 1) }
        } else if c == 0 {
            0
        } else {
            index_of(n - 1, a, b)
        }
    };
    let degen_image = |n: usize, (a, b, _c): (usize, usize, usize), i: usize| -> usize {
        if i <= a {
            index_of(n + 1, a + 1, b)
        } else if i <= a + b + 1 {
            index_of(n + 1, a, b + 1)
        } else {
            index_of(n + 1, a, b)
        }
    };
    let mut faces = vec![Vec::new()];
    for m in 1..=max_level {
        let elements = comps(m);
        let mut level_faces = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let mut map = vec![0];
            map.extend(elements.iter().map(|&abc| face_image(m, abc, i)));
            level_faces.push(PointedMap::new(levels[m - 1].len(), map).expect("valid face map"));
        }
        faces.push(level_faces);
    }
    let mut degens = Vec::with_capacity(max_level + 1);
    for m in 0..max_level {
        let elements = comps(m);
        let mut level_degens = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let mut map = vec![0];
            map.extend(elements.iter().map(|&abc| degen_image(m, abc, i)));
            level_degens
                .push(PointedMap::new(levels[m + 1].len(), map).expect("valid degeneracy map"));
        }
        degens.push(level_degens);
    }
    degens.push(Vec::new());
    let model = SimplicialModel { name: "two-sphere".to_string(), levels, faces, degens };
    debug_assert_eq!(model.validate(), Ok(()));
    model
}

/// Hand-rolled matrix of the classical Hochschild coboundary
/// `Hom(A^(x)n, A) -> Hom(A^(x)(n+1), A)`,
///
/// `(Df)(a1..a(n+1)) = a1 f(a2..) + sum_i (-1)^i f(.., ai a(i+1), ..)
///                     + (-1)^(n+1) f(..an) a(n+1)`.
///
/// Written independently of the simplicial machinery to serve as its oracle.
pub fn classical_hochschild_matrix(alg: &Algebra, n: usize) -> Matrix {
    let d = alg.dim();
    let tag = alg.tag();
    let rows = d.pow(n as u32 + 1) * d;
    let cols = d.pow(n as u32) * d;
    let mut triplets: Vec<(usize, usize, Scalar)> = Vec::new();
    let last_neg = n % 2 == 0; // sign of (-1)^(n+1)
    for t_rank in 0..rows / d {
        let t = tuple_unrank(d, n + 1, t_rank);
        let row_base = t_rank * d;
        // a1 * f(a2 .. a(n+1))
        let col_base = tuple_rank(d, &t[1..]) * d;
        for o_in in 0..d {
            for (o, v) in alg.basis_mul(t[0], o_in).iter().enumerate() {
                if !v.is_zero() {
                    triplets.push((row_base + o, col_base + o_in, v.clone()));
                }
            }
        }
        // (-1)^i f(a1, .., ai a(i+1), .., a(n+1)) for i = 1..n
        for i in 1..=n {
            let prod = alg.basis_mul(t[i - 1], t[i]);
            for (c, v) in prod.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let mut s: Vec<usize> = Vec::with_capacity(n);
                s.extend_from_slice(&t[..i - 1]);
                s.push(c);
                s.extend_from_slice(&t[i + 1..]);
                let col_base = tuple_rank(d, &s) * d;
                let v = if i % 2 == 1 { -v } else { v.clone() };
                for o in 0..d {
                    triplets.push((row_base + o, col_base + o, v.clone()));
                }
            }
        }
        // (-1)^(n+1) f(a1 .. an) * a(n+1)
        let col_base = tuple_rank(d, &t[..n]) * d;
        for o_in in 0..d {
            for (o, v) in alg.basis_mul(o_in, t[n]).iter().enumerate() {
                if !v.is_zero() {
                    let v = if last_neg { -v } else { v.clone() };
                    triplets.push((row_base + o, col_base + o_in, v));
                }
            }
        }
    }
    Matrix::from_triplets(rows, cols, tag, triplets).expect("oracle triplets are well-formed")
}
