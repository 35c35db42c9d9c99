//! Exact computation of higher-order Hochschild cohomology of a finite
//! dimensional commutative algebra over the two-sphere, together with the
//! operad-level structure (partial compositions, braces, cup product,
//! Gerstenhaber bracket) carried by the cochain complex and the
//! deformation-theoretic obstruction pipeline that consumes it.
//!
//! Everything here is exact: scalars live in a prime field `F_p` or in `Q`
//! with arbitrary-precision rationals. There are no floats and no rounding.
//! The crate is `no_std` (with `alloc`); IO, file formats and the command
//! line front end live in the companion crate.
//!
//! The two computational routes to the differential — the generic simplicial
//! pullback machinery in [`simplicial`] and the closed-form tensor-matrix
//! collapse in [`s2_complex`] — are deliberately independent of each other so
//! that they can cross-check one another.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod algebra;
pub mod cohomology;
pub mod deformation;
pub mod field_linalg;
pub mod operad;
pub mod s2_complex;
pub mod simplicial;

pub use algebra::Algebra;
pub use field_linalg::{FieldTag, Matrix, Scalar};

/// Default hard cap on the number of scalars in a single cochain space
/// (`d^(N+1)` for degree `n`, `N = n(n-1)/2`). Operations that would build a
/// larger table refuse to run unless the caller raises the cap explicitly.
pub const DEFAULT_CAP: usize = 1 << 20;
