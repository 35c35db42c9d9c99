//! Order-by-order deformations `u(a) = a + u_1(a) t + u_2(a) t^2 + ...` of
//! the identity, constrained by the truncated identity
//! `u(ab) u(c) = u(a) u(bc)` on triangles. Each new order is governed by a
//! linear problem whose obstruction is a degree-3 cocycle; lifting succeeds
//! exactly when its class vanishes. The truncated identity itself, expanded
//! coefficient by coefficient on basis triples, serves as an independent
//! check on every state the solver produces.

use alloc::vec::Vec;
use core::fmt;

use crate::algebra::Algebra;
use crate::cohomology::{class_coordinates, CohomologyError, CohomologyReport};
use crate::field_linalg::Scalar;
use crate::operad::OperadError;
use crate::s2_complex::{delta, delta_matrix, tri_count, tuple_unrank, Cochain, ComplexError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeformationError {
    Complex(ComplexError),
    Operad(OperadError),
    Cohomology(CohomologyError),
    /// A deformation map was not a degree-2 cochain over the algebra.
    BadMap { index: usize, what: &'static str },
    /// An operation required the state to be verified to its full order.
    NotVerified { order: usize, verified: usize },
    /// An obstruction failed the cocycle check; `tuple`/`coord` locate the
    /// first nonzero entry of its differential.
    ObstructionNotCocycle { order: usize, tuple: Vec<usize>, coord: usize },
    /// A solver-produced lift failed the truncated-identity oracle.
    LiftRegressed { expected: usize, actual: usize },
    /// The Euler construction needs a grading on the algebra.
    NotGraded,
    /// The Euler map failed its cocycle assertion.
    EulerNotCocycle { tuple: Vec<usize>, coord: usize },
}

impl fmt::Display for DeformationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeformationError::Complex(e) => write!(f, "{e}"),
            DeformationError::Operad(e) => write!(f, "{e}"),
            DeformationError::Cohomology(e) => write!(f, "{e}"),
            DeformationError::BadMap { index, what } => {
                write!(f, "deformation map u_{index} is invalid: {what}")
            }
            DeformationError::NotVerified { order, verified } => write!(
                f,
                "state of order {order} is only verified to order {verified}"
            ),
            DeformationError::ObstructionNotCocycle { order, tuple, coord } => write!(
                f,
                "obstruction at order {order} is not a cocycle: differential is nonzero on \
                 basis tensor {tuple:?}, output coordinate {coord}"
            ),
            DeformationError::LiftRegressed { expected, actual } => write!(
                f,
                "lifted state should verify to order {expected} but only reaches {actual}"
            ),
            DeformationError::NotGraded => {
                write!(f, "the Euler construction needs a graded algebra")
            }
            DeformationError::EulerNotCocycle { tuple, coord } => write!(
                f,
                "Euler map is not a cocycle: differential is nonzero on basis tensor \
                 {tuple:?}, output coordinate {coord}"
            ),
        }
    }
}

impl core::error::Error for DeformationError {}

impl From<ComplexError> for DeformationError {
    fn from(e: ComplexError) -> DeformationError {
        DeformationError::Complex(e)
    }
}

impl From<OperadError> for DeformationError {
    fn from(e: OperadError) -> DeformationError {
        DeformationError::Operad(e)
    }
}

impl From<CohomologyError> for DeformationError {
    fn from(e: CohomologyError) -> DeformationError {
        DeformationError::Cohomology(e)
    }
}

/// Applies a degree-2 cochain, seen as a linear map on the algebra, to a
/// coefficient vector.
fn apply_map(alg: &Algebra, u: &Cochain, v: &[Scalar]) -> Vec<Scalar> {
    let mut out = alg.zero_el();
    for (k, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (o, w) in u.value(&[k]).iter().enumerate() {
            if !w.is_zero() {
                out[o] = &out[o] + &(c * w);
            }
        }
    }
    out
}

/// A truncated deformation `u = id + u_1 t + ... + u_N t^N` together with
/// the largest order to which the truncated identity has been confirmed.
#[derive(Clone, Debug)]
pub struct DeformationState {
    algebra: Algebra,
    maps: Vec<Cochain>,
    verified: usize,
}

impl DeformationState {
    /// Wraps the maps `u_1, ..., u_N` (in order) and measures how far the
    /// truncated identity actually holds.
    pub fn new(algebra: Algebra, maps: Vec<Cochain>) -> Result<DeformationState, DeformationError> {
        for (idx, u) in maps.iter().enumerate() {
            if u.degree() != 2 {
                return Err(DeformationError::BadMap { index: idx + 1, what: "degree is not 2" });
            }
            if u.dim() != algebra.dim() {
                return Err(DeformationError::BadMap { index: idx + 1, what: "dimension mismatch" });
            }
            if u.tag() != algebra.tag() {
                return Err(DeformationError::BadMap { index: idx + 1, what: "field mismatch" });
            }
        }
        let mut state = DeformationState { algebra, maps, verified: 0 };
        state.verified = verify_truncated(&state, state.order());
        Ok(state)
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn order(&self) -> usize {
        self.maps.len()
    }

    pub fn verified_order(&self) -> usize {
        self.verified
    }

    pub fn maps(&self) -> &[Cochain] {
        &self.maps
    }

    /// The coefficient map of `t^i` applied to a vector; `i = 0` is the
    /// identity.
    fn apply(&self, i: usize, v: &[Scalar]) -> Vec<Scalar> {
        if i == 0 {
            v.to_vec()
        } else {
            apply_map(&self.algebra, &self.maps[i - 1], v)
        }
    }

    fn with_next(&self, u_next: Cochain) -> Result<DeformationState, DeformationError> {
        let mut maps = self.maps.clone();
        maps.push(u_next);
        DeformationState::new(self.algebra.clone(), maps)
    }
}

/// Expands both sides of `u(ab) u(c) = u(a) u(bc)` as truncated power
/// series on every basis triple and returns the largest `n <= n_limit` with
/// equality of all coefficients of `t^1, ..., t^n`. This touches none of
/// the complex machinery, which is the point: it independently audits what
/// the cochain-level equations claim.
pub fn verify_truncated(state: &DeformationState, n_limit: usize) -> usize {
    assert!(n_limit <= state.order(), "cannot verify beyond the truncation order");
    let alg = &state.algebra;
    let d = alg.dim();
    let mut best = n_limit;
    for a in 0..d {
        for b in 0..d {
            if best == 0 {
                return 0;
            }
            let ab = alg.basis_mul(a, b).to_vec();
            let ea = alg.basis_el(a);
            let u_ab: Vec<Vec<Scalar>> = (0..=best).map(|i| state.apply(i, &ab)).collect();
            let u_a: Vec<Vec<Scalar>> = (0..=best).map(|i| state.apply(i, &ea)).collect();
            for c in 0..d {
                let bc = alg.basis_mul(b, c).to_vec();
                let ec = alg.basis_el(c);
                'orders: for s in 1..=best {
                    let mut diff = alg.zero_el();
                    for i in 0..=s {
                        let lhs = alg.mul(&u_ab[i], &state.apply(s - i, &ec));
                        let rhs = alg.mul(&u_a[i], &state.apply(s - i, &bc));
                        for (o, (l, r)) in lhs.iter().zip(&rhs).enumerate() {
                            diff[o] = &diff[o] + &(l - r);
                        }
                    }
                    if diff.iter().any(|v| !v.is_zero()) {
                        best = s - 1;
                        break 'orders;
                    }
                }
            }
        }
    }
    best
}

/// The degree-2 circle product in closed form: on a triangle
/// `(a, b, c) = (a_12, a_13, a_23)`,
/// `(f o g)(a, b, c) = f(bc) g(a) - f(ab) g(c)`.
pub fn circ2(
    alg: &Algebra,
    f: &Cochain,
    g: &Cochain,
    cap: usize,
) -> Result<Cochain, DeformationError> {
    for (u, index) in [(f, 1), (g, 2)] {
        if u.degree() != 2 || u.dim() != alg.dim() || u.tag() != alg.tag() {
            return Err(DeformationError::BadMap { index, what: "not a degree-2 cochain over A" });
        }
    }
    Ok(Cochain::from_fn(alg.tag(), alg.dim(), 3, cap, |tuple| {
        let (a, b, c) = (tuple[0], tuple[1], tuple[2]);
        let f_bc = apply_map(alg, f, alg.basis_mul(b, c));
        let t1 = alg.mul(&f_bc, g.value(&[a]));
        let f_ab = apply_map(alg, f, alg.basis_mul(a, b));
        let t2 = alg.mul(&f_ab, g.value(&[c]));
        t1.iter().zip(&t2).map(|(x, y)| x - y).collect()
    })?)
}

/// The obstruction against extending a state one order further, with its
/// cocycle check and (when it is a cocycle) its class coordinates.
#[derive(Clone, Debug)]
pub struct ObstructionClass {
    pub order: usize,
    pub omega: Cochain,
    pub is_cocycle: bool,
    pub class: Option<Vec<Scalar>>,
}

impl ObstructionClass {
    pub fn class_is_zero(&self) -> bool {
        self.class.as_ref().is_some_and(|v| v.iter().all(Scalar::is_zero))
    }
}

/// Computes `omega_n = sum_i u_i o u_(n+1-i)` for a state of order `n`
/// verified to order `n`, checks it is a cocycle, and locates its class.
/// The report must cover degree 3.
pub fn obstruction(
    state: &DeformationState,
    report: &CohomologyReport,
    cap: usize,
) -> Result<ObstructionClass, DeformationError> {
    let n = state.order();
    if state.verified_order() < n {
        return Err(DeformationError::NotVerified { order: n, verified: state.verified_order() });
    }
    let alg = &state.algebra;
    let mut omega = Cochain::zero(alg.tag(), alg.dim(), 3, cap)?;
    for i in 1..=n {
        omega = omega.add(&circ2(alg, &state.maps[i - 1], &state.maps[n - i], cap)?);
    }
    let d_omega = delta(alg, &omega, cap)?;
    let is_cocycle = d_omega.is_zero();
    let class = if is_cocycle {
        Some(class_coordinates(alg, &omega, report, cap)?)
    } else {
        None
    };
    Ok(ObstructionClass { order: n, omega, is_cocycle, class })
}

#[derive(Clone, Debug)]
pub enum LiftOutcome {
    /// The next map exists; the new state is re-verified one order higher.
    Lifted { state: DeformationState, obstruction: ObstructionClass },
    /// No next map exists; the obstruction class is nonzero.
    Obstructed { obstruction: ObstructionClass },
}

/// Tries to extend a verified state of order `n` by solving the linear
/// system `delta_2(u_(n+1)) = omega_n`. A failed cocycle check on the
/// obstruction aborts with a witness; a successful lift is re-verified with
/// the truncated-identity oracle before being returned.
pub fn lift_step(
    state: &DeformationState,
    report: &CohomologyReport,
    cap: usize,
) -> Result<LiftOutcome, DeformationError> {
    let obstruction = obstruction(state, report, cap)?;
    if !obstruction.is_cocycle {
        let d_omega = delta(&state.algebra, &obstruction.omega, cap)?;
        let idx = d_omega
            .values()
            .iter()
            .position(|v| !v.is_zero())
            .expect("a failed cocycle check has a nonzero entry");
        let d = state.algebra.dim();
        return Err(DeformationError::ObstructionNotCocycle {
            order: obstruction.order,
            tuple: tuple_unrank(d, tri_count(4), idx / d),
            coord: idx % d,
        });
    }
    let alg = &state.algebra;
    let d2 = delta_matrix(alg, 2, cap)?;
    match d2.solve(obstruction.omega.values()).map_err(CohomologyError::Linalg)? {
        Some(x) => {
            let u_next = Cochain::from_vec(alg.tag(), alg.dim(), 2, x)?;
            let lifted = state.with_next(u_next)?;
            if lifted.verified_order() < state.order() + 1 {
                return Err(DeformationError::LiftRegressed {
                    expected: state.order() + 1,
                    actual: lifted.verified_order(),
                });
            }
            Ok(LiftOutcome::Lifted { state: lifted, obstruction })
        }
        None => Ok(LiftOutcome::Obstructed { obstruction }),
    }
}

fn weight_diagonal_map(
    alg: &Algebra,
    entry: impl Fn(usize) -> i64,
) -> Result<Cochain, DeformationError> {
    let d = alg.dim();
    let mut values = Vec::with_capacity(d * d);
    for k in 0..d {
        for o in 0..d {
            values.push(if o == k {
                Scalar::from_i64(alg.tag(), entry(k))
            } else {
                Scalar::zero(alg.tag())
            });
        }
    }
    Ok(Cochain::from_vec(alg.tag(), d, 2, values)?)
}

/// The Euler derivation `u_1(e_k) = w_k e_k` for a graded algebra with
/// weights `w`. For `k[x]/(x^m)` this is `u_1(x^k) = k x^k`, the first
/// coefficient of the substitution `x -> (1 + t) x`. The cocycle condition
/// is checked, not assumed.
pub fn euler_derivation(alg: &Algebra, cap: usize) -> Result<Cochain, DeformationError> {
    let grading = alg.grading().ok_or(DeformationError::NotGraded)?.to_vec();
    let u = weight_diagonal_map(alg, |k| grading[k] as i64)?;
    let du = delta(alg, &u, cap)?;
    if let Some(idx) = du.values().iter().position(|v| !v.is_zero()) {
        let d = alg.dim();
        return Err(DeformationError::EulerNotCocycle {
            tuple: tuple_unrank(d, tri_count(3), idx / d),
            coord: idx % d,
        });
    }
    Ok(u)
}

/// The order-`n` coefficient of the substitution deformation
/// `u(e_k) = (1 + t)^(w_k) e_k`: the diagonal map `e_k -> C(w_k, n) e_k`.
/// Order 1 is the Euler derivation.
pub fn geometric_family(alg: &Algebra, n: usize) -> Result<Cochain, DeformationError> {
    let grading = alg.grading().ok_or(DeformationError::NotGraded)?.to_vec();
    weight_diagonal_map(alg, |k| {
        let w = grading[k] as u64;
        let n = n as u64;
        if n > w {
            0
        } else {
            num_integer::binomial(w, n) as i64
        }
    })
}
