//! The non-symmetric operad structure on triangle cochains and the homotopy
//! algebra operations it induces.
//!
//! Degree `n` plays the role of arity `n`. Inserting `g` of arity `m` at
//! position `i` of `f` evaluates `g` on the sub-triangle spanned by indices
//! `i .. i+m-1`, multiplies the rectangle entries linking that block to the
//! rest row-wise or column-wise into single slots for `f`, and multiplies
//! the two outputs in the algebra. The distinguished arity-1 element is the
//! constant unit, and the arity-2 identity table is a multiplication on the
//! operad; from these come the circle product, bracket, braces, cup product
//! and an operadic differential that agrees with the complex differential up
//! to a degree sign, all of which are exercised by randomized law suites.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::Algebra;
use crate::field_linalg::Scalar;
use crate::s2_complex::{
    expand_factors, pos_of_pair, table_len, tri_count, tuple_unrank, Cochain, ComplexError,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OperadError {
    Complex(ComplexError),
    PositionOutOfRange { position: usize, arity: usize },
    ZeroArity,
    TooManyArguments { given: usize, arity: usize },
}

impl fmt::Display for OperadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperadError::Complex(e) => write!(f, "{e}"),
            OperadError::PositionOutOfRange { position, arity } => {
                write!(f, "insertion position {position} out of range for arity {arity}")
            }
            OperadError::ZeroArity => write!(f, "operad elements must have arity at least 1"),
            OperadError::TooManyArguments { given, arity } => {
                write!(f, "brace with {given} arguments exceeds arity {arity}")
            }
        }
    }
}

impl core::error::Error for OperadError {}

impl From<ComplexError> for OperadError {
    fn from(e: ComplexError) -> OperadError {
        OperadError::Complex(e)
    }
}

/// The arity-1 unit: the empty-slot cochain with value `1`.
pub fn unit_element(alg: &Algebra) -> Cochain {
    Cochain::from_fn(alg.tag(), alg.dim(), 1, usize::MAX, |_| alg.unit_el())
        .expect("degree-1 tables are tiny")
}

/// The arity-2 multiplication: the identity table `a -> a`.
pub fn multiplication_element(alg: &Algebra) -> Cochain {
    Cochain::from_fn(alg.tag(), alg.dim(), 2, usize::MAX, |t| alg.basis_el(t[0]))
        .expect("degree-2 tables are tiny")
}

/// How one partial composition reads the big triangle: the slots feeding the
/// inner factor verbatim, and for each outer slot the positions whose
/// product feeds it.
pub(crate) struct CompPlan {
    inner_positions: Vec<usize>,
    outer_groups: Vec<Vec<usize>>,
}

/// Plan for inserting arity `m` at position `i` of arity `n` (`1 <= i <= n`).
pub(crate) fn comp_plan(n: usize, m: usize, i: usize) -> CompPlan {
    let big = n + m - 1;
    let nu = |t: usize| {
        if t < i {
            t
        } else if t < i + m {
            i
        } else {
            t - m + 1
        }
    };
    let mut inner_positions = Vec::with_capacity(tri_count(m));
    for r in 1..=m {
        for c in r + 1..=m {
            inner_positions.push(pos_of_pair(big, i - 1 + r, i - 1 + c));
        }
    }
    let mut outer_groups = vec![Vec::new(); tri_count(n)];
    for r in 1..=big {
        for c in r + 1..=big {
            if i <= r && c < i + m {
                continue; // inner block
            }
            outer_groups[pos_of_pair(n, nu(r), nu(c))].push(pos_of_pair(big, r, c));
        }
    }
    CompPlan { inner_positions, outer_groups }
}

/// Value of the composite on one basis tuple of the big triangle.
pub(crate) fn comp_value(
    alg: &Algebra,
    x: &Cochain,
    y: &Cochain,
    plan: &CompPlan,
    tuple: &[usize],
) -> Vec<Scalar> {
    let inner: Vec<usize> = plan.inner_positions.iter().map(|&p| tuple[p]).collect();
    let y_val = y.value(&inner);
    let factors: Vec<Vec<Scalar>> = plan
        .outer_groups
        .iter()
        .map(|group| {
            let mut acc = alg.unit_el();
            for &p in group {
                acc = alg.mul(&acc, &alg.basis_el(tuple[p]));
            }
            acc
        })
        .collect();
    let mut acc = alg.zero_el();
    for (choice, kappa) in expand_factors(alg.tag(), &factors) {
        for (a, v) in acc.iter_mut().zip(x.value(&choice)) {
            *a = &*a + &(&kappa * v);
        }
    }
    alg.mul(&acc, y_val)
}

fn check_operand(alg: &Algebra, c: &Cochain) -> Result<(), OperadError> {
    assert_eq!(c.dim(), alg.dim(), "cochain dimension does not match the algebra");
    assert_eq!(c.tag(), alg.tag(), "cochain field does not match the algebra");
    if c.degree() == 0 {
        return Err(OperadError::ZeroArity);
    }
    Ok(())
}

/// Partial composition `x o_i y` for `1 <= i <= arity(x)`.
pub fn comp_i(
    alg: &Algebra,
    x: &Cochain,
    y: &Cochain,
    i: usize,
    cap: usize,
) -> Result<Cochain, OperadError> {
    check_operand(alg, x)?;
    check_operand(alg, y)?;
    let (n, m) = (x.degree(), y.degree());
    if i == 0 || i > n {
        return Err(OperadError::PositionOutOfRange { position: i, arity: n });
    }
    let plan = comp_plan(n, m, i);
    let slots = tri_count(n + m - 1);
    Ok(Cochain::from_fn(alg.tag(), alg.dim(), n + m - 1, cap, |tuple| {
        debug_assert_eq!(tuple.len(), slots);
        comp_value(alg, x, y, &plan, tuple)
    })?)
}

/// The circle product `x o y = sum_i (-1)^((i-1)(m-1)) x o_i y`.
pub fn circ(alg: &Algebra, x: &Cochain, y: &Cochain, cap: usize) -> Result<Cochain, OperadError> {
    check_operand(alg, x)?;
    check_operand(alg, y)?;
    let (n, m) = (x.degree(), y.degree());
    let mut acc = Cochain::zero(alg.tag(), alg.dim(), n + m - 1, cap)?;
    for i in 1..=n {
        let term = comp_i(alg, x, y, i, cap)?;
        acc = if (i - 1) * (m - 1) % 2 == 1 { acc.sub(&term) } else { acc.add(&term) };
    }
    Ok(acc)
}

/// The graded Lie bracket `[x, y] = x o y - (-1)^(|x||y|) y o x`, where
/// `|x| = arity(x) - 1`.
pub fn bracket(alg: &Algebra, x: &Cochain, y: &Cochain, cap: usize) -> Result<Cochain, OperadError> {
    let xy = circ(alg, x, y, cap)?;
    let yx = circ(alg, y, x, cap)?;
    let parity = (x.degree() - 1) * (y.degree() - 1);
    Ok(if parity % 2 == 1 { xy.add(&yx) } else { xy.sub(&yx) })
}

/// The operadic differential `d x = m o x - (-1)^|x| x o m` built from the
/// multiplication element. It matches the complex differential up to the
/// sign `(-1)^(arity - 1)`.
pub fn d_operad(alg: &Algebra, x: &Cochain, cap: usize) -> Result<Cochain, OperadError> {
    let m_el = multiplication_element(alg);
    let left = circ(alg, &m_el, x, cap)?;
    let right = circ(alg, x, &m_el, cap)?;
    Ok(if (x.degree() - 1) % 2 == 1 { left.add(&right) } else { left.sub(&right) })
}

/// Parity of the brace sign `sum_p |y_p| (pos_p - 1)` for arguments placed
/// at the given composite positions.
fn brace_parity(placed: &[(usize, usize)]) -> usize {
    placed.iter().map(|&(pos, deg)| (deg - 1) * (pos - 1)).sum::<usize>() % 2
}

/// The brace operation `x{y_1, .., y_k}`: the signed sum over all ways to
/// insert the arguments into `x` in order. The insertion slots are chosen
/// among the original inputs of `x`; the composition positions shift by the
/// degrees of the arguments already inserted to the left.
pub fn braces(
    alg: &Algebra,
    x: &Cochain,
    ys: &[&Cochain],
    cap: usize,
) -> Result<Cochain, OperadError> {
    if ys.is_empty() {
        return Ok(x.clone());
    }
    check_operand(alg, x)?;
    for y in ys {
        check_operand(alg, y)?;
    }
    let n = x.degree();
    let k = ys.len();
    if k > n {
        return Err(OperadError::TooManyArguments { given: k, arity: n });
    }
    let out_degree = n + ys.iter().map(|y| y.degree() - 1).sum::<usize>();
    let mut acc = Cochain::zero(alg.tag(), alg.dim(), out_degree, cap)?;
    // Enumerate 1 <= s_1 < s_2 < .. < s_k <= n.
    let mut slots: Vec<usize> = (1..=k).collect();
    loop {
        let mut placed = Vec::with_capacity(k);
        let mut shift = 0;
        for (p, &s) in slots.iter().enumerate() {
            placed.push((s + shift, ys[p].degree()));
            shift += ys[p].degree() - 1;
        }
        let mut term = x.clone();
        for (p, &(pos, _)) in placed.iter().enumerate() {
            term = comp_i(alg, &term, ys[p], pos, cap)?;
        }
        acc = if brace_parity(&placed) == 1 { acc.sub(&term) } else { acc.add(&term) };
        // Next combination.
        let mut idx = k;
        loop {
            if idx == 0 {
                return Ok(acc);
            }
            idx -= 1;
            if slots[idx] < n - (k - 1 - idx) {
                slots[idx] += 1;
                for j in idx + 1..k {
                    slots[j] = slots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Slot bookkeeping for one cup product `x . y` at fixed factor degrees:
/// where each factor reads its sub-triangle inside the big one, which slots
/// form the joining rectangle, and the overall sign.
pub(crate) struct CupPlan {
    parity: usize,
    x_positions: Vec<usize>,
    y_positions: Vec<usize>,
    block_positions: Vec<usize>,
}

pub(crate) fn cup_plan(n: usize, m: usize) -> CupPlan {
    // Only (s_1, s_2) = (1, 2) contributes for the arity-2 multiplication:
    // positions 1 and n + 1, with the extra (-1)^(|x|+1) in front.
    let parity = (brace_parity(&[(1, n), (n + 1, m)]) + n) % 2;
    let big = n + m;
    let mut x_positions = Vec::with_capacity(tri_count(n));
    for r in 1..=n {
        for c in r + 1..=n {
            x_positions.push(pos_of_pair(big, r, c));
        }
    }
    let mut y_positions = Vec::with_capacity(tri_count(m));
    for r in 1..=m {
        for c in r + 1..=m {
            y_positions.push(pos_of_pair(big, n + r, n + c));
        }
    }
    let mut block_positions = Vec::with_capacity(n * m);
    for r in 1..=n {
        for c in n + 1..=big {
            block_positions.push(pos_of_pair(big, r, c));
        }
    }
    CupPlan { parity, x_positions, y_positions, block_positions }
}

impl CupPlan {
    pub(crate) fn x_tuple(&self, tuple: &[usize]) -> Vec<usize> {
        self.x_positions.iter().map(|&p| tuple[p]).collect()
    }

    pub(crate) fn y_tuple(&self, tuple: &[usize]) -> Vec<usize> {
        self.y_positions.iter().map(|&p| tuple[p]).collect()
    }

    /// Finishes one table entry from the two factor values: multiplies in
    /// the rectangle entries and applies the sign. Stops early once the
    /// accumulated product hits zero.
    pub(crate) fn combine(
        &self,
        alg: &Algebra,
        xv: &[Scalar],
        yv: &[Scalar],
        tuple: &[usize],
    ) -> Vec<Scalar> {
        let mut out = alg.mul(xv, yv);
        for &p in &self.block_positions {
            if out.iter().all(Scalar::is_zero) {
                return out;
            }
            out = alg.mul(&out, &alg.basis_el(tuple[p]));
        }
        if self.parity == 1 {
            out.iter().map(|v| -v).collect()
        } else {
            out
        }
    }
}

/// Cup product `x . y = (-1)^(|x|+1) m{x, y}`, evaluated in closed form:
/// up to sign, the value on a big triangle is the product of the two factor
/// values on the leading and trailing sub-triangles times all the entries of
/// the rectangle joining them.
pub fn cup(alg: &Algebra, x: &Cochain, y: &Cochain, cap: usize) -> Result<Cochain, OperadError> {
    check_operand(alg, x)?;
    check_operand(alg, y)?;
    let plan = cup_plan(x.degree(), y.degree());
    let big = x.degree() + y.degree();
    Ok(Cochain::from_fn(alg.tag(), alg.dim(), big, cap, |tuple| {
        plan.combine(alg, x.value(&plan.x_tuple(tuple)), y.value(&plan.y_tuple(tuple)), tuple)
    })?)
}

/// The graded-commutativity defect `x.y - (-1)^((|x|+1)(|y|+1)) y.x`.
pub fn gradcom_defect(
    alg: &Algebra,
    x: &Cochain,
    y: &Cochain,
    cap: usize,
) -> Result<Cochain, OperadError> {
    let xy = cup(alg, x, y, cap)?;
    let yx = cup(alg, y, x, cap)?;
    let parity = x.degree() * y.degree(); // (|x|+1)(|y|+1)
    Ok(if parity % 2 == 1 { xy.add(&yx) } else { xy.sub(&yx) })
}

/// The graded-Leibniz defect
/// `[x, y.z] - [x, y].z - (-1)^(|x|(|y|+1)) y.[x, z]`.
pub fn leibniz_defect(
    alg: &Algebra,
    x: &Cochain,
    y: &Cochain,
    z: &Cochain,
    cap: usize,
) -> Result<Cochain, OperadError> {
    let yz = cup(alg, y, z, cap)?;
    let t1 = bracket(alg, x, &yz, cap)?;
    let xy = bracket(alg, x, y, cap)?;
    let t2 = cup(alg, &xy, z, cap)?;
    let xz = bracket(alg, x, z, cap)?;
    let t3 = cup(alg, y, &xz, cap)?;
    let parity = (x.degree() - 1) * y.degree(); // |x| (|y|+1)
    let acc = t1.sub(&t2);
    Ok(if parity % 2 == 1 { acc.add(&t3) } else { acc.sub(&t3) })
}

/// One named law within a verification suite.
#[derive(Clone, Debug)]
pub struct CheckLine {
    pub name: String,
    pub cases_run: usize,
    pub cases_skipped: usize,
    pub failures: Vec<String>,
}

impl CheckLine {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Outcome of a randomized law suite.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckLine>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckLine::passed)
    }

    pub fn cases_run(&self) -> usize {
        self.checks.iter().map(|c| c.cases_run).sum()
    }

    pub fn cases_skipped(&self) -> usize {
        self.checks.iter().map(|c| c.cases_skipped).sum()
    }
}

fn random_cochain(alg: &Algebra, degree: usize, cap: usize, rng: &mut ChaCha8Rng) -> Cochain {
    Cochain::random(alg.tag(), alg.dim(), degree, cap, rng).expect("suite degrees fit the cap")
}

/// Checks the operad laws — both associativity shapes and the two unit laws —
/// on seeded random cochains, round-robin over all arity combinations up to
/// `max_arity`. Cases whose result table would exceed `cap` are skipped and
/// counted.
pub fn verify_operad_axioms(
    alg: &Algebra,
    trials_per_law: usize,
    max_arity: usize,
    cap: usize,
    seed: u64,
) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = alg.dim();
    let fits = |degree: usize| table_len(d, degree, cap).is_ok();
    let mut checks = Vec::new();

    // x o_i 1 = x
    {
        let one = unit_element(alg);
        let mut line = CheckLine {
            name: "unit-right".to_string(),
            cases_run: 0,
            cases_skipped: 0,
            failures: Vec::new(),
        };
        let combos: Vec<(usize, usize)> =
            (1..=max_arity).flat_map(|n| (1..=n).map(move |i| (n, i))).collect();
        for t in 0..trials_per_law {
            let (n, i) = combos[t % combos.len()];
            if !fits(n) {
                line.cases_skipped += 1;
                continue;
            }
            let x = random_cochain(alg, n, cap, &mut rng);
            match comp_i(alg, &x, &one, i, cap) {
                Ok(r) if r == x => line.cases_run += 1,
                Ok(_) => {
                    line.cases_run += 1;
                    line.failures.push(format!("x o_{i} 1 != x at arity {n}"));
                }
                Err(e) => line.failures.push(format!("unit-right arity {n}: {e}")),
            }
        }
        checks.push(line);
    }

    // 1 o_1 x = x
    {
        let one = unit_element(alg);
        let mut line = CheckLine {
            name: "unit-left".to_string(),
            cases_run: 0,
            cases_skipped: 0,
            failures: Vec::new(),
        };
        for t in 0..trials_per_law {
            let n = t % max_arity + 1;
            if !fits(n) {
                line.cases_skipped += 1;
                continue;
            }
            let x = random_cochain(alg, n, cap, &mut rng);
            match comp_i(alg, &one, &x, 1, cap) {
                Ok(r) if r == x => line.cases_run += 1,
                Ok(_) => {
                    line.cases_run += 1;
                    line.failures.push(format!("1 o_1 x != x at arity {n}"));
                }
                Err(e) => line.failures.push(format!("unit-left arity {n}: {e}")),
            }
        }
        checks.push(line);
    }

    // (x o_j z) o_i y = (x o_i y) o_(m+j-1) z for i < j
    {
        let mut line = CheckLine {
            name: "assoc-disjoint".to_string(),
            cases_run: 0,
            cases_skipped: 0,
            failures: Vec::new(),
        };
        let mut combos = Vec::new();
        for n in 2..=max_arity {
            for m in 1..=max_arity {
                for p in 1..=max_arity {
                    for j in 2..=n {
                        for i in 1..j {
                            combos.push((n, m, p, i, j));
                        }
                    }
                }
            }
        }
        for t in 0..trials_per_law {
            if combos.is_empty() {
                break;
            }
            let (n, m, p, i, j) = combos[t % combos.len()];
            let final_degree = n + m + p - 2;
            if !(fits(final_degree) && fits(n + p - 1) && fits(n + m - 1)) {
                line.cases_skipped += 1;
                continue;
            }
            let x = random_cochain(alg, n, cap, &mut rng);
            let y = random_cochain(alg, m, cap, &mut rng);
            let z = random_cochain(alg, p, cap, &mut rng);
            let case = (|| -> Result<bool, OperadError> {
                let xz = comp_i(alg, &x, &z, j, cap)?;
                let xy = comp_i(alg, &x, &y, i, cap)?;
                let plan_l = comp_plan(n + p - 1, m, i);
                let plan_r = comp_plan(n + m - 1, p, m + j - 1);
                Ok(streamed_equal(d, final_degree, |tuple| {
                    (comp_value(alg, &xz, &y, &plan_l, tuple), comp_value(alg, &xy, &z, &plan_r, tuple))
                }))
            })();
            match case {
                Ok(true) => line.cases_run += 1,
                Ok(false) => {
                    line.cases_run += 1;
                    line.failures
                        .push(format!("disjoint associativity failed at n={n} m={m} p={p} i={i} j={j}"));
                }
                Err(e) => line.failures.push(format!("assoc-disjoint n={n} m={m} p={p}: {e}")),
            }
        }
        checks.push(line);
    }

    // (x o_i y) o_(i+j-1) z = x o_i (y o_j z)
    {
        let mut line = CheckLine {
            name: "assoc-nested".to_string(),
            cases_run: 0,
            cases_skipped: 0,
            failures: Vec::new(),
        };
        let mut combos = Vec::new();
        for n in 1..=max_arity {
            for m in 1..=max_arity {
                for p in 1..=max_arity {
                    for i in 1..=n {
                        for j in 1..=m {
                            combos.push((n, m, p, i, j));
                        }
                    }
                }
            }
        }
        for t in 0..trials_per_law {
            let (n, m, p, i, j) = combos[t % combos.len()];
            let final_degree = n + m + p - 2;
            if !(fits(final_degree) && fits(n + m - 1) && fits(m + p - 1)) {
                line.cases_skipped += 1;
                continue;
            }
            let x = random_cochain(alg, n, cap, &mut rng);
            let y = random_cochain(alg, m, cap, &mut rng);
            let z = random_cochain(alg, p, cap, &mut rng);
            let case = (|| -> Result<bool, OperadError> {
                let xy = comp_i(alg, &x, &y, i, cap)?;
                let yz = comp_i(alg, &y, &z, j, cap)?;
                let plan_l = comp_plan(n + m - 1, p, i + j - 1);
                let plan_r = comp_plan(n, m + p - 1, i);
                Ok(streamed_equal(d, final_degree, |tuple| {
                    (comp_value(alg, &xy, &z, &plan_l, tuple), comp_value(alg, &x, &yz, &plan_r, tuple))
                }))
            })();
            match case {
                Ok(true) => line.cases_run += 1,
                Ok(false) => {
                    line.cases_run += 1;
                    line.failures
                        .push(format!("nested associativity failed at n={n} m={m} p={p} i={i} j={j}"));
                }
                Err(e) => line.failures.push(format!("assoc-nested n={n} m={m} p={p}: {e}")),
            }
        }
        checks.push(line);
    }

    SuiteReport { suite: "operad".to_string(), checks }
}

/// Compares two evaluations tuple-by-tuple without materializing the tables.
fn streamed_equal(
    d: usize,
    degree: usize,
    mut eval: impl FnMut(&[usize]) -> (Vec<Scalar>, Vec<Scalar>),
) -> bool {
    let slots = tri_count(degree);
    let count = d.pow(slots as u32);
    for r in 0..count {
        let tuple = tuple_unrank(d, slots, r);
        let (lhs, rhs) = eval(&tuple);
        if lhs != rhs {
            return false;
        }
    }
    true
}

/// Checks the two homotopy-compatibility identities tying the bracket and
/// cup product to the operadic differential, exactly at cochain level, on
/// seeded random cochains of degree up to `max_degree`.
pub fn verify_gv_identities(
    alg: &Algebra,
    trials_per_law: usize,
    max_degree: usize,
    cap: usize,
    seed: u64,
) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = alg.dim();
    let fits = |degree: usize| table_len(d, degree, cap).is_ok();
    let mut checks = Vec::new();

    // x.y - (-1)^((|x|+1)(|y|+1)) y.x
    //   = (-1)^|x| (d(x o y) - dx o y - (-1)^|x| x o dy)
    {
        let mut line = CheckLine {
            name: "graded-commutativity-homotopy".to_string(),
            cases_run: 0,
            cases_skipped: 0,
            failures: Vec::new(),
        };
        let combos: Vec<(usize, usize)> = (1..=max_degree)
            .flat_map(|n| (1..=max_degree).map(move |m| (n, m)))
            .collect();
        for t in 0..trials_per_law {
            let (n, m) = combos[t % combos.len()];
            if !fits(n + m) {
                line.cases_skipped += 1;
                continue;
            }
            let x = random_cochain(alg, n, cap, &mut rng);
            let y = random_cochain(alg, m, cap, &mut rng);
            let case = (|| -> Result<bool, OperadError> {
                let lhs = gradcom_defect(alg, &x, &y, cap)?;
                let x_parity = (n - 1) % 2;
                let dxy = d_operad(alg, &circ(alg, &x, &y, cap)?, cap)?;
                let dx_y = circ(alg, &d_operad(alg, &x, cap)?, &y, cap)?;
                let x_dy = circ(alg, &x, &d_operad(alg, &y, cap)?, cap)?;
                let mut rhs = dxy.sub(&dx_y);
                rhs = if x_parity == 1 { rhs.add(&x_dy) } else { rhs.sub(&x_dy) };
                if x_parity == 1 {
                    rhs = rhs.neg();
                }
                Ok(lhs == rhs)
            })();
            match case {
                Ok(true) => line.cases_run += 1,
                Ok(false) => {
                    line.cases_run += 1;
                    line.failures.push(format!("commutativity homotopy failed at n={n} m={m}"));
                }
                Err(e) => line.failures.push(format!("n={n} m={m}: {e}")),
            }
        }
        checks.push(line);
    }

    // [x, y.z] - [x, y].z - (-1)^(|x|(|y|+1)) y.[x, z]
    //   = (-1)^(|x|+|y|+1) (d(x{y,z}) - dx{y,z}
    //     - (-1)^|x| x{dy,z} - (-1)^(|x|+|y|) x{y,dz})
    {
        let mut line = CheckLine {
            name: "leibniz-homotopy".to_string(),
            cases_run: 0,
            cases_skipped: 0,
            failures: Vec::new(),
        };
        // x{y, z} needs two insertion slots, so x has arity at least 2.
        let mut combos = Vec::new();
        for n in 2..=max_degree.max(2) {
            for m in 1..=max_degree {
                for p in 1..=max_degree {
                    combos.push((n, m, p));
                }
            }
        }
        for t in 0..trials_per_law {
            let (n, m, p) = combos[t % combos.len()];
            if !fits(n + m + p - 1) {
                line.cases_skipped += 1;
                continue;
            }
            let x = random_cochain(alg, n, cap, &mut rng);
            let y = random_cochain(alg, m, cap, &mut rng);
            let z = random_cochain(alg, p, cap, &mut rng);
            let case = (|| -> Result<bool, OperadError> {
                let lhs = leibniz_defect(alg, &x, &y, &z, cap)?;
                let x_parity = (n - 1) % 2;
                let y_parity = (m - 1) % 2;
                let dx = d_operad(alg, &x, cap)?;
                let dy = d_operad(alg, &y, cap)?;
                let dz = d_operad(alg, &z, cap)?;
                let d_xyz = d_operad(alg, &braces(alg, &x, &[&y, &z], cap)?, cap)?;
                let dx_yz = braces(alg, &dx, &[&y, &z], cap)?;
                let x_dyz = braces(alg, &x, &[&dy, &z], cap)?;
                let x_ydz = braces(alg, &x, &[&y, &dz], cap)?;
                let mut rhs = d_xyz.sub(&dx_yz);
                rhs = if x_parity == 1 { rhs.add(&x_dyz) } else { rhs.sub(&x_dyz) };
                rhs = if (x_parity + y_parity) % 2 == 1 { rhs.add(&x_ydz) } else { rhs.sub(&x_ydz) };
                if (x_parity + y_parity + 1) % 2 == 1 {
                    rhs = rhs.neg();
                }
                Ok(lhs == rhs)
            })();
            match case {
                Ok(true) => line.cases_run += 1,
                Ok(false) => {
                    line.cases_run += 1;
                    line.failures.push(format!("leibniz homotopy failed at n={n} m={m} p={p}"));
                }
                Err(e) => line.failures.push(format!("n={n} m={m} p={p}: {e}")),
            }
        }
        checks.push(line);
    }

    SuiteReport { suite: "homotopy-compatibility".to_string(), checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_linalg::FieldTag;
    use crate::s2_complex::delta;
    use crate::DEFAULT_CAP;

    fn f101() -> FieldTag {
        FieldTag::Fp(101)
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn unit_laws_hold() {
        let alg = Algebra::dual_numbers(f101());
        let one = unit_element(&alg);
        let mut r = rng(3);
        for n in 1..=3 {
            let x = Cochain::random(f101(), 2, n, DEFAULT_CAP, &mut r).unwrap();
            for i in 1..=n {
                assert_eq!(comp_i(&alg, &x, &one, i, DEFAULT_CAP).unwrap(), x, "x o_{i} 1");
            }
            assert_eq!(comp_i(&alg, &one, &x, 1, DEFAULT_CAP).unwrap(), x, "1 o_1 x");
        }
    }

    #[test]
    fn multiplication_composites_are_the_two_bracketings() {
        // m o_1 m (a,b,c) = (bc) a and m o_2 m (a,b,c) = (ab) c.
        let alg = Algebra::truncated_poly(f101(), 3);
        let m_el = multiplication_element(&alg);
        let left = comp_i(&alg, &m_el, &m_el, 1, DEFAULT_CAP).unwrap();
        let right = comp_i(&alg, &m_el, &m_el, 2, DEFAULT_CAP).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let prod = alg.product([&alg.basis_el(a)[..], &alg.basis_el(b), &alg.basis_el(c)]);
                    assert_eq!(left.value(&[a, b, c]), &prod[..]);
                    assert_eq!(right.value(&[a, b, c]), &prod[..]);
                }
            }
        }
        // Their circle product therefore vanishes.
        assert!(circ(&alg, &m_el, &m_el, DEFAULT_CAP).unwrap().is_zero());
        let rat = Algebra::truncated_poly2(FieldTag::Rat, 2, 2);
        let m_rat = multiplication_element(&rat);
        assert!(circ(&rat, &m_rat, &m_rat, DEFAULT_CAP).unwrap().is_zero());
    }

    #[test]
    fn degree_two_circle_product_closed_form() {
        // f o g (a,b,c) = f(bc) g(a) - f(ab) g(c) for degree-2 f, g.
        let alg = Algebra::dual_numbers(FieldTag::Rat);
        let mut r = rng(9);
        let f = Cochain::random(FieldTag::Rat, 2, 2, DEFAULT_CAP, &mut r).unwrap();
        let g = Cochain::random(FieldTag::Rat, 2, 2, DEFAULT_CAP, &mut r).unwrap();
        let fg = circ(&alg, &f, &g, DEFAULT_CAP).unwrap();
        let ext = |h: &Cochain, x: &[Scalar]| -> Vec<Scalar> {
            let mut acc = alg.zero_el();
            for (c, v) in x.iter().enumerate() {
                if !v.is_zero() {
                    for (a, w) in acc.iter_mut().zip(h.value(&[c])) {
                        *a = &*a + &(v * w);
                    }
                }
            }
            acc
        };
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let ab = alg.mul(&alg.basis_el(a), &alg.basis_el(b));
                    let bc = alg.mul(&alg.basis_el(b), &alg.basis_el(c));
                    let t1 = alg.mul(&ext(&f, &bc), g.value(&[a]));
                    let t2 = alg.mul(&ext(&f, &ab), g.value(&[c]));
                    let expect: Vec<Scalar> =
                        t1.iter().zip(t2.iter()).map(|(u, v)| u - v).collect();
                    assert_eq!(fg.value(&[a, b, c]), &expect[..], "({a},{b},{c})");
                }
            }
        }
    }

    #[test]
    fn differential_matches_complex_up_to_sign() {
        for alg in [Algebra::dual_numbers(f101()), Algebra::truncated_poly(f101(), 3)] {
            let mut r = rng(17);
            for n in 1..=3 {
                let f = Cochain::random(alg.tag(), alg.dim(), n, DEFAULT_CAP, &mut r).unwrap();
                let lhs = d_operad(&alg, &f, DEFAULT_CAP).unwrap();
                let rhs = delta(&alg, &f, DEFAULT_CAP).unwrap();
                let signed = if (n - 1) % 2 == 1 { lhs.neg() } else { lhs };
                assert_eq!(signed, rhs, "degree {n} dim {}", alg.dim());
            }
        }
    }

    #[test]
    fn single_brace_is_circle_product() {
        let alg = Algebra::dual_numbers(f101());
        let mut r = rng(21);
        for n in 1..=3 {
            for m in 1..=3 {
                let x = Cochain::random(f101(), 2, n, DEFAULT_CAP, &mut r).unwrap();
                let y = Cochain::random(f101(), 2, m, DEFAULT_CAP, &mut r).unwrap();
                assert_eq!(
                    braces(&alg, &x, &[&y], DEFAULT_CAP).unwrap(),
                    circ(&alg, &x, &y, DEFAULT_CAP).unwrap(),
                    "n={n} m={m}"
                );
            }
        }
        let x = Cochain::random(f101(), 2, 2, DEFAULT_CAP, &mut r).unwrap();
        assert_eq!(braces(&alg, &x, &[], DEFAULT_CAP).unwrap(), x);
    }

    #[test]
    fn cup_closed_form_agrees_with_braces_route() {
        let alg = Algebra::dual_numbers(f101());
        let m_el = multiplication_element(&alg);
        let mut r = rng(33);
        for n in 1..=3usize {
            for m in 1..=2usize {
                let x = Cochain::random(f101(), 2, n, DEFAULT_CAP, &mut r).unwrap();
                let y = Cochain::random(f101(), 2, m, DEFAULT_CAP, &mut r).unwrap();
                let closed = cup(&alg, &x, &y, DEFAULT_CAP).unwrap();
                let braced = braces(&alg, &m_el, &[&x, &y], DEFAULT_CAP).unwrap();
                // (-1)^(|x|+1) = (-1)^n in front of the brace.
                let expected = if n % 2 == 1 { braced.neg() } else { braced };
                assert_eq!(closed, expected, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn bracket_satisfies_graded_jacobi() {
        // (-1)^(|x||z|) [[x,y],z] + (-1)^(|y||x|) [[y,z],x]
        //   + (-1)^(|z||y|) [[z,x],y] = 0
        let alg = Algebra::dual_numbers(f101());
        let mut r = rng(41);
        for (n, m, p) in [(1, 1, 1), (2, 1, 2), (2, 2, 2), (3, 2, 2), (2, 3, 2)] {
            let x = Cochain::random(f101(), 2, n, DEFAULT_CAP, &mut r).unwrap();
            let y = Cochain::random(f101(), 2, m, DEFAULT_CAP, &mut r).unwrap();
            let z = Cochain::random(f101(), 2, p, DEFAULT_CAP, &mut r).unwrap();
            let term = |a: &Cochain, b: &Cochain, c: &Cochain| -> Cochain {
                let ab_c = bracket(
                    &alg,
                    &bracket(&alg, a, b, DEFAULT_CAP).unwrap(),
                    c,
                    DEFAULT_CAP,
                )
                .unwrap();
                let parity = (a.degree() - 1) * (c.degree() - 1);
                if parity % 2 == 1 { ab_c.neg() } else { ab_c }
            };
            let total = term(&x, &y, &z).add(&term(&y, &z, &x)).add(&term(&z, &x, &y));
            assert!(total.is_zero(), "n={n} m={m} p={p}");
        }
    }

    #[test]
    fn invalid_compositions_error() {
        let alg = Algebra::dual_numbers(f101());
        let mut r = rng(2);
        let x = Cochain::random(f101(), 2, 2, DEFAULT_CAP, &mut r).unwrap();
        let c0 = Cochain::random(f101(), 2, 0, DEFAULT_CAP, &mut r).unwrap();
        assert!(matches!(
            comp_i(&alg, &x, &x, 3, DEFAULT_CAP),
            Err(OperadError::PositionOutOfRange { position: 3, arity: 2 })
        ));
        assert!(matches!(comp_i(&alg, &x, &c0, 1, DEFAULT_CAP), Err(OperadError::ZeroArity)));
        let ys = [&x, &x, &x];
        assert!(matches!(
            braces(&alg, &x, &ys, DEFAULT_CAP),
            Err(OperadError::TooManyArguments { given: 3, arity: 2 })
        ));
    }

    #[test]
    fn axiom_suite_passes_on_small_arities() {
        let alg = Algebra::dual_numbers(f101());
        let report = verify_operad_axioms(&alg, 24, 2, DEFAULT_CAP, 99);
        assert!(report.passed(), "failures: {:?}", report.checks);
        assert_eq!(report.cases_skipped(), 0);
        for line in &report.checks {
            assert_eq!(line.cases_run, 24, "{}", line.name);
        }
    }

    #[test]
    fn compatibility_suite_passes_on_small_degrees() {
        let alg = Algebra::dual_numbers(f101());
        let report = verify_gv_identities(&alg, 8, 2, DEFAULT_CAP, 7);
        assert!(report.passed(), "failures: {:?}", report.checks);
        assert_eq!(report.cases_skipped(), 0);
    }
}
