//! Cohomology of the triangle complex: ranks and representative cocycles per
//! degree, class coordinates, induced products on classes, and a randomized
//! suite checking the homotopy-algebra identities at the level of cohomology
//! (exactly where they hold exactly, modulo coboundaries where they do not).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::Algebra;
use crate::field_linalg::{LinalgError, Matrix, Scalar};
use crate::operad::{
    bracket, cup, cup_plan, gradcom_defect, leibniz_defect, CheckLine, OperadError, SuiteReport,
};
use crate::s2_complex::{
    delta, delta_matrix, table_len, tri_count, tuple_unrank, Cochain, ComplexError,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CohomologyError {
    Complex(ComplexError),
    Operad(OperadError),
    Linalg(LinalgError),
    /// The report does not cover the requested degree (out of range or cut
    /// off by the size cap).
    DegreeNotCovered { degree: usize },
    /// A map that had to be a cocycle is not; `tuple`/`coord` locate the
    /// first nonzero entry of its differential.
    NotCocycle { source: &'static str, degree: usize, tuple: Vec<usize>, coord: usize },
}

impl fmt::Display for CohomologyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CohomologyError::Complex(e) => write!(f, "{e}"),
            CohomologyError::Operad(e) => write!(f, "{e}"),
            CohomologyError::Linalg(e) => write!(f, "{e}"),
            CohomologyError::DegreeNotCovered { degree } => {
                write!(f, "cohomology report does not cover degree {degree}")
            }
            CohomologyError::NotCocycle { source, degree, tuple, coord } => write!(
                f,
                "{source} of degree {degree} is not a cocycle: its differential is nonzero on \
                 basis tensor {tuple:?}, output coordinate {coord}"
            ),
        }
    }
}

impl core::error::Error for CohomologyError {}

impl From<ComplexError> for CohomologyError {
    fn from(e: ComplexError) -> CohomologyError {
        CohomologyError::Complex(e)
    }
}

impl From<OperadError> for CohomologyError {
    fn from(e: OperadError) -> CohomologyError {
        CohomologyError::Operad(e)
    }
}

impl From<LinalgError> for CohomologyError {
    fn from(e: LinalgError) -> CohomologyError {
        CohomologyError::Linalg(e)
    }
}

/// Rank data for one degree: cochains, cocycles, coboundaries, cohomology,
/// plus a chosen cocycle representative for every cohomology class in the
/// basis.
#[derive(Clone, Debug)]
pub struct DegreeSummary {
    pub n: usize,
    pub dim_c: usize,
    pub dim_z: usize,
    pub dim_b: usize,
    pub dim_h: usize,
    pub representatives: Vec<Cochain>,
}

/// Marker for a sweep stopped early: computing the differential out of
/// `degree` would have needed a table of `needed` scalars against a cap of
/// `cap`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub degree: usize,
    pub needed: usize,
    pub cap: usize,
}

#[derive(Clone, Debug)]
pub struct CohomologyReport {
    pub degrees: Vec<DegreeSummary>,
    pub truncated: Option<Truncation>,
}

impl CohomologyReport {
    pub fn degree(&self, n: usize) -> Option<&DegreeSummary> {
        self.degrees.iter().find(|s| s.n == n)
    }

    pub fn is_partial(&self) -> bool {
        self.truncated.is_some()
    }
}

/// Computes dim C / dim Z / dim B / dim H and representatives for every
/// degree `0 ..= n_max`. Degrees whose differential would not fit in `cap`
/// scalars are dropped and recorded in `truncated`; everything reported is
/// exact.
///
/// Representatives are kernel-basis vectors taken greedily in canonical
/// order, keeping each one that is independent of the coboundaries and the
/// representatives already kept. That greedy set is exactly the set of
/// pivot columns of the matrix `[previous differential | kernel basis]`, so
/// one elimination per degree picks it.
pub fn cohomology(alg: &Algebra, n_max: usize, cap: usize) -> CohomologyReport {
    let tag = alg.tag();
    let mut degrees = Vec::new();
    let mut truncated = None;
    // The differential out of the previous degree, whose columns span the
    // coboundaries of the current one.
    let mut prev: Option<Matrix> = None;
    for n in 0..=n_max {
        let d_n = match delta_matrix(alg, n, cap) {
            Ok(m) => m,
            Err(ComplexError::CapExceeded { needed, cap }) => {
                truncated = Some(Truncation { degree: n, needed, cap });
                break;
            }
            Err(ComplexError::ShapeMismatch { .. }) => {
                unreachable!("freshly assembled differentials have consistent shapes")
            }
        };
        let dim_c = d_n.cols();
        let kernel = d_n.kernel_basis();
        let dim_z = kernel.len();
        let prev_cols = prev.as_ref().map_or(0, Matrix::cols);
        // Stack transposed: rows of `stacked` are the candidate columns, in
        // the order coboundary-generators first, then kernel vectors. The
        // greedy independent subset is then a row-basis computation.
        let mut triplets: Vec<(usize, usize, Scalar)> = Vec::new();
        if let Some(p) = &prev {
            for (r, c, v) in p.iter() {
                triplets.push((c, r, v.clone()));
            }
        }
        for (j, vec) in kernel.iter().enumerate() {
            for (r, v) in vec.iter().enumerate() {
                if !v.is_zero() {
                    triplets.push((prev_cols + j, r, v.clone()));
                }
            }
        }
        let stacked = Matrix::from_triplets(prev_cols + dim_z, dim_c, tag, triplets)
            .expect("stacked span matrix shape is consistent");
        let picked = stacked.row_basis_indices();
        let dim_b = picked.iter().filter(|&&r| r < prev_cols).count();
        let representatives: Vec<Cochain> = picked
            .iter()
            .filter(|&&r| r >= prev_cols)
            .map(|&r| {
                Cochain::from_vec(tag, alg.dim(), n, kernel[r - prev_cols].clone())
                    .expect("kernel vectors have the cochain table length")
            })
            .collect();
        let dim_h = dim_z - dim_b;
        debug_assert_eq!(representatives.len(), dim_h);
        degrees.push(DegreeSummary { n, dim_c, dim_z, dim_b, dim_h, representatives });
        prev = Some(d_n);
    }
    CohomologyReport { degrees, truncated }
}

fn first_nonzero_witness(alg: &Algebra, df: &Cochain) -> (Vec<usize>, usize) {
    let idx = df
        .values()
        .iter()
        .position(|v| !v.is_zero())
        .expect("witness extraction is only called on nonzero differentials");
    let d = alg.dim();
    (tuple_unrank(d, tri_count(df.degree()), idx / d), idx % d)
}

fn ensure_cocycle(
    alg: &Algebra,
    f: &Cochain,
    source: &'static str,
    cap: usize,
) -> Result<(), CohomologyError> {
    let df = delta(alg, f, cap)?;
    if df.is_zero() {
        return Ok(());
    }
    let (tuple, coord) = first_nonzero_witness(alg, &df);
    Err(CohomologyError::NotCocycle { source, degree: f.degree(), tuple, coord })
}

fn coords_against_representatives(
    alg: &Algebra,
    f: &Cochain,
    summary: &DegreeSummary,
    cap: usize,
) -> Result<Vec<Scalar>, CohomologyError> {
    let reps = &summary.representatives;
    if reps.is_empty() {
        return Ok(Vec::new());
    }
    let tag = alg.tag();
    let mut triplets: Vec<(usize, usize, Scalar)> = Vec::new();
    for (j, rep) in reps.iter().enumerate() {
        for (r, v) in rep.values().iter().enumerate() {
            if !v.is_zero() {
                triplets.push((r, j, v.clone()));
            }
        }
    }
    let mut cols = reps.len();
    if summary.n >= 1 {
        let prev = delta_matrix(alg, summary.n - 1, cap)?;
        for (r, c, v) in prev.iter() {
            triplets.push((r, cols + c, v.clone()));
        }
        cols += prev.cols();
    }
    let m = Matrix::from_triplets(f.values().len(), cols, tag, triplets)?;
    let solution = m
        .solve(f.values())?
        .expect("a cocycle decomposes into representatives plus a coboundary");
    Ok(solution[..reps.len()].to_vec())
}

/// Coordinates of the class of `f` in the representative basis of its
/// degree. `f` must be a cocycle of a degree the report covers; the
/// coordinates are the unique scalars expressing `f` as that combination of
/// representatives plus a coboundary.
pub fn class_coordinates(
    alg: &Algebra,
    f: &Cochain,
    report: &CohomologyReport,
    cap: usize,
) -> Result<Vec<Scalar>, CohomologyError> {
    let summary = report
        .degree(f.degree())
        .ok_or(CohomologyError::DegreeNotCovered { degree: f.degree() })?;
    ensure_cocycle(alg, f, "input cochain", cap)?;
    coords_against_representatives(alg, f, summary, cap)
}

/// Cup product on classes: multiplies two cocycles, checks the product is
/// again a cocycle, and returns its class coordinates.
pub fn cup_on_h(
    alg: &Algebra,
    f: &Cochain,
    g: &Cochain,
    report: &CohomologyReport,
    cap: usize,
) -> Result<Vec<Scalar>, CohomologyError> {
    let product = cup(alg, f, g, cap)?;
    let summary = report
        .degree(product.degree())
        .ok_or(CohomologyError::DegreeNotCovered { degree: product.degree() })?;
    ensure_cocycle(alg, &product, "cup product", cap)?;
    coords_against_representatives(alg, &product, summary, cap)
}

/// Bracket on classes: same contract as [`cup_on_h`].
pub fn bracket_on_h(
    alg: &Algebra,
    f: &Cochain,
    g: &Cochain,
    report: &CohomologyReport,
    cap: usize,
) -> Result<Vec<Scalar>, CohomologyError> {
    let product = bracket(alg, f, g, cap)?;
    let summary = report
        .degree(product.degree())
        .ok_or(CohomologyError::DegreeNotCovered { degree: product.degree() })?;
    ensure_cocycle(alg, &product, "bracket", cap)?;
    coords_against_representatives(alg, &product, summary, cap)
}

/// Decides coboundary membership at one fixed degree. The differential into
/// that degree is eliminated once; afterwards each query costs one small
/// solve on a row basis plus one sparse multiply to confirm.
struct CoboundaryTester {
    full: Matrix,
    sub: Matrix,
    rows: Vec<usize>,
}

impl CoboundaryTester {
    fn build(alg: &Algebra, degree: usize, cap: usize) -> Result<CoboundaryTester, ComplexError> {
        let full = delta_matrix(alg, degree - 1, cap)?;
        let rows = full.row_basis_indices();
        let sub = full.select_rows(&rows);
        Ok(CoboundaryTester { full, sub, rows })
    }

    /// Whether `w` lies in the column span. The restricted solve is
    /// conclusive both ways: restricting to a row basis preserves every
    /// linear relation among the rows, so a candidate solution either
    /// reproduces `w` exactly or no solution exists at all.
    fn contains(&self, w: &[Scalar]) -> bool {
        if w.iter().all(Scalar::is_zero) {
            return true;
        }
        let restricted: Vec<Scalar> = self.rows.iter().map(|&r| w[r].clone()).collect();
        match self.sub.solve(&restricted) {
            Ok(Some(x)) => match self.full.mul_vec(&x) {
                Ok(image) => image == w,
                Err(_) => false,
            },
            _ => false,
        }
    }
}

/// A random cocycle of the given degree: a random combination of the
/// degree's representatives plus the differential of a random cochain one
/// degree down.
pub fn random_cocycle(
    alg: &Algebra,
    summary: &DegreeSummary,
    cap: usize,
    rng: &mut dyn RngCore,
) -> Result<Cochain, ComplexError> {
    let n = summary.n;
    let mut out = Cochain::zero(alg.tag(), alg.dim(), n, cap)?;
    for rep in &summary.representatives {
        out = out.add(&rep.scale(&Scalar::random(alg.tag(), rng)));
    }
    if n >= 1 {
        let low = Cochain::random(alg.tag(), alg.dim(), n - 1, cap, rng)?;
        out = out.add(&delta(alg, &low, cap)?);
    }
    Ok(out)
}

/// Streaming equality check for `(x . y) . z = x . (y . z)` that never
/// materializes the two product tables: each entry of both sides is a
/// single product of factor values and rectangle entries, evaluated in
/// place. `budget` bounds the implied table size in scalars, like `cap`
/// but looser since nothing is stored.
fn cup_assoc_streamed(
    alg: &Algebra,
    x: &Cochain,
    y: &Cochain,
    z: &Cochain,
    budget: usize,
) -> Result<Option<(Vec<usize>, usize)>, ComplexError> {
    let d = alg.dim();
    let (n, m, p) = (x.degree(), y.degree(), z.degree());
    let big = n + m + p;
    let entries = table_len(d, big, budget)?;
    let slots = tri_count(big);
    let inner_left = cup_plan(n, m);
    let outer_left = cup_plan(n + m, p);
    let inner_right = cup_plan(m, p);
    let outer_right = cup_plan(n, m + p);
    for rank in 0..entries / d {
        let tuple = tuple_unrank(d, slots, rank);
        let t12 = outer_left.x_tuple(&tuple);
        let left_inner = inner_left.combine(
            alg,
            x.value(&inner_left.x_tuple(&t12)),
            y.value(&inner_left.y_tuple(&t12)),
            &t12,
        );
        let left = outer_left.combine(alg, &left_inner, z.value(&outer_left.y_tuple(&tuple)), &tuple);
        let t23 = outer_right.y_tuple(&tuple);
        let right_inner = inner_right.combine(
            alg,
            y.value(&inner_right.x_tuple(&t23)),
            z.value(&inner_right.y_tuple(&t23)),
            &t23,
        );
        let right =
            outer_right.combine(alg, x.value(&outer_right.x_tuple(&tuple)), &right_inner, &tuple);
        if left != right {
            let coord = left
                .iter()
                .zip(&right)
                .position(|(a, b)| a != b)
                .expect("unequal vectors differ somewhere");
            return Ok(Some((tuple, coord)));
        }
    }
    Ok(None)
}

fn jacobi_defect(
    alg: &Algebra,
    x: &Cochain,
    y: &Cochain,
    z: &Cochain,
    cap: usize,
) -> Result<Cochain, OperadError> {
    let signed = |w: &Cochain, parity: usize| if parity % 2 == 1 { w.neg() } else { w.clone() };
    let b1 = bracket(alg, &bracket(alg, x, y, cap)?, z, cap)?;
    let b2 = bracket(alg, &bracket(alg, y, z, cap)?, x, cap)?;
    let b3 = bracket(alg, &bracket(alg, z, x, cap)?, y, cap)?;
    let (dx, dy, dz) = (x.degree() - 1, y.degree() - 1, z.degree() - 1);
    let acc = signed(&b1, dx * dz).add(&signed(&b2, dy * dx)).add(&signed(&b3, dz * dy));
    Ok(acc)
}

fn witness(prefix: &str, seed: u64, trial: usize, detail: String) -> String {
    format!("{prefix}: seed {seed}, trial {trial}: {detail}")
}

/// Randomized cohomology-level suite for the homotopy-algebra structure, on
/// random cocycles of degrees `2 ..= max_degree` (degree-1 cocycles are all
/// zero, so they are left out as vacuous):
///
/// - cup associativity, exact, compared entry by entry in streaming form;
/// - graded Jacobi for the bracket, exact;
/// - graded commutativity of cup, modulo coboundaries;
/// - graded Leibniz of the bracket over cup, modulo coboundaries.
///
/// Membership modulo coboundaries is decided by exact solves against the
/// differential one degree down. Cases whose tables would exceed `cap`
/// (or, for the streamed check, `64 * cap`) are skipped and counted.
pub fn verify_g_algebra(
    alg: &Algebra,
    report: &CohomologyReport,
    max_degree: usize,
    trials: usize,
    cap: usize,
    seed: u64,
) -> Result<SuiteReport, CohomologyError> {
    let low = 2usize;
    let high = max_degree.max(low);
    for n in low..=high {
        if report.degree(n).is_none() {
            return Err(CohomologyError::DegreeNotCovered { degree: n });
        }
    }
    let degs: Vec<usize> = (low..=high).collect();
    let mut pairs = Vec::new();
    for &a in &degs {
        for &b in &degs {
            pairs.push((a, b));
        }
    }
    let mut triples = Vec::new();
    for &a in &degs {
        for &b in &degs {
            for &c in &degs {
                triples.push((a, b, c));
            }
        }
    }
    let stream_budget = cap.saturating_mul(64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut testers: Vec<Option<Option<CoboundaryTester>>> = Vec::new();
    let tester_for = |degree: usize, testers: &mut Vec<Option<Option<CoboundaryTester>>>| {
        if testers.len() <= degree {
            testers.resize_with(degree + 1, || None);
        }
        if testers[degree].is_none() {
            testers[degree] = Some(match CoboundaryTester::build(alg, degree, cap) {
                Ok(t) => Some(t),
                Err(ComplexError::CapExceeded { .. }) => None,
                Err(e) => unreachable!("differential assembly failed: {e}"),
            });
        }
    };

    let mut assoc = CheckLine {
        name: "cup-associativity-exact".to_string(),
        cases_run: 0,
        cases_skipped: 0,
        failures: Vec::new(),
    };
    let mut jacobi = CheckLine {
        name: "graded-jacobi-exact".to_string(),
        cases_run: 0,
        cases_skipped: 0,
        failures: Vec::new(),
    };
    let mut gradcom = CheckLine {
        name: "graded-commutativity-mod-coboundaries".to_string(),
        cases_run: 0,
        cases_skipped: 0,
        failures: Vec::new(),
    };
    let mut leibniz = CheckLine {
        name: "graded-leibniz-mod-coboundaries".to_string(),
        cases_run: 0,
        cases_skipped: 0,
        failures: Vec::new(),
    };

    for trial in 0..trials {
        // Cup associativity, streamed.
        {
            let (a, b, c) = triples[trial % triples.len()];
            let x = random_cocycle(alg, report.degree(a).expect("covered"), cap, &mut rng)?;
            let y = random_cocycle(alg, report.degree(b).expect("covered"), cap, &mut rng)?;
            let z = random_cocycle(alg, report.degree(c).expect("covered"), cap, &mut rng)?;
            match cup_assoc_streamed(alg, &x, &y, &z, stream_budget) {
                Ok(None) => assoc.cases_run += 1,
                Ok(Some((tuple, coord))) => {
                    assoc.cases_run += 1;
                    assoc.failures.push(witness(
                        "cup associativity",
                        seed,
                        trial,
                        format!(
                            "degrees ({a}, {b}, {c}) differ on basis tensor {tuple:?}, \
                             coordinate {coord}"
                        ),
                    ));
                }
                Err(ComplexError::CapExceeded { .. }) => assoc.cases_skipped += 1,
                Err(e) => {
                    assoc.cases_run += 1;
                    assoc.failures.push(witness("cup associativity", seed, trial, e.to_string()));
                }
            }
        }

        // Graded Jacobi, exact.
        {
            let (a, b, c) = triples[trial % triples.len()];
            let x = random_cocycle(alg, report.degree(a).expect("covered"), cap, &mut rng)?;
            let y = random_cocycle(alg, report.degree(b).expect("covered"), cap, &mut rng)?;
            let z = random_cocycle(alg, report.degree(c).expect("covered"), cap, &mut rng)?;
            match jacobi_defect(alg, &x, &y, &z, cap) {
                Ok(defect) => {
                    jacobi.cases_run += 1;
                    if !defect.is_zero() {
                        let (tuple, coord) = first_nonzero_witness(alg, &defect);
                        jacobi.failures.push(witness(
                            "graded Jacobi",
                            seed,
                            trial,
                            format!(
                                "degrees ({a}, {b}, {c}) leave a nonzero defect on basis \
                                 tensor {tuple:?}, coordinate {coord}"
                            ),
                        ));
                    }
                }
                Err(OperadError::Complex(ComplexError::CapExceeded { .. })) => {
                    jacobi.cases_skipped += 1
                }
                Err(e) => {
                    jacobi.cases_run += 1;
                    jacobi.failures.push(witness("graded Jacobi", seed, trial, e.to_string()));
                }
            }
        }

        // Graded commutativity modulo coboundaries.
        {
            let (a, b) = pairs[trial % pairs.len()];
            let x = random_cocycle(alg, report.degree(a).expect("covered"), cap, &mut rng)?;
            let y = random_cocycle(alg, report.degree(b).expect("covered"), cap, &mut rng)?;
            match gradcom_defect(alg, &x, &y, cap) {
                Ok(defect) => {
                    let result_degree = a + b;
                    tester_for(result_degree, &mut testers);
                    match testers[result_degree].as_ref().expect("just built") {
                        Some(tester) => {
                            gradcom.cases_run += 1;
                            if !tester.contains(defect.values()) {
                                gradcom.failures.push(witness(
                                    "graded commutativity",
                                    seed,
                                    trial,
                                    format!(
                                        "degrees ({a}, {b}): defect is not a coboundary in \
                                         degree {result_degree}"
                                    ),
                                ));
                            }
                        }
                        None => gradcom.cases_skipped += 1,
                    }
                }
                Err(OperadError::Complex(ComplexError::CapExceeded { .. })) => {
                    gradcom.cases_skipped += 1
                }
                Err(e) => {
                    gradcom.cases_run += 1;
                    gradcom.failures.push(witness(
                        "graded commutativity",
                        seed,
                        trial,
                        e.to_string(),
                    ));
                }
            }
        }

        // Graded Leibniz modulo coboundaries.
        {
            let (a, b, c) = triples[trial % triples.len()];
            let x = random_cocycle(alg, report.degree(a).expect("covered"), cap, &mut rng)?;
            let y = random_cocycle(alg, report.degree(b).expect("covered"), cap, &mut rng)?;
            let z = random_cocycle(alg, report.degree(c).expect("covered"), cap, &mut rng)?;
            match leibniz_defect(alg, &x, &y, &z, cap) {
                Ok(defect) => {
                    let result_degree = a + b + c - 1;
                    tester_for(result_degree, &mut testers);
                    match testers[result_degree].as_ref().expect("just built") {
                        Some(tester) => {
                            leibniz.cases_run += 1;
                            if !tester.contains(defect.values()) {
                                leibniz.failures.push(witness(
                                    "graded Leibniz",
                                    seed,
                                    trial,
                                    format!(
                                        "degrees ({a}, {b}, {c}): defect is not a coboundary \
                                         in degree {result_degree}"
                                    ),
                                ));
                            }
                        }
                        None => leibniz.cases_skipped += 1,
                    }
                }
                Err(OperadError::Complex(ComplexError::CapExceeded { .. })) => {
                    leibniz.cases_skipped += 1
                }
                Err(e) => {
                    leibniz.cases_run += 1;
                    leibniz.failures.push(witness("graded Leibniz", seed, trial, e.to_string()));
                }
            }
        }
    }

    Ok(SuiteReport { suite: "g-algebra".to_string(), checks: vec![assoc, jacobi, gradcom, leibniz] })
}
