//! Acceptance gate: one test per release criterion, each printing a single
//! `[criterion NN] PASS`/`FAIL` line (run with `--nocapture` to see them).
//!
//! The criteria pin down the exact-arithmetic contract of the library: the
//! cochain complex squares to zero, the closed-form differential agrees with
//! the simplicial model it was derived from, the operad and G-algebra laws
//! hold on seeded random instances, the known cohomology values come out,
//! deformation lifting works against an independent oracle, and the CLI is
//! bit-for-bit deterministic.

use std::process::Command;
use std::time::Instant;

use hhs2_core::algebra::Algebra;
use hhs2_core::cohomology::{cohomology, random_cocycle, verify_g_algebra};
use hhs2_core::deformation::{
    circ2, euler_derivation, geometric_family, lift_step, obstruction, verify_truncated,
    DeformationState, LiftOutcome,
};
use hhs2_core::field_linalg::FieldTag;
use hhs2_core::operad::{
    circ, d_operad, multiplication_element, verify_gv_identities, verify_operad_axioms,
    SuiteReport,
};
use hhs2_core::s2_complex::{delta, delta_matrix, table_len, Cochain};
use hhs2_core::simplicial::{classical_hochschild_matrix, s1_model, s2_model};
use hhs2_cli::matrices_equal;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CAP: usize = 1 << 20;
const SEED: u64 = 2026;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

fn criterion(n: u32, what: &str, body: impl FnOnce() -> Result<String, String>) {
    match body() {
        Ok(detail) => println!("[criterion {n:02}] PASS — {what} ({detail})"),
        Err(why) => {
            println!("[criterion {n:02}] FAIL — {what}: {why}");
            panic!("criterion {n:02} failed: {why}");
        }
    }
}

fn fields() -> Vec<(&'static str, FieldTag)> {
    vec![("Q", FieldTag::rational()), ("F_101", FieldTag::fp(101).expect("101 is prime"))]
}

/// Every algebra constructible by name from the CLI.
fn shipped(tag: FieldTag) -> Vec<(&'static str, Algebra)> {
    vec![
        ("k", Algebra::ground(tag)),
        ("dual", Algebra::dual_numbers(tag)),
        ("trunc:3", Algebra::truncated_poly(tag, 3)),
        ("trunc:4", Algebra::truncated_poly(tag, 4)),
        ("trunc2:2,2", Algebra::truncated_poly2(tag, 2, 2)),
    ]
}

fn suite_failures(suite: &SuiteReport) -> String {
    suite
        .checks
        .iter()
        .flat_map(|c| c.failures.iter().map(move |f| format!("{}: {f}", c.name)))
        .collect::<Vec<_>>()
        .join("; ")
}

#[test]
fn criterion_01_differential_squares_to_zero() {
    criterion(1, "composite differentials vanish exactly for k, dual, trunc:3", || {
        let start = Instant::now();
        let mut composites = 0usize;
        for (field, tag) in fields() {
            for (name, alg, n_max) in [
                ("k", Algebra::ground(tag), 4usize),
                ("dual", Algebra::dual_numbers(tag), 4),
                ("trunc:3", Algebra::truncated_poly(tag, 3), 3),
            ] {
                for n in 0..=n_max {
                    let outgoing =
                        delta_matrix(&alg, n + 1, CAP).map_err(|e| e.to_string())?;
                    let incoming = delta_matrix(&alg, n, CAP).map_err(|e| e.to_string())?;
                    let square = outgoing.matmul(&incoming).map_err(|e| e.to_string())?;
                    ensure!(
                        square.is_zero(),
                        "delta.delta != 0 for {name} over {field} at n={n}"
                    );
                    composites += 1;
                }
            }
        }
        let elapsed = start.elapsed();
        ensure!(elapsed.as_secs_f64() < 60.0, "took {elapsed:.2?}, over the 60 s budget");
        Ok(format!("{composites} composites over Q and F_101 in {elapsed:.2?}"))
    });
}

#[test]
fn criterion_02_closed_form_matches_sphere_model() {
    criterion(2, "closed-form differential equals the sphere-model matrix, dim 2, n <= 4", || {
        let model = s2_model(5);
        let mut compared = 0usize;
        for (field, tag) in fields() {
            let alg = Algebra::dual_numbers(tag);
            for n in 0..=4 {
                let closed = delta_matrix(&alg, n, CAP).map_err(|e| e.to_string())?;
                let modeled =
                    model.boundary_matrix(&alg, n, CAP).map_err(|e| e.to_string())?;
                ensure!(
                    matrices_equal(&closed, &modeled),
                    "matrices differ over {field} at n={n}"
                );
                compared += 1;
            }
        }
        Ok(format!("{compared} matrices identical over Q and F_101"))
    });
}

#[test]
fn criterion_03_circle_model_recovers_classical_complex() {
    criterion(3, "circle-model boundaries equal the classical differential, n <= 4, dim <= 3", || {
        let model = s1_model(5);
        let mut compared = 0usize;
        for (field, tag) in fields() {
            for (name, alg) in [
                ("k", Algebra::ground(tag)),
                ("dual", Algebra::dual_numbers(tag)),
                ("trunc:3", Algebra::truncated_poly(tag, 3)),
            ] {
                for n in 0..=4 {
                    let modeled =
                        model.boundary_matrix(&alg, n, CAP).map_err(|e| e.to_string())?;
                    let classical = classical_hochschild_matrix(&alg, n);
                    ensure!(
                        matrices_equal(&modeled, &classical),
                        "matrices differ for {name} over {field} at n={n}"
                    );
                    compared += 1;
                }
            }
        }
        Ok(format!("{compared} matrices identical over Q and F_101"))
    });
}

#[test]
fn criterion_04_operad_axioms_on_random_instances() {
    criterion(4, "operad axioms hold on >= 100 seeded instances per law, arities <= 3", || {
        let alg = Algebra::dual_numbers(FieldTag::fp(101).expect("101 is prime"));
        let suite = verify_operad_axioms(&alg, 100, 3, 1 << 23, SEED);
        ensure!(suite.passed(), "failures: {}", suite_failures(&suite));
        for check in &suite.checks {
            ensure!(
                check.cases_run >= 100,
                "{}: only {} cases ran",
                check.name,
                check.cases_run
            );
            ensure!(
                check.cases_skipped == 0,
                "{}: {} cases skipped by the size cap",
                check.name,
                check.cases_skipped
            );
        }
        Ok(format!(
            "{} laws x 100 instances, dual over F_101, zero failures",
            suite.checks.len()
        ))
    });
}

#[test]
fn criterion_05_multiplication_squares_to_zero_and_sign_bridge() {
    criterion(5, "m o m = 0 on every shipped algebra; (-1)^(n-1) d(f) = delta(f) on basis cochains", || {
        let mut squares = 0usize;
        for (field, tag) in fields() {
            for (name, alg) in shipped(tag) {
                let m = multiplication_element(&alg);
                let mm = circ(&alg, &m, &m, CAP).map_err(|e| e.to_string())?;
                ensure!(mm.is_zero(), "m o m != 0 for {name} over {field}");
                squares += 1;
            }
        }
        let mut bridged = 0usize;
        for (field, tag) in fields() {
            let alg = Algebra::dual_numbers(tag);
            for n in 1..=4usize {
                let count = table_len(2, n, CAP).map_err(|e| e.to_string())?;
                for idx in 0..count {
                    let f = Cochain::basis(alg.tag(), 2, n, CAP, idx)
                        .map_err(|e| e.to_string())?;
                    let d = d_operad(&alg, &f, CAP).map_err(|e| e.to_string())?;
                    let signed = if (n - 1) % 2 == 0 { d } else { d.neg() };
                    let direct = delta(&alg, &f, CAP).map_err(|e| e.to_string())?;
                    ensure!(
                        signed == direct,
                        "sign bridge fails over {field} at degree {n}, basis cochain {idx}"
                    );
                    bridged += 1;
                }
            }
        }
        Ok(format!("{squares} squares vanish; bridge holds on {bridged} basis cochains"))
    });
}

#[test]
fn criterion_06_g_algebra_laws_on_cocycle_representatives() {
    criterion(6, "cup assoc + Jacobi exact, commutativity + Leibniz mod coboundaries, degrees <= 3", || {
        let tag = FieldTag::fp(101).expect("101 is prime");
        let mut total_trials = 0usize;
        let mut details = Vec::new();
        for (name, alg, trials, min_per_check) in [
            ("dual", Algebra::dual_numbers(tag), 60usize, 25usize),
            ("trunc:3", Algebra::truncated_poly(tag, 3), 24, 3),
        ] {
            let report = cohomology(&alg, 3, CAP);
            ensure!(!report.is_partial(), "{name}: cohomology sweep hit the size cap");
            let suite = verify_g_algebra(&alg, &report, 3, trials, CAP, SEED)
                .map_err(|e| format!("{name}: {e}"))?;
            ensure!(suite.passed(), "{name}: failures: {}", suite_failures(&suite));
            for check in &suite.checks {
                ensure!(
                    check.cases_run >= min_per_check,
                    "{name}/{}: only {} cases ran",
                    check.name,
                    check.cases_run
                );
            }
            ensure!(
                suite.cases_run() >= 25,
                "{name}: only {} cases ran in total",
                suite.cases_run()
            );
            total_trials += trials * suite.checks.len();
            details.push(format!("{name}: {} run / {} cap-skipped", suite.cases_run(), suite.cases_skipped()));
        }
        Ok(format!("{} seeded trials over F_101; {}", total_trials, details.join(", ")))
    });
}

#[test]
fn criterion_07_homotopy_identities_exact_at_cochain_level() {
    criterion(7, "bracket/cup homotopy identities hold exactly on seeded arity-2 inputs", || {
        let alg = Algebra::dual_numbers(FieldTag::fp(101).expect("101 is prime"));
        let suite = verify_gv_identities(&alg, 100, 2, CAP, SEED);
        ensure!(suite.passed(), "failures: {}", suite_failures(&suite));
        for check in &suite.checks {
            ensure!(
                check.cases_run >= 100,
                "{}: only {} cases ran",
                check.name,
                check.cases_run
            );
            ensure!(check.cases_skipped == 0, "{}: cases were skipped", check.name);
        }
        // Degrees round-robin over {1,2}^k, so a quarter of each law's
        // instances are pure arity-2 tuples: 25 per law at 100 trials.
        Ok("100 trials per identity, >= 25 with all inputs of degree 2".to_string())
    });
}

#[test]
fn criterion_08_known_cohomology_values() {
    criterion(8, "H^0 has the algebra's dimension, H^1 = 0, and the ground field is acyclic", || {
        let mut algebras = 0usize;
        for (field, tag) in fields() {
            for (name, alg) in shipped(tag) {
                let report = cohomology(&alg, 1, CAP);
                ensure!(!report.is_partial(), "{name} over {field}: sweep hit the size cap");
                let h0 = report.degree(0).ok_or("degree 0 missing")?.dim_h;
                let h1 = report.degree(1).ok_or("degree 1 missing")?.dim_h;
                ensure!(
                    h0 == alg.dim(),
                    "dim H^0 = {h0} != {} for {name} over {field}",
                    alg.dim()
                );
                ensure!(h1 == 0, "dim H^1 = {h1} != 0 for {name} over {field}");
                algebras += 1;
            }
            let ground = Algebra::ground(tag);
            let report = cohomology(&ground, 5, CAP);
            for n in 1..=5 {
                let dim_h = report.degree(n).ok_or("missing degree")?.dim_h;
                ensure!(dim_h == 0, "dim H^{n} = {dim_h} != 0 for k over {field}");
            }
        }
        Ok(format!("{algebras} algebras over Q and F_101; k acyclic through degree 5"))
    });
}

#[test]
fn criterion_09_euler_derivation_lifts_to_order_five() {
    criterion(9, "the weight derivation on k[x]/(x^4) over F_101 lifts to order 5 unobstructed", || {
        let tag = FieldTag::fp(101).expect("101 is prime");
        let alg = Algebra::truncated_poly(tag, 4);
        let u1 = euler_derivation(&alg, CAP).map_err(|e| e.to_string())?;
        let du1 = delta(&alg, &u1, CAP).map_err(|e| e.to_string())?;
        ensure!(du1.is_zero(), "the weight derivation is not a 2-cocycle");

        let report = cohomology(&alg, 3, CAP);
        ensure!(report.degree(3).is_some(), "cohomology sweep does not reach degree 3");
        let mut state =
            DeformationState::new(alg.clone(), vec![u1]).map_err(|e| e.to_string())?;
        while state.order() < 5 {
            match lift_step(&state, &report, CAP).map_err(|e| e.to_string())? {
                LiftOutcome::Lifted { state: next, obstruction } => {
                    ensure!(
                        obstruction.class_is_zero(),
                        "obstruction class at order {} is not zero",
                        obstruction.order
                    );
                    state = next;
                }
                LiftOutcome::Obstructed { obstruction } => {
                    return Err(format!("lift blocked at order {}", obstruction.order));
                }
            }
        }
        let oracle = verify_truncated(&state, 5);
        ensure!(oracle == 5, "truncated-identity oracle only confirms order {oracle}");

        // The binomial-coefficient family satisfies the same recursion the
        // lift solves, degree by degree.
        let mut checked = 0usize;
        for n in 1..=3usize {
            let u_n = geometric_family(&alg, n).map_err(|e| e.to_string())?;
            let lhs = delta(&alg, &u_n, CAP).map_err(|e| e.to_string())?;
            let mut rhs =
                Cochain::zero(alg.tag(), alg.dim(), 3, CAP).map_err(|e| e.to_string())?;
            for i in 1..n {
                let a = geometric_family(&alg, i).map_err(|e| e.to_string())?;
                let b = geometric_family(&alg, n - i).map_err(|e| e.to_string())?;
                rhs = rhs.add(&circ2(&alg, &a, &b, CAP).map_err(|e| e.to_string())?);
            }
            ensure!(lhs == rhs, "family recursion fails at n={n}");
            checked += 1;
        }
        Ok(format!(
            "4 lift steps, all classes zero, oracle order 5; family recursion holds for n <= {checked}"
        ))
    });
}

#[test]
fn criterion_10_obstructions_are_cocycles() {
    criterion(10, "every obstruction encountered is a 3-cocycle, on the diagonal chain and random seeds", || {
        let tag = FieldTag::fp(101).expect("101 is prime");

        // Every verified state of the order-5 chain from the weight derivation.
        let alg = Algebra::truncated_poly(tag, 4);
        let report = cohomology(&alg, 3, CAP);
        let u1 = euler_derivation(&alg, CAP).map_err(|e| e.to_string())?;
        let mut state =
            DeformationState::new(alg.clone(), vec![u1]).map_err(|e| e.to_string())?;
        let mut diagonal_checked = 0usize;
        loop {
            let witness = obstruction(&state, &report, CAP).map_err(|e| e.to_string())?;
            ensure!(
                witness.is_cocycle,
                "delta_3(omega_{}) != 0 on the diagonal chain",
                witness.order
            );
            diagonal_checked += 1;
            if state.order() >= 5 {
                break;
            }
            match lift_step(&state, &report, CAP).map_err(|e| e.to_string())? {
                LiftOutcome::Lifted { state: next, .. } => state = next,
                LiftOutcome::Obstructed { obstruction } => {
                    return Err(format!("diagonal chain blocked at order {}", obstruction.order));
                }
            }
        }

        // Randomized first-order data: a fresh seeded cocycle per attempt,
        // lifted as far as three more orders, checking delta_3(omega) = 0 at
        // every step whether or not the lift goes through.
        let mut attempts = 0usize;
        let mut steps_checked = 0usize;
        for (name, alg) in
            [("dual", Algebra::dual_numbers(tag)), ("trunc:3", Algebra::truncated_poly(tag, 3))]
        {
            let report = cohomology(&alg, 3, CAP);
            let degree2 = report.degree(2).ok_or("degree 2 missing from the sweep")?;
            for seed in 0..5u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let u1 = random_cocycle(&alg, degree2, CAP, &mut rng)
                    .map_err(|e| e.to_string())?;
                let mut state = DeformationState::new(alg.clone(), vec![u1])
                    .map_err(|e| e.to_string())?;
                ensure!(
                    state.verified_order() >= 1,
                    "{name}, seed {seed}: seeded map fails the first-order identity"
                );
                attempts += 1;
                for _ in 0..3 {
                    match lift_step(&state, &report, CAP) {
                        Ok(LiftOutcome::Lifted { state: next, obstruction }) => {
                            ensure!(
                                obstruction.is_cocycle,
                                "{name}, seed {seed}: non-cocycle obstruction at order {}",
                                obstruction.order
                            );
                            steps_checked += 1;
                            state = next;
                        }
                        Ok(LiftOutcome::Obstructed { obstruction }) => {
                            ensure!(
                                obstruction.is_cocycle,
                                "{name}, seed {seed}: non-cocycle obstruction at order {}",
                                obstruction.order
                            );
                            steps_checked += 1;
                            break;
                        }
                        Err(e) => {
                            return Err(format!("{name}, seed {seed}: lift aborted: {e}"));
                        }
                    }
                }
            }
        }
        ensure!(attempts >= 10, "only {attempts} randomized attempts ran");
        Ok(format!(
            "{diagonal_checked} diagonal-chain states and {steps_checked} steps across {attempts} seeded attempts"
        ))
    });
}

#[test]
fn criterion_11_cli_reports_are_deterministic() {
    criterion(11, "repeating a CLI run with the same seed gives byte-identical output", || {
        let configs: &[&[&str]] = &[
            &["cohomology", "--algebra", "dual", "--field", "101", "--max-degree", "2", "--seed", "5"],
            &[
                "verify", "--suite", "galgebra", "--algebra", "dual", "--field", "101",
                "--max-degree", "2", "--trials", "6", "--seed", "9", "--format", "tsv",
            ],
            &["deform", "--algebra", "trunc:4", "--field", "101", "--u1", "euler", "--order", "4", "--seed", "3"],
        ];
        for args in configs {
            let mut outputs = Vec::new();
            for _ in 0..2 {
                let out = Command::new(env!("CARGO_BIN_EXE_hhs2"))
                    .args(*args)
                    .env_remove("HHS2_CAP")
                    .output()
                    .map_err(|e| e.to_string())?;
                ensure!(
                    out.status.code() == Some(0),
                    "exit {:?} for {:?}: {}",
                    out.status.code(),
                    args,
                    String::from_utf8_lossy(&out.stderr)
                );
                ensure!(!out.stdout.is_empty(), "empty report for {args:?}");
                outputs.push(out.stdout);
            }
            ensure!(outputs[0] == outputs[1], "reports differ between runs for {args:?}");
        }
        Ok(format!("{} commands, each run twice, byte-identical", configs.len()))
    });
}
