//! Library half of the `hhs2` binary: configuration parsing, the three
//! commands (cohomology reports, verification suites, deformation runs) and
//! the JSON / TSV renderers. Output is deterministic for a fixed
//! configuration and seed: no timestamps, no hash-map iteration, and every
//! report embeds the tool version, field, algebra hash, seed and cap.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use hhs2_core::algebra::Algebra;
use hhs2_core::cohomology::{cohomology, verify_g_algebra, CohomologyError};
use hhs2_core::deformation::{
    euler_derivation, lift_step, DeformationError, DeformationState, LiftOutcome,
};
use hhs2_core::field_linalg::{FieldTag, Matrix, Scalar};
use hhs2_core::operad::{verify_gv_identities, verify_operad_axioms, CheckLine, SuiteReport};
use hhs2_core::s2_complex::{delta, delta_matrix, tuple_unrank, Cochain, ComplexError};
use hhs2_core::simplicial::{classical_hochschild_matrix, s1_model, s2_model, SimplicialError};
use hhs2_core::DEFAULT_CAP;

pub const TOOL: &str = "hhs2";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable overriding the default size cap.
pub const CAP_ENV: &str = "HHS2_CAP";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    /// 1 input/validation error, 2 partial results (cap), 3 verification
    /// failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Cap(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Tsv,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub label: String,
    pub algebra: Algebra,
    pub max_degree: usize,
    pub trials: usize,
    pub seed: u64,
    pub format: OutputFormat,
    pub cap: usize,
}

impl RunConfig {
    /// Assembles and validates a full configuration from raw flag values.
    pub fn build(
        field: &str,
        algebra: &str,
        max_degree: usize,
        trials: usize,
        seed: u64,
        format: &str,
        cap_flag: Option<usize>,
    ) -> Result<RunConfig, CliError> {
        if max_degree == 0 {
            return Err(CliError::Input("--max-degree must be at least 1".to_string()));
        }
        let tag = parse_field(field)?;
        let (label, algebra) = parse_algebra(algebra, tag)?;
        let format = parse_format(format)?;
        let cap = resolve_cap(cap_flag)?;
        Ok(RunConfig { label, algebra, max_degree, trials, seed, format, cap })
    }
}

pub fn parse_field(s: &str) -> Result<FieldTag, CliError> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("q") || s.eq_ignore_ascii_case("rational") {
        return Ok(FieldTag::rational());
    }
    let digits = s.strip_prefix("F_").unwrap_or(s);
    let p: u64 = digits
        .parse()
        .map_err(|_| CliError::Input(format!("--field must be Q or a prime (got `{s}`)")))?;
    FieldTag::fp(p).map_err(|e| CliError::Input(format!("--field {p}: {e}")))
}

pub fn parse_format(s: &str) -> Result<OutputFormat, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "json" => Ok(OutputFormat::Json),
        "tsv" => Ok(OutputFormat::Tsv),
        other => Err(CliError::Input(format!("--format must be json or tsv (got `{other}`)"))),
    }
}

/// `--cap` flag beats the `HHS2_CAP` environment variable beats the
/// built-in default.
pub fn resolve_cap(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(c) = flag {
        return Ok(c);
    }
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("{CAP_ENV} must be an integer (got `{v}`)"))),
        Err(_) => Ok(DEFAULT_CAP),
    }
}

#[derive(Deserialize)]
struct AlgebraFile {
    dim: usize,
    unit: Vec<Coord>,
    table: Vec<Vec<Vec<Coord>>>,
    #[serde(default)]
    labels: Vec<String>,
    #[serde(default)]
    grading: Option<Vec<usize>>,
}

/// A coordinate in an input file: an integer, or a string like `"2/3"`
/// (reduced into the field, so `"1/2"` is legal over F_p as well).
#[derive(Deserialize)]
#[serde(untagged)]
enum Coord {
    Int(i64),
    Text(String),
}

fn coord_to_scalar(c: &Coord, tag: FieldTag) -> Result<Scalar, CliError> {
    let (num, den) = match c {
        Coord::Int(n) => (*n, 1),
        Coord::Text(s) => {
            let parse = |t: &str| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| CliError::Input(format!("bad coordinate `{s}`")))
            };
            match s.split_once('/') {
                Some((a, b)) => (parse(a)?, parse(b)?),
                None => (parse(s)?, 1),
            }
        }
    };
    let fraction = match tag {
        FieldTag::Rat => Scalar::rational(num, den),
        FieldTag::Fp(p) => Scalar::fp_fraction(p, num, den),
    };
    fraction.map_err(|e| CliError::Input(format!("bad coordinate {num}/{den}: {e}")))
}

fn load_algebra_file(path: &str, tag: FieldTag) -> Result<Algebra, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read algebra file `{path}`: {e}")))?;
    let spec: AlgebraFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("algebra file `{path}` is not valid JSON: {e}")))?;
    let d = spec.dim;
    if spec.table.len() != d || spec.table.iter().any(|row| row.len() != d) {
        return Err(CliError::Input(format!(
            "algebra file `{path}`: table must be {d} x {d} coordinate vectors"
        )));
    }
    let unit = spec
        .unit
        .iter()
        .map(|c| coord_to_scalar(c, tag))
        .collect::<Result<Vec<Scalar>, CliError>>()?;
    let mut table = Vec::with_capacity(d * d);
    for row in &spec.table {
        for entry in row {
            table.push(
                entry
                    .iter()
                    .map(|c| coord_to_scalar(c, tag))
                    .collect::<Result<Vec<Scalar>, CliError>>()?,
            );
        }
    }
    let alg = Algebra::new(tag, d, unit, table, spec.labels)
        .map_err(|e| CliError::Input(format!("algebra file `{path}`: {e}")))?;
    match spec.grading {
        Some(weights) => alg
            .with_grading(weights)
            .map_err(|e| CliError::Input(format!("algebra file `{path}`: {e}"))),
        None => Ok(alg),
    }
}

/// Named sources `k`, `dual`, `trunc:m`, `trunc2:m,n`; anything else is a
/// path to a JSON algebra spec.
pub fn parse_algebra(source: &str, tag: FieldTag) -> Result<(String, Algebra), CliError> {
    let parse_size = |t: &str| {
        t.trim().parse::<usize>().ok().filter(|&m| m >= 1).ok_or_else(|| {
            CliError::Input(format!("bad truncation order `{t}` in algebra `{source}`"))
        })
    };
    let algebra = match source {
        "k" => Algebra::ground(tag),
        "dual" => Algebra::dual_numbers(tag),
        _ => {
            if let Some(m) = source.strip_prefix("trunc:") {
                Algebra::truncated_poly(tag, parse_size(m)?)
            } else if let Some(rest) = source.strip_prefix("trunc2:") {
                let (m, n) = rest.split_once(',').ok_or_else(|| {
                    CliError::Input(format!("algebra `{source}` needs the form trunc2:m,n"))
                })?;
                Algebra::truncated_poly2(tag, parse_size(m)?, parse_size(n)?)
            } else {
                load_algebra_file(source, tag)?
            }
        }
    };
    Ok((source.to_string(), algebra))
}

pub fn field_name(tag: FieldTag) -> String {
    match tag {
        FieldTag::Fp(p) => format!("F_{p}"),
        FieldTag::Rat => "Q".to_string(),
    }
}

/// A short content hash of the algebra: field, dimension, unit, structure
/// constants and grading, independent of labels.
pub fn algebra_hash(alg: &Algebra) -> String {
    let mut desc = String::new();
    let _ = write!(desc, "field={};dim={};unit=", field_name(alg.tag()), alg.dim());
    for v in alg.unit_el() {
        let _ = write!(desc, "{v},");
    }
    desc.push_str(";table=");
    for i in 0..alg.dim() {
        for j in 0..alg.dim() {
            for v in alg.basis_mul(i, j) {
                let _ = write!(desc, "{v},");
            }
            desc.push('|');
        }
    }
    if let Some(g) = alg.grading() {
        let _ = write!(desc, ";grading={g:?}");
    }
    let digest = Sha256::digest(desc.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
pub struct DegreeRow {
    pub n: usize,
    #[serde(rename = "dimC")]
    pub dim_c: usize,
    #[serde(rename = "dimZ")]
    pub dim_z: usize,
    #[serde(rename = "dimB")]
    pub dim_b: usize,
    #[serde(rename = "dimH")]
    pub dim_h: usize,
}

#[derive(Serialize)]
pub struct CheckRow {
    pub name: String,
    pub cases_run: usize,
    pub cases_skipped: usize,
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Serialize)]
pub struct TruncationNote {
    pub degree: usize,
    pub needed: usize,
    pub cap: usize,
}

#[derive(Serialize)]
pub struct StepRow {
    pub order_reached: usize,
    pub obstruction_class: Vec<String>,
    pub lift_found: bool,
    pub oracle_order: usize,
}

#[derive(Serialize)]
pub struct DeformationOut {
    pub u1: String,
    pub order_target: usize,
    pub order_reached: usize,
    pub lifted_fully: bool,
    pub steps: Vec<StepRow>,
}

#[derive(Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub algebra: String,
    pub field: String,
    pub algebra_hash: String,
    pub seed: u64,
    pub cap: usize,
    pub degrees: Vec<DegreeRow>,
    pub checks: Vec<CheckRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncated: Option<TruncationNote>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deformation: Option<DeformationOut>,
}

fn base_report(cfg: &RunConfig, command: &str) -> Report {
    Report {
        tool: TOOL.to_string(),
        version: VERSION.to_string(),
        command: command.to_string(),
        algebra: cfg.label.clone(),
        field: field_name(cfg.algebra.tag()),
        algebra_hash: algebra_hash(&cfg.algebra),
        seed: cfg.seed,
        cap: cfg.cap,
        degrees: Vec::new(),
        checks: Vec::new(),
        truncated: None,
        deformation: None,
    }
}

pub fn render(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        OutputFormat::Tsv => render_tsv(report),
    }
}

fn render_tsv(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "key\tvalue");
    let _ = writeln!(out, "tool\t{} {}", r.tool, r.version);
    let _ = writeln!(out, "command\t{}", r.command);
    let _ = writeln!(out, "algebra\t{}", r.algebra);
    let _ = writeln!(out, "field\t{}", r.field);
    let _ = writeln!(out, "algebra_hash\t{}", r.algebra_hash);
    let _ = writeln!(out, "seed\t{}", r.seed);
    let _ = writeln!(out, "cap\t{}", r.cap);
    if let Some(t) = &r.truncated {
        let _ = writeln!(out, "truncated\tdegree={} needed={} cap={}", t.degree, t.needed, t.cap);
    }
    if !r.degrees.is_empty() {
        let _ = writeln!(out, "\nn\tdimC\tdimZ\tdimB\tdimH");
        for d in &r.degrees {
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", d.n, d.dim_c, d.dim_z, d.dim_b, d.dim_h);
        }
    }
    if !r.checks.is_empty() {
        let _ = writeln!(out, "\ncheck\tcases_run\tcases_skipped\tpassed\tfailures");
        for c in &r.checks {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                c.name,
                c.cases_run,
                c.cases_skipped,
                c.passed,
                c.failures.join("; ")
            );
        }
    }
    if let Some(d) = &r.deformation {
        let _ = writeln!(out, "\nu1\t{}", d.u1);
        let _ = writeln!(out, "order_target\t{}", d.order_target);
        let _ = writeln!(out, "order_reached\t{}", d.order_reached);
        let _ = writeln!(out, "lifted_fully\t{}", d.lifted_fully);
        let _ = writeln!(out, "\nstep\torder_reached\tlift_found\toracle_order\tobstruction_class");
        for (i, s) in d.steps.iter().enumerate() {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                i + 1,
                s.order_reached,
                s.lift_found,
                s.oracle_order,
                s.obstruction_class.join(",")
            );
        }
    }
    out
}

pub struct RunOutput {
    pub rendered: String,
    pub exit_code: i32,
}

/// Rank report over all degrees up to the configured maximum; exit code 2
/// when the cap cut the sweep short.
pub fn run_cohomology(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let rep = cohomology(&cfg.algebra, cfg.max_degree, cfg.cap);
    let mut report = base_report(cfg, "cohomology");
    report.degrees = rep
        .degrees
        .iter()
        .map(|s| DegreeRow { n: s.n, dim_c: s.dim_c, dim_z: s.dim_z, dim_b: s.dim_b, dim_h: s.dim_h })
        .collect();
    report.truncated = rep
        .truncated
        .as_ref()
        .map(|t| TruncationNote { degree: t.degree, needed: t.needed, cap: t.cap });
    let exit_code = if rep.is_partial() { 2 } else { 0 };
    Ok(RunOutput { rendered: render(&report, cfg.format), exit_code })
}

fn push_suite(rows: &mut Vec<CheckRow>, suite: &SuiteReport) {
    for c in &suite.checks {
        rows.push(CheckRow {
            name: format!("{}/{}", suite.suite, c.name),
            cases_run: c.cases_run,
            cases_skipped: c.cases_skipped,
            passed: c.passed(),
            failures: c.failures.clone(),
        });
    }
}

pub fn matrices_equal(a: &Matrix, b: &Matrix) -> bool {
    a.rows() == b.rows()
        && a.cols() == b.cols()
        && a.nnz() == b.nnz()
        && a.iter().all(|(r, c, v)| b.get(r, c) == *v)
}

/// Compares the two independent differential constructions degree by
/// degree: the closed-form matrices against the simplicial model of the
/// sphere, and the circle model against a directly coded classical
/// Hochschild differential.
fn crosscheck_suite(cfg: &RunConfig) -> SuiteReport {
    let alg = &cfg.algebra;
    let d = alg.dim();
    let mut sphere_line = CheckLine {
        name: "sphere-model-vs-closed-form".to_string(),
        cases_run: 0,
        cases_skipped: 0,
        failures: Vec::new(),
    };
    let sphere = s2_model(cfg.max_degree + 1);
    for n in 0..=cfg.max_degree {
        match (delta_matrix(alg, n, cfg.cap), sphere.boundary_matrix(alg, n, cfg.cap)) {
            (Ok(a), Ok(b)) => {
                sphere_line.cases_run += 1;
                if !matrices_equal(&a, &b) {
                    sphere_line.failures.push(format!("degree {n}: differentials differ"));
                }
            }
            (Err(ComplexError::CapExceeded { .. }), _)
            | (_, Err(SimplicialError::CapExceeded { .. })) => sphere_line.cases_skipped += 1,
            (Err(e), _) => sphere_line.failures.push(format!("degree {n}: {e}")),
            (_, Err(e)) => sphere_line.failures.push(format!("degree {n}: {e}")),
        }
    }
    let mut circle_line = CheckLine {
        name: "circle-model-vs-classical".to_string(),
        cases_run: 0,
        cases_skipped: 0,
        failures: Vec::new(),
    };
    let circle = s1_model(cfg.max_degree + 1);
    for n in 0..=cfg.max_degree {
        // The classical complex has d^(n+1) * d entries at level n + 1.
        let needed = d.checked_pow(n as u32 + 1).and_then(|t| t.checked_mul(d));
        match needed {
            Some(needed) if needed <= cfg.cap => match circle.boundary_matrix(alg, n, cfg.cap) {
                Ok(b) => {
                    circle_line.cases_run += 1;
                    if !matrices_equal(&classical_hochschild_matrix(alg, n), &b) {
                        circle_line.failures.push(format!("degree {n}: differentials differ"));
                    }
                }
                Err(SimplicialError::CapExceeded { .. }) => circle_line.cases_skipped += 1,
                Err(e) => circle_line.failures.push(format!("degree {n}: {e}")),
            },
            _ => circle_line.cases_skipped += 1,
        }
    }
    SuiteReport { suite: "crosscheck".to_string(), checks: vec![sphere_line, circle_line] }
}

/// Runs the named verification suite (or all of them); exit code 3 when any
/// check records a failure.
pub fn run_verify(cfg: &RunConfig, suite: &str) -> Result<RunOutput, CliError> {
    let wanted: Vec<&str> = match suite {
        "all" => vec!["operad", "gv", "galgebra", "crosscheck"],
        s @ ("operad" | "gv" | "galgebra" | "crosscheck") => vec![s],
        other => {
            return Err(CliError::Input(format!(
                "unknown suite `{other}` (expected operad, gv, galgebra, crosscheck or all)"
            )))
        }
    };
    let mut rows: Vec<CheckRow> = Vec::new();
    for s in wanted {
        match s {
            "operad" => push_suite(
                &mut rows,
                &verify_operad_axioms(&cfg.algebra, cfg.trials, cfg.max_degree, cfg.cap, cfg.seed),
            ),
            "gv" => push_suite(
                &mut rows,
                &verify_gv_identities(&cfg.algebra, cfg.trials, cfg.max_degree, cfg.cap, cfg.seed),
            ),
            "galgebra" => {
                let degree = cfg.max_degree.max(2);
                let rep = cohomology(&cfg.algebra, degree, cfg.cap);
                let suite =
                    verify_g_algebra(&cfg.algebra, &rep, degree, cfg.trials, cfg.cap, cfg.seed)
                        .map_err(|e| match e {
                            CohomologyError::DegreeNotCovered { degree } => CliError::Cap(format!(
                                "cohomology through degree {degree} does not fit the cap {}",
                                cfg.cap
                            )),
                            other => CliError::Input(other.to_string()),
                        })?;
                push_suite(&mut rows, &suite);
            }
            "crosscheck" => push_suite(&mut rows, &crosscheck_suite(cfg)),
            _ => unreachable!("suite names are fixed above"),
        }
    }
    let failed = rows.iter().any(|c| !c.passed);
    let mut report = base_report(cfg, &format!("verify:{suite}"));
    report.checks = rows;
    let exit_code = if failed { 3 } else { 0 };
    Ok(RunOutput { rendered: render(&report, cfg.format), exit_code })
}

fn load_map_file(path: &str, alg: &Algebra, cap: usize) -> Result<Cochain, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read map file `{path}`: {e}")))?;
    let rows: Vec<Vec<Coord>> = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("map file `{path}` is not valid JSON: {e}")))?;
    let d = alg.dim();
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(CliError::Input(format!(
            "map file `{path}` must be a {d} x {d} matrix (row k = coordinates of u(e_k))"
        )));
    }
    let mut values = Vec::with_capacity(d * d);
    for row in &rows {
        for c in row {
            values.push(coord_to_scalar(c, alg.tag())?);
        }
    }
    let _ = cap;
    Cochain::from_vec(alg.tag(), d, 2, values)
        .map_err(|e| CliError::Input(format!("map file `{path}`: {e}")))
}

fn deformation_error(e: DeformationError) -> CliError {
    match e {
        DeformationError::ObstructionNotCocycle { .. } | DeformationError::LiftRegressed { .. } => {
            CliError::Verification(e.to_string())
        }
        DeformationError::Complex(ComplexError::CapExceeded { .. }) => CliError::Cap(e.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

/// Builds `u_1` from its source, checks it is a 2-cocycle, then lifts order
/// by order up to `order`, recording each obstruction class and the
/// truncated-identity oracle's verdict.
pub fn run_deform(cfg: &RunConfig, u1_source: &str, order: usize) -> Result<RunOutput, CliError> {
    if order == 0 {
        return Err(CliError::Input("--order must be at least 1".to_string()));
    }
    let alg = &cfg.algebra;
    let u1 = match u1_source {
        "euler" => euler_derivation(alg, cfg.cap).map_err(deformation_error)?,
        "zero" => Cochain::zero(alg.tag(), alg.dim(), 2, cfg.cap)
            .map_err(|e| CliError::Cap(e.to_string()))?,
        path => load_map_file(path, alg, cfg.cap)?,
    };
    let du = delta(alg, &u1, cfg.cap).map_err(|e| CliError::Cap(e.to_string()))?;
    if let Some(idx) = du.values().iter().position(|v| !v.is_zero()) {
        let d = alg.dim();
        let triple = tuple_unrank(d, 3, idx / d);
        return Err(CliError::Input(format!(
            "u1 is not a 2-cocycle: the identity fails on basis triple ({}, {}, {})",
            alg.labels()[triple[0]],
            alg.labels()[triple[1]],
            alg.labels()[triple[2]],
        )));
    }
    // Obstruction classes live in degree 3.
    let rep = cohomology(alg, 3, cfg.cap);
    if rep.degree(3).is_none() {
        return Err(CliError::Cap(format!(
            "cohomology through degree 3 does not fit the cap {}",
            cfg.cap
        )));
    }
    let mut state =
        DeformationState::new(alg.clone(), vec![u1]).map_err(deformation_error)?;
    let mut steps = Vec::new();
    let mut lifted_fully = true;
    while state.order() < order {
        match lift_step(&state, &rep, cfg.cap).map_err(deformation_error)? {
            LiftOutcome::Lifted { state: next, obstruction } => {
                steps.push(StepRow {
                    order_reached: next.order(),
                    obstruction_class: obstruction
                        .class
                        .iter()
                        .flatten()
                        .map(|v| v.to_string())
                        .collect(),
                    lift_found: true,
                    oracle_order: next.verified_order(),
                });
                state = next;
            }
            LiftOutcome::Obstructed { obstruction } => {
                steps.push(StepRow {
                    order_reached: state.order(),
                    obstruction_class: obstruction
                        .class
                        .iter()
                        .flatten()
                        .map(|v| v.to_string())
                        .collect(),
                    lift_found: false,
                    oracle_order: state.verified_order(),
                });
                lifted_fully = false;
                break;
            }
        }
    }
    let mut report = base_report(cfg, "deform");
    report.deformation = Some(DeformationOut {
        u1: u1_source.to_string(),
        order_target: order,
        order_reached: state.order(),
        lifted_fully,
        steps,
    });
    Ok(RunOutput { rendered: render(&report, cfg.format), exit_code: 0 })
}

/// Writes rendered output to a file or standard output.
pub fn emit(out: &RunOutput, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, &out.rendered)
            .map_err(|e| CliError::Input(format!("cannot write `{}`: {e}", p.display()))),
        None => {
            print!("{}", out.rendered);
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_spellings() {
        assert_eq!(parse_field("Q").unwrap(), FieldTag::rational());
        assert_eq!(parse_field("rational").unwrap(), FieldTag::rational());
        assert_eq!(parse_field("101").unwrap(), FieldTag::fp(101).unwrap());
        assert_eq!(parse_field("F_7").unwrap(), FieldTag::fp(7).unwrap());
        assert!(matches!(parse_field("4"), Err(CliError::Input(_))));
        assert!(matches!(parse_field("seven"), Err(CliError::Input(_))));
    }

    #[test]
    fn named_algebras_parse() {
        let tag = FieldTag::rational();
        let (label, alg) = parse_algebra("trunc2:2,3", tag).unwrap();
        assert_eq!(label, "trunc2:2,3");
        assert_eq!(alg.dim(), 6);
        assert!(matches!(parse_algebra("trunc:", tag), Err(CliError::Input(_))));
        assert!(matches!(parse_algebra("trunc2:2", tag), Err(CliError::Input(_))));
        assert!(matches!(parse_algebra("/no/such/file.json", tag), Err(CliError::Input(_))));
    }

    #[test]
    fn cap_flag_wins() {
        assert_eq!(resolve_cap(Some(42)).unwrap(), 42);
    }

    #[test]
    fn hash_ignores_labels_but_not_structure() {
        let tag = FieldTag::fp(101).unwrap();
        let dual = Algebra::dual_numbers(tag);
        let relabeled = Algebra::new(
            tag,
            2,
            dual.unit_el().to_vec(),
            (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| dual.basis_mul(i, j).to_vec()).collect(),
            vec!["e".into(), "t".into()],
        )
        .unwrap()
        .with_grading(vec![0, 1])
        .unwrap();
        assert_eq!(algebra_hash(&dual), algebra_hash(&relabeled));
        assert_ne!(algebra_hash(&dual), algebra_hash(&Algebra::truncated_poly(tag, 3)));
        assert_ne!(
            algebra_hash(&dual),
            algebra_hash(&Algebra::dual_numbers(FieldTag::rational()))
        );
    }

    #[test]
    fn exit_codes_by_error_class() {
        assert_eq!(CliError::Input("x".into()).exit_code(), 1);
        assert_eq!(CliError::Cap("x".into()).exit_code(), 2);
        assert_eq!(CliError::Verification("x".into()).exit_code(), 3);
    }
}
