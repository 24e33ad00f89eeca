//! Command-line front end and the orchestrated verification suite.

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cherednik::{
    delta_power, dunkl_commutator_check, dunkl_square_check, dunkl_sum_check, elem_of, hecke_relation_check, Dunkl,
    SlotAlgebra,
};
use crate::fock::{dimension_gf, enumerate_basis, FockSpace};
use crate::frobenius::{AlgElement, AlgebraError, FrobeniusAlgebra};
use crate::heisenberg::lehn_op;
use crate::integrals::{
    chern_property_reports, chern_route_algebra, cts_cross_check, dunkl_route_algebra, limit_reports, sample_point,
    IntegralsError, OperatorAlgebra,
};
use crate::linalg::Matrix;
use crate::report::CheckReport;
use crate::ring::{lehn_multiplication_report, structure_constants, unit_vector, RingError, TableMetadata};
use crate::scalar::Rational;

/// Largest Fⁿ handled by `dims`.
const DIMS_BUDGET: u128 = 200_000;
/// Largest Fⁿ for explicit matrices.
const MATRIX_BUDGET: usize = 512;
const MAX_PARTICLES: usize = 6;
const MAX_WINDOW_DEGREE: i32 = 6;
const MAX_CHERN_INDEX: u32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("internal failure: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Input(_) | CliError::Budget(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<IntegralsError> for CliError {
    fn from(e: IntegralsError) -> Self {
        match e {
            IntegralsError::Algebra(a) => a.into(),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<RingError> for CliError {
    fn from(e: RingError) -> Self {
        CliError::Internal(e.to_string())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Chern,
    Dunkl,
    Both,
}

#[derive(Debug, Parser)]
#[command(
    name = "hilbfock",
    version,
    about = "Exact Fock-space computations for Hilbert schemes of points"
)]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// Algebra file, or one of the built-in names point, p2, torus.
    #[arg(long)]
    pub algebra: String,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimensions and Poincaré polynomials of F⁰ … Fⁿ.
    Dims {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5)]
        n: u32,
    },
    /// Matrix of the Lehn operator 𝔏(K) on Fⁿ.
    Lehn {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: u32,
    },
    /// Commutativity, Hecke relation and the sum and square identities on tensor windows.
    DunklVerify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        particles: usize,
        #[arg(long, default_value_t = 4)]
        degree: i32,
    },
    /// Properties of the ĉh_i operators for i ≤ degree on F⁰ … Fⁿ.
    Chern {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 2)]
        degree: u32,
    },
    /// Cup-product structure constants on Fⁿ.
    Ring {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Route::Both)]
        route: Route,
        #[arg(long)]
        particles: Option<usize>,
    },
    /// The full check suite.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Upper energy bound; defaults to 4 for one-dimensional algebras, 3 otherwise.
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = 4)]
        degree: i32,
    },
    /// Behaviour of the Dunkl route as λ → 0 on Fⁿ.
    LimitCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        particles: Option<usize>,
    },
}

/// Parses the process arguments, runs, prints, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(j) = cli.jobs {
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    match run(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Dims { common, n } => {
            let alg = load_algebra(&common.algebra)?;
            emit(common, &dims_document(&alg, *n)?)
        }
        Command::Lehn { common, n } => {
            let space = FockSpace::new(load_algebra(&common.algebra)?);
            matrix_budget(&space, *n)?;
            let m = lehn_op(&space, space.alg().canonical_class(), *n);
            emit(common, &matrix_document(&space, *n, m.block(*n).expect("block n")))
        }
        Command::DunklVerify {
            common,
            particles,
            degree,
        } => {
            let alg = load_algebra(&common.algebra)?;
            if *particles == 0 || *particles > MAX_PARTICLES || *degree < 0 || *degree > MAX_WINDOW_DEGREE {
                return Err(CliError::Budget(format!(
                    "need 1 <= particles <= {MAX_PARTICLES} and 0 <= degree <= {MAX_WINDOW_DEGREE}"
                )));
            }
            finish(common, "dunkl-verify", dunkl_reports(&alg, *particles, *degree)?)
        }
        Command::Chern { common, n, degree } => {
            let space = FockSpace::new(load_algebra(&common.algebra)?);
            matrix_budget(&space, *n)?;
            if *degree > MAX_CHERN_INDEX {
                return Err(CliError::Budget(format!("degree {degree} > {MAX_CHERN_INDEX}")));
            }
            let reports = chern_property_reports(&space, space.alg().canonical_class(), *n, *degree)?;
            finish(common, "chern", reports)
        }
        Command::Ring {
            common,
            n,
            route,
            particles,
        } => {
            let space = FockSpace::new(load_algebra(&common.algebra)?);
            let particles = particles_for(&space, *n, *particles)?;
            let (doc, reports) = ring_document(&space, *n, *route, particles)?;
            let failed: Vec<_> = reports.iter().filter(|r| !r.passed()).map(|r| r.summary()).collect();
            if !failed.is_empty() {
                return Err(CliError::Verification(failed.join("; ")));
            }
            emit(common, &doc)
        }
        Command::Verify { common, n, degree } => {
            let space = FockSpace::new(load_algebra(&common.algebra)?);
            let n = match n {
                Some(n) => *n,
                None => default_n(space.alg()),
            };
            particles_for(&space, n, None)?;
            if *degree < 0 || *degree > MAX_WINDOW_DEGREE {
                return Err(CliError::Budget(format!("degree must lie in 0..={MAX_WINDOW_DEGREE}")));
            }
            finish(common, "verify", verify_suite(&space, n, *degree)?)
        }
        Command::LimitCheck { common, n, particles } => {
            let space = FockSpace::new(load_algebra(&common.algebra)?);
            let particles = particles_for(&space, *n, *particles)?;
            finish(common, "limit-check", limit_reports(&space, *n, particles)?)
        }
    }
}

/// Reads an algebra file; the names point, p2 and torus select the shipped algebras.
pub fn load_algebra(spec: &str) -> Result<FrobeniusAlgebra, CliError> {
    let path = PathBuf::from(spec);
    if !path.exists() {
        match spec {
            "point" => return Ok(FrobeniusAlgebra::point()),
            "p2" => return Ok(FrobeniusAlgebra::p2()),
            "torus" => return Ok(FrobeniusAlgebra::torus()),
            _ => {}
        }
    }
    let text = fs::read_to_string(&path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    FrobeniusAlgebra::from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Budgeted default for the end-to-end commands.
pub fn default_n(alg: &FrobeniusAlgebra) -> u32 {
    if alg.dim() == 1 {
        4
    } else {
        3
    }
}

fn matrix_budget(space: &FockSpace, n: u32) -> Result<(), CliError> {
    let d = dimension_gf(space.alg(), n);
    if d > MATRIX_BUDGET as u128 {
        return Err(CliError::Budget(format!("dim F^{n} = {d} exceeds {MATRIX_BUDGET}")));
    }
    Ok(())
}

fn particles_for(space: &FockSpace, n: u32, particles: Option<usize>) -> Result<usize, CliError> {
    if n == 0 || n > default_n(space.alg()) {
        return Err(CliError::Budget(format!(
            "n must lie in 1..={} for {}",
            default_n(space.alg()),
            space.alg().name()
        )));
    }
    let p = particles.unwrap_or(n as usize + 1);
    if p < n as usize + 1 || p > n as usize + 2 {
        return Err(CliError::Budget(format!("particles must be n+1 or n+2, got {p}")));
    }
    Ok(p)
}

fn emit<T: Serialize>(common: &Common, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))? + "\n";
    match &common.out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn finish(common: &Common, command: &str, reports: Vec<CheckReport>) -> Result<(), CliError> {
    for r in &reports {
        eprintln!("{}", r.summary());
    }
    let passed = reports.iter().all(CheckReport::passed);
    emit(
        common,
        &json!({ "command": command, "passed": passed, "checks": reports }),
    )?;
    if passed {
        Ok(())
    } else {
        let n = reports.iter().filter(|r| !r.passed()).count();
        Err(CliError::Verification(format!(
            "{n} of {} checks failed",
            reports.len()
        )))
    }
}

/// n, dim Fⁿ and the Poincaré polynomial by cohomological degree.
pub fn dims_document(alg: &FrobeniusAlgebra, nmax: u32) -> Result<Value, CliError> {
    let mut rows = Vec::new();
    for n in 0..=nmax {
        let d = dimension_gf(alg, n);
        if d > DIMS_BUDGET {
            return Err(CliError::Budget(format!("dim F^{n} = {d} exceeds {DIMS_BUDGET}")));
        }
        let mut poly: Vec<u64> = Vec::new();
        for m in enumerate_basis(alg, n) {
            let deg = crate::fock::cohomological_degree(alg, &m) as usize;
            if poly.len() <= deg {
                poly.resize(deg + 1, 0);
            }
            poly[deg] += 1;
        }
        rows.push(json!({ "n": n, "dimension": d.to_string(), "poincare": poly }));
    }
    Ok(json!({ "algebra": alg.name(), "algebra_digest": alg.digest(), "dims": rows }))
}

fn matrix_document(space: &FockSpace, n: u32, m: &Matrix<Rational>) -> Value {
    let basis: Vec<String> = space.basis(n).monomials().iter().map(|b| b.to_string()).collect();
    let rows: Vec<Vec<String>> = (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| m.get(r, c).to_string()).collect())
        .collect();
    json!({
        "algebra": space.alg().name(),
        "algebra_digest": space.alg().digest(),
        "K": space.alg().canonical_class().coeffs.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "n": n,
        "basis": basis,
        "matrix": rows,
    })
}

/// Coupling used for window checks: w = u⁻² at the sample point of the default
/// direction, or w = 1 when no direction is available.
pub fn sample_coupling(alg: &FrobeniusAlgebra) -> Result<AlgElement<Rational>, CliError> {
    let Ok(dir) = alg.default_degeneration() else {
        return Ok(alg.unit_element());
    };
    let u = dir
        .u
        .eval(&sample_point())
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let inv = alg.invert_even(&u)?;
    Ok(alg.mul_elems(&inv, &inv))
}

/// Commutativity, Hecke relation, and the sum and square identities for 2 ≤ N ≤ particles.
pub fn dunkl_reports(alg: &FrobeniusAlgebra, particles: usize, degree: i32) -> Result<Vec<CheckReport>, CliError> {
    let slot = SlotAlgebra::<Rational>::from_frobenius(alg);
    let w = elem_of(&sample_coupling(alg)?);
    let mut out = vec![
        CheckReport::new(format!("[y_l, y_l'] = 0 ({})", alg.name())),
        CheckReport::new(format!("Hecke relation ({})", alg.name())),
        CheckReport::new(format!("sum of Dunkl operators ({})", alg.name())),
        CheckReport::new(format!("square of Dunkl operators ({})", alg.name())),
    ];
    for p in 1..=particles {
        let d = Dunkl::new(&slot, w.clone(), p);
        out[0].merge(dunkl_commutator_check(&d, degree));
        if p >= 2 {
            out[1].merge(hecke_relation_check(&d, degree));
        }
        out[2].merge(dunkl_sum_check(&d, degree));
        out[3].merge(dunkl_square_check(&d, degree));
    }
    Ok(out)
}

/// 𝔏(u − e u⁻¹) against the transported Calogero–Sutherland operator on Fⁿ, 1 ≤ n ≤ nmax, at N = n+1 and N = n+2, for u on the default
/// direction at λ = λ₀ (or the constant u).
pub fn cts_reports(space: &FockSpace, nmax: u32, lambdas: &[Rational]) -> Result<CheckReport, CliError> {
    let dir = space.alg().default_degeneration()?;
    let mut rep = CheckReport::new(format!("CS operator matches Lehn ({})", space.alg().name()));
    for l in lambdas {
        let u = dir.u.eval(l).map_err(|e| CliError::Internal(e.to_string()))?;
        for n in 1..=nmax {
            for p in [n as usize + 1, n as usize + 2] {
                rep.merge(cts_cross_check(space, &u, n, p)?);
            }
        }
    }
    Ok(rep)
}

/// Both routes on Fⁿ: equal spans of dimension dim Fⁿ, commutative, cyclic.
/// Also returns the Chern-route and Dunkl-route algebras.
pub fn loc_reports(
    space: &FockSpace,
    n: u32,
    particles: usize,
) -> Result<(Vec<CheckReport>, OperatorAlgebra, OperatorAlgebra), CliError> {
    let alg = space.alg();
    let name = alg.name();
    let dir = alg.default_degeneration()?;
    let chern = chern_route_algebra(space, alg.canonical_class(), n)?;
    let dunkl = dunkl_route_algebra(space, &dir, n, particles)?;
    let size = space.dimension(n);
    let mut span = CheckReport::new(format!("routes agree ({name} n={n})"));
    span.record(chern.same_span(&dunkl), || {
        format!("dims {} and {}", chern.dim(), dunkl.dim())
    });
    let mut dims = CheckReport::new(format!("dimension is dim F^n ({name} n={n})"));
    dims.record(chern.dim() == size, || format!("chern route {} vs {size}", chern.dim()));
    dims.record(dunkl.dim() == size, || format!("dunkl route {} vs {size}", dunkl.dim()));
    let mut comm = chern.supercommutativity_report(space);
    comm.name = format!("supercommutative ({name} n={n})");
    let mut cyc = CheckReport::new(format!("cyclic on the unit ({name} n={n})"));
    let unit = space.coords(&unit_vector(space, n), n);
    cyc.record(chern.is_cyclic_on(&unit), || "chern route".into());
    cyc.record(dunkl.is_cyclic_on(&unit), || "dunkl route".into());
    Ok((vec![span, dims, comm, cyc], chern, dunkl))
}

/// Structure constants on Fⁿ from the chosen route, with all table checks.
pub fn ring_document(
    space: &FockSpace,
    n: u32,
    route: Route,
    particles: usize,
) -> Result<(crate::ring::TableDocument, Vec<CheckReport>), CliError> {
    let alg = space.alg();
    let (algebra, agree) = match route {
        Route::Chern => (chern_route_algebra(space, alg.canonical_class(), n)?, None),
        Route::Dunkl => (
            dunkl_route_algebra(space, &alg.default_degeneration()?, n, particles)?,
            None,
        ),
        Route::Both => {
            let a = chern_route_algebra(space, alg.canonical_class(), n)?;
            let b = dunkl_route_algebra(space, &alg.default_degeneration()?, n, particles)?;
            let same = a.same_span(&b);
            (a, Some(same))
        }
    };
    let table = structure_constants(space, &algebra)?;
    let mut reports = table.invariant_reports(alg.is_surface_graded());
    if n == 1 {
        reports.push(table.matches_algebra(alg));
    }
    let lehn = lehn_op(space, alg.canonical_class(), n);
    reports.push(lehn_multiplication_report(
        space,
        &algebra,
        lehn.block(n).expect("block n"),
    ));
    if let Some(same) = agree {
        let mut r = CheckReport::new(format!("routes agree ({} n={n})", alg.name()));
        r.record(same, || "chern and dunkl spans differ".into());
        reports.push(r);
    }
    let route_name = match route {
        Route::Chern => "chern",
        Route::Dunkl => "dunkl",
        Route::Both => "both",
    };
    let meta = TableMetadata {
        algebra: alg.name().to_string(),
        algebra_digest: alg.digest().to_string(),
        k: alg.canonical_class().coeffs.iter().map(|x| x.to_string()).collect(),
        route: route_name.into(),
        routes_agree: agree,
        surface_graded: alg.is_surface_graded(),
    };
    Ok((table.to_document(meta), reports))
}

/// Sym⁴ oracle: δ(x)⁴ in the δ-basis for the point algebra with t = 1.
pub fn delta_oracle_report() -> Result<CheckReport, CliError> {
    let slot = SlotAlgebra::<Rational>::from_frobenius(&FrobeniusAlgebra::point());
    let got = delta_power(&slot, 0, 4).map_err(|e| CliError::Internal(e.to_string()))?;
    let want: Vec<Rational> = [1i64, 7, 6, 1]
        .iter()
        .map(|&k| Rational::from_integer(k.into()))
        .collect();
    let mut r = CheckReport::new("x*x*x*x = x^4 + 6x^3 + 7x^2 + x (point, t = 1)");
    r.record(got == want, || format!("got {got:?}"));
    Ok(r)
}

/// The full suite on one algebra up to energy nmax.
pub fn verify_suite(space: &FockSpace, nmax: u32, degree: i32) -> Result<Vec<CheckReport>, CliError> {
    let alg = space.alg();
    let mut out = dunkl_reports(alg, 3, degree)?;
    out.push(cts_reports(space, nmax, &[sample_point()])?);
    out.extend(chern_property_reports(space, alg.canonical_class(), nmax, 2)?);
    for n in 1..=nmax {
        let (reports, _, _) = loc_reports(space, n, n as usize + 1)?;
        out.extend(reports);
        if alg.dim() > 1 {
            out.extend(limit_reports(space, n, n as usize + 1)?);
        }
        let (_, ring) = ring_document(space, n, Route::Chern, n as usize + 1)?;
        out.extend(ring);
    }
    let mut dims = CheckReport::new(format!("basis count matches generating function ({})", alg.name()));
    for n in 0..=10 {
        let got = enumerate_basis(alg, n).len() as u128;
        let want = dimension_gf(alg, n);
        dims.record(got == want, || format!("n={n}: {got} vs {want}"));
    }
    out.push(dims);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> PathBuf {
        std::env::temp_dir().join(format!("hilbfock-cli-{}-{name}", std::process::id()))
    }

    fn run_args(args: &[&str]) -> u8 {
        main_with_args(std::iter::once("hilbfock").chain(args.iter().copied()))
    }

    #[test]
    fn dims_examples() {
        let d = dims_document(&FrobeniusAlgebra::point(), 5).unwrap();
        let dims: Vec<&str> = d["dims"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r["dimension"].as_str().unwrap())
            .collect();
        assert_eq!(dims, ["1", "1", "2", "3", "5", "7"]);
        let d = dims_document(&FrobeniusAlgebra::p2(), 2).unwrap();
        assert_eq!(d["dims"][2]["dimension"], "9");
        assert_eq!(d["dims"][2]["poincare"], json!([1, 0, 2, 0, 3, 0, 2, 0, 1]));
    }

    #[test]
    fn exit_codes() {
        let bad = tmp("bad.json");
        fs::write(&bad, "{\"name\": \"x\",\n \"dim\": }").unwrap();
        assert_eq!(run_args(&["dims", "--algebra", bad.to_str().unwrap()]), 2);
        assert_eq!(run_args(&["dims", "--algebra", "/nonexistent/algebra.json"]), 2);
        assert_eq!(run_args(&["ring", "--algebra", "point", "--n", "9"]), 2);
        assert_eq!(
            run_args(&["ring", "--algebra", "point", "--n", "2", "--particles", "2"]),
            2
        );
        assert_eq!(run_args(&["frobnicate"]), 2);
        let out = tmp("lehn.json");
        assert_eq!(
            run_args(&["lehn", "--algebra", "point", "--n", "2", "--out", out.to_str().unwrap()]),
            0
        );
        let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(v["matrix"], json!([["0", "2"], ["2", "0"]]));
        let _ = fs::remove_file(bad);
        let _ = fs::remove_file(out);
    }

    #[test]
    fn error_message_has_line_info() {
        let bad = tmp("bad2.json");
        fs::write(&bad, "{\"name\": \"x\",\n \"dim\": }").unwrap();
        let err = load_algebra(bad.to_str().unwrap()).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let _ = fs::remove_file(bad);
    }

    #[test]
    fn ring_examples() {
        let p2 = FockSpace::new(FrobeniusAlgebra::p2());
        let (doc, reps) = ring_document(&p2, 1, Route::Both, 2).unwrap();
        assert!(reps.iter().all(CheckReport::passed));
        assert_eq!(doc.metadata.routes_agree, Some(true));
        assert_eq!(doc.constants.len(), 3);
        let point = FockSpace::new(FrobeniusAlgebra::point());
        let (doc, reps) = ring_document(&point, 2, Route::Chern, 3).unwrap();
        assert!(reps.iter().all(CheckReport::passed));
        assert!(doc
            .constants
            .iter()
            .all(|r| r.len() == 2 && r.iter().all(|c| c.len() == 2)));
        assert!(!doc.metadata.surface_graded);
    }

    #[test]
    fn output_is_deterministic() {
        let a = tmp("a.json");
        let b = tmp("b.json");
        for p in [&a, &b] {
            assert_eq!(
                run_args(&["ring", "--algebra", "torus", "--n", "2", "--out", p.to_str().unwrap()]),
                0
            );
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
        let _ = fs::remove_file(a);
        let _ = fs::remove_file(b);
    }

    #[test]
    fn small_suites_pass() {
        assert_eq!(
            run_args(&[
                "verify",
                "--algebra",
                "point",
                "--n",
                "2",
                "--degree",
                "2",
                "--out",
                tmp("v.json").to_str().unwrap()
            ]),
            0
        );
        assert_eq!(
            run_args(&[
                "dunkl-verify",
                "--algebra",
                "torus",
                "--particles",
                "2",
                "--degree",
                "2",
                "--out",
                tmp("d.json").to_str().unwrap()
            ]),
            0
        );
        assert_eq!(
            run_args(&[
                "chern",
                "--algebra",
                "p2",
                "--n",
                "2",
                "--out",
                tmp("c.json").to_str().unwrap()
            ]),
            0
        );
        assert_eq!(
            run_args(&[
                "limit-check",
                "--algebra",
                "p2",
                "--n",
                "2",
                "--out",
                tmp("l.json").to_str().unwrap()
            ]),
            0
        );
        assert!(delta_oracle_report().unwrap().passed());
        for f in ["v.json", "d.json", "c.json", "l.json"] {
            let _ = fs::remove_file(tmp(f));
        }
    }
}
