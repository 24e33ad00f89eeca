//! End-to-end acceptance run: one PASS/FAIL line per criterion, all exact.

use std::process::ExitCode;
use std::time::Instant;

use hilbfock::cli::{cts_reports, default_n, delta_oracle_report, dunkl_reports, loc_reports, ring_document, Route};
use hilbfock::fock::{dimension_gf, enumerate_basis, FockSpace};
use hilbfock::frobenius::FrobeniusAlgebra;
use hilbfock::heisenberg::lehn_op;
use hilbfock::integrals::{limit_reports, sample_point};
use hilbfock::linalg::Matrix;
use hilbfock::report::CheckReport;
use hilbfock::ring::structure_constants;
use hilbfock::scalar::rat;

type Outcome = Result<Vec<CheckReport>, String>;

fn spaces() -> Vec<FockSpace> {
    FrobeniusAlgebra::reference_algebras()
        .into_iter()
        .map(FockSpace::new)
        .collect()
}

/// Window checks for criteria 1 to 3: [commutator, Hecke, sum, square] per algebra.
fn dunkl_windows() -> Result<Vec<Vec<CheckReport>>, String> {
    spaces()
        .iter()
        .map(|s| dunkl_reports(s.alg(), 3, 4).map_err(|e| e.to_string()))
        .collect()
}

fn pick(windows: &Result<Vec<Vec<CheckReport>>, String>, which: &[usize]) -> Outcome {
    let w = windows.as_ref().map_err(Clone::clone)?;
    Ok(w.iter()
        .flat_map(|reps| which.iter().map(|&i| reps[i].clone()))
        .collect())
}

fn cts_stability() -> Outcome {
    let mut out = Vec::new();
    for space in spaces() {
        let lambdas = match space.alg().name() {
            "P2" => vec![rat(1, 1), sample_point(), rat(-5, 2)],
            _ => vec![sample_point()],
        };
        out.push(cts_reports(&space, default_n(space.alg()), &lambdas).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

fn lehn_oracle() -> Outcome {
    let space = FockSpace::new(FrobeniusAlgebra::point());
    let m = lehn_op(&space, space.alg().canonical_class(), 2);
    let want =
        Matrix::from_rows(vec![vec![rat(0, 1), rat(2, 1)], vec![rat(2, 1), rat(0, 1)]]).map_err(|e| e.to_string())?;
    let mut r = CheckReport::new("L on F^2 (point, K = 0)");
    r.record(m.block(2) == Some(&want), || format!("got {:?}", m.block(2)));
    Ok(vec![r])
}

fn chern() -> Outcome {
    let mut out = Vec::new();
    for space in spaces() {
        let n = default_n(space.alg());
        out.extend(
            hilbfock::integrals::chern_property_reports(&space, space.alg().canonical_class(), n, 2)
                .map_err(|e| e.to_string())?,
        );
    }
    Ok(out)
}

fn construct() -> Outcome {
    let space = FockSpace::new(FrobeniusAlgebra::p2());
    let mut out = Vec::new();
    for n in 1..=3 {
        out.extend(limit_reports(&space, n, n as usize + 1).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

/// Criteria 8 and 9 share the two route algebras.
fn loc_and_ring() -> Result<(Vec<CheckReport>, Vec<CheckReport>), String> {
    let mut loc = Vec::new();
    let mut ring = Vec::new();
    for space in spaces() {
        let alg = space.alg();
        for n in 1..=3u32 {
            let (reps, chern, dunkl) = loc_reports(&space, n, n as usize + 1).map_err(|e| e.to_string())?;
            loc.extend(reps);
            let a = structure_constants(&space, &chern).map_err(|e| e.to_string())?;
            let b = structure_constants(&space, &dunkl).map_err(|e| e.to_string())?;
            let mut same = CheckReport::new(format!("tables from both routes agree ({} n={n})", alg.name()));
            same.record(a == b, || "structure constants differ".into());
            ring.push(same);
        }
        for n in 1..=default_n(alg) {
            let (_, reps) = ring_document(&space, n, Route::Chern, n as usize + 1).map_err(|e| e.to_string())?;
            ring.extend(reps.into_iter().map(|mut r| {
                r.name = format!("{} ({} n={n})", r.name, alg.name());
                r
            }));
        }
    }
    Ok((loc, ring))
}

fn dimension_oracle() -> Outcome {
    let mut out = Vec::new();
    for space in spaces() {
        let alg = space.alg();
        let mut r = CheckReport::new(format!("basis count vs generating function ({})", alg.name()));
        for n in 0..=10 {
            let got = enumerate_basis(alg, n).len() as u128;
            let want = dimension_gf(alg, n);
            r.record(got == want, || format!("n={n}: {got} vs {want}"));
        }
        out.push(r);
    }
    let point = FrobeniusAlgebra::point();
    let mut r = CheckReport::new("point dimensions are partition numbers");
    let want = [1u128, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
    for (n, w) in want.iter().enumerate() {
        r.record(dimension_gf(&point, n as u32) == *w, || format!("n={n}"));
    }
    out.push(r);
    Ok(out)
}

fn line(index: usize, title: &str, started: Instant, outcome: Outcome) -> bool {
    let secs = started.elapsed().as_secs_f64();
    match outcome {
        Ok(reps) => {
            let ok = reps.iter().all(CheckReport::passed);
            let checked: usize = reps.iter().map(|r| r.checked).sum();
            println!(
                "{} {index:>2} {title}: {checked} exact checks, {secs:.1}s",
                if ok { "PASS" } else { "FAIL" }
            );
            for r in reps.iter().filter(|r| !r.passed()) {
                println!("       {}", r.summary());
            }
            ok
        }
        Err(e) => {
            println!("FAIL {index:>2} {title}: error: {e} ({secs:.1}s)");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut all = true;

    let t = Instant::now();
    let windows = dunkl_windows();
    all &= line(
        1,
        "Dunkl operators commute (N <= 3, degree <= 4)",
        t,
        pick(&windows, &[0]),
    );
    let t = Instant::now();
    all &= line(2, "Hecke relation (N <= 3)", t, pick(&windows, &[1]));
    let t = Instant::now();
    all &= line(3, "linear and quadratic Dunkl identities", t, pick(&windows, &[2, 3]));
    let t = Instant::now();
    all &= line(
        4,
        "Calogero-Sutherland operator equals Lehn, N = n+1 and n+2",
        t,
        cts_stability(),
    );
    let t = Instant::now();
    all &= line(5, "Lehn operator on F^2 of the point", t, lehn_oracle());
    let t = Instant::now();
    all &= line(6, "Chern-character operator properties (i <= 2)", t, chern());
    let t = Instant::now();
    all &= line(
        7,
        "flat limit independent of direction, no poles (P2, n <= 3)",
        t,
        construct(),
    );
    let t = Instant::now();
    let shared = loc_and_ring();
    let (loc, ring) = match shared {
        Ok((a, b)) => (Ok(a), Ok(b)),
        Err(e) => (Err(e.clone()), Err(e)),
    };
    all &= line(8, "Chern route equals Dunkl route (n <= 3)", t, loc);
    let t = Instant::now();
    all &= line(9, "ring tables", t, ring);
    let t = Instant::now();
    all &= line(
        10,
        "delta-basis fourth power",
        t,
        delta_oracle_report().map(|r| vec![r]).map_err(|e| e.to_string()),
    );
    let t = Instant::now();
    all &= line(11, "dimension generating function (n <= 10)", t, dimension_oracle());

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
