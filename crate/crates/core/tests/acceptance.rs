//! Acceptance criteria, one line per criterion.
//!
//! Runs without the libtest harness so that every line is printed on a
//! plain `cargo test`. Exits nonzero when any criterion fails.

mod common;

use std::time::{Duration, Instant};

use cc_lab::cli::{load_str, run_pipeline, Settings, Source, Stage, EXIT_INPUT, EXIT_PASS, EXIT_VIOLATION};
use cc_lab::parameters::{check_pq_identity, eigenmatrices, multiplicity_from_q};
use cc_lab::polynomial::{dbrg_sequences, DbrgOutcome, PPolyOutcome};
use cc_lab::report::VerificationReport;
use cc_lab::spectral::{build_spectral_basis, verify_dual_basis, verify_suda_conditions};
use cc_lab::structureconsts::{
    intersection_numbers, intersection_oracle, krein_feasibility, krein_parameters, Cube, KreinCondition, KreinTable,
    Side, DEFAULT_INT_TOL,
};
use cc_lab::{Matrix, Tolerance};
use common::*;

/// Residual bound for every floating identity below.
const RESIDUAL: f64 = 1e-9;
/// Pre-rounding bound for intersection numbers.
const INTEGRALITY: f64 = 1e-6;
/// Wall-clock budget for one full report.
const BUDGET: Duration = Duration::from_secs(5);

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tol() -> Tolerance {
    Tolerance::new(RESIDUAL).unwrap()
}

fn worst_residual(r: &VerificationReport) -> f64 {
    r.checks.iter().filter_map(|c| c.residual).fold(0.0, f64::max)
}

/// Flips every entry of every relation matrix in turn and expects `verify`
/// to exit 1 with an entry witness at the flipped coordinate.
fn mutations(name: &str, dir: &std::path::Path) -> Result<usize, String> {
    let cc = config(name);
    let doc = to_ccjson(&cc);
    let path = dir.join("mutant.ccjson");
    let path_str = path.to_str().unwrap();
    let mut count = 0;
    for (k, rel) in cc.relations().iter().enumerate() {
        for row in 0..rel.matrix.rows() {
            for col in 0..rel.matrix.cols() {
                let mut d = doc.clone();
                let cell = &mut d["relations"][k]["matrix"][row][col];
                *cell = (1 - cell.as_u64().unwrap()).into();
                std::fs::write(&path, d.to_string()).unwrap();
                let (code, report) = cli_json(&["verify", path_str]);
                let (i, j) = rel.id.block();
                let expected = [rel.id.to_string(), format!("block ({i},{j})")];
                let checks = report["verification"]["axioms"]["checks"].as_array().unwrap();
                let witnessed = checks.iter().filter(|c| c["passed"] == false).any(|c| {
                    let w = &c["witness"];
                    w["kind"] == "entry"
                        && w["row"] == row
                        && w["col"] == col
                        && expected.iter().any(|e| w["location"] == e.as_str())
                });
                ensure(code == EXIT_VIOLATION && witnessed, || {
                    format!("{name}: flipping {} ({row},{col}) gave exit {code} without a matching witness", rel.id)
                })?;
                count += 1;
            }
        }
    }
    Ok(count)
}

fn axiom_suite() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut total = 0;
    for name in BIPARTITE {
        let bc = bipartite(name);
        ensure(bc.assemble().verify_axioms().unwrap().passed(), || format!("{name}: axioms fail"))?;
        ensure(bc.verify_bcc().unwrap().passed(), || format!("{name}: C1-C6 fail"))?;
        let (code, _, _) = cli(&["verify", data(name).to_str().unwrap()]);
        ensure(code == EXIT_PASS, || format!("{name}: verify exit {code}"))?;
        total += mutations(name, dir.path())?;
    }
    Ok(format!("{} inputs verified, {total} single-entry mutations each exit 1 with the flipped entry as witness", BIPARTITE.len()))
}

fn hobart() -> Outcome {
    let name = "hobart-instance.design.json";
    let bc = bipartite(name);
    let ty = bc.assemble().type_of().to_string();
    ensure(ty == "(2 2; 4)", || format!("type {ty}"))?;
    let span = bc.hobart_diagnostic().unwrap();
    let g = span.gamma;
    ensure(g.with_identity < bc.t_gamma() + 1, || format!("gamma span {} not below {}", g.with_identity, bc.t_gamma() + 1))?;
    let c6 = bc.verify_bcc().unwrap();
    ensure(!c6.get("C6").unwrap().passed, || "C6 passed".into())?;
    let (code, out, _) = cli(&["verify", data(name).to_str().unwrap()]);
    ensure(code == EXIT_VIOLATION && out.contains("DEFICIT"), || format!("verify exit {code}"))?;
    Ok(format!(
        "type {ty}, gamma span {} with I ({} without) against t_gamma+1 = {}",
        g.with_identity,
        g.without_identity,
        bc.t_gamma() + 1
    ))
}

fn dual_basis() -> Outcome {
    let mut worst = 0.0_f64;
    for name in BIPARTITE {
        let bc = bipartite(name);
        let sb = build_spectral_basis(&bc, tol()).map_err(|e| format!("{name}: {e}"))?;
        let dual = verify_dual_basis(&sb, &bc, tol());
        let suda = verify_suda_conditions(&sb, &bc, tol()).map_err(|e| format!("{name}: {e}"))?;
        ensure(dual.passed() && suda.passed(), || format!("{name}: dual basis or B1-B4 fail"))?;
        worst = worst.max(worst_residual(&dual)).max(worst_residual(&suda));
        ensure(sb.len() == bc.relation_count(), || format!("{name}: {} basis elements, {} relations", sb.len(), bc.relation_count()))?;
        let (lb, lg) = (sb.multiplicities_beta(), sb.multiplicities_gamma());
        for r in 0..=sb.t_tilde() {
            let off = (lb[r] - lb[r].round()).abs().max((lg[r] - lg[r].round()).abs());
            ensure(off <= RESIDUAL && lb[r].round() == lg[r].round(), || format!("{name}: trace L_{r} {} vs R_{r} {}", lb[r], lg[r]))?;
        }
    }
    ensure(worst <= RESIDUAL, || format!("worst residual {worst:e}"))?;
    Ok(format!("worst D1-D5/B1-B4 residual {worst:.1e} <= {RESIDUAL:e}"))
}

fn eigen_identities() -> Outcome {
    let mut worst = 0.0_f64;
    for name in BIPARTITE {
        let bc = bipartite(name);
        let sb = build_spectral_basis(&bc, tol()).unwrap();
        let es = eigenmatrices(&bc, &sb, tol()).map_err(|e| format!("{name}: {e}"))?;
        let (b, g) = (bc.beta_size() as f64, bc.gamma_size() as f64);
        let n = es.p_bg.rows();
        let pq = es.p_bg.matmul(&es.q_bg).max_abs_diff(&Matrix::identity(n).scale((b * g).sqrt()));
        ensure(check_pq_identity(&es, tol()).passed(), || format!("{name}: PQ checks fail"))?;
        worst = worst.max(pq);
        for (i, m) in bc.n().iter().enumerate() {
            let exact = m.row_sums()[0];
            ensure(m.row_sums().iter().all(|&s| s == exact), || format!("{name}: N{} not regular", i + 1))?;
            let from_p = (g / b).sqrt() * es.p_bg.get(0, i);
            worst = worst.max((from_p - exact).abs());
        }
        let mult = multiplicity_from_q(&es);
        worst = worst.max(mult.residual).max(mult.side_residual);
        for (r, l) in sb.l.iter().enumerate() {
            worst = worst.max((es.q_beta.get(0, r) - l.trace()).abs());
        }
    }
    let bc = bipartite("fano.design.json");
    let sb = build_spectral_basis(&bc, tol()).unwrap();
    let es = eigenmatrices(&bc, &sb, tol()).unwrap();
    let labels_ok = sb.labels_beta.len() == 2
        && (sb.labels_beta[0] - 9.0).abs() <= RESIDUAL
        && (sb.labels_beta[1] - 2.0).abs() <= RESIDUAL
        && (sb.multiplicities_beta()[1] - 6.0).abs() <= RESIDUAL;
    ensure(labels_ok, || format!("Fano N1 N1^T spectrum {:?}", sb.labels_beta))?;
    let s2 = 2.0_f64.sqrt();
    let expected = Matrix::from_rows(&[vec![3.0, 4.0], vec![s2, -s2]]).unwrap();
    let fano = es.p_bg.max_abs_diff(&expected);
    ensure(fano <= RESIDUAL, || format!("Fano P^beta-gamma off by {fano:e}"))?;
    ensure(worst <= RESIDUAL, || format!("worst residual {worst:e}"))?;
    Ok(format!("worst PQ/valency/multiplicity residual {worst:.1e}; Fano spectrum {{9, 2 x6}} and P^beta-gamma match"))
}

fn intersections() -> Outcome {
    let mut cells = 0;
    for name in BIPARTITE {
        let bc = bipartite(name);
        let sb = build_spectral_basis(&bc, tol()).unwrap();
        let es = eigenmatrices(&bc, &sb, tol()).unwrap();
        let formula = intersection_numbers(&bc, &es, DEFAULT_INT_TOL);
        let oracle = intersection_oracle(&bc).map_err(|e| format!("{name}: {e}"))?;
        ensure(formula.residual <= INTEGRALITY && formula.failures.is_empty(), || {
            format!("{name}: pre-rounding residual {:e}", formula.residual)
        })?;
        if let Some(d) = formula.first_disagreement(&oracle) {
            return Err(format!("{name}: formula and oracle differ at {d:?}"));
        }
        for side in [Side::Beta, Side::Gamma] {
            let t = oracle.side(side);
            for (a, b, c, v) in t.cells() {
                ensure(v >= 0.0 && v.fract() == 0.0, || format!("{name}: entry {v} at {}", t.describe(a, b, c)))?;
                if a == 0 {
                    let delta = if b == c { 1.0 } else { 0.0 };
                    ensure(v == delta, || format!("{name}: identity action fails at {}", t.describe(a, b, c)))?;
                }
                cells += 1;
            }
        }
    }
    Ok(format!("{cells} defined cells equal the integer oracle, residual <= {INTEGRALITY:e}"))
}

fn krein() -> Outcome {
    let mut worst = 0.0_f64;
    let mut least = f64::INFINITY;
    for name in BIPARTITE {
        let bc = bipartite(name);
        let sb = build_spectral_basis(&bc, tol()).unwrap();
        let es = eigenmatrices(&bc, &sb, tol()).unwrap();
        let kt = krein_parameters(&sb, &es, bc.beta_size(), bc.gamma_size(), tol());
        worst = worst.max(kt.residuals.max());
        for v in krein_feasibility(&kt, tol()) {
            ensure(v.passed && v.margin >= -RESIDUAL, || format!("{name}: {v:?}"))?;
            least = least.min(v.margin);
        }
    }
    ensure(worst <= RESIDUAL, || format!("formula/direct residual {worst:e}"))?;
    let one = |x: f64| Cube::from_nested(&[vec![vec![x]]]).unwrap();
    let synthetic = KreinTable::new(one(1.0), one(2.0), one(1.0)).unwrap();
    let caught = krein_feasibility(&synthetic, tol())
        .iter()
        .any(|v| v.condition == KreinCondition::Minor && !v.passed);
    ensure(caught, || "synthetic lambda*rho < delta^2 not flagged".into())?;
    Ok(format!("formula/direct and delta symmetry residual {worst:.1e}, least margin {least:.1e}, synthetic case fails (iii)"))
}

fn classification() -> Outcome {
    let cases = [
        ("c5.ccjson", "distance_regular"),
        ("petersen.ccjson", "distance_regular"),
        ("k23.bgr", "distance_biregular"),
        ("k13.bgr", "distance_biregular"),
        ("heawood.bgr", "distance_biregular"),
    ];
    for (name, expected) in cases {
        let (code, v) = cli_json(&["classify", data(name).to_str().unwrap()]);
        ensure(code == EXIT_PASS && v["classification"] == expected, || format!("{name}: {} (exit {code})", v["classification"]))?;
        let check = &v["polynomial"]["classification_check"];
        ensure(check["rebuild_agrees"] == true, || format!("{name}: rebuild disagrees: {}", check["mismatch"]))?;
    }
    Ok(format!("{} inputs classified, each BFS rebuild agrees", cases.len()))
}

fn consistency() -> Outcome {
    let inline = [("path4.bgr", "2 2\n0 0\n1 0\n1 1\n"), ("spider.bgr", "2 3\n0 0\n0 1\n0 2\n1 2\n")];
    let mut inputs: Vec<(String, String)> = ["k23.bgr", "k13.bgr", "p3.bgr", "heawood.bgr"]
        .iter()
        .map(|n| (n.to_string(), std::fs::read_to_string(data(n)).unwrap()))
        .collect();
    inputs.extend(inline.iter().map(|(n, t)| (n.to_string(), t.to_string())));
    let settings = Settings { tol: Tolerance::default(), int_tol: DEFAULT_INT_TOL };
    let mut worst = 0.0_f64;
    let mut positive = 0;
    for (name, text) in &inputs {
        let loaded = load_str(name, text).map_err(|e| format!("{name}: {e}"))?;
        let Source::Graph(g) = &loaded.source else { unreachable!() };
        let report = run_pipeline(&loaded, Stage::Classify, settings).map_err(|e| format!("{name}: {e}"))?;
        let certs: Vec<_> = report
            .polynomial
            .iter()
            .flat_map(|p| p.p_polynomial.iter())
            .filter_map(PPolyOutcome::certificate)
            .collect();
        let p_poly = certs.len() == 2;
        let dbrg = matches!(dbrg_sequences(g, Tolerance::default()).unwrap(), DbrgOutcome::Sequences(_));
        ensure(p_poly == dbrg, || format!("{name}: P-polynomial {p_poly}, sequences {dbrg}"))?;
        for c in certs {
            worst = worst.max(c.parity_residual());
        }
        positive += usize::from(dbrg);
    }
    ensure(worst <= RESIDUAL, || format!("parity residual {worst:e}"))?;
    Ok(format!(
        "{} graphs ({positive} distance-biregular) agree; worst nu parity residual {worst:.1e}",
        inputs.len()
    ))
}

fn determinism() -> Outcome {
    let files = [
        "k23.bgr",
        "k13.bgr",
        "p3.bgr",
        "heawood.bgr",
        "fano.design.json",
        "pair-design.design.json",
        "rook3.design.json",
        "hobart-instance.design.json",
        "c5.ccjson",
        "petersen.ccjson",
    ];
    let mut slowest = Duration::ZERO;
    for name in files {
        for format in ["text", "json"] {
            let path = data(name);
            let args = ["report", path.to_str().unwrap(), "--format", format];
            let start = Instant::now();
            let first = cli(&args);
            slowest = slowest.max(start.elapsed());
            let second = cli(&args);
            ensure(first == second, || format!("{name} ({format}) differs between runs"))?;
            ensure(first.0 != EXIT_INPUT, || format!("{name}: input error {}", first.2))?;
        }
    }
    ensure(slowest < BUDGET, || format!("slowest report took {slowest:?}"))?;
    Ok(format!("{} inputs byte-identical in text and JSON; slowest report {slowest:.2?}", files.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("axiom suite and mutation witnesses", axiom_suite),
        ("span deficit on the three-level design", hobart),
        ("dual basis and B1-B4", dual_basis),
        ("eigenmatrix identities", eigen_identities),
        ("intersection numbers against the oracle", intersections),
        ("Krein parameters and feasibility", krein),
        ("classification with rebuild cross-check", classification),
        ("P-polynomial and distance-biregular agreement", consistency),
        ("deterministic reports", determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", k + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
