//! Text and JSON renderings of a [`Report`].

use serde_json::Value;
use std::fmt::Write;

use super::pipeline::{Cell, Report};
use crate::numerics::round_sig;
use crate::polynomial::{DbrgOutcome, PPolyOutcome, QPolyOutcome};

/// Significant digits kept for every floating value in the output.
pub const DIGITS: i32 = 12;

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(0.0), DIGITS);
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

pub fn json(report: &Report) -> String {
    let mut value = serde_json::to_value(report).expect("reports serialize");
    round_value(&mut value);
    let mut out = serde_json::to_string_pretty(&value).expect("values serialize");
    out.push('\n');
    out
}

fn num(x: f64) -> String {
    let r = round_sig(x, DIGITS);
    if r != 0.0 && (r.abs() < 1e-4 || r.abs() >= 1e12) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

fn list(v: &[f64]) -> String {
    format!("[{}]", v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", "))
}

fn table(out: &mut String, name: &str, rows: &[Vec<f64>]) {
    let _ = writeln!(out, "  {name}:");
    for r in rows {
        let _ = writeln!(out, "    {}", list(r));
    }
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("  {l}\n")).collect()
}

fn cells(out: &mut String, name: &str, cells: &[Cell]) {
    let _ = writeln!(out, "  {name} (nonzero cells):");
    for c in cells {
        let _ = writeln!(out, "    [{},{},{}] {:<18} {}", c.a, c.b, c.c, c.product, num(c.value));
    }
}

pub fn text(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", report.tool, report.version, report.command);
    let i = &report.input;
    let _ = writeln!(out, "input: {} ({}) sha256 {}", i.name, i.format, i.sha256);
    let _ = writeln!(out, "fibres: {:?}  type: {}  relations: {}", i.fibres, i.type_matrix, i.relations);

    if let Some(v) = &report.verification {
        let _ = writeln!(out, "\nverification");
        out.push_str(&indent(&v.axioms.to_string()));
        if let Some(b) = &v.bipartite {
            out.push_str(&indent(&b.to_string()));
        }
        let _ = writeln!(out, "  fibre symmetric: {}", if v.fibre_symmetric { "yes" } else { "no" });
        if let Some(s) = &v.span {
            for (name, side) in [("beta", &s.beta), ("gamma", &s.gamma)] {
                let _ = writeln!(
                    out,
                    "  span {name}: cross products {} (with I {}), within {}, joint {}, required {}{}",
                    side.without_identity,
                    side.with_identity,
                    side.target,
                    side.joint,
                    side.required,
                    if side.deficit() { "  DEFICIT" } else { "" }
                );
            }
        }
        if let Some(d) = &v.design {
            let _ = writeln!(
                out,
                "  design: mode {}, replication {}, block size {}, point values {:?}, block values {:?}",
                d.mode.name(), d.replication, d.block_size, d.point_values, d.block_values
            );
        }
    }

    if let Some(s) = &report.spectral {
        let _ = writeln!(out, "\nspectral basis");
        let _ = writeln!(out, "  pairs: {}", s.t_tilde + 1);
        let _ = writeln!(out, "  multiplicities beta: {}", list(&s.multiplicities_beta));
        let _ = writeln!(out, "  multiplicities gamma: {}", list(&s.multiplicities_gamma));
        let _ = writeln!(out, "  N1 N1^T eigenvalues: {}", list(&s.labels_beta));
        let _ = writeln!(out, "  N1^T N1 eigenvalues: {}", list(&s.labels_gamma));
        table(&mut out, "theta", &s.theta);
        if !s.unpinned_signs.is_empty() {
            let _ = writeln!(out, "  unpinned signs: {:?}", s.unpinned_signs);
        }
        out.push_str(&indent(&s.suda.to_string()));
        out.push_str(&indent(&s.dual_basis.to_string()));
    }

    if let Some(e) = &report.eigen {
        let _ = writeln!(out, "\neigenmatrices");
        table(&mut out, "P^beta", &e.p_beta);
        table(&mut out, "P^gamma", &e.p_gamma);
        table(&mut out, "P^beta-gamma", &e.p_beta_gamma);
        table(&mut out, "Q^beta", &e.q_beta);
        table(&mut out, "Q^gamma", &e.q_gamma);
        table(&mut out, "Q^beta-gamma", &e.q_beta_gamma);
        let _ = writeln!(out, "  valencies beta: {}  gamma: {}", list(&e.k_beta), list(&e.k_gamma));
        let _ = writeln!(out, "  valencies beta-gamma: {}  gamma-beta: {}", list(&e.k_beta_gamma), list(&e.k_gamma_beta));
        let _ = writeln!(out, "  multiplicities beta: {}  gamma: {}", list(&e.m_beta), list(&e.m_gamma));
        out.push_str(&indent(&e.checks.to_string()));
    }

    if let Some(s) = &report.scheme {
        let _ = writeln!(out, "\neigenmatrices");
        table(&mut out, "P", &s.p);
        table(&mut out, "Q", &s.q);
        let _ = writeln!(out, "  valencies: {}", list(&s.valencies));
        let _ = writeln!(out, "  multiplicities: {}", list(&s.multiplicities));
        out.push_str(&indent(&s.checks.to_string()));
    }

    if let Some(x) = &report.intersection {
        let _ = writeln!(out, "\nintersection numbers");
        let _ = writeln!(out, "  legend beta: {}", x.legend_beta.join(" "));
        let _ = writeln!(out, "  legend gamma: {}", x.legend_gamma.join(" "));
        cells(&mut out, "xi", &x.xi);
        cells(&mut out, "sigma", &x.sigma);
        let _ = writeln!(out, "  formula residual {:.3e}", x.formula_residual);
        let _ = writeln!(out, "  agrees with oracle: {}", if x.agrees_with_oracle { "yes" } else { "no" });
        if let Some(d) = &x.disagreement {
            let _ = writeln!(out, "  disagreement: {d}");
        }
        let _ = writeln!(out, "  integrality failures: {}", x.integrality_failures);
        let _ = writeln!(out, "  identity action: {}", if x.identity_action { "yes" } else { "no" });
        let _ = writeln!(out, "  row-sum residual: {}", num(x.row_sum_residual));
    }

    if let Some(k) = &report.krein {
        let _ = writeln!(out, "\nkrein parameters");
        for (name, c) in [("lambda", &k.lambda), ("delta", &k.delta), ("rho", &k.rho)] {
            let _ = writeln!(out, "  {name}:");
            for (i, plane) in c.iter().enumerate() {
                for (j, row) in plane.iter().enumerate() {
                    let _ = writeln!(out, "    ({i},{j}) {}", list(row));
                }
            }
        }
        let r = &k.residuals;
        let _ = writeln!(
            out,
            "  residuals: lambda {:.3e}, delta {:.3e}, rho {:.3e}, delta symmetry {:.3e}",
            r.lambda, r.delta, r.rho, r.delta_symmetry
        );
        for s in &k.summary {
            let _ = writeln!(
                out,
                "  {:?}: {}/{} pass, worst margin {}",
                s.condition,
                s.passed,
                s.checked,
                num(s.worst_margin)
            );
        }
        for v in k.verdicts.iter().filter(|v| !v.passed) {
            let _ = writeln!(out, "  FAIL {:?} ({},{},{}) margin {}", v.condition, v.i, v.j, v.h, num(v.margin));
        }
        let _ = writeln!(out, "  feasibility: {}", if k.feasible { "pass" } else { "fail" });
    }

    if let Some(p) = &report.polynomial {
        let _ = writeln!(out, "\npolynomial structure");
        for o in &p.p_polynomial {
            match o {
                PPolyOutcome::Certificate(c) => {
                    let order: Vec<String> = c.ordering.iter().map(ToString::to_string).collect();
                    let _ = writeln!(out, "  fibre {}: P-polynomial, ordering {}", c.fibre, order.join(" "));
                    let _ = writeln!(out, "    theta {}", list(&c.theta));
                    for (h, nu) in c.nu.iter().enumerate() {
                        let pad = if c.padded[h] { "  (padded)" } else { "" };
                        let _ = writeln!(out, "    nu{h}(x) = {nu}{pad}");
                    }
                }
                PPolyOutcome::Refuted { fibre, candidates } => {
                    let _ = writeln!(out, "  fibre {fibre}: not P-polynomial");
                    for c in candidates {
                        let _ = writeln!(out, "    M1 = {}: stuck at step {}: {}", c.candidate, c.step, c.reason);
                    }
                }
            }
        }
        if let Some(c) = &p.classification_check {
            let _ = writeln!(
                out,
                "  rebuild from {}: {}",
                c.adjacency,
                if c.rebuild_agrees { "agrees" } else { "DISAGREES" }
            );
            if let Some(m) = &c.mismatch {
                let _ = writeln!(out, "    {m}");
            }
        }
        match &p.dbrg_sequences {
            Some(DbrgOutcome::Sequences(s)) => {
                let _ = writeln!(out, "  distance-biregular sequences (diameter {}):", s.diameter);
                for (name, seq) in [("P^beta", &s.p_beta), ("I^beta", &s.i_beta), ("P^gamma", &s.p_gamma), ("I^gamma", &s.i_gamma)] {
                    for (k, poly) in seq.iter().enumerate() {
                        let _ = writeln!(out, "    {name}_{k}(x) = {poly}");
                    }
                }
            }
            Some(DbrgOutcome::Refuted { family, index, reason }) => {
                let _ = writeln!(out, "  distance-biregular sequences fail at {family}_{index}: {reason}");
            }
            None => {}
        }
        for q in &p.q_polynomial {
            let (a, b) = q.block;
            match (&q.outcome, &q.error) {
                (Some(QPolyOutcome::Certificate(c)), _) => {
                    let polys: Vec<String> = c.nubar.iter().map(ToString::to_string).collect();
                    let _ = writeln!(out, "  block ({a},{b}): Q-polynomial, ordering {:?}, nubar [{}]", c.ordering, polys.join("; "));
                }
                (Some(QPolyOutcome::Refuted { .. }), _) => {
                    let _ = writeln!(out, "  block ({a},{b}): not Q-polynomial");
                }
                (None, Some(e)) => {
                    let _ = writeln!(out, "  block ({a},{b}): {e}");
                }
                (None, None) => {}
            }
        }
        for (f, c) in p.common_q_ordering.iter().enumerate() {
            let text = match c {
                Some(true) => "yes",
                Some(false) => "no",
                None => "n/a",
            };
            let _ = writeln!(out, "  common Q ordering in fibre {f}: {text}");
        }
    }

    if let Some(c) = &report.classification {
        let _ = writeln!(out, "\nclassification: {}", c.map_or("none".to_string(), |v| v.to_string()));
    }
    for e in &report.errors {
        let _ = writeln!(out, "error: {e}");
    }
    let _ = writeln!(out, "verdict: {}", report.verdict);
    out
}
