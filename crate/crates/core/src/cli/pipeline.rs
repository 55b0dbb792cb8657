//! Runs the analysis stages on a loaded input and collects the report.

use serde::Serialize;

use super::formats::{Loaded, Source};
use crate::bipartite::{BipartiteConfig, SpanReport};
use crate::builders::{from_bipartite_graph, BipartiteGraph, DesignMode};
use crate::error::{Error, Result};
use crate::numerics::{Matrix, Tolerance};
use crate::parameters::{
    check_identities, check_pq_identity, eigenmatrices, multiplicity_from_q, q_projection_residual, scheme_eigenmatrices,
    EigenSystem,
};
use crate::polynomial::{
    classify, dbrg_sequences, detect_p_polynomial, detect_q_polynomial, detect_q_polynomial_table, Classification,
    DbrgOutcome, PPolyOutcome, QPolyOutcome, RowSpectrum, Verdict,
};
use crate::relations::CoherentConfig;
use crate::report::{Check, VerificationReport};
use crate::spectral::{build_spectral_basis, verify_dual_basis, verify_suda_conditions, SpectralBasis};
use crate::structureconsts::{
    intersection_numbers, intersection_oracle, krein_feasibility, krein_parameters, row_sum_residual, Cube,
    KreinCondition, KreinResiduals, KreinVerdict, Side, SideTable,
};

/// Which part of the pipeline a command asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Verify,
    Spectral,
    Params,
    Krein,
    Classify,
    Report,
}

impl Stage {
    pub fn command(self) -> &'static str {
        match self {
            Stage::Verify => "verify",
            Stage::Spectral => "spectral",
            Stage::Params => "params",
            Stage::Krein => "krein",
            Stage::Classify => "classify",
            Stage::Report => "report",
        }
    }

    fn wants(self, section: Stage) -> bool {
        self == Stage::Report || self == section
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub tol: Tolerance,
    pub int_tol: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InputSummary {
    pub name: String,
    pub format: &'static str,
    pub sha256: String,
    pub fibres: Vec<usize>,
    #[serde(rename = "type")]
    pub type_matrix: String,
    pub relations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DesignSummary {
    pub mode: DesignMode,
    pub replication: usize,
    pub block_size: usize,
    pub point_values: Vec<usize>,
    pub block_values: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationSection {
    pub axioms: VerificationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bipartite: Option<VerificationReport>,
    pub fibre_symmetric: bool,
    /// Span dimensions behind C6, present for two-fibre inputs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<SpanReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignSummary>,
}

impl VerificationSection {
    pub fn passed(&self) -> bool {
        self.axioms.passed() && self.bipartite.as_ref().is_none_or(VerificationReport::passed)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralSection {
    pub t_tilde: usize,
    pub multiplicities_beta: Vec<f64>,
    pub multiplicities_gamma: Vec<f64>,
    pub labels_beta: Vec<f64>,
    pub labels_gamma: Vec<f64>,
    pub theta: Vec<Vec<f64>>,
    pub unpinned_signs: Vec<usize>,
    pub suda: VerificationReport,
    pub dual_basis: VerificationReport,
}

impl SpectralSection {
    fn passed(&self) -> bool {
        self.suda.passed() && self.dual_basis.passed()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenSection {
    pub p_beta: Vec<Vec<f64>>,
    pub p_gamma: Vec<Vec<f64>>,
    pub p_beta_gamma: Vec<Vec<f64>>,
    pub q_beta: Vec<Vec<f64>>,
    pub q_gamma: Vec<Vec<f64>>,
    pub q_beta_gamma: Vec<Vec<f64>>,
    pub k_beta: Vec<f64>,
    pub k_gamma: Vec<f64>,
    pub k_beta_gamma: Vec<f64>,
    pub k_gamma_beta: Vec<f64>,
    pub m_beta: Vec<f64>,
    pub m_gamma: Vec<f64>,
    pub checks: VerificationReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct SchemeSection {
    pub p: Vec<Vec<f64>>,
    pub q: Vec<Vec<f64>>,
    pub valencies: Vec<f64>,
    pub multiplicities: Vec<f64>,
    pub checks: VerificationReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub product: String,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionSection {
    pub legend_beta: Vec<String>,
    pub legend_gamma: Vec<String>,
    /// Nonzero cells of ξ.
    pub xi: Vec<Cell>,
    /// Nonzero cells of σ.
    pub sigma: Vec<Cell>,
    pub formula_residual: f64,
    pub agrees_with_oracle: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disagreement: Option<String>,
    pub integrality_failures: usize,
    pub identity_action: bool,
    pub row_sum_residual: f64,
}

impl IntersectionSection {
    fn passed(&self) -> bool {
        self.agrees_with_oracle && self.integrality_failures == 0 && self.identity_action && self.row_sum_residual == 0.0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionSummary {
    pub condition: KreinCondition,
    pub checked: usize,
    pub passed: usize,
    pub worst_margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct KreinSection {
    pub lambda: Vec<Vec<Vec<f64>>>,
    pub delta: Vec<Vec<Vec<f64>>>,
    pub rho: Vec<Vec<Vec<f64>>>,
    pub residuals: KreinResiduals,
    pub residuals_pass: bool,
    pub feasible: bool,
    pub summary: Vec<ConditionSummary>,
    pub verdicts: Vec<KreinVerdict>,
}

impl KreinSection {
    fn passed(&self) -> bool {
        self.residuals_pass && self.feasible
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QBlock {
    pub block: (usize, usize),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<QPolyOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolynomialSection {
    pub p_polynomial: Vec<PPolyOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification_check: Option<Classification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dbrg_sequences: Option<DbrgOutcome>,
    pub q_polynomial: Vec<QBlock>,
    /// Per fibre of a two-fibre input: whether the Q-polynomial orderings of
    /// its within and cross blocks agree on their common idempotents.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub common_q_ordering: Vec<Option<bool>>,
    pub certificate_residual: f64,
}

impl PolynomialSection {
    fn passed(&self, tol: Tolerance) -> bool {
        self.classification_check.as_ref().is_none_or(|c| c.rebuild_agrees)
            && self.certificate_residual <= tol.eps()
            && !matches!(self.dbrg_sequences, Some(DbrgOutcome::Refuted { .. }))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: InputSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigen: Option<EigenSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intersection: Option<IntersectionSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub krein: Option<KreinSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<PolynomialSection>,
    /// Present for `classify` and `report`; null when no fibre is P-polynomial.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Option<Verdict>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
    pub verdict: &'static str,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }
}

/// Table entries below this magnitude are reported as zero, so that
/// rounding noise does not show up as tiny nonzero parameters.
const NOISE: f64 = 1e-11;

fn clean(x: f64) -> f64 {
    if x.abs() < NOISE {
        0.0
    } else {
        x
    }
}

fn clean_vec(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| clean(x)).collect()
}

pub fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|r| clean_vec(m.row(r))).collect()
}

fn cube(c: &Cube) -> Vec<Vec<Vec<f64>>> {
    (0..c.size)
        .map(|a| (0..c.size).map(|b| (0..c.size).map(|h| clean(c.get(a, b, h))).collect()).collect())
        .collect()
}

/// The configuration an input describes, with its bipartite view when it
/// has two fibres.
struct Prepared {
    cc: CoherentConfig,
    bc: Option<BipartiteConfig>,
    graph: Option<BipartiteGraph>,
    design: Option<DesignSummary>,
}

fn prepare(loaded: &Loaded) -> Result<Prepared> {
    Ok(match &loaded.source {
        Source::Config(cc) => {
            let bc = if cc.fibre_count() == 2 { Some(BipartiteConfig::from_config(cc)?) } else { None };
            Prepared { cc: cc.clone(), bc, graph: None, design: None }
        }
        Source::Design(d) => Prepared {
            cc: d.config.assemble(),
            bc: Some(d.config.clone()),
            graph: None,
            design: Some(DesignSummary {
                mode: d.mode,
                replication: d.replication,
                block_size: d.block_size,
                point_values: d.point_values.clone(),
                block_values: d.block_values.clone(),
            }),
        },
        Source::Graph(g) => {
            let bc = from_bipartite_graph(g)?;
            Prepared { cc: bc.assemble(), bc: Some(bc), graph: Some(g.clone()), design: None }
        }
    })
}

fn verification(p: &Prepared) -> Result<VerificationSection> {
    let axioms = p.cc.verify_axioms()?;
    let (bipartite, span) = match &p.bc {
        Some(bc) => (Some(bc.verify_bcc()?), Some(bc.hobart_diagnostic()?)),
        None => (None, None),
    };
    Ok(VerificationSection {
        axioms,
        bipartite,
        fibre_symmetric: p.cc.is_fibre_symmetric(),
        span,
        design: p.design.clone(),
    })
}

fn spectral_section(bc: &BipartiteConfig, sb: &SpectralBasis, tol: Tolerance) -> Result<SpectralSection> {
    Ok(SpectralSection {
        t_tilde: sb.t_tilde(),
        multiplicities_beta: clean_vec(&sb.multiplicities_beta()),
        multiplicities_gamma: clean_vec(&sb.multiplicities_gamma()),
        labels_beta: clean_vec(&sb.labels_beta),
        labels_gamma: clean_vec(&sb.labels_gamma),
        theta: sb.theta.iter().map(|t| clean_vec(t)).collect(),
        unpinned_signs: sb.unpinned_signs.clone(),
        suda: verify_suda_conditions(sb, bc, tol)?,
        dual_basis: verify_dual_basis(sb, bc, tol),
    })
}

fn eigen_section(bc: &BipartiteConfig, sb: &SpectralBasis, es: &EigenSystem, tol: Tolerance) -> EigenSection {
    let mut checks = check_pq_identity(es, tol);
    checks.extend(check_identities(es, bc, sb, tol));
    let m = multiplicity_from_q(es);
    checks.push(Check::residual("multiplicities", m.residual, tol.eps()));
    checks.push(Check::residual("multiplicity-sides", m.side_residual, tol.eps()));
    checks.push(Check::residual("Q-projection", q_projection_residual(es, bc, sb), tol.eps()));
    EigenSection {
        p_beta: rows(&es.p_beta),
        p_gamma: rows(&es.p_gamma),
        p_beta_gamma: rows(&es.p_bg),
        q_beta: rows(&es.q_beta),
        q_gamma: rows(&es.q_gamma),
        q_beta_gamma: rows(&es.q_bg),
        k_beta: es.k_beta.clone(),
        k_gamma: es.k_gamma.clone(),
        k_beta_gamma: es.k_bg.clone(),
        k_gamma_beta: es.k_gb.clone(),
        m_beta: clean_vec(&es.m_beta),
        m_gamma: clean_vec(&es.m_gamma),
        checks,
    }
}

fn nonzero_cells(t: &SideTable) -> Vec<Cell> {
    t.cells()
        .filter(|&(.., v)| v != 0.0)
        .map(|(a, b, c, value)| Cell { a, b, c, product: t.describe(a, b, c), value })
        .collect()
}

fn intersection_section(bc: &BipartiteConfig, es: &EigenSystem, int_tol: f64) -> IntersectionSection {
    let formula = intersection_numbers(bc, es, int_tol);
    let (agrees, disagreement, row_sums) = match intersection_oracle(bc) {
        Ok(oracle) => match formula.first_disagreement(&oracle) {
            None => (true, None, row_sum_residual(bc, &oracle)),
            Some((side, a, b, c, v, w)) => (
                false,
                Some(format!("{}: formula {v} against oracle {w}", formula.side(side).describe(a, b, c))),
                row_sum_residual(bc, &oracle),
            ),
        },
        Err(e) => (false, Some(e.to_string()), f64::INFINITY),
    };
    let identity_action = [Side::Beta, Side::Gamma].iter().all(|&s| {
        formula.side(s).cells().filter(|&(a, ..)| a == 0).all(|(_, b, c, v)| v == if b == c { 1.0 } else { 0.0 })
    });
    IntersectionSection {
        legend_beta: formula.xi.legend.clone(),
        legend_gamma: formula.sigma.legend.clone(),
        xi: nonzero_cells(&formula.xi),
        sigma: nonzero_cells(&formula.sigma),
        formula_residual: formula.residual,
        agrees_with_oracle: agrees,
        disagreement,
        integrality_failures: formula.failures.len(),
        identity_action,
        row_sum_residual: row_sums,
    }
}

fn krein_section(bc: &BipartiteConfig, sb: &SpectralBasis, es: &EigenSystem, tol: Tolerance) -> KreinSection {
    let kt = krein_parameters(sb, es, bc.beta_size(), bc.gamma_size(), tol);
    let verdicts = krein_feasibility(&kt, tol);
    let summary = [KreinCondition::Lambda, KreinCondition::Rho, KreinCondition::Minor]
        .into_iter()
        .map(|condition| {
            let of: Vec<&KreinVerdict> = verdicts.iter().filter(|v| v.condition == condition).collect();
            ConditionSummary {
                condition,
                checked: of.len(),
                passed: of.iter().filter(|v| v.passed).count(),
                worst_margin: of.iter().map(|v| v.margin).fold(f64::INFINITY, f64::min),
            }
        })
        .collect();
    KreinSection {
        lambda: cube(&kt.lambda),
        delta: cube(&kt.delta),
        rho: cube(&kt.rho),
        residuals_pass: kt.residuals.max() <= tol.eps(),
        residuals: kt.residuals,
        feasible: verdicts.iter().all(|v| v.passed),
        summary,
        verdicts,
    }
}

fn certificate_residual(outcomes: &[PPolyOutcome]) -> f64 {
    outcomes.iter().filter_map(PPolyOutcome::certificate).fold(0.0_f64, |a, c| a.max(c.residual))
}

fn first_classification(cc: &CoherentConfig, outcomes: &[PPolyOutcome]) -> Result<Option<Classification>> {
    match outcomes.iter().find_map(PPolyOutcome::certificate) {
        Some(cert) => Ok(Some(classify(cc, cert)?)),
        None => Ok(None),
    }
}

fn q_block(block: (usize, usize), r: Result<QPolyOutcome>) -> QBlock {
    match r {
        Ok(outcome) => QBlock { block, outcome: Some(outcome), error: None },
        Err(e) => QBlock { block, outcome: None, error: Some(e.to_string()) },
    }
}

/// Whether the cross-block ordering is the within-block ordering restricted
/// to the idempotents both blocks share.
fn common_ordering(within: &QBlock, cross: &QBlock, shared: usize) -> Option<bool> {
    let w = within.outcome.as_ref()?.certificate()?;
    let c = cross.outcome.as_ref()?.certificate()?;
    let restricted: Vec<usize> = w.ordering.iter().copied().filter(|&e| e < shared).collect();
    Some(restricted == c.ordering)
}

fn bipartite_polynomial(p: &Prepared, es: &EigenSystem, tol: Tolerance) -> Result<PolynomialSection> {
    let p_polynomial: Vec<PPolyOutcome> = [Side::Beta, Side::Gamma]
        .into_iter()
        .map(|side| detect_p_polynomial(&RowSpectrum::from_bipartite(es, side), tol))
        .collect();
    let classification_check = first_classification(&p.cc, &p_polynomial)?;
    let dbrg = match &classification_check {
        Some(c) if c.verdict == Verdict::DistanceBiregular => {
            let graph = match (&p.graph, c.adjacency.source) {
                (Some(g), _) => g.clone(),
                (None, 0) => BipartiteGraph::from_biadjacency(&p.cc.relation(c.adjacency).expect("certified relation").matrix)?,
                (None, _) => BipartiteGraph::from_biadjacency(
                    &p.cc.relation(c.adjacency).expect("certified relation").matrix.transpose(),
                )?,
            };
            Some(dbrg_sequences(&graph, tol)?)
        }
        _ => None,
    };
    let q_polynomial: Vec<QBlock> =
        [(0, 0), (0, 1), (1, 1)].into_iter().map(|blk| q_block(blk, detect_q_polynomial(es, blk, tol))).collect();
    let shared = es.t_tilde() + 1;
    let common_q_ordering = vec![
        common_ordering(&q_polynomial[0], &q_polynomial[1], shared),
        common_ordering(&q_polynomial[2], &q_polynomial[1], shared),
    ];
    Ok(PolynomialSection {
        certificate_residual: certificate_residual(&p_polynomial),
        p_polynomial,
        classification_check,
        dbrg_sequences: dbrg,
        q_polynomial,
        common_q_ordering,
    })
}

fn empty_report(loaded: &Loaded, p: Option<&Prepared>, stage: Stage) -> Report {
    let (fibres, type_matrix, relations) = match p {
        Some(p) => (p.cc.fibres().sizes().to_vec(), p.cc.type_of().to_string(), p.cc.relations().len()),
        None => (Vec::new(), String::new(), 0),
    };
    Report {
        tool: "cc-lab",
        version: env!("CARGO_PKG_VERSION"),
        command: stage.command(),
        input: InputSummary {
            name: loaded.name.clone(),
            format: loaded.format.name(),
            sha256: loaded.digest.clone(),
            fibres,
            type_matrix,
            relations,
        },
        verification: None,
        spectral: None,
        eigen: None,
        scheme: None,
        intersection: None,
        krein: None,
        polynomial: None,
        classification: None,
        errors: Vec::new(),
        verdict: "pass",
    }
}

/// Runs the stages needed for `stage` and returns the report. Errors are
/// input problems (or sizes the tool does not handle); mathematical
/// failures are recorded in the report and turn its verdict to `fail`.
pub fn run_pipeline(loaded: &Loaded, stage: Stage, settings: Settings) -> Result<Report> {
    let tol = settings.tol;
    let p = prepare(loaded)?;
    let mut report = empty_report(loaded, Some(&p), stage);
    let mut ok = true;

    let ver = verification(&p)?;
    let verified = ver.passed();
    ok &= verified;
    if stage.wants(Stage::Verify) || !verified {
        report.verification = Some(ver);
    }
    if stage == Stage::Verify || !verified {
        report.verdict = if ok { "pass" } else { "fail" };
        return Ok(report);
    }
    if matches!(stage, Stage::Classify | Stage::Report) {
        report.classification = Some(None);
    }

    match (&p.bc, p.cc.fibre_count()) {
        (Some(bc), _) => {
            let sb = match build_spectral_basis(bc, tol) {
                Ok(sb) => sb,
                Err(e) => {
                    report.errors.push(format!("spectral basis: {e}"));
                    report.verdict = "fail";
                    return Ok(report);
                }
            };
            if stage.wants(Stage::Spectral) {
                let s = spectral_section(bc, &sb, tol)?;
                ok &= s.passed();
                report.spectral = Some(s);
            }
            if stage == Stage::Spectral {
                report.verdict = if ok { "pass" } else { "fail" };
                return Ok(report);
            }
            let es = match eigenmatrices(bc, &sb, tol) {
                Ok(es) => es,
                Err(e) => {
                    report.errors.push(format!("eigenmatrices: {e}"));
                    report.verdict = "fail";
                    return Ok(report);
                }
            };
            if stage.wants(Stage::Params) {
                let e = eigen_section(bc, &sb, &es, tol);
                ok &= e.checks.passed();
                report.eigen = Some(e);
            }
            if stage == Stage::Report {
                let i = intersection_section(bc, &es, settings.int_tol);
                ok &= i.passed();
                report.intersection = Some(i);
            }
            if stage.wants(Stage::Krein) {
                let k = krein_section(bc, &sb, &es, tol);
                ok &= k.passed();
                report.krein = Some(k);
            }
            if stage.wants(Stage::Classify) {
                let poly = bipartite_polynomial(&p, &es, tol)?;
                ok &= poly.passed(tol);
                report.classification = Some(poly.classification_check.as_ref().map(|c| c.verdict));
                report.polynomial = Some(poly);
            }
        }
        (None, 1) => {
            if matches!(stage, Stage::Spectral | Stage::Krein) {
                return Err(Error::Unsupported(format!(
                    "`{}` needs a two-fibre configuration; this input has one fibre",
                    stage.command()
                )));
            }
            let se = scheme_eigenmatrices(&p.cc, tol)?;
            if stage.wants(Stage::Params) {
                let n = se.order as f64;
                let pq = se.p.matmul(&se.q).max_abs_diff(&Matrix::identity(se.p.rows()).scale(n));
                let mut checks = VerificationReport::default();
                checks.push(Check::residual("PQ", pq, tol.eps()));
                ok &= checks.passed();
                report.scheme = Some(SchemeSection {
                    p: rows(&se.p),
                    q: rows(&se.q),
                    valencies: se.valencies.clone(),
                    multiplicities: clean_vec(&se.multiplicities),
                    checks,
                });
            }
            if stage.wants(Stage::Classify) {
                let outcomes = vec![detect_p_polynomial(&RowSpectrum::from_scheme(&p.cc, &se), tol)];
                let classification_check = first_classification(&p.cc, &outcomes)?;
                let poly = PolynomialSection {
                    certificate_residual: certificate_residual(&outcomes),
                    p_polynomial: outcomes,
                    classification_check,
                    dbrg_sequences: None,
                    q_polynomial: vec![q_block((0, 0), detect_q_polynomial_table(&se.q, (0, 0), tol))],
                    common_q_ordering: Vec::new(),
                };
                ok &= poly.passed(tol);
                report.classification = Some(poly.classification_check.as_ref().map(|c| c.verdict));
                report.polynomial = Some(poly);
            }
        }
        (None, n) => {
            return Err(Error::Unsupported(format!(
                "`{}` handles one or two fibres; this input has {n}",
                stage.command()
            )));
        }
    }
    report.verdict = if ok { "pass" } else { "fail" };
    Ok(report)
}
