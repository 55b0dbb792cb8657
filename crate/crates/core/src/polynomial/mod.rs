//! P- and Q-polynomial detection, classification of the polynomial
//! orderings as distance-regular or distance-biregular, and the
//! distance-biregular polynomial sequences of a bipartite graph.

mod interp;

pub use interp::{annihilator, divided_differences, interpolate_degree, minimal_interpolant, Poly};

use serde::Serialize;
use std::collections::BTreeSet;

use crate::bipartite::BipartiteConfig;
use crate::builders::{distance_matrices, from_bipartite_graph, BipartiteGraph, Graph};
use crate::error::{Error, Result};
use crate::numerics::{cluster_values, sym_eigen, Matrix, Tolerance};
use crate::parameters::{eigenmatrices, scheme_eigenmatrices, EigenSystem, SchemeEigen};
use crate::relations::{CoherentConfig, RelationId};
use crate::spectral::build_spectral_basis;
use crate::structureconsts::Side;

/// Largest number of idempotents the Q-polynomial search accepts.
pub const Q_SEARCH_LIMIT: usize = 9;

/// A point at which every relation of one row has an eigenvalue: the
/// idempotent `r` of the row, with the sign of the spectral pair it came
/// from (`0` for idempotents of a one-fibre scheme and for kernel parts).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralPoint {
    pub idempotent: usize,
    pub sign: i8,
}

/// Eigenvalues of the relations leaving one fibre.
///
/// For two fibres each spectral pair `r <= t̃` gives the points `(r, +)` and
/// `(r, -)`: a within-fibre relation takes `P_{r,h}` at both, a cross
/// relation `±P^{βγ}_{r,h}`. Kernel idempotents give a single point on
/// which cross relations vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct RowSpectrum {
    pub fibre: usize,
    pub relations: Vec<RelationId>,
    pub points: Vec<SpectralPoint>,
    /// `values[point][relation]`.
    pub values: Matrix,
    /// Number of idempotents of the fibre.
    pub idempotents: usize,
    /// Eigenvalue of each relation on each idempotent, zero-padded past `t̃`.
    pub table: Matrix,
    pub two_fibre: bool,
}

impl RowSpectrum {
    /// From the eigenmatrix of a one-fibre scheme.
    pub fn from_scheme(cc: &CoherentConfig, se: &SchemeEigen) -> Self {
        let relations: Vec<RelationId> = cc.relations().iter().map(|r| r.id).collect();
        let n = se.p.rows();
        RowSpectrum {
            fibre: 0,
            relations,
            points: (0..n).map(|r| SpectralPoint { idempotent: r, sign: 0 }).collect(),
            values: se.p.clone(),
            idempotents: n,
            table: se.p.clone(),
            two_fibre: false,
        }
    }

    /// From the eigenmatrices of a bipartite configuration, rooted at `side`.
    pub fn from_bipartite(es: &EigenSystem, side: Side) -> Self {
        let (fibre, other, p_within) = match side {
            Side::Beta => (0, 1, &es.p_beta),
            Side::Gamma => (1, 0, &es.p_gamma),
        };
        let within = p_within.cols();
        let cross = es.p_bg.cols();
        let t_tilde = es.t_tilde();
        let mut relations: Vec<RelationId> = (0..within).map(|k| RelationId::new(fibre, fibre, k)).collect();
        relations.extend((1..=cross).map(|k| RelationId::new(fibre, other, k)));
        relations.sort();

        let idempotents = p_within.rows();
        let table = Matrix::from_fn(idempotents, relations.len(), |r, c| {
            let id = relations[c];
            if id.target == fibre {
                p_within.get(r, id.index)
            } else if r <= t_tilde {
                es.p_bg.get(r, id.index - 1)
            } else {
                0.0
            }
        });
        let mut points = Vec::new();
        for r in 0..idempotents {
            if r <= t_tilde {
                points.push(SpectralPoint { idempotent: r, sign: 1 });
                points.push(SpectralPoint { idempotent: r, sign: -1 });
            } else {
                points.push(SpectralPoint { idempotent: r, sign: 0 });
            }
        }
        let values = Matrix::from_fn(points.len(), relations.len(), |p, c| {
            let pt = points[p];
            let v = table.get(pt.idempotent, c);
            if relations[c].target != fibre && pt.sign < 0 {
                -v
            } else {
                v
            }
        });
        RowSpectrum { fibre, relations, points, values, idempotents, table, two_fibre: true }
    }

    /// Computes the row spectrum of fibre `fibre` of a one- or two-fibre
    /// configuration.
    pub fn compute(cc: &CoherentConfig, fibre: usize, tol: Tolerance) -> Result<Self> {
        match cc.fibre_count() {
            1 if fibre == 0 => Ok(RowSpectrum::from_scheme(cc, &scheme_eigenmatrices(cc, tol)?)),
            2 if fibre < 2 => {
                let bc = BipartiteConfig::from_config(cc)?;
                let sb = build_spectral_basis(&bc, tol)?;
                let es = eigenmatrices(&bc, &sb, tol)?;
                let side = if fibre == 0 { Side::Beta } else { Side::Gamma };
                Ok(RowSpectrum::from_bipartite(&es, side))
            }
            n => Err(Error::Unsupported(format!(
                "row spectra need one or two fibres (fibre {fibre} of a {n}-fibre configuration)"
            ))),
        }
    }

    fn column(&self, c: usize) -> Vec<f64> {
        (0..self.points.len()).map(|p| self.values.get(p, c)).collect()
    }

    fn identity_column(&self) -> usize {
        self.relations
            .iter()
            .position(|id| id.is_identity())
            .expect("every row holds the identity of its fibre")
    }
}

/// Witness that the relations of one row form a P-polynomial ordering.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PPolyCertificate {
    pub fibre: usize,
    pub ordering: Vec<RelationId>,
    /// `θ_r`: eigenvalue of `M_1` on each idempotent of the fibre.
    pub theta: Vec<f64>,
    /// The points the polynomials are evaluated at (`±θ_r` for two fibres).
    pub points: Vec<f64>,
    pub nu: Vec<Poly>,
    /// Which `ν_h` were padded with the annihilator of the points.
    pub padded: Vec<bool>,
    /// `max |ν_h(point) - value|` over every point and step.
    pub residual: f64,
}

impl PPolyCertificate {
    /// Largest coefficient of the wrong parity, `ν_h` being expected to
    /// contain only powers of the parity of `h`.
    pub fn parity_residual(&self) -> f64 {
        self.nu.iter().enumerate().fold(0.0_f64, |acc, (h, p)| acc.max(p.parity_defect(h)))
    }
}

/// Why one candidate for `M_1` did not lead to an ordering.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateFailure {
    pub candidate: RelationId,
    /// First step at which no relation could be placed.
    pub step: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PPolyOutcome {
    Certificate(PPolyCertificate),
    Refuted { fibre: usize, candidates: Vec<CandidateFailure> },
}

impl PPolyOutcome {
    pub fn certificate(&self) -> Option<&PPolyCertificate> {
        match self {
            PPolyOutcome::Certificate(c) => Some(c),
            PPolyOutcome::Refuted { .. } => None,
        }
    }
}

fn fit_bound(ys: &[f64], tol: Tolerance) -> f64 {
    tol.eps() * (1.0 + ys.iter().fold(0.0_f64, |a, y| a.max(y.abs())))
}

/// Values of a relation on each θ cluster, or `None` when it is not constant
/// on some cluster and so cannot be a polynomial in θ.
fn cluster_column(column: &[f64], clusters: &[(f64, Vec<usize>)], tol: Tolerance) -> Option<Vec<f64>> {
    let bound = fit_bound(column, tol);
    clusters
        .iter()
        .map(|(_, members)| {
            let mean = members.iter().map(|&p| column[p]).sum::<f64>() / members.len() as f64;
            members.iter().all(|&p| (column[p] - mean).abs() <= bound).then_some(mean)
        })
        .collect()
}

/// Depth-first search for an ordering; `columns[c]` holds the cluster values
/// of relation `c` (`None` when inconsistent). Returns the ordering with its
/// polynomials, or the deepest step at which it got stuck.
fn search(
    xs: &[f64],
    columns: &[Option<Vec<f64>>],
    placed: &mut Vec<(usize, Poly, bool)>,
    total: usize,
    tol: Tolerance,
    deepest: &mut usize,
) -> bool {
    let h = placed.len();
    if h == total {
        return true;
    }
    *deepest = (*deepest).max(h);
    let used: BTreeSet<usize> = placed.iter().map(|(c, ..)| *c).collect();
    let mut options = Vec::new();
    for (c, col) in columns.iter().enumerate() {
        if used.contains(&c) {
            continue;
        }
        if let Some(ys) = col {
            if let Some((p, padded)) = interpolate_degree(xs, ys, h, fit_bound(ys, tol)) {
                options.push((c, p, padded));
            }
        }
    }
    // Past the number of nodes every consistent relation qualifies and any
    // order of the remainder works, so no branching is needed.
    let saturated = h >= xs.len();
    for (c, p, padded) in options {
        placed.push((c, p, padded));
        if search(xs, columns, placed, total, tol, deepest) {
            return true;
        }
        placed.pop();
        if saturated {
            break;
        }
    }
    false
}

/// Searches for an ordering `M_0 = I, M_1, ..., M_t` of the relations in the
/// row with polynomials `ν_h` of degree `h` such that `ν_h(θ) = P_{·,h}`.
///
/// Candidates for `M_1` are tried in `(block, index)` order; the first that
/// completes gives the certificate.
pub fn detect_p_polynomial(rs: &RowSpectrum, tol: Tolerance) -> PPolyOutcome {
    let identity = rs.identity_column();
    let total = rs.relations.len();
    let mut failures = Vec::new();
    for cand in 0..total {
        if cand == identity {
            continue;
        }
        let theta_points = rs.column(cand);
        let clusters = cluster_values(&theta_points, tol);
        let xs: Vec<f64> = clusters.iter().map(|(v, _)| *v).collect();
        let columns: Vec<Option<Vec<f64>>> =
            (0..total).map(|c| cluster_column(&rs.column(c), &clusters, tol)).collect();

        let mut placed = vec![(identity, Poly::constant(1.0), false)];
        let mut deepest = 1;
        let (p1, pad1) = interpolate_degree(&xs, &xs, 1, fit_bound(&xs, tol)).expect("θ is linear in itself");
        placed.push((cand, p1, pad1));
        if !search(&xs, &columns, &mut placed, total, tol, &mut deepest) {
            let stuck = columns.iter().enumerate().filter(|(_, c)| c.is_none()).map(|(c, _)| rs.relations[c].to_string());
            let stuck: Vec<String> = stuck.collect();
            let reason = if stuck.is_empty() {
                format!("no relation has a degree-{deepest} polynomial in θ")
            } else {
                format!("{} not constant on the θ clusters", stuck.join(", "))
            };
            failures.push(CandidateFailure { candidate: rs.relations[cand], step: deepest, reason });
            continue;
        }

        let mut residual = 0.0_f64;
        for (c, p, _) in &placed {
            for (k, &x) in theta_points.iter().enumerate() {
                residual = residual.max((p.eval(x) - rs.values.get(k, *c)).abs());
            }
        }
        return PPolyOutcome::Certificate(PPolyCertificate {
            fibre: rs.fibre,
            ordering: placed.iter().map(|(c, ..)| rs.relations[*c]).collect(),
            theta: (0..rs.idempotents).map(|r| rs.table.get(r, cand)).collect(),
            points: theta_points,
            padded: placed.iter().map(|(.., pad)| *pad).collect(),
            nu: placed.into_iter().map(|(_, p, _)| p).collect(),
            residual,
        });
    }
    PPolyOutcome::Refuted { fibre: rs.fibre, candidates: failures }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    DistanceRegular,
    DistanceBiregular,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::DistanceRegular => "distance_regular",
            Verdict::DistanceBiregular => "distance_biregular",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    /// The relation playing the role of the adjacency matrix.
    pub adjacency: RelationId,
    /// Whether the distance partition of the adjacency reproduces every
    /// relation of the configuration.
    pub rebuild_agrees: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<String>,
}

fn matrix_of(cc: &CoherentConfig, id: RelationId) -> Result<&Matrix> {
    cc.relation(id)
        .map(|r| &r.matrix)
        .ok_or_else(|| Error::Inconsistent(format!("certificate names missing relation {id}")))
}

/// Compares two relation families as sets of matrices.
fn same_family(a: &[&Matrix], b: &[Matrix]) -> bool {
    a.len() == b.len() && a.iter().all(|m| b.iter().any(|n| n == *m))
}

/// Reads a certificate's ordering as a distance-regular or distance-biregular
/// graph and checks it against a rebuild from the distance partition.
pub fn classify(cc: &CoherentConfig, cert: &PPolyCertificate) -> Result<Classification> {
    let i = cert.fibre;
    let shape_error = || Error::Inconsistent(format!("ordering {:?} is neither one- nor two-fibre", cert.ordering));
    let first = *cert.ordering.get(1).ok_or_else(shape_error)?;
    let adjacency = matrix_of(cc, first)?;

    if cc.fibre_count() == 1 && first.block() == (i, i) {
        let rebuilt = distance_matrices(&Graph::from_adjacency(adjacency)?)?;
        let mut mismatch = None;
        if rebuilt.len() != cert.ordering.len() {
            mismatch = Some(format!("distance partition has {} classes, ordering has {}", rebuilt.len(), cert.ordering.len()));
        } else {
            for (h, id) in cert.ordering.iter().enumerate() {
                if matrix_of(cc, *id)? != &rebuilt[h] {
                    mismatch = Some(format!("{id} is not the distance-{h} relation"));
                    break;
                }
            }
        }
        return Ok(Classification {
            verdict: Verdict::DistanceRegular,
            adjacency: first,
            rebuild_agrees: mismatch.is_none(),
            mismatch,
        });
    }

    let other = 1 - i.min(1);
    let alternates = cc.fibre_count() == 2
        && first.block() == (i, other)
        && cert.ordering.iter().enumerate().all(|(h, id)| id.block() == if h % 2 == 0 { (i, i) } else { (i, other) });
    if !alternates {
        return Err(shape_error());
    }
    let rebuilt = from_bipartite_graph(&BipartiteGraph::from_biadjacency(adjacency)?)?;
    let mut mismatch = None;
    let expected: Vec<&Matrix> = (0..cert.ordering.len())
        .filter_map(|h| if h % 2 == 0 { rebuilt.x().get(h / 2) } else { rebuilt.n().get(h / 2) })
        .collect();
    if expected.len() != cert.ordering.len() || rebuilt.x().len() + rebuilt.n().len() != cert.ordering.len() {
        mismatch = Some(format!(
            "distance partition has {} classes from the root fibre, ordering has {}",
            rebuilt.x().len() + rebuilt.n().len(),
            cert.ordering.len()
        ));
    } else {
        for (h, id) in cert.ordering.iter().enumerate() {
            if matrix_of(cc, *id)? != expected[h] {
                mismatch = Some(format!("{id} is not the distance-{h} relation"));
                break;
            }
        }
    }
    if mismatch.is_none() {
        let within = cc.block_matrices(other, other);
        let back = cc.block_matrices(other, i);
        let back_rebuilt: Vec<Matrix> = rebuilt.n().iter().map(Matrix::transpose).collect();
        if !same_family(&within, rebuilt.y()) {
            mismatch = Some(format!("relations inside fibre {other} differ from the distance partition"));
        } else if !same_family(&back, &back_rebuilt) {
            mismatch = Some(format!("relations from fibre {other} differ from the distance partition"));
        }
    }
    Ok(Classification {
        verdict: Verdict::DistanceBiregular,
        adjacency: first,
        rebuild_agrees: mismatch.is_none(),
        mismatch,
    })
}

/// The four polynomial sequences of a distance-biregular graph.
///
/// `p_beta[i](N₁N₁ᵀ) = X_i` and `i_beta[i](N₁N₁ᵀ) N₁ = N_{i+1}`, each of
/// degree `i`; the γ sequences use `N₁ᵀN₁`, `Y_i` and `N_{i+1}ᵀ`. Targets
/// past the eccentricity of a fibre are zero matrices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DbrgSequences {
    pub diameter: usize,
    pub p_beta: Vec<Poly>,
    pub i_beta: Vec<Poly>,
    pub p_gamma: Vec<Poly>,
    pub i_gamma: Vec<Poly>,
    /// Largest matrix residual over every identity.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DbrgOutcome {
    Sequences(DbrgSequences),
    Refuted { family: String, index: usize, reason: String },
}

/// One side of the sequences: `gram = N Nᵀ` on the side, within-fibre
/// targets, the first cross relation and the cross targets.
struct SideData<'a> {
    name: &'static str,
    gram: Matrix,
    within: &'a [Matrix],
    n1: Matrix,
    cross: Vec<Matrix>,
}

fn side_sequences(
    side: &SideData<'_>,
    diameter: usize,
    tol: Tolerance,
) -> Result<std::result::Result<(Vec<Poly>, Vec<Poly>, f64), (String, usize, String)>> {
    let dec = sym_eigen(&side.gram, tol)?;
    let spaces: Vec<(f64, &Matrix)> = dec.spaces.iter().map(|s| (s.value(), &s.projector)).collect();
    let scale = spaces.iter().fold(0.0_f64, |a, (v, _)| a.max(v.abs()));
    let is_zero = |v: f64| v.abs() <= tol.eps() * (1.0 + scale);
    let rows = side.gram.rows();
    let mut residual = 0.0_f64;

    let mut p_seq = Vec::new();
    for i in 0..=diameter / 2 {
        let target = side.within.get(i).cloned().unwrap_or_else(|| Matrix::zeros(rows, rows));
        let xs: Vec<f64> = spaces.iter().map(|(v, _)| *v).collect();
        let ys: Vec<f64> = spaces.iter().map(|(_, e)| e.dot(&target) / e.trace()).collect();
        let family = format!("P^{}", side.name);
        let Some((p, _)) = interpolate_degree(&xs, &ys, i, fit_bound(&ys, tol)) else {
            return Ok(Err((family, i, format!("no degree-{i} polynomial in the Gram matrix gives the target"))));
        };
        let mut value = Matrix::zeros(rows, rows);
        for (v, e) in &spaces {
            value.add_assign_scaled(e, p.eval(*v));
        }
        let r = value.max_abs_diff(&target);
        if r > tol.eps() * (1.0 + target.max_abs()) {
            return Ok(Err((family, i, format!("target is not a polynomial in the Gram matrix (residual {r:.3e})"))));
        }
        residual = residual.max(r);
        p_seq.push(p);
    }

    let mut i_seq = Vec::new();
    let cols = side.n1.cols();
    let nonzero: Vec<(f64, Matrix)> =
        spaces.iter().filter(|(v, _)| !is_zero(*v)).map(|(v, e)| (*v, e.matmul(&side.n1))).collect();
    for i in 0..=(diameter - 1) / 2 {
        let target = side.cross.get(i).cloned().unwrap_or_else(|| Matrix::zeros(rows, cols));
        let xs: Vec<f64> = nonzero.iter().map(|(v, _)| *v).collect();
        let ys: Vec<f64> = nonzero.iter().map(|(_, en)| en.dot(&target) / en.dot(en)).collect();
        let family = format!("I^{}", side.name);
        let Some((q, _)) = interpolate_degree(&xs, &ys, i, fit_bound(&ys, tol)) else {
            return Ok(Err((family, i, format!("no degree-{i} polynomial times N1 gives the target"))));
        };
        let mut value = Matrix::zeros(rows, cols);
        for (v, en) in &nonzero {
            value.add_assign_scaled(en, q.eval(*v));
        }
        let r = value.max_abs_diff(&target);
        if r > tol.eps() * (1.0 + target.max_abs()) {
            return Ok(Err((family, i, format!("target is not a polynomial multiple of N1 (residual {r:.3e})"))));
        }
        residual = residual.max(r);
        i_seq.push(q);
    }
    Ok(Ok((p_seq, i_seq, residual)))
}

/// Solves for the distance-biregular polynomial sequences of a connected
/// bipartite graph, returning the first identity that fails otherwise.
pub fn dbrg_sequences(g: &BipartiteGraph, tol: Tolerance) -> Result<DbrgOutcome> {
    let bc = from_bipartite_graph(g)?;
    let diameter = (2 * bc.t_beta()).max(2 * bc.t_gamma()).max(2 * bc.t_bg() - 1);
    let n1 = bc.n()[0].clone();
    let beta = SideData {
        name: "beta",
        gram: n1.matmul(&n1.transpose()),
        within: bc.x(),
        n1: n1.clone(),
        cross: bc.n().to_vec(),
    };
    let gamma = SideData {
        name: "gamma",
        gram: n1.transpose().matmul(&n1),
        within: bc.y(),
        n1: n1.transpose(),
        cross: bc.n().iter().map(Matrix::transpose).collect(),
    };
    let (p_beta, i_beta, rb) = match side_sequences(&beta, diameter, tol)? {
        Ok(s) => s,
        Err((family, index, reason)) => return Ok(DbrgOutcome::Refuted { family, index, reason }),
    };
    let (p_gamma, i_gamma, rg) = match side_sequences(&gamma, diameter, tol)? {
        Ok(s) => s,
        Err((family, index, reason)) => return Ok(DbrgOutcome::Refuted { family, index, reason }),
    };
    Ok(DbrgOutcome::Sequences(DbrgSequences { diameter, p_beta, i_beta, p_gamma, i_gamma, residual: rb.max(rg) }))
}

/// Witness that the dual eigenmatrix of a block is Q-polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QPolyCertificate {
    pub block: (usize, usize),
    /// Idempotent indices in polynomial order, starting with `E_0`.
    pub ordering: Vec<usize>,
    pub nubar: Vec<Poly>,
    /// `max |ν̄_h(Q_{r,1}) - Q_{r,h}|`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QCandidateFailure {
    pub candidate: usize,
    pub step: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum QPolyOutcome {
    Certificate(QPolyCertificate),
    Refuted { block: (usize, usize), candidates: Vec<QCandidateFailure> },
}

impl QPolyOutcome {
    pub fn certificate(&self) -> Option<&QPolyCertificate> {
        match self {
            QPolyOutcome::Certificate(c) => Some(c),
            QPolyOutcome::Refuted { .. } => None,
        }
    }
}

/// Q-polynomial search on a dual eigenmatrix with one row per relation and
/// one column per idempotent, column 0 being `E_0`.
pub fn detect_q_polynomial_table(q: &Matrix, block: (usize, usize), tol: Tolerance) -> Result<QPolyOutcome> {
    let n = q.cols();
    if n > Q_SEARCH_LIMIT {
        return Err(Error::Unsupported(format!(
            "block {block:?} has {n} idempotents; the Q-polynomial search handles at most {Q_SEARCH_LIMIT}"
        )));
    }
    let column = |c: usize| (0..q.rows()).map(|r| q.get(r, c)).collect::<Vec<f64>>();
    if n == 1 {
        return Ok(QPolyOutcome::Certificate(QPolyCertificate {
            block,
            ordering: vec![0],
            nubar: vec![Poly::constant(1.0)],
            residual: column(0).iter().fold(0.0_f64, |a, v| a.max((v - 1.0).abs())),
        }));
    }
    let mut failures = Vec::new();
    for cand in 1..n {
        let xs = column(cand);
        if cluster_values(&xs, tol).len() != xs.len() {
            failures.push(QCandidateFailure { candidate: cand, step: 1, reason: "repeated values in the column".into() });
            continue;
        }
        let columns: Vec<Option<Vec<f64>>> = (0..n).map(|c| Some(column(c))).collect();
        let mut placed = vec![(0, Poly::constant(1.0), false)];
        let (p1, _) = interpolate_degree(&xs, &xs, 1, fit_bound(&xs, tol)).expect("a column is linear in itself");
        placed.push((cand, p1, false));
        let mut deepest = 1;
        if !search(&xs, &columns, &mut placed, n, tol, &mut deepest) {
            failures.push(QCandidateFailure {
                candidate: cand,
                step: deepest,
                reason: format!("no idempotent has a degree-{deepest} polynomial in the column"),
            });
            continue;
        }
        let mut residual = 0.0_f64;
        for (c, p, _) in &placed {
            for (r, &x) in xs.iter().enumerate() {
                residual = residual.max((p.eval(x) - q.get(r, *c)).abs());
            }
        }
        return Ok(QPolyOutcome::Certificate(QPolyCertificate {
            block,
            ordering: placed.iter().map(|(c, ..)| *c).collect(),
            nubar: placed.into_iter().map(|(_, p, _)| p).collect(),
            residual,
        }));
    }
    Ok(QPolyOutcome::Refuted { block, candidates: failures })
}

/// Q-polynomial search on one block of a bipartite configuration.
pub fn detect_q_polynomial(es: &EigenSystem, block: (usize, usize), tol: Tolerance) -> Result<QPolyOutcome> {
    let q = match block {
        (0, 0) => &es.q_beta,
        (1, 1) => &es.q_gamma,
        (0, 1) | (1, 0) => &es.q_bg,
        _ => return Err(Error::Structural(format!("block {block:?} does not exist in a two-fibre configuration"))),
    };
    detect_q_polynomial_table(q, block, tol)
}
