//! Eigenmatrices, dual eigenmatrices, valencies and multiplicities.

use crate::bipartite::BipartiteConfig;
use crate::error::{Error, Result};
use crate::numerics::{common_eigen, Matrix, Tolerance};
use crate::relations::CoherentConfig;
use crate::report::{Check, VerificationReport};
use crate::spectral::SpectralBasis;

/// Eigenvalue tables of a bipartite coherent configuration.
///
/// `P` tables have one row per spectral idempotent and one column per
/// relation: `p_beta[r][i]` is the eigenvalue of `X_i` on `L_r`, and
/// `p_bg[r][i - 1]` the coefficient of `D_r` in `N_i`. `Q` tables are
/// indexed the other way round (relation, idempotent), so that
/// `L_i = (1/|β|) Σ_j q_beta[j][i] X_j` and
/// `D_i = (1/√(|β||γ|)) Σ_j q_bg[j - 1][i] N_j`.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub beta_size: usize,
    pub gamma_size: usize,
    pub p_beta: Matrix,
    pub p_gamma: Matrix,
    pub p_bg: Matrix,
    pub q_beta: Matrix,
    pub q_gamma: Matrix,
    pub q_bg: Matrix,
    /// Row sums of `N_i`.
    pub k_bg: Vec<f64>,
    /// Row sums of `N_iᵀ`.
    pub k_gb: Vec<f64>,
    pub k_beta: Vec<f64>,
    pub k_gamma: Vec<f64>,
    /// `trace(L_r)`.
    pub m_beta: Vec<f64>,
    /// `trace(R_r)`.
    pub m_gamma: Vec<f64>,
}

impl EigenSystem {
    pub fn t_tilde(&self) -> usize {
        self.p_bg.rows() - 1
    }
}

/// `[dot(basis_r, rel_i) / dot(basis_r, basis_r)]` over `r` and `i`.
fn projection_table(basis: &[Matrix], relations: &[Matrix]) -> Matrix {
    Matrix::from_fn(basis.len(), relations.len(), |r, i| {
        basis[r].dot(&relations[i]) / basis[r].dot(&basis[r])
    })
}

/// `scale · P⁻¹`, or a singularity error with a condition estimate.
fn dual_table(p: &Matrix, scale: f64, which: &str) -> Result<Matrix> {
    if !p.is_square() {
        return Err(Error::Singular { which: which.into(), condition: f64::INFINITY });
    }
    let inv = p
        .inverse(1e-12)
        .ok_or_else(|| Error::Singular { which: which.into(), condition: f64::INFINITY })?;
    let condition = p.norm_inf() * inv.norm_inf();
    if !condition.is_finite() || condition > 1e12 {
        return Err(Error::Singular { which: which.into(), condition });
    }
    Ok(inv.scale(scale))
}

/// Common row sum of an integer matrix; the first row is taken when rows
/// disagree, which the C-axiom checks rule out for verified input.
fn row_valency(m: &Matrix) -> f64 {
    m.row(0).iter().sum()
}

pub fn eigenmatrices(bc: &BipartiteConfig, sb: &SpectralBasis, _tol: Tolerance) -> Result<EigenSystem> {
    let (b, g) = (bc.beta_size() as f64, bc.gamma_size() as f64);
    let p_beta = projection_table(&sb.l, bc.x());
    let p_gamma = projection_table(&sb.r, bc.y());
    let p_bg = projection_table(&sb.d, bc.n());
    let q_beta = dual_table(&p_beta, b, "P^beta")?;
    let q_gamma = dual_table(&p_gamma, g, "P^gamma")?;
    let q_bg = dual_table(&p_bg, (b * g).sqrt(), "P^beta-gamma")?;
    Ok(EigenSystem {
        beta_size: bc.beta_size(),
        gamma_size: bc.gamma_size(),
        k_bg: bc.n().iter().map(row_valency).collect(),
        k_gb: bc.n().iter().map(|n| n.col_sums()[0]).collect(),
        k_beta: bc.x().iter().map(row_valency).collect(),
        k_gamma: bc.y().iter().map(row_valency).collect(),
        m_beta: sb.multiplicities_beta(),
        m_gamma: sb.multiplicities_gamma(),
        p_beta,
        p_gamma,
        p_bg,
        q_beta,
        q_gamma,
        q_bg,
    })
}

/// Residuals of `P Q = s I` for the three blocks, with `s` equal to
/// `√(|β||γ|)`, `|β|` and `|γ|` respectively.
pub fn check_pq_identity(es: &EigenSystem, tol: Tolerance) -> VerificationReport {
    let (b, g) = (es.beta_size as f64, es.gamma_size as f64);
    let residual = |p: &Matrix, q: &Matrix, s: f64| p.matmul(q).max_abs_diff(&Matrix::identity(p.rows()).scale(s));
    let mut report = VerificationReport::default();
    report.push(Check::residual("PQ-bg", residual(&es.p_bg, &es.q_bg, (b * g).sqrt()), tol.eps()));
    report.push(Check::residual("PQ-beta", residual(&es.p_beta, &es.q_beta, b), tol.eps()));
    report.push(Check::residual("PQ-gamma", residual(&es.p_gamma, &es.q_gamma, g), tol.eps()));
    report
}

/// Structural identities of an eigensystem: valencies from the first row
/// of `P^{βγ}`, exact integer row sums, first columns of `P^β`/`P^γ`, first
/// column of `Q^{βγ}`, and the round trip of every relation through `P`.
pub fn check_identities(es: &EigenSystem, bc: &BipartiteConfig, sb: &SpectralBasis, tol: Tolerance) -> VerificationReport {
    let (b, g) = (es.beta_size as f64, es.gamma_size as f64);
    let mut report = VerificationReport::default();

    let mut valency = 0.0_f64;
    for (i, n) in bc.n().iter().enumerate() {
        let p0 = es.p_bg.get(0, i);
        valency = valency.max(((g / b).sqrt() * p0 - es.k_bg[i]).abs());
        valency = valency.max(((b / g).sqrt() * p0 - es.k_gb[i]).abs());
        let rows_constant = n.row_sums().iter().all(|&s| s == es.k_bg[i]);
        let cols_constant = n.col_sums().iter().all(|&s| s == es.k_gb[i]);
        if !rows_constant || !cols_constant {
            valency = f64::INFINITY;
        }
    }
    report.push(Check::residual("valency", valency, tol.eps()));

    let first_col = |p: &Matrix| (0..p.rows()).fold(0.0_f64, |acc, r| acc.max((p.get(r, 0) - 1.0).abs()));
    let q_first = (0..es.q_bg.rows()).fold(0.0_f64, |acc, j| acc.max((es.q_bg.get(j, 0) - 1.0).abs()));
    report.push(Check::residual(
        "unit-columns",
        first_col(&es.p_beta).max(first_col(&es.p_gamma)).max(q_first),
        tol.eps(),
    ));

    let mut round_trip = 0.0_f64;
    let expand = |p: &Matrix, col: usize, basis: &[Matrix]| {
        let mut m = Matrix::zeros(basis[0].rows(), basis[0].cols());
        for (r, e) in basis.iter().enumerate() {
            m.add_assign_scaled(e, p.get(r, col));
        }
        m
    };
    for (i, x) in bc.x().iter().enumerate() {
        round_trip = round_trip.max(expand(&es.p_beta, i, &sb.l).max_abs_diff(x));
    }
    for (i, y) in bc.y().iter().enumerate() {
        round_trip = round_trip.max(expand(&es.p_gamma, i, &sb.r).max_abs_diff(y));
    }
    for (i, n) in bc.n().iter().enumerate() {
        round_trip = round_trip.max(expand(&es.p_bg, i, &sb.d).max_abs_diff(n));
    }
    // Collapsing back through Q must return the spectral basis.
    let collapse = |q: &Matrix, col: usize, rels: &[Matrix], s: f64| {
        let mut m = Matrix::zeros(rels[0].rows(), rels[0].cols());
        for (j, a) in rels.iter().enumerate() {
            m.add_assign_scaled(a, q.get(j, col) / s);
        }
        m
    };
    for (i, l) in sb.l.iter().enumerate() {
        round_trip = round_trip.max(collapse(&es.q_beta, i, bc.x(), b).max_abs_diff(l));
    }
    for (i, r) in sb.r.iter().enumerate() {
        round_trip = round_trip.max(collapse(&es.q_gamma, i, bc.y(), g).max_abs_diff(r));
    }
    for (i, d) in sb.d.iter().enumerate() {
        round_trip = round_trip.max(collapse(&es.q_bg, i, bc.n(), (b * g).sqrt()).max_abs_diff(d));
    }
    report.push(Check::residual("round-trip", round_trip, tol.eps()));
    report
}

/// Multiplicities recomputed from the dual eigenmatrices.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicityCheck {
    /// `(1/|γ|) Σ_i (Q^{βγ}_{i,h})² k_i^{βγ}` for `h <= t̃`.
    pub from_q_bg: Vec<f64>,
    /// `Q^β_{0,i}`.
    pub from_q_beta: Vec<f64>,
    /// `Q^γ_{0,i}`.
    pub from_q_gamma: Vec<f64>,
    /// Largest deviation of any of the above from the traces.
    pub residual: f64,
    /// Largest `|m_h^β - m_h^γ|` for `h <= t̃`.
    pub side_residual: f64,
}

pub fn multiplicity_from_q(es: &EigenSystem) -> MultiplicityCheck {
    let g = es.gamma_size as f64;
    let from_q_bg: Vec<f64> = (0..es.q_bg.cols())
        .map(|h| {
            (0..es.q_bg.rows())
                .map(|i| es.q_bg.get(i, h).powi(2) * es.k_bg[i])
                .sum::<f64>()
                / g
        })
        .collect();
    let from_q_beta: Vec<f64> = (0..es.q_beta.cols()).map(|i| es.q_beta.get(0, i)).collect();
    let from_q_gamma: Vec<f64> = (0..es.q_gamma.cols()).map(|i| es.q_gamma.get(0, i)).collect();
    let dev = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()));
    let residual = dev(&from_q_bg, &es.m_beta)
        .max(dev(&from_q_beta, &es.m_beta))
        .max(dev(&from_q_gamma, &es.m_gamma));
    let t = es.q_bg.cols();
    let side_residual = dev(&es.m_beta[..t], &es.m_gamma[..t]);
    MultiplicityCheck { from_q_bg, from_q_beta, from_q_gamma, residual, side_residual }
}

/// Largest deviation between the `Q` tables obtained by inverting `P` and
/// the ones obtained by projecting each spectral idempotent onto the
/// relations.
pub fn q_projection_residual(es: &EigenSystem, bc: &BipartiteConfig, sb: &SpectralBasis) -> f64 {
    let (b, g) = (es.beta_size as f64, es.gamma_size as f64);
    let project = |q: &Matrix, rels: &[Matrix], basis: &[Matrix], s: f64| {
        let mut worst = 0.0_f64;
        for (j, a) in rels.iter().enumerate() {
            for (i, e) in basis.iter().enumerate() {
                let v = s * a.dot(e) / a.dot(a);
                worst = worst.max((v - q.get(j, i)).abs());
            }
        }
        worst
    };
    project(&es.q_beta, bc.x(), &sb.l, b)
        .max(project(&es.q_gamma, bc.y(), &sb.r, g))
        .max(project(&es.q_bg, bc.n(), &sb.d, (b * g).sqrt()))
}

/// Eigenvalue tables of a one-fibre configuration whose relations are
/// symmetric and commute (a symmetric association scheme).
#[derive(Clone, Debug)]
pub struct SchemeEigen {
    pub order: usize,
    /// Primitive idempotents, `J/n` first.
    pub idempotents: Vec<Matrix>,
    /// `p[r][i]`: eigenvalue of relation `i` on idempotent `r`.
    pub p: Matrix,
    /// `n · P⁻¹`.
    pub q: Matrix,
    pub valencies: Vec<f64>,
    pub multiplicities: Vec<f64>,
}

pub fn scheme_eigenmatrices(cc: &CoherentConfig, tol: Tolerance) -> Result<SchemeEigen> {
    if cc.fibre_count() != 1 {
        return Err(Error::Structural("scheme eigenmatrices need a single fibre".into()));
    }
    let rels: Vec<Matrix> = cc.relations().iter().map(|r| r.matrix.clone()).collect();
    let n = cc.order();
    let dec = common_eigen(&rels, tol)?;
    if dec.spaces.len() != rels.len() {
        return Err(Error::BasisCount {
            what: "primitive idempotents against relations".into(),
            expected: rels.len(),
            found: dec.spaces.len(),
        });
    }
    let ones = Matrix::ones(n, n).scale(1.0 / n as f64);
    let mut idempotents: Vec<Matrix> = dec.spaces.into_iter().map(|s| s.projector).collect();
    let first = idempotents
        .iter()
        .position(|e| e.max_abs_diff(&ones) <= tol.eps())
        .ok_or_else(|| Error::Spectral("J/n is not a primitive idempotent".into()))?;
    let j = idempotents.remove(first);
    idempotents.insert(0, j);
    let p = projection_table(&idempotents, &rels);
    let q = dual_table(&p, n as f64, "P")?;
    Ok(SchemeEigen {
        order: n,
        valencies: rels.iter().map(row_valency).collect(),
        multiplicities: idempotents.iter().map(Matrix::trace).collect(),
        idempotents,
        p,
        q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::build_spectral_basis;

    fn complement(n: usize) -> Matrix {
        Matrix::ones(n, n).sub(&Matrix::identity(n))
    }

    fn fano() -> BipartiteConfig {
        let lines = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];
        let n1 = Matrix::from_fn(7, 7, |p, b| if lines[b].contains(&p) { 1.0 } else { 0.0 });
        let n2 = Matrix::ones(7, 7).sub(&n1);
        BipartiteConfig::new(7, 7, vec![Matrix::identity(7), complement(7)], vec![Matrix::identity(7), complement(7)], vec![n1, n2])
            .unwrap()
    }

    fn k23() -> BipartiteConfig {
        BipartiteConfig::new(2, 3, vec![Matrix::identity(2), complement(2)], vec![Matrix::identity(3), complement(3)], vec![Matrix::ones(2, 3)])
            .unwrap()
    }

    fn system(bc: &BipartiteConfig) -> (SpectralBasis, EigenSystem) {
        let tol = Tolerance::default();
        let sb = build_spectral_basis(bc, tol).unwrap();
        let es = eigenmatrices(bc, &sb, tol).unwrap();
        (sb, es)
    }

    #[test]
    fn fano_tables() {
        let bc = fano();
        let (sb, es) = system(&bc);
        let s2 = 2.0_f64.sqrt();
        let p = Matrix::from_rows(&[vec![3.0, 4.0], vec![s2, -s2]]).unwrap();
        assert!(es.p_bg.max_abs_diff(&p) < 1e-12);
        // Q = 7 P⁻¹ = [[1, 2√2], [1, -3/√2]].
        let q = Matrix::from_rows(&[vec![1.0, 2.0 * s2], vec![1.0, -3.0 / s2]]).unwrap();
        assert!(es.q_bg.max_abs_diff(&q) < 1e-12);
        assert_eq!(es.k_bg, vec![3.0, 4.0]);
        assert!(check_pq_identity(&es, Tolerance::default()).passed());
        assert!(check_identities(&es, &bc, &sb, Tolerance::default()).passed());
        let m = multiplicity_from_q(&es);
        assert!((m.from_q_bg[1] - 6.0).abs() < 1e-12);
        assert!(m.residual < 1e-12 && m.side_residual < 1e-12);
        assert!(q_projection_residual(&es, &bc, &sb) < 1e-12);
    }

    #[test]
    fn k23_tables() {
        let bc = k23();
        let (_, es) = system(&bc);
        let pb = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        assert!(es.p_beta.max_abs_diff(&pb) < 1e-12);
        assert!((es.p_bg.get(0, 0) - 6.0_f64.sqrt()).abs() < 1e-12);
        assert_eq!((es.k_bg[0], es.k_gb[0]), (3.0, 2.0));
        assert!((es.m_beta[0] - 1.0).abs() < 1e-12 && (es.m_beta[1] - 1.0).abs() < 1e-12);
        assert!((es.m_gamma[1] - 2.0).abs() < 1e-12);
        let pq = check_pq_identity(&es, Tolerance::default());
        assert!(pq.get("PQ-bg").unwrap().residual.unwrap() < 1e-12);
    }

    #[test]
    fn pentagon_scheme() {
        let c5 = crate::builders::Graph::new(5, (0..5).map(|i| (i, (i + 1) % 5)).collect()).unwrap();
        let cc = crate::builders::from_graph(&c5).unwrap();
        let se = scheme_eigenmatrices(&cc, Tolerance::default()).unwrap();
        assert_eq!(se.idempotents.len(), 3);
        assert!((se.p.get(0, 1) - 2.0).abs() < 1e-12);
        assert_eq!(se.multiplicities.iter().map(|m| m.round() as usize).collect::<Vec<_>>(), vec![1, 2, 2]);
    }
}
