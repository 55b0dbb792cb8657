//! The spectral basis L / D / R of a bipartite coherent configuration.

use crate::bipartite::BipartiteConfig;
use crate::error::{Error, Result};
use crate::numerics::{common_eigen, same_cluster, span_dimension, Matrix, OrthoSpan, Tolerance};
use crate::report::{Check, VerificationReport};
use std::cmp::Ordering;

/// Pairwise orthogonal idempotents `L_r` on β and `R_r` on γ, with the
/// β×γ matrices `D_r` linking `L_r` and `R_r` for `r <= t̃`.
///
/// Index 0 holds the all-ones idempotents. The pairs follow in decreasing
/// order of the eigenvalue of `N₁N₁ᵀ`; the kernel of all `N_i`, when nonzero
/// on a side, comes last in `l` or `r`.
#[derive(Clone, Debug)]
pub struct SpectralBasis {
    pub beta_size: usize,
    pub gamma_size: usize,
    pub l: Vec<Matrix>,
    pub r: Vec<Matrix>,
    pub d: Vec<Matrix>,
    /// `theta[r][i - 1]`: eigenvalue of `[[0, N_i], [N_iᵀ, 0]]` on the pair `r`.
    pub theta: Vec<Vec<f64>>,
    /// Eigenvalue of `N₁N₁ᵀ` on each `L_r`.
    pub labels_beta: Vec<f64>,
    /// Eigenvalue of `N₁ᵀN₁` on each `R_r`.
    pub labels_gamma: Vec<f64>,
    /// Pairs whose `D_r` sign could not be pinned by a nonzero eigenvalue.
    pub unpinned_signs: Vec<usize>,
}

impl SpectralBasis {
    pub fn t_tilde(&self) -> usize {
        self.d.len() - 1
    }

    pub fn len(&self) -> usize {
        self.l.len() + self.r.len() + 2 * self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn multiplicities_beta(&self) -> Vec<f64> {
        self.l.iter().map(Matrix::trace).collect()
    }

    pub fn multiplicities_gamma(&self) -> Vec<f64> {
        self.r.iter().map(Matrix::trace).collect()
    }

    /// Every element with its block, `(0,0)` for L, `(0,1)` for D, `(1,0)`
    /// for Dᵀ and `(1,1)` for R, and its index inside the block.
    pub fn elements(&self) -> Vec<((usize, usize), usize, Matrix)> {
        let mut out = Vec::with_capacity(self.len());
        out.extend(self.l.iter().enumerate().map(|(k, m)| ((0, 0), k, m.clone())));
        out.extend(self.d.iter().enumerate().map(|(k, m)| ((0, 1), k, m.clone())));
        out.extend(self.d.iter().enumerate().map(|(k, m)| ((1, 0), k, m.transpose())));
        out.extend(self.r.iter().enumerate().map(|(k, m)| ((1, 1), k, m.clone())));
        out
    }

    fn element(&self, block: (usize, usize), index: usize) -> Option<Matrix> {
        match block {
            (0, 0) => self.l.get(index).cloned(),
            (0, 1) => self.d.get(index).cloned(),
            (1, 0) => self.d.get(index).map(Matrix::transpose),
            _ => self.r.get(index).cloned(),
        }
    }
}

struct Pair {
    theta: Vec<f64>,
    l: Matrix,
    d: Matrix,
    r: Matrix,
    pinned: bool,
}

fn compare_desc(a: &[f64], b: &[f64], tol: Tolerance) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if !same_cluster(*x, *y, tol) {
            return y.total_cmp(x);
        }
    }
    Ordering::Equal
}

/// Builds the spectral basis from the minimal common idempotents of the
/// bipartite forms of every `N_i` together with the identity.
pub fn build_spectral_basis(bc: &BipartiteConfig, tol: Tolerance) -> Result<SpectralBasis> {
    let (b, g) = (bc.beta_size(), bc.gamma_size());
    let t = bc.t_bg();
    let mut family: Vec<Matrix> = (1..=t).map(|i| bc.bipartite_form(i)).collect();
    family.push(Matrix::identity(b + g));
    let dec = common_eigen(&family, tol)?;

    let scale = dec
        .spaces
        .iter()
        .flat_map(|s| s.values[..t].iter())
        .fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let zero = |v: f64| v.abs() <= tol.eps() * (1.0 + scale);

    // F: the projector onto the normalized all-ones vector pair.
    let f = Matrix::from_fn(b + g, 1, |i, _| {
        let side = if i < b { b } else { g } as f64;
        1.0 / (2.0 * side).sqrt()
    });
    let f_index = dec
        .spaces
        .iter()
        .position(|s| s.projector.matmul(&f).max_abs_diff(&f) <= tol.eps())
        .ok_or_else(|| Error::Spectral("no common eigenspace contains the all-ones vector pair".into()))?;
    if dec.spaces[f_index].multiplicity != 1 {
        return Err(Error::Spectral(format!(
            "the all-ones eigenspace has dimension {}, expected 1",
            dec.spaces[f_index].multiplicity
        )));
    }

    let mut used = vec![false; dec.spaces.len()];
    let mut pairs: Vec<Pair> = Vec::new();
    let mut kernel: Option<&Matrix> = None;
    for (s, space) in dec.spaces.iter().enumerate() {
        if used[s] {
            continue;
        }
        used[s] = true;
        let v = &space.values[..t];
        if v.iter().all(|&x| zero(x)) {
            kernel = Some(&space.projector);
            continue;
        }
        let partner = (0..dec.spaces.len())
            .find(|&o| !used[o] && dec.spaces[o].values[..t].iter().zip(v).all(|(a, b)| zero(a + b)))
            .ok_or_else(|| Error::Spectral(format!("eigenspace {s} has no sign-flipped partner")))?;
        used[partner] = true;
        let first = v.iter().copied().find(|&x| !zero(x)).expect("nonzero vector");
        let (rep, theta) = if first > 0.0 {
            (&space.projector, v.to_vec())
        } else {
            (&dec.spaces[partner].projector, dec.spaces[partner].values[..t].to_vec())
        };
        let pinned = !zero(v[0]);
        pairs.push(Pair {
            theta,
            l: rep.submatrix(0, 0, b, b).scale(2.0),
            d: rep.submatrix(0, b, b, g).scale(2.0),
            r: rep.submatrix(b, b, g, g).scale(2.0),
            pinned,
        });
    }

    let f_theta = dec.spaces[f_index].values[..t].to_vec();
    let is_f = |p: &Pair| p.theta.iter().zip(&f_theta).all(|(a, b)| zero(a - b));
    pairs.sort_by(|p, q| {
        is_f(q).cmp(&is_f(p)).then_with(|| {
            let ps: Vec<f64> = p.theta.iter().map(|x| x * x).collect();
            let qs: Vec<f64> = q.theta.iter().map(|x| x * x).collect();
            compare_desc(&ps, &qs, tol).then_with(|| compare_desc(&p.theta, &q.theta, tol))
        })
    });

    let mut sb = SpectralBasis {
        beta_size: b,
        gamma_size: g,
        l: Vec::new(),
        r: Vec::new(),
        d: Vec::new(),
        theta: Vec::new(),
        labels_beta: Vec::new(),
        labels_gamma: Vec::new(),
        unpinned_signs: Vec::new(),
    };
    for (k, p) in pairs.into_iter().enumerate() {
        sb.labels_beta.push(p.theta[0] * p.theta[0]);
        sb.labels_gamma.push(p.theta[0] * p.theta[0]);
        if !p.pinned {
            sb.unpinned_signs.push(k);
        }
        sb.theta.push(p.theta);
        sb.l.push(p.l);
        sb.d.push(p.d);
        sb.r.push(p.r);
    }
    if let Some(e) = kernel {
        let lk = e.submatrix(0, 0, b, b);
        let rk = e.submatrix(b, b, g, g);
        if lk.max_abs() > tol.eps() {
            sb.l.push(lk);
            sb.labels_beta.push(0.0);
        }
        if rk.max_abs() > tol.eps() {
            sb.r.push(rk);
            sb.labels_gamma.push(0.0);
        }
    }

    if sb.len() != bc.relation_count() {
        return Err(Error::BasisCount {
            what: "spectral basis against relations".into(),
            expected: bc.relation_count(),
            found: sb.len(),
        });
    }
    for (what, expected, found) in [
        ("L (beta idempotents)", bc.t_beta() + 1, sb.l.len()),
        ("R (gamma idempotents)", bc.t_gamma() + 1, sb.r.len()),
        ("D (cross idempotents)", t, sb.d.len()),
    ] {
        if expected != found {
            return Err(Error::BasisCount { what: what.into(), expected, found });
        }
    }
    Ok(sb)
}

fn max_residual<'a>(pairs: impl IntoIterator<Item = (&'a Matrix, Matrix)>) -> f64 {
    pairs.into_iter().fold(0.0, |acc, (a, b)| acc.max(a.max_abs_diff(&b)))
}

fn ones_over(rows: usize, cols: usize) -> Matrix {
    Matrix::ones(rows, cols).scale(1.0 / ((rows * cols) as f64).sqrt())
}

fn block_relations(bc: &BipartiteConfig, block: (usize, usize)) -> Vec<Matrix> {
    match block {
        (0, 0) => bc.x().to_vec(),
        (0, 1) => bc.n().to_vec(),
        (1, 0) => bc.n().iter().map(Matrix::transpose).collect(),
        _ => bc.y().to_vec(),
    }
}

const BLOCKS: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

/// Residual checks of the four block conditions on a spectral basis:
/// B1 normalized all-ones at index 0, B2 per-block basis of the relation
/// span, B3 transpose symmetry, B4 the block product rule.
pub fn verify_suda_conditions(sb: &SpectralBasis, bc: &BipartiteConfig, tol: Tolerance) -> Result<VerificationReport> {
    let bound = tol.eps();
    let mut report = VerificationReport::default();

    let b1 = BLOCKS
        .iter()
        .map(|&blk| {
            let e = sb.element(blk, 0).expect("index 0 exists in every block");
            e.max_abs_diff(&ones_over(e.rows(), e.cols()))
        })
        .fold(0.0, f64::max);
    report.push(Check::residual("B1", b1, bound));

    let mut b2 = 0.0_f64;
    let mut dims = Vec::new();
    let mut dims_ok = true;
    for blk in BLOCKS {
        let rels = block_relations(bc, blk);
        let elems: Vec<Matrix> = sb.elements().into_iter().filter(|e| e.0 == blk).map(|e| e.2).collect();
        let span = OrthoSpan::new(&rels);
        b2 = elems.iter().fold(b2, |acc, e| acc.max(span.residual(e)));
        let dim = span_dimension(&elems, tol)?;
        dims_ok &= dim == rels.len();
        dims.push(format!("{}{}:{}/{}", blk.0, blk.1, dim, rels.len()));
    }
    report.push(Check { passed: b2 <= bound && dims_ok, ..Check::residual("B2", b2, bound) }.with_detail(dims.join(" ")));

    let b3 = sb
        .l
        .iter()
        .chain(&sb.r)
        .fold(0.0_f64, |acc, m| acc.max(m.max_abs_diff(&m.transpose())));
    report.push(Check::residual("B3", b3, bound));

    let elems = sb.elements();
    let mut b4 = 0.0_f64;
    for (blk1, r, m1) in &elems {
        for (blk2, s, m2) in &elems {
            if blk1.1 != blk2.0 {
                continue;
            }
            let product = m1.matmul(m2);
            let expected = if r == s { sb.element((blk1.0, blk2.1), *r) } else { None };
            let expected = expected.unwrap_or_else(|| Matrix::zeros(product.rows(), product.cols()));
            b4 = b4.max(product.max_abs_diff(&expected));
        }
    }
    report.push(Check::residual("B4", b4, bound));
    Ok(report)
}

/// Residual checks D1-D5 of the spectral basis, plus the count identity,
/// multiplicity symmetry and `trace(F) = 1`.
///
/// D1 normalized all-ones at index 0, D2 completeness, D3 orthogonal
/// idempotents, D4 `D_r D_rᵀ = L_r` and `D_rᵀ D_r = R_r`, D5 Schur products
/// staying in the span of the configuration.
pub fn verify_dual_basis(sb: &SpectralBasis, bc: &BipartiteConfig, tol: Tolerance) -> VerificationReport {
    let bound = tol.eps();
    let (b, g) = (sb.beta_size, sb.gamma_size);
    let mut report = VerificationReport::default();

    let d1 = sb.l[0]
        .max_abs_diff(&Matrix::ones(b, b).scale(1.0 / b as f64))
        .max(sb.r[0].max_abs_diff(&Matrix::ones(g, g).scale(1.0 / g as f64)))
        .max(sb.d[0].max_abs_diff(&ones_over(b, g)));
    report.push(Check::residual("D1", d1, bound));

    let sum = |family: &[Matrix], n: usize| {
        let mut s = Matrix::zeros(n, n);
        family.iter().for_each(|m| s.add_assign_scaled(m, 1.0));
        s.max_abs_diff(&Matrix::identity(n))
    };
    report.push(Check::residual("D2", sum(&sb.l, b).max(sum(&sb.r, g)), bound));

    let mut d3 = 0.0_f64;
    for family in [&sb.l, &sb.r] {
        for (i, a) in family.iter().enumerate() {
            for (j, c) in family.iter().enumerate() {
                let expected = if i == j { a.clone() } else { Matrix::zeros(a.rows(), a.cols()) };
                d3 = d3.max(a.matmul(c).max_abs_diff(&expected));
            }
        }
    }
    report.push(Check::residual("D3", d3, bound));

    let d4 = max_residual(sb.d.iter().enumerate().flat_map(|(k, d)| {
        [(&sb.l[k], d.matmul(&d.transpose())), (&sb.r[k], d.transpose().matmul(d))]
    }));
    report.push(Check::residual("D4", d4, bound));

    let mut d5 = 0.0_f64;
    let elems = sb.elements();
    for blk in BLOCKS {
        let span = OrthoSpan::new(&block_relations(bc, blk));
        let members: Vec<&Matrix> = elems.iter().filter(|e| e.0 == blk).map(|e| &e.2).collect();
        for (i, a) in members.iter().enumerate() {
            for c in &members[i..] {
                d5 = d5.max(span.residual(&a.schur(c)));
            }
        }
    }
    report.push(Check::residual("D5", d5, bound));

    let count = bc.x().len() + bc.y().len() + 2 * sb.d.len();
    report.push(Check {
        passed: count == bc.relation_count() && sb.len() == bc.relation_count(),
        ..Check::pass("count")
    }
    .with_detail(format!("{} basis elements, {} relations", sb.len(), bc.relation_count())));

    let mult = (0..sb.d.len())
        .map(|k| {
            let (lt, rt) = (sb.l[k].trace(), sb.r[k].trace());
            let rounding = (lt - lt.round()).abs().max((rt - rt.round()).abs());
            if lt.round() == rt.round() { rounding } else { f64::INFINITY }
        })
        .fold(0.0, f64::max);
    report.push(Check::residual("multiplicity", mult, bound));

    let f_trace = (0.5 * (sb.l[0].trace() + sb.r[0].trace()) - 1.0).abs();
    report.push(Check::residual("F-trace", f_trace, bound));
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complement(n: usize) -> Matrix {
        Matrix::ones(n, n).sub(&Matrix::identity(n))
    }

    fn k23() -> BipartiteConfig {
        BipartiteConfig::new(
            2,
            3,
            vec![Matrix::identity(2), complement(2)],
            vec![Matrix::identity(3), complement(3)],
            vec![Matrix::ones(2, 3)],
        )
        .unwrap()
    }

    fn fano_incidence() -> Matrix {
        let lines = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];
        Matrix::from_fn(7, 7, |p, b| if lines[b].contains(&p) { 1.0 } else { 0.0 })
    }

    fn fano() -> BipartiteConfig {
        let n1 = fano_incidence();
        let n2 = Matrix::ones(7, 7).sub(&n1);
        BipartiteConfig::new(
            7,
            7,
            vec![Matrix::identity(7), complement(7)],
            vec![Matrix::identity(7), complement(7)],
            vec![n1, n2],
        )
        .unwrap()
    }

    #[test]
    fn k23_basis() {
        let tol = Tolerance::default();
        let sb = build_spectral_basis(&k23(), tol).unwrap();
        let half = Matrix::ones(2, 2).scale(0.5);
        let third = Matrix::ones(3, 3).scale(1.0 / 3.0);
        assert!(sb.l[0].max_abs_diff(&half) < 1e-12);
        assert!(sb.l[1].max_abs_diff(&Matrix::identity(2).sub(&half)) < 1e-12);
        assert!(sb.r[1].max_abs_diff(&Matrix::identity(3).sub(&third)) < 1e-12);
        assert!(sb.d[0].max_abs_diff(&Matrix::ones(2, 3).scale(1.0 / 6.0_f64.sqrt())) < 1e-12);
        assert_eq!(sb.t_tilde(), 0);
        let suda = verify_suda_conditions(&sb, &k23(), tol).unwrap();
        assert!(suda.passed(), "{suda}");
        assert!(suda.checks.iter().all(|c| c.residual.unwrap() < 1e-12));
        assert!(verify_dual_basis(&sb, &k23(), tol).passed());
    }

    #[test]
    fn fano_basis() {
        let tol = Tolerance::default();
        let bc = fano();
        let sb = build_spectral_basis(&bc, tol).unwrap();
        assert_eq!(sb.t_tilde(), 1);
        assert_eq!(sb.len(), 8);
        // Oracle: N₁ = 3 D₀ + √2 D₁ with D₀ = J/7 gives D₁ = (4N₁ - 3N₂)/(7√2).
        let n1 = &bc.n()[0];
        let n2 = &bc.n()[1];
        let d1 = n1.scale(4.0).sub(&n2.scale(3.0)).scale(1.0 / (7.0 * 2.0_f64.sqrt()));
        assert!(sb.d[1].max_abs_diff(&d1) < 1e-12);
        assert!((sb.labels_beta[0] - 9.0).abs() < 1e-12);
        assert!((sb.labels_beta[1] - 2.0).abs() < 1e-12);
        let suda = verify_suda_conditions(&sb, &bc, tol).unwrap();
        assert!(suda.passed(), "{suda}");
        assert!(suda.get("B2").unwrap().detail.contains("01:2/2"));
        assert!(verify_dual_basis(&sb, &bc, tol).passed());
    }

    #[test]
    fn single_edge() {
        let one = Matrix::identity(1);
        let bc = BipartiteConfig::new(1, 1, vec![one.clone()], vec![one.clone()], vec![one.clone()]).unwrap();
        let sb = build_spectral_basis(&bc, Tolerance::default()).unwrap();
        assert!(sb.l[0].max_abs_diff(&one) < 1e-15);
        assert!(sb.r[0].max_abs_diff(&one) < 1e-15);
        assert!(sb.d[0].max_abs_diff(&one) < 1e-15);
    }

    #[test]
    fn perturbed_d_fails_b4() {
        let tol = Tolerance::default();
        let bc = fano();
        let mut sb = build_spectral_basis(&bc, tol).unwrap();
        let v = sb.d[1].get(0, 0);
        sb.d[1].set(0, 0, v + 1e-3);
        let suda = verify_suda_conditions(&sb, &bc, tol).unwrap();
        let b4 = suda.get("B4").unwrap();
        assert!(!b4.passed);
        let r = b4.residual.unwrap();
        assert!(r > 1e-4 && r < 1e-2, "{r}");
    }
}
