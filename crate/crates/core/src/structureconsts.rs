//! Intersection numbers and Krein parameters, each computed from the
//! eigenvalue tables and again directly from the matrices.

use serde::Serialize;

use crate::bipartite::{BipartiteConfig, Part};
use crate::error::{Error, Result};
use crate::numerics::{Matrix, Tolerance};
use crate::parameters::EigenSystem;
use crate::relations::decompose_on_supports;
use crate::spectral::SpectralBasis;

/// Default distance from an integer tolerated before a computed
/// intersection number counts as non-integral.
pub const DEFAULT_INT_TOL: f64 = 1e-6;

/// Which fibre a table is rooted at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Beta,
    Gamma,
}

impl Side {
    fn other(self) -> Side {
        match self {
            Side::Beta => Side::Gamma,
            Side::Gamma => Side::Beta,
        }
    }
}

/// Relation with interleaved index `idx` among the relations leaving `side`.
///
/// Even indices `2i` are the within-fibre relations (`X_i` or `Y_i`), odd
/// indices `2j - 1` the cross relations (`N_j` from β, `N_jᵀ` from γ).
pub fn interleaved(bc: &BipartiteConfig, side: Side, idx: usize) -> Option<Part> {
    let (within, cross) = match side {
        Side::Beta => (bc.x().len(), bc.n().len()),
        Side::Gamma => (bc.y().len(), bc.n().len()),
    };
    if idx % 2 == 0 {
        let i = idx / 2;
        (i < within).then(|| if side == Side::Beta { Part::X(i) } else { Part::Y(i) })
    } else {
        let j = idx.div_ceil(2);
        (j <= cross).then(|| if side == Side::Beta { Part::N(j) } else { Part::Nt(j) })
    }
}

fn part_matrix(bc: &BipartiteConfig, part: Part) -> Matrix {
    match part {
        Part::X(i) => bc.x()[i].clone(),
        Part::Y(i) => bc.y()[i].clone(),
        Part::N(j) => bc.n()[j - 1].clone(),
        Part::Nt(j) => bc.n()[j - 1].transpose(),
    }
}

/// Dense cube of values indexed `(a, b, c)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cube {
    pub size: usize,
    pub values: Vec<f64>,
}

impl Cube {
    pub fn zeros(size: usize) -> Self {
        Cube { size, values: vec![0.0; size * size * size] }
    }

    /// Builds a cube from nested `[a][b][c]` vectors.
    pub fn from_nested(v: &[Vec<Vec<f64>>]) -> Result<Self> {
        let size = v.len();
        let mut cube = Cube::zeros(size);
        for (a, plane) in v.iter().enumerate() {
            if plane.len() != size || plane.iter().any(|row| row.len() != size) {
                return Err(Error::ShapeMismatch { expected: (size, size), found: (plane.len(), plane.first().map_or(0, Vec::len)) });
            }
            for (b, row) in plane.iter().enumerate() {
                for (c, &x) in row.iter().enumerate() {
                    cube.set(a, b, c, x);
                }
            }
        }
        Ok(cube)
    }

    fn pos(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.size + b) * self.size + c
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.values[self.pos(a, b, c)]
    }

    pub fn set(&mut self, a: usize, b: usize, c: usize, x: f64) {
        let p = self.pos(a, b, c);
        self.values[p] = x;
    }

    pub fn max_abs_diff(&self, other: &Cube) -> f64 {
        self.values.iter().zip(&other.values).fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
    }
}

/// One side's intersection numbers over the interleaved indexing.
///
/// Cells whose relations do not exist, or whose product cannot land on the
/// target relation, are undefined and hold zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideTable {
    pub side: Side,
    pub values: Cube,
    #[serde(skip)]
    pub defined: Vec<bool>,
    /// Human-readable name of each `a` index (and of `c`).
    pub legend: Vec<String>,
    /// Names of `b` indices on the other side.
    pub legend_other: Vec<String>,
}

impl SideTable {
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.values.get(a, b, c)
    }

    pub fn is_defined(&self, a: usize, b: usize, c: usize) -> bool {
        self.defined[self.values.pos(a, b, c)]
    }

    /// Every defined cell as `(a, b, c, value)`.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        let n = self.values.size;
        (0..n * n * n)
            .filter(|&p| self.defined[p])
            .map(move |p| (p / (n * n), (p / n) % n, p % n, self.values.values[p]))
    }

    /// Reads a cell as a product, e.g. `X1 N1 -> N2`.
    pub fn describe(&self, a: usize, b: usize, c: usize) -> String {
        let b_name = if a % 2 == 0 { &self.legend[b] } else { &self.legend_other[b] };
        format!("{} {} -> {}", self.legend[a], b_name, self.legend[c])
    }
}

/// A formula value too far from a non-negative integer.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralityFailure {
    pub side: Side,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntersectionTable {
    pub xi: SideTable,
    pub sigma: SideTable,
    /// Largest distance from the nearest integer before rounding.
    pub residual: f64,
    pub failures: Vec<IntegralityFailure>,
}

impl IntersectionTable {
    pub fn side(&self, side: Side) -> &SideTable {
        match side {
            Side::Beta => &self.xi,
            Side::Gamma => &self.sigma,
        }
    }

    /// First cell where two tables disagree, with both values.
    pub fn first_disagreement(&self, other: &IntersectionTable) -> Option<(Side, usize, usize, usize, f64, f64)> {
        for side in [Side::Beta, Side::Gamma] {
            let (s, o) = (self.side(side), other.side(side));
            for (a, b, c, v) in s.cells() {
                let w = o.get(a, b, c);
                if v != w {
                    return Some((side, a, b, c, v, w));
                }
            }
        }
        None
    }
}

fn table_size(bc: &BipartiteConfig) -> usize {
    let t = bc.t_bg();
    (2 * bc.t_beta()).max(2 * bc.t_gamma()).max(2 * t - 1) + 1
}

fn legend(bc: &BipartiteConfig, side: Side, size: usize) -> Vec<String> {
    (0..size).map(|k| interleaved(bc, side, k).map_or_else(String::new, |p| p.to_string())).collect()
}

/// Visits every defined cell `(a, b, c)` of `side` with its three relations.
fn for_each_cell(bc: &BipartiteConfig, side: Side, mut f: impl FnMut(usize, usize, usize, Part, Part, Part)) {
    let n = table_size(bc);
    for a in 0..n {
        let Some(pa) = interleaved(bc, side, a) else { continue };
        let b_side = if a % 2 == 0 { side } else { side.other() };
        for b in 0..n {
            let Some(pb) = interleaved(bc, b_side, b) else { continue };
            for c in ((a + b) % 2..n).step_by(2) {
                if let Some(pc) = interleaved(bc, side, c) {
                    f(a, b, c, pa, pb, pc);
                }
            }
        }
    }
}

fn empty_side(bc: &BipartiteConfig, side: Side) -> SideTable {
    let n = table_size(bc);
    SideTable {
        side,
        values: Cube::zeros(n),
        defined: vec![false; n * n * n],
        legend: legend(bc, side, n),
        legend_other: legend(bc, side.other(), n),
    }
}

/// Eigenvalue of a relation on the spectral pair (or one-sided idempotent) `r`.
fn eigenvalue(es: &EigenSystem, part: Part, r: usize) -> f64 {
    match part {
        Part::X(i) => es.p_beta.get(r, i),
        Part::Y(i) => es.p_gamma.get(r, i),
        Part::N(j) | Part::Nt(j) => es.p_bg.get(r, j - 1),
    }
}

/// `sum(M_c ∘ M_a M_b) / sum(M_c)` through the eigenvalue tables.
fn formula_value(es: &EigenSystem, side: Side, pa: Part, pb: Part, pc: Part) -> f64 {
    let within = |p: Part| matches!(p, Part::X(_) | Part::Y(_));
    let (m, size, k) = match side {
        Side::Beta => (&es.m_beta, es.beta_size as f64, &es.k_beta),
        Side::Gamma => (&es.m_gamma, es.gamma_size as f64, &es.k_gamma),
    };
    let count = if within(pa) && within(pb) && within(pc) { m.len() } else { es.t_tilde() + 1 };
    let valency = match pc {
        Part::X(i) | Part::Y(i) => k[i],
        Part::N(j) => es.k_bg[j - 1],
        Part::Nt(j) => es.k_gb[j - 1],
    };
    let total: f64 = (0..count)
        .map(|r| m[r] * eigenvalue(es, pc, r) * eigenvalue(es, pa, r) * eigenvalue(es, pb, r))
        .sum();
    total / (size * valency)
}

/// Intersection numbers from the eigenvalue tables, rounded to integers
/// when within `int_tol`.
pub fn intersection_numbers(bc: &BipartiteConfig, es: &EigenSystem, int_tol: f64) -> IntersectionTable {
    let mut residual = 0.0_f64;
    let mut failures = Vec::new();
    let mut build = |side: Side| {
        let mut table = empty_side(bc, side);
        for_each_cell(bc, side, |a, b, c, pa, pb, pc| {
            let v = formula_value(es, side, pa, pb, pc);
            let rounded = v.round();
            let off = (v - rounded).abs();
            residual = residual.max(off);
            let p = table.values.pos(a, b, c);
            table.defined[p] = true;
            if off <= int_tol && rounded >= 0.0 {
                table.values.values[p] = rounded + 0.0;
            } else {
                table.values.values[p] = v;
                failures.push(IntegralityFailure { side, a, b, c, value: v });
            }
        });
        table
    };
    let xi = build(Side::Beta);
    let sigma = build(Side::Gamma);
    IntersectionTable { xi, sigma, residual, failures }
}

/// Intersection numbers read exactly off integer matrix products.
pub fn intersection_oracle(bc: &BipartiteConfig) -> Result<IntersectionTable> {
    let build = |side: Side| -> Result<SideTable> {
        let mut table = empty_side(bc, side);
        let mut err = None;
        let n = table.values.size;
        for a in 0..n {
            let Some(pa) = interleaved(bc, side, a) else { continue };
            let b_side = if a % 2 == 0 { side } else { side.other() };
            for b in 0..n {
                let Some(pb) = interleaved(bc, b_side, b) else { continue };
                let product = part_matrix(bc, pa).matmul(&part_matrix(bc, pb));
                let targets: Vec<(usize, Part)> = ((a + b) % 2..n)
                    .step_by(2)
                    .filter_map(|c| interleaved(bc, side, c).map(|p| (c, p)))
                    .collect();
                let mats: Vec<Matrix> = targets.iter().map(|&(_, p)| part_matrix(bc, p)).collect();
                let refs: Vec<&Matrix> = mats.iter().collect();
                match decompose_on_supports(&product, &refs) {
                    Ok(coeffs) => {
                        for (&(c, _), v) in targets.iter().zip(coeffs) {
                            let p = table.values.pos(a, b, c);
                            table.defined[p] = true;
                            table.values.values[p] = v;
                        }
                    }
                    Err((k, first, second)) => {
                        err.get_or_insert(Error::Defect {
                            location: format!("{pa} {pb} on the support of {}", targets[k].1),
                            first,
                            second,
                        });
                    }
                }
            }
        }
        match err {
            Some(e) => Err(e),
            None => Ok(table),
        }
    };
    let xi = build(Side::Beta)?;
    let sigma = build(Side::Gamma)?;
    Ok(IntersectionTable { xi, sigma, residual: 0.0, failures: Vec::new() })
}

/// Largest violation of `Σ_c ξ_{a,b}^c k_c = k_a k_b` over both sides.
pub fn row_sum_residual(bc: &BipartiteConfig, table: &IntersectionTable) -> f64 {
    let valency = |p: Part| part_matrix(bc, p).row(0).iter().sum::<f64>();
    let mut worst = 0.0_f64;
    for side in [Side::Beta, Side::Gamma] {
        let t = table.side(side);
        let n = t.values.size;
        for a in 0..n {
            let Some(pa) = interleaved(bc, side, a) else { continue };
            let b_side = if a % 2 == 0 { side } else { side.other() };
            for b in 0..n {
                let Some(pb) = interleaved(bc, b_side, b) else { continue };
                let total: f64 = (0..n)
                    .filter(|&c| t.is_defined(a, b, c))
                    .map(|c| t.get(a, b, c) * valency(interleaved(bc, side, c).unwrap()))
                    .sum();
                worst = worst.max((total - valency(pa) * valency(pb)).abs());
            }
        }
    }
    worst
}

/// Krein parameters `λ_ij(h)`, `Δ_ij(h)` and `ρ_ij(h)`, each cube indexed
/// `(i, j, h)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KreinTable {
    pub lambda: Cube,
    pub delta: Cube,
    pub rho: Cube,
    /// Formula against direct Schur projection, per family.
    pub residuals: KreinResiduals,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct KreinResiduals {
    pub lambda: f64,
    pub delta: f64,
    pub rho: f64,
    /// `Δ` summed over the β cells against the γ cells.
    pub delta_symmetry: f64,
}

impl KreinResiduals {
    pub fn max(&self) -> f64 {
        self.lambda.max(self.delta).max(self.rho).max(self.delta_symmetry)
    }
}

impl KreinTable {
    /// A table from given values, with no cross-check residuals.
    pub fn new(lambda: Cube, delta: Cube, rho: Cube) -> Result<Self> {
        let t = delta.size;
        if t > lambda.size || t > rho.size {
            return Err(Error::Structural(format!(
                "delta table ({t}) is larger than lambda ({}) or rho ({})",
                lambda.size, rho.size
            )));
        }
        Ok(KreinTable { lambda, delta, rho, residuals: KreinResiduals::default() })
    }
}

/// `(1/(s m_h)) Σ_ℓ Q_{ℓh} Q_{ℓi} Q_{ℓj} k_ℓ` over all triples.
fn krein_formula(q: &Matrix, k: &[f64], m: &[f64], s: f64) -> Cube {
    let n = q.cols();
    let mut cube = Cube::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for h in 0..n {
                let total: f64 = (0..q.rows()).map(|l| q.get(l, h) * q.get(l, i) * q.get(l, j) * k[l]).sum();
                cube.set(i, j, h, total / (s * m[h]));
            }
        }
    }
    cube
}

/// `scale · sum(E_h ∘ E_i ∘ E_j) / trace-weight_h` over all triples.
fn krein_direct(basis: &[Matrix], m: &[f64], scale: f64) -> Cube {
    let n = basis.len();
    let mut cube = Cube::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let ij = basis[i].schur(&basis[j]);
            for h in 0..n {
                cube.set(i, j, h, scale * basis[h].dot(&ij) / m[h]);
            }
        }
    }
    cube
}

pub fn krein_parameters(sb: &SpectralBasis, es: &EigenSystem, beta_size: usize, gamma_size: usize, _tol: Tolerance) -> KreinTable {
    let (b, g) = (beta_size as f64, gamma_size as f64);
    let lambda = krein_formula(&es.q_beta, &es.k_beta, &es.m_beta, b);
    let rho = krein_formula(&es.q_gamma, &es.k_gamma, &es.m_gamma, g);
    let delta = krein_formula(&es.q_bg, &es.k_bg, &es.m_beta, g);
    let delta_gamma = krein_formula(&es.q_bg, &es.k_gb, &es.m_gamma, b);
    let residuals = KreinResiduals {
        lambda: lambda.max_abs_diff(&krein_direct(&sb.l, &es.m_beta, b)),
        rho: rho.max_abs_diff(&krein_direct(&sb.r, &es.m_gamma, g)),
        delta: delta.max_abs_diff(&krein_direct(&sb.d, &es.m_beta, (b * g).sqrt())),
        delta_symmetry: delta.max_abs_diff(&delta_gamma),
    };
    KreinTable { lambda, delta, rho, residuals }
}

/// The three inequalities of the Krein condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KreinCondition {
    /// `λ_ij(h) >= 0`.
    Lambda,
    /// `ρ_ij(h) >= 0`.
    Rho,
    /// `λ_ij(h) ρ_ij(h) >= Δ_ij(h)²`.
    Minor,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KreinVerdict {
    pub condition: KreinCondition,
    pub i: usize,
    pub j: usize,
    pub h: usize,
    /// Value of the left side minus the right side.
    pub margin: f64,
    pub passed: bool,
}

/// One verdict per triple and condition; a verdict passes when its
/// margin is at least `-tol`.
pub fn krein_feasibility(kt: &KreinTable, tol: Tolerance) -> Vec<KreinVerdict> {
    let mut out = Vec::new();
    let mut push = |condition, cube: &Cube, margin: &dyn Fn(usize, usize, usize) -> f64| {
        for i in 0..cube.size {
            for j in 0..cube.size {
                for h in 0..cube.size {
                    let m = margin(i, j, h);
                    out.push(KreinVerdict { condition, i, j, h, margin: m, passed: m >= -tol.eps() });
                }
            }
        }
    };
    push(KreinCondition::Lambda, &kt.lambda, &|i, j, h| kt.lambda.get(i, j, h));
    push(KreinCondition::Rho, &kt.rho, &|i, j, h| kt.rho.get(i, j, h));
    push(KreinCondition::Minor, &kt.delta, &|i, j, h| {
        kt.lambda.get(i, j, h) * kt.rho.get(i, j, h) - kt.delta.get(i, j, h).powi(2)
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parameters::eigenmatrices;
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

    fn tables(bc: &BipartiteConfig) -> (IntersectionTable, IntersectionTable, KreinTable) {
        let tol = Tolerance::default();
        let sb = build_spectral_basis(bc, tol).unwrap();
        let es = eigenmatrices(bc, &sb, tol).unwrap();
        let formula = intersection_numbers(bc, &es, DEFAULT_INT_TOL);
        let oracle = intersection_oracle(bc).unwrap();
        let kt = krein_parameters(&sb, &es, bc.beta_size(), bc.gamma_size(), tol);
        (formula, oracle, kt)
    }

    #[test]
    fn interleaving() {
        let bc = fano();
        assert_eq!(interleaved(&bc, Side::Beta, 0), Some(Part::X(0)));
        assert_eq!(interleaved(&bc, Side::Beta, 3), Some(Part::N(2)));
        assert_eq!(interleaved(&bc, Side::Gamma, 1), Some(Part::Nt(1)));
        assert_eq!(interleaved(&bc, Side::Beta, 4), None);
        assert_eq!(table_size(&bc), 4);
    }

    #[test]
    fn k23_numbers() {
        let bc = k23();
        let (formula, oracle, kt) = tables(&bc);
        assert_eq!(formula.xi.get(2, 1, 1), 1.0);
        assert!(formula.first_disagreement(&oracle).is_none());
        assert!(formula.failures.is_empty());
        // (J₂ - I)(J₂ - I) = I on the β side.
        assert_eq!(oracle.xi.get(2, 2, 0), 1.0);
        assert!(kt.residuals.max() < 1e-9);
        assert!(krein_feasibility(&kt, Tolerance::default()).iter().all(|v| v.passed));
    }

    #[test]
    fn fano_numbers() {
        let bc = fano();
        let (formula, oracle, kt) = tables(&bc);
        // (J - I) N₁ = 2 N₁ + 3 N₂.
        assert_eq!(formula.xi.get(2, 1, 1), 2.0);
        assert_eq!(formula.xi.get(2, 1, 3), 3.0);
        assert_eq!(formula.xi.describe(2, 1, 3), "X1 N1 -> N2");
        // N₁ N₁ᵀ = 3I + (J - I).
        assert_eq!(oracle.xi.get(1, 1, 0), 3.0);
        assert_eq!(oracle.xi.get(1, 1, 2), 1.0);
        assert!(formula.first_disagreement(&oracle).is_none());
        assert!(formula.residual < 1e-9);
        assert!(row_sum_residual(&bc, &oracle) == 0.0);
        assert!(kt.residuals.max() < 1e-9);
        // λ_00(0) = 1 and λ_00(1) = 0.
        assert!((kt.lambda.get(0, 0, 0) - 1.0).abs() < 1e-12);
        assert!(kt.lambda.get(0, 0, 1).abs() < 1e-12);
        assert!(krein_feasibility(&kt, Tolerance::default()).iter().all(|v| v.passed));
    }

    #[test]
    fn identity_action() {
        let bc = fano();
        let (_, oracle, _) = tables(&bc);
        for side in [Side::Beta, Side::Gamma] {
            let t = oracle.side(side);
            for (a, b, c, v) in t.cells().filter(|&(a, ..)| a == 0) {
                assert_eq!(v, if b == c { 1.0 } else { 0.0 }, "{side:?} {a} {b} {c}");
            }
        }
    }

    #[test]
    fn synthetic_violation() {
        let one = |x: f64| Cube::from_nested(&[vec![vec![x]]]).unwrap();
        let kt = KreinTable::new(one(1.0), one(2.0), one(1.0)).unwrap();
        let verdicts = krein_feasibility(&kt, Tolerance::default());
        let minor = verdicts.iter().find(|v| v.condition == KreinCondition::Minor).unwrap();
        assert!(!minor.passed);
        assert_eq!(minor.margin, -3.0);
    }

    #[test]
    fn oracle_reports_defect() {
        // Relabel one block so that X₁N₁ is no longer constant on N₂.
        let mut n1 = Matrix::zeros(3, 3);
        for (p, b) in [(0, 0), (1, 0), (1, 1), (2, 2)] {
            n1.set(p, b, 1.0);
        }
        let n2 = Matrix::ones(3, 3).sub(&n1);
        let bc = BipartiteConfig::new(3, 3, vec![Matrix::identity(3), complement(3)], vec![Matrix::identity(3), complement(3)], vec![n1, n2])
            .unwrap();
        assert!(matches!(intersection_oracle(&bc), Err(Error::Defect { .. })));
    }
}
