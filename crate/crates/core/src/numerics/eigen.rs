use super::{Matrix, Tolerance};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// One clustered eigenvalue (or, for a commuting family, one vector of
/// eigenvalues) together with the orthogonal projector onto its eigenspace.
#[derive(Clone, Debug)]
pub struct Eigenspace {
    /// One eigenvalue per family member; a single entry for `sym_eigen`.
    pub values: Vec<f64>,
    pub multiplicity: usize,
    pub projector: Matrix,
    basis: Matrix,
}

impl Eigenspace {
    pub fn value(&self) -> f64 {
        self.values[0]
    }

    /// Orthonormal basis of the eigenspace, one vector per column.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub spaces: Vec<Eigenspace>,
}

impl EigenDecomposition {
    pub fn eigenvalues(&self) -> Vec<(f64, usize)> {
        self.spaces.iter().map(|s| (s.value(), s.multiplicity)).collect()
    }

    pub fn projectors(&self) -> impl Iterator<Item = &Matrix> {
        self.spaces.iter().map(|s| &s.projector)
    }

    pub fn dimension(&self) -> usize {
        self.spaces.iter().map(|s| s.multiplicity).sum()
    }

    /// `Σ θ · E` for the family member at `member`.
    pub fn reconstruct(&self, member: usize) -> Matrix {
        let n = self.spaces[0].projector.rows();
        let mut out = Matrix::zeros(n, n);
        for s in &self.spaces {
            out.add_assign_scaled(&s.projector, s.values[member]);
        }
        out
    }
}

fn check_symmetric(m: &Matrix, tol: Tolerance) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let bound = tol.eps() * (1.0 + m.max_abs());
    match m.first_asymmetry(bound) {
        Some((row, col, difference)) => Err(Error::NotSymmetric { row, col, difference }),
        None => Ok(()),
    }
}

/// Cyclic Jacobi diagonalization of a symmetric matrix.
///
/// Returns the eigenvalues (unsorted) and a matrix whose columns are the
/// matching orthonormal eigenvectors. Sweeps visit `(p, q)` pairs in a fixed
/// row-major order so results are reproducible bit for bit.
pub(crate) fn jacobi(m: &Matrix) -> (Vec<f64>, Matrix) {
    let n = m.rows();
    let mut a = m.symmetrized();
    let mut v = Matrix::identity(n);
    for sweep in 0..MAX_SWEEPS {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = a.get(i, j);
                if i == j {
                    diag += x * x;
                } else {
                    off += x * x;
                }
            }
        }
        if off == 0.0 || off.sqrt() <= f64::EPSILON * diag.sqrt() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                // Once past the first few sweeps, drop entries that can no
                // longer change either diagonal element.
                if sweep > 3 {
                    let g = 100.0 * apq.abs();
                    if app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                        a.set(p, q, 0.0);
                        a.set(q, p, 0.0);
                        continue;
                    }
                }
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    ((0..n).map(|i| a.get(i, i)).collect(), v)
}

/// Whether two eigenvalues fall in the same cluster.
pub fn same_cluster(a: f64, b: f64, tol: Tolerance) -> bool {
    (a - b).abs() <= tol.eps() * (1.0 + a.abs().max(b.abs()))
}

/// Groups values into clusters by sorted single linkage; returns
/// `(representative, member indices)` in decreasing order of value.
pub fn cluster_values(values: &[f64], tol: Tolerance) -> Vec<(f64, Vec<usize>)> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for idx in order {
        match clusters.last_mut() {
            Some(c) if same_cluster(values[*c.last().unwrap()], values[idx], tol) => c.push(idx),
            _ => clusters.push(vec![idx]),
        }
    }
    clusters
        .into_iter()
        .map(|c| {
            let mean = c.iter().map(|&i| values[i]).sum::<f64>() / c.len() as f64;
            (mean, c)
        })
        .collect()
}

fn columns(m: &Matrix, cols: &[usize]) -> Matrix {
    Matrix::from_fn(m.rows(), cols.len(), |i, j| m.get(i, cols[j]))
}

/// Symmetric eigendecomposition with clustered eigenvalues, sorted by
/// decreasing value, each carrying its orthogonal spectral projector.
pub fn sym_eigen(m: &Matrix, tol: Tolerance) -> Result<EigenDecomposition> {
    check_symmetric(m, tol)?;
    let (values, vectors) = jacobi(m);
    let spaces = cluster_values(&values, tol)
        .into_iter()
        .map(|(value, members)| {
            let basis = columns(&vectors, &members);
            Eigenspace {
                values: vec![value],
                multiplicity: members.len(),
                projector: basis.matmul(&basis.transpose()),
                basis,
            }
        })
        .collect();
    Ok(EigenDecomposition { spaces })
}

/// Minimal common idempotents of a commuting family of symmetric matrices.
///
/// The family is refined one member at a time: every current eigenspace is
/// split by the eigenvalues of the next member compressed onto it. Each
/// resulting space is labelled with its eigenvalue vector across the family;
/// spaces are ordered by that vector, decreasing lexicographically.
pub fn common_eigen(family: &[Matrix], tol: Tolerance) -> Result<EigenDecomposition> {
    let first = family
        .first()
        .ok_or_else(|| Error::Structural("common eigendecomposition of an empty family".into()))?;
    let n = first.rows();
    for m in family {
        check_symmetric(m, tol)?;
        if m.rows() != n {
            return Err(Error::ShapeMismatch { expected: (n, n), found: m.shape() });
        }
    }
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            let (a, b) = (&family[i], &family[j]);
            let residual = a.matmul(b).max_abs_diff(&b.matmul(a));
            let bound = tol.eps() * (1.0 + a.max_abs() * b.max_abs() * n as f64);
            if residual > bound {
                return Err(Error::NonCommuting { left: i, right: j, residual });
            }
        }
    }

    let mut blocks = vec![Matrix::identity(n)];
    for m in family {
        let mut refined = Vec::with_capacity(blocks.len());
        for basis in &blocks {
            let compressed = basis.transpose().matmul(m).matmul(basis);
            let (values, vectors) = jacobi(&compressed);
            for (_, members) in cluster_values(&values, tol) {
                refined.push(basis.matmul(&columns(&vectors, &members)));
            }
        }
        blocks = refined;
    }

    let mut spaces: Vec<Eigenspace> = blocks
        .into_iter()
        .map(|basis| {
            let k = basis.cols();
            let bt = basis.transpose();
            let values = family.iter().map(|m| bt.matmul(m).matmul(&basis).trace() / k as f64).collect();
            Eigenspace {
                values,
                multiplicity: k,
                projector: basis.matmul(&bt),
                basis,
            }
        })
        .collect();
    spaces.sort_by(|a, b| {
        for (x, y) in a.values.iter().zip(&b.values) {
            if !same_cluster(*x, *y, tol) {
                return y.total_cmp(x);
            }
        }
        std::cmp::Ordering::Equal
    });
    Ok(EigenDecomposition { spaces })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    /// Multiplicity of `lambda` as `n - rank(M - lambda I)` by exact rational
    /// elimination; valid for symmetric integer matrices and integer `lambda`.
    fn exact_multiplicity(m: &Matrix, lambda: i64) -> usize {
        let n = m.rows();
        let mut a: Vec<Vec<(i64, i64)>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let d = if i == j { lambda } else { 0 };
                        (m.get(i, j) as i64 - d, 1)
                    })
                    .collect()
            })
            .collect();
        fn gcd(a: i64, b: i64) -> i64 {
            if b == 0 { a.abs() } else { gcd(b, a % b) }
        }
        fn norm((p, q): (i64, i64)) -> (i64, i64) {
            let g = gcd(p, q).max(1);
            let s = if q < 0 { -1 } else { 1 };
            (s * p / g, s * q / g)
        }
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| a[r][col].0 != 0) else { continue };
            a.swap(rank, piv);
            for r in 0..n {
                if r != rank && a[r][col].0 != 0 {
                    let (fp, fq) = norm((a[r][col].0 * a[rank][col].1, a[r][col].1 * a[rank][col].0));
                    for c in 0..n {
                        let (x, y) = a[rank][c];
                        let sub = norm((fp * x, fq * y));
                        let cur = a[r][c];
                        a[r][c] = norm((cur.0 * sub.1 - sub.0 * cur.1, cur.1 * sub.1));
                    }
                }
            }
            rank += 1;
        }
        n - rank
    }

    #[test]
    fn identity_has_single_space() {
        let d = sym_eigen(&Matrix::identity(3), tol()).unwrap();
        assert_eq!(d.eigenvalues(), vec![(1.0, 3)]);
        assert!(d.spaces[0].projector.max_abs_diff(&Matrix::identity(3)) < 1e-15);
    }

    #[test]
    fn all_ones_two_by_two() {
        let j = Matrix::ones(2, 2);
        let d = sym_eigen(&j, tol()).unwrap();
        assert_eq!(d.spaces.len(), 2);
        assert!((d.spaces[0].value() - 2.0).abs() < 1e-14);
        assert!(d.spaces[1].value().abs() < 1e-14);
        assert!(d.spaces[0].projector.max_abs_diff(&j.scale(0.5)) < 1e-14);
        let rest = Matrix::identity(2).sub(&j.scale(0.5));
        assert!(d.spaces[1].projector.max_abs_diff(&rest) < 1e-14);
    }

    #[test]
    fn fano_gram_spectrum() {
        let m = Matrix::identity(7).scale(2.0).add(&Matrix::ones(7, 7));
        // Oracle: multiplicities from exact ranks of M - lambda I; they sum to 7,
        // so {9, 2} is the whole spectrum.
        assert_eq!(exact_multiplicity(&m, 9), 1);
        assert_eq!(exact_multiplicity(&m, 2), 6);
        let d = sym_eigen(&m, tol()).unwrap();
        assert_eq!(d.spaces.len(), 2);
        assert!((d.spaces[0].value() - 9.0).abs() < 1e-12);
        assert_eq!(d.spaces[0].multiplicity, 1);
        assert!((d.spaces[1].value() - 2.0).abs() < 1e-12);
        assert_eq!(d.spaces[1].multiplicity, 6);
        assert!(d.reconstruct(0).max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn rejects_asymmetric_with_pair() {
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        match sym_eigen(&m, tol()) {
            Err(Error::NotSymmetric { row: 0, col: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            sym_eigen(&Matrix::zeros(2, 3), tol()),
            Err(Error::NotSquare { .. })
        ));
    }

    fn bipartite(n: &Matrix) -> Matrix {
        let (p, q) = n.shape();
        let mut a = Matrix::zeros(p + q, p + q);
        a.set_block(0, p, n);
        a.set_block(p, 0, &n.transpose());
        a
    }

    #[test]
    fn common_eigen_of_k23() {
        let a = bipartite(&Matrix::ones(2, 3));
        let d = common_eigen(&[a.clone(), Matrix::identity(5)], tol()).unwrap();
        // Oracle: A² = diag(3J₂, 2J₃) has nonzero eigenvalue 6 once per block,
        // rank A = 2 and the spectrum of a bipartite matrix is symmetric, so
        // the spectrum is {√6, 0³, -√6}.
        let s6 = 6.0_f64.sqrt();
        let got: Vec<(f64, usize)> = d.spaces.iter().map(|s| (s.values[0], s.multiplicity)).collect();
        assert_eq!(got.len(), 3);
        assert!((got[0].0 - s6).abs() < 1e-12 && got[0].1 == 1);
        assert!(got[1].0.abs() < 1e-12 && got[1].1 == 3);
        assert!((got[2].0 + s6).abs() < 1e-12 && got[2].1 == 1);
        for s in &d.spaces {
            let e = &s.projector;
            assert!(e.matmul(e).max_abs_diff(e) < 1e-12);
            assert!(e.matmul(&a).matmul(e).max_abs_diff(&e.scale(s.values[0])) < 1e-12);
        }
    }

    #[test]
    fn common_eigen_of_heawood() {
        let lines = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];
        let n = Matrix::from_fn(7, 7, |p, b| if lines[b].contains(&p) { 1.0 } else { 0.0 });
        let a = bipartite(&n);
        let d = common_eigen(&[a, Matrix::identity(14)], tol()).unwrap();
        // Oracle: A² = diag(2I+J, 2I+J) with spectrum {9, 2⁶} per block.
        let s2 = 2.0_f64.sqrt();
        let expect = [(3.0, 1), (s2, 6), (-s2, 6), (-3.0, 1)];
        assert_eq!(d.spaces.len(), 4);
        for (s, (v, m)) in d.spaces.iter().zip(expect) {
            assert!((s.values[0] - v).abs() < 1e-12, "{} vs {v}", s.values[0]);
            assert_eq!(s.multiplicity, m);
        }
    }

    #[test]
    fn common_eigen_identity_family() {
        let d = common_eigen(&[Matrix::identity(4)], tol()).unwrap();
        assert_eq!(d.spaces.len(), 1);
        assert!(d.spaces[0].projector.max_abs_diff(&Matrix::identity(4)) < 1e-15);
    }

    #[test]
    fn non_commuting_pair_is_named() {
        let a = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let b = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        match common_eigen(&[Matrix::identity(2), a, b], tol()) {
            Err(Error::NonCommuting { left: 1, right: 2, residual }) => assert!(residual > 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }
}
