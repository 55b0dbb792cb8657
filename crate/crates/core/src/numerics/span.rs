use super::{Matrix, Tolerance};
use crate::error::{Error, Result};

fn check_shapes(family: &[Matrix]) -> Result<()> {
    if let Some(first) = family.first() {
        for m in family {
            if m.shape() != first.shape() {
                return Err(Error::ShapeMismatch { expected: first.shape(), found: m.shape() });
            }
        }
    }
    Ok(())
}

/// Dimension of the linear span of `family`, each matrix read as a flat vector.
///
/// Integer families are ranked exactly; anything else uses singular values
/// with threshold `tol.eps * sigma_max`.
pub fn span_dimension(family: &[Matrix], tol: Tolerance) -> Result<usize> {
    check_shapes(family)?;
    if family.is_empty() {
        return Ok(0);
    }
    if family.iter().all(Matrix::is_integral) {
        let mut basis = ExactSpan::new(family[0].data().len());
        for m in family {
            basis.insert(m)?;
        }
        return Ok(basis.dimension());
    }
    let sigma = singular_values(family);
    let top = sigma.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sigma.iter().filter(|&&s| s > tol.eps() * top).count())
}

/// Singular values of the matrix whose columns are the flattened family,
/// by one-sided Jacobi orthogonalization.
fn singular_values(family: &[Matrix]) -> Vec<f64> {
    let mut cols: Vec<Vec<f64>> = family.iter().map(|m| m.data().to_vec()).collect();
    let k = cols.len();
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha: f64 = cols[p].iter().map(|x| x * x).sum();
                let beta: f64 = cols[q].iter().map(|x| x * x).sum();
                let gamma: f64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (a, b) = (*x, *y);
                    *x = c * a - s * b;
                    *y = s * a + c * b;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    cols.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect()
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn to_integers(m: &Matrix) -> Result<Vec<i128>> {
    m.data()
        .iter()
        .map(|&x| {
            if x.abs() < 1e30 {
                Ok(x as i128)
            } else {
                Err(Error::Overflow)
            }
        })
        .collect()
}

/// Incrementally built echelon basis of integer vectors, reduced exactly with
/// gcd-normalized rows.
#[derive(Clone, Debug)]
pub struct ExactSpan {
    len: usize,
    rows: Vec<(usize, Vec<i128>)>,
}

impl ExactSpan {
    pub fn new(len: usize) -> Self {
        ExactSpan { len, rows: Vec::new() }
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut v: Vec<i128>) -> Result<Vec<i128>> {
        for (pivot, row) in &self.rows {
            let a = v[*pivot];
            if a == 0 {
                continue;
            }
            let b = row[*pivot];
            let g = gcd(a, b);
            let (fa, fb) = (b / g, a / g);
            for (x, &y) in v.iter_mut().zip(row) {
                let lhs = x.checked_mul(fa).ok_or(Error::Overflow)?;
                let rhs = y.checked_mul(fb).ok_or(Error::Overflow)?;
                *x = lhs.checked_sub(rhs).ok_or(Error::Overflow)?;
            }
            let g = v.iter().fold(0, |acc, &x| gcd(acc, x));
            if g > 1 {
                v.iter_mut().for_each(|x| *x /= g);
            }
        }
        Ok(v)
    }

    fn vector(&self, m: &Matrix) -> Result<Vec<i128>> {
        if m.data().len() != self.len {
            return Err(Error::ShapeMismatch { expected: (1, self.len), found: (1, m.data().len()) });
        }
        if !m.is_integral() {
            return Err(Error::Inconsistent("exact span test on a non-integer matrix".into()));
        }
        to_integers(m)
    }

    /// Adds `m` to the span; returns whether it was independent.
    pub fn insert(&mut self, m: &Matrix) -> Result<bool> {
        let v = self.reduce(self.vector(m)?)?;
        match v.iter().position(|&x| x != 0) {
            Some(pivot) => {
                self.rows.push((pivot, v));
                Ok(true)
            }
            None => Ok(false),
        }
    }

    pub fn contains(&self, m: &Matrix) -> Result<bool> {
        Ok(self.reduce(self.vector(m)?)?.iter().all(|&x| x == 0))
    }
}

/// Orthonormal basis of the span of a real family, for least-squares
/// membership tests.
#[derive(Clone, Debug)]
pub struct OrthoSpan {
    basis: Vec<Vec<f64>>,
}

impl OrthoSpan {
    pub fn new(family: &[Matrix]) -> Self {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for m in family {
            let mut v = m.data().to_vec();
            let norm0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            // Two Gram-Schmidt passes keep the basis orthogonal to rounding level.
            for _ in 0..2 {
                for b in &basis {
                    let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                    v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-10 * norm0.max(1.0) {
                basis.push(v.into_iter().map(|x| x / norm).collect());
            }
        }
        OrthoSpan { basis }
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Max-entry distance from `m` to its orthogonal projection on the span.
    pub fn residual(&self, m: &Matrix) -> f64 {
        let mut v = m.data().to_vec();
        for b in &self.basis {
            let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn dependent_triple() {
        let i = Matrix::identity(2);
        let j = Matrix::ones(2, 2);
        let d = j.sub(&i);
        assert_eq!(span_dimension(&[i, j, d], tol()).unwrap(), 2);
    }

    #[test]
    fn empty_family() {
        assert_eq!(span_dimension(&[], tol()).unwrap(), 0);
    }

    #[test]
    fn shape_mismatch() {
        let r = span_dimension(&[Matrix::identity(2), Matrix::identity(3)], tol());
        assert!(matches!(r, Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn irrational_family_uses_singular_values() {
        let s = 2.0_f64.sqrt();
        let a = Matrix::identity(2).scale(s);
        let b = Matrix::ones(2, 2).scale(s);
        let c = a.scale(3.0).add(&b.scale(-0.5));
        assert_eq!(span_dimension(&[a.clone(), b.clone(), c], tol()).unwrap(), 2);
        let e = Matrix::from_rows(&[vec![0.0, s], vec![0.0, 0.0]]).unwrap();
        assert_eq!(span_dimension(&[a, b, e], tol()).unwrap(), 3);
    }

    #[test]
    fn exact_membership() {
        let mut sp = ExactSpan::new(4);
        assert!(sp.insert(&Matrix::identity(2)).unwrap());
        assert!(sp.insert(&Matrix::ones(2, 2)).unwrap());
        assert!(sp.contains(&Matrix::ones(2, 2).sub(&Matrix::identity(2)).scale(5.0)).unwrap());
        assert!(!sp.contains(&Matrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap()).unwrap());
    }

    #[test]
    fn ortho_residual() {
        let sp = OrthoSpan::new(&[Matrix::identity(2), Matrix::ones(2, 2)]);
        assert_eq!(sp.dimension(), 2);
        assert!(sp.residual(&Matrix::ones(2, 2).scale(0.3)) < 1e-15);
        let off = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!((sp.residual(&off) - 0.5).abs() < 1e-15);
    }
}
