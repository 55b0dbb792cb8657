//! Real polynomials in monomial form and Newton interpolation.

use serde::{Serialize, Serializer};
use std::fmt;

use crate::numerics::{round_sig, Matrix};

/// Polynomial with coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![0.0; k + 1];
        c[k] = 1.0;
        Poly { coeffs: c }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Index of the last stored coefficient; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let at = |p: &Poly, k: usize| p.coeffs.get(k).copied().unwrap_or(0.0);
        Poly::new((0..n).map(|k| at(self, k) + at(other, k)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut c = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    /// `(x - root) · self`.
    pub fn times_root(&self, root: f64) -> Poly {
        self.mul(&Poly { coeffs: vec![-root, 1.0] })
    }

    /// `p(A)` by Horner's rule.
    pub fn eval_matrix(&self, a: &Matrix) -> Matrix {
        let n = a.rows();
        let mut acc = Matrix::zeros(n, n);
        for &c in self.coeffs.iter().rev() {
            acc = acc.matmul(a);
            acc.add_assign_scaled(&Matrix::identity(n), c);
        }
        acc
    }

    /// Largest coefficient on powers whose parity differs from `parity`.
    pub fn parity_defect(&self, parity: usize) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 2 != parity % 2)
            .fold(0.0_f64, |acc, (_, c)| acc.max(c.abs()))
    }

    /// Coefficients rounded to 12 significant digits.
    pub fn rounded(&self) -> Vec<f64> {
        self.coeffs.iter().map(|&c| round_sig(c, 12)).collect()
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rounded().serialize(s)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, c) in self.rounded().into_iter().enumerate().rev() {
            if c == 0.0 && (wrote || k > 0) {
                continue;
            }
            let sign = if c < 0.0 { "-" } else { "+" };
            if wrote {
                write!(f, " {sign} ")?;
            } else if c < 0.0 {
                f.write_str("-")?;
            }
            let a = c.abs();
            match (k, a == 1.0) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => f.write_str("x")?,
                (1, false) => write!(f, "{a}x")?,
                (_, true) => write!(f, "x^{k}")?,
                (_, false) => write!(f, "{a}x^{k}")?,
            }
            wrote = true;
        }
        Ok(())
    }
}

/// Newton divided-difference coefficients `f[x_0..x_k]`.
pub fn divided_differences(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let mut table = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in (level..n).rev() {
            table[i] = (table[i] - table[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    table
}

/// Monomial form of the Newton polynomial built from the first `k + 1`
/// divided differences.
fn newton_prefix(xs: &[f64], dd: &[f64], k: usize) -> Poly {
    let mut p = Poly::constant(dd[k]);
    for j in (0..k).rev() {
        p = p.times_root(xs[j]).add(&Poly::constant(dd[j]));
    }
    p
}

/// Value of the Newton prefix at `x`, evaluated in nested Newton form.
fn newton_eval(xs: &[f64], dd: &[f64], k: usize, x: f64) -> f64 {
    (0..=k).rev().fold(0.0, |acc, j| acc * (x - xs[j]) + dd[j])
}

/// Lowest-degree polynomial through `(xs, ys)` up to `bound`: the shortest
/// Newton prefix whose values stay within `bound` at every node.
pub fn minimal_interpolant(xs: &[f64], ys: &[f64], bound: f64) -> (Poly, usize) {
    let dd = divided_differences(xs, ys);
    let last = xs.len().saturating_sub(1);
    let degree = (0..=last)
        .find(|&k| xs.iter().zip(ys).all(|(&x, &y)| (newton_eval(xs, &dd, k, x) - y).abs() <= bound))
        .unwrap_or(last);
    (newton_prefix(xs, &dd, degree), degree)
}

/// `Π (x - x_k)` over the nodes.
pub fn annihilator(xs: &[f64]) -> Poly {
    xs.iter().fold(Poly::constant(1.0), |p, &x| p.times_root(x))
}

/// Zeroes coefficients whose largest contribution on the nodes is below
/// `bound`, removing rounding residue such as `1e-16 x` from even
/// polynomials.
fn snap(p: Poly, xs: &[f64], bound: f64) -> Poly {
    let reach = xs.iter().fold(1.0_f64, |a, x| a.max(x.abs()));
    let coeffs = p
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| if c.abs() * reach.powi(k as i32) <= bound { 0.0 } else { c })
        .collect();
    Poly::new(coeffs)
}

/// A polynomial of degree exactly `h` through distinct nodes `(xs, ys)`,
/// with a flag telling whether it had to be padded by the annihilator.
///
/// With more than `h` nodes the interpolant is unique, so it exists only
/// when the minimal interpolant has degree `h`. With at most `h` nodes the
/// minimal interpolant plus `x^{h-n} Π(x - x_k)` is returned.
pub fn interpolate_degree(xs: &[f64], ys: &[f64], h: usize, bound: f64) -> Option<(Poly, bool)> {
    let (p, d) = minimal_interpolant(xs, ys, bound);
    let noise = 1e-12 * (1.0 + ys.iter().fold(0.0_f64, |a, y| a.max(y.abs())));
    if h < xs.len() {
        return (d == h).then(|| (snap(p, xs, noise), false));
    }
    let pad = annihilator(xs).mul(&Poly::monomial(h - xs.len()));
    Some((snap(p, xs, noise).add(&pad), true))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_quadratic() {
        let xs = [6.0_f64.sqrt(), -(6.0_f64.sqrt()), 0.0];
        let (p, d) = minimal_interpolant(&xs, &[1.0, 1.0, -1.0], 1e-12);
        assert_eq!(d, 2);
        assert!((p.coeffs()[2] - 1.0 / 3.0).abs() < 1e-12);
        assert!(p.coeffs()[1].abs() < 1e-12);
        assert!((p.coeffs()[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn degree_detection() {
        let xs = [3.0, 1.0, -2.0];
        assert!(interpolate_degree(&xs, &[1.0, 1.0, 1.0], 0, 1e-12).is_some());
        assert!(interpolate_degree(&xs, &[1.0, 1.0, 1.0], 1, 1e-12).is_none());
        let (p, padded) = interpolate_degree(&[3.0], &[0.0], 1, 1e-12).unwrap();
        assert!(padded);
        assert_eq!(p.coeffs(), &[-3.0, 1.0]);
    }

    #[test]
    fn display_and_matrix_eval() {
        let p = Poly::new(vec![-1.0, 0.0, 1.0 / 3.0]);
        assert_eq!(p.to_string(), "0.333333333333x^2 - 1");
        assert_eq!(Poly::new(vec![0.0, -1.0]).to_string(), "-x");
        assert_eq!(Poly::constant(0.0).to_string(), "0");
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let p = Poly::new(vec![2.0, 0.0, 1.0]);
        assert_eq!(p.eval_matrix(&a), Matrix::identity(2).scale(3.0));
        assert_eq!(Poly::new(vec![1.0, 0.5, 2.0]).parity_defect(0), 0.5);
    }
}
