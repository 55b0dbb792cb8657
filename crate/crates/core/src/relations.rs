//! Coherent configurations over an arbitrary fibre partition.

use crate::error::{Error, Result};
use crate::numerics::{ExactSpan, Matrix};
use crate::report::{Check, VerificationReport, Witness};
use serde::Serialize;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibrePartition {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl FibrePartition {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::Structural("a configuration needs at least one fibre".into()));
        }
        if let Some(i) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::Structural(format!("fibre {i} is empty")));
        }
        let offsets = sizes
            .iter()
            .scan(0, |acc, &s| {
                let o = *acc;
                *acc += s;
                Some(o)
            })
            .collect();
        Ok(FibrePartition { sizes, offsets })
    }

    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, i: usize) -> usize {
        self.sizes[i]
    }

    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }
}

/// Position of a relation: block `(source, target)` and index inside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RelationId {
    pub source: usize,
    pub target: usize,
    pub index: usize,
}

impl RelationId {
    pub fn new(source: usize, target: usize, index: usize) -> Self {
        RelationId { source, target, index }
    }

    pub fn block(&self) -> (usize, usize) {
        (self.source, self.target)
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.index == 0
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A[{},{}]{}", self.source, self.target, self.index)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub id: RelationId,
    pub matrix: Matrix,
}

/// Smallest index used inside block `(i, j)`: 0 on the diagonal, 1 elsewhere.
pub fn first_index(i: usize, j: usize) -> usize {
    usize::from(i != j)
}

/// A family of 01-matrices arranged in blocks over a fibre partition.
///
/// Construction checks shapes, 01 entries and index layout only; the
/// coherence axioms are checked by [`CoherentConfig::verify_axioms`].
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentConfig {
    fibres: FibrePartition,
    relations: Vec<Relation>,
    counts: Vec<Vec<usize>>,
}

impl CoherentConfig {
    pub fn new(sizes: Vec<usize>, mut relations: Vec<Relation>) -> Result<Self> {
        let fibres = FibrePartition::new(sizes)?;
        let f = fibres.count();
        relations.sort_by_key(|r| r.id);
        let mut counts = vec![vec![0usize; f]; f];
        for (pos, rel) in relations.iter().enumerate() {
            let RelationId { source: i, target: j, index } = rel.id;
            if i >= f || j >= f {
                return Err(Error::Structural(format!("relation {} refers to a missing fibre", rel.id)));
            }
            let want = (fibres.size(i), fibres.size(j));
            if rel.matrix.shape() != want {
                return Err(Error::Structural(format!(
                    "relation {} has shape {:?}, block needs {:?}",
                    rel.id,
                    rel.matrix.shape(),
                    want
                )));
            }
            if let Some((r, c)) = rel.matrix.first_non_binary() {
                return Err(Error::Structural(format!("relation {} has a non-01 entry at ({r},{c})", rel.id)));
            }
            if pos > 0 && relations[pos - 1].id == rel.id {
                return Err(Error::Structural(format!("relation {} given twice", rel.id)));
            }
            let expected = first_index(i, j) + counts[i][j];
            if index != expected {
                return Err(Error::Structural(format!(
                    "block ({i},{j}) indices must run contiguously from {}; found {index} where {expected} was expected",
                    first_index(i, j)
                )));
            }
            counts[i][j] += 1;
        }
        for i in 0..f {
            for j in 0..f {
                if counts[i][j] == 0 {
                    return Err(Error::Structural(format!("block ({i},{j}) has no relations")));
                }
            }
        }
        Ok(CoherentConfig { fibres, relations, counts })
    }

    pub fn fibres(&self) -> &FibrePartition {
        &self.fibres
    }

    pub fn fibre_count(&self) -> usize {
        self.fibres.count()
    }

    /// Size of the ground set.
    pub fn order(&self) -> usize {
        self.fibres.total()
    }

    /// All relations sorted by `(source, target, index)`.
    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn block(&self, i: usize, j: usize) -> impl Iterator<Item = &Relation> {
        self.relations.iter().filter(move |r| r.id.block() == (i, j))
    }

    pub fn block_matrices(&self, i: usize, j: usize) -> Vec<&Matrix> {
        self.block(i, j).map(|r| &r.matrix).collect()
    }

    pub fn relation(&self, id: RelationId) -> Option<&Relation> {
        self.relations.binary_search_by_key(&id, |r| r.id).ok().map(|p| &self.relations[p])
    }

    /// Number of relations in block `(i, j)`.
    pub fn block_count(&self, i: usize, j: usize) -> usize {
        self.counts[i][j]
    }

    /// `t_ij`: the largest index used in block `(i, j)`.
    pub fn t(&self, i: usize, j: usize) -> usize {
        self.counts[i][j] + first_index(i, j) - 1
    }

    /// The relation embedded in the full ground set, zero outside its block.
    pub fn hat(&self, rel: &Relation) -> Matrix {
        let n = self.order();
        let mut m = Matrix::zeros(n, n);
        m.set_block(self.fibres.offset(rel.id.source), self.fibres.offset(rel.id.target), &rel.matrix);
        m
    }

    pub fn type_of(&self) -> TypeMatrix {
        TypeMatrix { counts: self.counts.clone() }
    }

    /// Every diagonal-block relation is symmetric.
    pub fn is_fibre_symmetric(&self) -> bool {
        self.relations
            .iter()
            .filter(|r| r.id.source == r.id.target)
            .all(|r| r.matrix.first_asymmetry(0.0).is_none())
    }

    /// Checks A1 (identity split), A2 (blocks partition J), A3 (transpose
    /// closure) and A4 (products stay in the span), each exactly.
    pub fn verify_axioms(&self) -> Result<VerificationReport> {
        let mut report = VerificationReport::default();
        report.push(Check::from_witness("A1", self.identity_witness()));
        report.push(Check::from_witness("A2", self.partition_witness()));
        report.push(Check::from_witness("A3", self.transpose_witness()));
        report.push(Check::from_witness("A4", self.product_witness()?));
        Ok(report)
    }

    fn identity_witness(&self) -> Option<Witness> {
        for i in 0..self.fibre_count() {
            let id = RelationId::new(i, i, 0);
            let m = &self.relation(id).expect("diagonal blocks are nonempty").matrix;
            let eye = Matrix::identity(m.rows());
            if let Some((row, col)) = first_difference(m, &eye) {
                return Some(Witness::Entry { location: id.to_string(), row, col });
            }
        }
        None
    }

    fn partition_witness(&self) -> Option<Witness> {
        let f = self.fibre_count();
        for i in 0..f {
            for j in 0..f {
                let mut sum = Matrix::zeros(self.fibres.size(i), self.fibres.size(j));
                for m in self.block_matrices(i, j) {
                    sum.add_assign_scaled(m, 1.0);
                }
                let ones = Matrix::ones(sum.rows(), sum.cols());
                if let Some((row, col)) = first_difference(&sum, &ones) {
                    return Some(Witness::Entry { location: format!("block ({i},{j})"), row, col });
                }
            }
        }
        None
    }

    fn transpose_witness(&self) -> Option<Witness> {
        for rel in &self.relations {
            let t = rel.matrix.transpose();
            let (i, j) = rel.id.block();
            if !self.block(j, i).any(|r| r.matrix == t) {
                return Some(Witness::Note { text: format!("transpose of {} is not a relation of block ({j},{i})", rel.id) });
            }
        }
        None
    }

    fn product_witness(&self) -> Result<Option<Witness>> {
        let f = self.fibre_count();
        let mut spans = Vec::with_capacity(f * f);
        for i in 0..f {
            for h in 0..f {
                let mut sp = ExactSpan::new(self.fibres.size(i) * self.fibres.size(h));
                for m in self.block_matrices(i, h) {
                    sp.insert(m)?;
                }
                spans.push(sp);
            }
        }
        for a in &self.relations {
            for b in self.relations.iter().filter(|b| b.id.source == a.id.target) {
                let product = a.matrix.matmul(&b.matrix);
                if !spans[a.id.source * f + b.id.target].contains(&product)? {
                    return Ok(Some(Witness::Product { left: a.id.to_string(), right: b.id.to_string() }));
                }
            }
        }
        Ok(None)
    }
}

/// First row-major coordinate where two equally shaped matrices differ.
pub(crate) fn first_difference(a: &Matrix, b: &Matrix) -> Option<(usize, usize)> {
    (0..a.rows())
        .flat_map(|r| (0..a.cols()).map(move |c| (r, c)))
        .find(|&(r, c)| a.get(r, c) != b.get(r, c))
}

/// Coefficients of `product` on a family of disjoint 01 supports.
///
/// Returns the value read on each support, or the first two coordinates of
/// one support where the value is not constant.
pub fn decompose_on_supports(
    product: &Matrix,
    parts: &[&Matrix],
) -> std::result::Result<Vec<f64>, (usize, (usize, usize), (usize, usize))> {
    let mut coeffs = Vec::with_capacity(parts.len());
    for (k, part) in parts.iter().enumerate() {
        let mut first: Option<((usize, usize), f64)> = None;
        for (r, c) in part.support() {
            let v = product.get(r, c);
            match first {
                None => first = Some(((r, c), v)),
                Some((pos, w)) if w != v => return Err((k, pos, (r, c))),
                _ => {}
            }
        }
        coeffs.push(first.map_or(0.0, |(_, v)| v));
    }
    Ok(coeffs)
}

/// Relation counts per block; the diagonal holds `t_ii + 1`, off-diagonal
/// entries hold `t_ij`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeMatrix {
    pub counts: Vec<Vec<usize>>,
}

impl TypeMatrix {
    pub fn is_symmetric(&self) -> bool {
        let f = self.counts.len();
        (0..f).all(|i| (0..f).all(|j| self.counts[i][j] == self.counts[j][i]))
    }
}

impl fmt::Display for TypeMatrix {
    /// Upper triangle when symmetric, e.g. `(2 2; 3)`; full rows otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = self.is_symmetric();
        let rows: Vec<String> = self
            .counts
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let start = if sym { i } else { 0 };
                row[start..].iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
            })
            .collect();
        write!(f, "({})", rows.join("; "))
    }
}
