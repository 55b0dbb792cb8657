//! Two-fibre configurations in X/Y/N block form and the C1-C6 verifier.

use crate::error::{Error, Result};
use crate::numerics::{ExactSpan, Matrix};
use crate::relations::{first_difference, CoherentConfig, Relation, RelationId};
use crate::report::{Check, VerificationReport, Witness};
use serde::Serialize;

/// Relations within β (`x`), within γ (`y`) and from β to γ (`n`).
///
/// `x[0]` and `y[0]` are expected to be identities; `n[h]` holds `N_{h+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteConfig {
    beta_size: usize,
    gamma_size: usize,
    x: Vec<Matrix>,
    y: Vec<Matrix>,
    n: Vec<Matrix>,
}

/// Which family a relation of a [`BipartiteConfig`] belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Part {
    X(usize),
    Y(usize),
    N(usize),
    Nt(usize),
}

impl std::fmt::Display for Part {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Part::X(i) => write!(f, "X{i}"),
            Part::Y(i) => write!(f, "Y{i}"),
            Part::N(i) => write!(f, "N{i}"),
            Part::Nt(i) => write!(f, "N{i}^T"),
        }
    }
}

fn check_family(what: &str, family: &[Matrix], shape: (usize, usize)) -> Result<()> {
    if family.is_empty() {
        return Err(Error::Structural(format!("{what} family is empty")));
    }
    for (k, m) in family.iter().enumerate() {
        if m.shape() != shape {
            return Err(Error::Structural(format!(
                "{what}[{k}] has shape {:?}, expected {shape:?}",
                m.shape()
            )));
        }
        if let Some((r, c)) = m.first_non_binary() {
            return Err(Error::Structural(format!("{what}[{k}] has a non-01 entry at ({r},{c})")));
        }
    }
    Ok(())
}

impl BipartiteConfig {
    pub fn new(beta_size: usize, gamma_size: usize, x: Vec<Matrix>, y: Vec<Matrix>, n: Vec<Matrix>) -> Result<Self> {
        if beta_size == 0 || gamma_size == 0 {
            return Err(Error::Structural("both fibres must be nonempty".into()));
        }
        check_family("X", &x, (beta_size, beta_size))?;
        check_family("Y", &y, (gamma_size, gamma_size))?;
        check_family("N", &n, (beta_size, gamma_size))?;
        Ok(BipartiteConfig { beta_size, gamma_size, x, y, n })
    }

    /// Reads the X, Y and N blocks of a two-fibre configuration; the `(1,0)`
    /// block is ignored since the model derives it by transposition.
    pub fn from_config(cc: &CoherentConfig) -> Result<Self> {
        if cc.fibre_count() != 2 {
            return Err(Error::Structural(format!(
                "expected two fibres, found {}",
                cc.fibre_count()
            )));
        }
        let take = |i, j| cc.block(i, j).map(|r| r.matrix.clone()).collect::<Vec<_>>();
        BipartiteConfig::new(cc.fibres().size(0), cc.fibres().size(1), take(0, 0), take(1, 1), take(0, 1))
    }

    pub fn beta_size(&self) -> usize {
        self.beta_size
    }

    pub fn gamma_size(&self) -> usize {
        self.gamma_size
    }

    pub fn x(&self) -> &[Matrix] {
        &self.x
    }

    pub fn y(&self) -> &[Matrix] {
        &self.y
    }

    /// `N_1 .. N_t`, stored from position 0.
    pub fn n(&self) -> &[Matrix] {
        &self.n
    }

    pub fn t_beta(&self) -> usize {
        self.x.len() - 1
    }

    pub fn t_gamma(&self) -> usize {
        self.y.len() - 1
    }

    pub fn t_bg(&self) -> usize {
        self.n.len()
    }

    pub fn relation_count(&self) -> usize {
        self.x.len() + self.y.len() + 2 * self.n.len()
    }

    /// Every relation with its label, in the order X, Y, N, Nᵀ.
    pub fn parts(&self) -> Vec<(Part, Matrix)> {
        let mut out = Vec::with_capacity(self.relation_count());
        out.extend(self.x.iter().enumerate().map(|(i, m)| (Part::X(i), m.clone())));
        out.extend(self.y.iter().enumerate().map(|(i, m)| (Part::Y(i), m.clone())));
        out.extend(self.n.iter().enumerate().map(|(i, m)| (Part::N(i + 1), m.clone())));
        out.extend(self.n.iter().enumerate().map(|(i, m)| (Part::Nt(i + 1), m.transpose())));
        out
    }

    /// The relation embedded in the `(|β|+|γ|)`-square ground set.
    pub fn hat(&self, part: Part) -> Matrix {
        let (b, g) = (self.beta_size, self.gamma_size);
        let mut m = Matrix::zeros(b + g, b + g);
        match part {
            Part::X(i) => m.set_block(0, 0, &self.x[i]),
            Part::Y(i) => m.set_block(b, b, &self.y[i]),
            Part::N(i) => m.set_block(0, b, &self.n[i - 1]),
            Part::Nt(i) => m.set_block(b, 0, &self.n[i - 1].transpose()),
        }
        m
    }

    /// Symmetric bipartite form `[[0, N_i], [N_iᵀ, 0]]`.
    pub fn bipartite_form(&self, i: usize) -> Matrix {
        self.hat(Part::N(i)).add(&self.hat(Part::Nt(i)))
    }

    /// The two-fibre [`CoherentConfig`] with blocks X, N / Nᵀ, Y.
    pub fn assemble(&self) -> CoherentConfig {
        let mut rels = Vec::with_capacity(self.relation_count());
        for (k, m) in self.x.iter().enumerate() {
            rels.push(Relation { id: RelationId::new(0, 0, k), matrix: m.clone() });
        }
        for (k, m) in self.y.iter().enumerate() {
            rels.push(Relation { id: RelationId::new(1, 1, k), matrix: m.clone() });
        }
        for (k, m) in self.n.iter().enumerate() {
            rels.push(Relation { id: RelationId::new(0, 1, k + 1), matrix: m.clone() });
            rels.push(Relation { id: RelationId::new(1, 0, k + 1), matrix: m.transpose() });
        }
        CoherentConfig::new(vec![self.beta_size, self.gamma_size], rels)
            .expect("a validated bipartite configuration always assembles")
    }

    /// Checks C1-C6 exactly, plus symmetry of every X and Y relation.
    ///
    /// C4 is the commutation rule `N_i N_jᵀ = N_j N_iᵀ`, `N_iᵀ N_j = N_jᵀ N_i`;
    /// C5 is closure of products under the span.
    pub fn verify_bcc(&self) -> Result<VerificationReport> {
        let mut report = VerificationReport::default();
        report.push(Check::from_witness("C1", self.identity_witness()));
        report.push(Check::from_witness("C2", self.partition_witness()));
        report.push(Check::from_witness("C3", self.transpose_witness()));
        report.push(Check::from_witness("symmetric", self.symmetry_witness()));
        report.push(self.commutation_check());
        report.push(Check::from_witness("C5", self.closure_witness()?));
        let spans = self.hobart_diagnostic()?;
        let c6 = Check {
            name: "C6".into(),
            passed: !spans.deficit(),
            witness: None,
            residual: None,
            detail: format!(
                "beta {}/{} joint {}, gamma {}/{} joint {}",
                spans.beta.with_identity,
                spans.beta.required,
                spans.beta.joint,
                spans.gamma.with_identity,
                spans.gamma.required,
                spans.gamma.joint
            ),
        };
        report.push(c6);
        Ok(report)
    }

    fn identity_witness(&self) -> Option<Witness> {
        for (label, m) in [("X0", &self.x[0]), ("Y0", &self.y[0])] {
            if let Some((row, col)) = first_difference(m, &Matrix::identity(m.rows())) {
                return Some(Witness::Entry { location: label.into(), row, col });
            }
        }
        None
    }

    fn partition_witness(&self) -> Option<Witness> {
        let blocks: [(&str, &[Matrix]); 3] = [("beta-beta", &self.x), ("gamma-gamma", &self.y), ("beta-gamma", &self.n)];
        for (label, family) in blocks {
            let (r, c) = family[0].shape();
            let mut sum = Matrix::zeros(r, c);
            for m in family {
                sum.add_assign_scaled(m, 1.0);
            }
            if let Some((row, col)) = first_difference(&sum, &Matrix::ones(r, c)) {
                return Some(Witness::Entry { location: format!("block {label}"), row, col });
            }
        }
        None
    }

    fn transpose_witness(&self) -> Option<Witness> {
        for (name, family) in [("X", &self.x), ("Y", &self.y)] {
            for (k, m) in family.iter().enumerate() {
                let t = m.transpose();
                if !family.iter().any(|o| *o == t) {
                    return Some(Witness::Note { text: format!("transpose of {name}{k} is not in {name}") });
                }
            }
        }
        None
    }

    fn symmetry_witness(&self) -> Option<Witness> {
        for (name, family) in [("X", &self.x), ("Y", &self.y)] {
            for (k, m) in family.iter().enumerate() {
                if let Some((row, col, _)) = m.first_asymmetry(0.0) {
                    return Some(Witness::Entry { location: format!("{name}{k}"), row, col });
                }
            }
        }
        None
    }

    fn commutation_check(&self) -> Check {
        let mut worst = 0.0_f64;
        let mut witness = None;
        for i in 0..self.n.len() {
            for j in i + 1..self.n.len() {
                let (a, b) = (&self.n[i], &self.n[j]);
                let left = a.matmul(&b.transpose()).max_abs_diff(&b.matmul(&a.transpose()));
                let right = a.transpose().matmul(b).max_abs_diff(&b.transpose().matmul(a));
                let r = left.max(right);
                if r > worst {
                    worst = r;
                    let w = if left >= right {
                        Witness::Product { left: Part::N(i + 1).to_string(), right: Part::Nt(j + 1).to_string() }
                    } else {
                        Witness::Product { left: Part::Nt(i + 1).to_string(), right: Part::N(j + 1).to_string() }
                    };
                    witness.get_or_insert(w);
                }
            }
        }
        Check { name: "C4".into(), passed: worst == 0.0, witness, residual: Some(worst), detail: String::new() }
    }

    fn closure_witness(&self) -> Result<Option<Witness>> {
        let span_of = |family: &[Matrix]| -> Result<ExactSpan> {
            let mut sp = ExactSpan::new(family[0].rows() * family[0].cols());
            for m in family {
                sp.insert(m)?;
            }
            Ok(sp)
        };
        let nt: Vec<Matrix> = self.n.iter().map(Matrix::transpose).collect();
        let sx = span_of(&self.x)?;
        let sy = span_of(&self.y)?;
        let sn = span_of(&self.n)?;
        let snt = span_of(&nt)?;
        type Fam<'a> = (&'a [Matrix], fn(usize) -> Part);
        let xs: Fam = (&self.x, Part::X);
        let ys: Fam = (&self.y, Part::Y);
        let ns: Fam = (&self.n, |i| Part::N(i + 1));
        let nts: Fam = (&nt, |i| Part::Nt(i + 1));
        let cases: [(Fam, Fam, &ExactSpan); 8] = [
            (xs, xs, &sx),
            (xs, ns, &sn),
            (ns, ys, &sn),
            (ns, nts, &sx),
            (ys, ys, &sy),
            (ys, nts, &snt),
            (nts, xs, &snt),
            (nts, ns, &sy),
        ];
        for ((left, lname), (right, rname), target) in cases {
            for (i, a) in left.iter().enumerate() {
                for (j, b) in right.iter().enumerate() {
                    if !target.contains(&a.matmul(b))? {
                        return Ok(Some(Witness::Product {
                            left: lname(i).to_string(),
                            right: rname(j).to_string(),
                        }));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Span dimensions behind C6 on both sides.
    pub fn hobart_diagnostic(&self) -> Result<SpanReport> {
        let nt: Vec<Matrix> = self.n.iter().map(Matrix::transpose).collect();
        let beta = side_span(&self.n, &nt, &self.x)?;
        let gamma = side_span(&nt, &self.n, &self.y)?;
        Ok(SpanReport { beta, gamma })
    }
}

fn side_span(left: &[Matrix], right: &[Matrix], within: &[Matrix]) -> Result<SideSpan> {
    let size = within[0].rows();
    let mut products = ExactSpan::new(size * size);
    for a in left {
        for b in right {
            products.insert(&a.matmul(b))?;
        }
    }
    let without_identity = products.dimension();
    products.insert(&Matrix::identity(size))?;
    let with_identity = products.dimension();
    let mut joint = products.clone();
    for m in within {
        joint.insert(m)?;
    }
    let mut target = ExactSpan::new(size * size);
    for m in within {
        target.insert(m)?;
    }
    Ok(SideSpan {
        without_identity,
        with_identity,
        target: target.dimension(),
        joint: joint.dimension(),
        required: within.len(),
    })
}

/// Span dimensions on one side: the cross products with and without `I`,
/// the within-fibre relations, and everything together.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SideSpan {
    pub without_identity: usize,
    pub with_identity: usize,
    pub target: usize,
    pub joint: usize,
    pub required: usize,
}

impl SideSpan {
    /// The cross products plus `I` fail to span exactly the within-fibre span.
    pub fn deficit(&self) -> bool {
        self.with_identity != self.required || self.joint != self.required || self.target != self.required
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SpanReport {
    pub beta: SideSpan,
    pub gamma: SideSpan,
}

impl SpanReport {
    pub fn deficit(&self) -> bool {
        self.beta.deficit() || self.gamma.deficit()
    }
}

/// Whether a two-fibre configuration of type `(t+1 t; t+1)` that is fibre
/// symmetric and admits the spectral basis is already known to be bipartite
/// coherent, so that the C6 span test may be skipped.
pub fn check_t1tt1_shortcut(cc: &CoherentConfig, spectral_ok: bool) -> bool {
    if cc.fibre_count() != 2 || !spectral_ok || !cc.is_fibre_symmetric() {
        return false;
    }
    let c = &cc.type_of().counts;
    let t = c[0][1];
    c[1][0] == t && c[0][0] == t + 1 && c[1][1] == t + 1
}
