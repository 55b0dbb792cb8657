//! Candidate configurations from designs and graphs.

use crate::bipartite::BipartiteConfig;
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::relations::{CoherentConfig, Relation, RelationId};
use serde::Serialize;
use std::collections::{BTreeMap, VecDeque};

/// Points `0..points` and a list of blocks, each a set of point indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceStructure {
    points: usize,
    blocks: Vec<Vec<usize>>,
}

impl IncidenceStructure {
    pub fn new(points: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if points == 0 {
            return Err(Error::Design("a design needs at least one point".into()));
        }
        if blocks.is_empty() {
            return Err(Error::Design("a design needs at least one block".into()));
        }
        let mut clean = Vec::with_capacity(blocks.len());
        for (b, block) in blocks.into_iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Design(format!("block {b} is empty")));
            }
            let mut sorted = block.clone();
            sorted.sort_unstable();
            if let Some(&p) = sorted.iter().find(|&&p| p >= points) {
                return Err(Error::Design(format!("block {b} refers to point {p}, but there are {points} points")));
            }
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Design(format!("block {b} repeats a point")));
            }
            clean.push(block);
        }
        Ok(IncidenceStructure { points, blocks: clean })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Point-by-block incidence matrix `N₁`.
    pub fn incidence(&self) -> Matrix {
        let mut m = Matrix::zeros(self.points, self.blocks.len());
        for (b, block) in self.blocks.iter().enumerate() {
            for &p in block {
                m.set(p, b, 1.0);
            }
        }
        m
    }

    /// Number of blocks through each point, when constant.
    pub fn replication(&self) -> Option<usize> {
        constant(self.incidence().row_sums())
    }

    /// Number of points on each block, when constant.
    pub fn block_size(&self) -> Option<usize> {
        constant(self.blocks.iter().map(|b| b.len() as f64).collect())
    }
}

fn constant(values: Vec<f64>) -> Option<usize> {
    let first = *values.first()?;
    values.iter().all(|&v| v == first).then_some(first as usize)
}

/// How the within-fibre relations of a design are split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignMode {
    /// Try the modes below in order and keep the first that applies.
    Auto,
    /// One point-pair value and two block-intersection sizes.
    QuasiSymmetric,
    /// Two off-diagonal values on each side.
    StronglyRegular,
    /// One relation per distinct off-diagonal Gram value, however many.
    GramLevels,
}

impl DesignMode {
    pub fn name(self) -> &'static str {
        match self {
            DesignMode::Auto => "auto",
            DesignMode::QuasiSymmetric => "quasi_symmetric",
            DesignMode::StronglyRegular => "strongly_regular",
            DesignMode::GramLevels => "gram_levels",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "auto" => Some(DesignMode::Auto),
            "quasi_symmetric" => Some(DesignMode::QuasiSymmetric),
            "strongly_regular" => Some(DesignMode::StronglyRegular),
            "gram_levels" => Some(DesignMode::GramLevels),
            _ => None,
        }
    }
}

/// Result of [`from_design_detailed`]: the configuration and the Gram values
/// that define its within-fibre relations, largest first.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignBuild {
    pub config: BipartiteConfig,
    pub mode: DesignMode,
    pub replication: usize,
    pub block_size: usize,
    pub point_values: Vec<usize>,
    pub block_values: Vec<usize>,
}

impl DesignBuild {
    /// Some Gram level equals zero (disjoint blocks or points on no common block).
    pub fn has_zero_level(&self) -> bool {
        self.point_values.contains(&0) || self.block_values.contains(&0)
    }
}

/// Off-diagonal values of an integer Gram matrix with their pair counts.
fn gram_levels(gram: &Matrix) -> BTreeMap<usize, usize> {
    let mut levels = BTreeMap::new();
    for i in 0..gram.rows() {
        for j in i + 1..gram.cols() {
            *levels.entry(gram.get(i, j) as usize).or_insert(0) += 1;
        }
    }
    levels
}

fn describe(levels: &BTreeMap<usize, usize>) -> String {
    let parts: Vec<String> = levels.iter().map(|(v, c)| format!("{v} (x{c})")).collect();
    format!("{{{}}}", parts.join(", "))
}

/// `I` followed by the level-set indicator of each value, largest first.
fn level_relations(gram: &Matrix, values: &[usize]) -> Vec<Matrix> {
    let n = gram.rows();
    let mut out = vec![Matrix::identity(n)];
    for &v in values {
        out.push(Matrix::from_fn(n, n, |i, j| {
            if i != j && gram.get(i, j) as usize == v { 1.0 } else { 0.0 }
        }));
    }
    out
}

pub fn from_design(d: &IncidenceStructure, mode: DesignMode) -> Result<BipartiteConfig> {
    from_design_detailed(d, mode).map(|b| b.config)
}

/// Builds the design configuration: X and Y from the level sets of the point
/// and block Gram matrices, N = {N₁, J − N₁} (the latter dropped when zero).
pub fn from_design_detailed(d: &IncidenceStructure, mode: DesignMode) -> Result<DesignBuild> {
    let replication = d
        .replication()
        .ok_or_else(|| Error::Design("points lie on different numbers of blocks".into()))?;
    let block_size = d
        .block_size()
        .ok_or_else(|| Error::Design("blocks have different sizes".into()))?;
    let n1 = d.incidence();
    let point_gram = n1.matmul(&n1.transpose());
    let block_gram = n1.transpose().matmul(&n1);
    let pl = gram_levels(&point_gram);
    let bl = gram_levels(&block_gram);

    let quasi = pl.len() <= 1 && bl.len() == 2;
    let regular = pl.len() == 2 && bl.len() == 2;
    let used = match mode {
        DesignMode::Auto if quasi => DesignMode::QuasiSymmetric,
        DesignMode::Auto if regular => DesignMode::StronglyRegular,
        DesignMode::Auto => DesignMode::GramLevels,
        DesignMode::QuasiSymmetric if !quasi => {
            return Err(Error::Design(format!(
                "not quasi-symmetric: point-pair values {}, block-intersection values {}",
                describe(&pl),
                describe(&bl)
            )))
        }
        DesignMode::StronglyRegular if !regular => {
            return Err(Error::Design(format!(
                "not a strongly regular design: point-pair values {}, block-intersection values {}",
                describe(&pl),
                describe(&bl)
            )))
        }
        m => m,
    };

    let point_values: Vec<usize> = pl.keys().rev().copied().collect();
    let block_values: Vec<usize> = bl.keys().rev().copied().collect();
    let x = level_relations(&point_gram, &point_values);
    let y = level_relations(&block_gram, &block_values);
    let n2 = Matrix::ones(n1.rows(), n1.cols()).sub(&n1);
    let mut n = vec![n1];
    if !n2.is_zero() {
        n.push(n2);
    }
    let config = BipartiteConfig::new(d.points(), d.blocks().len(), x, y, n)?;
    Ok(DesignBuild { config, mode: used, replication, block_size, point_values, block_values })
}

/// Simple bipartite graph with parts β = `0..left` and γ = `0..right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    left: usize,
    right: usize,
    edges: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if left == 0 || right == 0 {
            return Err(Error::Structural("both parts of a bipartite graph must be nonempty".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(u, v) in &edges {
            if u >= left || v >= right {
                return Err(Error::Structural(format!("edge ({u},{v}) is out of range for parts {left} and {right}")));
            }
            if !seen.insert((u, v)) {
                return Err(Error::Structural(format!("edge ({u},{v}) is repeated")));
            }
        }
        Ok(BipartiteGraph { left, right, edges })
    }

    /// Builds the graph whose edges are the 1-entries of a β×γ matrix.
    pub fn from_biadjacency(n: &Matrix) -> Result<Self> {
        BipartiteGraph::new(n.rows(), n.cols(), n.support().collect())
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn biadjacency(&self) -> Matrix {
        let mut m = Matrix::zeros(self.left, self.right);
        for &(u, v) in &self.edges {
            m.set(u, v, 1.0);
        }
        m
    }

    fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.left + self.right];
        for &(u, v) in &self.edges {
            adj[u].push(self.left + v);
            adj[self.left + v].push(u);
        }
        adj
    }

    fn label(&self, vertex: usize) -> String {
        if vertex < self.left {
            format!("β{vertex}")
        } else {
            format!("γ{}", vertex - self.left)
        }
    }
}

/// Simple undirected graph on `0..order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    order: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(order: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if order == 0 {
            return Err(Error::Structural("a graph needs at least one vertex".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(u, v) in &edges {
            if u >= order || v >= order || u == v {
                return Err(Error::Structural(format!("edge ({u},{v}) is not valid on {order} vertices")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::Structural(format!("edge ({u},{v}) is repeated")));
            }
        }
        Ok(Graph { order, edges })
    }

    /// Reads a symmetric 01 adjacency matrix with zero diagonal.
    pub fn from_adjacency(a: &Matrix) -> Result<Self> {
        if !a.is_symmetric(0.0) {
            return Err(Error::Structural("adjacency matrix is not symmetric".into()));
        }
        Graph::new(a.rows(), a.support().filter(|(i, j)| i < j).collect())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.order];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }
}

/// All-pairs distances by breadth-first search; `None` marks unreachable.
fn all_distances(adj: &[Vec<usize>]) -> Vec<Vec<Option<usize>>> {
    let n = adj.len();
    (0..n)
        .map(|s| {
            let mut dist = vec![None; n];
            dist[s] = Some(0);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let d = dist[u].unwrap();
                for &w in &adj[u] {
                    if dist[w].is_none() {
                        dist[w] = Some(d + 1);
                        queue.push_back(w);
                    }
                }
            }
            dist
        })
        .collect()
}

fn check_connected(dist: &[Vec<Option<usize>>], label: impl Fn(usize) -> String) -> Result<()> {
    match dist[0].iter().position(Option::is_none) {
        Some(v) => Err(Error::Disconnected { first: label(0), second: label(v) }),
        None => Ok(()),
    }
}

/// Indicator matrices of each distance value on a rectangular window of the
/// distance table, for distances `start, start + 2, ...`; empty ones dropped.
fn distance_classes(
    dist: &[Vec<Option<usize>>],
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
    start: usize,
) -> Vec<Matrix> {
    let max = rows
        .clone()
        .flat_map(|i| cols.clone().map(move |j| (i, j)))
        .filter_map(|(i, j)| dist[i][j])
        .max()
        .unwrap_or(0);
    let (r0, c0) = (rows.start, cols.start);
    (start..=max)
        .step_by(2)
        .map(|d| Matrix::from_fn(rows.len(), cols.len(), |i, j| if dist[r0 + i][c0 + j] == Some(d) { 1.0 } else { 0.0 }))
        .filter(|m| !m.is_zero())
        .collect()
}

/// Distance partition of a connected bipartite graph: even distances within
/// β and γ, odd distances across.
pub fn from_bipartite_graph(g: &BipartiteGraph) -> Result<BipartiteConfig> {
    let dist = all_distances(&g.adjacency_lists());
    check_connected(&dist, |v| g.label(v))?;
    let (p, q) = (g.left, g.right);
    let x = distance_classes(&dist, 0..p, 0..p, 0);
    let y = distance_classes(&dist, p..p + q, p..p + q, 0);
    let n = distance_classes(&dist, 0..p, p..p + q, 1);
    BipartiteConfig::new(p, q, x, y, n)
}

/// Distance matrices `A_0 = I, A_1, ..., A_d` of a connected graph.
pub fn distance_matrices(g: &Graph) -> Result<Vec<Matrix>> {
    let dist = all_distances(&g.adjacency_lists());
    check_connected(&dist, |v| format!("v{v}"))?;
    let n = g.order;
    let diameter = dist.iter().flatten().filter_map(|d| *d).max().unwrap_or(0);
    Ok((0..=diameter)
        .map(|d| Matrix::from_fn(n, n, |i, j| if dist[i][j] == Some(d) { 1.0 } else { 0.0 }))
        .collect())
}

/// One-fibre configuration of the distance relations of a connected graph.
pub fn from_graph(g: &Graph) -> Result<CoherentConfig> {
    let rels = distance_matrices(g)?
        .into_iter()
        .enumerate()
        .map(|(k, matrix)| Relation { id: RelationId::new(0, 0, k), matrix })
        .collect();
    CoherentConfig::new(vec![g.order], rels)
}

pub fn assemble(bc: &BipartiteConfig) -> CoherentConfig {
    bc.assemble()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_design() -> IncidenceStructure {
        let mut blocks = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                blocks.push(vec![a, b]);
            }
        }
        IncidenceStructure::new(4, blocks).unwrap()
    }

    fn fano() -> IncidenceStructure {
        let lines = vec![
            vec![0, 1, 2],
            vec![0, 3, 4],
            vec![0, 5, 6],
            vec![1, 3, 5],
            vec![1, 4, 6],
            vec![2, 3, 6],
            vec![2, 4, 5],
        ];
        IncidenceStructure::new(7, lines).unwrap()
    }

    fn rook3() -> IncidenceStructure {
        let mut blocks: Vec<Vec<usize>> = (0..3).map(|r| (0..3).map(|c| 3 * r + c).collect()).collect();
        blocks.extend((0..3).map(|c| (0..3).map(|r| 3 * r + c).collect()));
        IncidenceStructure::new(9, blocks).unwrap()
    }

    #[test]
    fn pair_design_is_quasi_symmetric() {
        let d = pair_design();
        // Oracle: count intersections over all 15 block pairs.
        let mut sizes = std::collections::BTreeSet::new();
        for i in 0..6 {
            for j in i + 1..6 {
                let a = &d.blocks()[i];
                sizes.insert(d.blocks()[j].iter().filter(|p| a.contains(p)).count());
            }
        }
        assert_eq!(sizes.into_iter().collect::<Vec<_>>(), vec![0, 1]);
        let b = from_design_detailed(&d, DesignMode::Auto).unwrap();
        assert_eq!(b.mode, DesignMode::QuasiSymmetric);
        assert_eq!(b.block_values, vec![1, 0]);
        let cc = b.config.assemble();
        assert_eq!(cc.type_of().to_string(), "(2 2; 3)");
        assert_eq!(cc.relations().len(), 9);
        assert!(cc.verify_axioms().unwrap().passed());
        assert!(b.config.verify_bcc().unwrap().passed());
    }

    #[test]
    fn rook_is_strongly_regular() {
        let b = from_design_detailed(&rook3(), DesignMode::Auto).unwrap();
        assert_eq!(b.mode, DesignMode::StronglyRegular);
        assert_eq!((b.replication, b.point_values.clone()), (2, vec![1, 0]));
        let bc = &b.config;
        let g = bc.n()[0].matmul(&bc.n()[0].transpose());
        let expect = Matrix::identity(9).scale(2.0).add(&bc.x()[1]);
        assert_eq!(g, expect);
        assert_eq!(bc.assemble().type_of().to_string(), "(3 2; 3)");
        assert!(bc.verify_bcc().unwrap().passed());
        assert!(b.has_zero_level());
    }

    #[test]
    fn fano_modes() {
        let err = from_design(&fano(), DesignMode::QuasiSymmetric).unwrap_err();
        assert!(err.to_string().contains("1 (x21)"), "{err}");
        let bc = from_design(&fano(), DesignMode::Auto).unwrap();
        assert_eq!(bc.assemble().type_of().to_string(), "(2 2; 2)");
    }

    #[test]
    fn graphs() {
        let k23 = BipartiteGraph::new(2, 3, (0..2).flat_map(|u| (0..3).map(move |v| (u, v))).collect()).unwrap();
        let bc = from_bipartite_graph(&k23).unwrap();
        assert_eq!((bc.x().len(), bc.y().len(), bc.n().len()), (2, 2, 1));
        assert_eq!(bc.n()[0], Matrix::ones(2, 3));

        let p3 = BipartiteGraph::new(2, 1, vec![(0, 0), (1, 0)]).unwrap();
        let bc = from_bipartite_graph(&p3).unwrap();
        assert_eq!((bc.x().len(), bc.y().len(), bc.n().len()), (2, 1, 1));
        assert!(bc.verify_bcc().unwrap().passed());

        let heawood = BipartiteGraph::from_biadjacency(&fano().incidence()).unwrap();
        let bc = from_bipartite_graph(&heawood).unwrap();
        assert_eq!(bc.n().len(), 2);
        assert_eq!(bc.n()[1], Matrix::ones(7, 7).sub(&fano().incidence()));
    }

    #[test]
    fn disconnected_graph_names_components() {
        let g = BipartiteGraph::new(2, 2, vec![(0, 0), (1, 1)]).unwrap();
        match from_bipartite_graph(&g) {
            Err(Error::Disconnected { first, second }) => {
                assert_eq!(first, "β0");
                assert_eq!(second, "β1");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pentagon_distances() {
        let c5 = Graph::new(5, (0..5).map(|i| (i, (i + 1) % 5)).collect()).unwrap();
        let cc = from_graph(&c5).unwrap();
        assert_eq!(cc.relations().len(), 3);
        assert!(cc.verify_axioms().unwrap().passed());
    }
}
