//! Finite weighted graphs `G = (V, w, m)`, generators and hop-distance queries.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of resampling attempts `erdos_renyi` makes before giving up on connectivity.
pub const ER_MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("edge ({u}, {v}) has nonpositive weight {weight}")]
    NonpositiveWeight { u: usize, v: usize, weight: f64 },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },
    #[error("vertex {vertex} has nonpositive measure {measure}")]
    NonpositiveMeasure { vertex: usize, measure: f64 },
    #[error("explicit measure has {got} entries but the graph has {expected} vertices")]
    MeasureLength { expected: usize, got: usize },
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("vertex set must be nonempty")]
    EmptySet,
    #[error("vertex {vertex} out of range for a graph with {count} vertices")]
    InvalidVertex { vertex: usize, count: usize },
    #[error("no connected sample after {0} attempts")]
    GenerationFailed(usize),
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
}

/// Dense vertex index into a [`WeightedGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How the vertex measure `m` is chosen at construction.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureMode {
    /// `m ≡ 1`.
    Unit,
    /// `m(x) = Σ_y w(x, y)`, so every weighted degree equals one.
    Degree,
    /// One strictly positive value per vertex.
    Explicit(Vec<f64>),
}

/// Finite, connected, symmetric weighted graph with a positive vertex measure.
///
/// Adjacency lists are sorted by neighbor index and each undirected edge
/// stores the same `f64` in both directions.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
    measure: Vec<f64>,
    labels: Vec<String>,
}

impl WeightedGraph {
    /// Builds a graph from an undirected edge list over dense indices `0..n`.
    ///
    /// `n` is one more than the largest index mentioned, or the length of an
    /// explicit measure if that is larger.
    pub fn from_edges(edges: &[(usize, usize, f64)], measure: MeasureMode) -> Result<Self, GraphError> {
        if edges.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        let mut n = edges.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0);
        if let MeasureMode::Explicit(m) = &measure {
            n = n.max(m.len());
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(u, v, w) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(GraphError::NonpositiveWeight { u, v, weight: w });
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::DuplicateEdge { u, v });
            }
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(y, _)| y);
        }
        let mut graph = WeightedGraph { adjacency, measure: Vec::new(), labels: (0..n).map(|i| i.to_string()).collect() };
        if !graph.is_connected() {
            return Err(GraphError::DisconnectedGraph);
        }
        let adjacency = &graph.adjacency;
        let measure = match measure {
            MeasureMode::Unit => vec![1.0; n],
            MeasureMode::Degree => adjacency.iter().map(|l| l.iter().map(|&(_, w)| w).sum()).collect(),
            MeasureMode::Explicit(m) => {
                if m.len() != n {
                    return Err(GraphError::MeasureLength { expected: n, got: m.len() });
                }
                m
            }
        };
        for (vertex, &m) in measure.iter().enumerate() {
            if !(m > 0.0) || !m.is_finite() {
                return Err(GraphError::NonpositiveMeasure { vertex, measure: m });
            }
        }
        graph.measure = measure;
        Ok(graph)
    }

    /// Replaces the default `"0".."n-1"` labels with external names.
    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.vertex_count(), "one label per vertex");
        self.labels = labels;
        self
    }

    /// Builds a graph from one of the standard families.
    pub fn generate(family: &Family, measure: MeasureMode) -> Result<Self, GraphError> {
        family.validate()?;
        match *family {
            Family::Complete(n) => {
                let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0))).collect();
                Self::from_edges(&edges, measure)
            }
            Family::Cycle(n) => {
                let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
                Self::from_edges(&edges, measure)
            }
            Family::Path(n) => {
                let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
                Self::from_edges(&edges, measure)
            }
            Family::Hypercube(d) => {
                let n = 1usize << d;
                let edges: Vec<_> = (0..n)
                    .flat_map(|v| (0..d).map(move |b| (v, v ^ (1 << b))))
                    .filter(|&(u, v)| u < v)
                    .map(|(u, v)| (u, v, 1.0))
                    .collect();
                Self::from_edges(&edges, measure)
            }
            Family::ErdosRenyi { n, p, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..ER_MAX_ATTEMPTS {
                    let mut edges = Vec::new();
                    for i in 0..n {
                        for j in i + 1..n {
                            if rng.gen::<f64>() < p {
                                edges.push((i, j, 1.0));
                            }
                        }
                    }
                    // isolated top-index vertices would shrink n; treat as disconnected
                    let covers_all = edges.iter().any(|&(_, j, _)| j == n - 1);
                    if !covers_all {
                        continue;
                    }
                    match Self::from_edges(&edges, measure.clone()) {
                        Ok(g) => return Ok(g),
                        Err(GraphError::DisconnectedGraph) | Err(GraphError::EmptyGraph) => continue,
                        Err(e) => return Err(e),
                    }
                }
                Err(GraphError::GenerationFailed(ER_MAX_ATTEMPTS))
            }
        }
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_count()).map(VertexId)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Neighbors of `x` with their edge weights, sorted by index.
    #[inline]
    pub fn neighbors(&self, x: usize) -> &[(usize, f64)] {
        &self.adjacency[x]
    }

    /// `w(x, y)`, zero for non-adjacent pairs and on the diagonal.
    pub fn weight(&self, x: usize, y: usize) -> f64 {
        let list = &self.adjacency[x];
        match list.binary_search_by_key(&y, |&(v, _)| v) {
            Ok(i) => list[i].1,
            Err(_) => 0.0,
        }
    }

    #[inline]
    pub fn measure(&self, x: usize) -> f64 {
        self.measure[x]
    }

    pub fn measures(&self) -> &[f64] {
        &self.measure
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Undirected edges `(u, v, w)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |&&(v, _)| v > u).map(move |&(v, w)| (u, v, w)))
            .collect()
    }

    pub fn check_vertex(&self, x: usize) -> Result<(), GraphError> {
        if x < self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::InvalidVertex { vertex: x, count: self.vertex_count() })
        }
    }

    /// Weighted degree `Deg(x) = Σ_y w(x, y) / m(x)`.
    pub fn degree(&self, x: usize) -> f64 {
        self.adjacency[x].iter().map(|&(_, w)| w).sum::<f64>() / self.measure[x]
    }

    /// `D = max_x Deg(x)`.
    pub fn max_degree(&self) -> f64 {
        (0..self.vertex_count()).map(|x| self.degree(x)).fold(0.0, f64::max)
    }

    /// Returns a copy with every edge weight multiplied by `factor` and the same measure.
    pub fn scale_weights(&self, factor: f64) -> Self {
        let mut g = self.clone();
        for list in &mut g.adjacency {
            for e in list.iter_mut() {
                e.1 *= factor;
            }
        }
        g
    }

    fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return false;
        }
        self.hop_distances(&[0]).iter().all(|d| d.is_some())
    }

    fn hop_distances(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap();
            for &(y, _) in &self.adjacency[x] {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Hop count of a shortest path; edge weights are ignored.
    pub fn distance(&self, x: usize, y: usize) -> usize {
        self.hop_distances(&[x])[y].expect("graph is connected")
    }

    /// `d(x, S) = min_{s ∈ S} d(x, s)`.
    pub fn distance_to_set(&self, x: usize, set: &[usize]) -> Result<usize, GraphError> {
        Ok(self.distances_to_set(set)?[x])
    }

    /// `d(·, S)` for every vertex, by multi-source breadth-first search.
    pub fn distances_to_set(&self, set: &[usize]) -> Result<Vec<usize>, GraphError> {
        if set.is_empty() {
            return Err(GraphError::EmptySet);
        }
        for &s in set {
            self.check_vertex(s)?;
        }
        Ok(self.hop_distances(set).into_iter().map(|d| d.expect("graph is connected")).collect())
    }

    /// `cl(W) = {v : d(v, W) ≤ 1}`, sorted.
    pub fn closure(&self, set: &[usize]) -> Result<Vec<usize>, GraphError> {
        if set.is_empty() {
            return Err(GraphError::EmptySet);
        }
        let mut out = BTreeSet::new();
        for &w in set {
            self.check_vertex(w)?;
            out.insert(w);
            out.extend(self.adjacency[w].iter().map(|&(y, _)| y));
        }
        Ok(out.into_iter().collect())
    }
}

/// Nonempty vertex subset `W` together with its closure `cl(W)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionSet {
    members: Vec<usize>,
    closure: Vec<usize>,
    in_closure: Vec<bool>,
    in_members: Vec<bool>,
}

impl ExceptionSet {
    pub fn new(graph: &WeightedGraph, members: impl IntoIterator<Item = usize>) -> Result<Self, GraphError> {
        let members: Vec<usize> = members.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let closure = graph.closure(&members)?;
        let n = graph.vertex_count();
        let mut in_closure = vec![false; n];
        for &c in &closure {
            in_closure[c] = true;
        }
        let mut in_members = vec![false; n];
        for &w in &members {
            in_members[w] = true;
        }
        Ok(ExceptionSet { members, closure, in_closure, in_members })
    }

    /// `W = V`.
    pub fn all(graph: &WeightedGraph) -> Self {
        Self::new(graph, 0..graph.vertex_count()).expect("graph has at least one vertex")
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn closure(&self) -> &[usize] {
        &self.closure
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.in_members[x]
    }

    #[inline]
    pub fn closure_contains(&self, x: usize) -> bool {
        self.in_closure[x]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Vertex count of the graph this set was built against.
    pub fn universe(&self) -> usize {
        self.in_members.len()
    }

    /// `V \ W`, sorted.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.universe()).filter(|&x| !self.in_members[x]).collect()
    }
}

/// Graph families available to [`WeightedGraph::generate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Complete(usize),
    Cycle(usize),
    Path(usize),
    Hypercube(usize),
    ErdosRenyi { n: usize, p: f64, seed: u64 },
}

impl Family {
    fn validate(&self) -> Result<(), GraphError> {
        let bad = |msg: &str| Err(GraphError::InvalidParameter(msg.to_string()));
        match *self {
            Family::Complete(n) | Family::Path(n) if n < 2 => bad("n must be at least 2"),
            Family::Cycle(n) if n < 3 => bad("a simple cycle needs at least 3 vertices"),
            Family::Hypercube(d) if d < 1 || d > 20 => bad("hypercube dimension must be in 1..=20"),
            Family::ErdosRenyi { n, .. } if n < 2 => bad("n must be at least 2"),
            Family::ErdosRenyi { p, .. } if !(p > 0.0 && p <= 1.0) => bad("p must lie in (0, 1]"),
            _ => Ok(()),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match *self {
            Family::Complete(n) | Family::Cycle(n) | Family::Path(n) | Family::ErdosRenyi { n, .. } => n,
            Family::Hypercube(d) => 1 << d,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Complete(n) => write!(f, "complete:{n}"),
            Family::Cycle(n) => write!(f, "cycle:{n}"),
            Family::Path(n) => write!(f, "path:{n}"),
            Family::Hypercube(d) => write!(f, "hypercube:{d}"),
            Family::ErdosRenyi { n, p, seed } => write!(f, "erdos-renyi:{n},{p},{seed}"),
        }
    }
}

impl FromStr for Family {
    type Err = GraphError;

    /// Parses `complete:N`, `cycle:N`, `path:N`, `hypercube:D` and
    /// `erdos-renyi:N,P[,SEED]` (alias `er`). A missing seed defaults to 0.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let invalid = || GraphError::InvalidParameter(format!("unrecognized family `{s}`"));
        let (name, params) = s.split_once(':').ok_or_else(invalid)?;
        let parts: Vec<&str> = params.split(',').map(str::trim).collect();
        let int = |i: usize| -> Result<usize, GraphError> {
            parts.get(i).and_then(|p| p.parse().ok()).ok_or_else(invalid)
        };
        let family = match name.trim() {
            "complete" if parts.len() == 1 => Family::Complete(int(0)?),
            "cycle" if parts.len() == 1 => Family::Cycle(int(0)?),
            "path" if parts.len() == 1 => Family::Path(int(0)?),
            "hypercube" if parts.len() == 1 => Family::Hypercube(int(0)?),
            "erdos-renyi" | "er" if parts.len() == 2 || parts.len() == 3 => Family::ErdosRenyi {
                n: int(0)?,
                p: parts[1].parse().map_err(|_| invalid())?,
                seed: match parts.get(2) {
                    Some(s) => s.parse().map_err(|_| invalid())?,
                    None => 0,
                },
            },
            _ => return Err(invalid()),
        };
        family.validate()?;
        Ok(family)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> WeightedGraph {
        WeightedGraph::from_edges(&[(0, 1, 1.0)], MeasureMode::Unit).unwrap()
    }

    #[test]
    fn single_edge() {
        let g = k2();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.degree(0), 1.0);
        assert_eq!(g.degree(1), 1.0);
        assert_eq!(g.max_degree(), 1.0);
        assert_eq!(g.measures(), &[1.0, 1.0]);
    }

    #[test]
    fn triangle_degrees() {
        let g = WeightedGraph::from_edges(&[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], MeasureMode::Unit).unwrap();
        assert!(g.vertices().all(|v| g.degree(v.index()) == 2.0));
        assert_eq!(g, WeightedGraph::generate(&Family::Complete(3), MeasureMode::Unit).unwrap());
    }

    #[test]
    fn construction_errors() {
        let e = |edges: &[(usize, usize, f64)]| WeightedGraph::from_edges(edges, MeasureMode::Unit).unwrap_err();
        assert_eq!(e(&[(0, 1, 1.0), (2, 3, 1.0)]), GraphError::DisconnectedGraph);
        assert_eq!(e(&[(0, 1, 0.0)]), GraphError::NonpositiveWeight { u: 0, v: 1, weight: 0.0 });
        assert_eq!(e(&[(0, 0, 1.0)]), GraphError::SelfLoop(0));
        assert_eq!(e(&[(0, 1, 1.0), (1, 0, 2.0)]), GraphError::DuplicateEdge { u: 1, v: 0 });
        assert_eq!(e(&[]), GraphError::EmptyGraph);
        let m = WeightedGraph::from_edges(&[(0, 1, 1.0)], MeasureMode::Explicit(vec![1.0, -2.0])).unwrap_err();
        assert_eq!(m, GraphError::NonpositiveMeasure { vertex: 1, measure: -2.0 });
        // an extra measure entry introduces an isolated vertex
        let iso = WeightedGraph::from_edges(&[(0, 1, 1.0)], MeasureMode::Explicit(vec![1.0; 3])).unwrap_err();
        assert_eq!(iso, GraphError::DisconnectedGraph);
    }

    #[test]
    fn degree_measure_normalizes() {
        let g = WeightedGraph::from_edges(&[(0, 1, 2.0), (1, 2, 0.5)], MeasureMode::Degree).unwrap();
        assert_eq!(g.measures(), &[2.0, 2.5, 0.5]);
        assert!(g.vertices().all(|v| (g.degree(v.index()) - 1.0).abs() < 1e-15));
    }

    #[test]
    fn star_degrees() {
        let g = WeightedGraph::from_edges(&[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (0, 4, 1.0)], MeasureMode::Unit)
            .unwrap();
        assert_eq!(g.degree(0), 4.0);
        assert_eq!(g.degree(3), 1.0);
        assert_eq!(g.max_degree(), 4.0);
    }

    #[test]
    fn generators() {
        let sq = WeightedGraph::generate(&Family::Hypercube(2), MeasureMode::Unit).unwrap();
        let c4 = WeightedGraph::generate(&Family::Cycle(4), MeasureMode::Unit).unwrap();
        assert_eq!(sq.edge_count(), 4);
        assert!(sq.vertices().all(|v| sq.degree(v.index()) == 2.0));
        // same graph up to relabeling: 0-1-3-2-0
        for (a, b) in [(0, 1), (1, 3), (3, 2), (2, 0)] {
            assert_eq!(sq.weight(a, b), 1.0);
        }
        assert_eq!(c4.edge_count(), 4);
        let c6 = WeightedGraph::generate(&Family::Cycle(6), MeasureMode::Unit).unwrap();
        assert!(c6.vertices().all(|v| c6.degree(v.index()) == 2.0));
        assert!(WeightedGraph::generate(&Family::Cycle(2), MeasureMode::Unit).is_err());
    }

    #[test]
    fn erdos_renyi_is_deterministic() {
        let fam = Family::ErdosRenyi { n: 10, p: 0.5, seed: 42 };
        let a = WeightedGraph::generate(&fam, MeasureMode::Unit).unwrap();
        let b = WeightedGraph::generate(&fam, MeasureMode::Unit).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.vertex_count(), 10);
        let other = WeightedGraph::generate(&Family::ErdosRenyi { n: 10, p: 0.5, seed: 43 }, MeasureMode::Unit);
        assert_ne!(a, other.unwrap());
    }

    #[test]
    fn erdos_renyi_gives_up() {
        let fam = Family::ErdosRenyi { n: 40, p: 1e-6, seed: 1 };
        assert_eq!(
            WeightedGraph::generate(&fam, MeasureMode::Unit).unwrap_err(),
            GraphError::GenerationFailed(ER_MAX_ATTEMPTS)
        );
    }

    #[test]
    fn distances() {
        let p5 = WeightedGraph::generate(&Family::Path(5), MeasureMode::Unit).unwrap();
        assert_eq!(p5.distance(0, 4), 4);
        assert_eq!(p5.distance_to_set(3, &[1, 3]).unwrap(), 0);
        let c6 = WeightedGraph::generate(&Family::Cycle(6), MeasureMode::Unit).unwrap();
        assert_eq!(c6.distance(0, 3), 3);
        assert_eq!(c6.distance_to_set(0, &[]).unwrap_err(), GraphError::EmptySet);
    }

    #[test]
    fn distance_ignores_weights() {
        let g = WeightedGraph::from_edges(&[(0, 1, 100.0), (1, 2, 0.01), (0, 2, 0.001)], MeasureMode::Unit).unwrap();
        assert_eq!(g.distance(0, 2), 1);
    }

    #[test]
    fn closures() {
        let p5 = WeightedGraph::generate(&Family::Path(5), MeasureMode::Unit).unwrap();
        assert_eq!(p5.closure(&[0]).unwrap(), vec![0, 1]);
        assert_eq!(p5.closure(&[0, 1, 2, 3, 4]).unwrap(), vec![0, 1, 2, 3, 4]);
        let c6 = WeightedGraph::generate(&Family::Cycle(6), MeasureMode::Unit).unwrap();
        assert_eq!(c6.closure(&[0]).unwrap(), vec![0, 1, 5]);
        assert_eq!(c6.closure(&[]).unwrap_err(), GraphError::EmptySet);
        let w = ExceptionSet::new(&c6, [0]).unwrap();
        assert!(w.closure_contains(5) && !w.contains(5));
        assert_eq!(w.complement(), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn family_round_trip() {
        for s in ["complete:4", "cycle:7", "path:3", "hypercube:3", "erdos-renyi:10,0.5,42"] {
            let fam: Family = s.parse().unwrap();
            assert_eq!(fam.to_string(), s);
        }
        assert_eq!("er:6,0.3".parse::<Family>().unwrap(), Family::ErdosRenyi { n: 6, p: 0.3, seed: 0 });
        assert!("complete:1".parse::<Family>().is_err());
        assert!("wheel:5".parse::<Family>().is_err());
    }
}
