//! Distances, similarities, the mutual-KNN neighbor graph and Potts couplings.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{CorrelationKind, CorrelationMatrix, DataMatrix};
use crate::error::{Error, Result};
use crate::evaluation::minimum_spanning_tree;

pub const DEFAULT_K: usize = 10;

/// Symmetric, nonnegative, zero-diagonal distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub values: DMatrix<f64>,
}

impl DistanceMatrix {
    pub fn new(values: DMatrix<f64>) -> Self {
        DistanceMatrix { values }
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }
}

pub fn euclidean_distances(data: &DataMatrix) -> Result<DistanceMatrix> {
    data.require_complete("euclidean distances")?;
    let n = data.n_rows();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| data.values.row(i).iter().copied().collect())
        .collect();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..n)
                .map(|j| {
                    rows[i]
                        .iter()
                        .zip(&rows[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                })
                .collect()
        })
        .collect();
    let mut m = DMatrix::zeros(n, n);
    for (i, row) in upper.iter().enumerate() {
        for (off, &d) in row.iter().enumerate() {
            let j = i + 1 + off;
            m[(i, j)] = d;
            m[(j, i)] = d;
        }
    }
    Ok(DistanceMatrix::new(m))
}

/// `d = sqrt(2 (1 - rho))`.
pub fn correlation_to_distance(corr: &CorrelationMatrix) -> DistanceMatrix {
    let n = corr.n();
    DistanceMatrix::new(DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            (2.0 * (1.0 - corr.get(i, j))).max(0.0).sqrt()
        }
    }))
}

/// One minus the distance rescaled by its global maximum.
pub fn similarity_from_distance(dist: &DistanceMatrix) -> Result<CorrelationMatrix> {
    let max = dist.values.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(Error::DegenerateInput(
            "all pairwise distances are zero".into(),
        ));
    }
    let n = dist.n();
    let s = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            1.0 - dist.get(i, j) / max
        }
    });
    Ok(CorrelationMatrix::new(s, CorrelationKind::SimilarityFromDistance))
}

/// An undirected edge with its length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub i: usize,
    pub j: usize,
    pub d: f64,
}

/// Symmetric, connected neighborhood structure.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborGraph {
    /// Sorted neighbor lists.
    pub adjacency: Vec<Vec<usize>>,
    /// Edges with `i < j`, sorted lexicographically.
    pub edges: Vec<GraphEdge>,
    /// Average neighbor count, `2 |E| / N`.
    pub k_hat: f64,
    /// Mean edge length.
    pub length_scale_a: f64,
}

impl NeighborGraph {
    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    /// Builds a graph from an explicit edge list (lengths taken from `dist`).
    pub fn from_edges(dist: &DistanceMatrix, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = dist.n();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in pairs {
            if a == b || a >= n || b >= n {
                return Err(Error::Domain(format!("invalid edge ({a}, {b})")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let edges: Vec<GraphEdge> = adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, list)| {
                list.iter()
                    .filter(move |&&j| j > i)
                    .map(move |&j| GraphEdge {
                        i,
                        j,
                        d: dist.get(i, j),
                    })
            })
            .collect();
        if edges.is_empty() {
            return Err(Error::DegenerateInput("neighbor graph has no edges".into()));
        }
        let a = edges.iter().map(|e| e.d).sum::<f64>() / edges.len() as f64;
        if a <= 0.0 {
            return Err(Error::DegenerateInput(
                "mean neighbor distance is zero; the length scale is undefined".into(),
            ));
        }
        Ok(NeighborGraph {
            k_hat: 2.0 * edges.len() as f64 / n as f64,
            length_scale_a: a,
            adjacency,
            edges,
        })
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }
}

/// Indices of the `k` nearest other points of `i`, ties broken by index.
pub fn k_nearest(dist: &DistanceMatrix, i: usize, k: usize) -> Vec<usize> {
    let mut others: Vec<usize> = (0..dist.n()).filter(|&j| j != i).collect();
    others.sort_by(|&a, &b| dist.get(i, a).total_cmp(&dist.get(i, b)).then(a.cmp(&b)));
    others.truncate(k);
    others
}

/// Mutual K-nearest-neighbor graph augmented with the minimum spanning tree.
pub fn mutual_knn_graph(dist: &DistanceMatrix, k: usize) -> Result<NeighborGraph> {
    let n = dist.n();
    if k == 0 || k >= n {
        return Err(Error::Domain(format!("k must satisfy 1 <= k < N, got k={k}, N={n}")));
    }
    let knn: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut v = k_nearest(dist, i, k);
            v.sort_unstable();
            v
        })
        .collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (i, list) in knn.iter().enumerate() {
        for &j in list {
            if j > i && knn[j].binary_search(&i).is_ok() {
                pairs.push((i, j));
            }
        }
    }
    pairs.extend(minimum_spanning_tree(dist).edges.iter().map(|e| (e.i, e.j)));
    NeighborGraph::from_edges(dist, &pairs)
}

/// A Potts coupling on one graph edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrengthEdge {
    pub i: usize,
    pub j: usize,
    pub d: f64,
    #[serde(rename = "J")]
    pub strength: f64,
}

/// Interaction strengths on the neighbor graph plus a compressed adjacency
/// used by the Monte Carlo engine.
#[derive(Debug, Clone, PartialEq)]
pub struct StrengthGraph {
    n: usize,
    pub edges: Vec<StrengthEdge>,
    offsets: Vec<usize>,
    /// `(neighbor, edge index)` per node, neighbors ascending.
    incidence: Vec<(usize, usize)>,
}

impl StrengthGraph {
    pub fn from_edges(n: usize, edges: Vec<StrengthEdge>) -> Self {
        let mut buckets = vec![Vec::new(); n];
        for (e, edge) in edges.iter().enumerate() {
            buckets[edge.i].push((edge.j, e));
            buckets[edge.j].push((edge.i, e));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut incidence = Vec::with_capacity(2 * edges.len());
        offsets.push(0);
        for mut b in buckets {
            b.sort_unstable();
            incidence.extend(b);
            offsets.push(incidence.len());
        }
        StrengthGraph {
            n,
            edges,
            offsets,
            incidence,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn incident(&self, i: usize) -> &[(usize, usize)] {
        &self.incidence[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Largest value of the mean-field Hamiltonian: every bond unsatisfied.
    pub fn h_max(&self) -> f64 {
        self.edges.iter().map(|e| e.strength).sum::<f64>() / self.n as f64
    }

    pub fn is_connected(&self) -> bool {
        let mut ds = crate::unionfind::DisjointSet::new(self.n);
        let mut comps = self.n;
        for e in &self.edges {
            if ds.union(e.i, e.j) {
                comps -= 1;
            }
        }
        comps <= 1
    }
}

/// `J = exp(-d^2 / (2 a^2)) / K_hat` on every neighbor-graph edge.
pub fn coupling(d: f64, k_hat: f64, a: f64) -> f64 {
    (-0.5 * (d / a).powi(2)).exp() / k_hat
}

pub fn strength_matrix(graph: &NeighborGraph) -> StrengthGraph {
    let edges = graph
        .edges
        .iter()
        .map(|e| StrengthEdge {
            i: e.i,
            j: e.j,
            d: e.d,
            strength: coupling(e.d, graph.k_hat, graph.length_scale_a),
        })
        .collect();
    StrengthGraph::from_edges(graph.n(), edges)
}

/// Serializable edge-list view of a strength graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphExport {
    pub n: usize,
    pub k_hat: f64,
    pub length_scale_a: f64,
    pub edges: Vec<StrengthEdge>,
}

impl GraphExport {
    pub fn new(graph: &NeighborGraph, strengths: &StrengthGraph) -> Self {
        GraphExport {
            n: graph.n(),
            k_hat: graph.k_hat,
            length_scale_a: graph.length_scale_a,
            edges: strengths.edges.clone(),
        }
    }

    pub fn into_strengths(self) -> StrengthGraph {
        StrengthGraph::from_edges(self.n, self.edges)
    }

    pub fn into_graph(self) -> Result<(NeighborGraph, StrengthGraph)> {
        let mut adjacency = vec![Vec::new(); self.n];
        for e in &self.edges {
            adjacency[e.i].push(e.j);
            adjacency[e.j].push(e.i);
        }
        adjacency.iter_mut().for_each(|l| l.sort_unstable());
        let graph = NeighborGraph {
            adjacency,
            edges: self
                .edges
                .iter()
                .map(|e| GraphEdge { i: e.i, j: e.j, d: e.d })
                .collect(),
            k_hat: self.k_hat,
            length_scale_a: self.length_scale_a,
        };
        Ok((graph, self.into_strengths()))
    }
}
