//! Independent reference implementations used to check the library.
#![allow(dead_code)]

use std::collections::VecDeque;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use spclust::*;

/// Connected components of the active edges by breadth-first search, labeled
/// in order of the smallest node of each component.
pub fn bfs_components(n: usize, edges: &[(usize, usize)], active: &[bool]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for (&(i, j), &on) in edges.iter().zip(active) {
        if on {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if label[w] == usize::MAX {
                    label[w] = next;
                    queue.push_back(w);
                }
            }
        }
        next += 1;
    }
    label
}

/// Total weight of a minimum spanning tree by the O(N^2) Prim algorithm.
pub fn prim_weight(d: &DMatrix<f64>) -> f64 {
    let n = d.nrows();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut total = 0.0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .unwrap();
        in_tree[v] = true;
        total += best[v];
        for w in 0..n {
            if !in_tree[w] && d[(v, w)] < best[w] {
                best[w] = d[(v, w)];
            }
        }
    }
    total
}

/// Adjusted Rand index from pair counts over all `N (N-1) / 2` pairs.
pub fn ari_by_pairs(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    let (mut both, mut only_a, mut only_b, mut neither) = (0f64, 0f64, 0f64, 0f64);
    for i in 0..n {
        for j in (i + 1)..n {
            match (a[i] == a[j], b[i] == b[j]) {
                (true, true) => both += 1.0,
                (true, false) => only_a += 1.0,
                (false, true) => only_b += 1.0,
                (false, false) => neither += 1.0,
            }
        }
    }
    let denom = (both + only_a) * (only_a + neither) + (both + only_b) * (only_b + neither);
    if denom == 0.0 {
        return 1.0;
    }
    2.0 * (both * neither - only_a * only_b) / denom
}

/// Cluster log-likelihood term, written from the formula.
pub fn lc_term(n: usize, c: f64) -> f64 {
    let n = n as f64;
    if n <= 1.0 || c <= n {
        return 0.0;
    }
    let c = if c >= n * n { n * n - 1e-9 } else { c };
    0.5 * ((n / c).ln() + (n - 1.0) * ((n * n - n) / (n * n - c)).ln())
}

/// Best partition over all set partitions (restricted growth strings).
/// Ties keep the first partition found.
pub fn exhaustive_best(c: &DMatrix<f64>) -> (Vec<usize>, f64) {
    struct Search<'a> {
        c: &'a DMatrix<f64>,
        labels: Vec<usize>,
        sizes: Vec<usize>,
        sums: Vec<f64>,
        best: (Vec<usize>, f64),
    }
    impl Search<'_> {
        fn go(&mut self, i: usize) {
            let n = self.c.nrows();
            if i == n {
                let v: f64 = self.sizes.iter().zip(&self.sums).map(|(&s, &c)| lc_term(s, c)).sum();
                if v > self.best.1 {
                    self.best = (self.labels.clone(), v);
                }
                return;
            }
            let k = self.sizes.len();
            for b in 0..=k {
                let mut add = self.c[(i, i)];
                for j in 0..i {
                    if self.labels[j] == b {
                        add += 2.0 * self.c[(i, j)];
                    }
                }
                if b == k {
                    self.sizes.push(0);
                    self.sums.push(0.0);
                }
                self.labels[i] = b;
                self.sizes[b] += 1;
                self.sums[b] += add;
                self.go(i + 1);
                self.sizes[b] -= 1;
                self.sums[b] -= add;
                if b == k {
                    self.sizes.pop();
                    self.sums.pop();
                }
            }
        }
    }
    let n = c.nrows();
    let mut s = Search {
        c,
        labels: vec![0; n],
        sizes: Vec::new(),
        sums: Vec::new(),
        best: (vec![0; n], f64::NEG_INFINITY),
    };
    s.go(0);
    s.best
}

/// Rows are noisy copies of one common factor per planted group:
/// `x = g f_s + sqrt(1 - g^2) e` with `g` uniform in [0.3, 0.9].
pub fn factor_model<R: Rng>(n: usize, d: usize, groups: usize, rng: &mut R) -> (CorrelationMatrix, Vec<usize>) {
    let planted: Vec<usize> = (0..n).map(|_| rng.random_range(0..groups)).collect();
    let factors: Vec<Vec<f64>> = (0..groups)
        .map(|_| (0..d).map(|_| StandardNormal.sample(rng)).collect())
        .collect();
    let rows: Vec<Vec<f64>> = planted
        .iter()
        .map(|&s| {
            let g: f64 = rng.random_range(0.3..0.9);
            let e = (1.0 - g * g).sqrt();
            (0..d)
                .map(|t| g * factors[s][t] + e * Distribution::<f64>::sample(&StandardNormal, rng))
                .collect()
        })
        .collect();
    (pearson(&DataMatrix::from_rows(&rows)).unwrap(), planted)
}

/// Uniform points in the unit square.
pub fn uniform_points<R: Rng>(n: usize, rng: &mut R) -> DataMatrix {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random(), rng.random()]).collect();
    DataMatrix::from_rows(&rows)
}

pub fn strengths_of(data: &DataMatrix, k: usize) -> (NeighborGraph, StrengthGraph) {
    let graph = mutual_knn_graph(&euclidean_distances(data).unwrap(), k).unwrap();
    let s = strength_matrix(&graph);
    (graph, s)
}

/// Random graph on `n` nodes with roughly `p * n (n - 1) / 2` unit-strength edges.
pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> StrengthGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push(StrengthEdge { i, j, d: 1.0, strength: 1.0 });
            }
        }
    }
    StrengthGraph::from_edges(n, edges)
}

/// Likelihood of a labeling computed from the formula, member by member.
pub fn lc_of(labels: &[usize], c: &DMatrix<f64>) -> f64 {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    (0..k)
        .map(|b| {
            let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == b).collect();
            let sum: f64 = members.iter().flat_map(|&i| members.iter().map(move |&j| c[(i, j)])).sum();
            lc_term(members.len(), sum)
        })
        .sum()
}
