//! Partitions of `N` observations.

use serde::{Deserialize, Serialize};

/// Assignment of observations to clusters.
///
/// Labels are always sequential and 0-based, numbered in order of first
/// appearance. Two labelings of the same partition are therefore equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", from = "Vec<usize>")]
pub struct ClusterLabeling {
    labels: Vec<usize>,
}

impl ClusterLabeling {
    /// Builds a labeling from arbitrary cluster ids, re-sequentializing them.
    pub fn from_raw<T: Copy + Eq + std::hash::Hash>(raw: &[T]) -> Self {
        let mut map = std::collections::HashMap::with_capacity(raw.len().min(1024));
        let labels = raw
            .iter()
            .map(|id| {
                let next = map.len();
                *map.entry(*id).or_insert(next)
            })
            .collect();
        ClusterLabeling { labels }
    }

    /// Fast path for ids already known to lie in `0..bound`.
    pub fn from_bounded(raw: &[usize], bound: usize) -> Self {
        let mut map = vec![usize::MAX; bound];
        let mut next = 0;
        let labels = raw
            .iter()
            .map(|&id| {
                if map[id] == usize::MAX {
                    map[id] = next;
                    next += 1;
                }
                map[id]
            })
            .collect();
        ClusterLabeling { labels }
    }

    pub fn singletons(n: usize) -> Self {
        ClusterLabeling {
            labels: (0..n).collect(),
        }
    }

    pub fn single_cluster(n: usize) -> Self {
        ClusterLabeling { labels: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn n_clusters(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    /// Cluster sizes indexed by label.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_clusters()];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Cluster sizes sorted largest first.
    pub fn sorted_sizes(&self) -> Vec<usize> {
        let mut s = self.sizes();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }

    /// Member lists indexed by label; each list is in ascending order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_clusters()];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    /// Applies a row permutation: the result gives observation `order[p]` the
    /// label that position `p` had in `self`.
    pub fn unpermute(&self, order: &[usize]) -> Self {
        let mut raw = vec![0; self.len()];
        for (p, &orig) in order.iter().enumerate() {
            raw[orig] = self.labels[p];
        }
        ClusterLabeling::from_bounded(&raw, self.n_clusters())
    }
}

impl From<Vec<usize>> for ClusterLabeling {
    fn from(raw: Vec<usize>) -> Self {
        ClusterLabeling::from_raw(&raw)
    }
}

impl From<ClusterLabeling> for Vec<usize> {
    fn from(l: ClusterLabeling) -> Self {
        l.labels
    }
}
