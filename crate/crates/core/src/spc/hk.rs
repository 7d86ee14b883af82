//! Extended Hoshen-Kopelman labeling on an arbitrary bond graph.

use crate::labeling::ClusterLabeling;
use crate::similarity::StrengthGraph;

const UNLABELED: usize = usize::MAX;

/// Active/inactive flag for every edge of a [`StrengthGraph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BondConfiguration {
    pub active: Vec<bool>,
}

impl BondConfiguration {
    pub fn none(n_edges: usize) -> Self {
        BondConfiguration {
            active: vec![false; n_edges],
        }
    }

    pub fn all(n_edges: usize) -> Self {
        BondConfiguration {
            active: vec![true; n_edges],
        }
    }

    pub fn n_active(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }
}

#[inline]
fn root(table: &mut [usize], mut label: usize) -> usize {
    while table[label] != label {
        table[label] = table[table[label]];
        label = table[label];
    }
    label
}

/// Reusable buffers for repeated labeling of the same graph.
#[derive(Debug, Default, Clone)]
pub(crate) struct HkScratch {
    node_label: Vec<usize>,
    table: Vec<usize>,
    remap: Vec<usize>,
}

impl HkScratch {
    /// Labels connected components of the active bonds. Writes sequential
    /// labels (first-visit order) into `out` and returns the cluster count.
    pub(crate) fn label(
        &mut self,
        graph: &StrengthGraph,
        active: &[bool],
        out: &mut Vec<usize>,
    ) -> usize {
        let n = graph.n();
        self.node_label.clear();
        self.node_label.resize(n, UNLABELED);
        self.table.clear();

        for i in 0..n {
            // Incident lists are sorted, so the already-visited neighbors come first.
            let mut min_root = UNLABELED;
            for &(j, e) in graph.incident(i) {
                if j >= i {
                    break;
                }
                if active[e] {
                    let r = root(&mut self.table, self.node_label[j]);
                    min_root = min_root.min(r);
                }
            }
            if min_root == UNLABELED {
                let fresh = self.table.len();
                self.table.push(fresh);
                self.node_label[i] = fresh;
            } else {
                self.node_label[i] = min_root;
                for &(j, e) in graph.incident(i) {
                    if j >= i {
                        break;
                    }
                    if active[e] {
                        let r = root(&mut self.table, self.node_label[j]);
                        self.table[r] = min_root;
                    }
                }
            }
        }

        // Roots are the smallest label of their class, and labels were issued
        // in node order, so numbering roots in ascending order gives
        // first-visit order.
        self.remap.clear();
        self.remap.resize(self.table.len(), UNLABELED);
        let mut next = 0;
        for y in 0..self.table.len() {
            let r = root(&mut self.table, y);
            if r == y {
                self.remap[y] = next;
                next += 1;
            }
        }
        out.clear();
        out.extend(self.node_label.iter().map(|&l| {
            let r = root(&mut self.table, l);
            self.remap[r]
        }));
        next
    }
}

/// Cluster labeling induced by the active bonds.
pub fn extended_hoshen_kopelman(graph: &StrengthGraph, bonds: &BondConfiguration) -> ClusterLabeling {
    let mut scratch = HkScratch::default();
    let mut out = Vec::new();
    scratch.label(graph, &bonds.active, &mut out);
    ClusterLabeling::from_bounded(&out, graph.n().max(1))
}
