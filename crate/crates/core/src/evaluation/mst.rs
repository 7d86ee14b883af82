use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::similarity::DistanceMatrix;
use crate::unionfind::DisjointSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MstEdge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// The `N - 1` edges of a minimum spanning tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MstEdgeList {
    pub n: usize,
    pub edges: Vec<MstEdge>,
}

impl MstEdgeList {
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Graphviz export; `names` labels the nodes when given.
    pub fn write_dot<W: Write>(&self, mut w: W, names: Option<&[String]>) -> Result<()> {
        writeln!(w, "graph mst {{")?;
        for i in 0..self.n {
            let name = names.and_then(|n| n.get(i)).cloned().unwrap_or_else(|| i.to_string());
            writeln!(w, "  {i} [label={name:?}];")?;
        }
        for e in &self.edges {
            writeln!(w, "  {} -- {} [weight={}];", e.i, e.j, e.weight)?;
        }
        writeln!(w, "}}")?;
        Ok(())
    }
}

/// Kruskal's algorithm over the complete graph; ties ordered by `(weight, i, j)`.
pub fn minimum_spanning_tree(dist: &DistanceMatrix) -> MstEdgeList {
    let n = dist.n();
    let mut candidates: Vec<MstEdge> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            candidates.push(MstEdge {
                i,
                j,
                weight: dist.get(i, j),
            });
        }
    }
    candidates.sort_unstable_by(|a, b| {
        a.weight
            .total_cmp(&b.weight)
            .then(a.i.cmp(&b.i))
            .then(a.j.cmp(&b.j))
    });
    let mut ds = DisjointSet::new(n);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for e in candidates {
        if ds.union(e.i, e.j) {
            edges.push(e);
            if edges.len() + 1 == n {
                break;
            }
        }
    }
    MstEdgeList { n, edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn triangle() {
        let d = DistanceMatrix::new(DMatrix::from_row_slice(
            3,
            3,
            &[0.0, 1.0, 2.0, 1.0, 0.0, 3.0, 2.0, 3.0, 0.0],
        ));
        let t = minimum_spanning_tree(&d);
        let w: Vec<f64> = t.edges.iter().map(|e| e.weight).collect();
        assert_eq!(w, vec![1.0, 2.0]);
    }

    #[test]
    fn collinear_chain() {
        let p = [0.0, 1.0, 2.0, 3.0f64];
        let d = DistanceMatrix::new(DMatrix::from_fn(4, 4, |i, j| (p[i] - p[j]).abs()));
        let t = minimum_spanning_tree(&d);
        assert_eq!(t.edges.len(), 3);
        assert!(t.edges.iter().all(|e| e.weight == 1.0 && e.j == e.i + 1));
    }

    #[test]
    fn dot_output() {
        let d = DistanceMatrix::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.5, 1.5, 0.0]));
        let mut buf = Vec::new();
        minimum_spanning_tree(&d).write_dot(&mut buf, None).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.contains("0 -- 1 [weight=1.5];"));
    }
}
