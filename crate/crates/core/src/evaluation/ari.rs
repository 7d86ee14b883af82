use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::labeling::ClusterLabeling;

fn pairs(n: u64) -> f64 {
    (n * n.saturating_sub(1)) as f64 / 2.0
}

/// Hubert-Arabie adjusted Rand index.
///
/// Returns 1 when both labelings describe the same trivial partition (the
/// index is otherwise 0/0 there).
pub fn adjusted_rand_index(a: &ClusterLabeling, b: &ClusterLabeling) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let n = a.len() as u64;
    let mut table: HashMap<(usize, usize), u64> = HashMap::new();
    for (&x, &y) in a.labels().iter().zip(b.labels()) {
        *table.entry((x, y)).or_default() += 1;
    }
    let sum_cells: f64 = table.values().map(|&c| pairs(c)).sum();
    let sum_a: f64 = a.sizes().iter().map(|&c| pairs(c as u64)).sum();
    let sum_b: f64 = b.sizes().iter().map(|&c| pairs(c as u64)).sum();
    let total = pairs(n);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = sum_a * sum_b / total;
    let max_index = 0.5 * (sum_a + sum_b);
    let denom = max_index - expected;
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((sum_cells - expected) / denom)
}
