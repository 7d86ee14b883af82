//! Maximum-likelihood clustering of a correlation matrix with a genetic
//! algorithm (f-SPC).

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::labeling::ClusterLabeling;
use crate::rng::stream;

pub const DEFAULT_POP_SIZE: usize = 100;
pub const DEFAULT_STALL_GENERATIONS: usize = 100;
pub const DEFAULT_MAX_GENERATIONS: usize = 25_000;

const UPPER_CLAMP: f64 = 1e-9;

/// Size and intra-cluster correlation of one cluster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterStat {
    pub n_s: usize,
    pub c_s: f64,
    /// Internal coupling; `None` when `n_s <= 1` or `c_s <= n_s`.
    pub g_s: Option<f64>,
}

/// Per-cluster statistics, indexed by label.
pub type ClusterStats = Vec<ClusterStat>;

fn check_n(labeling: &ClusterLabeling, corr: &CorrelationMatrix) -> Result<()> {
    if labeling.len() == corr.n() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: corr.n(),
            actual: labeling.len(),
        })
    }
}

/// `(n_s, c_s)` for every cluster, `c_s` summed over all ordered member pairs.
fn sizes_and_sums(labeling: &ClusterLabeling, corr: &CorrelationMatrix) -> Vec<(usize, f64)> {
    labeling
        .members()
        .iter()
        .map(|m| {
            let mut off = 0.0;
            for (a, &i) in m.iter().enumerate() {
                let col = corr.values.column(i);
                for &j in &m[a + 1..] {
                    off += col[j];
                }
            }
            let diag: f64 = m.iter().map(|&i| corr.values[(i, i)]).sum();
            (m.len(), diag + 2.0 * off)
        })
        .collect()
}

pub fn cluster_stats(labeling: &ClusterLabeling, corr: &CorrelationMatrix) -> Result<ClusterStats> {
    check_n(labeling, corr)?;
    Ok(sizes_and_sums(labeling, corr)
        .into_iter()
        .map(|(n_s, c_s)| {
            let n = n_s as f64;
            let g_s = (n_s > 1 && c_s > n).then(|| ((c_s - n) / (n * n - n)).sqrt());
            ClusterStat { n_s, c_s, g_s }
        })
        .collect())
}

fn cluster_likelihood(n_s: usize, c_s: f64) -> f64 {
    let n = n_s as f64;
    if n_s <= 1 || c_s <= n {
        return 0.0;
    }
    let c = c_s.min(n * n - UPPER_CLAMP);
    0.5 * ((n / c).ln() + (n - 1.0) * ((n * n - n) / (n * n - c)).ln())
}

/// Log-likelihood of a partition under the common-factor cluster model.
pub fn likelihood(labeling: &ClusterLabeling, corr: &CorrelationMatrix) -> Result<f64> {
    check_n(labeling, corr)?;
    Ok(likelihood_unchecked(labeling, corr))
}

fn likelihood_unchecked(labeling: &ClusterLabeling, corr: &CorrelationMatrix) -> f64 {
    sizes_and_sums(labeling, corr)
        .into_iter()
        .map(|(n, c)| cluster_likelihood(n, c))
        .sum()
}

/// `sum_s (n_s - n_s / c_s)`.
pub fn kmeans_hamiltonian(labeling: &ClusterLabeling, corr: &CorrelationMatrix) -> Result<f64> {
    check_n(labeling, corr)?;
    sizes_and_sums(labeling, corr)
        .into_iter()
        .enumerate()
        .map(|(s, (n, c))| {
            if c == 0.0 {
                Err(Error::DegenerateCluster { cluster: s })
            } else {
                Ok(n as f64 - n as f64 / c)
            }
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationKind {
    New,
    Split,
    Merge,
    Swap,
    Scramble,
    Flip,
}

impl MutationKind {
    pub const ALL: [MutationKind; 6] = [
        MutationKind::New,
        MutationKind::Split,
        MutationKind::Merge,
        MutationKind::Swap,
        MutationKind::Scramble,
        MutationKind::Flip,
    ];
}

/// Applies one mutation; kinds that do not apply to `labeling` return it
/// unchanged.
pub fn mutate<R: Rng + ?Sized>(labeling: &ClusterLabeling, kind: MutationKind, rng: &mut R) -> ClusterLabeling {
    let n = labeling.len();
    if n == 0 {
        return labeling.clone();
    }
    let mut raw = labeling.labels().to_vec();
    let k = labeling.n_clusters();
    match kind {
        MutationKind::New => {
            raw.iter_mut().for_each(|l| *l = rng.random_range(0..n));
        }
        MutationKind::Split => {
            let sizes = labeling.sizes();
            let splittable: Vec<usize> = (0..k).filter(|&c| sizes[c] > 1).collect();
            let Some(&target) = splittable.choose(rng) else {
                return labeling.clone();
            };
            let members: Vec<usize> = (0..n).filter(|&i| raw[i] == target).collect();
            let side = loop {
                let side: Vec<bool> = members.iter().map(|_| rng.random()).collect();
                if side.iter().any(|&b| b) && side.iter().any(|&b| !b) {
                    break side;
                }
            };
            for (&i, moved) in members.iter().zip(side) {
                if moved {
                    raw[i] = k;
                }
            }
        }
        MutationKind::Merge => {
            if k < 2 {
                return labeling.clone();
            }
            let a = rng.random_range(0..k);
            let mut b = rng.random_range(0..k - 1);
            if b >= a {
                b += 1;
            }
            raw.iter_mut().filter(|l| **l == b).for_each(|l| *l = a);
        }
        MutationKind::Swap => {
            if n < 2 {
                return labeling.clone();
            }
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            raw.swap(i, j);
        }
        MutationKind::Scramble => {
            if n < 2 {
                return labeling.clone();
            }
            let max_len = (n / 4).clamp(2, n);
            let len = rng.random_range(2..=max_len);
            let start = rng.random_range(0..=n - len);
            raw[start..start + len].reverse();
        }
        MutationKind::Flip => {
            let i = rng.random_range(0..n);
            raw[i] = rng.random_range(0..k);
        }
    }
    ClusterLabeling::from_raw(&raw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Maximize the likelihood.
    #[default]
    Lc,
    /// Minimize the K-means Hamiltonian (fitness is its negative).
    Kmeans,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Lc => "lc",
            Objective::Kmeans => "kmeans",
        })
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lc" => Ok(Objective::Lc),
            "kmeans" => Ok(Objective::Kmeans),
            other => Err(Error::Domain(format!("unknown objective {other:?} (lc or kmeans)"))),
        }
    }
}

/// Fitness to maximize. Degenerate K-means clusters score `-inf`.
pub fn fitness(labeling: &ClusterLabeling, corr: &CorrelationMatrix, objective: Objective) -> f64 {
    match objective {
        Objective::Lc => likelihood_unchecked(labeling, corr),
        Objective::Kmeans => kmeans_hamiltonian(labeling, corr).map_or(f64::NEG_INFINITY, |h| -h),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    pub pop_size: usize,
    pub max_generations: usize,
    pub stall_generations: usize,
    pub seed: u64,
    pub objective: Objective,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            pop_size: DEFAULT_POP_SIZE,
            max_generations: DEFAULT_MAX_GENERATIONS,
            stall_generations: DEFAULT_STALL_GENERATIONS,
            seed: 0,
            objective: Objective::Lc,
        }
    }
}

/// Population and bookkeeping between generations.
#[derive(Debug, Clone, PartialEq)]
pub struct GaState {
    pub population: Vec<ClusterLabeling>,
    pub fitness: Vec<f64>,
    pub generation: usize,
    pub stall_counter: usize,
    pub best: (ClusterLabeling, f64),
}

impl GaState {
    /// Random initial population; individual `i` draws from stream `(seed, 0, i)`.
    pub fn initial(corr: &CorrelationMatrix, params: &GaParams) -> Self {
        let n = corr.n();
        let population: Vec<ClusterLabeling> = (0..params.pop_size)
            .map(|i| {
                let mut rng = stream(params.seed, &[0, i as u64]);
                let raw: Vec<usize> = (0..n).map(|_| rng.random_range(0..n.max(1))).collect();
                ClusterLabeling::from_raw(&raw)
            })
            .collect();
        let fitness: Vec<f64> = population
            .par_iter()
            .map(|l| fitness(l, corr, params.objective))
            .collect();
        let order = ranking(&fitness);
        let population: Vec<_> = order.iter().map(|&i| population[i].clone()).collect();
        let fitness: Vec<_> = order.iter().map(|&i| fitness[i]).collect();
        GaState {
            best: (population[0].clone(), fitness[0]),
            population,
            fitness,
            generation: 0,
            stall_counter: 0,
        }
    }

    /// One generation: a mutated child per parent, then the fittest
    /// `pop_size` of parents and children survive.
    pub fn step(&mut self, corr: &CorrelationMatrix, params: &GaParams) {
        let generation = self.generation + 1;
        let children: Vec<(ClusterLabeling, f64)> = self
            .population
            .par_iter()
            .enumerate()
            .map(|(i, parent)| {
                let mut rng = stream(params.seed, &[generation as u64, i as u64]);
                let kind = *MutationKind::ALL.choose(&mut rng).expect("nonempty");
                let child = mutate(parent, kind, &mut rng);
                let f = fitness(&child, corr, params.objective);
                (child, f)
            })
            .collect();
        let mut pool: Vec<ClusterLabeling> = std::mem::take(&mut self.population);
        let mut scores = std::mem::take(&mut self.fitness);
        for (child, f) in children {
            pool.push(child);
            scores.push(f);
        }
        let keep = &ranking(&scores)[..params.pop_size];
        self.fitness = keep.iter().map(|&i| scores[i]).collect();
        let mut slots: Vec<Option<ClusterLabeling>> = pool.into_iter().map(Some).collect();
        self.population = keep.iter().map(|&i| slots[i].take().expect("unique")).collect();
        self.generation = generation;
        if self.fitness[0] > self.best.1 {
            self.best = (self.population[0].clone(), self.fitness[0]);
            self.stall_counter = 0;
        } else {
            self.stall_counter += 1;
        }
    }
}

/// Indices sorted by descending fitness; ties keep the lower index first.
fn ranking(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    idx
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaResult {
    pub best: ClusterLabeling,
    pub fitness: f64,
    pub generations_run: usize,
    /// Best fitness after each generation.
    pub history: Vec<f64>,
}

pub fn ga_run(corr: &CorrelationMatrix, params: &GaParams) -> Result<GaResult> {
    if params.pop_size < 2 {
        return Err(Error::Domain(format!("population size must be at least 2, got {}", params.pop_size)));
    }
    if params.max_generations < 1 {
        return Err(Error::Domain("at least one generation is required".into()));
    }
    if corr.n() == 0 {
        return Err(Error::DegenerateInput("empty correlation matrix".into()));
    }
    let mut state = GaState::initial(corr, params);
    let mut history = Vec::new();
    while state.generation < params.max_generations && state.stall_counter < params.stall_generations {
        state.step(corr, params);
        history.push(state.best.1);
    }
    Ok(GaResult {
        best: state.best.0,
        fitness: state.best.1,
        generations_run: state.generation,
        history,
    })
}

/// Row order built by starting at 0 and repeatedly moving to the most
/// correlated unvisited row (lowest index on ties).
pub fn nearest_neighbor_order(corr: &CorrelationMatrix) -> Vec<usize> {
    let n = corr.n();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut current = 0;
    for _ in 0..n {
        visited[current] = true;
        order.push(current);
        let mut next: Option<usize> = None;
        for j in 0..n {
            if !visited[j] && next.is_none_or(|b| corr.get(current, j) > corr.get(current, b)) {
                next = Some(j);
            }
        }
        match next {
            Some(j) => current = j,
            None => break,
        }
    }
    order
}

/// Runs the GA on the rows reordered by [`nearest_neighbor_order`] and maps
/// the result back to the original row order.
pub fn ga_run_ordered(corr: &CorrelationMatrix, params: &GaParams) -> Result<GaResult> {
    let order = nearest_neighbor_order(corr);
    let mut result = ga_run(&corr.select(&order), params)?;
    result.best = result.best.unpermute(&order);
    Ok(result)
}
