//! Super-paramagnetic clustering: Swendsen-Wang Monte Carlo on the Potts
//! model defined by a [`StrengthGraph`], thermodynamic averages, spin-spin
//! correlations and cluster extraction.

mod hk;
mod sweep;

use nalgebra::DMatrix;
use rand::Rng;

pub use hk::{extended_hoshen_kopelman, BondConfiguration};
pub(crate) use hk::HkScratch;
pub use sweep::{
    temperature_sweep, Sweep, SweepConfig, TemperatureGrid, DEFAULT_BURN_IN, DEFAULT_Q,
    DEFAULT_STEPS, DEFAULT_THETA,
};

use crate::error::{Error, Result};
use crate::labeling::ClusterLabeling;
use crate::rng::{stream, StreamRng};
use crate::similarity::{NeighborGraph, StrengthGraph};
use crate::unionfind::DisjointSet;

/// Potts spins, each in `1..=q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinState {
    pub spins: Vec<u32>,
    pub q: u32,
}

impl SpinState {
    pub fn uniform(n: usize, q: u32, value: u32) -> Self {
        SpinState {
            spins: vec![value; n],
            q,
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, q: u32, rng: &mut R) -> Self {
        SpinState {
            spins: (0..n).map(|_| rng.random_range(1..=q)).collect(),
            q,
        }
    }

    pub fn n(&self) -> usize {
        self.spins.len()
    }
}

fn check_temperature(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("temperature must be positive and finite, got {t}")))
    }
}

/// Probability that a bond is activated: `1 - exp(-J/T)` between equal
/// spins and zero otherwise.
pub fn bond_probability(j_ij: f64, t: f64, same_spin: bool) -> Result<f64> {
    check_temperature(t)?;
    if j_ij < 0.0 {
        return Err(Error::Domain(format!("coupling must be nonnegative, got {j_ij}")));
    }
    Ok(if same_spin { -(-j_ij / t).exp_m1() } else { 0.0 })
}

/// Largest-cluster dominance `(q N_max - N) / ((q - 1) N)`, floored at 0.
pub fn magnetization(labeling: &ClusterLabeling, q: u32) -> f64 {
    let n_max = labeling.sizes().into_iter().max().unwrap_or(0);
    magnetization_from_max(n_max, labeling.len(), q)
}

fn magnetization_from_max(n_max: usize, n: usize, q: u32) -> f64 {
    let q = f64::from(q);
    let n = n as f64;
    ((q * n_max as f64 - n) / ((q - 1.0) * n)).max(0.0)
}

/// Mean-field Potts energy `(1/N) sum J_ij (1 - delta(s_i, s_j))`.
pub fn hamiltonian(state: &SpinState, strengths: &StrengthGraph) -> f64 {
    let unsatisfied: f64 = strengths
        .edges
        .iter()
        .filter(|e| state.spins[e.i] != state.spins[e.j])
        .map(|e| e.strength)
        .sum();
    unsatisfied / strengths.n() as f64
}

/// Reusable Swendsen-Wang machinery for one graph and temperature.
struct SwEngine<'g> {
    graph: &'g StrengthGraph,
    probabilities: Vec<f64>,
    active: Vec<bool>,
    labels: Vec<usize>,
    new_spins: Vec<u32>,
    hk: HkScratch,
}

impl<'g> SwEngine<'g> {
    fn new(graph: &'g StrengthGraph, t: f64) -> Self {
        SwEngine {
            graph,
            probabilities: graph
                .edges
                .iter()
                .map(|e| -(-e.strength / t).exp_m1())
                .collect(),
            active: vec![false; graph.edges.len()],
            labels: Vec::with_capacity(graph.n()),
            new_spins: Vec::new(),
            hk: HkScratch::default(),
        }
    }

    /// One update of `state`; leaves the SW clustering in `self.labels`
    /// and returns the number of clusters.
    fn step<R: Rng + ?Sized>(&mut self, state: &mut SpinState, rng: &mut R) -> usize {
        for (e, edge) in self.graph.edges.iter().enumerate() {
            self.active[e] = state.spins[edge.i] == state.spins[edge.j]
                && rng.random::<f64>() < self.probabilities[e];
        }
        let n_clusters = self.hk.label(self.graph, &self.active, &mut self.labels);
        self.new_spins.clear();
        self.new_spins
            .extend((0..n_clusters).map(|_| rng.random_range(1..=state.q)));
        for (s, &l) in state.spins.iter_mut().zip(&self.labels) {
            *s = self.new_spins[l];
        }
        n_clusters
    }
}

/// One Swendsen-Wang update: sample bonds, label clusters, give each
/// cluster an independent uniform spin. Returns the new state and the
/// clustering used for the flip.
pub fn swendsen_wang_step<R: Rng + ?Sized>(
    state: &SpinState,
    strengths: &StrengthGraph,
    t: f64,
    rng: &mut R,
) -> Result<(SpinState, ClusterLabeling)> {
    check_temperature(t)?;
    if state.n() != strengths.n() {
        return Err(Error::DimensionMismatch {
            expected: strengths.n(),
            actual: state.n(),
        });
    }
    let mut engine = SwEngine::new(strengths, t);
    let mut next = state.clone();
    let k = engine.step(&mut next, rng);
    Ok((next, ClusterLabeling::from_bounded(&engine.labels, k.max(1))))
}

/// Pair co-membership counts, packed upper triangle (`i < j`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoPointCounts {
    n: usize,
    counts: Vec<u32>,
}

impl TwoPointCounts {
    pub fn new(n: usize) -> Self {
        TwoPointCounts {
            n,
            counts: vec![0; n * n.saturating_sub(1) / 2],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn row_offset(&self, i: usize) -> usize {
        i * (2 * self.n - i - 1) / 2
    }

    /// Count for the pair; the diagonal is not stored and reads as `None`.
    pub fn get(&self, i: usize, j: usize) -> Option<u32> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        (a != b).then(|| self.counts[self.row_offset(a) + b - a - 1])
    }

    /// Adds one to every pair inside each cluster; `members` lists are ascending.
    pub fn accumulate(&mut self, members: &[Vec<usize>]) {
        for cluster in members.iter().filter(|c| c.len() > 1) {
            for (a, &i) in cluster.iter().enumerate() {
                let base = self.row_offset(i);
                for &j in &cluster[a + 1..] {
                    self.counts[base + j - i - 1] += 1;
                }
            }
        }
    }
}

/// `G_ij = ((q - 1) c_ij / samples + 1) / q`, unit diagonal.
pub fn spin_spin_correlation(two_point: &TwoPointCounts, samples: usize, q: u32) -> Result<DMatrix<f64>> {
    if samples == 0 {
        return Err(Error::Domain("spin-spin correlation needs at least one sample".into()));
    }
    let n = two_point.n();
    Ok(DMatrix::from_fn(n, n, |i, j| match two_point.get(i, j) {
        None => 1.0,
        Some(c) => g_value(c, samples, q),
    }))
}

#[inline]
fn g_value(count: u32, samples: usize, q: u32) -> f64 {
    let q = f64::from(q);
    ((q - 1.0) * f64::from(count) / samples as f64 + 1.0) / q
}

/// Links neighbor pairs whose correlation exceeds `theta`; a node left
/// without such a link joins its most correlated neighbor (lowest index on
/// ties). Clusters are the connected components.
fn extract_from_edges(n: usize, edges: &[(usize, usize)], g: &[f64], theta: f64) -> ClusterLabeling {
    let mut ds = DisjointSet::new(n);
    let mut linked = vec![false; n];
    // Best neighbor per node: (G, neighbor).
    let mut best: Vec<Option<(f64, usize)>> = vec![None; n];
    for (&(i, j), &gij) in edges.iter().zip(g) {
        if gij > theta {
            ds.union(i, j);
            linked[i] = true;
            linked[j] = true;
        }
        for (a, b) in [(i, j), (j, i)] {
            let better = match best[a] {
                None => true,
                Some((bg, bn)) => gij > bg || (gij == bg && b < bn),
            };
            if better {
                best[a] = Some((gij, b));
            }
        }
    }
    for i in 0..n {
        if !linked[i] {
            if let Some((_, b)) = best[i] {
                ds.union(i, b);
            }
        }
    }
    ClusterLabeling::from(ds.labels())
}

/// Thresholded clusters from a full spin-spin correlation matrix, restricted
/// to neighbor-graph pairs.
pub fn extract_clusters(g: &DMatrix<f64>, theta: f64, graph: &NeighborGraph) -> Result<ClusterLabeling> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Domain(format!("theta must lie in (0, 1), got {theta}")));
    }
    let n = graph.n();
    if g.nrows() != n || g.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: g.nrows(),
        });
    }
    let pairs: Vec<(usize, usize)> = graph.edges.iter().map(|e| (e.i, e.j)).collect();
    let values: Vec<f64> = pairs.iter().map(|&(i, j)| g[(i, j)]).collect();
    Ok(extract_from_edges(n, &pairs, &values, theta))
}

/// Equilibrium statistics at one temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureStats {
    pub temperature: f64,
    pub q: u32,
    pub mean_magnetization: f64,
    /// `(N / T) (<m^2> - <m>^2)`.
    pub susceptibility: f64,
    pub mean_energy: f64,
    pub energy_samples: Vec<f64>,
    pub samples: usize,
    /// Dropped by sweeps unless correlations are requested.
    pub two_point: Option<TwoPointCounts>,
    pub labeling: ClusterLabeling,
}

impl TemperatureStats {
    pub fn g_matrix(&self) -> Option<DMatrix<f64>> {
        self.two_point
            .as_ref()
            .map(|tp| spin_spin_correlation(tp, self.samples, self.q).expect("samples >= 1"))
    }
}

/// Markov-chain length settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub m_steps: usize,
    pub burn_in: usize,
    pub q: u32,
    pub theta: f64,
}

impl Default for ChainParams {
    fn default() -> Self {
        ChainParams {
            m_steps: DEFAULT_STEPS,
            burn_in: DEFAULT_BURN_IN,
            q: DEFAULT_Q,
            theta: DEFAULT_THETA,
        }
    }
}

impl ChainParams {
    fn validate(&self) -> Result<()> {
        if self.m_steps <= self.burn_in {
            return Err(Error::Domain(format!(
                "steps ({}) must exceed burn-in ({})",
                self.m_steps, self.burn_in
            )));
        }
        if self.q < 2 {
            return Err(Error::Domain(format!("q must be at least 2, got {}", self.q)));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::Domain(format!("theta must lie in (0, 1), got {}", self.theta)));
        }
        Ok(())
    }
}

/// Runs one Swendsen-Wang chain at temperature `t` from a random start and
/// accumulates magnetization, energy and two-point statistics after burn-in.
pub fn run_temperature(
    strengths: &StrengthGraph,
    t: f64,
    params: ChainParams,
    seed: u64,
) -> Result<TemperatureStats> {
    check_temperature(t)?;
    params.validate()?;
    let n = strengths.n();
    let mut rng: StreamRng = stream(seed, &[]);
    let mut state = SpinState::random(n, params.q, &mut rng);
    let mut engine = SwEngine::new(strengths, t);
    let mut two_point = TwoPointCounts::new(n);
    let samples = params.m_steps - params.burn_in;
    let mut energies = Vec::with_capacity(samples);
    let (mut sum_m, mut sum_m2) = (0.0, 0.0);
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();

    for step in 0..params.m_steps {
        let k = engine.step(&mut state, &mut rng);
        if step < params.burn_in {
            continue;
        }
        sizes.clear();
        sizes.resize(k, 0);
        for &l in &engine.labels {
            sizes[l] += 1;
        }
        let m = magnetization_from_max(sizes.iter().copied().max().unwrap_or(0), n, params.q);
        sum_m += m;
        sum_m2 += m * m;
        energies.push(hamiltonian(&state, strengths));

        members.resize_with(k.max(members.len()), Vec::new);
        members.iter_mut().for_each(Vec::clear);
        for (i, &l) in engine.labels.iter().enumerate() {
            members[l].push(i);
        }
        two_point.accumulate(&members[..k]);
    }

    let s = samples as f64;
    let mean_m = sum_m / s;
    let variance = (sum_m2 / s - mean_m * mean_m).max(0.0);
    let mean_energy = energies.iter().sum::<f64>() / s;

    let pairs: Vec<(usize, usize)> = strengths.edges.iter().map(|e| (e.i, e.j)).collect();
    let g: Vec<f64> = pairs
        .iter()
        .map(|&(i, j)| g_value(two_point.get(i, j).unwrap_or(0), samples, params.q))
        .collect();
    let labeling = extract_from_edges(n, &pairs, &g, params.theta);

    Ok(TemperatureStats {
        temperature: t,
        q: params.q,
        mean_magnetization: mean_m,
        susceptibility: n as f64 / t * variance,
        mean_energy,
        energy_samples: energies,
        samples,
        two_point: Some(two_point),
        labeling,
    })
}
