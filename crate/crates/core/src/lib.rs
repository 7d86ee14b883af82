//! Super-paramagnetic clustering (SPC) of data and correlation matrices with
//! a Potts model simulated by Swendsen-Wang Monte Carlo, and fast
//! maximum-likelihood clustering (f-SPC) by a genetic algorithm.
//!
//! A typical data pipeline:
//!
//! ```
//! use spclust::*;
//!
//! let (data, truth) = generate_circles(60, 0.2, 1).unwrap();
//! let dist = euclidean_distances(&data).unwrap();
//! let graph = mutual_knn_graph(&dist, 6).unwrap();
//! let strengths = strength_matrix(&graph);
//! let config = SweepConfig {
//!     grid: "0.01:0.03:0.01".parse().unwrap(),
//!     chain: ChainParams { m_steps: 200, burn_in: 40, ..ChainParams::default() },
//!     ..SweepConfig::default()
//! };
//! let sweep = temperature_sweep(&strengths, &config).unwrap();
//! assert_eq!(sweep.points.len(), 3);
//! let ari = adjusted_rand_index(&sweep.points[0].labeling, &truth).unwrap();
//! assert!((-1.0..=1.0).contains(&ari));
//! ```

pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod fspc;
pub mod labeling;
pub mod preprocess;
pub mod rng;
pub mod similarity;
pub mod spc;
pub mod thermo;
pub mod unionfind;
pub mod validation;

pub use dataset::{
    load_matrix, load_matrix_with, log_returns, make_positive_definite, pairwise_overlap_correlation,
    pearson, read_matrix, write_matrix_csv, CorrelationKind, CorrelationMatrix, CsvOptions, DataMatrix,
    MatrixEnvelope, DATA_KIND,
};
pub use error::{Error, Result};
pub use evaluation::{
    adjusted_rand_index, generate_blobs, generate_circles, minimum_spanning_tree, MstEdge, MstEdgeList,
};
pub use fspc::{
    cluster_stats, ga_run, ga_run_ordered, kmeans_hamiltonian, likelihood, mutate, nearest_neighbor_order,
    ClusterStat, ClusterStats, GaParams, GaResult, GaState, MutationKind, Objective,
};
pub use labeling::ClusterLabeling;
pub use preprocess::{
    imn_denoise, min_max_scale, rmt_denoise, wishart_bounds, wishart_pdf, ImnInput, WishartBounds,
};
pub use similarity::{
    correlation_to_distance, coupling, euclidean_distances, mutual_knn_graph, similarity_from_distance,
    strength_matrix, DistanceMatrix, GraphExport, NeighborGraph, StrengthEdge, StrengthGraph,
};
pub use spc::{
    bond_probability, extended_hoshen_kopelman, extract_clusters, hamiltonian, magnetization,
    run_temperature, spin_spin_correlation, swendsen_wang_step, temperature_sweep, BondConfiguration,
    ChainParams, SpinState, Sweep, SweepConfig, TemperatureGrid, TemperatureStats, TwoPointCounts,
};
pub use thermo::{bin_count, energy_histogram, entropy, free_energy, free_energy_curve, EnergyHistogram};
pub use validation::{ari_vs_temperature, lc_vs_temperature, phase_report, PhaseReport, ValidationReport};
