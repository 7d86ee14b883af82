//! Temperature sweeps and their JSON representation.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_temperature, ChainParams, TemperatureStats};
use crate::error::{Error, Result};
use crate::labeling::ClusterLabeling;
use crate::rng::derive_seed;
use crate::similarity::StrengthGraph;

pub const DEFAULT_Q: u32 = 20;
pub const DEFAULT_THETA: f64 = 0.5;
pub const DEFAULT_STEPS: usize = 2000;
pub const DEFAULT_BURN_IN: usize = 400;

/// Strictly increasing list of positive temperatures.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureGrid(Vec<f64>);

impl TemperatureGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("temperature grid is empty".into()));
        }
        if values.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::Domain("temperatures must be positive and finite".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("temperature grid must be strictly increasing".into()));
        }
        Ok(TemperatureGrid(values))
    }

    /// `start, start + step, ...` up to and including `stop` (within rounding).
    pub fn linear(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || stop < start {
            return Err(Error::Domain(format!(
                "invalid range {start}:{stop}:{step}"
            )));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        // round away the accumulated representation error, e.g. 0.034999999999999996
        Self::new(
            (0..count)
                .map(|i| {
                    let t = start + i as f64 * step;
                    if t == 0.0 || !t.is_finite() {
                        return t;
                    }
                    let scale = 10f64.powi(12 - t.abs().log10().ceil() as i32);
                    (t * scale).round() / scale
                })
                .collect(),
        )
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for TemperatureGrid {
    fn default() -> Self {
        TemperatureGrid::linear(0.005, 0.25, 0.005).expect("valid default grid")
    }
}

impl FromStr for TemperatureGrid {
    type Err = Error;

    /// Parses `start:stop:step`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Domain(format!(
                "temperature range must look like start:stop:step, got {s:?}"
            )));
        }
        let mut nums = [0.0; 3];
        for (slot, p) in nums.iter_mut().zip(&parts) {
            *slot = p
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("not a number in temperature range: {p:?}")))?;
        }
        TemperatureGrid::linear(nums[0], nums[1], nums[2])
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepConfig {
    pub grid: TemperatureGrid,
    pub chain: ChainParams,
    pub seed: u64,
    /// Keep the two-point counts of every temperature (memory `N^2/2` each).
    pub keep_correlations: bool,
}

/// Results of a sweep, ordered by temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub q: u32,
    pub n: usize,
    pub h_max: f64,
    pub points: Vec<TemperatureStats>,
}

/// Runs one independent chain per grid point, in parallel. The chain at
/// grid index `k` is seeded from `(seed, k)`.
pub fn temperature_sweep(strengths: &StrengthGraph, config: &SweepConfig) -> Result<Sweep> {
    let points = config
        .grid
        .values()
        .par_iter()
        .enumerate()
        .map(|(k, &t)| {
            let mut stats =
                run_temperature(strengths, t, config.chain, derive_seed(config.seed, &[k as u64]))?;
            if !config.keep_correlations {
                stats.two_point = None;
            }
            Ok(stats)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Sweep {
        q: config.chain.q,
        n: strengths.n(),
        h_max: strengths.h_max(),
        points,
    })
}

impl Sweep {
    pub fn temperatures(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.temperature).collect()
    }

    pub fn susceptibilities(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.susceptibility).collect()
    }

    pub fn to_file(&self) -> SweepFile {
        SweepFile {
            q: self.q,
            n: self.n,
            h_max: self.h_max,
            points: self.points.iter().map(SweepRecord::from).collect(),
        }
    }

    pub fn to_writer<W: std::io::Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer(w, &self.to_file())?;
        Ok(())
    }

    pub fn from_reader<R: std::io::Read>(r: R) -> Result<Self> {
        let file: SweepFile = serde_json::from_reader(r)?;
        file.into_sweep()
    }
}

/// One temperature as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    #[serde(rename = "T")]
    pub temperature: f64,
    pub mean_m: f64,
    pub chi: f64,
    #[serde(rename = "mean_H")]
    pub mean_h: f64,
    pub samples: usize,
    pub n_clusters: usize,
    pub cluster_sizes: Vec<usize>,
    pub labels: ClusterLabeling,
    pub energy_samples: Vec<f64>,
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<Vec<f64>>>,
}

impl From<&TemperatureStats> for SweepRecord {
    fn from(s: &TemperatureStats) -> Self {
        SweepRecord {
            temperature: s.temperature,
            mean_m: s.mean_magnetization,
            chi: s.susceptibility,
            mean_h: s.mean_energy,
            samples: s.samples,
            n_clusters: s.labeling.n_clusters(),
            cluster_sizes: s.labeling.sorted_sizes(),
            labels: s.labeling.clone(),
            energy_samples: s.energy_samples.clone(),
            g: s.g_matrix().map(|g| {
                g.row_iter()
                    .map(|r| r.iter().copied().collect())
                    .collect()
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFile {
    pub q: u32,
    pub n: usize,
    pub h_max: f64,
    pub points: Vec<SweepRecord>,
}

impl SweepFile {
    /// Rebuilds the sweep. Two-point counts are not stored and come back empty.
    pub fn into_sweep(self) -> Result<Sweep> {
        let points = self
            .points
            .into_iter()
            .map(|r| {
                if r.labels.len() != self.n {
                    return Err(Error::DimensionMismatch {
                        expected: self.n,
                        actual: r.labels.len(),
                    });
                }
                Ok(TemperatureStats {
                    temperature: r.temperature,
                    q: self.q,
                    mean_magnetization: r.mean_m,
                    susceptibility: r.chi,
                    mean_energy: r.mean_h,
                    energy_samples: r.energy_samples,
                    samples: r.samples,
                    two_point: None,
                    labeling: r.labels,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if points.windows(2).any(|w| w[1].temperature <= w[0].temperature) {
            return Err(Error::Domain("sweep points must be sorted by temperature".into()));
        }
        Ok(Sweep {
            q: self.q,
            n: self.n,
            h_max: self.h_max,
            points,
        })
    }
}
