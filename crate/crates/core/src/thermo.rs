//! Entropy, partition function and free energy from energy samples.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spc::Sweep;

/// Number of histogram bins for `n_samples` observations.
pub fn bin_count(n_samples: usize) -> usize {
    let n = n_samples.max(1) as f64;
    let eps = (8.0 + 324.0 * n + 12.0 * (36.0 * n + 729.0 * n * n).sqrt()).cbrt();
    (eps / 6.0 + 2.0 / (3.0 * eps) + 1.0 / 3.0).round() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyHistogram {
    pub bin_count: usize,
    pub bin_edges: Vec<f64>,
    /// Mean of the samples in each bin; the midpoint for empty bins.
    pub bin_centers: Vec<f64>,
    pub probabilities: Vec<f64>,
}

/// Equal-width histogram on `[0, h_max]`.
pub fn energy_histogram(samples: &[f64], h_max: f64) -> Result<EnergyHistogram> {
    if !(h_max > 0.0 && h_max.is_finite()) {
        return Err(Error::Domain(format!("h_max must be positive, got {h_max}")));
    }
    if samples.is_empty() {
        return Err(Error::Domain("energy histogram needs at least one sample".into()));
    }
    // Sums accumulate in f64 and may exceed h_max by an ulp or so.
    let slack = 1e-9 * h_max;
    if let Some(bad) = samples.iter().find(|&&e| !(e >= -slack && e <= h_max + slack)) {
        return Err(Error::Domain(format!("energy sample {bad} outside [0, {h_max}]")));
    }
    let k = bin_count(samples.len());
    let width = h_max / k as f64;
    let bin_edges: Vec<f64> = (0..=k).map(|b| b as f64 * width).collect();
    let mut counts = vec![0usize; k];
    let mut sums = vec![0.0; k];
    for &e in samples {
        let b = ((e / width).floor().max(0.0) as usize).min(k - 1);
        counts[b] += 1;
        sums[b] += e;
    }
    let n = samples.len() as f64;
    let bin_centers = (0..k)
        .map(|b| {
            if counts[b] > 0 {
                sums[b] / counts[b] as f64
            } else {
                0.5 * (bin_edges[b] + bin_edges[b + 1])
            }
        })
        .collect();
    let probabilities = counts.iter().map(|&c| c as f64 / n).collect();
    Ok(EnergyHistogram {
        bin_count: k,
        bin_edges,
        bin_centers,
        probabilities,
    })
}

/// Shannon entropy `-sum p ln p`.
pub fn entropy(probabilities: &[f64]) -> f64 {
    let h = -probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>();
    // no -0.0 for a single occupied bin
    h + 0.0
}

/// Free energy by the two routes: `<E> - T S` and `-T ln Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergy {
    pub f_direct: f64,
    pub f_partition: f64,
    /// Entropy of the Boltzmann distribution over bin centers.
    pub entropy: f64,
    pub mean_energy: f64,
}

/// Boltzmann weights `exp(-E_k / T)` over the histogram's bin centers.
pub fn free_energy(histogram: &EnergyHistogram, t: f64) -> Result<FreeEnergy> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("temperature must be positive, got {t}")));
    }
    let levels = &histogram.bin_centers;
    let e_min = levels.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = levels.iter().map(|&e| (-(e - e_min) / t).exp()).collect();
    let z_shifted: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / z_shifted).collect();
    let mean_energy: f64 = probs.iter().zip(levels).map(|(p, e)| p * e).sum();
    let s = entropy(&probs);
    Ok(FreeEnergy {
        f_direct: mean_energy - t * s,
        f_partition: e_min - t * z_shifted.ln(),
        entropy: s,
        mean_energy,
    })
}

/// One row of the free-energy table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyPoint {
    #[serde(rename = "T")]
    pub temperature: f64,
    #[serde(rename = "F")]
    pub free_energy: f64,
    pub f_partition: f64,
    #[serde(rename = "S")]
    pub entropy: f64,
    /// Entropy of the sampled energy histogram itself.
    pub histogram_entropy: f64,
    pub chi: f64,
    pub mean_m: f64,
    #[serde(rename = "mean_H")]
    pub mean_h: f64,
}

pub fn free_energy_curve(sweep: &Sweep) -> Result<Vec<FreeEnergyPoint>> {
    if sweep.points.is_empty() {
        return Err(Error::Domain("free-energy curve needs a nonempty sweep".into()));
    }
    sweep
        .points
        .par_iter()
        .map(|p| {
            let hist = energy_histogram(&p.energy_samples, sweep.h_max)?;
            let f = free_energy(&hist, p.temperature)?;
            Ok(FreeEnergyPoint {
                temperature: p.temperature,
                free_energy: f.f_direct,
                f_partition: f.f_partition,
                entropy: f.entropy,
                histogram_entropy: entropy(&hist.probabilities),
                chi: p.susceptibility,
                mean_m: p.mean_magnetization,
                mean_h: p.mean_energy,
            })
        })
        .collect()
}

/// Writes the curve as CSV with a header row.
pub fn write_curve_csv<W: std::io::Write>(curve: &[FreeEnergyPoint], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for p in curve {
        out.serialize(p).map_err(|e| Error::Io(e.to_string()))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_counts() {
        assert_eq!(bin_count(2000), 19);
        assert_eq!(bin_count(1), 2);
    }

    #[test]
    fn histogram_of_constant_samples() {
        let h = energy_histogram(&[0.3; 2000], 1.0).unwrap();
        assert_eq!(h.bin_count, 19);
        let full: Vec<usize> = (0..19).filter(|&b| h.probabilities[b] > 0.0).collect();
        assert_eq!(full.len(), 1);
        assert_eq!(h.probabilities[full[0]], 1.0);
        assert!((h.bin_centers[full[0]] - 0.3).abs() < 1e-12);
        assert!(energy_histogram(&[1.5], 1.0).is_err());
        assert!(energy_histogram(&[-0.1], 1.0).is_err());
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(&[1.0, 0.0]), 0.0);
        assert!((entropy(&[0.25; 4]) - 4f64.ln()).abs() < 1e-15);
        assert!((entropy(&[0.5, 0.25, 0.25]) - 1.5 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn two_level_free_energy() {
        let h = EnergyHistogram {
            bin_count: 2,
            bin_edges: vec![0.0, 0.5, 1.0],
            bin_centers: vec![0.0, 1.0],
            probabilities: vec![0.5, 0.5],
        };
        let f = free_energy(&h, 1.0).unwrap();
        let expected = -(1.0 + (-1f64).exp()).ln();
        assert!((f.f_partition - expected).abs() < 1e-12);
        assert!((f.f_direct - expected).abs() < 1e-9);
        let cold = free_energy(&h, 1e-4).unwrap();
        assert!(cold.f_partition.abs() < 1e-12);
    }

    #[test]
    fn csv_header() {
        let p = FreeEnergyPoint {
            temperature: 0.1,
            free_energy: -1.0,
            f_partition: -1.0,
            entropy: 0.5,
            histogram_entropy: 0.4,
            chi: 2.0,
            mean_m: 0.3,
            mean_h: 0.2,
        };
        let mut buf = Vec::new();
        write_curve_csv(&[p], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("T,F,f_partition,S,histogram_entropy,chi,mean_m,mean_H\n"));
    }
}
