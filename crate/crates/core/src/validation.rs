//! Cross-checks between sweeps, likelihoods and reference partitions, and
//! phase-boundary detection from the susceptibility curve.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::evaluation::adjusted_rand_index;
use crate::fspc::likelihood;
use crate::labeling::ClusterLabeling;
use crate::spc::Sweep;

/// Fraction of the global susceptibility maximum used for peak prominence
/// and for the end of the super-paramagnetic window.
pub const CHI_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    #[serde(rename = "T")]
    pub temperature: f64,
    pub value: f64,
}

pub fn lc_vs_temperature(sweep: &Sweep, corr: &CorrelationMatrix) -> Result<Vec<CurvePoint>> {
    sweep
        .points
        .par_iter()
        .map(|p| {
            Ok(CurvePoint {
                temperature: p.temperature,
                value: likelihood(&p.labeling, corr)?,
            })
        })
        .collect()
}

pub fn ari_vs_temperature(sweep: &Sweep, reference: &ClusterLabeling) -> Result<Vec<CurvePoint>> {
    sweep
        .points
        .par_iter()
        .map(|p| {
            Ok(CurvePoint {
                temperature: p.temperature,
                value: adjusted_rand_index(&p.labeling, reference)?,
            })
        })
        .collect()
}

/// Index of the first maximum of a curve.
pub fn argmax(curve: &[CurvePoint]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (k, p) in curve.iter().enumerate() {
        if best.is_none_or(|b| p.value > curve[b].value) {
            best = Some(k);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiPeak {
    pub index: usize,
    #[serde(rename = "T")]
    pub temperature: f64,
    pub chi: f64,
    pub prominence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Ferromagnetic,
    SuperParamagnetic,
    Paramagnetic,
    /// No prominent susceptibility peak was found.
    Unresolved,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Ferromagnetic => "ferromagnetic",
            Phase::SuperParamagnetic => "super_paramagnetic",
            Phase::Paramagnetic => "paramagnetic",
            Phase::Unresolved => "unresolved",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentRow {
    #[serde(rename = "T")]
    pub temperature: f64,
    pub chi: f64,
    pub mean_m: f64,
    pub n_clusters: usize,
    /// Descending.
    pub cluster_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSegment {
    pub phase: Phase,
    pub t_start: f64,
    pub t_end: f64,
    pub rows: Vec<SegmentRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub chi_max: f64,
    pub peaks: Vec<ChiPeak>,
    /// Inclusive temperature bounds of the super-paramagnetic segment.
    pub sp_window: Option<(f64, f64)>,
    pub segments: Vec<PhaseSegment>,
}

/// Strict local maxima (edge points compare with their one neighbor) whose
/// topographic prominence reaches `CHI_THRESHOLD` of the global maximum.
pub fn chi_peaks(temperatures: &[f64], chi: &[f64]) -> Vec<ChiPeak> {
    let n = chi.len();
    let chi_max = chi.iter().copied().fold(0.0, f64::max);
    if n == 0 || chi_max <= 0.0 {
        return Vec::new();
    }
    let mut peaks = Vec::new();
    for k in 0..n {
        let left_ok = k == 0 || chi[k] > chi[k - 1];
        let right_ok = k + 1 == n || chi[k] > chi[k + 1];
        if !(left_ok && right_ok) || n == 1 {
            continue;
        }
        // Lowest point on each side before reaching higher ground.
        let side_base = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
            let mut low: Option<f64> = None;
            for j in range {
                if chi[j] > chi[k] {
                    break;
                }
                low = Some(low.map_or(chi[j], |l: f64| l.min(chi[j])));
            }
            low
        };
        let left = side_base(&mut (0..k).rev());
        let right = side_base(&mut (k + 1..n));
        let base = match (left, right) {
            (Some(a), Some(b)) => a.max(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => continue,
        };
        let prominence = chi[k] - base;
        if prominence >= CHI_THRESHOLD * chi_max {
            peaks.push(ChiPeak {
                index: k,
                temperature: temperatures[k],
                chi: chi[k],
                prominence,
            });
        }
    }
    peaks
}

pub fn phase_report(sweep: &Sweep) -> Result<PhaseReport> {
    let n = sweep.points.len();
    if n < 3 {
        return Err(Error::InsufficientGrid(n));
    }
    if sweep.points.windows(2).any(|w| w[1].temperature <= w[0].temperature) {
        return Err(Error::Domain("sweep must be sorted by temperature".into()));
    }
    let temps = sweep.temperatures();
    let chi = sweep.susceptibilities();
    let chi_max = chi.iter().copied().fold(0.0, f64::max);
    let peaks = chi_peaks(&temps, &chi);

    let row = |k: usize| {
        let p = &sweep.points[k];
        SegmentRow {
            temperature: p.temperature,
            chi: p.susceptibility,
            mean_m: p.mean_magnetization,
            n_clusters: p.labeling.n_clusters(),
            cluster_sizes: p.labeling.sorted_sizes(),
        }
    };
    let segment = |phase, range: std::ops::Range<usize>| PhaseSegment {
        phase,
        t_start: temps[range.start],
        t_end: temps[range.end - 1],
        rows: range.map(row).collect(),
    };

    let (sp_window, segments) = match (peaks.first(), peaks.last()) {
        (Some(first), Some(last)) => {
            let start = first.index;
            let end = (last.index + 1..n)
                .find(|&k| chi[k] < CHI_THRESHOLD * chi_max)
                .unwrap_or(n - 1);
            let mut segs = Vec::new();
            if start > 0 {
                segs.push(segment(Phase::Ferromagnetic, 0..start));
            }
            segs.push(segment(Phase::SuperParamagnetic, start..end + 1));
            if end + 1 < n {
                segs.push(segment(Phase::Paramagnetic, end + 1..n));
            }
            (Some((temps[start], temps[end])), segs)
        }
        _ => (None, vec![segment(Phase::Unresolved, 0..n)]),
    };
    Ok(PhaseReport {
        chi_max,
        peaks,
        sp_window,
        segments,
    })
}

/// Everything the `validate` command reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub phase: PhaseReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lc: Option<Vec<CurvePoint>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ari: Option<Vec<CurvePoint>>,
}

impl ValidationReport {
    pub fn build(
        sweep: &Sweep,
        corr: Option<&CorrelationMatrix>,
        reference: Option<&ClusterLabeling>,
    ) -> Result<Self> {
        Ok(ValidationReport {
            phase: phase_report(sweep)?,
            lc: corr.map(|c| lc_vs_temperature(sweep, c)).transpose()?,
            ari: reference.map(|r| ari_vs_temperature(sweep, r)).transpose()?,
        })
    }

    pub fn to_markdown(&self) -> String {
        const SHOWN_SIZES: usize = 10;
        let mut md = String::from("# Phase report\n\n");
        let p = &self.phase;
        let _ = writeln!(md, "Maximum susceptibility: {}\n", p.chi_max);
        if p.peaks.is_empty() {
            md.push_str("No prominent susceptibility peak; no transitions reported.\n\n");
        } else {
            md.push_str("| T | chi | prominence |\n|---|---|---|\n");
            for pk in &p.peaks {
                let _ = writeln!(md, "| {} | {} | {} |", pk.temperature, pk.chi, pk.prominence);
            }
            md.push('\n');
        }
        if let Some((a, b)) = p.sp_window {
            let _ = writeln!(md, "Super-paramagnetic window: [{a}, {b}]\n");
        }
        for seg in &p.segments {
            let _ = writeln!(md, "## {} ({} to {})\n", seg.phase.as_str(), seg.t_start, seg.t_end);
            md.push_str("| T | chi | mean m | clusters | largest sizes |\n|---|---|---|---|---|\n");
            for r in &seg.rows {
                let mut sizes: Vec<String> =
                    r.cluster_sizes.iter().take(SHOWN_SIZES).map(|s| s.to_string()).collect();
                if r.cluster_sizes.len() > SHOWN_SIZES {
                    sizes.push("...".into());
                }
                let _ = writeln!(
                    md,
                    "| {} | {} | {} | {} | {} |",
                    r.temperature,
                    r.chi,
                    r.mean_m,
                    r.n_clusters,
                    sizes.join(" ")
                );
            }
            md.push('\n');
        }
        for (title, curve) in [("Likelihood", &self.lc), ("ARI against reference", &self.ari)] {
            if let Some(curve) = curve {
                let _ = writeln!(md, "## {title}\n");
                if let Some(k) = argmax(curve) {
                    let _ = writeln!(md, "Maximum {} at T = {}\n", curve[k].value, curve[k].temperature);
                }
                md.push_str("| T | value |\n|---|---|\n");
                for c in curve.iter() {
                    let _ = writeln!(md, "| {} | {} |", c.temperature, c.value);
                }
                md.push('\n');
            }
        }
        md
    }
}
