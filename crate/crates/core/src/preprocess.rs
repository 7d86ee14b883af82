//! Feature scaling and market-mode removal.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dataset::{pearson, CorrelationKind, CorrelationMatrix, DataMatrix};
use crate::error::{Error, Result};

pub const DEFAULT_IMN_ITERS: usize = 500;
pub const DEFAULT_IMN_TOL: f64 = 1e-8;

/// Maps every feature column onto `[0, 1]` using its present entries.
/// Constant columns map to 0.
pub fn min_max_scale(data: &DataMatrix) -> DataMatrix {
    let mut out = data.clone();
    for j in 0..data.n_cols() {
        let present = (0..data.n_rows()).filter_map(|i| data.get(i, j));
        let (lo, hi) = present.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        let span = hi - lo;
        for i in 0..data.n_rows() {
            if data.mask[(i, j)] {
                out.values[(i, j)] = if span > 0.0 {
                    (data.values[(i, j)] - lo) / span
                } else {
                    0.0
                };
            }
        }
    }
    out
}

/// Marchenko-Pastur support for a pure-noise correlation matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WishartBounds {
    /// `Q = D / N`.
    pub q_ratio: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl WishartBounds {
    pub fn from_ratio(q_ratio: f64) -> Self {
        let inv = 1.0 / q_ratio;
        let spread = 2.0 * inv.sqrt();
        WishartBounds {
            q_ratio,
            lambda_min: (1.0 + inv - spread).max(0.0),
            lambda_max: 1.0 + inv + spread,
        }
    }

    pub fn contains(&self, lambda: f64) -> bool {
        lambda >= self.lambda_min && lambda <= self.lambda_max
    }

    /// Eigenvalue density; zero outside the band.
    pub fn pdf(&self, lambda: f64) -> f64 {
        wishart_pdf(lambda, self)
    }
}

pub fn wishart_bounds(n_obs: usize, n_features: usize) -> WishartBounds {
    WishartBounds::from_ratio(n_features as f64 / n_obs as f64)
}

pub fn wishart_pdf(lambda: f64, bounds: &WishartBounds) -> f64 {
    if lambda <= bounds.lambda_min || lambda >= bounds.lambda_max || lambda <= 0.0 {
        return 0.0;
    }
    let inner = (bounds.lambda_max - lambda) * (lambda - bounds.lambda_min);
    bounds.q_ratio / (2.0 * std::f64::consts::PI) * inner.sqrt() / lambda
}

fn standardize_rows(values: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut z = values.clone();
    let d = values.ncols() as f64;
    for i in 0..z.nrows() {
        let mut row = z.row_mut(i);
        let mean = row.sum() / d;
        row.add_scalar_mut(-mean);
        let sd = (row.norm_squared() / d).sqrt();
        if sd == 0.0 {
            return Err(Error::DegenerateInput(format!("row {i} has zero variance")));
        }
        row /= sd;
    }
    Ok(z)
}

/// Result of the eigen-filtering step, kept for reporting.
#[derive(Debug, Clone)]
pub struct RmtOutcome {
    pub correlation: CorrelationMatrix,
    pub bounds: WishartBounds,
    pub eigenvalues: Vec<f64>,
    pub retained: Vec<f64>,
}

/// Removes noise eigenmodes: rows are standardized, eigenvectors whose
/// eigenvalue falls inside the Wishart band are dropped, the data are
/// reconstructed from the rest and correlated again.
///
/// With `upper_only` only eigenvalues above the band are kept.
pub fn rmt_denoise(data: &DataMatrix, upper_only: bool) -> Result<CorrelationMatrix> {
    rmt_denoise_detailed(data, upper_only).map(|o| o.correlation)
}

pub fn rmt_denoise_detailed(data: &DataMatrix, upper_only: bool) -> Result<RmtOutcome> {
    data.require_complete("RMT denoising")?;
    let (n, d) = data.values.shape();
    if n < 2 || d < 2 {
        return Err(Error::Domain(format!(
            "RMT denoising needs at least 2 rows and 2 columns, got {n}x{d}"
        )));
    }
    let z = standardize_rows(&data.values)?;
    let corr = &z * z.transpose() / d as f64;
    let eig = corr.symmetric_eigen();
    let bounds = wishart_bounds(n, d);

    let keep: Vec<usize> = (0..n)
        .filter(|&k| {
            let l = eig.eigenvalues[k];
            if upper_only {
                l > bounds.lambda_max
            } else {
                !bounds.contains(l)
            }
        })
        .collect();
    if keep.is_empty() {
        return Err(Error::DegenerateSpectrum {
            lambda_min: bounds.lambda_min,
            lambda_max: bounds.lambda_max,
        });
    }
    let w = DMatrix::from_fn(n, keep.len(), |i, c| eig.eigenvectors[(i, keep[c])]);
    let compressed = w.transpose() * &z;
    let reconstructed = &w * compressed;

    let mut recon = DataMatrix::from_values(reconstructed);
    recon.row_ids = data.row_ids.clone();
    let mut c = pearson(&recon).map_err(|e| match e {
        Error::DegeneratePair { i, .. } => Error::DegenerateInput(format!(
            "row {i} vanishes after removing the noise band"
        )),
        other => other,
    })?;
    c.kind = CorrelationKind::DenoisedRmt;

    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    let mut retained: Vec<f64> = keep.iter().map(|&k| eig.eigenvalues[k]).collect();
    retained.sort_by(|a, b| b.total_cmp(a));
    Ok(RmtOutcome {
        correlation: c,
        bounds,
        eigenvalues,
        retained,
    })
}

/// Input accepted by [`imn_denoise`].
#[derive(Debug, Clone, Copy)]
pub enum ImnInput<'a> {
    /// Observations in rows; their covariance is normalized.
    Data(&'a DataMatrix),
    /// A square covariance (or correlation) matrix.
    Covariance(&'a DMatrix<f64>),
}

/// Row covariance (divide by `D`) of a fully observed matrix.
pub fn covariance(data: &DataMatrix) -> Result<DMatrix<f64>> {
    data.require_complete("covariance")?;
    let d = data.n_cols() as f64;
    let mut centred = data.values.clone();
    for i in 0..centred.nrows() {
        let mut row = centred.row_mut(i);
        let mean = row.sum() / d;
        row.add_scalar_mut(-mean);
    }
    Ok(&centred * centred.transpose() / d)
}

fn line_stats(values: impl Iterator<Item = f64> + Clone, len: f64) -> (f64, f64) {
    let mean = values.clone().sum::<f64>() / len;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / len;
    (mean, var.sqrt())
}

/// Iterative matrix normalization: alternately standardize rows and columns
/// of the covariance until they have zero mean and unit (population)
/// standard deviation, then symmetrize and rescale to unit diagonal.
pub fn imn_denoise(input: ImnInput<'_>, max_iters: usize, tol: f64) -> Result<CorrelationMatrix> {
    if max_iters == 0 {
        return Err(Error::Domain("IMN needs at least one iteration".into()));
    }
    let (mut a, ids) = match input {
        ImnInput::Data(d) => (covariance(d)?, d.row_ids.clone()),
        ImnInput::Covariance(c) => {
            if !c.is_square() {
                return Err(Error::DimensionMismatch {
                    expected: c.nrows(),
                    actual: c.ncols(),
                });
            }
            (c.clone(), (0..c.nrows()).map(|i| i.to_string()).collect())
        }
    };
    let n = a.nrows();
    if n < 2 {
        return Err(Error::DegenerateInput("IMN needs at least 2 rows".into()));
    }
    let len = n as f64;

    for _ in 0..max_iters {
        for i in 0..n {
            let (mean, sd) = line_stats(a.row(i).iter().copied(), len);
            if sd == 0.0 {
                return Err(Error::DegenerateInput(format!("row {i} has zero variance")));
            }
            a.row_mut(i).iter_mut().for_each(|v| *v = (*v - mean) / sd);
        }
        for j in 0..n {
            let (mean, sd) = line_stats(a.column(j).iter().copied(), len);
            if sd == 0.0 {
                return Err(Error::DegenerateInput(format!("column {j} has zero variance")));
            }
            a.column_mut(j).iter_mut().for_each(|v| *v = (*v - mean) / sd);
        }
        if imn_converged(&a, tol) {
            break;
        }
    }

    let sym = (&a + a.transpose()) * 0.5;
    let diag: Vec<f64> = (0..n).map(|i| sym[(i, i)]).collect();
    if let Some(i) = diag.iter().position(|&v| v <= 0.0) {
        return Err(Error::DegenerateInput(format!(
            "normalized diagonal entry {i} is not positive"
        )));
    }
    let mut out = DMatrix::from_fn(n, n, |i, j| sym[(i, j)] / (diag[i] * diag[j]).sqrt());
    for i in 0..n {
        out[(i, i)] = 1.0;
    }
    Ok(CorrelationMatrix {
        values: out,
        kind: CorrelationKind::DenoisedImn,
        ids,
    })
}

/// Convergence test used by [`imn_denoise`].
pub fn imn_converged(a: &DMatrix<f64>, tol: f64) -> bool {
    let len = a.nrows() as f64;
    let ok = |(mean, sd): (f64, f64)| mean.abs() < tol && (sd - 1.0).abs() < tol;
    (0..a.nrows()).all(|i| ok(line_stats(a.row(i).iter().copied(), len)))
        && (0..a.ncols()).all(|j| ok(line_stats(a.column(j).iter().copied(), len)))
}
