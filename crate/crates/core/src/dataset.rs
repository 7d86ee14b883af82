//! Tabular input, returns, and correlation matrices robust to missing values.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenvalue floor used by [`make_positive_definite`].
pub const PD_EPSILON: f64 = 1e-10;

/// `N` observations by `D` features with a presence mask.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    pub values: DMatrix<f64>,
    /// `true` where the value is present.
    pub mask: DMatrix<bool>,
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
}

impl DataMatrix {
    /// Fully observed matrix with synthesized ids.
    pub fn from_values(values: DMatrix<f64>) -> Self {
        let (n, d) = values.shape();
        DataMatrix {
            mask: DMatrix::from_element(n, d, true),
            row_ids: (0..n).map(|i| i.to_string()).collect(),
            col_ids: (0..d).map(|j| format!("x{j}")).collect(),
            values,
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        Self::from_values(DMatrix::from_fn(n, d, |i, j| rows[i][j]))
    }

    /// Rows with `None` marking missing cells.
    pub fn from_optional_rows(rows: &[Vec<Option<f64>>]) -> Self {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        let mut m = Self::from_values(DMatrix::from_fn(n, d, |i, j| rows[i][j].unwrap_or(0.0)));
        m.mask = DMatrix::from_fn(n, d, |i, j| rows[i][j].is_some());
        m
    }

    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.mask[(i, j)].then(|| self.values[(i, j)])
    }

    pub fn is_complete(&self) -> bool {
        self.mask.iter().all(|&m| m)
    }

    pub fn transpose(&self) -> Self {
        DataMatrix {
            values: self.values.transpose(),
            mask: self.mask.transpose(),
            row_ids: self.col_ids.clone(),
            col_ids: self.row_ids.clone(),
        }
    }

    /// Reorders rows; `order[p]` is the original row placed at position `p`.
    pub fn select_rows(&self, order: &[usize]) -> Self {
        let d = self.n_cols();
        DataMatrix {
            values: DMatrix::from_fn(order.len(), d, |p, j| self.values[(order[p], j)]),
            mask: DMatrix::from_fn(order.len(), d, |p, j| self.mask[(order[p], j)]),
            row_ids: order.iter().map(|&o| self.row_ids[o].clone()).collect(),
            col_ids: self.col_ids.clone(),
        }
    }

    pub(crate) fn require_complete(&self, what: &str) -> Result<()> {
        if self.is_complete() {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "{what} requires fully observed data; use the pairwise-overlap correlation path"
            )))
        }
    }
}

/// Provenance of a correlation-like matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationKind {
    Pearson,
    DenoisedRmt,
    DenoisedImn,
    SimilarityFromDistance,
}

impl CorrelationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CorrelationKind::Pearson => "pearson",
            CorrelationKind::DenoisedRmt => "denoised_rmt",
            CorrelationKind::DenoisedImn => "denoised_imn",
            CorrelationKind::SimilarityFromDistance => "similarity_from_distance",
        }
    }
}

impl fmt::Display for CorrelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CorrelationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pearson" => Ok(CorrelationKind::Pearson),
            "denoised_rmt" => Ok(CorrelationKind::DenoisedRmt),
            "denoised_imn" => Ok(CorrelationKind::DenoisedImn),
            "similarity_from_distance" => Ok(CorrelationKind::SimilarityFromDistance),
            other => Err(Error::Parse {
                row: 0,
                message: format!("unknown correlation kind {other:?}"),
            }),
        }
    }
}

/// Symmetric `N x N` correlation (or similarity) matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub values: DMatrix<f64>,
    pub kind: CorrelationKind,
    pub ids: Vec<String>,
}

impl CorrelationMatrix {
    pub fn new(values: DMatrix<f64>, kind: CorrelationKind) -> Self {
        let ids = (0..values.nrows()).map(|i| i.to_string()).collect();
        CorrelationMatrix { values, kind, ids }
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Self {
        self.ids = ids;
        self
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n), CorrelationKind::Pearson)
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    /// Largest absolute asymmetry `|C_ij - C_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.values[(i, j)] - self.values[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.values
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn select(&self, order: &[usize]) -> Self {
        CorrelationMatrix {
            values: DMatrix::from_fn(order.len(), order.len(), |a, b| {
                self.values[(order[a], order[b])]
            }),
            kind: self.kind,
            ids: order.iter().map(|&o| self.ids[o].clone()).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// CSV and JSON
// ---------------------------------------------------------------------------

/// CSV reading options.
#[derive(Debug, Clone, Copy, Default)]
pub struct CsvOptions {
    pub has_header: bool,
    /// First column carries row identifiers instead of data.
    pub row_labels: bool,
    /// The file stores features as rows and observations as columns.
    pub transpose: bool,
}

/// Reads a rectangular numeric CSV; blank cells become masked.
pub fn load_matrix(path: impl AsRef<Path>, has_header: bool) -> Result<DataMatrix> {
    load_matrix_with(
        path,
        CsvOptions {
            has_header,
            ..CsvOptions::default()
        },
    )
}

pub fn load_matrix_with(path: impl AsRef<Path>, opts: CsvOptions) -> Result<DataMatrix> {
    let file = std::fs::File::open(path.as_ref())?;
    read_matrix(file, opts)
}

pub fn read_matrix<R: Read>(reader: R, opts: CsvOptions) -> Result<DataMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let skip = usize::from(opts.row_labels);
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<Option<f64>>> = Vec::new();
    let mut row_ids = Vec::new();
    let mut width: Option<usize> = None;

    for (idx, record) in rdr.records().enumerate() {
        let line = idx + 1;
        let record = record.map_err(|e| Error::Parse {
            row: line,
            message: e.to_string(),
        })?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::Parse {
                    row: line,
                    message: format!("expected {w} fields, found {}", record.len()),
                })
            }
            _ => {}
        }
        if opts.has_header && header.is_none() {
            header = Some(record.iter().skip(skip).map(str::to_string).collect());
            continue;
        }
        if opts.row_labels {
            row_ids.push(record.get(0).unwrap_or_default().to_string());
        }
        let mut row = Vec::with_capacity(record.len() - skip);
        for (col, cell) in record.iter().enumerate().skip(skip) {
            if cell.is_empty() {
                row.push(None);
            } else {
                let v = cell.parse::<f64>().map_err(|_| Error::NonNumeric {
                    row: line,
                    col: col + 1,
                    value: cell.to_string(),
                })?;
                row.push(Some(v));
            }
        }
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(Error::Parse {
            row: 0,
            message: "no data rows".into(),
        });
    }
    let mut m = DataMatrix::from_optional_rows(&rows);
    if let Some(h) = header {
        m.col_ids = h;
    }
    if opts.row_labels {
        m.row_ids = row_ids;
    }
    Ok(if opts.transpose { m.transpose() } else { m })
}

/// Writes a matrix as CSV with a header row of column ids. Missing cells are blank.
pub fn write_matrix_csv<W: Write>(m: &DataMatrix, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(&m.col_ids).map_err(io)?;
    for i in 0..m.n_rows() {
        let row: Vec<String> = (0..m.n_cols())
            .map(|j| m.get(i, j).map_or_else(String::new, |v| v.to_string()))
            .collect();
        w.write_record(&row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// JSON envelope shared by data and correlation matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixEnvelope {
    pub kind: String,
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

pub const DATA_KIND: &str = "data";

impl From<&DataMatrix> for MatrixEnvelope {
    fn from(m: &DataMatrix) -> Self {
        MatrixEnvelope {
            kind: DATA_KIND.into(),
            row_ids: m.row_ids.clone(),
            col_ids: m.col_ids.clone(),
            values: (0..m.n_rows())
                .map(|i| (0..m.n_cols()).map(|j| m.get(i, j)).collect())
                .collect(),
        }
    }
}

impl From<&CorrelationMatrix> for MatrixEnvelope {
    fn from(c: &CorrelationMatrix) -> Self {
        let n = c.n();
        MatrixEnvelope {
            kind: c.kind.as_str().into(),
            row_ids: c.ids.clone(),
            col_ids: c.ids.clone(),
            values: (0..n)
                .map(|i| (0..n).map(|j| Some(c.values[(i, j)])).collect())
                .collect(),
        }
    }
}

impl MatrixEnvelope {
    fn check_shape(&self) -> Result<(usize, usize)> {
        let n = self.values.len();
        let d = self.values.first().map_or(0, Vec::len);
        if let Some((i, row)) = self.values.iter().enumerate().find(|(_, r)| r.len() != d) {
            return Err(Error::Parse {
                row: i + 1,
                message: format!("expected {d} values, found {}", row.len()),
            });
        }
        if self.row_ids.len() != n || self.col_ids.len() != d {
            return Err(Error::Parse {
                row: 0,
                message: "id lists do not match the value shape".into(),
            });
        }
        Ok((n, d))
    }

    pub fn into_data(self) -> Result<DataMatrix> {
        self.check_shape()?;
        let mut m = DataMatrix::from_optional_rows(&self.values);
        m.row_ids = self.row_ids;
        m.col_ids = self.col_ids;
        Ok(m)
    }

    pub fn into_correlation(self) -> Result<CorrelationMatrix> {
        let (n, d) = self.check_shape()?;
        if n != d {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: d,
            });
        }
        let kind: CorrelationKind = self.kind.parse()?;
        let mut values = DMatrix::zeros(n, n);
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                values[(i, j)] = v.ok_or_else(|| Error::Parse {
                    row: i + 1,
                    message: format!("missing correlation entry at column {}", j + 1),
                })?;
            }
        }
        Ok(CorrelationMatrix {
            values,
            kind,
            ids: self.row_ids,
        })
    }

    pub fn to_writer<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer(writer, self)?;
        Ok(())
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        Ok(serde_json::from_reader(reader)?)
    }
}

// ---------------------------------------------------------------------------
// Returns and correlations
// ---------------------------------------------------------------------------

/// Log returns `ln(P[t+1]) - ln(P[t])` along each row.
pub fn log_returns(prices: &DataMatrix) -> Result<DataMatrix> {
    let (n, d) = prices.values.shape();
    if d < 2 {
        return Err(Error::Domain(format!(
            "log returns need at least 2 time points per row, found {d}"
        )));
    }
    for i in 0..n {
        for j in 0..d {
            if let Some(p) = prices.get(i, j) {
                if p <= 0.0 || p.is_nan() {
                    return Err(Error::Domain(format!(
                        "nonpositive price {p} at row {i}, column {j}"
                    )));
                }
            }
        }
    }
    let values = DMatrix::from_fn(n, d - 1, |i, t| {
        match (prices.get(i, t), prices.get(i, t + 1)) {
            (Some(a), Some(b)) => b.ln() - a.ln(),
            _ => 0.0,
        }
    });
    let mask = DMatrix::from_fn(n, d - 1, |i, t| prices.mask[(i, t)] && prices.mask[(i, t + 1)]);
    Ok(DataMatrix {
        values,
        mask,
        row_ids: prices.row_ids.clone(),
        col_ids: prices.col_ids[1..].to_vec(),
    })
}

/// Plain Pearson correlation between the rows of a fully observed matrix.
pub fn pearson(data: &DataMatrix) -> Result<CorrelationMatrix> {
    data.require_complete("pearson correlation")?;
    let (n, d) = data.values.shape();
    let mut z = data.values.clone();
    for i in 0..n {
        let mut row = z.row_mut(i);
        let mean = row.sum() / d as f64;
        row.add_scalar_mut(-mean);
        let norm = row.norm();
        if norm == 0.0 {
            return Err(Error::DegeneratePair { i, j: i });
        }
        row /= norm;
    }
    let mut c = &z * z.transpose();
    for i in 0..n {
        c[(i, i)] = 1.0;
        for j in (i + 1)..n {
            let v = c[(i, j)].clamp(-1.0, 1.0);
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    Ok(CorrelationMatrix::new(c, CorrelationKind::Pearson).with_ids(data.row_ids.clone()))
}

/// Pearson correlation of each row pair over the columns present in both.
pub fn pairwise_overlap_correlation(data: &DataMatrix) -> Result<CorrelationMatrix> {
    let (n, d) = data.values.shape();
    let mut c = DMatrix::identity(n, n);
    let mut xs = Vec::with_capacity(d);
    let mut ys = Vec::with_capacity(d);
    for i in 0..n {
        for j in (i + 1)..n {
            xs.clear();
            ys.clear();
            for t in 0..d {
                if data.mask[(i, t)] && data.mask[(j, t)] {
                    xs.push(data.values[(i, t)]);
                    ys.push(data.values[(j, t)]);
                }
            }
            if xs.len() < 3 {
                return Err(Error::InsufficientOverlap {
                    i,
                    j,
                    overlap: xs.len(),
                });
            }
            let k = xs.len() as f64;
            let mx = xs.iter().sum::<f64>() / k;
            let my = ys.iter().sum::<f64>() / k;
            let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
            for (x, y) in xs.iter().zip(&ys) {
                let (dx, dy) = (x - mx, y - my);
                sxy += dx * dy;
                sxx += dx * dx;
                syy += dy * dy;
            }
            if sxx == 0.0 || syy == 0.0 {
                return Err(Error::DegeneratePair { i, j });
            }
            let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
            c[(i, j)] = r;
            c[(j, i)] = r;
        }
    }
    Ok(CorrelationMatrix::new(c, CorrelationKind::Pearson).with_ids(data.row_ids.clone()))
}

/// Symmetric eigen-repair: clip small eigenvalues, rebuild, restore the unit
/// diagonal. Output eigenvalues are all at least [`PD_EPSILON`].
pub fn make_positive_definite(corr: &CorrelationMatrix) -> CorrelationMatrix {
    let n = corr.n();
    let sym = (&corr.values + corr.values.transpose()) * 0.5;
    let eig = sym.clone().symmetric_eigen();
    if eig.eigenvalues.iter().all(|&l| l >= PD_EPSILON) {
        return corr.clone();
    }

    // Rescaling to unit diagonal shrinks the spectrum by up to the largest
    // diagonal entry, so the floor is raised until the rescaled result clears it.
    let mut floor = PD_EPSILON;
    let mut out = sym;
    for _ in 0..64 {
        let clipped = eig.eigenvalues.map(|l| l.max(floor));
        let rebuilt = &eig.eigenvectors
            * DMatrix::from_diagonal(&clipped)
            * eig.eigenvectors.transpose();
        let scale: Vec<f64> = (0..n).map(|i| rebuilt[(i, i)].sqrt()).collect();
        let mut m = DMatrix::from_fn(n, n, |i, j| rebuilt[(i, j)] / (scale[i] * scale[j]));
        for i in 0..n {
            m[(i, i)] = 1.0;
            for j in (i + 1)..n {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        let min_eig = m
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        out = m;
        if min_eig >= PD_EPSILON {
            break;
        }
        let max_diag = (0..n).map(|i| rebuilt[(i, i)]).fold(1.0, f64::max);
        floor *= max_diag.max(1.0 + 1e-3);
    }
    CorrelationMatrix {
        values: out,
        kind: corr.kind,
        ids: corr.ids.clone(),
    }
}
