use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use spclust::{
    ClusterLabeling, CorrelationMatrix, CsvOptions, DataMatrix, GraphExport, MatrixEnvelope, Result,
    DATA_KIND,
};

pub fn is_stdio(path: &Path) -> bool {
    path.as_os_str() == "-"
}

pub fn has_extension(path: &Path, ext: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

pub fn create(path: &Path) -> Result<Box<dyn Write>> {
    Ok(if is_stdio(path) {
        Box::new(BufWriter::new(io::stdout().lock()))
    } else {
        Box::new(BufWriter::new(File::create(path)?))
    })
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

/// Compact JSON followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub enum MatrixInput {
    Data(DataMatrix),
    Correlation(CorrelationMatrix),
}

/// True when a cell of the first non-empty CSV line (past the row-label column) is not a number.
pub fn sniff_header(path: &Path, row_labels: bool) -> Result<bool> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(open(path)?);
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let skip = usize::from(row_labels);
        return Ok(record
            .iter()
            .skip(skip)
            .any(|cell| !cell.is_empty() && cell.parse::<f64>().is_err()));
    }
    Ok(false)
}

/// Reads a JSON envelope (`.json`) or a numeric CSV.
pub fn read_matrix_input(path: &Path, opts: CsvOptions) -> Result<MatrixInput> {
    if has_extension(path, "json") {
        let env = MatrixEnvelope::from_reader(open(path)?)?;
        if env.kind == DATA_KIND {
            Ok(MatrixInput::Data(env.into_data()?))
        } else {
            Ok(MatrixInput::Correlation(env.into_correlation()?))
        }
    } else {
        Ok(MatrixInput::Data(spclust::load_matrix_with(path, opts)?))
    }
}

pub fn read_correlation(path: &Path) -> Result<CorrelationMatrix> {
    MatrixEnvelope::from_reader(open(path)?)?.into_correlation()
}

pub enum SpcInput {
    Matrix(MatrixInput),
    Graph(GraphExport),
}

/// Like [`read_matrix_input`] but also accepts an exported graph.
pub fn read_spc_input(path: &Path, opts: CsvOptions) -> Result<SpcInput> {
    if !has_extension(path, "json") {
        return read_matrix_input(path, opts).map(SpcInput::Matrix);
    }
    let mut text = String::new();
    open(path)?.read_to_string(&mut text)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("edges").is_some() {
        Ok(SpcInput::Graph(serde_json::from_value(value)?))
    } else {
        let env: MatrixEnvelope = serde_json::from_value(value)?;
        Ok(SpcInput::Matrix(if env.kind == DATA_KIND {
            MatrixInput::Data(env.into_data()?)
        } else {
            MatrixInput::Correlation(env.into_correlation()?)
        }))
    }
}

#[derive(Serialize)]
struct LabelRow {
    label: usize,
}

#[derive(Deserialize)]
struct LabelRowIn {
    label: String,
}

/// One-column CSV with header `label`.
pub fn write_labels(path: &Path, labels: &ClusterLabeling) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for &label in labels.labels() {
        w.serialize(LabelRow { label }).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a label CSV; labels may be any strings and are re-sequentialized.
pub fn read_labels(path: &Path) -> Result<ClusterLabeling> {
    let mut r = csv::Reader::from_reader(open(path)?);
    let mut raw = Vec::new();
    for (row, rec) in r.deserialize::<LabelRowIn>().enumerate() {
        let rec = rec.map_err(|e| spclust::Error::Parse {
            row: row + 2,
            message: e.to_string(),
        })?;
        raw.push(rec.label);
    }
    Ok(ClusterLabeling::from_raw(&raw.iter().map(String::as_str).collect::<Vec<_>>()))
}

pub fn csv_error(e: csv::Error) -> spclust::Error {
    spclust::Error::Io(e.to_string())
}
