//! CSV ingestion for the supported schemas and CSV export of datasets.
//!
//! Dialect: comma separated, mandatory header row, UTF-8, `.` decimal point.
//! Lines starting with `#` are comments; exports put a provenance line there.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use advids_core::data::{
    modbus_time_features, Dataset, Schema, SchemaKind, MODBUS_REGISTER_COLUMNS,
    MODBUS_TIMESTAMP_COLUMN,
};
use advids_core::linalg::Matrix;
use chrono::{NaiveDate, NaiveTime};

use crate::error::{AppError, Result};

/// Result of reading a CSV file.
#[derive(Debug)]
pub struct Ingested {
    pub dataset: Dataset,
    /// Rows skipped because a required numeric field did not parse.
    pub dropped_rows: usize,
}

/// How a row's feature vector is assembled from the CSV columns.
enum Layout {
    /// Every model feature is a column of its own.
    Direct(Vec<usize>),
    /// Modbus register counts plus time features from a Unix timestamp column.
    ModbusTs { registers: Vec<usize>, ts: usize },
    /// Modbus register counts plus time features from `date` and `time` columns.
    ModbusDateTime {
        registers: Vec<usize>,
        date: usize,
        time: usize,
    },
}

/// Reads a dataset in `schema` layout. Extra columns are ignored; rows with an
/// unparseable or non-finite numeric field are dropped and counted. Labels may
/// be class names or already binary `0`/`1`; any other label aborts the read.
pub fn ingest_csv(path: &Path, schema: &Schema) -> Result<Ingested> {
    let file = File::open(path).map_err(|e| AppError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));
    let csv_err = |source| AppError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let headers = reader.headers().map_err(csv_err)?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let require = |name: &str| {
        find(name).ok_or_else(|| AppError::MissingColumn {
            path: path.to_path_buf(),
            column: name.to_string(),
        })
    };

    let label_col = require(&schema.label_column)?;
    let direct: Option<Vec<usize>> = schema.feature_names.iter().map(|n| find(n)).collect();
    let layout = match (direct, schema.kind) {
        (Some(cols), _) => Layout::Direct(cols),
        (None, SchemaKind::Modbus) => {
            let registers = MODBUS_REGISTER_COLUMNS
                .iter()
                .map(|c| require(c))
                .collect::<Result<Vec<_>>>()?;
            match (find(MODBUS_TIMESTAMP_COLUMN), find("date"), find("time")) {
                (Some(ts), _, _) => Layout::ModbusTs { registers, ts },
                (None, Some(date), Some(time)) => Layout::ModbusDateTime {
                    registers,
                    date,
                    time,
                },
                _ => return Err(require(MODBUS_TIMESTAMP_COLUMN).unwrap_err()),
            }
        }
        (None, _) => {
            let missing = schema
                .feature_names
                .iter()
                .find(|n| find(n).is_none())
                .expect("some feature column is missing");
            return Err(require(missing).unwrap_err());
        }
    };

    let width = schema.feature_count();
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut dropped = 0usize;
    let mut row = Vec::with_capacity(width);
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        row.clear();
        if !parse_features(&record, &layout, &mut row) {
            dropped += 1;
            continue;
        }
        let Some(raw_label) = record.get(label_col) else {
            dropped += 1;
            continue;
        };
        let label = match raw_label {
            "0" => 0,
            "1" => 1,
            name => schema.binarize(name)?,
        };
        values.extend_from_slice(&row);
        labels.push(label);
    }
    if labels.is_empty() {
        return Err(advids_core::Error::EmptyData(format!(
            "{}: no usable rows ({dropped} dropped)",
            path.display()
        ))
        .into());
    }
    if dropped > 0 {
        log::warn!(
            "{}: dropped {dropped} rows with unparseable values",
            path.display()
        );
    }
    let features = Matrix::new(labels.len(), width, values)?;
    Ok(Ingested {
        dataset: Dataset::new(schema.clone(), features, labels)?,
        dropped_rows: dropped,
    })
}

fn parse_number(field: Option<&str>) -> Option<f64> {
    field?.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_features(record: &csv::StringRecord, layout: &Layout, out: &mut Vec<f64>) -> bool {
    let push_all = |cols: &[usize], out: &mut Vec<f64>| {
        for &c in cols {
            match parse_number(record.get(c)) {
                Some(v) => out.push(v),
                None => return false,
            }
        }
        true
    };
    match layout {
        Layout::Direct(cols) => push_all(cols, out),
        Layout::ModbusTs { registers, ts } => {
            let Some(ts) = parse_number(record.get(*ts)) else {
                return false;
            };
            push_all(registers, out) && {
                out.extend(modbus_time_features(ts));
                true
            }
        }
        Layout::ModbusDateTime {
            registers,
            date,
            time,
        } => {
            let Some(ts) = record
                .get(*date)
                .zip(record.get(*time))
                .and_then(|(d, t)| unix_seconds(d, t))
            else {
                return false;
            };
            push_all(registers, out) && {
                out.extend(modbus_time_features(ts));
                true
            }
        }
    }
}

/// Seconds since the Unix epoch for a `date` (e.g. `25-Apr-19`, `2019-04-25`)
/// and `time` (`HH:MM:SS`) pair, read as UTC.
fn unix_seconds(date: &str, time: &str) -> Option<f64> {
    let date = ["%d-%b-%y", "%Y-%m-%d", "%d/%m/%Y", "%d-%b-%Y"]
        .iter()
        .find_map(|f| NaiveDate::parse_from_str(date, f).ok())?;
    let time = ["%H:%M:%S", "%H:%M:%S%.f", "%H:%M"]
        .iter()
        .find_map(|f| NaiveTime::parse_from_str(time, f).ok())?;
    Some(date.and_time(time).and_utc().timestamp() as f64)
}

/// Key-value facts written to the `#` line of an exported CSV.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CsvProvenance {
    pub schema: String,
    pub seed: u64,
    pub epsilon: Option<f64>,
    pub source_sha256: Option<String>,
}

/// Writes `data` with a provenance comment line, a header of feature names
/// plus the schema's label column, and binary labels.
pub fn write_csv(path: &Path, data: &Dataset, provenance: &CsvProvenance) -> Result<()> {
    let io_err = |e| AppError::io(path, e);
    let mut file = std::io::BufWriter::new(File::create(path).map_err(io_err)?);
    let mut line = format!(
        "# schema={} seed={} rows={}",
        provenance.schema,
        provenance.seed,
        data.len()
    );
    if let Some(eps) = provenance.epsilon {
        line.push_str(&format!(" epsilon={eps}"));
    }
    if let Some(hash) = &provenance.source_sha256 {
        line.push_str(&format!(" source_sha256={hash}"));
    }
    writeln!(file, "{line}").map_err(io_err)?;

    let mut writer = csv::Writer::from_writer(file);
    let csv_err = |source| AppError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let schema = data.schema();
    let mut header: Vec<&str> = schema.feature_names.iter().map(String::as_str).collect();
    header.push(&schema.label_column);
    writer.write_record(&header).map_err(csv_err)?;
    let mut fields = Vec::with_capacity(header.len());
    for (row, &label) in data.features().row_iter().zip(data.labels()) {
        fields.clear();
        fields.extend(row.iter().map(|v| v.to_string()));
        fields.push(label.to_string());
        writer.write_record(&fields).map_err(csv_err)?;
    }
    writer.flush().map_err(io_err)?;
    Ok(())
}

/// Parses the `key=value` pairs of a leading `#` line, if the file has one.
pub fn read_provenance(path: &Path) -> Result<Option<BTreeMap<String, String>>> {
    let file = File::open(path).map_err(|e| AppError::io(path, e))?;
    let mut first = String::new();
    BufReader::new(file)
        .read_line(&mut first)
        .map_err(|e| AppError::io(path, e))?;
    let Some(rest) = first.trim_end().strip_prefix('#') else {
        return Ok(None);
    };
    Ok(Some(
        rest.split_whitespace()
            .filter_map(|kv| kv.split_once('='))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
    ))
}
