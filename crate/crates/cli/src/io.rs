//! Number formatting, degradation-data CSV and output sinks.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use degplan::fit::{DegradationDataset, UnitPath};
use serde_json::Value;

use crate::error::CliError;

pub const DEFAULT_DIGITS: usize = 6;

/// Significant-digit rounding; `None` keeps the shortest exact representation.
#[derive(Debug, Clone, Copy)]
pub struct Fmt(pub Option<usize>);

impl Fmt {
    pub fn round(self, x: f64) -> f64 {
        match self.0 {
            Some(d) if x.is_finite() && x != 0.0 => format!("{:.*e}", d - 1, x).parse().unwrap_or(x),
            _ => x,
        }
    }

    pub fn num(self, x: f64) -> Value {
        if x.is_finite() {
            Value::from(self.round(x))
        } else {
            Value::Null
        }
    }

    pub fn cell(self, x: f64) -> String {
        if x.is_finite() {
            self.round(x).to_string()
        } else {
            "NA".into()
        }
    }
}

pub const DATA_HEADER: [&str; 3] = ["unit", "time", "value"];

/// Read `unit,time,value` rows sorted by unit then time.
pub fn read_dataset(path: &Path) -> Result<DegradationDataset, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let shown = path.display().to_string();
    let data_err = |line: u64, detail: String| CliError::Data {
        path: shown.clone(),
        line,
        detail,
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let header = rdr.headers().map_err(|e| data_err(1, e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != DATA_HEADER {
        return Err(data_err(
            1,
            format!(
                "expected header `unit,time,value`, got `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut units: Vec<UnitPath> = Vec::new();
    let mut seen = HashSet::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| data_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |i: usize, what: &str| -> Result<f64, CliError> {
            rec[i]
                .parse::<f64>()
                .map_err(|_| data_err(line, format!("cannot parse {what} `{}`", &rec[i])))
        };
        let (id, t, z) = (&rec[0], num(1, "time")?, num(2, "value")?);
        if units.last().is_none_or(|u| u.id != id) {
            if !seen.insert(id.to_string()) {
                return Err(data_err(
                    line,
                    format!("rows must be grouped by unit; unit `{id}` appears again"),
                ));
            }
            units.push(UnitPath {
                id: id.to_string(),
                times: Vec::new(),
                values: Vec::new(),
            });
        }
        let u = units.last_mut().expect("just pushed");
        let (t0, z0) = (
            u.times.last().copied().unwrap_or(0.0),
            u.values.last().copied().unwrap_or(0.0),
        );
        if !(t > t0) {
            return Err(data_err(line, format!("unit `{id}`: time {t} is not after {t0}")));
        }
        if !(z >= z0) {
            return Err(data_err(
                line,
                format!("unit `{id}` at time {t}: value {z} decreases from {z0}"),
            ));
        }
        u.times.push(t);
        u.values.push(z);
    }
    if units.is_empty() {
        return Err(data_err(1, "no data rows".into()));
    }
    Ok(DegradationDataset::new(units)?)
}

pub fn dataset_csv(data: &DegradationDataset, fmt: Fmt) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Config(format!("csv: {e}"));
    w.write_record(DATA_HEADER).map_err(csv_err)?;
    for u in &data.units {
        for (t, z) in u.times.iter().zip(&u.values) {
            w.write_record([u.id.clone(), fmt.cell(*t), fmt.cell(*z)])
                .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Write `text` to `out` if given, and to stdout when `echo` is set or there is no file.
pub fn emit(text: &str, out: Option<&Path>, echo: bool) -> Result<(), CliError> {
    if let Some(path) = out {
        std::fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    }
    if echo || out.is_none() {
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
    }
    Ok(())
}
