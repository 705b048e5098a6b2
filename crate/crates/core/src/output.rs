//! Result tables, fit input and the run record written next to every result.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DataPoint;

/// Locale-independent number formatting: shortest round-trip form, `.` decimal.
pub fn fmt_num(v: f64) -> String {
    format!("{v:?}")
}

/// A CSV table with a fixed column contract.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        wtr.write_record(&self.columns)?;
        for r in &self.rows {
            wtr.write_record(r)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

#[derive(Debug, Deserialize)]
struct PointRecord {
    x: f64,
    y: f64,
    sigma: f64,
}

/// Reads `x,y,sigma` rows for the fitters.
pub fn read_points<R: Read>(reader: R) -> Result<Vec<DataPoint>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    for col in ["x", "y", "sigma"] {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::DegenerateData(format!(
                "fit input needs columns x,y,sigma; found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
    }
    rdr.deserialize::<PointRecord>()
        .map(|r| {
            r.map(|p| DataPoint::new(p.x, p.y, p.sigma))
                .map_err(Error::from)
        })
        .collect()
}

pub fn read_points_path(path: impl AsRef<Path>) -> Result<Vec<DataPoint>> {
    let file = std::fs::File::open(path.as_ref())?;
    read_points(std::io::BufReader::new(file))
}

/// Everything needed to trace a results file back to its inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub experiment: String,
    pub crate_version: String,
    pub prng: String,
    pub seed_scheme: String,
    pub master_seed: u64,
    pub n_realizations: usize,
    pub workers: usize,
    pub started_unix_s: u64,
    pub wall_time_s: f64,
    pub results_file: String,
    pub config_file: String,
    pub summary: serde_json::Value,
}

impl RunMetadata {
    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_and_use_dot() {
        for v in [0.1, 1e-9, 23.85, 1.0 / 3.0, 2e6] {
            let s = fmt_num(v);
            assert!(!s.contains(','));
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_uses_lf() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "2".into()]);
        assert_eq!(t.to_csv_string().unwrap(), "a,b\n1,2\n");
    }

    #[test]
    fn points_need_all_columns() {
        let ok = read_points("x,y,sigma\n1,0.5,0.01\n".as_bytes()).unwrap();
        assert_eq!(ok, vec![DataPoint::new(1.0, 0.5, 0.01)]);
        assert!(read_points("x,y\n1,2\n".as_bytes()).is_err());
    }
}
