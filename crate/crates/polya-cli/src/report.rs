//! Long-format report rows and their CSV/JSON encodings.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::{ExperimentConfig, OutputFormat};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// One scalar result. `s`, `i` and `j` are empty when not applicable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub series: String,
    pub s: Option<u32>,
    pub i: Option<usize>,
    pub j: Option<u32>,
    pub metric: String,
    #[serde(serialize_with = "write_float", deserialize_with = "read_float")]
    pub value: f64,
    pub seed: u64,
}

/// Finite values as numbers, non-finite ones as `inf`, `-inf` or `nan`
/// (JSON has no literal for them).
fn write_float<S: Serializer>(v: &f64, ser: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        ser.serialize_f64(*v)
    } else if v.is_nan() {
        ser.serialize_str("nan")
    } else if *v > 0.0 {
        ser.serialize_str("inf")
    } else {
        ser.serialize_str("-inf")
    }
}

fn read_float<'de, D: Deserializer<'de>>(de: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }
    match Repr::deserialize(de)? {
        Repr::Num(v) => Ok(v),
        Repr::Text(t) => t.parse::<f64>().map_err(serde::de::Error::custom),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

/// Everything an experiment run produces.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    /// Invariant violations; a non-empty list makes the run exit with code 2.
    pub flags: Vec<String>,
    pub timings: Vec<Timing>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn flag(&mut self, msg: impl Into<String>) {
        self.flags.push(msg.into());
    }

    /// Rows matching `series` and `metric`, in emission order.
    pub fn select(&self, series: &str, metric: &str) -> Vec<&ReportRow> {
        self.rows.iter().filter(|r| r.series == series && r.metric == metric).collect()
    }

    pub fn value(&self, series: &str, metric: &str) -> Option<f64> {
        self.select(series, metric).first().map(|r| r.value)
    }
}

/// Builder for rows sharing an experiment id and seed.
pub struct Rows<'a> {
    pub experiment: &'a str,
    pub seed: u64,
}

impl Rows<'_> {
    pub fn row(&self, series: &str, s: Option<u32>, i: Option<usize>, j: Option<u32>, metric: &str, value: f64) -> ReportRow {
        ReportRow {
            experiment: self.experiment.to_string(),
            series: series.to_string(),
            s,
            i,
            j,
            metric: metric.to_string(),
            value,
            seed: self.seed,
        }
    }
}

#[derive(Serialize, Deserialize)]
pub struct JsonReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub passed: bool,
    pub flags: Vec<String>,
    pub timings: Vec<Timing>,
    pub rows: Vec<ReportRow>,
}

pub fn to_csv(rows: &[ReportRow]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(["experiment", "series", "s", "i", "j", "metric", "value", "seed"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn from_csv(text: &str) -> anyhow::Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<Result<Vec<ReportRow>, _>>()?)
}

pub fn to_json(cfg: &ExperimentConfig, report: &Report) -> anyhow::Result<String> {
    let doc = JsonReport {
        schema_version: REPORT_SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        passed: report.passed(),
        flags: report.flags.clone(),
        timings: report.timings.clone(),
        rows: report.rows.clone(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// Writes `<dir>/<id>.csv` and/or `<dir>/<id>.json`; returns the paths written.
pub fn emit(cfg: &ExperimentConfig, report: &Report, dir: &Path, format: OutputFormat) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
        let path = dir.join(format!("{}.csv", cfg.id));
        fs::write(&path, to_csv(&report.rows)?).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    if matches!(format, OutputFormat::Json | OutputFormat::Both) {
        let path = dir.join(format!("{}.json", cfg.id));
        fs::write(&path, to_json(cfg, report)?).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<ReportRow> {
        let b = Rows { experiment: "x", seed: 7 };
        vec![
            b.row("hankel", Some(1), Some(2), None, "log_abs_h", f64::NEG_INFINITY),
            b.row("hankel", Some(1), Some(3), None, "d_i", 0.125),
            b.row("base", None, None, Some(4), "d_s", 1.0 / 3.0),
        ]
    }

    #[test]
    fn csv_round_trip() {
        let text = to_csv(&rows()).unwrap();
        assert!(text.starts_with("experiment,series,s,i,j,metric,value,seed\n"));
        assert_eq!(from_csv(&text).unwrap(), rows());
    }

    #[test]
    fn json_rows_round_trip() {
        let text = serde_json::to_string(&rows()).unwrap();
        let back: Vec<ReportRow> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rows());
    }
}
