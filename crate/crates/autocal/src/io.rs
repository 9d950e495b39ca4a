//! File formats: sample CSV input, JSON reports, and plot-data CSV output.
//!
//! Sample CSV has a header naming columns `y` (response) and `pi`
//! (prediction) in either order; a `level_index` column is accepted and
//! ignored so files can round trip through tools that add it. Floats are
//! written with Rust's shortest round-trip formatting, so rereading a file
//! reproduces the original bits.
//!
//! Plot-data CSVs start with `# key: value` comment lines recording run
//! parameters, then a header row, then data rows.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::data::{Observation, Sample};
use crate::error::Error;
use crate::simulation::{CriticalValueEntry, LabeledHistogram, PowerStudy};
use crate::Result;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.display().to_string(), source }
}

/// Shortest decimal that parses back to the same f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Read a sample from CSV with columns `y` and `pi` (any order); a
/// `level_index` column is ignored.
pub fn read_sample_csv(path: &Path) -> Result<Sample> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;

    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let mut y_col = None;
    let mut pi_col = None;
    for (i, name) in headers.iter().enumerate() {
        match name {
            "y" => y_col = Some(i),
            "pi" => pi_col = Some(i),
            "level_index" => {}
            other => {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("unexpected column `{other}` (expected y, pi)"),
                })
            }
        }
    }
    let (y_col, pi_col) = match (y_col, pi_col) {
        (Some(y), Some(p)) => (y, p),
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "header must name columns y and pi".into(),
            })
        }
    };

    let mut obs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| csv_error(path, e))?;
        let parse = |col: usize, name: &str| -> Result<f64> {
            let field = record.get(col).ok_or_else(|| Error::Parse {
                line,
                message: format!("missing {name} field"),
            })?;
            field.parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("cannot parse {name} value `{field}` as a number"),
            })
        };
        obs.push(Observation { response: parse(y_col, "y")?, prediction: parse(pi_col, "pi")? });
    }
    Sample::new(obs)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io { path: path.display().to_string(), source },
        kind => Error::Parse { line, message: format!("{kind:?}") },
    }
}

/// Write a sample as `y,pi` CSV.
pub fn write_sample_csv(path: &Path, sample: &Sample) -> Result<()> {
    let mut out = String::from("y,pi\n");
    for o in sample.observations() {
        out.push_str(&fmt_f64(o.response));
        out.push(',');
        out.push_str(&fmt_f64(o.prediction));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(io_err(path))
}

/// Write any serializable value as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| Error::Numerical(format!("cannot serialize report: {e}")))?;
    w.write_all(b"\n").map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

/// A plot-data CSV: `# key: value` comments, a header, and string rows.
#[derive(Clone, Debug, Default)]
pub struct CsvDoc {
    comments: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvDoc {
    pub fn new(header: &[&str]) -> Self {
        CsvDoc {
            comments: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.comments.push((key.to_string(), value.to_string()));
        self
    }

    pub fn row(&mut self, fields: Vec<String>) -> &mut Self {
        debug_assert_eq!(fields.len(), self.header.len());
        self.rows.push(fields);
        self
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.comments {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(io_err(path))
    }
}

/// Critical values table as plot data.
pub fn quantiles_csv(
    entries: &[CriticalValueEntry],
    comments: &[(&str, String)],
) -> CsvDoc {
    let mut doc = CsvDoc::new(&["test", "critical_value", "method", "mc_standard_error"]);
    for (k, v) in comments {
        doc.comment(k, v);
    }
    for e in entries {
        let method = serde_plain_name(&e.method);
        let se = e.mc_standard_error.map(fmt_f64).unwrap_or_default();
        doc.row(vec![e.test.code().into(), fmt_f64(e.critical_value), method, se]);
    }
    doc
}

fn serde_plain_name<T: Serialize>(v: &T) -> String {
    // All enums serialized here are plain snake_case strings.
    serde_json::to_value(v)
        .ok()
        .and_then(|j| j.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// A square matrix keyed by level index, one row per line.
pub fn matrix_csv(matrix: &[Vec<f64>], comments: &[(&str, String)]) -> CsvDoc {
    let k = matrix.len();
    let mut header: Vec<String> = vec!["row".into()];
    header.extend((1..=k).map(|i| format!("level_{i}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut doc = CsvDoc::new(&header_refs);
    for (key, v) in comments {
        doc.comment(key, v);
    }
    for (i, row) in matrix.iter().enumerate() {
        let mut fields = vec![format!("level_{}", i + 1)];
        fields.extend(row.iter().map(|&v| fmt_f64(v)));
        doc.row(fields);
    }
    doc
}

/// Power curves in long form: one row per (delta, test).
pub fn power_csv(study: &PowerStudy) -> CsvDoc {
    let mut doc = CsvDoc::new(&["delta", "test", "rejections", "reps", "rate"]);
    doc.comment("contamination", serde_plain_kind(&study.contamination))
        .comment("critical_source", serde_plain_kind(&study.critical_source))
        .comment("n", study.n)
        .comment("reps", study.reps)
        .comment("level", fmt_f64(study.level))
        .comment("mc_draws", study.mc_draws)
        .comment("seed", study.seed);
    for curve in &study.curves {
        for p in &curve.points {
            doc.row(vec![
                fmt_f64(p.delta),
                curve.test.code().into(),
                p.rejections.to_string(),
                p.reps.to_string(),
                fmt_f64(p.rate),
            ]);
        }
    }
    doc
}

fn serde_plain_kind<T: Serialize>(v: &T) -> String {
    // Tagged enums serialize as objects; recover the tag and any payload.
    match serde_json::to_value(v) {
        Ok(serde_json::Value::Object(map)) => {
            let mut parts: Vec<String> = Vec::new();
            for tag in ["kind", "source"] {
                if let Some(serde_json::Value::String(s)) = map.get(tag) {
                    parts.push(s.clone());
                }
            }
            for (k, v) in &map {
                if k != "kind" && k != "source" {
                    parts.push(format!("{k}={v}"));
                }
            }
            parts.join(" ")
        }
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}

/// Histograms in long form: one row per bin.
pub fn histograms_csv(histograms: &[LabeledHistogram], comments: &[(&str, String)]) -> CsvDoc {
    let mut doc = CsvDoc::new(&["label", "bin", "lo", "hi", "count"]);
    for (k, v) in comments {
        doc.comment(k, v);
    }
    for h in histograms {
        for (i, &c) in h.counts.iter().enumerate() {
            let lo = h.lo + i as f64 * h.bin_width;
            let hi = if i + 1 == h.counts.len() { h.hi } else { h.lo + (i + 1) as f64 * h.bin_width };
            doc.row(vec![
                h.label.clone(),
                i.to_string(),
                fmt_f64(lo),
                fmt_f64(hi),
                c.to_string(),
            ]);
        }
    }
    doc
}
