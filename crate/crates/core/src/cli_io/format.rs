//! CSV and JSON file formats.
//!
//! CSV files carry one header row and write every number with 17 significant
//! digits, so values survive a write/read cycle exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Result, VkfError};
use crate::vkf::{ComplexEnvelope, FrequencyTrack};

/// Formats `v` with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Column-oriented numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn new() -> Self {
        Self { headers: Vec::new(), columns: Vec::new() }
    }

    pub fn with_column(mut self, name: impl Into<String>, values: Vec<f64>) -> Self {
        self.headers.push(name.into());
        self.columns.push(values);
        self
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn has(&self, name: &str) -> bool {
        self.headers.iter().any(|h| h == name)
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.headers
            .iter()
            .position(|h| h == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| {
                VkfError::InvalidInput(format!(
                    "missing column `{name}` (have: {})",
                    self.headers.join(", ")
                ))
            })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let n = self.rows();
        if let Some(i) = self.columns.iter().position(|c| c.len() != n) {
            return Err(VkfError::LengthMismatch {
                what: format!("column `{}`", self.headers[i]),
                expected: n,
                got: self.columns[i].len(),
            });
        }
        let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
        w.write_record(&self.headers)?;
        let mut row = Vec::with_capacity(self.columns.len());
        for k in 0..n {
            row.clear();
            row.extend(self.columns.iter().map(|c| fmt_f64(c[k])));
            w.write_record(&row)?;
        }
        w.into_inner()
            .map_err(|e| VkfError::Io(e.into_error()))?
            .flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let headers: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let mut columns = vec![Vec::new(); headers.len()];
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            for (c, field) in rec.iter().enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| {
                    VkfError::InvalidInput(format!(
                        "{}: row {} column `{}` is not a number: {field:?}",
                        path.display(),
                        line + 2,
                        headers[c]
                    ))
                })?;
                columns[c].push(v);
            }
        }
        Ok(Self { headers, columns })
    }
}

impl Default for Table {
    fn default() -> Self {
        Self::new()
    }
}

/// Sample times `k / fs`.
pub fn time_axis(n: usize, sample_rate: f64) -> Vec<f64> {
    (0..n).map(|k| k as f64 / sample_rate).collect()
}

/// Sample rate implied by an evenly spaced time column.
pub fn infer_sample_rate(t: &[f64]) -> Result<f64> {
    if t.len() < 2 {
        return Err(VkfError::InvalidInput(
            "need at least two time samples to infer the sample rate".into(),
        ));
    }
    let span = t[t.len() - 1] - t[0];
    if !(span > 0.0) {
        return Err(VkfError::InvalidInput("time column must increase".into()));
    }
    let fs = (t.len() - 1) as f64 / span;
    let rounded = fs.round();
    Ok(if (fs - rounded).abs() <= 1e-9 * fs { rounded } else { fs })
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?)
}

/// Writes `t, abs, arg, freq` for one order.
pub fn write_envelope(
    path: &Path,
    sample_rate: f64,
    envelope: &ComplexEnvelope,
    track: &FrequencyTrack,
) -> Result<()> {
    Table::new()
        .with_column("t", time_axis(envelope.len(), sample_rate))
        .with_column("abs", envelope.magnitudes())
        .with_column("arg", envelope.arguments())
        .with_column("freq", track.freqs().to_vec())
        .write(path)
}

/// Reads a file written by [`write_envelope`].
pub fn read_envelope(path: &Path) -> Result<(ComplexEnvelope, FrequencyTrack, f64)> {
    let table = Table::read(path)?;
    let env = table
        .column("abs")?
        .iter()
        .zip(table.column("arg")?)
        .map(|(&m, &a)| Complex64::from_polar(m, a))
        .collect();
    let fs = infer_sample_rate(table.column("t")?)?;
    Ok((
        ComplexEnvelope::new(env)?,
        FrequencyTrack::new(table.column("freq")?.to_vec())?,
        fs,
    ))
}
