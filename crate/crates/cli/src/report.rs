//! Report serialization. JSON floats are written with 17 significant digits
//! so reports round-trip exactly and byte-compare across runs; files are
//! written to a temporary name and renamed into place.

use anyhow::{ensure, Context, Result};
use modsel_core::models::ModelCollection;
use modsel_core::selection::PenaltyConfig;
use modsel_core::simulate::TailEstimate;
use serde::Serialize;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

/// serde_json formatter emitting floats as `d.dddddddddddddddde±exp`.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W: io::Write + ?Sized>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: io::Write + ?Sized>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{value:.7e}")
    }
}

/// Serializes any report to a JSON string with full-precision floats.
/// Non-finite floats become null.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value
        .serialize(&mut ser)
        .context("report serialization failed")?;
    let mut s = String::from_utf8(buf).context("report is not UTF-8")?;
    s.push('\n');
    Ok(s)
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Frozen column layout for per-threshold rows.
pub const TAIL_CSV_HEADER: &str = "x,threshold,exceed,reps,ci_lo,ci_hi,bound,verdict";

pub fn tail_rows_csv(rows: &[TailEstimate]) -> String {
    let mut s = String::from(TAIL_CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt(r.x),
            fmt(r.threshold),
            r.exceed,
            r.reps,
            fmt(r.ci_lo),
            fmt(r.ci_hi),
            fmt(r.bound),
            if r.pass { "pass" } else { "fail" },
        ));
    }
    s
}

/// One row per model: label, dimension, weight, and penalty. Before
/// rendering, the weight column is checked against the collection's stored
/// weight sum.
pub fn penalty_ledger_csv(coll: &ModelCollection, pen: &PenaltyConfig) -> Result<String> {
    let mut s = String::from("label,dim,delta,pen\n");
    let mut weight_sum = 0.0f64;
    for (label, entry) in &pen.per_model {
        weight_sum += (-entry.delta).exp();
        s.push_str(&format!(
            "{label},{},{},{}\n",
            entry.dim,
            fmt(entry.delta),
            fmt(entry.pen)
        ));
    }
    let stored = coll.sigma_weights();
    ensure!(
        (weight_sum - stored).abs() <= 1e-12 * stored.max(1.0),
        "ledger weight sum {weight_sum} disagrees with the collection's {stored}"
    );
    Ok(s)
}

/// An output file staged in memory.
pub struct Artifact {
    pub name: String,
    pub content: String,
}

impl Artifact {
    pub fn new(name: &str, content: String) -> Self {
        Artifact { name: name.to_string(), content }
    }
}

/// Writes each artifact atomically (temp file in the target directory, then
/// rename). The directory is created if missing.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let mut written = Vec::new();
    for a in artifacts {
        let target = dir.join(&a.name);
        let mut tmp = tempfile::NamedTempFile::new_in(dir)
            .with_context(|| format!("cannot stage {}", target.display()))?;
        tmp.write_all(a.content.as_bytes())
            .with_context(|| format!("cannot write {}", target.display()))?;
        tmp.persist(&target)
            .with_context(|| format!("cannot finalize {}", target.display()))?;
        written.push(target);
    }
    Ok(written)
}
