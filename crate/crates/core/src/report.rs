//! Per-solve CSV rows.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::bnb::Solution;
use crate::error::Result;
use crate::model::NetworkInstance;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveRecord {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub beta: Option<f64>,
    pub omega: f64,
    pub cuts_enabled: String,
    pub cost: Option<f64>,
    pub rgap: Option<f64>,
    pub cuts: usize,
    pub covers: usize,
    pub nodes: usize,
    /// Wall time in seconds; left out when byte-stable output is wanted.
    pub time: Option<f64>,
    pub status: String,
    pub egap: Option<f64>,
}

impl SolveRecord {
    pub fn new(inst: &NetworkInstance, omega: f64, cuts_enabled: &str, sol: &Solution, with_time: bool) -> Self {
        let s = &sol.stats;
        SolveRecord {
            instance: inst.id.clone().unwrap_or_default(),
            n: inst.nodes,
            m: inst.num_arcs(),
            beta: inst.beta,
            omega,
            cuts_enabled: cuts_enabled.to_string(),
            cost: s.objective,
            rgap: s.rgap.map(round6),
            cuts: s.cut_count(),
            covers: s.covers(),
            nodes: s.nodes,
            time: with_time.then(|| round6(s.elapsed.as_secs_f64())),
            status: s.status.to_string(),
            egap: s.egap.map(round6),
        }
    }
}

/// Rounds to six decimals so that CSV output does not depend on the last
/// bits of floating-point noise.
pub fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

pub fn write_csv<W: Write, R: Serialize>(out: W, records: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Appends rows to `path`, writing the header only when the file is new or
/// empty.
pub fn append_csv<R: Serialize>(path: impl AsRef<Path>, records: &[R]) -> Result<()> {
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let fresh = file.metadata()?.len() == 0;
    let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string<R: Serialize>(records: &[R]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, records)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}
