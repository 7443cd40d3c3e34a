//! Trace CSV output.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use destiny_core::engine::{RoundRecord, Trace};

pub const TRACE_HEADER: &str = "round,substationarity,consensus,feasibility,h_value,eta_min,eta_max,elapsed_s";

/// Writes one row per round. Floats use 17 significant digits so they read
/// back bit for bit.
pub fn write_trace(mut out: impl Write, trace: &Trace<f64>) -> std::io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in &trace.records {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.round, r.substationarity, r.consensus, r.feasibility, r.h_value, r.eta_min, r.eta_max, r.elapsed_s
        )?;
    }
    Ok(())
}

pub fn write_trace_csv(path: impl AsRef<Path>, trace: &Trace<f64>) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_trace(&mut w, trace)?;
    w.flush()
}

fn bad(line: usize, detail: impl Into<String>) -> std::io::Error {
    std::io::Error::new(std::io::ErrorKind::InvalidData, format!("line {line}: {}", detail.into()))
}

/// Reads a file produced by [`write_trace_csv`].
pub fn read_trace_csv(path: impl AsRef<Path>) -> std::io::Result<Vec<RoundRecord<f64>>> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header = lines.next().transpose()?;
    if header.as_deref().map(str::trim_end) != Some(TRACE_HEADER) {
        return Err(bad(1, "missing trace header"));
    }
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        let lineno = idx + 2;
        let cells: Vec<&str> = line.trim_end().split(',').collect();
        if cells.len() != 8 {
            return Err(bad(lineno, format!("expected 8 fields, got {}", cells.len())));
        }
        let round = cells[0].parse().map_err(|e| bad(lineno, format!("round: {e}")))?;
        let mut v = [0.0f64; 7];
        for (slot, cell) in v.iter_mut().zip(&cells[1..]) {
            *slot = cell.parse().map_err(|e| bad(lineno, format!("{cell:?}: {e}")))?;
        }
        out.push(RoundRecord {
            round,
            substationarity: v[0],
            consensus: v[1],
            feasibility: v[2],
            h_value: v[3],
            eta_min: v[4],
            eta_max: v[5],
            elapsed_s: v[6],
        });
    }
    Ok(out)
}
