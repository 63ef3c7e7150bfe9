//! Plot-ready CSV with header `t,x,xdot,u,h,h2,hg,V`.

use std::io::{Read, Write};
use std::path::Path;

use cbf_core::Trajectory64;

use crate::BenchError;

pub const HEADER: [&str; 8] = ["t", "x", "xdot", "u", "h", "h2", "hg", "V"];

/// One CSV record. Blank cells are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub t: f64,
    pub x: f64,
    pub xdot: Option<f64>,
    pub u: f64,
    pub h: Option<f64>,
    pub h2: Option<f64>,
    pub hg: Option<f64>,
    pub v: Option<f64>,
}

/// Rows of a trajectory, one per sample.
pub fn rows(traj: &Trajectory64) -> Vec<CsvRow> {
    (0..traj.len())
        .map(|i| {
            let b = &traj.barrier_values[i];
            CsvRow {
                t: traj.times[i],
                x: traj.states[i][0],
                xdot: traj.states[i].get(1).copied(),
                u: traj.controls[i],
                h: b.h,
                h2: b.h2,
                hg: b.hg,
                v: b.lyapunov,
            }
        })
        .collect()
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(traj: &Trajectory64, writer: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER)?;
    for r in rows(traj) {
        w.write_record([
            r.t.to_string(),
            r.x.to_string(),
            cell(r.xdot),
            r.u.to_string(),
            cell(r.h),
            cell(r.h2),
            cell(r.hg),
            cell(r.v),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(traj: &Trajectory64, path: &Path) -> Result<(), BenchError> {
    let file = std::fs::File::create(path).map_err(|e| BenchError::io(path, e))?;
    write_csv(traj, std::io::BufWriter::new(file)).map_err(|e| BenchError::csv(path, e))
}

fn field(record: &csv::StringRecord, i: usize, line: u64) -> Result<Option<f64>, BenchError> {
    let text = record.get(i).unwrap_or("");
    if text.is_empty() {
        return Ok(None);
    }
    text.parse().map(Some).map_err(|_| BenchError::Parse {
        line,
        message: format!("column {} is not a number: {text:?}", HEADER[i]),
    })
}

fn required(record: &csv::StringRecord, i: usize, line: u64) -> Result<f64, BenchError> {
    field(record, i, line)?.ok_or(BenchError::Parse {
        line,
        message: format!("column {} is blank", HEADER[i]),
    })
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<CsvRow>, BenchError> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers().map_err(|e| BenchError::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().ne(HEADER) {
        return Err(BenchError::Parse {
            line: 1,
            message: format!("unexpected header {header:?}"),
        });
    }
    let mut out = Vec::new();
    for (i, record) in r.records().enumerate() {
        let line = i as u64 + 2;
        let rec = record.map_err(|e| BenchError::Parse {
            line,
            message: e.to_string(),
        })?;
        out.push(CsvRow {
            t: required(&rec, 0, line)?,
            x: required(&rec, 1, line)?,
            xdot: field(&rec, 2, line)?,
            u: required(&rec, 3, line)?,
            h: field(&rec, 4, line)?,
            h2: field(&rec, 5, line)?,
            hg: field(&rec, 6, line)?,
            v: field(&rec, 7, line)?,
        });
    }
    Ok(out)
}

pub fn parse_csv(path: &Path) -> Result<Vec<CsvRow>, BenchError> {
    let file = std::fs::File::open(path).map_err(|e| BenchError::io(path, e))?;
    read_csv(std::io::BufReader::new(file))
}
