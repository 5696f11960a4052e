//! Diagnostics CSV and trajectory checkpoints.
//!
//! Binary checkpoint layout (all little endian):
//!
//! | bytes | content |
//! |---|---|
//! | 8 | magic `SQGCKPT1` |
//! | 4 + 4 | `u32` grid size `n1`, `n2` |
//! | 8 + 8 | `f64` side lengths `l1`, `l2` |
//! | per record: 8 | `f64` time |
//! | per record: `8 n1 n2` | `f64` grid values, row-major (`i * n2 + k`) |

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{DiagnosticsRow, Trajectory};
use crate::domain::{Domain, GridField};
use crate::error::{Error, Result};
use crate::spectral::SineBasis;

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"SQGCKPT1";

pub const DIAGNOSTICS_HEADER: &str =
    "t,L2,Linf,H2,H2.5,holder_alpha,grad_weighted,dH2sq_dt,H2.5_integral,contamination,tail";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckpointFormat {
    Binary,
    Csv,
}

pub fn write_diagnostics_csv(path: &Path, rows: &[DiagnosticsRow]) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{DIAGNOSTICS_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.t, r.l2, r.linf, r.h2, r.h25, r.holder, r.grad_weighted, r.dh2sq_dt, r.h25_integral, r.contamination, r.tail
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_diagnostics_csv(path: &Path) -> Result<Vec<DiagnosticsRow>> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != DIAGNOSTICS_HEADER {
        return Err(Error::InvalidParameter(format!("{}: missing diagnostics header", path.display())));
    }
    let mut rows = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
        if v.len() != 11 {
            return Err(Error::InvalidParameter(format!("{}: expected 11 columns", path.display())));
        }
        rows.push(DiagnosticsRow {
            t: v[0],
            l2: v[1],
            linf: v[2],
            h2: v[3],
            h25: v[4],
            holder: v[5],
            grad_weighted: v[6],
            dh2sq_dt: v[7],
            h25_integral: v[8],
            contamination: v[9],
            tail: v[10],
        });
    }
    Ok(rows)
}

/// Grid values of every snapshot of the trajectory.
pub fn snapshot_fields(traj: &Trajectory) -> Result<Vec<(f64, GridField)>> {
    let basis = SineBasis::new(traj.domain);
    traj.snapshots
        .iter()
        .map(|s| Ok((s.t, basis.from_spectral(&s.theta)?)))
        .collect()
}

pub fn write_checkpoints(path: &Path, domain: &Domain, records: &[(f64, GridField)], format: CheckpointFormat) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    match format {
        CheckpointFormat::Binary => {
            w.write_all(CHECKPOINT_MAGIC)?;
            w.write_all(&(domain.nx() as u32).to_le_bytes())?;
            w.write_all(&(domain.ny() as u32).to_le_bytes())?;
            w.write_all(&domain.lx().to_le_bytes())?;
            w.write_all(&domain.ly().to_le_bytes())?;
            for (t, f) in records {
                f.check_shape(domain)?;
                w.write_all(&t.to_le_bytes())?;
                for v in f.values().iter() {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
        }
        CheckpointFormat::Csv => {
            writeln!(w, "t,i,k,x,y,theta")?;
            for (t, f) in records {
                f.check_shape(domain)?;
                for ((i, k), v) in f.values().indexed_iter() {
                    writeln!(w, "{t},{i},{k},{},{},{v}", domain.x(i), domain.y(k))?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a binary checkpoint file.
pub fn read_checkpoints(path: &Path) -> Result<(Domain, Vec<(f64, GridField)>)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let bad = |m: &str| Error::InvalidParameter(format!("{}: {m}", path.display()));
    if bytes.len() < 32 || &bytes[..8] != CHECKPOINT_MAGIC {
        return Err(bad("not a checkpoint file"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes")) as usize;
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let (n1, n2) = (u32_at(8), u32_at(12));
    let domain = Domain::new(f64_at(16), f64_at(24), n1, n2)?;
    let record = 8 * (1 + n1 * n2);
    let body = &bytes[32..];
    if body.len() % record != 0 {
        return Err(bad("truncated record"));
    }
    let mut out = Vec::new();
    for r in 0..body.len() / record {
        let o = 32 + r * record;
        let t = f64_at(o);
        let values = Array2::from_shape_fn((n1, n2), |(i, k)| f64_at(o + 8 * (1 + i * n2 + k)));
        out.push((t, GridField::new(values)));
    }
    Ok((domain, out))
}
