//! Result emission: per-step CSV records and centerline geometry dumps.
//!
//! Both formats are plain text, deterministic, and round-trip exactly:
//! `write(parse(write(x))) == write(x)` byte for byte.  Floats are
//! written with 16 fractional digits (17 significant), which is enough
//! to reconstruct every f64 bit pattern; absent values are `NaN`.
//! Downstream tooling can therefore diff two runs textually and trust
//! that equal bytes mean equal numbers.

use std::fmt::Write as _;

/// Column header of the record CSV, fixed by contract.
pub const CSV_HEADER: &str = "step,time,n_dofs,l2_error,e_internal,e_kinetic,e_penalty,\
reaction_x,reaction_y,reaction_z,torque_z,iterations,contact_active,min_gap";

/// One accepted step of a run.  Fields that do not apply to the run
/// (reference error without a reference, torque without a torque
/// center, gap without contact) hold `NaN`.
#[derive(Debug, Clone, Copy)]
pub struct ResultRecord {
    pub step: usize,
    pub time: f64,
    pub n_dofs: usize,
    pub l2_error: f64,
    pub e_internal: f64,
    pub e_kinetic: f64,
    pub e_penalty: f64,
    pub reaction: [f64; 3],
    pub torque_z: f64,
    pub iterations: usize,
    pub contact_active: usize,
    pub min_gap: f64,
}

impl ResultRecord {
    /// Total recorded energy; penalty counts when present.
    pub fn total_energy(&self) -> f64 {
        let penalty = if self.e_penalty.is_nan() {
            0.0
        } else {
            self.e_penalty
        };
        self.e_internal + self.e_kinetic + penalty
    }
}

/// Append-only record collection; rejects non-monotone time so a
/// mis-wired step loop fails at the first push, not in analysis.
#[derive(Debug, Default)]
pub struct Recorder {
    records: Vec<ResultRecord>,
}

impl Recorder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: ResultRecord) {
        if let Some(last) = self.records.last() {
            assert!(
                record.time > last.time,
                "records must advance in time: {} then {}",
                last.time,
                record.time
            );
        }
        self.records.push(record);
    }

    pub fn records(&self) -> &[ResultRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<ResultRecord> {
        self.records
    }
}

fn push_float(out: &mut String, v: f64) {
    // 16 fractional digits = 17 significant: lossless for f64.
    let _ = write!(out, "{v:.16e}");
}

/// Render records as CSV, header first, one line per record.
pub fn write_csv(records: &[ResultRecord]) -> String {
    let mut out = String::with_capacity(64 + records.len() * 256);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = write!(out, "{},", r.step);
        push_float(&mut out, r.time);
        let _ = write!(out, ",{},", r.n_dofs);
        for v in [r.l2_error, r.e_internal, r.e_kinetic, r.e_penalty] {
            push_float(&mut out, v);
            out.push(',');
        }
        for v in r.reaction {
            push_float(&mut out, v);
            out.push(',');
        }
        push_float(&mut out, r.torque_z);
        let _ = write!(out, ",{},{},", r.iterations, r.contact_active);
        push_float(&mut out, r.min_gap);
        out.push('\n');
    }
    out
}

/// Emission/parse failure.
#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("line 1: expected the fixed CSV header")]
    BadHeader,
    #[error("line {line}: expected {expected} fields, got {got}")]
    FieldCount {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("line {line}, field {field}: cannot parse {text:?}")]
    BadNumber {
        line: usize,
        field: &'static str,
        text: String,
    },
    #[error("line {line}: {what}")]
    BadStructure { line: usize, what: &'static str },
}

fn parse_f64(line: usize, field: &'static str, text: &str) -> Result<f64, EmitError> {
    text.parse().map_err(|_| EmitError::BadNumber {
        line,
        field,
        text: text.to_owned(),
    })
}

fn parse_usize(line: usize, field: &'static str, text: &str) -> Result<usize, EmitError> {
    text.parse().map_err(|_| EmitError::BadNumber {
        line,
        field,
        text: text.to_owned(),
    })
}

/// Parse a record CSV produced by [`write_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<ResultRecord>, EmitError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => return Err(EmitError::BadHeader),
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let n = idx + 1;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 14 {
            return Err(EmitError::FieldCount {
                line: n,
                expected: 14,
                got: f.len(),
            });
        }
        records.push(ResultRecord {
            step: parse_usize(n, "step", f[0])?,
            time: parse_f64(n, "time", f[1])?,
            n_dofs: parse_usize(n, "n_dofs", f[2])?,
            l2_error: parse_f64(n, "l2_error", f[3])?,
            e_internal: parse_f64(n, "e_internal", f[4])?,
            e_kinetic: parse_f64(n, "e_kinetic", f[5])?,
            e_penalty: parse_f64(n, "e_penalty", f[6])?,
            reaction: [
                parse_f64(n, "reaction_x", f[7])?,
                parse_f64(n, "reaction_y", f[8])?,
                parse_f64(n, "reaction_z", f[9])?,
            ],
            torque_z: parse_f64(n, "torque_z", f[10])?,
            iterations: parse_usize(n, "iterations", f[11])?,
            contact_active: parse_usize(n, "contact_active", f[12])?,
            min_gap: parse_f64(n, "min_gap", f[13])?,
        });
    }
    Ok(records)
}

/// Snapshot of every fiber's centerline at one instant.
#[derive(Debug, Clone)]
pub struct GeometryFrame {
    pub time: f64,
    pub fibers: Vec<GeometryFiber>,
}

#[derive(Debug, Clone)]
pub struct GeometryFiber {
    pub id: usize,
    pub radius: f64,
    pub points: Vec<[f64; 3]>,
}

/// Render geometry frames: `FRAME t=…`, per fiber `FIBER id=… R=…`
/// followed by one `x y z` line per sampled point.
pub fn write_geometry(frames: &[GeometryFrame]) -> String {
    let mut out = String::new();
    for frame in frames {
        out.push_str("FRAME t=");
        push_float(&mut out, frame.time);
        out.push('\n');
        for fiber in &frame.fibers {
            let _ = write!(out, "FIBER id={} R=", fiber.id);
            push_float(&mut out, fiber.radius);
            out.push('\n');
            for p in &fiber.points {
                push_float(&mut out, p[0]);
                out.push(' ');
                push_float(&mut out, p[1]);
                out.push(' ');
                push_float(&mut out, p[2]);
                out.push('\n');
            }
        }
    }
    out
}

/// Parse a geometry dump produced by [`write_geometry`].
pub fn parse_geometry(text: &str) -> Result<Vec<GeometryFrame>, EmitError> {
    let mut frames: Vec<GeometryFrame> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let n = idx + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("FRAME t=") {
            frames.push(GeometryFrame {
                time: parse_f64(n, "t", rest)?,
                fibers: Vec::new(),
            });
        } else if let Some(rest) = line.strip_prefix("FIBER id=") {
            let frame = frames.last_mut().ok_or(EmitError::BadStructure {
                line: n,
                what: "FIBER before any FRAME",
            })?;
            let (id_text, r_text) =
                rest.split_once(" R=").ok_or(EmitError::BadStructure {
                    line: n,
                    what: "FIBER line without R=",
                })?;
            frame.fibers.push(GeometryFiber {
                id: parse_usize(n, "id", id_text)?,
                radius: parse_f64(n, "R", r_text)?,
                points: Vec::new(),
            });
        } else {
            let fiber = frames
                .last_mut()
                .and_then(|f| f.fibers.last_mut())
                .ok_or(EmitError::BadStructure {
                    line: n,
                    what: "point line before any FIBER",
                })?;
            let parts: Vec<&str> = line.split(' ').collect();
            if parts.len() != 3 {
                return Err(EmitError::BadStructure {
                    line: n,
                    what: "point line must hold exactly x y z",
                });
            }
            fiber.points.push([
                parse_f64(n, "x", parts[0])?,
                parse_f64(n, "y", parts[1])?,
                parse_f64(n, "z", parts[2])?,
            ]);
        }
    }
    Ok(frames)
}
