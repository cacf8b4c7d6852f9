//! Per-step CSV trace.
//!
//! Floats are written with 17 significant digits (`{:.16e}`) so traces from
//! different implementations can be diffed exactly; flags are `0`/`1`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::CliError;

pub const TRACE_HEADER: &str =
    "k,y,y_hat,e,theta_err_norm,V,gamma_eig_min,gamma_eig_max,omega_eig_min,omega_eig_max,certified,contracting";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub y: f64,
    pub y_hat: f64,
    pub e: f64,
    pub theta_err_norm: f64,
    pub v: f64,
    pub gamma_eig_min: f64,
    pub gamma_eig_max: f64,
    pub omega_eig_min: f64,
    pub omega_eig_max: f64,
    /// `k` lies inside the certified window.
    pub certified: bool,
    /// `V_k ≤ (1 − μ₂) V_{k−1}` up to slack.
    pub contracting: bool,
}

pub fn render(rows: &[TraceRow]) -> String {
    let mut out = String::with_capacity(64 + rows.len() * 256);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = write!(out, "{}", r.k);
        for x in [
            r.y,
            r.y_hat,
            r.e,
            r.theta_err_norm,
            r.v,
            r.gamma_eig_min,
            r.gamma_eig_max,
            r.omega_eig_min,
            r.omega_eig_max,
        ] {
            let _ = write!(out, ",{x:.16e}");
        }
        let _ = writeln!(out, ",{},{}", u8::from(r.certified), u8::from(r.contracting));
    }
    out
}

pub fn write(path: &Path, rows: &[TraceRow]) -> Result<(), CliError> {
    std::fs::write(path, render(rows)).map_err(|e| CliError::io(path, e))
}

pub fn parse(text: &str) -> Result<Vec<TraceRow>, CliError> {
    let bad = |detail: String| CliError::Parse { what: "trace", detail };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == TRACE_HEADER => {}
        other => return Err(bad(format!("unexpected header {other:?}"))),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 12 {
            return Err(bad(format!("line {} has {} fields", i + 2, fields.len())));
        }
        let num = |j: usize| fields[j].parse::<f64>().map_err(|e| bad(format!("line {}: {e}", i + 2)));
        let flag = |j: usize| match fields[j] {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(bad(format!("line {}: flag {other:?}", i + 2))),
        };
        rows.push(TraceRow {
            k: fields[0].parse().map_err(|e| bad(format!("line {}: {e}", i + 2)))?,
            y: num(1)?,
            y_hat: num(2)?,
            e: num(3)?,
            theta_err_norm: num(4)?,
            v: num(5)?,
            gamma_eig_min: num(6)?,
            gamma_eig_max: num(7)?,
            omega_eig_min: num(8)?,
            omega_eig_max: num(9)?,
            certified: flag(10)?,
            contracting: flag(11)?,
        });
    }
    Ok(rows)
}

pub fn read(path: &Path) -> Result<Vec<TraceRow>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text)
}
