//! Tables and documents written by the CLI.
//!
//! CSV columns per mode:
//!
//! | mode | columns |
//! |------|---------|
//! | circular, linear, rest-frame-* (energy) | `n,omega,theta,dW,dW_err` |
//! | same with `--quantity rate` | `n,omega,theta,dw,dw_err` |
//! | schott, nikishov-ritus | `n,w,w_err` |
//! | classical-limit | `dphi,w,w_err,w_cl,rel_diff` |
//! | sweep | `index,<param>,total,error,converged` |
//!
//! Spectrum tables end with a footer row `total,…,W,err`.

use crate::config::{RunConfig, Units};
use crate::error::CliError;
use serde_json::{json, Value};
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Float)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Float(x) => fmt_float(*x),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(n) => json!(n),
            Cell::Float(x) => json!(x),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

/// 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Result of one run, ready to be written as CSV or JSON.
#[derive(Debug, Clone)]
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// `(value, error)` written as the footer row.
    pub total: Option<(f64, f64)>,
    pub converged: bool,
    /// Mode-specific JSON payload.
    pub result: Value,
    pub summary: String,
}

impl Report {
    pub fn table(header: &[&str]) -> Self {
        Report {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            total: None,
            converged: true,
            result: Value::Null,
            summary: String::new(),
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r.iter().map(Cell::csv))?;
        }
        if let Some((v, e)) = self.total {
            let k = self.header.len();
            let mut footer = vec![String::new(); k];
            footer[0] = "total".into();
            footer[k - 2] = fmt_float(v);
            footer[k - 1] = fmt_float(e);
            out.write_record(&footer)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn document(&self, cfg: &RunConfig) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let mut doc = json!({
            "version": env!("CARGO_PKG_VERSION"),
            "config": cfg.to_json(),
            "converged": self.converged,
            "result": self.result,
            "columns": self.header,
            "rows": rows,
        });
        if let Some((v, e)) = self.total {
            doc["total"] = json!(v);
            doc["total_error"] = json!(e);
        }
        if let Some(u) = physical_units(cfg) {
            doc["units"] = u;
        }
        doc
    }

    /// Writes to `cfg.out` in the configured format.
    pub fn write(&self, cfg: &RunConfig, path: &Path) -> Result<(), CliError> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        match cfg.format() {
            crate::config::Format::Csv => self.write_csv(file),
            crate::config::Format::Json => {
                let mut file = file;
                serde_json::to_writer_pretty(&mut file, &self.document(cfg))?;
                writeln!(file)?;
                Ok(())
            }
        }
    }
}

const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// SI values of the internal units for a wave of angular frequency `omega_w`.
pub fn physical_units(cfg: &RunConfig) -> Option<Value> {
    if cfg.units != Some(Units::Physical) {
        return None;
    }
    let w = cfg.omega_w?;
    let e2 = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY);
    Some(json!({
        "omega_w_rad_per_s": w,
        "energy_J": e2 * w / SPEED_OF_LIGHT,
        "rate_W": e2 * w * w / SPEED_OF_LIGHT,
        "time_s": 1.0 / w,
        "length_m": SPEED_OF_LIGHT / w,
        "frequency_rad_per_s": w,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn footer_fills_last_two_columns() {
        let mut r = Report::table(&["n", "omega", "theta", "dW", "dW_err"]);
        r.rows.push(vec![Cell::Int(1), Cell::Empty, Cell::Empty, Cell::Float(0.5), Cell::Float(1e-9)]);
        r.total = Some((0.5, 1e-9));
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "n,omega,theta,dW,dW_err");
        assert_eq!(lines[2], "total,,,5.0000000000000000e-1,1.0000000000000001e-9");
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 2.0 / 3.0, 1e-300, 6.02214076e23] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
    }
}
