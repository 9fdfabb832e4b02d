use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub seed: u64,
    pub tol: f64,
    pub budget: u64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Counts {
    pub complex: Option<usize>,
    pub real: Option<usize>,
    pub infinite: bool,
}

impl Counts {
    pub fn finite(complex: usize, real: usize) -> Self {
        Counts { complex: Some(complex), real: Some(real), infinite: false }
    }

    pub fn infinite() -> Self {
        Counts { complex: None, real: None, infinite: true }
    }
}

/// Real points print as scalars, complex points as `[re, im]` pairs.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Coords {
    Real(Vec<f64>),
    Complex(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, Serialize)]
pub struct Point {
    pub coords: Coords,
    pub real: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub in_coordinate_plane: Option<bool>,
}

impl Point {
    pub fn new(z: &[Complex64], real: bool) -> Self {
        let coords = if real {
            Coords::Real(z.iter().map(|c| c.re).collect())
        } else {
            Coords::Complex(z.iter().map(|c| [c.re, c.im]).collect())
        };
        Point { coords, real, residual: None, in_coordinate_plane: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub surface: Option<Value>,
    pub settings: Settings,
    pub counts: Option<Counts>,
    pub points: Vec<Point>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ledger: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    pub diagnostics: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunReport {
    pub fn new(command: String, settings: Settings) -> Self {
        RunReport {
            command,
            surface: None,
            settings,
            counts: None,
            points: Vec::new(),
            closed_form: None,
            ledger: None,
            result: None,
            diagnostics: Vec::new(),
            wall_time_s: None,
        }
    }
}

pub fn write_json(report: &RunReport, out: &mut dyn Write) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, report)?;
    writeln!(out)
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&key(k), x, rows);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), x, rows);
            }
        }
        Value::Null => rows.push((prefix.to_string(), String::new())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

/// One `key,value` row per leaf of the JSON report, keys as dotted paths.
pub fn write_csv(report: &RunReport, out: &mut dyn Write) -> std::io::Result<()> {
    let value = serde_json::to_value(report)?;
    let mut rows = Vec::new();
    flatten("", &value, &mut rows);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["key", "value"])?;
    for (k, v) in rows {
        w.write_record([k, v])?;
    }
    w.flush()
}
