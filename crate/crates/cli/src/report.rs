//! Unit-tagged JSON reports and CSV series.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::{DataSource, Format, RunConfig, TrajKind};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: &'static str,
}

pub fn q(value: f64, unit: &'static str) -> Quantity {
    Quantity { value, unit }
}

pub const DIMENSIONLESS: &str = "1";

#[derive(Debug, Clone, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

pub const TOOL: Tool = Tool { name: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION") };

#[derive(Debug, Clone, Serialize)]
pub struct Inputs {
    pub qubit: String,
    pub qubit_description: String,
    pub species: String,
    pub mass: Quantity,
    pub charge: Quantity,
    pub trajectory: TrajKind,
    pub length: Quantity,
    pub duration: Quantity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<Quantity>,
    pub omega: Quantity,
    pub budget: Quantity,
    pub field: Quantity,
}

impl Inputs {
    pub fn from_config(c: &RunConfig) -> Self {
        let t = &c.trajectory;
        Self {
            qubit: c.qubit_name.clone(),
            qubit_description: c.qubit.description.clone(),
            species: c.qubit.species.name.clone(),
            mass: q(c.qubit.species.mass, "kg"),
            charge: q(c.qubit.species.charge, "C"),
            trajectory: t.kind,
            length: q(t.length, "m"),
            duration: q(t.duration, "s"),
            tau: t.tau.map(|v| q(v, "s")),
            omega: q(t.omega, "rad/s"),
            budget: q(c.budget, "rad"),
            field: q(c.field_tesla, "T"),
        }
    }
}

/// One named column of a series.
#[derive(Debug, Clone, Serialize)]
pub struct Column {
    pub name: String,
    pub unit: &'static str,
    pub values: Vec<f64>,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: &'static str, values: Vec<f64>) -> Self {
        Self { name: name.into(), unit, values }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Series {
    pub columns: Vec<Column>,
}

impl Series {
    /// Header `name[unit],…` followed by one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.iter().map(|c| format!("{}[{}]", c.name, c.unit)).collect::<Vec<_>>().join(",");
        out.push('\n');
        let rows = self.columns.iter().map(|c| c.values.len()).max().unwrap_or(0);
        for r in 0..rows {
            let row: Vec<String> =
                self.columns.iter().map(|c| c.values.get(r).map(|v| format!("{v:e}")).unwrap_or_default()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<R: Serialize> {
    pub tool: Tool,
    pub command: &'static str,
    pub inputs: Inputs,
    pub data_files: Vec<DataSource>,
    pub results: R,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<Series>,
}

impl<R: Serialize> Report<R> {
    pub fn new(command: &'static str, config: &RunConfig, results: R, series: Option<Series>) -> Self {
        Self { tool: TOOL, command, inputs: Inputs::from_config(config), data_files: config.data.clone(), results, series }
    }

    pub fn render(&self, format: Format) -> CliResult<String> {
        match (format, &self.series) {
            (Format::Json, _) => Ok(serde_json::to_string_pretty(self)? + "\n"),
            (Format::Csv, Some(series)) => Ok(series.to_csv()),
            (Format::Csv, None) => Ok(scalars_csv(&serde_json::to_value(&self.results)?)),
        }
    }
}

/// Every `{value, unit}` leaf of `results` as a `quantity,value,unit` row.
fn scalars_csv(results: &Value) -> String {
    fn walk(path: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) if map.len() == 2 && map.contains_key("value") && map.contains_key("unit") => {
                let value = map["value"].as_f64().map(|x| format!("{x:e}")).unwrap_or_default();
                let _ = writeln!(out, "{path},{value},{}", map["unit"].as_str().unwrap_or(""));
            }
            Value::Object(map) => {
                for (k, child) in map {
                    walk(&if path.is_empty() { k.clone() } else { format!("{path}.{k}") }, child, out);
                }
            }
            Value::Array(items) => {
                for (i, child) in items.iter().enumerate() {
                    walk(&format!("{path}.{i}"), child, out);
                }
            }
            _ => {}
        }
    }
    let mut out = String::from("quantity,value,unit\n");
    walk("", results, &mut out);
    out
}

pub fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Write { path: "<stdout>".into(), source }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_csv_has_single_header_line() {
        let s = Series { columns: vec![Column::new("t", "s", vec![0.0, 1.0]), Column::new("q", "m", vec![0.0, 2.5])] };
        assert_eq!(s.to_csv(), "t[s],q[m]\n0e0,0e0\n1e0,2.5e0\n");
    }

    #[test]
    fn scalars_are_flattened_with_units() {
        let v = serde_json::json!({"zeta": {"value": 12.0, "unit": "m^2/s^3"}, "states": [{"chi": {"value": -1.0, "unit": "m^2/J"}}], "label": "x"});
        let csv = scalars_csv(&v);
        assert!(csv.starts_with("quantity,value,unit\n"));
        assert!(csv.contains("zeta,1.2e1,m^2/s^3\n"));
        assert!(csv.contains("states.0.chi,-1e0,m^2/J\n"));
        assert!(!csv.contains("label"));
    }
}
