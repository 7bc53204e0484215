use std::time::Duration;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Format;

/// A rendered command result: JSON document or CSV table.
#[derive(Debug)]
pub struct Report {
    pub format: Format,
    pub timing: bool,
    pub config: Value,
    pub result: Value,
    pub metrics: Value,
    pub table: Table,
}

#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

impl Report {
    pub fn render(&self, wall: Duration) -> String {
        let wall_ms = wall.as_secs_f64() * 1e3;
        match self.format {
            Format::Json => {
                let mut doc = Map::new();
                doc.insert("config".into(), self.config.clone());
                doc.insert("result".into(), self.result.clone());
                doc.insert("metrics".into(), self.metrics.clone());
                if self.timing {
                    doc.insert("timing".into(), serde_json::json!({ "wall_ms": wall_ms }));
                }
                let mut out = serde_json::to_string_pretty(&Value::Object(doc)).expect("json");
                out.push('\n');
                out
            }
            Format::Csv => {
                let mut out = format!("# config: {}\n", self.config);
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.table.header).expect("csv header");
                for row in &self.table.rows {
                    w.write_record(row).expect("csv row");
                }
                out.push_str(
                    &String::from_utf8(w.into_inner().expect("csv flush")).expect("utf-8"),
                );
                if self.timing {
                    out.push_str(&format!("# timing: wall_ms={wall_ms}\n"));
                }
                out
            }
        }
    }
}
