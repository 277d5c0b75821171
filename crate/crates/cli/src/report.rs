//! Tabular reports and their CSV / JSON rendering.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::job::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    /// Floats use the shortest representation that parses back to the same value.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:?}"),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(x) => json!(format!("{x:?}")),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    /// Rows as arrays in column order.
    fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Array(row.iter().map(Cell::to_json).collect()))
            .collect();
        json!({ "columns": self.columns, "rows": rows })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    /// Effective parameters and job identity, sorted by key.
    pub metadata: BTreeMap<String, Value>,
    pub data: Table,
    pub summary: Table,
}

fn meta_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_line(fields: impl IntoIterator<Item = String>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(fields).expect("writing to memory");
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8 input")
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// `#` metadata lines, header, rows, then `# summary:` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}={}\n", meta_text(v)));
        }
        out.push_str(&csv_line(self.data.columns.iter().cloned()));
        for row in &self.data.rows {
            out.push_str(&csv_line(row.iter().map(Cell::render)));
        }
        if !self.summary.columns.is_empty() {
            out.push_str("# summary: ");
            out.push_str(&csv_line(self.summary.columns.iter().cloned()));
            for row in &self.summary.rows {
                out.push_str("# summary: ");
                out.push_str(&csv_line(row.iter().map(Cell::render)));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let meta: Map<String, Value> = self.metadata.clone().into_iter().collect();
        let doc = json!({
            "metadata": meta,
            "columns": self.data.columns,
            "rows": self.data.to_json()["rows"],
            "summary": self.summary.to_json(),
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut data = Table::new(&["q", "energy", "accessible"]);
        data.push(vec![0usize.into(), 0.1f64.into(), false.into()]);
        data.push(vec![1usize.into(), (1.0f64 / 3.0).into(), true.into()]);
        let mut summary = Table::new(&["q_min"]);
        summary.push(vec![f64::NEG_INFINITY.into()]);
        let mut metadata = BTreeMap::new();
        metadata.insert("kind".into(), json!("spectrum"));
        metadata.insert("param.mu".into(), json!(2.5));
        Report {
            metadata,
            data,
            summary,
        }
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let expected = "# kind=spectrum\n# param.mu=2.5\nq,energy,accessible\n0,0.1,false\n\
                        1,0.3333333333333333,true\n# summary: q_min\n# summary: -inf\n";
        assert_eq!(csv, expected);
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 5e-324] {
            let s = Cell::Float(x).render();
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn text_cells_are_quoted() {
        assert_eq!(
            csv_line(["a,b".to_string(), "c".to_string()]),
            "\"a,b\",c\n"
        );
    }

    #[test]
    fn json_mirrors_csv_fields() {
        let v: Value = serde_json::from_str(&sample().to_json()).unwrap();
        assert_eq!(v["columns"], json!(["q", "energy", "accessible"]));
        assert_eq!(v["rows"][1][2], json!(true));
        assert_eq!(v["metadata"]["param.mu"], json!(2.5));
        assert_eq!(v["summary"]["columns"], json!(["q_min"]));
        assert_eq!(v["summary"]["rows"][0][0], json!("-inf"));
    }
}
