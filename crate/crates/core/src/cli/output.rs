use std::fmt::Write as _;

use serde_json::{Map, Value};

use super::Format;

/// One value in a report. Floats always print as `{:.16e}`, so every
/// format carries the same digits.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Str(String),
    Int(i64),
    Float(f64),
    Bool(bool),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Str(s) => s.clone(),
            Cell::Int(n) => n.to_string(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Str(s) => Value::String(s.clone()),
            Cell::Int(n) => Value::from(*n),
            Cell::Float(x) if x.is_finite() => {
                serde_json::from_str(&format!("{x:.16e}")).unwrap_or(Value::Null)
            }
            Cell::Float(x) => Value::String(x.to_string()),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Str(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Str(s)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<i64> for Cell {
    fn from(n: i64) -> Self {
        Cell::Int(n)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

/// Header fields, a table, and an optional property verdict.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub command: String,
    pub header: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// `Some(false)` turns into exit code 2.
    pub check: Option<bool>,
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Report {
            command: command.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn meta(mut self, key: &str, value: impl Into<Cell>) -> Self {
        self.header.push((key.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn require(&mut self, ok: bool) {
        self.check = Some(self.check.unwrap_or(true) && ok);
    }

    pub fn passed(&self) -> bool {
        self.check != Some(false)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.render_json(),
            Format::Csv => self.render_csv(),
            Format::Table => self.render_table(),
        }
    }

    fn header_with_check(&self) -> Vec<(String, Cell)> {
        let mut h = vec![("command".to_string(), Cell::Str(self.command.clone()))];
        h.extend(self.header.iter().cloned());
        if let Some(ok) = self.check {
            h.push(("pass".to_string(), Cell::Bool(ok)));
        }
        h
    }

    fn render_json(&self) -> String {
        let mut top = Map::new();
        for (k, v) in self.header_with_check() {
            top.insert(k, v.json());
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(r) {
                    m.insert(c.clone(), v.json());
                }
                Value::Object(m)
            })
            .collect();
        top.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("json");
        s.push('\n');
        s
    }

    fn render_csv(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.header_with_check() {
            let _ = writeln!(s, "# {k}: {}", v.text());
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let cells: Vec<String> = r
                .iter()
                .map(|c| {
                    let t = c.text();
                    if t.contains([',', '"', '\n']) {
                        format!("\"{}\"", t.replace('"', "\"\""))
                    } else {
                        t
                    }
                })
                .collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    fn render_table(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.header_with_check() {
            let _ = writeln!(s, "{k}: {}", v.text());
        }
        if self.columns.is_empty() {
            return s;
        }
        let texts: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::text).collect())
            .collect();
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.chars().count()).collect();
        for r in &texts {
            for (w, t) in widths.iter_mut().zip(r) {
                *w = (*w).max(t.chars().count());
            }
        }
        let line = |cells: &[String]| -> String {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        s.push('\n');
        let _ = writeln!(s, "{}", line(&self.columns));
        let _ = writeln!(
            s,
            "{}",
            widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  ")
        );
        for r in &texts {
            let _ = writeln!(s, "{}", line(r));
        }
        s
    }
}
