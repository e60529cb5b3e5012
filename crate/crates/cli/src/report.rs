//! Tabular reports rendered as text, JSON or CSV.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// In text output rows are grouped under a heading built from these columns.
    pub group_by: Vec<usize>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_owned(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            group_by: Vec::new(),
        }
    }

    pub fn grouped(mut self, columns: &[&str]) -> Self {
        self.group_by = columns
            .iter()
            .map(|name| {
                self.columns
                    .iter()
                    .position(|c| c == name)
                    .expect("known column")
            })
            .collect();
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub config: Map<String, Value>,
    pub tables: Vec<Table>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// `%g`-style rendering with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        format!(
            "{mantissa}e{}{:02}",
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn text_cell(c: &Cell) -> String {
    match c {
        Cell::Num(x) => format_sig(*x, 6),
        Cell::Int(k) => k.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Empty => "-".into(),
    }
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Num(x) if x.is_finite() => format!("{x:.16e}"),
        Cell::Num(x) => x.to_string(),
        Cell::Int(k) => k.to_string(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
        Cell::Empty => String::new(),
    }
}

fn json_cell(c: &Cell) -> Value {
    match c {
        // shortest round-trip form: parses back to the identical binary64
        Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
        Cell::Int(k) => json!(k),
        Cell::Text(s) => json!(s),
        Cell::Empty => Value::Null,
    }
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Json => self.render_json(),
            Format::Csv => self.render_csv(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        for (k, table) in self.tables.iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            let keep: Vec<usize> = (0..table.columns.len())
                .filter(|c| !table.group_by.contains(c))
                .collect();
            let header: Vec<&str> = keep.iter().map(|&c| table.columns[c].as_str()).collect();
            let mut group: Option<String> = None;
            let mut first = true;
            for row in &table.rows {
                if !table.group_by.is_empty() {
                    let value: Vec<String> =
                        table.group_by.iter().map(|&g| text_cell(&row[g])).collect();
                    let value = value.join(" ");
                    if group.as_ref() != Some(&value) {
                        if !first {
                            out.push('\n');
                        }
                        writeln!(out, "# {} {}", table.name, value).unwrap();
                        writeln!(out, "# {}", header.join(", ")).unwrap();
                        group = Some(value);
                    }
                } else if first {
                    writeln!(out, "# {}", table.name).unwrap();
                    writeln!(out, "# {}", header.join(", ")).unwrap();
                }
                first = false;
                // trailing empty cells carry no information in text form
                let last = keep
                    .iter()
                    .rposition(|&c| row[c] != Cell::Empty)
                    .map_or(0, |p| p + 1);
                let cells: Vec<String> = keep[..last].iter().map(|&c| text_cell(&row[c])).collect();
                writeln!(out, "{}", cells.join(", ")).unwrap();
            }
        }
        for w in &self.warnings {
            writeln!(out, "warning: {w}").unwrap();
        }
        out
    }

    fn render_json(&self) -> String {
        let results: Vec<Value> = self
            .tables
            .iter()
            .flat_map(|t| {
                t.rows.iter().map(move |row| {
                    let mut obj = Map::new();
                    obj.insert("table".into(), json!(t.name));
                    for (col, cell) in t.columns.iter().zip(row) {
                        obj.insert(col.clone(), json_cell(cell));
                    }
                    Value::Object(obj)
                })
            })
            .collect();
        let doc = json!({
            "config": Value::Object(self.config.clone()),
            "results": results,
            "warnings": self.warnings,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        for (k, table) in self.tables.iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            writeln!(out, "table,{}", table.columns.join(",")).unwrap();
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(csv_cell).collect();
                writeln!(out, "{},{}", table.name, cells.join(",")).unwrap();
            }
        }
        out
    }
}
