// Copyright 2026 The distill Authors
// SPDX-License-Identifier: Apache-2.0

//! Result tables and their CSV form.
//!
//! Output is a pure function of the table and its provenance: numbers use
//! the shortest round-trip decimal form and the header carries no clock or
//! host information, so identical inputs give byte-identical files.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub unit: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            Cell::Text(_) => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v}"),
            Cell::Int(v) => format!("{v}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// A figure panel drawn from a long-format table: `y` against `x`, one
/// line per distinct value of `series`.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub stem: String,
    pub x: String,
    pub y: String,
    pub series: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub panels: Vec<Panel>,
}

/// What produced a table.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub version: &'static str,
    pub config_hash: String,
    pub config_echo: String,
}

impl ResultTable {
    pub fn new(name: impl Into<String>, columns: &[(&str, &'static str)]) -> Self {
        Self {
            name: name.into(),
            columns: columns
                .iter()
                .map(|&(name, unit)| Column { name: name.into(), unit })
                .collect(),
            rows: Vec::new(),
            panels: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width differs from header in {}", self.name);
        self.rows.push(row);
    }

    pub fn panel(mut self, stem: impl Into<String>, x: &str, y: &str, series: Option<&str>) -> Self {
        self.panels.push(Panel {
            stem: stem.into(),
            x: x.into(),
            y: y.into(),
            series: series.map(Into::into),
        });
        self
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Vec<Cell> {
        let i = self.column_index(name).unwrap_or_else(|| panic!("no column `{name}` in {}", self.name));
        self.rows.iter().map(|r| r[i].clone()).collect()
    }

    /// Lines of a panel as `(label, points)`, in order of first appearance.
    pub fn series(&self, panel: &Panel) -> Vec<(String, Vec<(f64, f64)>)> {
        let xi = self.column_index(&panel.x).expect("panel x column");
        let yi = self.column_index(&panel.y).expect("panel y column");
        let si = panel.series.as_deref().map(|s| self.column_index(s).expect("panel series column"));
        let mut order: Vec<String> = Vec::new();
        let mut lines: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
        for row in &self.rows {
            let label = match si {
                Some(i) => row[i].render(),
                None => panel.y.clone(),
            };
            if let (Some(x), Some(y)) = (row[xi].as_f64(), row[yi].as_f64()) {
                if !lines.contains_key(&label) {
                    order.push(label.clone());
                }
                lines.entry(label).or_default().push((x, y));
            }
        }
        order
            .into_iter()
            .map(|l| {
                let pts = lines.remove(&l).unwrap_or_default();
                (l, pts)
            })
            .collect()
    }

    /// Wide form of a panel: the `x` column followed by one `y` column per
    /// series, rows in order of first appearance of `x`.
    pub fn pivot(&self, panel: &Panel) -> ResultTable {
        let lines = self.series(panel);
        let xi = self.column_index(&panel.x).expect("panel x column");
        let yi = self.column_index(&panel.y).expect("panel y column");
        let x_unit = self.columns[xi].unit;
        let y_unit = self.columns[yi].unit;
        let mut xs: Vec<f64> = Vec::new();
        for (_, pts) in &lines {
            for &(x, _) in pts {
                if !xs.iter().any(|&v| v.to_bits() == x.to_bits()) {
                    xs.push(x);
                }
            }
        }
        let mut out = ResultTable {
            name: panel.stem.clone(),
            columns: vec![Column {
                name: panel.x.clone(),
                unit: x_unit,
            }],
            rows: Vec::new(),
            panels: Vec::new(),
        };
        for (label, _) in &lines {
            let name = if panel.series.is_some() {
                format!("{}[{label}]", panel.y)
            } else {
                panel.y.clone()
            };
            out.columns.push(Column { name, unit: y_unit });
        }
        for &x in &xs {
            let mut row = vec![Cell::Num(x)];
            for (_, pts) in &lines {
                let y = pts.iter().find(|p| p.0.to_bits() == x.to_bits()).map(|p| p.1);
                row.push(y.map_or(Cell::Text(String::new()), Cell::Num));
            }
            out.rows.push(row);
        }
        out
    }

    pub fn write_csv<W: Write>(&self, out: W, prov: &Provenance) -> Result<(), std::io::Error> {
        let mut out = out;
        writeln!(out, "# distill {}", prov.version)?;
        writeln!(out, "# table: {}", self.name)?;
        writeln!(out, "# config-sha256: {}", prov.config_hash)?;
        writeln!(out, "# resolved configuration:")?;
        for line in prov.config_echo.lines() {
            writeln!(out, "#   {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(|c| format!("{}:{}", c.name, c.unit)))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self, prov: &Provenance) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, prov).expect("writing to memory");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    pub fn save(&self, path: &std::path::Path, prov: &Provenance) -> Result<(), CliError> {
        let io = |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        };
        let file = std::fs::File::create(path).map_err(io)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_csv(&mut w, prov).map_err(io)?;
        w.flush().map_err(io)
    }
}
