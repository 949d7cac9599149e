//! Report container and the three renderings: JSON, CSV, aligned text.

use serde_json::{json, Value};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

pub struct Table {
    pub title: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, header: Vec<&'static str>) -> Self {
        Table {
            title: title.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

pub struct Report {
    /// Machine-readable body; `schema_version` and `command` are added on render.
    pub body: Value,
    pub command: &'static str,
    pub tables: Vec<Table>,
    /// Extra lines for the text rendering only.
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str, body: Value) -> Self {
        Report {
            body,
            command,
            tables: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn json(&self) -> String {
        let mut v = json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
        });
        if let (Value::Object(out), Value::Object(body)) = (&mut v, &self.body) {
            for (k, x) in body {
                out.insert(k.clone(), x.clone());
            }
        }
        // serde_json maps are ordered by key, so output is canonical
        let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
        s.push('\n');
        s
    }

    /// One CSV table per section, separated by a blank line.
    pub fn csv(&self) -> String {
        let mut out = Vec::new();
        for (i, table) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push(b'\n');
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.header).expect("in-memory write");
            for row in &table.rows {
                w.write_record(row).expect("in-memory write");
            }
            out.extend(w.into_inner().expect("in-memory flush"));
        }
        String::from_utf8(out).expect("csv is utf-8")
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for note in &self.notes {
            out.push_str(note);
            out.push('\n');
        }
        for table in &self.tables {
            out.push('\n');
            out.push_str(&table.title);
            out.push('\n');
            let widths: Vec<usize> = (0..table.header.len())
                .map(|c| {
                    table
                        .rows
                        .iter()
                        .map(|r| r[c].len())
                        .chain([table.header[c].len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cells: Vec<&str>| {
                let parts: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect();
                parts.join("  ").trim_end().to_string() + "\n"
            };
            out.push_str(&line(table.header.clone()));
            let rule: usize = widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1);
            out.push_str(&"-".repeat(rule));
            out.push('\n');
            for row in &table.rows {
                out.push_str(&line(row.iter().map(String::as_str).collect()));
            }
        }
        out
    }
}

/// Frequencies: 8 decimals.
pub fn freq(x: f64) -> String {
    format!("{x:.8}")
}

/// Deviations: scientific, 3 significant figures.
pub fn sci(x: f64) -> String {
    format!("{x:.2e}")
}

/// Signed deviation in scientific notation.
pub fn signed_sci(x: f64) -> String {
    format!("{x:+.2e}")
}

/// Test statistics: 2 decimals.
pub fn stat(x: f64) -> String {
    format!("{x:.2}")
}

/// p-values: 3 decimals, with tiny values shown as a bound.
pub fn pval(p: f64) -> String {
    if p < 1e-6 {
        "<1e-6".to_string()
    } else {
        format!("{p:.3}")
    }
}

pub fn opt(x: Option<f64>, f: fn(f64) -> String) -> String {
    x.map_or_else(|| "-".to_string(), f)
}
