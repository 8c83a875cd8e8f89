//! Report assembly and rendering.

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Latex,
    Csv,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool) -> Self {
        Check { name: name.into(), ok }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Table { headers: headers.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn text(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> =
                cells.iter().zip(&widths).map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count()))).collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = line(&self.headers);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }

    fn csv(&self) -> String {
        let esc = |c: &String| {
            if c.contains([',', '"', '\n']) {
                format!("\"{}\"", c.replace('"', "\"\""))
            } else {
                c.clone()
            }
        };
        let mut out = String::new();
        for row in std::iter::once(&self.headers).chain(&self.rows) {
            out.push_str(&row.iter().map(esc).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    fn latex(&self) -> String {
        let mut out = format!("\\begin{{tabular}}{{{}}}\n", "c".repeat(self.headers.len()));
        out.push_str(&format!("{} \\\\\n\\hline\n", self.headers.join(" & ")));
        for row in &self.rows {
            out.push_str(&format!("{} \\\\\n", row.join(" & ")));
        }
        out.push_str("\\end{tabular}\n");
        out
    }
}

/// Everything a subcommand produces.
#[derive(Debug, Clone)]
pub struct Output {
    pub result: Value,
    pub table: Table,
    /// Replaces the table in text mode.
    pub text_body: Option<String>,
    /// Replaces the table in LaTeX mode.
    pub latex_body: Option<String>,
    pub notes: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl Output {
    pub fn new(result: Value, table: Table) -> Self {
        Output { result, table, text_body: None, latex_body: None, notes: Vec::new(), checks: Vec::new() }
    }

    pub fn note(&mut self, key: &str, value: impl Into<String>) {
        self.notes.push((key.to_string(), value.into()));
    }

    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

pub fn config_hash(config: &Value) -> String {
    let digest = Sha256::digest(serde_json::to_vec(config).expect("config serializes"));
    format!("{digest:x}")
}

fn summary(checks: &[Check]) -> String {
    if checks.is_empty() {
        return "none".to_string();
    }
    checks.iter().map(|c| format!("{} {}", c.name, if c.ok { "ok" } else { "FAILED" })).collect::<Vec<_>>().join(", ")
}

pub fn render(command: &str, config: &Value, out: &Output, format: Format) -> String {
    let hash = config_hash(config);
    match format {
        Format::Json => {
            let doc = json!({
                "command": command,
                "config_hash": hash,
                "config": config,
                "result": out.result,
                "invariants": out.checks,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = format!("{command}  config {hash}\n\n");
            s.push_str(out.text_body.as_deref().unwrap_or(&out.table.text()));
            if !out.notes.is_empty() {
                s.push('\n');
                for (k, v) in &out.notes {
                    s.push_str(&format!("{k}: {v}\n"));
                }
            }
            s.push_str(&format!("\ninvariants: {}\n", summary(&out.checks)));
            s
        }
        Format::Csv => {
            let mut s = format!("# {command} config {hash}\n");
            s.push_str(&out.table.csv());
            for (k, v) in &out.notes {
                s.push_str(&format!("# {k}: {v}\n"));
            }
            s.push_str(&format!("# invariants: {}\n", summary(&out.checks)));
            s
        }
        Format::Latex => {
            let mut s = format!("% {command} config {hash}\n");
            s.push_str(out.latex_body.as_deref().unwrap_or(&out.table.latex()));
            for (k, v) in &out.notes {
                s.push_str(&format!("% {k}: {v}\n"));
            }
            s.push_str(&format!("% invariants: {}\n", summary(&out.checks)));
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_columns() {
        let mut t = Table::new(["a", "long"]);
        t.push(vec!["xyz".into(), "1".into()]);
        assert_eq!(t.text(), "a    long\nxyz  1\n");
        assert_eq!(t.csv(), "a,long\nxyz,1\n");
    }

    #[test]
    fn hash_is_stable() {
        let c = json!({"dim": [2, 3]});
        assert_eq!(config_hash(&c), config_hash(&c.clone()));
        assert_ne!(config_hash(&c), config_hash(&json!({"dim": [2, 5]})));
        assert_eq!(config_hash(&c).len(), 64);
    }
}
