//! CSV and JSON reports. Both start with a `generated_at` line; everything after
//! it depends only on the inputs.

use std::fs;
use std::path::{Path, PathBuf};

use bk_core::conjectures::ReportRow;
use serde::Serialize;

use crate::spec::FORMAT_VERSION;
use crate::CliError;

pub const CSV_COLUMNS: [&str; 7] = ["p", "e", "module", "n", "check", "values", "verdict"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Serialize)]
struct JsonReport<'a, S: Serialize> {
    generated_at: &'a str,
    format_version: u32,
    command: &'a str,
    summary: &'a S,
    rows: &'a [ReportRow],
}

pub struct Report<'a, S: Serialize> {
    pub command: &'a str,
    pub summary: &'a S,
    pub rows: &'a [ReportRow],
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

impl<S: Serialize> Report<'_, S> {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        self.render_at(format, &timestamp())
    }

    fn render_at(&self, format: Format, generated_at: &str) -> Result<String, CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(CSV_COLUMNS).map_err(io)?;
                for r in self.rows {
                    w.write_record([
                        r.p.to_string(),
                        r.e.to_string(),
                        r.module.clone(),
                        r.n.to_string(),
                        r.check.clone(),
                        r.values.clone(),
                        r.verdict.to_string(),
                    ])
                    .map_err(io)?;
                }
                let body = String::from_utf8(w.into_inner().map_err(io)?).map_err(io)?;
                Ok(format!("# generated_at: {generated_at}\n{body}"))
            }
            Format::Json => {
                let doc = JsonReport {
                    generated_at,
                    format_version: FORMAT_VERSION,
                    command: self.command,
                    summary: self.summary,
                    rows: self.rows,
                };
                let mut text = serde_json::to_string_pretty(&doc).map_err(io)?;
                text.push('\n');
                Ok(text)
            }
        }
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<(), CliError> {
        let fail = |e: std::io::Error| CliError::Input(format!("cannot write {}: {e}", path.display()));
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(fail)?;
        }
        fs::write(path, self.render(format)?).map_err(fail)
    }
}

/// `base.csv` and `base.json`, whatever extension `base` had.
pub fn both_paths(base: &Path) -> (PathBuf, PathBuf) {
    (
        base.with_extension(Format::Csv.extension()),
        base.with_extension(Format::Json.extension()),
    )
}

fn io(e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("cannot render report: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use bk_core::conjectures::Verdict;

    fn rows() -> Vec<ReportRow> {
        vec![ReportRow {
            p: 3,
            e: 4,
            module: "PUr(1,2)".into(),
            n: 1,
            check: "e-torsion".into(),
            values: "formula=4, oracle=4".into(),
            verdict: Verdict::Pass,
        }]
    }

    #[test]
    fn csv_has_header_and_quoted_values() {
        let rows = rows();
        let r = Report {
            command: "lengths",
            summary: &(),
            rows: &rows,
        };
        let text = r.render_at(Format::Csv, "T").unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# generated_at: T");
        assert_eq!(lines[1], "p,e,module,n,check,values,verdict");
        assert_eq!(
            lines[2],
            "3,4,\"PUr(1,2)\",1,e-torsion,\"formula=4, oracle=4\",pass"
        );
    }

    #[test]
    fn only_the_timestamp_line_varies() {
        let rows = rows();
        let r = Report {
            command: "lengths",
            summary: &(),
            rows: &rows,
        };
        for f in [Format::Csv, Format::Json] {
            let a = r.render_at(f, "2001-01-01T00:00:00Z").unwrap();
            let b = r.render_at(f, "2002-02-02T00:00:00Z").unwrap();
            let diff: Vec<_> = a.lines().zip(b.lines()).filter(|(x, y)| x != y).collect();
            assert_eq!(diff.len(), 1);
            assert!(diff[0].0.contains("generated_at"));
        }
    }
}
