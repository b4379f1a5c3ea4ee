//! Output files: commented CSV tables and pretty-printed JSON.
//!
//! Tables carry their provenance in `#` comment lines (resolved
//! configuration, seed, schema version) so a file on disk is
//! reproducible without the command line that made it. Floats are
//! written in shortest round-trip form; reading a value back yields
//! bit-identical f64s.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// A CSV table with leading comment lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    /// Written first, each prefixed with "# ".
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            comments: Vec::new(),
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    /// Appends a row.
    ///
    /// Panics when the cell count differs from the column count.
    pub fn push_row(&mut self, cells: Vec<String>) {
        assert_eq!(
            cells.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(cells);
    }

    /// Renders the table: comments, header, rows, one trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for comment in &self.comments {
            out.push_str("# ");
            out.push_str(comment);
            out.push('\n');
        }
        out.push_str(&render_record(&self.columns));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&render_record(row));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render())?;
        Ok(())
    }
}

fn render_record(cells: &[String]) -> String {
    cells
        .iter()
        .map(|c| escape_csv(c))
        .collect::<Vec<_>>()
        .join(",")
}

/// Quotes a field when it contains a separator, quote, or line break;
/// embedded quotes are doubled.
fn escape_csv(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Shortest decimal string that parses back to exactly `v`.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        // Rust's Display for f64 is shortest round-trip.
        format!("{v}")
    }
}

/// Serializes `value` as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_comments_header_and_rows() {
        let mut table = CsvTable::new(&["x", "y"]);
        table.comment("seed = 7");
        table.push_row(vec!["1".into(), "2".into()]);
        table.push_row(vec!["3".into(), "4".into()]);
        assert_eq!(table.render(), "# seed = 7\nx,y\n1,2\n3,4\n");
    }

    #[test]
    fn escapes_fields_that_need_quoting() {
        let mut table = CsvTable::new(&["message"]);
        table.push_row(vec!["a,b".into()]);
        table.push_row(vec!["say \"hi\"".into()]);
        assert_eq!(table.render(), "message\n\"a,b\"\n\"say \"\"hi\"\"\"\n");
    }

    #[test]
    #[should_panic(expected = "row width")]
    fn rejects_ragged_rows() {
        let mut table = CsvTable::new(&["x", "y"]);
        table.push_row(vec!["1".into()]);
    }

    #[test]
    fn floats_round_trip_through_their_text_form() {
        for v in [
            0.0,
            -1.5,
            1.0 / 3.0,
            6.626e-34,
            f64::MAX,
            f64::MIN_POSITIVE,
            2.626e-3,
        ] {
            let text = fmt_float(v);
            assert_eq!(text.parse::<f64>().unwrap(), v, "text {text}");
        }
        assert_eq!(fmt_float(f64::NAN), "nan");
        assert_eq!(fmt_float(f64::INFINITY), "inf");
    }

    #[test]
    fn json_files_end_with_a_newline() {
        let dir = std::env::temp_dir().join("helmcloak-report-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("value.json");
        write_json(&path, &serde_json::json!({"alpha": 0.5})).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.ends_with('\n'));
        assert!(text.contains("\"alpha\": 0.5"));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
