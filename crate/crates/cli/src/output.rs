//! CSV output: comma separated, header row, LF line endings, floats with 17
//! significant digits. Every file starts with `#` comment lines naming the
//! tool version and the config digest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fixed float formatting shared by every table.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

fn escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Identifies the run in file headers.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub command: &'static str,
    pub digest: String,
    pub refine: usize,
}

impl RunMeta {
    pub fn header(&self) -> String {
        format!(
            "# treeheat {VERSION}\n# config_sha256 {}\n# command {} refine {}\n",
            self.digest, self.command, self.refine
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    comments: Vec<String>,
    trailer: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
            comments: Vec::new(),
            trailer: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    /// Comment line placed after the run header.
    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    /// Comment line placed after the last row.
    pub fn trailer(&mut self, line: impl Into<String>) {
        self.trailer.push(line.into());
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn render(&self, meta: &RunMeta) -> String {
        let mut out = meta.header();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|f| escape(f)).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        for c in &self.trailer {
            let _ = writeln!(out, "# {c}");
        }
        out
    }
}

/// Writes `content` to `dir/name`, returning the path.
pub fn write_file(dir: &Path, name: &str, content: &str) -> std::io::Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, content.as_bytes())?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(num(-2.0), "-2.0000000000000000e0");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(num(f64::NAN), "nan");
        for x in [0.1, 1.0 / 3.0, 6.02e23, 1e-300, -7.25] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn renders_header_and_quotes() {
        let meta = RunMeta {
            command: "heat",
            digest: "ab".into(),
            refine: 1,
        };
        let mut t = Table::new(&["a", "b"]);
        t.comment("x_id 0 = 0");
        t.push(vec!["1".into(), "p,q".into()]);
        t.trailer("done");
        let s = t.render(&meta);
        assert_eq!(
            s,
            format!("# treeheat {VERSION}\n# config_sha256 ab\n# command heat refine 1\n# x_id 0 = 0\na,b\n1,\"p,q\"\n# done\n")
        );
        assert!(!s.contains('\r'));
    }
}
