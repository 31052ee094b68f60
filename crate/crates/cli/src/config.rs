//! Line-oriented run configuration.
//!
//! ```text
//! # comment
//! [section]
//! key = value          # trailing comment
//! list = 0 0.5 1 2     # whitespace-separated numbers
//! ```
//!
//! Section and key names are `[A-Za-z0-9_-]+`. A key may appear once per
//! section and a section once per file.

use std::collections::BTreeMap;
use std::fmt;

/// Position of a token in the source, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: Position,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.position.line, self.position.column, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        position: Position { line, column },
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: String,
    pub key_at: Position,
    pub value_at: Position,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Section {
    pub at: Option<Position>,
    pub entries: BTreeMap<String, Entry>,
}

/// Parsed but untyped configuration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    sections: BTreeMap<String, Section>,
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Column (1-based, in characters) of byte offset `byte` in `line`.
fn column_of(line: &str, byte: usize) -> usize {
    line[..byte].chars().count() + 1
}

impl Document {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut doc = Document::default();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            let body = match line.find('#') {
                Some(k) => &line[..k],
                None => line,
            };
            let lead = body.len() - body.trim_start().len();
            let trimmed = body.trim();
            if trimmed.is_empty() {
                continue;
            }
            let col = column_of(line, lead);
            if let Some(rest) = trimmed.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return err(lineno, col + trimmed.chars().count(), "expected ']' to close the section header");
                };
                let name = name.trim();
                if !valid_name(name) {
                    return err(lineno, col + 1, format!("invalid section name '{name}'"));
                }
                if let Some(prev) = doc.sections.get(name).and_then(|s| s.at) {
                    return err(lineno, col, format!("section [{name}] already defined on line {}", prev.line));
                }
                doc.sections.insert(
                    name.to_string(),
                    Section {
                        at: Some(Position { line: lineno, column: col }),
                        entries: BTreeMap::new(),
                    },
                );
                current = Some(name.to_string());
                continue;
            }
            let Some(eq) = body.find('=') else {
                return err(lineno, col, "expected 'key = value' or a [section] header");
            };
            let key = body[..eq].trim();
            if !valid_name(key) {
                return err(lineno, col, format!("invalid key '{key}'"));
            }
            let Some(section) = current.as_ref() else {
                return err(lineno, col, format!("key '{key}' appears before any [section] header"));
            };
            let after = &body[eq + 1..];
            let vlead = after.len() - after.trim_start().len();
            let value = after.trim();
            let value_col = column_of(line, eq + 1 + vlead);
            if value.is_empty() {
                return err(lineno, value_col, format!("missing value for '{key}'"));
            }
            let sec = doc.sections.get_mut(section).expect("current section exists");
            if let Some(prev) = sec.entries.get(key) {
                return err(
                    lineno,
                    col,
                    format!("key '{key}' already set on line {} in [{section}]", prev.key_at.line),
                );
            }
            sec.entries.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    key_at: Position { line: lineno, column: col },
                    value_at: Position {
                        line: lineno,
                        column: value_col,
                    },
                },
            );
        }
        Ok(doc)
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.get(name)
    }

    pub fn has_section(&self, name: &str) -> bool {
        self.sections.contains_key(name)
    }

    pub fn section_names(&self) -> impl Iterator<Item = &str> {
        self.sections.keys().map(String::as_str)
    }

    pub fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section).and_then(|s| s.entries.get(key))
    }

    /// Fails on the first key of `section` not in `allowed`.
    pub fn check_keys(&self, section: &str, allowed: &[&str]) -> Result<(), ParseError> {
        let Some(sec) = self.sections.get(section) else {
            return Ok(());
        };
        // report in source order
        let mut entries: Vec<(&String, &Entry)> = sec.entries.iter().collect();
        entries.sort_by_key(|(_, e)| (e.key_at.line, e.key_at.column));
        for (key, e) in entries {
            if !allowed.contains(&key.as_str()) {
                return err(
                    e.key_at.line,
                    e.key_at.column,
                    format!("unknown key '{key}' in [{section}] (expected one of: {})", allowed.join(", ")),
                );
            }
        }
        Ok(())
    }

    pub fn string(&self, section: &str, key: &str) -> Option<&str> {
        self.entry(section, key).map(|e| e.value.as_str())
    }

    /// Whitespace-separated numbers, each reported at its own column on
    /// failure.
    pub fn numbers(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>, ParseError> {
        let Some(e) = self.entry(section, key) else {
            return Ok(None);
        };
        let mut out = Vec::new();
        let mut offset = 0usize;
        for tok in e.value.split_whitespace() {
            let byte = e.value[offset..].find(tok).expect("token comes from the value") + offset;
            offset = byte + tok.len();
            let col = e.value_at.column + e.value[..byte].chars().count();
            match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => out.push(v),
                _ => return err(e.value_at.line, col, format!("'{tok}' is not a finite number ({section}.{key})")),
            }
        }
        Ok(Some(out))
    }

    pub fn number(&self, section: &str, key: &str) -> Result<Option<f64>, ParseError> {
        let Some(list) = self.numbers(section, key)? else {
            return Ok(None);
        };
        let e = self.entry(section, key).expect("present");
        if list.len() != 1 {
            return err(
                e.value_at.line,
                e.value_at.column,
                format!("{section}.{key} expects a single number, got {}", list.len()),
            );
        }
        Ok(Some(list[0]))
    }

    pub fn integer(&self, section: &str, key: &str) -> Result<Option<u64>, ParseError> {
        let Some(e) = self.entry(section, key) else {
            return Ok(None);
        };
        match e.value.parse::<u64>() {
            Ok(v) => Ok(Some(v)),
            Err(_) => err(
                e.value_at.line,
                e.value_at.column,
                format!("{section}.{key} expects a nonnegative integer, got '{}'", e.value),
            ),
        }
    }

    pub fn integers(&self, section: &str, key: &str) -> Result<Option<Vec<u64>>, ParseError> {
        let Some(e) = self.entry(section, key) else {
            return Ok(None);
        };
        let mut out = Vec::new();
        let mut offset = 0usize;
        for tok in e.value.split_whitespace() {
            let byte = e.value[offset..].find(tok).expect("token comes from the value") + offset;
            offset = byte + tok.len();
            let col = e.value_at.column + e.value[..byte].chars().count();
            match tok.parse::<u64>() {
                Ok(v) => out.push(v),
                Err(_) => return err(e.value_at.line, col, format!("'{tok}' is not a nonnegative integer ({section}.{key})")),
            }
        }
        Ok(Some(out))
    }

    pub fn boolean(&self, section: &str, key: &str) -> Result<Option<bool>, ParseError> {
        let Some(e) = self.entry(section, key) else {
            return Ok(None);
        };
        match e.value.as_str() {
            "true" | "yes" | "1" => Ok(Some(true)),
            "false" | "no" | "0" => Ok(Some(false)),
            other => err(
                e.value_at.line,
                e.value_at.column,
                format!("{section}.{key} expects true or false, got '{other}'"),
            ),
        }
    }

    /// Whitespace-separated words.
    pub fn words(&self, section: &str, key: &str) -> Option<Vec<&str>> {
        self.entry(section, key).map(|e| e.value.split_whitespace().collect())
    }

    /// Error located at the value of `section.key` (or at the section header,
    /// or line 1 when neither exists).
    pub fn error_at(&self, section: &str, key: &str, message: impl Into<String>) -> ParseError {
        let position = self
            .entry(section, key)
            .map(|e| e.value_at)
            .or_else(|| self.section(section).and_then(|s| s.at))
            .unwrap_or(Position { line: 1, column: 1 });
        ParseError {
            position,
            message: message.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_lists_and_comments() {
        let doc = Document::parse("# top\n[tree]\ngenerator = dyadic # trailing\n\n[sweep]\n t = 0.5  1 2\n").unwrap();
        assert_eq!(doc.string("tree", "generator"), Some("dyadic"));
        assert_eq!(doc.numbers("sweep", "t").unwrap(), Some(vec![0.5, 1.0, 2.0]));
        assert_eq!(doc.number("sweep", "x").unwrap(), None);
        assert!(doc.has_section("sweep"));
    }

    #[test]
    fn reports_line_and_column() {
        let e = Document::parse("[a]\nx = 1\n  oops\n").unwrap_err();
        assert_eq!(e.position, Position { line: 3, column: 3 });
        let e = Document::parse("x = 1\n").unwrap_err();
        assert_eq!(e.position.line, 1);
        let e = Document::parse("[a\n").unwrap_err();
        assert_eq!(e.position, Position { line: 1, column: 3 });
        let e = Document::parse("[a]\nx = 1\nx = 2\n").unwrap_err();
        assert!(e.message.contains("line 2"), "{e}");
        let e = Document::parse("[a]\n[a]\n").unwrap_err();
        assert_eq!(e.position.line, 2);
        let e = Document::parse("[a]\nx =\n").unwrap_err();
        assert_eq!(e.position, Position { line: 2, column: 4 });
    }

    #[test]
    fn bad_number_points_at_token() {
        let doc = Document::parse("[s]\nt = 1 2 x3 4\n").unwrap();
        let e = doc.numbers("s", "t").unwrap_err();
        assert_eq!(e.position, Position { line: 2, column: 9 });
        assert!(e.to_string().starts_with("line 2, column 9:"));
        let doc = Document::parse("[s]\nn = 1.5\nb = maybe\n").unwrap();
        assert!(doc.integer("s", "n").is_err());
        assert!(doc.boolean("s", "b").is_err());
        let doc = Document::parse("[s]\nt = 1 nan\n").unwrap();
        assert!(doc.numbers("s", "t").is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let doc = Document::parse("[s]\nfoo = 1\nbar = 2\n").unwrap();
        let e = doc.check_keys("s", &["foo"]).unwrap_err();
        assert_eq!(e.position, Position { line: 3, column: 1 });
        assert!(doc.check_keys("s", &["foo", "bar"]).is_ok());
        assert!(doc.check_keys("missing", &[]).is_ok());
    }

    #[test]
    fn crlf_and_unicode_columns() {
        let doc = Document::parse("[s]\r\nname = é x\r\n").unwrap();
        assert_eq!(doc.string("s", "name"), Some("é x"));
        let doc = Document::parse("[s]\nk = é 1 z\n").unwrap();
        let e = doc.numbers("s", "k").unwrap_err();
        assert_eq!(e.position.column, 5);
    }
}
