//! Line-oriented, schema-versioned text format.
//!
//! ```text
//! rdm-text 1
//! kind system
//! text source model hubbard
//! int n_electrons 2
//! real ground_energy -8.2842712474619029e-1
//! vector occupations 2
//!   2.9289321881345254e-1 1.7071067811865475e0
//! matrix one_rdm 2 2
//!   1.0000000000000000e0 7.0710678118654746e-1
//!   7.0710678118654746e-1 1.0000000000000000e0
//! tensor4 two_rdm 2 2 2 2
//!   ...
//! end
//! ```
//!
//! Each entry is `<type> <key> [shape...]`, followed for array types by the
//! values in row-major order (any line breaking is accepted on input). Reals
//! are written with 17 significant digits, which round-trips every `f64`.
//! Blank lines and lines starting with `#` are ignored. The `end` line is
//! mandatory so that truncated files are detected.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use thiserror::Error;

pub const MAGIC: &str = "rdm-text";
pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message} (near '{context}')")]
    Parse { line: usize, context: String, message: String },
    #[error("unsupported schema version '{found}' (expected {SCHEMA_VERSION})")]
    SchemaVersionMismatch { found: String },
    #[error("expected a '{expected}' file, found '{found}'")]
    WrongKind { expected: String, found: String },
    #[error("missing field '{0}'")]
    MissingField(String),
    #[error("field '{key}' is not a {expected}")]
    WrongType { key: String, expected: &'static str },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("invalid content: {0}")]
    Invalid(#[from] crate::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Text(String),
    Int(i64),
    Real(f64),
    Vector(Vec<f64>),
    /// Row-major.
    Matrix {
        rows: usize,
        cols: usize,
        data: Vec<f64>,
    },
    Tensor4 {
        shape: [usize; 4],
        data: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub kind: String,
    entries: Vec<(String, Value)>,
}

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

impl Document {
    pub fn new(kind: impl Into<String>) -> Self {
        Document {
            kind: kind.into(),
            entries: Vec::new(),
        }
    }

    pub fn entries(&self) -> &[(String, Value)] {
        &self.entries
    }

    /// Adds or replaces an entry. Keys must be a single whitespace-free token.
    pub fn set(&mut self, key: impl Into<String>, value: Value) {
        let key = key.into();
        assert!(!key.is_empty() && !key.contains(char::is_whitespace), "invalid key '{key}'");
        if let Value::Text(t) = &value {
            assert!(!t.contains('\n'), "text values must be single-line");
        }
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn set_text(&mut self, key: impl Into<String>, v: impl Into<String>) {
        self.set(key, Value::Text(v.into()));
    }

    pub fn set_real(&mut self, key: impl Into<String>, v: f64) {
        self.set(key, Value::Real(v));
    }

    pub fn set_int(&mut self, key: impl Into<String>, v: i64) {
        self.set(key, Value::Int(v));
    }

    pub fn set_vector(&mut self, key: impl Into<String>, v: &[f64]) {
        self.set(key, Value::Vector(v.to_vec()));
    }

    pub fn set_matrix(&mut self, key: impl Into<String>, m: &DMatrix<f64>) {
        self.set(
            key,
            Value::Matrix {
                rows: m.nrows(),
                cols: m.ncols(),
                data: m.transpose().as_slice().to_vec(),
            },
        );
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn has(&self, key: &str) -> bool {
        self.get(key).is_some()
    }

    fn require(&self, key: &str) -> Result<&Value, FormatError> {
        self.get(key).ok_or_else(|| FormatError::MissingField(key.to_string()))
    }

    pub fn text(&self, key: &str) -> Result<&str, FormatError> {
        match self.require(key)? {
            Value::Text(t) => Ok(t),
            _ => Err(wrong(key, "text")),
        }
    }

    pub fn int(&self, key: &str) -> Result<i64, FormatError> {
        match self.require(key)? {
            Value::Int(i) => Ok(*i),
            _ => Err(wrong(key, "int")),
        }
    }

    pub fn real(&self, key: &str) -> Result<f64, FormatError> {
        match self.require(key)? {
            Value::Real(x) => Ok(*x),
            _ => Err(wrong(key, "real")),
        }
    }

    pub fn opt_real(&self, key: &str) -> Result<Option<f64>, FormatError> {
        if self.has(key) {
            self.real(key).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn vector(&self, key: &str) -> Result<&[f64], FormatError> {
        match self.require(key)? {
            Value::Vector(v) => Ok(v),
            _ => Err(wrong(key, "vector")),
        }
    }

    pub fn matrix(&self, key: &str) -> Result<DMatrix<f64>, FormatError> {
        match self.require(key)? {
            Value::Matrix { rows, cols, data } => Ok(DMatrix::from_row_slice(*rows, *cols, data)),
            _ => Err(wrong(key, "matrix")),
        }
    }

    pub fn tensor4(&self, key: &str) -> Result<([usize; 4], &[f64]), FormatError> {
        match self.require(key)? {
            Value::Tensor4 { shape, data } => Ok((*shape, data)),
            _ => Err(wrong(key, "tensor4")),
        }
    }

    pub fn expect_kind(&self, kind: &str) -> Result<(), FormatError> {
        if self.kind != kind {
            return Err(FormatError::WrongKind {
                expected: kind.to_string(),
                found: self.kind.clone(),
            });
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC} {SCHEMA_VERSION}");
        let _ = writeln!(out, "kind {}", self.kind);
        let row = |out: &mut String, xs: &[f64]| {
            out.push(' ');
            for x in xs {
                out.push(' ');
                out.push_str(&fmt_real(*x));
            }
            out.push('\n');
        };
        for (key, value) in &self.entries {
            match value {
                Value::Text(t) if t.is_empty() => {
                    let _ = writeln!(out, "text {key}");
                }
                Value::Text(t) => {
                    let _ = writeln!(out, "text {key} {t}");
                }
                Value::Int(i) => {
                    let _ = writeln!(out, "int {key} {i}");
                }
                Value::Real(x) => {
                    let _ = writeln!(out, "real {key} {}", fmt_real(*x));
                }
                Value::Vector(v) => {
                    let _ = writeln!(out, "vector {key} {}", v.len());
                    if !v.is_empty() {
                        row(&mut out, v);
                    }
                }
                Value::Matrix { rows, cols, data } => {
                    let _ = writeln!(out, "matrix {key} {rows} {cols}");
                    if *cols > 0 {
                        for r in data.chunks(*cols) {
                            row(&mut out, r);
                        }
                    }
                }
                Value::Tensor4 { shape, data } => {
                    let _ = writeln!(out, "tensor4 {key} {} {} {} {}", shape[0], shape[1], shape[2], shape[3]);
                    if shape[3] > 0 {
                        for r in data.chunks(shape[3]) {
                            row(&mut out, r);
                        }
                    }
                }
            }
        }
        out.push_str("end\n");
        out
    }

    pub fn parse(input: &str) -> Result<Document, FormatError> {
        Parser::new(input).document()
    }

    pub fn read(path: &Path) -> Result<Document, FormatError> {
        Document::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), FormatError> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

fn wrong(key: &str, expected: &'static str) -> FormatError {
    FormatError::WrongType {
        key: key.to_string(),
        expected,
    }
}

struct Parser<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        let lines: Vec<(usize, &str)> = input
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let last_line = input.lines().count().max(1);
        Parser {
            lines,
            pos: 0,
            last_line,
        }
    }

    fn err(line: usize, context: &str, message: impl Into<String>) -> FormatError {
        let context: String = context.chars().take(60).collect();
        FormatError::Parse {
            line,
            context,
            message: message.into(),
        }
    }

    fn next_line(&mut self, what: &str) -> Result<(usize, &'a str), FormatError> {
        let l = self.lines.get(self.pos).copied().ok_or_else(|| {
            Self::err(
                self.last_line,
                "<end of file>",
                format!("unexpected end of file, expected {what} (truncated?)"),
            )
        })?;
        self.pos += 1;
        Ok(l)
    }

    fn document(mut self) -> Result<Document, FormatError> {
        let (ln, header) = self.next_line("header")?;
        let mut tok = header.split_whitespace();
        if tok.next() != Some(MAGIC) {
            return Err(Self::err(ln, header, format!("missing '{MAGIC}' header")));
        }
        let version = tok.next().ok_or_else(|| Self::err(ln, header, "missing schema version"))?;
        if version != SCHEMA_VERSION {
            return Err(FormatError::SchemaVersionMismatch {
                found: version.to_string(),
            });
        }
        let (ln, kind_line) = self.next_line("kind line")?;
        let kind = match kind_line.split_whitespace().collect::<Vec<_>>()[..] {
            ["kind", k] => k.to_string(),
            _ => return Err(Self::err(ln, kind_line, "expected 'kind <name>'")),
        };
        let mut doc = Document::new(kind);
        loop {
            let (ln, line) = self.next_line("entry or 'end'")?;
            if line == "end" {
                break;
            }
            let (key, value) = self.entry(ln, line)?;
            if doc.has(&key) {
                return Err(Self::err(ln, line, format!("duplicate key '{key}'")));
            }
            doc.entries.push((key, value));
        }
        if let Some(&(ln, line)) = self.lines.get(self.pos) {
            return Err(Self::err(ln, line, "content after 'end'"));
        }
        Ok(doc)
    }

    fn entry(&mut self, ln: usize, line: &'a str) -> Result<(String, Value), FormatError> {
        let mut parts = line.splitn(3, char::is_whitespace);
        let ty = parts.next().unwrap_or("");
        let key = parts
            .next()
            .filter(|k| !k.is_empty())
            .ok_or_else(|| Self::err(ln, line, "missing key"))?
            .to_string();
        let rest = parts.next().unwrap_or("").trim();
        let dims = |n: usize| -> Result<Vec<usize>, FormatError> {
            let d: Vec<&str> = rest.split_whitespace().collect();
            if d.len() != n {
                return Err(Self::err(ln, line, format!("expected {n} dimension(s)")));
            }
            d.iter()
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| Self::err(ln, line, format!("bad dimension '{s}'")))
                })
                .collect()
        };
        let value = match ty {
            "text" => Value::Text(rest.to_string()),
            "int" => Value::Int(rest.parse().map_err(|_| Self::err(ln, line, "bad integer"))?),
            "real" => Value::Real(parse_real(rest).ok_or_else(|| Self::err(ln, line, "bad real"))?),
            "vector" => {
                let d = dims(1)?;
                Value::Vector(self.values(d[0], line)?)
            }
            "matrix" => {
                let d = dims(2)?;
                let n = d[0].checked_mul(d[1]).ok_or_else(|| Self::err(ln, line, "shape overflow"))?;
                Value::Matrix {
                    rows: d[0],
                    cols: d[1],
                    data: self.values(n, line)?,
                }
            }
            "tensor4" => {
                let d = dims(4)?;
                let n = d
                    .iter()
                    .try_fold(1usize, |a, &b| a.checked_mul(b))
                    .ok_or_else(|| Self::err(ln, line, "shape overflow"))?;
                Value::Tensor4 {
                    shape: [d[0], d[1], d[2], d[3]],
                    data: self.values(n, line)?,
                }
            }
            other => return Err(Self::err(ln, line, format!("unknown entry type '{other}'"))),
        };
        Ok((key, value))
    }

    fn values(&mut self, n: usize, header: &str) -> Result<Vec<f64>, FormatError> {
        let mut out = Vec::with_capacity(n.min(1 << 20));
        while out.len() < n {
            let (ln, line) = self.next_line(&format!("{} more value(s) for '{header}'", n - out.len()))?;
            for t in line.split_whitespace() {
                let x = parse_real(t)
                    .ok_or_else(|| Self::err(ln, line, format!("expected {} more value(s), found '{t}'", n - out.len())))?;
                out.push(x);
            }
            if out.len() > n {
                return Err(Self::err(ln, line, format!("too many values: expected {n}")));
            }
        }
        Ok(out)
    }
}

fn parse_real(s: &str) -> Option<f64> {
    s.parse::<f64>().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Document {
        let mut d = Document::new("test");
        d.set_text("source", "unit test, with spaces");
        d.set_text("empty", "");
        d.set_int("n", -3);
        d.set_real("x", 0.1 + 0.2);
        d.set_vector("v", &[1.0, -2.5e-300, f64::MAX]);
        d.set_vector("none", &[]);
        d.set_matrix("m", &DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 1.0 / 3.0]));
        d.set_matrix("m0", &DMatrix::zeros(2, 0));
        d.set(
            "t",
            Value::Tensor4 {
                shape: [1, 2, 1, 2],
                data: vec![0.5, -0.25, 1e-17, 7.0],
            },
        );
        d
    }

    #[test]
    fn round_trip_exact() {
        let d = sample();
        let text = d.render();
        let back = Document::parse(&text).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.render(), text);
        assert_eq!(back.real("x").unwrap().to_bits(), (0.1f64 + 0.2).to_bits());
        assert_eq!(back.matrix("m").unwrap()[(1, 2)], 1.0 / 3.0);
    }

    #[test]
    fn truncated_file_is_parse_error() {
        let text = sample().render();
        let cut = &text[..text.len() / 2];
        assert!(matches!(Document::parse(cut), Err(FormatError::Parse { .. })));
        let no_end = text.trim_end().strip_suffix("end").unwrap();
        assert!(matches!(Document::parse(no_end), Err(FormatError::Parse { .. })));
    }

    #[test]
    fn version_zero_rejected() {
        let text = sample().render().replacen("rdm-text 1", "rdm-text 0", 1);
        match Document::parse(&text) {
            Err(FormatError::SchemaVersionMismatch { found }) => assert_eq!(found, "0"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "rdm-text 1\nkind m\n\nmatrix a 2 2\n 1 2\n 3 x\nend\n";
        match Document::parse(text) {
            Err(FormatError::Parse { line, context, .. }) => {
                assert_eq!(line, 6);
                assert_eq!(context, "3 x");
            }
            other => panic!("{other:?}"),
        }
        assert!(Document::parse("hello\n").is_err());
        assert!(Document::parse("rdm-text 1\nkind a\nbogus k\nend\n").is_err());
        assert!(Document::parse("rdm-text 1\nkind a\nint k 1\nint k 2\nend\n").is_err());
        assert!(Document::parse("rdm-text 1\nkind a\nvector k 1\n 1 2\nend\n").is_err());
        assert!(Document::parse("rdm-text 1\nkind a\nend\nint k 2\n").is_err());
        assert!(Document::parse("").is_err());
    }

    #[test]
    fn typed_accessors() {
        let d = sample();
        assert!(matches!(d.real("n"), Err(FormatError::WrongType { .. })));
        assert!(matches!(d.text("missing"), Err(FormatError::MissingField(_))));
        assert_eq!(d.text("empty").unwrap(), "");
        assert!(d.expect_kind("other").is_err());
    }
}
