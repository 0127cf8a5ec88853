//! Plain-text matrix files.
//!
//! ```text
//! # comment lines and blank lines are ignored
//! name = A
//! rows = 2
//! cols = 3
//! 1 1 1
//! -1 -2 3/2
//! ```
//!
//! `name` is optional. Entries are integers, `p/q` rationals or decimals;
//! one decimal anywhere makes the matrix a float matrix. [`write`] emits the
//! canonical form (no comments, single spaces), which [`parse`] reads back
//! byte for byte.

use std::fmt;

use cpdcert::linalg::{Mat, Mode, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFile {
    pub name: Option<String>,
    pub mat: Mat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, col, msg: msg.into() }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter().map(move |(s, t)| (line[..s].chars().count() + 1, t))
}

fn header<'a>(line: &'a str, n: usize, key: &str) -> Result<Option<&'a str>, ParseError> {
    let Some((k, v)) = line.split_once('=') else {
        return Ok(None);
    };
    if k.trim() != key {
        return Ok(None);
    }
    let v = v.trim();
    if v.is_empty() {
        return Err(err(n, line.len() + 1, format!("missing value for '{key}'")));
    }
    Ok(Some(v))
}

fn dimension(line: &str, n: usize, key: &str) -> Result<usize, ParseError> {
    let v = header(line, n, key)?.ok_or_else(|| err(n, 1, format!("expected '{key} = <count>'")))?;
    let col = line.find(v).map_or(1, |i| i + 1);
    match v.parse::<usize>() {
        Ok(0) => Err(err(n, col, format!("{key} must be positive"))),
        Ok(d) => Ok(d),
        Err(_) => Err(err(n, col, format!("'{v}' is not a count"))),
    }
}

pub fn parse(text: &str) -> Result<MatrixFile, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let eof = text.lines().count() + 1;

    let (mut n, mut line) = lines.next().ok_or_else(|| err(eof, 1, "empty matrix file"))?;
    let mut name = None;
    if let Some(v) = header(line, n, "name")? {
        name = Some(v.to_string());
        (n, line) = lines.next().ok_or_else(|| err(eof, 1, "expected 'rows = <count>'"))?;
    }
    let rows = dimension(line, n, "rows")?;
    let (n, line) = lines.next().ok_or_else(|| err(eof, 1, "expected 'cols = <count>'"))?;
    let cols = dimension(line, n, "cols")?;

    let mut entries = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (n, line) in lines.by_ref() {
        if seen == rows {
            return Err(err(n, 1, format!("more than {rows} rows")));
        }
        let mut count = 0;
        for (col, tok) in tokens(line) {
            count += 1;
            if count > cols {
                return Err(err(n, col, format!("more than {cols} entries in row")));
            }
            let x: Scalar = tok.parse().map_err(|e| err(n, col, format!("{e}")))?;
            entries.push(x);
        }
        if count < cols {
            return Err(err(n, line.len() + 1, format!("row has {count} entries, expected {cols}")));
        }
        seen += 1;
    }
    if seen < rows {
        return Err(err(eof, 1, format!("found {seen} rows, expected {rows}")));
    }

    let mode = if entries.iter().any(|x| x.mode() == Mode::Float) { Mode::Float } else { Mode::Exact };
    let entries = entries
        .into_iter()
        .map(|x| match (mode, x) {
            (Mode::Float, Scalar::Exact(q)) => Scalar::float(Scalar::Exact(q).to_f64()),
            (_, x) => x,
        })
        .collect();
    let mat = Mat::from_scalars(rows, cols, entries).map_err(|e| err(1, 1, e.to_string()))?;
    Ok(MatrixFile { name, mat })
}

pub fn write(file: &MatrixFile) -> String {
    let m = &file.mat;
    let mut out = String::new();
    if let Some(name) = &file.name {
        out.push_str(&format!("name = {name}\n"));
    }
    out.push_str(&format!("rows = {}\ncols = {}\n", m.rows(), m.cols()));
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| m.get(i, j).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        for text in [
            "name = A\nrows = 2\ncols = 3\n1 1 1\n-1 -2 3/2\n",
            "rows = 1\ncols = 2\n0.5 -1.0\n",
            "rows = 1\ncols = 1\n1e-7\n",
        ] {
            let f = parse(text).unwrap();
            assert_eq!(write(&f), text);
        }
    }

    #[test]
    fn comments_and_spacing() {
        let f = parse("# A\n\nrows=2\n  cols =  2\n1   2\n\n3 4\n").unwrap();
        assert_eq!(f.mat, Mat::from_rows(&[vec![1, 2], vec![3, 4]]));
        assert_eq!(f.name, None);
    }

    #[test]
    fn decimal_makes_float() {
        let f = parse("rows = 1\ncols = 2\n1 0.5\n").unwrap();
        assert_eq!(f.mat.mode(), Mode::Float);
        assert_eq!(f.mat.get(0, 0), Scalar::float(1.0));
    }

    #[test]
    fn errors_point_at_the_token() {
        let e = parse("rows = 2\ncols = 2\n1 2\n3 x\n").unwrap_err();
        assert_eq!((e.line, e.col), (4, 3));
        let e = parse("rows = 2\ncols = 2\n1 2 3\n").unwrap_err();
        assert_eq!((e.line, e.col), (3, 5));
        let e = parse("rows = 2\ncols = 2\n1 2\n").unwrap_err();
        assert_eq!(e.line, 4);
        assert!(e.msg.contains("found 1 rows"));
        let e = parse("rows = two\n").unwrap_err();
        assert_eq!((e.line, e.col), (1, 8));
        let e = parse("cols = 2\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(parse("rows = 1\ncols = 1\n1/0\n").is_err());
    }
}
