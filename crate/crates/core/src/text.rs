//! Plain-text matrix format.
//!
//! ```text
//! # comment lines start with '#'
//! 3
//! 1.0 2.0 3.0
//! 0.5 0.25
//! ```
//!
//! Line 1 is `N`, line 2 holds the `N` values of `q`, line 3 the `N-1` values
//! of `e` (absent or empty when `N = 1`).

use std::fmt::Write as _;

use crate::error::Error;
use crate::matrix::BidiagonalMatrix;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    /// 1-based; 0 when the problem is the input as a whole.
    pub line: usize,
    /// 1-based.
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

/// Numbers on one line, each with its 1-based column.
fn fields(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let base = line.as_ptr() as usize;
    line.split_whitespace()
        .map(move |tok| (tok.as_ptr() as usize - base + 1, tok))
}

fn parse_reals(line_no: usize, line: &str) -> Result<Vec<(usize, f64)>, ParseError> {
    fields(line)
        .map(|(col, tok)| {
            tok.parse::<f64>()
                .map(|x| (col, x))
                .map_err(|_| ParseError::new(line_no, col, format!("not a number: {tok:?}")))
        })
        .collect()
}

fn validation(line: usize, column: usize, err: Error) -> ParseError {
    ParseError::new(line, column, err.to_string())
}

pub fn parse_matrix(text: &str) -> Result<BidiagonalMatrix, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l))
        .filter(|(_, l)| !l.trim_start().starts_with('#'));

    let (n_line, n_text) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| ParseError::new(0, 0, "empty input: expected N on the first line"))?;
    let mut n_fields = fields(n_text);
    let (n_col, n_tok) = n_fields.next().expect("line is not blank");
    let n: usize = n_tok.parse().map_err(|_| {
        ParseError::new(
            n_line,
            n_col,
            format!("N must be a positive integer, got {n_tok:?}"),
        )
    })?;
    if n == 0 {
        return Err(ParseError::new(n_line, n_col, "N must be at least 1"));
    }
    if let Some((col, tok)) = n_fields.next() {
        return Err(ParseError::new(
            n_line,
            col,
            format!("unexpected {tok:?} after N"),
        ));
    }

    let (q_line, q_text) = lines.next().ok_or_else(|| {
        ParseError::new(
            n_line + 1,
            1,
            format!("missing q line: expected {n} values"),
        )
    })?;
    let q = parse_reals(q_line, q_text)?;
    if q.len() != n {
        let col = q.get(n).map_or(q_text.len() + 1, |(c, _)| *c);
        return Err(ParseError::new(
            q_line,
            col,
            format!("q must have exactly N = {n} values, found {}", q.len()),
        ));
    }

    let (e_line, e) = match lines.next() {
        Some((k, l)) => (k, parse_reals(k, l)?),
        None => (q_line + 1, Vec::new()),
    };
    if e.len() != n - 1 {
        let col = e.get(n - 1).map_or(1, |(c, _)| *c);
        return Err(ParseError::new(
            e_line,
            col,
            format!(
                "e must have exactly N - 1 = {} values, found {}",
                n - 1,
                e.len()
            ),
        ));
    }
    if let Some((k, l)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        let col = fields(l).next().map_or(1, |(c, _)| c);
        return Err(ParseError::new(
            k,
            col,
            "unexpected content after the e line",
        ));
    }

    let qv: Vec<f64> = q.iter().map(|(_, x)| *x).collect();
    let ev: Vec<f64> = e.iter().map(|(_, x)| *x).collect();
    BidiagonalMatrix::new(qv, ev).map_err(|err| match err {
        Error::NonPositiveEntry {
            sequence, index, ..
        }
        | Error::NonFiniteEntry { sequence, index } => {
            let (line, cols) = match sequence {
                crate::error::Sequence::Q => (q_line, &q),
                crate::error::Sequence::E => (e_line, &e),
            };
            validation(line, cols[index - 1].0, err)
        }
        other => validation(0, 0, other),
    })
}

/// `"q1,q2,...;e1,e2,..."`; the `;e` part may be omitted for `N = 1`.
pub fn parse_inline(spec: &str) -> Result<BidiagonalMatrix, ParseError> {
    let (q_part, e_part) = match spec.split_once(';') {
        Some((q, e)) => (q, e),
        None => (spec, ""),
    };
    let list = |part: &str, offset: usize| -> Result<Vec<f64>, ParseError> {
        if part.trim().is_empty() {
            return Ok(Vec::new());
        }
        let mut col = offset + 1;
        part.split(',')
            .map(|tok| {
                let at = col;
                col += tok.len() + 1;
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| ParseError::new(1, at, format!("not a number: {:?}", tok.trim())))
            })
            .collect()
    };
    let q = list(q_part, 0)?;
    let e = list(e_part, q_part.len() + 1)?;
    if q.is_empty() {
        return Err(ParseError::new(1, 1, "q must have at least one value"));
    }
    if e.len() + 1 != q.len() {
        return Err(ParseError::new(
            1,
            q_part.len() + 2,
            format!(
                "e must have exactly N - 1 = {} values, found {}",
                q.len() - 1,
                e.len()
            ),
        ));
    }
    BidiagonalMatrix::new(q, e).map_err(|err| validation(1, 1, err))
}

/// Renders `b` in the text format with shortest round-trip numbers.
pub fn write_matrix(b: &BidiagonalMatrix) -> String {
    let mut out = String::new();
    let join = |xs: &[f64]| {
        xs.iter()
            .map(|x| format!("{x:?}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    writeln!(out, "{}", b.n()).unwrap();
    writeln!(out, "{}", join(b.q())).unwrap();
    writeln!(out, "{}", join(b.e())).unwrap();
    out
}
