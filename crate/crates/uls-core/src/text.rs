//! Plain-text serialization for matrices and transforms.
//!
//! The formats are line-oriented and locale-independent:
//!
//! * Complex tokens are `a`, `a+bi`, `a-bi`, or `bi` with decimal or
//!   scientific coefficients (`2`, `-0.5i`, `1e-3+2.5e2i`). Only the `i`
//!   suffix marks an imaginary part. Serialization emits 17 significant
//!   digits, which round-trips every finite `f64` exactly.
//! * Matrices start with a header line `complex-matrix <rows> <cols>`
//!   followed by one line per row of whitespace-separated tokens.
//! * Transforms serialize as one line each:
//!   `perm <m> : i0 i1 ... i_{m-1}` (the image of each index),
//!   `diag <m> : d0 d1 ... d_{m-1}`,
//!   `scalar <m> : c`, and
//!   `matrix <m> : e00 e01 ... e_{m-1,m-1}` (row-major dense entries).
//!
//! Parse failures report a 1-based line and column pointing at the offending
//! token; header/shape mismatches report dimension errors. Blank lines are
//! ignored everywhere.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::transform::{Permutation, TransformSpec};

/// Formats one complex number as a parseable token with 17 significant
/// digits per component.
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format_f64(z.re)
    } else if z.re == 0.0 {
        format!("{}i", format_f64(z.im))
    } else if z.im < 0.0 {
        format!("{}-{}i", format_f64(z.re), format_f64(-z.im))
    } else {
        format!("{}+{}i", format_f64(z.re), format_f64(z.im))
    }
}

fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Parses one complex token; see the module docs for the accepted forms.
pub fn parse_complex(token: &str) -> Result<Complex64> {
    parse_complex_token(token).map_err(|msg| Error::parse(1, 1, msg))
}

fn parse_complex_token(token: &str) -> std::result::Result<Complex64, String> {
    if let Some(body) = token.strip_suffix('i') {
        match split_at_separator(body) {
            SeparatorSplit::None => Ok(Complex64::new(0.0, parse_coefficient(body)?)),
            SeparatorSplit::One(re_part, im_part) => Ok(Complex64::new(
                parse_coefficient(re_part)?,
                parse_coefficient(im_part)?,
            )),
            SeparatorSplit::Many => {
                Err(format!("token `{token}` has more than one sign separator"))
            }
        }
    } else {
        match split_at_separator(token) {
            SeparatorSplit::None => Ok(Complex64::new(parse_coefficient(token)?, 0.0)),
            _ => Err(format!(
                "token `{token}` mixes real and imaginary parts but does not \
                 end in `i` (only the `i` suffix is accepted)"
            )),
        }
    }
}

enum SeparatorSplit<'a> {
    None,
    One(&'a str, &'a str),
    Many,
}

/// Finds the `+`/`-` that separates real from imaginary coefficient: any
/// sign after the first character that is not part of an exponent.
fn split_at_separator(body: &str) -> SeparatorSplit<'_> {
    let bytes = body.as_bytes();
    let mut found = None;
    for k in 1..bytes.len() {
        if (bytes[k] == b'+' || bytes[k] == b'-')
            && bytes[k - 1] != b'e'
            && bytes[k - 1] != b'E'
        {
            if found.is_some() {
                return SeparatorSplit::Many;
            }
            found = Some(k);
        }
    }
    match found {
        Some(k) => SeparatorSplit::One(&body[..k], &body[k..]),
        None => SeparatorSplit::None,
    }
}

fn parse_coefficient(s: &str) -> std::result::Result<f64, String> {
    if s.is_empty() || s == "+" || s == "-" {
        return Err("coefficient is empty".to_string());
    }
    let value: f64 = s
        .parse()
        .map_err(|_| format!("`{s}` is not a decimal number"))?;
    if !value.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(value)
}

/// `(1-based column, token)` pairs for one line, split on whitespace.
fn tokens_with_columns(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

/// `(1-based line number, line)` for every line with content.
fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| (i + 1, line))
        .collect()
}

/// Serializes a matrix in the `complex-matrix` format (trailing newline
/// included).
pub fn format_complex_matrix(m: &Matrix) -> String {
    let mut out = format!("complex-matrix {} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|j| format_complex(m.get(i, j)))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parses the `complex-matrix` format produced by [`format_complex_matrix`].
pub fn parse_complex_matrix(text: &str) -> Result<Matrix> {
    let lines = content_lines(text);
    let Some(&(header_no, header)) = lines.first() else {
        return Err(Error::parse(1, 1, "empty input, expected a matrix header"));
    };
    let header_tokens = tokens_with_columns(header);
    if header_tokens[0].1 != "complex-matrix" {
        return Err(Error::parse(
            header_no,
            header_tokens[0].0,
            format!(
                "expected header `complex-matrix <rows> <cols>`, found `{}`",
                header_tokens[0].1
            ),
        ));
    }
    if header_tokens.len() != 3 {
        return Err(Error::parse(
            header_no,
            header_tokens.last().map_or(1, |t| t.0),
            "header must be `complex-matrix <rows> <cols>`",
        ));
    }
    let rows = parse_count(header_no, header_tokens[1])?;
    let cols = parse_count(header_no, header_tokens[2])?;

    let body = &lines[1..];
    if body.len() != rows {
        return Err(Error::Dimension(format!(
            "header declares {rows} rows but {} content rows follow",
            body.len()
        )));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for &(line_no, line) in body {
        let tokens = tokens_with_columns(line);
        if tokens.len() != cols {
            return Err(Error::Dimension(format!(
                "line {line_no}: header declares {cols} columns but the row \
                 has {} tokens",
                tokens.len()
            )));
        }
        for (col, token) in tokens {
            entries.push(
                parse_complex_token(token)
                    .map_err(|msg| Error::parse(line_no, col, msg))?,
            );
        }
    }
    Matrix::new(rows, cols, entries)
}

fn parse_count(line_no: usize, (col, token): (usize, &str)) -> Result<usize> {
    let value: usize = token.parse().map_err(|_| {
        Error::parse(line_no, col, format!("`{token}` is not a positive size"))
    })?;
    if value == 0 {
        return Err(Error::parse(line_no, col, "size must be positive"));
    }
    Ok(value)
}

/// Serializes one transform on one line; see the module docs for the forms.
pub fn format_transform(t: &TransformSpec) -> String {
    match t {
        TransformSpec::Permutation(p) => {
            let images: Vec<String> =
                (0..p.len()).map(|i| p.image_of(i).to_string()).collect();
            format!("perm {} : {}", p.len(), images.join(" "))
        }
        TransformSpec::Diagonal(d) => {
            let entries: Vec<String> =
                d.iter().map(|z| format_complex(*z)).collect();
            format!("diag {} : {}", d.len(), entries.join(" "))
        }
        TransformSpec::ScalarIdentity { factor, size } => {
            format!("scalar {size} : {}", format_complex(*factor))
        }
        TransformSpec::Explicit(m) => {
            let entries: Vec<String> = (0..m.rows())
                .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
                .map(|(i, j)| format_complex(m.get(i, j)))
                .collect();
            format!("matrix {} : {}", m.rows(), entries.join(" "))
        }
    }
}

/// Parses one serialized transform line.
pub fn parse_transform_line(line: &str, line_no: usize) -> Result<TransformSpec> {
    let tokens = tokens_with_columns(line);
    if tokens.len() < 3 || tokens[2].1 != ":" {
        return Err(Error::parse(
            line_no,
            tokens.first().map_or(1, |t| t.0),
            "expected `<kind> <size> : <payload>`",
        ));
    }
    let (kind_col, kind) = tokens[0];
    let m = parse_count(line_no, tokens[1])?;
    let payload = &tokens[3..];

    let expect_payload = |expected: usize| -> Result<()> {
        if payload.len() != expected {
            return Err(Error::parse(
                line_no,
                payload.first().map_or(tokens[2].0, |t| t.0),
                format!(
                    "`{kind} {m}` needs {expected} payload tokens, found {}",
                    payload.len()
                ),
            ));
        }
        Ok(())
    };

    match kind {
        "perm" => {
            expect_payload(m)?;
            let image: Vec<usize> = payload
                .iter()
                .map(|&(col, tok)| {
                    tok.parse::<usize>().map_err(|_| {
                        Error::parse(
                            line_no,
                            col,
                            format!("`{tok}` is not a valid index"),
                        )
                    })
                })
                .collect::<Result<_>>()?;
            Ok(TransformSpec::Permutation(Permutation::new(image)?))
        }
        "diag" => {
            expect_payload(m)?;
            let entries = parse_payload_complex(payload, line_no)?;
            TransformSpec::diagonal(entries)
        }
        "scalar" => {
            expect_payload(1)?;
            let entries = parse_payload_complex(payload, line_no)?;
            TransformSpec::scalar_identity(entries[0], m)
        }
        "matrix" => {
            expect_payload(m * m)?;
            let entries = parse_payload_complex(payload, line_no)?;
            TransformSpec::explicit(Matrix::new(m, m, entries)?)
        }
        _ => Err(Error::parse(
            line_no,
            kind_col,
            format!("unknown transform kind `{kind}`"),
        )),
    }
}

fn parse_payload_complex(
    payload: &[(usize, &str)],
    line_no: usize,
) -> Result<Vec<Complex64>> {
    payload
        .iter()
        .map(|&(col, tok)| {
            parse_complex_token(tok).map_err(|msg| Error::parse(line_no, col, msg))
        })
        .collect()
}

/// Parses a transform list: one serialized transform per content line.
pub fn parse_transforms(text: &str) -> Result<Vec<TransformSpec>> {
    content_lines(text)
        .into_iter()
        .map(|(line_no, line)| parse_transform_line(line, line_no))
        .collect()
}

/// Serializes a transform list, one per line (trailing newline included).
pub fn format_transforms(transforms: &[TransformSpec]) -> String {
    let mut out = String::new();
    for t in transforms {
        out.push_str(&format_transform(t));
        out.push('\n');
    }
    out
}

/// Parses a file holding exactly one transform: either a single transform
/// line or a whole `complex-matrix` block (read as an explicit transform).
pub fn parse_transform_block(text: &str) -> Result<TransformSpec> {
    let lines = content_lines(text);
    let Some(&(first_no, first)) = lines.first() else {
        return Err(Error::parse(1, 1, "empty input, expected one transform"));
    };
    let first_tokens = tokens_with_columns(first);
    if first_tokens[0].1 == "complex-matrix" {
        return TransformSpec::explicit(parse_complex_matrix(text)?);
    }
    if lines.len() != 1 {
        return Err(Error::parse(
            lines[1].0,
            1,
            "expected exactly one transform line",
        ));
    }
    parse_transform_line(first, first_no)
}
