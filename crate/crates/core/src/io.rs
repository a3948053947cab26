//! Text formats: one tuple per line, members separated by `|`, rows by `,`,
//! symbols `0-9` then `a-z`.

use std::io::BufRead;

use crate::error::{MolrError, Result};
use crate::rect::Rectangle;
use crate::tuple::Tuple;

const ALPHABET: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

pub fn symbol_char(x: u8) -> char {
    ALPHABET[x as usize] as char
}

fn symbol_value(ch: u8) -> Option<u8> {
    match ch {
        b'0'..=b'9' => Some(ch - b'0'),
        b'a'..=b'z' => Some(ch - b'a' + 10),
        _ => None,
    }
}

pub fn format_row(row: &[u8], out: &mut String) {
    out.extend(row.iter().map(|&x| symbol_char(x)));
}

pub fn format_rectangle(rect: &Rectangle) -> String {
    let mut out = String::with_capacity(rect.k() * (rect.n() + 1));
    for (r, row) in rect.rows().enumerate() {
        if r > 0 {
            out.push(',');
        }
        format_row(row, &mut out);
    }
    out
}

pub fn format_tuple(tuple: &Tuple) -> String {
    let (t, k, n) = tuple.shape();
    let mut out = String::with_capacity(t * k * (n + 1));
    for s in 0..t {
        if s > 0 {
            out.push('|');
        }
        for r in 0..k {
            if r > 0 {
                out.push(',');
            }
            format_row(tuple.row(r, s), &mut out);
        }
    }
    out
}

/// Parses and fully validates one tuple line.
pub fn parse_tuple(line: &str) -> Result<Tuple> {
    parse_tuple_at(line, 1)
}

/// As [`parse_tuple`], reporting `line_no` in diagnostics.
pub fn parse_tuple_at(line: &str, line_no: usize) -> Result<Tuple> {
    let syntax = |col: usize, msg: String| MolrError::Syntax {
        line: line_no,
        col,
        msg,
    };
    let bytes = line.trim_end_matches(['\r', '\n']).as_bytes();
    if bytes.is_empty() {
        return Err(syntax(1, "empty line".into()));
    }
    let mut members: Vec<Vec<Vec<u8>>> = vec![vec![vec![]]];
    for (i, &ch) in bytes.iter().enumerate() {
        let col = i + 1;
        match ch {
            b'|' => {
                check_row_nonempty(&members, col, &syntax)?;
                members.push(vec![vec![]]);
            }
            b',' => {
                check_row_nonempty(&members, col, &syntax)?;
                members.last_mut().unwrap().push(vec![]);
            }
            _ => {
                let x = symbol_value(ch).ok_or_else(|| {
                    syntax(col, format!("unexpected character {:?}", ch as char))
                })?;
                members.last_mut().unwrap().last_mut().unwrap().push(x);
            }
        }
    }
    check_row_nonempty(&members, bytes.len() + 1, &syntax)?;

    let k = members[0].len();
    let n = members[0][0].len();
    if n > crate::MAX_ORDER {
        return Err(syntax(1, format!("rows of length {n} exceed the limit {}", crate::MAX_ORDER)));
    }
    for (s, m) in members.iter().enumerate() {
        if m.len() != k {
            return Err(syntax(1, format!("member {} has {} rows, expected {k}", s + 1, m.len())));
        }
        for (r, row) in m.iter().enumerate() {
            if row.len() != n {
                return Err(syntax(
                    1,
                    format!("member {} row {} has length {}, expected {n}", s + 1, r + 1, row.len()),
                ));
            }
            if let Some(&x) = row.iter().find(|&&x| x as usize >= n) {
                return Err(syntax(
                    1,
                    format!("member {} row {} uses symbol {} outside 0..{n}", s + 1, r + 1, symbol_char(x)),
                ));
            }
        }
    }
    if k > n {
        return Err(syntax(1, format!("{k} rows exceed row length {n}")));
    }
    let t = members.len();
    let mut cells = Vec::with_capacity(t * k * n);
    for r in 0..k {
        for m in &members {
            cells.extend_from_slice(&m[r]);
        }
    }
    Tuple::from_cells(t, k, n, cells)
}

fn check_row_nonempty(
    members: &[Vec<Vec<u8>>],
    col: usize,
    syntax: &impl Fn(usize, String) -> MolrError,
) -> Result<()> {
    if members.last().unwrap().last().unwrap().is_empty() {
        return Err(syntax(col, "empty row".into()));
    }
    Ok(())
}

/// Reads every non-blank, non-`#` line of `reader` as a tuple.
pub fn read_tuples(reader: impl BufRead) -> Result<Vec<Tuple>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| MolrError::Input(e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push(parse_tuple_at(trimmed, i + 1)?);
    }
    Ok(out)
}
