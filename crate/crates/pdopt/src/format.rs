//! Plain-text matrix and edge-list formats, and float rendering for CSV.
//!
//! A matrix file holds `rows cols` on its first line followed by the entries
//! in row-major order, separated by any whitespace. An edge-list file holds
//! the node count on its first line and one `i j` pair (0-indexed) per line.
//! Blank lines and `#` comments are ignored in both.

use std::fmt::Write as _;
use std::path::Path;

use pdopt_core::consensus::Graph;
use pdopt_core::DenseMatrix;

use crate::error::{PdoptError, Result};

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| PdoptError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| PdoptError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| PdoptError::io(path, e))
}

/// Tokens with their 1-based line numbers, comments stripped.
fn tokens(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().flat_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("");
        line.split_whitespace().map(move |t| (i + 1, t))
    })
}

fn parse_err(origin: &str, line: usize, message: impl Into<String>) -> PdoptError {
    PdoptError::Parse {
        origin: origin.to_string(),
        line,
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(origin: &str, line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(origin, line, format!("expected {what}, found `{tok}`")))
}

pub fn parse_matrix(text: &str, origin: &str) -> Result<DenseMatrix> {
    let mut toks = tokens(text);
    let (l, t) = toks.next().ok_or_else(|| parse_err(origin, 1, "empty matrix file"))?;
    let rows: usize = parse_num(origin, l, t, "row count")?;
    let (l, t) = toks.next().ok_or_else(|| parse_err(origin, l, "missing column count"))?;
    let cols: usize = parse_num(origin, l, t, "column count")?;
    let mut data = Vec::with_capacity(rows * cols);
    let mut last = l;
    for (l, t) in toks {
        last = l;
        data.push(parse_num::<f64>(origin, l, t, "a number")?);
    }
    if data.len() != rows * cols {
        return Err(parse_err(
            origin,
            last,
            format!("expected {} entries for a {rows}×{cols} matrix, found {}", rows * cols, data.len()),
        ));
    }
    Ok(DenseMatrix::from_row_major(rows, cols, data)?)
}

pub fn render_matrix(m: &DenseMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| fmt_f64(*v)).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    parse_matrix(&read_text(path)?, &path.display().to_string())
}

pub fn write_matrix(path: &Path, m: &DenseMatrix) -> Result<()> {
    write_text(path, &render_matrix(m))
}

pub fn parse_edge_list(text: &str, origin: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (l, first) = lines.next().ok_or_else(|| parse_err(origin, 1, "empty edge list"))?;
    let n: usize = parse_num(origin, l, first, "node count")?;
    let mut edges = Vec::new();
    for (l, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(parse_err(origin, l, "expected `i j`"));
        }
        let i = parse_num(origin, l, parts[0], "node index")?;
        let j = parse_num(origin, l, parts[1], "node index")?;
        edges.push((i, j));
    }
    Graph::new(n, &edges).map_err(|e| parse_err(origin, l, e.to_string()))
}

pub fn render_edge_list(g: &Graph) -> String {
    let mut out = format!("{}\n", g.node_count());
    for (i, j) in g.edges() {
        let _ = writeln!(out, "{i} {j}");
    }
    out
}

pub fn read_edge_list(path: &Path) -> Result<Graph> {
    parse_edge_list(&read_text(path)?, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip_is_exact() {
        let m = DenseMatrix::from_rows(&[&[0.1, 1.0 / 3.0, -2.5e-300], &[f64::MAX, 1e-10, -0.0]]);
        let back = parse_matrix(&render_matrix(&m), "mem").unwrap();
        for (a, b) in m.as_slice().iter().zip(back.as_slice()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn matrix_errors_carry_line() {
        let err = parse_matrix("2 2\n1 2\n3 x\n", "m.txt").unwrap_err();
        assert_eq!(err.to_string(), "m.txt:3: expected a number, found `x`");
        assert!(parse_matrix("2 2\n1 2 3\n", "m").is_err());
        assert!(parse_matrix("", "m").is_err());
    }

    #[test]
    fn edge_list() {
        let g = parse_edge_list("# ring\n3\n0 1\n1 2\n\n2 0\n", "g").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges().len(), 3);
        let back = parse_edge_list(&render_edge_list(&g), "g").unwrap();
        assert_eq!(back, g);
        assert!(parse_edge_list("2\n0 0\n", "g").is_err());
        assert!(parse_edge_list("2\n0\n", "g").is_err());
    }
}
