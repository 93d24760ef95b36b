//! Dense matrix text formats: a `key=value` header line, then one row of
//! space-separated decimals per line. Values are written in shortest
//! round-trip form, so files read back bit-identical.

use std::io::{BufRead, Write};

use super::{EmbeddingMatrix, SimError, SimilarityMatrix};

fn write_rows<W: Write>(w: &mut W, cols: usize, values: &[f64]) -> std::io::Result<()> {
    for row in values.chunks(cols.max(1)) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

fn parse_header(line: &str, keys: &[&str]) -> Option<Vec<usize>> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != keys.len() {
        return None;
    }
    keys.iter()
        .zip(fields)
        .map(|(k, f)| f.strip_prefix(k)?.strip_prefix('=')?.parse().ok())
        .collect()
}

fn read_body<R: BufRead>(r: R, keys: &[&str]) -> Result<(Vec<usize>, Vec<f64>), SimError> {
    let mut lines = r.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    let dims = parse_header(&header, keys).ok_or_else(|| SimError::Format {
        line: 1,
        msg: format!(
            "expected header {}",
            keys.iter().map(|k| format!("{k}=<int>")).collect::<Vec<_>>().join(" ")
        ),
    })?;
    let (rows, cols) = if dims.len() == 1 {
        (dims[0], dims[0])
    } else {
        (dims[0], dims[1])
    };
    let mut values = Vec::with_capacity(rows * cols);
    let mut seen_rows = 0;
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| SimError::Format { line: i + 2, msg };
        let row = line
            .split_whitespace()
            .map(str::parse::<f64>)
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| err(e.to_string()))?;
        if row.len() != cols {
            return Err(err(format!("expected {cols} values, found {}", row.len())));
        }
        values.extend(row);
        seen_rows += 1;
    }
    if seen_rows != rows {
        return Err(SimError::Format {
            line: 1,
            msg: format!("header announces {rows} rows, file has {seen_rows}"),
        });
    }
    Ok((dims, values))
}

/// `n=<n>` header, then n rows.
pub fn write_dense_matrix<W: Write>(mut w: W, m: &SimilarityMatrix) -> std::io::Result<()> {
    writeln!(w, "n={}", m.n())?;
    write_rows(&mut w, m.n(), m.values())?;
    w.flush()
}

pub fn read_dense_matrix<R: BufRead>(r: R, label: &str) -> Result<SimilarityMatrix, SimError> {
    let (dims, values) = read_body(r, &["n"])?;
    SimilarityMatrix::from_values(dims[0], values, label)
}

/// `rows=<r> cols=<c>` header, then r rows.
pub fn write_embedding_matrix<W: Write>(mut w: W, m: &EmbeddingMatrix) -> std::io::Result<()> {
    writeln!(w, "rows={} cols={}", m.rows(), m.cols())?;
    write_rows(&mut w, m.cols(), m.values())?;
    w.flush()
}

pub fn read_embedding_matrix<R: BufRead>(r: R) -> Result<EmbeddingMatrix, SimError> {
    let (dims, values) = read_body(r, &["rows", "cols"])?;
    EmbeddingMatrix::new(dims[0], dims[1], values)
}
