//! Corpus files: UTF-8, one SMILES per line with an optional tab-separated
//! id column. Blank lines and lines starting with `#` are skipped.

use std::io::{self, BufRead};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    /// 1-based line number in the source file.
    pub line: usize,
    pub id: String,
    pub smiles: String,
}

/// Parses one corpus line; `None` for comments and blank lines. Entries
/// without an id column are named after their line number.
pub fn parse_line(line_no: usize, line: &str) -> Option<CorpusEntry> {
    let line = line.trim_end_matches(['\r', '\n']);
    if line.trim().is_empty() || line.starts_with('#') {
        return None;
    }
    let mut cols = line.splitn(3, '\t');
    let smiles = cols.next().unwrap_or("").trim().to_string();
    let id = match cols.next().map(str::trim) {
        Some(id) if !id.is_empty() => id.to_string(),
        _ => line_no.to_string(),
    };
    Some(CorpusEntry {
        line: line_no,
        id,
        smiles,
    })
}

/// Streams the entries of a corpus.
pub fn read_entries<R: BufRead>(reader: R) -> impl Iterator<Item = io::Result<CorpusEntry>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Ok(line) => parse_line(i + 1, &line).map(Ok),
        Err(e) => Some(Err(e)),
    })
}
