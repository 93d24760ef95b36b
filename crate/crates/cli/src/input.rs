//! Corpus reading with bad-line accounting, and ordered parallel
//! processing over chunks of input lines.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use molfrag::fingerprint::{morgan_fingerprint, DEFAULT_NBITS, DEFAULT_RADIUS};
use molfrag::molgraph::corpus::{read_entries, CorpusEntry};
use molfrag::molgraph::{parse_smiles, MolError, Molecule};
use rayon::prelude::*;
use serde_json::json;

use crate::{log, require_files, Failure, Global, Outcome};

const CHUNK: usize = 4096;

pub fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

pub fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Counts unparseable lines and fails once more than the allowed number
/// have been seen.
pub struct BadLines {
    limit: usize,
    pub count: usize,
}

impl BadLines {
    pub fn new(limit: usize) -> BadLines {
        BadLines { limit, count: 0 }
    }

    pub fn record(&mut self, line: usize, what: &str, err: &dyn std::fmt::Display) -> Outcome {
        self.count += 1;
        log::warn(
            "bad_line",
            json!({ "line": line, "input": what, "message": err.to_string() }),
        );
        if self.count > self.limit {
            return Err(
                anyhow::anyhow!("{} unparseable lines exceed --max-bad-lines {}", self.count, self.limit).into(),
            );
        }
        Ok(())
    }
}

/// A corpus entry and its parse result.
pub struct Parsed {
    pub entry: CorpusEntry,
    pub mol: Result<Molecule, MolError>,
}

/// Streams `path` in chunks, runs `work` on every entry in parallel and
/// hands the results to `sink` in input order.
pub fn for_each_entry<T, W, S>(path: &Path, work: W, mut sink: S) -> Outcome
where
    T: Send,
    W: Fn(Parsed) -> T + Sync,
    S: FnMut(T) -> Outcome,
{
    let mut entries = read_entries(open(path)?);
    loop {
        let chunk: Vec<CorpusEntry> = entries.by_ref().take(CHUNK).collect::<Result<_, _>>()?;
        if chunk.is_empty() {
            return Ok(());
        }
        let out: Vec<T> = chunk
            .into_par_iter()
            .map(|entry| {
                let mol = parse_smiles(&entry.smiles);
                work(Parsed { entry, mol })
            })
            .collect();
        for item in out {
            sink(item)?;
        }
    }
}

/// Every parseable molecule of a corpus, in file order.
pub fn load_corpus(path: &Path, global: Global) -> Result<Vec<(CorpusEntry, Molecule)>, Failure> {
    let mut bad = BadLines::new(global.max_bad_lines);
    let mut out = Vec::new();
    for_each_entry(
        path,
        |p| p,
        |p| {
            match p.mol {
                Ok(mol) => out.push((p.entry, mol)),
                Err(e) => bad.record(p.entry.line, &p.entry.smiles, &e)?,
            }
            Ok(())
        },
    )?;
    log::info(
        "corpus_loaded",
        json!({ "path": path.display().to_string(), "molecules": out.len(), "bad_lines": bad.count }),
    );
    Ok(out)
}

#[derive(Debug, clap::Args)]
pub struct FingerprintArgs {
    /// Corpus file: SMILES with an optional tab-separated id per line.
    #[arg(long)]
    corpus: PathBuf,
    /// Output dump, one `id<TAB>hex` line per molecule.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    radius: u32,
    #[arg(long, default_value_t = DEFAULT_NBITS)]
    nbits: usize,
}

pub fn fingerprint(args: &FingerprintArgs, global: Global) -> Outcome {
    require_files([&args.corpus])?;
    if args.nbits == 0 {
        return Err(Failure::usage("--nbits must be positive"));
    }
    let mut w = create(&args.out)?;
    let mut bad = BadLines::new(global.max_bad_lines);
    let mut written = 0usize;
    for_each_entry(
        &args.corpus,
        |p| {
            (
                p.entry,
                p.mol.map(|m| morgan_fingerprint(&m, args.radius, args.nbits).to_hex()),
            )
        },
        |(entry, hex)| {
            match hex {
                Ok(hex) => {
                    writeln!(w, "{}\t{hex}", entry.id)?;
                    written += 1;
                }
                Err(e) => bad.record(entry.line, &entry.smiles, &e)?,
            }
            Ok(())
        },
    )?;
    w.flush()?;
    log::info(
        "fingerprints_written",
        json!({ "count": written, "bad_lines": bad.count }),
    );
    Ok(())
}
