use std::io::Write;
use std::path::PathBuf;

use molfrag::fragmine::{decompose, fragment_tokens, FragmentVocabulary, TokenMode};
use serde::Serialize;
use serde_json::json;

use crate::input::{create, for_each_entry, open};
use crate::{log, record_rng, require_files, Failure, Global, Outcome};

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Mode {
    /// Every fragment, sorted.
    Cot,
    /// 1-3 random distinct non-hydrocarbon fragments.
    Condition,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Corpus file: SMILES with an optional tab-separated id per line.
    #[arg(long)]
    corpus: PathBuf,
    /// Vocabulary TSV.
    #[arg(long)]
    vocab: PathBuf,
    /// Output JSON lines.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Cot)]
    mode: Mode,
    /// Add single-atom fragments for elements missing from the vocabulary
    /// instead of reporting them.
    #[arg(long)]
    add_oov: bool,
    /// Where to write the vocabulary extended by --add-oov.
    #[arg(long, requires = "add_oov")]
    vocab_out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Row<'a> {
    line: usize,
    id: &'a str,
    smiles: String,
    tokens: Vec<String>,
    pieces: Vec<Vec<usize>>,
}

#[derive(Serialize)]
struct ErrorRow<'a> {
    line: usize,
    id: &'a str,
    input: &'a str,
    error: String,
}

/// Unparseable and out-of-vocabulary lines become error records; they
/// never stop the run.
pub fn run(args: &Args, global: Global) -> Outcome {
    require_files([&args.corpus, &args.vocab])?;
    let mut vocab = FragmentVocabulary::read_tsv(open(&args.vocab)?)?;
    if args.add_oov {
        let before = vocab.len();
        for_each_entry(
            &args.corpus,
            |p| p.mol.ok(),
            |mol| {
                if let Some(mol) = mol {
                    vocab.add_single_atoms(&mol);
                }
                Ok(())
            },
        )?;
        log::info("oov_added", json!({ "added": vocab.len() - before }));
        if let Some(path) = &args.vocab_out {
            vocab.write_tsv(create(path)?)?;
        }
    }
    let mode = match args.mode {
        Mode::Cot => TokenMode::Cot,
        Mode::Condition => TokenMode::Condition,
    };
    let mut w = create(&args.out)?;
    let (mut ok, mut failed) = (0usize, 0usize);
    for_each_entry(
        &args.corpus,
        |p| {
            let e = &p.entry;
            let result = p.mol.map_err(|e| e.to_string()).and_then(|mol| {
                let d = decompose(&mol, &vocab).map_err(|e| e.to_string())?;
                let mut rng = record_rng(global.seed, e.line as u64);
                let row = Row {
                    line: e.line,
                    id: &e.id,
                    smiles: mol.canonical_smiles(),
                    tokens: fragment_tokens(&d, mode, &mut rng),
                    pieces: d.pieces.into_iter().map(|p| p.atoms).collect(),
                };
                Ok(serde_json::to_string(&row).expect("rows serialize"))
            });
            match result {
                Ok(json) => Ok(json),
                Err(error) => Err(serde_json::to_string(&ErrorRow {
                    line: e.line,
                    id: &e.id,
                    input: &e.smiles,
                    error,
                })
                .expect("rows serialize")),
            }
        },
        |row| {
            match &row {
                Ok(_) => ok += 1,
                Err(_) => failed += 1,
            }
            writeln!(w, "{}", row.unwrap_or_else(|e| e)).map_err(Failure::from)
        },
    )?;
    w.flush()?;
    log::info("tokenized", json!({ "molecules": ok, "errors": failed }));
    Ok(())
}
