use std::path::PathBuf;
use std::time::Instant;

use molfrag::fragmine::{mine_vocabulary_with, FragError};
use molfrag::molgraph::Molecule;
use serde_json::json;

use crate::input::{create, load_corpus};
use crate::{log, require_files, Failure, Global, Outcome};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Corpus file: SMILES with an optional tab-separated id per line.
    #[arg(long)]
    corpus: PathBuf,
    /// Vocabulary size, single-atom seeds included.
    #[arg(short, long)]
    n: usize,
    /// Output vocabulary TSV.
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: &Args, global: Global) -> Outcome {
    require_files([&args.corpus])?;
    let corpus: Vec<Molecule> = load_corpus(&args.corpus, global)?.into_iter().map(|(_, m)| m).collect();
    let start = Instant::now();
    let result = mine_vocabulary_with(&corpus, args.n, |m| {
        log::info(
            "merge",
            json!({
                "iteration": m.iteration,
                "canon": m.canon,
                "frequency": m.frequency,
                "atoms": m.atom_count,
                "elapsed_ms": start.elapsed().as_millis() as u64,
            }),
        );
    });
    let result = match result {
        Ok(r) => r,
        Err(e @ FragError::TargetBelowSeed { .. }) => return Err(Failure::usage(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    if !result.target_reached {
        log::warn(
            "target_not_reached",
            json!({ "requested": args.n, "size": result.vocabulary.len() }),
        );
    }
    let mut w = create(&args.out)?;
    result.vocabulary.write_tsv(&mut w)?;
    log::info(
        "vocabulary_written",
        json!({
            "path": args.out.display().to_string(),
            "size": result.vocabulary.len(),
            "single_atoms": result.vocabulary.n_atom(),
            "elapsed_ms": start.elapsed().as_millis() as u64,
        }),
    );
    Ok(())
}
