use std::io::{BufRead, Write};
use std::path::PathBuf;

use molfrag::evalmetrics::{
    cot_consistency, evaluate, fragment_satisfaction, parse_cot, BleuTokenizer, EvalOptions, GenerationPair,
    InvalidPolicy,
};
use molfrag::fragmine::FragmentVocabulary;
use serde_json::json;

use crate::input::{create, open, BadLines};
use crate::{log, require_files, Failure, Global, Outcome};

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Tokenizer {
    Char,
    Atom,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// TSV of `generated<TAB>reference[<TAB>required fragments]`, fragments
    /// space-separated. A generated text may start with `<|..|>` tokens.
    #[arg(long)]
    pairs: PathBuf,
    /// Output report (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Also write the one-row summary table here.
    #[arg(long)]
    tsv: Option<PathBuf>,
    /// Vocabulary for fragment-chain precision and recall.
    #[arg(long)]
    vocab: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Tokenizer::Char)]
    tokenizer: Tokenizer,
    /// Leave invalid generations out of Morgan FTS instead of scoring 0.
    #[arg(long)]
    drop_invalid: bool,
    /// Levenshtein on canonical SMILES where the generation parses.
    #[arg(long)]
    canonical_levenshtein: bool,
}

struct Row {
    pair: GenerationPair,
    chain: Vec<String>,
    required: Vec<String>,
}

fn read_rows(args: &Args, global: Global) -> Result<Vec<Row>, Failure> {
    let mut bad = BadLines::new(global.max_bad_lines);
    let mut rows = Vec::new();
    for (i, line) in open(&args.pairs)?.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 2 {
            bad.record(line_no, &line, &"expected generated<TAB>reference")?;
            continue;
        }
        let (chain, generated) = parse_cot(cols[0]);
        let (_, reference) = parse_cot(cols[1]);
        match GenerationPair::new(generated, reference) {
            Ok(pair) => rows.push(Row {
                pair,
                chain,
                required: cols
                    .get(2)
                    .map_or_else(Vec::new, |f| f.split_whitespace().map(str::to_string).collect()),
            }),
            Err(e) => bad.record(line_no, &line, &e)?,
        }
    }
    Ok(rows)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn run(args: &Args, global: Global) -> Outcome {
    require_files([&args.pairs].into_iter().chain(&args.vocab))?;
    let vocab = match &args.vocab {
        Some(p) => Some(FragmentVocabulary::read_tsv(open(p)?)?),
        None => None,
    };
    let rows = read_rows(args, global)?;
    let pairs: Vec<GenerationPair> = rows.iter().map(|r| r.pair.clone()).collect();
    let opts = EvalOptions {
        tokenizer: match args.tokenizer {
            Tokenizer::Char => BleuTokenizer::Character,
            Tokenizer::Atom => BleuTokenizer::AtomRegex,
        },
        invalid: if args.drop_invalid {
            InvalidPolicy::Drop
        } else {
            InvalidPolicy::Zero
        },
        canonical_levenshtein: args.canonical_levenshtein,
    };
    let mut report = evaluate(&pairs, opts)?;

    // fraction of required fragments present; invalid generations satisfy none
    let (mut hits, mut wanted) = (0usize, 0usize);
    for r in rows.iter().filter(|r| !r.required.is_empty()) {
        wanted += r.required.len();
        if let Some(mol) = r.pair.generated_mol() {
            hits += fragment_satisfaction(mol, &r.required)?;
        }
    }
    if wanted > 0 {
        report
            .metrics
            .insert("Fragment satisfaction".into(), hits as f64 / wanted as f64);
    }

    if let Some(vocab) = &vocab {
        let mut precision = Vec::new();
        let mut recall = Vec::new();
        for r in &rows {
            if let (Some(mol), false) = (r.pair.generated_mol(), r.chain.is_empty()) {
                let (p, q) = cot_consistency(&r.chain, mol, vocab)?;
                precision.push(p);
                recall.push(q);
            }
        }
        if !precision.is_empty() {
            report.metrics.insert("CoT precision".into(), mean(&precision));
            report.metrics.insert("CoT recall".into(), mean(&recall));
        }
    }

    let mut w = create(&args.out)?;
    writeln!(w, "{}", report.to_json())?;
    w.flush()?;
    if let Some(path) = &args.tsv {
        let mut w = create(path)?;
        w.write_all(report.to_tsv().as_bytes())?;
        w.flush()?;
    }
    log::info(
        "report_written",
        json!({ "pairs": report.count, "invalid": report.invalid_count }),
    );
    Ok(())
}
