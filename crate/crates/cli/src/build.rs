use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::PathBuf;

use molfrag::dataset::{
    build_record, read_exclusions, read_properties, read_texts, DatasetError, PropertyValue, RecordInput, Task,
    TextFields,
};
use molfrag::fragmine::FragmentVocabulary;
use serde_json::json;

use crate::input::{create, for_each_entry, open, BadLines};
use crate::{log, record_rng, require_files, Failure, Global, Outcome};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Corpus file: SMILES with an optional tab-separated id per line.
    #[arg(long)]
    corpus: PathBuf,
    /// Vocabulary TSV.
    #[arg(long)]
    vocab: PathBuf,
    /// One of captioning, general_qa, property_qa, affinity_prediction,
    /// desc_gen, ligand_gen, reverse_design.
    #[arg(long)]
    task: String,
    /// Output JSON lines.
    #[arg(long)]
    out: PathBuf,
    /// Property TSV: id, kind, value.
    #[arg(long)]
    props: Option<PathBuf>,
    /// Text TSV: id, field (description|question|answer), text.
    #[arg(long)]
    texts: Option<PathBuf>,
    /// SMILES to leave out of the dataset, one per line.
    #[arg(long)]
    exclude: Option<PathBuf>,
}

enum Built {
    Record(String),
    Excluded,
    Skipped { line: usize, id: String, reason: String },
    Bad { line: usize, input: String, error: String },
}

/// Molecules lacking what the task needs are skipped with a warning; parse
/// and decomposition failures count against --max-bad-lines.
pub fn run(args: &Args, global: Global) -> Outcome {
    let task: Task = args
        .task
        .parse()
        .map_err(|e: DatasetError| Failure::usage(e.to_string()))?;
    require_files(
        [&args.corpus, &args.vocab]
            .into_iter()
            .chain(&args.props)
            .chain(&args.texts)
            .chain(&args.exclude),
    )?;
    let vocab = FragmentVocabulary::read_tsv(open(&args.vocab)?)?;
    let props: BTreeMap<String, Vec<PropertyValue>> = match &args.props {
        Some(p) => read_properties(open(p)?)?,
        None => BTreeMap::new(),
    };
    let texts: BTreeMap<String, TextFields> = match &args.texts {
        Some(p) => read_texts(open(p)?)?,
        None => BTreeMap::new(),
    };
    let exclude: BTreeSet<String> = match &args.exclude {
        Some(p) => read_exclusions(open(p)?)?,
        None => BTreeSet::new(),
    };
    let no_text = TextFields::default();

    let mut w = create(&args.out)?;
    let mut bad = BadLines::new(global.max_bad_lines);
    let (mut written, mut excluded, mut skipped) = (0usize, 0usize, 0usize);
    for_each_entry(
        &args.corpus,
        |p| {
            let e = p.entry;
            let mol = match p.mol {
                Ok(m) => m,
                Err(err) => {
                    return Built::Bad {
                        line: e.line,
                        input: e.smiles,
                        error: err.to_string(),
                    }
                }
            };
            if exclude.contains(&mol.canonical_smiles()) {
                return Built::Excluded;
            }
            let text = texts.get(&e.id).unwrap_or(&no_text);
            let input = RecordInput {
                props: props.get(&e.id).map_or(&[], Vec::as_slice),
                description: text.description.as_deref(),
                question: text.question.as_deref(),
                answer: text.answer.as_deref(),
                ..RecordInput::new(&e.id, &mol)
            };
            let mut rng = record_rng(global.seed, e.line as u64);
            match build_record(&input, task, &vocab, &mut rng) {
                Ok(r) => Built::Record(r.to_json()),
                Err(err @ DatasetError::MissingInput { .. }) => Built::Skipped {
                    line: e.line,
                    id: e.id.clone(),
                    reason: err.to_string(),
                },
                Err(err) => Built::Bad {
                    line: e.line,
                    input: e.smiles,
                    error: err.to_string(),
                },
            }
        },
        |built| {
            match built {
                Built::Record(json) => {
                    writeln!(w, "{json}")?;
                    written += 1;
                }
                Built::Excluded => excluded += 1,
                Built::Skipped { line, id, reason } => {
                    skipped += 1;
                    log::warn("record_skipped", json!({ "line": line, "id": id, "message": reason }));
                }
                Built::Bad { line, input, error } => bad.record(line, &input, &error)?,
            }
            Ok(())
        },
    )?;
    w.flush()?;
    log::info(
        "dataset_written",
        json!({
            "task": task.name(),
            "records": written,
            "excluded": excluded,
            "skipped": skipped,
            "bad_lines": bad.count,
        }),
    );
    Ok(())
}
