//! Generation and comprehension metrics: exact match, Levenshtein, BLEU,
//! Morgan fingerprint similarity, validity, fragment satisfaction, CoT
//! consistency and property-QA scoring.

mod bleu;
mod matcher;
mod qa;

use std::collections::BTreeMap;
use std::sync::LazyLock;

use rayon::prelude::*;
use regex::Regex;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::DatasetError;
use crate::fingerprint::{morgan_fingerprint, tanimoto, DEFAULT_NBITS, DEFAULT_RADIUS};
use crate::fragmine::{decompose, FragError, Fragment, FragmentVocabulary};
use crate::molgraph::{parse_smiles, MolError, Molecule};

pub use bleu::{smiles_bleu, tokenize, BleuTokenizer};
pub use matcher::contains_subgraph;
pub use qa::{extract_numeric, high_affinity_rate, property_qa_score, QaScore};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("reference {smiles:?} does not parse: {source}")]
    InvalidReference { smiles: String, source: MolError },
    #[error("length mismatch: {0} predictions, {1} truths")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} entries, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error(transparent)]
    Fragment(#[from] FragError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// A generated string and the reference molecule it is scored against.
#[derive(Debug, Clone)]
pub struct GenerationPair {
    pub generated: String,
    pub reference: String,
    generated_mol: Option<Molecule>,
    reference_mol: Molecule,
}

impl GenerationPair {
    pub fn new(generated: impl Into<String>, reference: impl Into<String>) -> Result<GenerationPair, EvalError> {
        let (generated, reference) = (generated.into(), reference.into());
        let reference_mol = parse_smiles(&reference).map_err(|source| EvalError::InvalidReference {
            smiles: reference.clone(),
            source,
        })?;
        let generated_mol = parse_smiles(&generated).ok();
        Ok(GenerationPair {
            generated,
            reference,
            generated_mol,
            reference_mol,
        })
    }

    pub fn is_valid(&self) -> bool {
        self.generated_mol.is_some()
    }

    pub fn generated_mol(&self) -> Option<&Molecule> {
        self.generated_mol.as_ref()
    }

    pub fn reference_mol(&self) -> &Molecule {
        &self.reference_mol
    }
}

/// Same molecule after canonicalization; false for invalid output.
pub fn exact_match(pair: &GenerationPair) -> bool {
    pair.generated_mol
        .as_ref()
        .is_some_and(|g| g.canonical_smiles() == pair.reference_mol.canonical_smiles())
}

/// Unit-cost edit distance over characters.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Edit distance between the strings as written, or between canonical
/// forms when `canonical` is set and the generated side parses.
pub fn pair_levenshtein(pair: &GenerationPair, canonical: bool) -> usize {
    match (&pair.generated_mol, canonical) {
        (Some(g), true) => levenshtein(&g.canonical_smiles(), &pair.reference_mol.canonical_smiles()),
        _ => levenshtein(&pair.generated, &pair.reference),
    }
}

/// Tanimoto of default Morgan fingerprints, `None` for invalid output.
pub fn pair_fts(pair: &GenerationPair) -> Option<f64> {
    let g = pair.generated_mol.as_ref()?;
    let fg = morgan_fingerprint(g, DEFAULT_RADIUS, DEFAULT_NBITS);
    let fr = morgan_fingerprint(&pair.reference_mol, DEFAULT_RADIUS, DEFAULT_NBITS);
    Some(tanimoto(&fg, &fr).expect("equal fingerprint lengths"))
}

/// What invalid generations contribute to the fingerprint similarity mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InvalidPolicy {
    /// Count as similarity 0.
    #[default]
    Zero,
    /// Leave out of the mean.
    Drop,
}

/// Mean Morgan Tanimoto and the number of invalid generations.
pub fn fingerprint_fts(pairs: &[GenerationPair], policy: InvalidPolicy) -> (f64, usize) {
    let scores: Vec<Option<f64>> = pairs.par_iter().map(pair_fts).collect();
    let invalid = scores.iter().filter(|s| s.is_none()).count();
    let denom = match policy {
        InvalidPolicy::Zero => scores.len(),
        InvalidPolicy::Drop => scores.len() - invalid,
    };
    if denom == 0 {
        return (0.0, invalid);
    }
    (scores.iter().flatten().sum::<f64>() / denom as f64, invalid)
}

/// Fraction of generated strings that parse; 0 for no pairs.
pub fn validity(pairs: &[GenerationPair]) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    pairs.iter().filter(|p| p.is_valid()).count() as f64 / pairs.len() as f64
}

/// Number of `required` fragment canons found in `generated`.
pub fn fragment_satisfaction(generated: &Molecule, required: &[String]) -> Result<usize, EvalError> {
    let mut hits = 0;
    for canon in required {
        let f = Fragment::from_canon(canon)?;
        if contains_subgraph(generated, f.graph()) {
            hits += 1;
        }
    }
    Ok(hits)
}

static FRAGMENT_TOKEN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"<\|(.+?)\|>").expect("valid token pattern"));

/// Splits a CoT target `"<|A|><|B|> SMILES"` into fragment canons and the
/// trailing SMILES.
pub fn parse_cot(text: &str) -> (Vec<String>, String) {
    let canons = FRAGMENT_TOKEN.captures_iter(text).map(|c| c[1].to_string()).collect();
    let tail = match FRAGMENT_TOKEN.find_iter(text).last() {
        Some(m) => &text[m.end()..],
        None => text,
    };
    (canons, tail.trim().to_string())
}

/// Multiset precision and recall of a fragment chain against the
/// decomposition of the final molecule. An empty chain has precision 0.
pub fn cot_consistency(
    chain: &[String],
    final_mol: &Molecule,
    vocab: &FragmentVocabulary,
) -> Result<(f64, f64), EvalError> {
    let d = decompose(final_mol, vocab)?;
    let mut pool: FxHashMap<&str, usize> = FxHashMap::default();
    for c in d.canons() {
        *pool.entry(c).or_default() += 1;
    }
    let mut common = 0usize;
    for c in chain {
        if let Some(k) = pool.get_mut(c.as_str()).filter(|k| **k > 0) {
            *k -= 1;
            common += 1;
        }
    }
    let precision = if chain.is_empty() {
        0.0
    } else {
        common as f64 / chain.len() as f64
    };
    let recall = if d.pieces.is_empty() {
        0.0
    } else {
        common as f64 / d.pieces.len() as f64
    };
    Ok((precision, recall))
}

/// Metric toggles.
#[derive(Debug, Clone, Copy, Default)]
pub struct EvalOptions {
    pub tokenizer: BleuTokenizer,
    pub invalid: InvalidPolicy,
    pub canonical_levenshtein: bool,
}

/// Column names of the summary table, in order.
pub const REPORT_COLUMNS: [&str; 5] = ["BLEU", "Exact", "Levenshtein", "Morgan FTS", "Validity"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub count: usize,
    pub invalid_count: usize,
    pub metrics: BTreeMap<String, f64>,
}

impl MetricReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Header of [`REPORT_COLUMNS`] and one row of values.
    pub fn to_tsv(&self) -> String {
        let values: Vec<String> = REPORT_COLUMNS
            .iter()
            .map(|c| format!("{:.6}", self.metrics.get(*c).copied().unwrap_or(f64::NAN)))
            .collect();
        format!("{}\n{}\n", REPORT_COLUMNS.join("\t"), values.join("\t"))
    }
}

/// Corpus-level report over generation pairs. Levenshtein is the mean
/// distance.
pub fn evaluate(pairs: &[GenerationPair], opts: EvalOptions) -> Result<MetricReport, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    let per_pair: Vec<(bool, usize)> = pairs
        .par_iter()
        .map(|p| (exact_match(p), pair_levenshtein(p, opts.canonical_levenshtein)))
        .collect();
    let n = pairs.len() as f64;
    let exact = per_pair.iter().filter(|x| x.0).count() as f64 / n;
    let lev = per_pair.iter().map(|x| x.1 as f64).sum::<f64>() / n;
    let texts: Vec<(&str, &str)> = pairs
        .iter()
        .map(|p| (p.generated.as_str(), p.reference.as_str()))
        .collect();
    let bleu = smiles_bleu(&texts, opts.tokenizer)?;
    let (fts, invalid_count) = fingerprint_fts(pairs, opts.invalid);
    let metrics = REPORT_COLUMNS
        .iter()
        .map(|c| c.to_string())
        .zip([bleu, exact, lev, fts, validity(pairs)])
        .collect();
    Ok(MetricReport {
        count: pairs.len(),
        invalid_count,
        metrics,
    })
}
