use std::sync::LazyLock;

use regex::Regex;
use rustc_hash::FxHashMap;

use super::EvalError;

/// How SMILES strings are split before n-gram counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BleuTokenizer {
    /// One token per character.
    #[default]
    Character,
    /// Bracket atoms, two-letter halogens and two-digit ring labels stay
    /// whole; everything else is one token per character.
    AtomRegex,
}

static ATOM_TOKEN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\[[^\]]+\]|Br|Cl|%\d{2}|.").expect("valid token pattern"));

pub fn tokenize(s: &str, tokenizer: BleuTokenizer) -> Vec<&str> {
    match tokenizer {
        BleuTokenizer::Character => s.char_indices().map(|(i, c)| &s[i..i + c.len_utf8()]).collect(),
        BleuTokenizer::AtomRegex => ATOM_TOKEN.find_iter(s).map(|m| m.as_str()).collect(),
    }
}

fn counts<'a, 'b>(tokens: &'b [&'a str], n: usize) -> FxHashMap<&'b [&'a str], usize> {
    let mut out = FxHashMap::default();
    for w in tokens.windows(n) {
        *out.entry(w).or_insert(0) += 1;
    }
    out
}

/// Corpus BLEU-4 of (generated, reference) pairs: clipped n-gram counts
/// pooled over the corpus, uniform weights, brevity penalty
/// exp(1 - r/c) when the generated side is not longer. Zero when any
/// order has no matching n-gram.
pub fn smiles_bleu(pairs: &[(&str, &str)], tokenizer: BleuTokenizer) -> Result<f64, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    let mut matched = [0usize; 4];
    let mut total = [0usize; 4];
    let (mut c, mut r) = (0usize, 0usize);
    for (generated, reference) in pairs {
        let g = tokenize(generated, tokenizer);
        let rf = tokenize(reference, tokenizer);
        c += g.len();
        r += rf.len();
        for n in 1..=4 {
            let rc = counts(&rf, n);
            for (gram, k) in counts(&g, n) {
                matched[n - 1] += k.min(rc.get(gram).copied().unwrap_or(0));
                total[n - 1] += k;
            }
        }
    }
    if matched.contains(&0) {
        return Ok(0.0);
    }
    let log_precision = matched
        .iter()
        .zip(total)
        .map(|(&m, t)| (m as f64 / t as f64).ln())
        .sum::<f64>()
        / 4.0;
    let brevity = if c > r { 1.0 } else { (1.0 - r as f64 / c as f64).exp() };
    Ok((brevity * log_precision.exp()).clamp(0.0, 1.0))
}
