use rand::seq::IndexedRandom;
use rand::Rng;

use super::{is_carbon_only_nonconjugated, Decomposition, Fragment};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenMode {
    /// Every piece, sorted lexicographically.
    Cot,
    /// 1-3 random distinct pieces after dropping single atoms and plain
    /// hydrocarbon pieces.
    Condition,
}

/// Wire form of a fragment token.
pub fn token(canon: &str) -> String {
    format!("<|{canon}|>")
}

/// Serializes a decomposition into fragment tokens.
///
/// In condition mode the number of fragments is drawn uniformly from
/// {1, 2, 3} and capped at the number of surviving fragments; the chosen
/// fragments are returned in lexicographic order.
pub fn fragment_tokens<R: Rng + ?Sized>(d: &Decomposition, mode: TokenMode, rng: &mut R) -> Vec<String> {
    let mut canons: Vec<&str> = d.canons().collect();
    canons.sort_unstable();
    match mode {
        TokenMode::Cot => canons.into_iter().map(token).collect(),
        TokenMode::Condition => {
            canons.dedup();
            // single atoms carry no substructure and are never conditions
            canons.retain(|c| match Fragment::from_canon(c) {
                Ok(f) => f.atom_count() > 1 && !is_carbon_only_nonconjugated(&f),
                Err(_) => true,
            });
            if canons.is_empty() {
                return Vec::new();
            }
            let k = rng.random_range(1..=3usize).min(canons.len());
            let mut chosen: Vec<&str> = canons.choose_multiple(rng, k).copied().collect();
            chosen.sort_unstable();
            chosen.into_iter().map(token).collect()
        }
    }
}
