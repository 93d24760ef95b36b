use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{rank_key, FragError, FragmentVocabulary, Partition};
use crate::molgraph::{LabeledGraph, Molecule};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub canon: String,
    /// Sorted atom indices in the source molecule.
    pub atoms: Vec<usize>,
}

/// An exact partition of a molecule's atoms into vocabulary fragments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    /// Canonical SMILES of the decomposed molecule.
    pub smiles: String,
    /// Pieces in serialization order (by lowest canonical rank).
    pub pieces: Vec<Piece>,
}

impl Decomposition {
    pub fn canons(&self) -> impl Iterator<Item = &str> {
        self.pieces.iter().map(|p| p.canon.as_str())
    }

    /// True when the pieces are disjoint and cover atoms `0..n`.
    pub fn is_partition_of(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for piece in &self.pieces {
            for &a in &piece.atoms {
                if a >= n || seen[a] {
                    return false;
                }
                seen[a] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    p: u32,
    q: u32,
    /// token id of the union, if it is in the vocabulary
    token: Option<usize>,
}

/// Decomposes `mol` by greedily merging adjacent pieces.
///
/// Starting from single atoms, each step merges the adjacent pair whose
/// union is the vocabulary entry with the highest frequency (ties: fewer
/// atoms, smaller canonical SMILES, lowest canonical ranks). Stops when no
/// adjacent union is in the vocabulary.
pub fn decompose(mol: &Molecule, vocab: &FragmentVocabulary) -> Result<Decomposition, FragError> {
    for i in 0..mol.atom_count() {
        let canon = mol.fragment_smiles(&[i]);
        if !vocab.contains(&canon) {
            return Err(FragError::OutOfVocabularyAtom { atom: i, canon });
        }
    }
    let ranks = LabeledGraph::from_molecule(mol).ranks();
    let mut part = Partition::singletons(mol.atom_count());
    let lookup = |part: &Partition, p: u32, q: u32| -> Candidate {
        let size = part.atoms(p).len() + part.atoms(q).len();
        let token = if size <= vocab.max_atom_count() {
            vocab.token_id(&mol.fragment_smiles(&part.union(p, q)))
        } else {
            None
        };
        Candidate { p, q, token }
    };
    let mut candidates: Vec<Candidate> = Partition::initial_pairs(mol)
        .into_iter()
        .map(|(p, q)| lookup(&part, p, q))
        .collect();

    let compare = |a: usize, b: usize| -> Ordering {
        let (ea, eb) = (&vocab.entries()[a], &vocab.entries()[b]);
        eb.frequency
            .cmp(&ea.frequency)
            .then(ea.atom_count.cmp(&eb.atom_count))
            .then_with(|| ea.canon.cmp(&eb.canon))
    };

    loop {
        let mut best: Option<(usize, Vec<u32>, usize)> = None;
        for (i, c) in candidates.iter().enumerate() {
            let Some(token) = c.token else { continue };
            let better = match &best {
                None => true,
                Some((best_token, best_key, _)) => match compare(token, *best_token) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => rank_key(&ranks, &part.union(c.p, c.q)) < *best_key,
                },
            };
            if better {
                best = Some((token, rank_key(&ranks, &part.union(c.p, c.q)), i));
            }
        }
        let Some((_, _, i)) = best else { break };
        let Candidate { p, q, .. } = candidates[i];
        part.merge(p, q);
        candidates.retain(|c| c.p != p && c.q != p && c.p != q && c.q != q);
        for s in part.adjacent(mol, p) {
            candidates.push(lookup(&part, p.min(s), p.max(s)));
        }
    }

    let mut pieces: Vec<(u32, Piece)> = part
        .live_pieces()
        .map(|(_, atoms)| {
            let atoms: Vec<usize> = atoms.iter().map(|&a| a as usize).collect();
            let min_rank = atoms.iter().map(|&a| ranks[a]).min().unwrap_or(0);
            let canon = mol.fragment_smiles(&atoms);
            (min_rank, Piece { canon, atoms })
        })
        .collect();
    pieces.sort_by_key(|(rank, _)| *rank);
    Ok(Decomposition {
        smiles: mol.canonical_smiles(),
        pieces: pieces.into_iter().map(|(_, p)| p).collect(),
    })
}
