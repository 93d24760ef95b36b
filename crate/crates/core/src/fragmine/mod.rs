//! Fragment vocabulary mining and vocabulary-guided decomposition.
//!
//! Mining starts from the single-atom fragments of a corpus and repeatedly
//! promotes the most frequent union of two adjacent pieces, merging every
//! occurrence before the next round. Decomposition replays the same greedy
//! rule on one molecule, restricted to unions that are in the vocabulary.

mod decompose;
mod mine;
mod tokens;
mod vocab;

use std::io;

use thiserror::Error;

use crate::molgraph::{parse_smiles, BondOrder, Element, MolError, Molecule};

pub use decompose::{decompose, Decomposition, Piece};
pub use mine::{mine_vocabulary, mine_vocabulary_with, MergeRecord, MiningResult};
pub use tokens::{fragment_tokens, token, TokenMode};
pub use vocab::{FragmentVocabulary, VocabEntry};

#[derive(Debug, Error)]
pub enum FragError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("target size {target} must exceed the {seeds} single-atom seeds")]
    TargetBelowSeed { target: usize, seeds: usize },
    #[error("atom {atom} ({canon}) has no single-atom vocabulary entry")]
    OutOfVocabularyAtom { atom: usize, canon: String },
    #[error("vocabulary line {line}: {msg}")]
    VocabFormat { line: usize, msg: String },
    #[error("fragment {canon:?} does not parse: {source}")]
    BadFragment { canon: String, source: MolError },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A connected vertex-induced subgraph, identified by its canonical SMILES.
#[derive(Debug, Clone)]
pub struct Fragment {
    graph: Molecule,
    canon: String,
}

impl Fragment {
    /// The subgraph of `mol` induced by `atoms`.
    pub fn from_atoms(mol: &Molecule, atoms: &[usize]) -> Fragment {
        let canon = mol.fragment_smiles(atoms);
        let graph = parse_smiles(&canon).expect("fragment SMILES parses");
        Fragment { graph, canon }
    }

    pub fn from_canon(canon: &str) -> Result<Fragment, FragError> {
        let graph = parse_smiles(canon).map_err(|source| FragError::BadFragment {
            canon: canon.to_string(),
            source,
        })?;
        Ok(Fragment {
            graph,
            canon: canon.to_string(),
        })
    }

    pub fn graph(&self) -> &Molecule {
        &self.graph
    }

    pub fn canon(&self) -> &str {
        &self.canon
    }

    pub fn atom_count(&self) -> usize {
        self.graph.atom_count()
    }
}

/// True when every atom is a non-aromatic carbon, no bond is aromatic, and
/// no two multiple bonds are separated by exactly one single bond.
pub fn is_carbon_only_nonconjugated(f: &Fragment) -> bool {
    let g = f.graph();
    if g.atoms().iter().any(|a| a.element != Element::C || a.aromatic) {
        return false;
    }
    if g.bonds().iter().any(|b| b.order == BondOrder::Aromatic) {
        return false;
    }
    let has_multiple_except = |atom: usize, except: usize| {
        g.neighbors(atom)
            .iter()
            .any(|&(nb, bond)| nb != except && g.bonds()[bond].order.is_multiple())
    };
    !g.bonds()
        .iter()
        .filter(|b| b.order == BondOrder::Single)
        .any(|b| has_multiple_except(b.a, b.b) && has_multiple_except(b.b, b.a))
}

/// A partition of a molecule's atoms into pieces. Piece slots are stable:
/// merging `q` into `p` keeps slot `p` and empties slot `q`.
#[derive(Debug, Clone, Default)]
pub(crate) struct Partition {
    piece_of: Vec<u32>,
    pieces: Vec<Vec<u32>>,
}

impl Partition {
    pub(crate) fn singletons(n: usize) -> Partition {
        Partition {
            piece_of: (0..n as u32).collect(),
            pieces: (0..n as u32).map(|i| vec![i]).collect(),
        }
    }

    pub(crate) fn atoms(&self, p: u32) -> &[u32] {
        &self.pieces[p as usize]
    }

    pub(crate) fn union(&self, p: u32, q: u32) -> Vec<usize> {
        let mut atoms: Vec<usize> = self.pieces[p as usize]
            .iter()
            .chain(&self.pieces[q as usize])
            .map(|&a| a as usize)
            .collect();
        atoms.sort_unstable();
        atoms
    }

    pub(crate) fn merge(&mut self, p: u32, q: u32) {
        let moved = std::mem::take(&mut self.pieces[q as usize]);
        for &a in &moved {
            self.piece_of[a as usize] = p;
        }
        let target = &mut self.pieces[p as usize];
        target.extend(moved);
        target.sort_unstable();
    }

    /// Pieces sharing at least one bond with piece `p`, ascending.
    pub(crate) fn adjacent(&self, mol: &Molecule, p: u32) -> Vec<u32> {
        let mut out: Vec<u32> = self.pieces[p as usize]
            .iter()
            .flat_map(|&a| mol.neighbors(a as usize))
            .map(|&(nb, _)| self.piece_of[nb])
            .filter(|&s| s != p)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Pairs of adjacent single-atom pieces, one per bond.
    pub(crate) fn initial_pairs(mol: &Molecule) -> Vec<(u32, u32)> {
        mol.bonds()
            .iter()
            .map(|b| (b.a.min(b.b) as u32, b.a.max(b.b) as u32))
            .collect()
    }

    pub(crate) fn live_pieces(&self) -> impl Iterator<Item = (u32, &[u32])> {
        self.pieces
            .iter()
            .enumerate()
            .filter(|(_, atoms)| !atoms.is_empty())
            .map(|(p, atoms)| (p as u32, atoms.as_slice()))
    }
}

/// Sorted canonical ranks of an atom set; orders occurrences of the same
/// fragment inside one molecule.
pub(crate) fn rank_key(ranks: &[u32], atoms: &[usize]) -> Vec<u32> {
    let mut key: Vec<u32> = atoms.iter().map(|&a| ranks[a]).collect();
    key.sort_unstable();
    key
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nonconj(s: &str) -> bool {
        is_carbon_only_nonconjugated(&Fragment::from_canon(s).unwrap())
    }

    #[test]
    fn carbon_only_filter() {
        assert!(nonconj("CCCC"));
        assert!(nonconj("C=CCC=C"));
        assert!(nonconj("C=C=C"));
        assert!(nonconj("C#CC"));
        assert!(!nonconj("c1ccccc1"));
        assert!(!nonconj("C=CC=C"));
        assert!(!nonconj("C#CC=C"));
        assert!(!nonconj("CCO"));
        assert!(!nonconj("c:c"));
    }

    #[test]
    fn fragment_from_atoms_recomputes_hydrogens() {
        let mol = parse_smiles("CC(=O)N").unwrap();
        let f = Fragment::from_atoms(&mol, &[1, 2]);
        assert_eq!(f.canon(), "C=O");
        assert_eq!(f.atom_count(), 2);
    }
}
