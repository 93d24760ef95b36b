use std::cmp::Ordering;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::{rank_key, FragError, FragmentVocabulary, Partition};
use crate::molgraph::{LabeledGraph, Molecule};

/// One promoted fragment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeRecord {
    /// 0-based merge round.
    pub iteration: usize,
    pub canon: String,
    /// Number of adjacent piece pairs forming this fragment when promoted.
    pub frequency: u64,
    pub atom_count: usize,
}

#[derive(Debug, Clone)]
pub struct MiningResult {
    pub vocabulary: FragmentVocabulary,
    pub merges: Vec<MergeRecord>,
    /// False when the corpus ran out of candidate pairs before the target
    /// size; the vocabulary is then smaller than requested.
    pub target_reached: bool,
}

const PENDING: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Pair {
    p: u32,
    q: u32,
    canon: u32,
}

#[derive(Debug, Default)]
struct MolState {
    part: Partition,
    ranks: Vec<u32>,
    pairs: Vec<Pair>,
}

/// Pair bookkeeping coming out of one molecule's merge step. New pairs are
/// appended to the molecule's pair list with a pending canon id, in the
/// same order as `added`.
#[derive(Debug, Default)]
struct Delta {
    removed: Vec<u32>,
    added: Vec<String>,
}

#[derive(Debug, Default)]
struct Counter {
    ids: FxHashMap<String, u32>,
    canons: Vec<String>,
    atoms: Vec<u32>,
    counts: Vec<i64>,
    /// molecules that gained a pair with this canon (may be stale)
    mols: Vec<Vec<u32>>,
    in_vocab: Vec<bool>,
}

impl Counter {
    fn intern(&mut self, canon: String, atoms: usize) -> u32 {
        if let Some(&id) = self.ids.get(&canon) {
            return id;
        }
        let id = self.canons.len() as u32;
        self.ids.insert(canon.clone(), id);
        self.canons.push(canon);
        self.atoms.push(atoms as u32);
        self.counts.push(0);
        self.mols.push(Vec::new());
        self.in_vocab.push(false);
        id
    }

    fn apply(&mut self, mol_index: usize, state: &mut MolState, delta: Delta) {
        for id in delta.removed {
            self.counts[id as usize] -= 1;
        }
        let base = state.pairs.len() - delta.added.len();
        for (k, canon) in delta.added.into_iter().enumerate() {
            let pair = &mut state.pairs[base + k];
            let atoms = state.part.atoms(pair.p).len() + state.part.atoms(pair.q).len();
            let id = self.intern(canon, atoms);
            pair.canon = id;
            self.counts[id as usize] += 1;
            let mols = &mut self.mols[id as usize];
            if mols.last() != Some(&(mol_index as u32)) {
                mols.push(mol_index as u32);
            }
        }
    }

    fn compare(&self, a: u32, b: u32) -> Ordering {
        let (a, b) = (a as usize, b as usize);
        self.counts[b]
            .cmp(&self.counts[a])
            .then(self.atoms[a].cmp(&self.atoms[b]))
            .then_with(|| self.canons[a].cmp(&self.canons[b]))
    }

    /// Most frequent candidate not yet in the vocabulary.
    fn best(&self) -> Option<u32> {
        (0..self.canons.len() as u32)
            .into_par_iter()
            .filter(|&id| self.counts[id as usize] > 0 && !self.in_vocab[id as usize])
            .min_by(|&a, &b| self.compare(a, b))
    }
}

/// Mines a vocabulary of `n` fragments from `corpus`.
///
/// Frequencies count adjacent piece pairs over the whole corpus under the
/// current decomposition. Ties go to the smaller fragment, then to the
/// lexicographically smaller canonical SMILES. Fragments already in the
/// vocabulary are never promoted twice.
pub fn mine_vocabulary(corpus: &[Molecule], n: usize) -> Result<MiningResult, FragError> {
    mine_vocabulary_with(corpus, n, |_| {})
}

/// Like [`mine_vocabulary`], calling `on_merge` after each promotion.
pub fn mine_vocabulary_with<F: FnMut(&MergeRecord)>(
    corpus: &[Molecule],
    n: usize,
    mut on_merge: F,
) -> Result<MiningResult, FragError> {
    if corpus.is_empty() {
        return Err(FragError::EmptyCorpus);
    }
    let seeds = seed_fragments(corpus);
    if n <= seeds.len() {
        return Err(FragError::TargetBelowSeed {
            target: n,
            seeds: seeds.len(),
        });
    }
    let mut vocab = FragmentVocabulary::with_seeds(seeds);

    let initial: Vec<(MolState, Delta)> = corpus.par_iter().map(initial_state).collect();
    let mut counter = Counter::default();
    let mut states: Vec<MolState> = Vec::with_capacity(corpus.len());
    for (i, (mut state, delta)) in initial.into_iter().enumerate() {
        counter.apply(i, &mut state, delta);
        states.push(state);
    }

    let mut merges = Vec::new();
    let mut target_reached = true;
    while vocab.len() < n {
        let Some(winner) = counter.best() else {
            target_reached = false;
            break;
        };
        let w = winner as usize;
        counter.in_vocab[w] = true;
        let record = MergeRecord {
            iteration: merges.len(),
            canon: counter.canons[w].clone(),
            frequency: counter.counts[w] as u64,
            atom_count: counter.atoms[w] as usize,
        };
        vocab.push(record.canon.clone(), record.frequency, record.atom_count);
        on_merge(&record);
        merges.push(record);

        let mut affected = std::mem::take(&mut counter.mols[w]);
        affected.sort_unstable();
        affected.dedup();
        let mut work: Vec<(usize, MolState, Delta)> = affected
            .iter()
            .map(|&m| (m as usize, std::mem::take(&mut states[m as usize]), Delta::default()))
            .collect();
        work.par_iter_mut().for_each(|(m, state, delta)| {
            *delta = merge_winner(&corpus[*m], state, winner);
        });
        for (m, mut state, delta) in work {
            counter.apply(m, &mut state, delta);
            states[m] = state;
        }
    }

    Ok(MiningResult {
        vocabulary: vocab,
        merges,
        target_reached,
    })
}

/// Distinct single-atom fragments with their occurrence counts, most
/// frequent first.
fn seed_fragments(corpus: &[Molecule]) -> Vec<(String, u64)> {
    let per_mol: Vec<Vec<String>> = corpus
        .par_iter()
        .map(|mol| (0..mol.atom_count()).map(|i| mol.fragment_smiles(&[i])).collect())
        .collect();
    let mut counts: FxHashMap<String, u64> = FxHashMap::default();
    for canon in per_mol.into_iter().flatten() {
        *counts.entry(canon).or_insert(0) += 1;
    }
    let mut seeds: Vec<(String, u64)> = counts.into_iter().collect();
    seeds.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    seeds
}

fn initial_state(mol: &Molecule) -> (MolState, Delta) {
    let part = Partition::singletons(mol.atom_count());
    let ranks = LabeledGraph::from_molecule(mol).ranks();
    let mut pairs = Vec::new();
    let mut added = Vec::new();
    for (p, q) in Partition::initial_pairs(mol) {
        added.push(mol.fragment_smiles(&part.union(p, q)));
        pairs.push(Pair { p, q, canon: PENDING });
    }
    (
        MolState { part, ranks, pairs },
        Delta {
            removed: Vec::new(),
            added,
        },
    )
}

/// Merges the occurrences of `winner` in one molecule, lowest canonical
/// rank first, skipping occurrences that overlap an earlier merge.
fn merge_winner(mol: &Molecule, state: &mut MolState, winner: u32) -> Delta {
    let mut occurrences: Vec<(Vec<u32>, u32, u32)> = state
        .pairs
        .iter()
        .filter(|pair| pair.canon == winner)
        .map(|pair| {
            (
                rank_key(&state.ranks, &state.part.union(pair.p, pair.q)),
                pair.p,
                pair.q,
            )
        })
        .collect();
    if occurrences.is_empty() {
        return Delta::default();
    }
    occurrences.sort();

    let mut touched = vec![false; state.part.pieces.len()];
    let mut merged = Vec::new();
    for (_, p, q) in occurrences {
        if touched[p as usize] || touched[q as usize] {
            continue;
        }
        touched[p as usize] = true;
        touched[q as usize] = true;
        state.part.merge(p, q);
        merged.push(p);
    }

    let mut delta = Delta::default();
    state.pairs.retain(|pair| {
        let stale = touched[pair.p as usize] || touched[pair.q as usize];
        if stale {
            delta.removed.push(pair.canon);
        }
        !stale
    });
    merged.sort_unstable();
    for &r in &merged {
        for s in state.part.adjacent(mol, r) {
            // pairs between two new pieces are added once, from the smaller
            if touched[s as usize] && s < r {
                continue;
            }
            delta.added.push(mol.fragment_smiles(&state.part.union(r, s)));
            state.pairs.push(Pair {
                p: r.min(s),
                q: r.max(s),
                canon: PENDING,
            });
        }
    }
    delta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;

    fn corpus(smiles: &[&str]) -> Vec<Molecule> {
        smiles.iter().map(|s| parse_smiles(s).unwrap()).collect()
    }

    #[test]
    fn single_merge_on_ethane() {
        let r = mine_vocabulary(&corpus(&["CC"]), 2).unwrap();
        assert!(r.target_reached);
        let e = r.vocabulary.entries();
        assert_eq!(e.len(), 2);
        assert_eq!((e[1].canon.as_str(), e[1].frequency), ("CC", 1));
    }

    #[test]
    fn errors_and_exhaustion() {
        assert!(matches!(mine_vocabulary(&[], 5), Err(FragError::EmptyCorpus)));
        assert!(matches!(
            mine_vocabulary(&corpus(&["CO"]), 2),
            Err(FragError::TargetBelowSeed { target: 2, seeds: 2 })
        ));
        let r = mine_vocabulary(&corpus(&["CC", "C"]), 10).unwrap();
        assert!(!r.target_reached);
        assert_eq!(r.vocabulary.len(), 2);
    }

    #[test]
    fn seeds_are_ordered_by_frequency() {
        let r = mine_vocabulary(&corpus(&["CCO", "CN", "O"]), 5).unwrap();
        let seeds: Vec<&str> = r.vocabulary.entries()[..3].iter().map(|e| e.canon.as_str()).collect();
        assert_eq!(seeds, ["C", "O", "N"]);
        assert_eq!(r.vocabulary.n_atom(), 3);
    }

    #[test]
    fn hexitol_rounds() {
        let hexitol = "C([C@H]([C@H]([C@@H]([C@H](CO)O)O)O)O)O";
        let r = mine_vocabulary(&corpus(&[hexitol]), 4).unwrap();
        let canons: Vec<&str> = r.merges.iter().map(|m| m.canon.as_str()).collect();
        // six C-O pairs beat five C-C pairs, then the chain of CO pieces
        assert_eq!(canons, ["CO", "OCCO"]);
        assert_eq!(r.merges[0].frequency, 6);
        assert_eq!(r.merges[1].frequency, 5);
    }

    #[test]
    fn repeated_runs_are_identical() {
        let mols = corpus(&["CC(=O)Oc1ccccc1C(=O)O", "c1ccccc1CCN", "OCC(O)CO", "CC(C)CC(=O)N"]);
        let a = mine_vocabulary(&mols, 14).unwrap();
        let b = mine_vocabulary(&mols, 14).unwrap();
        assert_eq!(a.vocabulary.to_tsv(), b.vocabulary.to_tsv());
        assert_eq!(a.merges, b.merges);
    }
}
