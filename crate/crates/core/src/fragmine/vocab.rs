use std::io::{BufRead, Write};

use rustc_hash::FxHashMap;

use super::{FragError, Fragment};
use crate::molgraph::Molecule;

const HEADER: &str = "token_id\tcanon_smiles\tfrequency";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabEntry {
    pub canon: String,
    pub frequency: u64,
    pub atom_count: usize,
}

/// Ordered fragment vocabulary. Token ids are positions in the entry list;
/// the first `n_atom` entries are the single-atom seeds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FragmentVocabulary {
    entries: Vec<VocabEntry>,
    index: FxHashMap<String, usize>,
    n_atom: usize,
    max_atoms: usize,
}

impl FragmentVocabulary {
    pub(crate) fn with_seeds(seeds: Vec<(String, u64)>) -> FragmentVocabulary {
        let mut vocab = FragmentVocabulary::default();
        for (canon, frequency) in seeds {
            vocab.push(canon, frequency, 1);
        }
        vocab.n_atom = vocab.entries.len();
        vocab
    }

    pub(crate) fn push(&mut self, canon: String, frequency: u64, atom_count: usize) -> usize {
        let id = self.entries.len();
        let previous = self.index.insert(canon.clone(), id);
        assert!(previous.is_none(), "duplicate vocabulary entry {canon}");
        self.max_atoms = self.max_atoms.max(atom_count);
        self.entries.push(VocabEntry {
            canon,
            frequency,
            atom_count,
        });
        id
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of single-atom seed entries at the front of the list.
    pub fn n_atom(&self) -> usize {
        self.n_atom
    }

    pub fn entries(&self) -> &[VocabEntry] {
        &self.entries
    }

    pub fn entry(&self, token_id: usize) -> Option<&VocabEntry> {
        self.entries.get(token_id)
    }

    pub fn token_id(&self, canon: &str) -> Option<usize> {
        self.index.get(canon).copied()
    }

    pub fn contains(&self, canon: &str) -> bool {
        self.index.contains_key(canon)
    }

    /// Atom count of the largest entry.
    pub fn max_atom_count(&self) -> usize {
        self.max_atoms
    }

    /// Appends single-atom entries (frequency 0) for atoms of `mol` the
    /// vocabulary does not cover, so that `mol` can be decomposed. Returns
    /// the added fragments.
    pub fn add_single_atoms(&mut self, mol: &Molecule) -> Vec<String> {
        let mut added = Vec::new();
        for i in 0..mol.atom_count() {
            let canon = mol.fragment_smiles(&[i]);
            if !self.contains(&canon) {
                self.push(canon.clone(), 0, 1);
                added.push(canon);
            }
        }
        added
    }

    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{HEADER}")?;
        for (id, e) in self.entries.iter().enumerate() {
            writeln!(w, "{id}\t{}\t{}", e.canon, e.frequency)?;
        }
        w.flush()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = Vec::new();
        self.write_tsv(&mut out).expect("writing to memory");
        String::from_utf8(out).expect("vocabulary is UTF-8")
    }

    pub fn read_tsv<R: BufRead>(r: R) -> Result<FragmentVocabulary, FragError> {
        let mut vocab = FragmentVocabulary::default();
        let mut seeding = true;
        let mut saw_header = false;
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let line_no = i + 1;
            let bad = |msg: &str| FragError::VocabFormat {
                line: line_no,
                msg: msg.to_string(),
            };
            if !saw_header {
                if line.trim_end() != HEADER {
                    return Err(bad("expected header token_id, canon_smiles, frequency"));
                }
                saw_header = true;
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(bad("expected 3 tab-separated columns"));
            }
            let id: usize = cols[0].parse().map_err(|_| bad("token_id is not an integer"))?;
            if id != vocab.len() {
                return Err(bad("token ids must be contiguous from 0"));
            }
            let frequency: u64 = cols[2].parse().map_err(|_| bad("frequency is not an integer"))?;
            if vocab.contains(cols[1]) {
                return Err(bad("duplicate fragment"));
            }
            let atoms = Fragment::from_canon(cols[1])?.atom_count();
            if atoms != 1 {
                seeding = false;
            }
            if seeding {
                vocab.n_atom += 1;
            }
            vocab.push(cols[1].to_string(), frequency, atoms);
        }
        if !saw_header {
            return Err(FragError::VocabFormat {
                line: 0,
                msg: "empty vocabulary file".into(),
            });
        }
        Ok(vocab)
    }
}
