//! Morgan circular fingerprints and the Tanimoto / cosine kernels.
//!
//! Bits are not compatible with RDKit: environment identifiers come from a
//! fixed splitmix64-style mixer with a constant seed and are folded into
//! the bit vector by unsigned modulo.

mod io;

use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::molgraph::Molecule;

pub use io::{
    read_features, read_fingerprint_dump, write_features, write_fingerprint_dump, FeatureRecord, FingerprintRecord,
};

pub const DEFAULT_RADIUS: u32 = 2;
pub const DEFAULT_NBITS: usize = 2048;

const SEED: u64 = 0x6d6f_6c66_7261_6721;

#[derive(Debug, Error)]
pub enum FingerprintError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("zero vector")]
    ZeroVector,
    #[error("feature vector is empty")]
    EmptyVector,
    #[error("feature vector has a non-finite entry at {0}")]
    NonFinite(usize),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitFingerprint {
    nbits: usize,
    radius: u32,
    words: Vec<u64>,
}

impl BitFingerprint {
    pub fn new(nbits: usize, radius: u32) -> BitFingerprint {
        assert!(nbits > 0, "fingerprint needs at least one bit");
        BitFingerprint {
            nbits,
            radius,
            words: vec![0; nbits.div_ceil(64)],
        }
    }

    pub fn from_bits<I: IntoIterator<Item = usize>>(nbits: usize, bits: I) -> BitFingerprint {
        let mut fp = BitFingerprint::new(nbits, DEFAULT_RADIUS);
        for b in bits {
            fp.set(b);
        }
        fp
    }

    pub fn nbits(&self) -> usize {
        self.nbits
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn set(&mut self, bit: usize) {
        assert!(bit < self.nbits, "bit {bit} out of range");
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    pub fn get(&self, bit: usize) -> bool {
        bit < self.nbits && self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Indices of the set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nbits).filter(|&b| self.get(b))
    }

    /// Bytes in little-endian bit order, hex encoded.
    pub fn to_hex(&self) -> String {
        let bytes: Vec<u8> = (0..self.nbits.div_ceil(8))
            .map(|i| (self.words[i / 8] >> ((i % 8) * 8)) as u8)
            .collect();
        hex::encode(bytes)
    }

    /// Inverse of [`to_hex`](Self::to_hex); the length is 4 bits per digit.
    pub fn from_hex(text: &str) -> Option<BitFingerprint> {
        let bytes = hex::decode(text).ok()?;
        if bytes.is_empty() {
            return None;
        }
        let mut fp = BitFingerprint::new(bytes.len() * 8, DEFAULT_RADIUS);
        for (i, byte) in bytes.into_iter().enumerate() {
            fp.words[i / 8] |= (byte as u64) << ((i % 8) * 8);
        }
        Some(fp)
    }
}

/// One emitted circular environment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Environment {
    pub center: usize,
    pub radius: u32,
    pub id: u64,
    /// Bond indices covered by the environment, ascending.
    pub bonds: Vec<usize>,
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn hash_words(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(SEED, |h, &w| mix(h.wrapping_add(0x9e37_79b9_7f4a_7c15) ^ w))
}

fn atom_invariant(mol: &Molecule, i: usize) -> u64 {
    let a = mol.atom(i);
    hash_words(&[
        a.element.atomic_number() as u64,
        mol.degree(i) as u64,
        a.formal_charge as i64 as u64,
        a.explicit_h as u64,
        a.in_ring as u64,
        a.aromatic as u64,
    ])
}

/// The circular environments of `mol` up to `radius`, ECFP style.
///
/// Every atom contributes its radius-0 environment. At higher radii an atom
/// contributes only if its environment gained bonds, and environments that
/// cover a bond set already emitted (at this or a lower radius) are
/// dropped, keeping the smallest identifier.
pub fn environments(mol: &Molecule, radius: u32) -> Vec<Environment> {
    let n = mol.atom_count();
    let words = mol.bond_count().div_ceil(64).max(1);
    let mut ids: Vec<u64> = (0..n).map(|i| atom_invariant(mol, i)).collect();
    let mut sets: Vec<Vec<u64>> = vec![vec![0; words]; n];
    let mut out: Vec<Environment> = (0..n)
        .map(|i| Environment {
            center: i,
            radius: 0,
            id: ids[i],
            bonds: Vec::new(),
        })
        .collect();
    let mut seen: FxHashSet<Vec<u64>> = FxHashSet::default();

    for r in 1..=radius {
        let mut next_ids = Vec::with_capacity(n);
        let mut next_sets = Vec::with_capacity(n);
        for v in 0..n {
            let mut set = sets[v].clone();
            let mut nbrs: Vec<(u64, u64)> = Vec::with_capacity(mol.degree(v));
            for &(u, b) in mol.neighbors(v) {
                set[b / 64] |= 1 << (b % 64);
                for (w, x) in set.iter_mut().zip(&sets[u]) {
                    *w |= x;
                }
                nbrs.push((mol.bonds()[b].order.code() as u64, ids[u]));
            }
            nbrs.sort_unstable();
            let mut key = vec![r as u64, ids[v]];
            key.extend(nbrs.iter().flat_map(|&(code, id)| [code, id]));
            next_ids.push(hash_words(&key));
            next_sets.push(set);
        }
        let mut grown: Vec<usize> = (0..n).filter(|&v| next_sets[v] != sets[v]).collect();
        grown.sort_by(|&a, &b| next_sets[a].cmp(&next_sets[b]).then(next_ids[a].cmp(&next_ids[b])));
        for v in grown {
            if !seen.insert(next_sets[v].clone()) {
                continue;
            }
            let bonds = (0..mol.bond_count())
                .filter(|&b| next_sets[v][b / 64] >> (b % 64) & 1 == 1)
                .collect();
            out.push(Environment {
                center: v,
                radius: r,
                id: next_ids[v],
                bonds,
            });
        }
        ids = next_ids;
        sets = next_sets;
    }
    out
}

/// Morgan fingerprint: one bit per emitted environment, at position
/// `id mod nbits`.
pub fn morgan_fingerprint(mol: &Molecule, radius: u32, nbits: usize) -> BitFingerprint {
    let mut fp = BitFingerprint::new(nbits, radius);
    for env in environments(mol, radius) {
        fp.set((env.id % nbits as u64) as usize);
    }
    fp
}

/// |a ∧ b| / |a ∨ b|, and 1.0 when both are empty.
pub fn tanimoto(a: &BitFingerprint, b: &BitFingerprint) -> Result<f64, FingerprintError> {
    if a.nbits != b.nbits {
        return Err(FingerprintError::LengthMismatch {
            left: a.nbits,
            right: b.nbits,
        });
    }
    let (mut inter, mut union) = (0u32, 0u32);
    for (x, y) in a.words.iter().zip(&b.words) {
        inter += (x & y).count_ones();
        union += (x | y).count_ones();
    }
    Ok(if union == 0 { 1.0 } else { inter as f64 / union as f64 })
}

/// A dense real-valued feature vector, e.g. an external encoder output.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<FeatureVector, FingerprintError> {
        if values.is_empty() {
            return Err(FingerprintError::EmptyVector);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(FingerprintError::NonFinite(i));
        }
        Ok(FeatureVector { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

pub fn cosine(u: &FeatureVector, v: &FeatureVector) -> Result<f64, FingerprintError> {
    if u.dim() != v.dim() {
        return Err(FingerprintError::LengthMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return Err(FingerprintError::ZeroVector);
    }
    let dot: f64 = u.values.iter().zip(&v.values).map(|(a, b)| a * b).sum();
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}
