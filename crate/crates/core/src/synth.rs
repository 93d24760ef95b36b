//! Random molecule generators for benchmarks, property tests and
//! acceptance runs.
//!
//! Molecules are assembled by bonding building blocks (rings and functional
//! groups) at atoms that still carry hydrogens, so every output is valid by
//! construction.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::molgraph::{parse_smiles, Atom, Bond, BondOrder, Molecule};

const RINGS: &[&str] = &[
    "c1ccccc1",
    "c1ccccc1",
    "c1ccccc1",
    "c1ccncc1",
    "c1cncnc1",
    "c1ccsc1",
    "c1ccoc1",
    "c1cc[nH]c1",
    "c1cn[nH]c1",
    "c1cscn1",
    "C1CCCCC1",
    "C1CCNCC1",
    "C1CNCCN1",
    "C1COCCN1",
    "C1CCCC1",
    "C1CCOC1",
    "C1CC1",
    "c1ccc2ccccc2c1",
    "c1ccc2[nH]ccc2c1",
    "O=C1CCCN1",
];

// attachment is always at atom 0
const GROUPS: &[&str] = &[
    "C",
    "C",
    "C",
    "CC",
    "O",
    "N",
    "C(=O)N",
    "C(=O)O",
    "C(=O)[O-]",
    "NC(=O)C",
    "C(=O)OC",
    "S(=O)(=O)N",
    "S(C)(=O)=O",
    "C#N",
    "F",
    "F",
    "Cl",
    "Br",
    "OC",
    "C(F)(F)F",
    "N(C)C",
    "C=O",
    "CO",
    "CN",
    "C=C",
    "CC(C)C",
    "[NH3+]",
    "OCCO",
    "CCN",
    "C=CC=C",
];

#[derive(Debug, Clone)]
pub struct Synthesizer {
    rings: Vec<Molecule>,
    groups: Vec<Molecule>,
}

impl Default for Synthesizer {
    fn default() -> Self {
        Synthesizer::new()
    }
}

struct Builder {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
}

impl Builder {
    fn attachable(&self) -> Vec<usize> {
        (0..self.atoms.len())
            .filter(|&i| self.atoms[i].explicit_h > 0)
            .collect()
    }

    fn add(&mut self, block: &Molecule, block_atom: usize, at: Option<usize>) {
        let offset = self.atoms.len();
        self.atoms.extend(block.atoms().iter().cloned());
        self.bonds.extend(
            block
                .bonds()
                .iter()
                .map(|b| Bond::new(b.a + offset, b.b + offset, b.order)),
        );
        if let Some(at) = at {
            self.bonds.push(Bond::new(at, offset + block_atom, BondOrder::Single));
            self.atoms[at].explicit_h -= 1;
            self.atoms[offset + block_atom].explicit_h -= 1;
        }
    }

    fn finish(self) -> Molecule {
        let mut mol = Molecule::from_parts(self.atoms, self.bonds, "").expect("generated molecules are valid");
        let smiles = mol.canonical_smiles();
        mol = parse_smiles(&smiles).expect("canonical output parses");
        mol
    }
}

impl Synthesizer {
    pub fn new() -> Self {
        let parse = |s: &&str| parse_smiles(s).expect("building block parses");
        Synthesizer {
            rings: RINGS.iter().map(parse).collect(),
            groups: GROUPS.iter().map(parse).collect(),
        }
    }

    /// A drug-like molecule of roughly 12-40 heavy atoms: one to four ring
    /// systems decorated with functional groups.
    pub fn drug_like<R: Rng + ?Sized>(&self, rng: &mut R) -> Molecule {
        loop {
            // saturated scaffolds occasionally run out of attachment sites
            if let Some(mol) = self.try_drug_like(rng) {
                return mol;
            }
        }
    }

    fn try_drug_like<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Molecule> {
        let target = rng.random_range(12..=40);
        let mut b = Builder {
            atoms: Vec::new(),
            bonds: Vec::new(),
        };
        b.add(self.rings.choose(rng).unwrap(), 0, None);
        let mut rings = 1;
        while b.atoms.len() < target {
            let sites = b.attachable();
            let Some(&at) = sites.choose(rng) else { break };
            let room = target + 4 - b.atoms.len();
            if rings < 4 && rng.random_bool(0.3) {
                let ring = self.rings.choose(rng).unwrap();
                if ring.atom_count() <= room {
                    let ring_sites: Vec<usize> = (0..ring.atom_count())
                        .filter(|&i| ring.atom(i).explicit_h > 0)
                        .collect();
                    let &site = ring_sites.choose(rng).unwrap();
                    b.add(ring, site, Some(at));
                    rings += 1;
                    continue;
                }
            }
            let group = self.groups.choose(rng).unwrap();
            if group.atom_count() <= room {
                b.add(group, 0, Some(at));
            }
        }
        (b.atoms.len() >= 12).then(|| b.finish())
    }

    /// A small molecule of at most `max_atoms` heavy atoms: a random tree
    /// of C/N/O/S/halogen atoms, optionally grown from a small ring.
    pub fn small<R: Rng + ?Sized>(&self, rng: &mut R, max_atoms: usize) -> Molecule {
        let max_atoms = max_atoms.max(1);
        let target = rng.random_range(1..=max_atoms);
        let mut b = Builder {
            atoms: Vec::new(),
            bonds: Vec::new(),
        };
        if target >= 5 && rng.random_bool(0.35) {
            let fitting: Vec<&Molecule> = self.rings.iter().filter(|r| r.atom_count() <= target).collect();
            b.add(fitting.choose(rng).unwrap(), 0, None);
        } else {
            b.add(&random_atom(rng), 0, None);
        }
        grow_tree(&mut b, rng, target);
        b.finish()
    }

    /// A random acyclic molecule of at most `max_atoms` heavy atoms.
    pub fn small_acyclic<R: Rng + ?Sized>(&self, rng: &mut R, max_atoms: usize) -> Molecule {
        let target = rng.random_range(1..=max_atoms.max(1));
        let mut b = Builder {
            atoms: Vec::new(),
            bonds: Vec::new(),
        };
        b.add(&random_atom(rng), 0, None);
        grow_tree(&mut b, rng, target);
        b.finish()
    }
}

fn random_atom<R: Rng + ?Sized>(rng: &mut R) -> Molecule {
    let symbol = *["C", "C", "C", "C", "C", "C", "N", "N", "O", "O", "S", "F", "Cl"]
        .choose(rng)
        .unwrap();
    parse_smiles(symbol).unwrap()
}

fn grow_tree<R: Rng + ?Sized>(b: &mut Builder, rng: &mut R, target: usize) {
    while b.atoms.len() < target {
        let sites = b.attachable();
        let Some(&at) = sites.choose(rng) else { break };
        let atom = random_atom(rng);
        let double = rng.random_bool(0.15)
            && b.atoms[at].explicit_h >= 2
            && atom.atom(0).explicit_h >= 2
            && !b.atoms[at].aromatic;
        b.add(&atom, 0, Some(at));
        if double {
            let last = b.bonds.len() - 1;
            b.bonds[last].order = BondOrder::Double;
            b.atoms[at].explicit_h -= 1;
            let new = b.atoms.len() - 1;
            b.atoms[new].explicit_h -= 1;
        }
    }
}
