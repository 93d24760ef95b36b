//! Molecular graphs: SMILES parsing, canonical atom ranking and canonical
//! SMILES output.

mod canon;
pub mod corpus;
mod element;
mod parse;

use std::fmt;

use thiserror::Error;

pub use canon::{canonical_ranks, LabeledGraph};
pub use element::{implicit_hydrogens, Element, HYDROGEN_MASS};
pub use parse::parse_smiles;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MolError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("atom {atom} ({element}) has valence {valence}, maximum is {max}")]
    Valence {
        atom: usize,
        element: Element,
        valence: u32,
        max: u8,
    },
    #[error("invalid graph: {0}")]
    Graph(String),
}

impl MolError {
    pub(crate) fn syntax(pos: usize, msg: impl Into<String>) -> Self {
        MolError::Syntax { pos, msg: msg.into() }
    }
}

/// Tetrahedral stereo annotation as written in the input. Kept on the atom
/// but not used by canonicalization or canonical output.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Chirality {
    #[default]
    None,
    /// `@`
    CounterClockwise,
    /// `@@`
    Clockwise,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub element: Element,
    pub formal_charge: i8,
    pub aromatic: bool,
    /// Hydrogens attached to this atom that are not graph nodes, whether
    /// written in brackets or implied by the valence rules.
    pub explicit_h: u8,
    pub isotope: Option<u16>,
    pub chirality: Chirality,
    /// Derived from the bond graph; ignored on input to [`Molecule::from_parts`].
    pub in_ring: bool,
}

impl Atom {
    pub fn new(element: Element) -> Self {
        Atom {
            element,
            formal_charge: 0,
            aromatic: false,
            explicit_h: 0,
            isotope: None,
            chirality: Chirality::None,
            in_ring: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Contribution to the bond-order sum used by the valence rules.
    pub fn valence(self) -> u32 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }

    pub fn is_multiple(self) -> bool {
        matches!(self, BondOrder::Double | BondOrder::Triple)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

impl Bond {
    pub fn new(a: usize, b: usize, order: BondOrder) -> Self {
        Bond { a, b, order }
    }

    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }
}

/// An attributed, simple, undirected molecular graph. Immutable once built.
#[derive(Debug, Clone)]
pub struct Molecule {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    bond_in_ring: Vec<bool>,
    /// atom -> [(neighbor, bond index)]
    adjacency: Vec<Vec<(usize, usize)>>,
    source: String,
    dropped_bond_stereo: u32,
}

impl Molecule {
    /// Builds a molecule from atoms and bonds, validating the graph and the
    /// per-atom valence limits. `in_ring` flags are recomputed.
    pub fn from_parts(atoms: Vec<Atom>, bonds: Vec<Bond>, source: impl Into<String>) -> Result<Molecule, MolError> {
        let mol = Molecule::assemble(atoms, bonds, source.into())?;
        mol.check_valences()?;
        Ok(mol)
    }

    fn assemble(mut atoms: Vec<Atom>, bonds: Vec<Bond>, source: String) -> Result<Molecule, MolError> {
        let n = atoms.len();
        let mut adjacency = vec![Vec::new(); n];
        for (i, bond) in bonds.iter().enumerate() {
            if bond.a >= n || bond.b >= n {
                return Err(MolError::Graph(format!("bond {i} references a missing atom")));
            }
            if bond.a == bond.b {
                return Err(MolError::Graph(format!("bond {i} is a self loop")));
            }
            if adjacency[bond.a].iter().any(|&(nb, _)| nb == bond.b) {
                return Err(MolError::Graph(format!(
                    "duplicate bond between atoms {} and {}",
                    bond.a, bond.b
                )));
            }
            adjacency[bond.a].push((bond.b, i));
            adjacency[bond.b].push((bond.a, i));
        }
        let bond_in_ring = ring_bonds(n, &bonds, &adjacency);
        for atom in atoms.iter_mut() {
            atom.in_ring = false;
        }
        for (bond, &ring) in bonds.iter().zip(&bond_in_ring) {
            if ring {
                atoms[bond.a].in_ring = true;
                atoms[bond.b].in_ring = true;
            }
        }
        Ok(Molecule {
            atoms,
            bonds,
            bond_in_ring,
            adjacency,
            source,
            dropped_bond_stereo: 0,
        })
    }

    fn check_valences(&self) -> Result<(), MolError> {
        for (i, atom) in self.atoms.iter().enumerate() {
            let Some(max) = atom.element.max_valence(atom.formal_charge) else {
                continue;
            };
            let valence = self.bond_order_sum(i) + atom.explicit_h as u32;
            if valence > max as u32 {
                return Err(MolError::Valence {
                    atom: i,
                    element: atom.element,
                    valence,
                    max,
                });
            }
        }
        Ok(())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    /// `(neighbor atom, bond index)` pairs of atom `i`.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<&Bond> {
        self.adjacency[a]
            .iter()
            .find(|&&(nb, _)| nb == b)
            .map(|&(_, bi)| &self.bonds[bi])
    }

    pub fn bond_in_ring(&self, bond: usize) -> bool {
        self.bond_in_ring[bond]
    }

    /// Sum of bond orders at atom `i`, aromatic bonds counted as 1.
    pub fn bond_order_sum(&self, i: usize) -> u32 {
        self.adjacency[i]
            .iter()
            .map(|&(_, b)| self.bonds[b].order.valence())
            .sum()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Number of `/` and `\` bond markers discarded while parsing.
    pub fn dropped_bond_stereo(&self) -> u32 {
        self.dropped_bond_stereo
    }

    pub fn heavy_atom_count(&self) -> usize {
        self.atoms.iter().filter(|a| a.element != Element::H).count()
    }

    /// Connected components as sorted atom index lists, ordered by their
    /// smallest atom index.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.atoms.len()];
        let mut out = Vec::new();
        for start in 0..self.atoms.len() {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head];
                head += 1;
                for &(nb, _) in &self.adjacency[v] {
                    if !seen[nb] {
                        seen[nb] = true;
                        comp.push(nb);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Returns the same molecule with atom `i` moved to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Molecule {
        assert_eq!(perm.len(), self.atoms.len(), "permutation length mismatch");
        let mut atoms = vec![None; self.atoms.len()];
        for (i, atom) in self.atoms.iter().enumerate() {
            atoms[perm[i]] = Some(atom.clone());
        }
        let atoms = atoms
            .into_iter()
            .map(|a| a.expect("perm is not a permutation"))
            .collect();
        let bonds = self
            .bonds
            .iter()
            .map(|b| Bond::new(perm[b.a], perm[b.b], b.order))
            .collect();
        let mut mol = Molecule::assemble(atoms, bonds, self.source.clone()).expect("permutation preserves validity");
        mol.dropped_bond_stereo = self.dropped_bond_stereo;
        mol
    }

    /// Canonical SMILES, see [`write_smiles`].
    pub fn canonical_smiles(&self) -> String {
        write_smiles(self)
    }

    /// Canonical SMILES of the vertex-induced subgraph on `atoms`.
    ///
    /// Fragment identity ignores hydrogen counts and stereo: organic-subset
    /// atoms get the hydrogens implied by their bonds inside the fragment,
    /// other atoms are written as bare bracket atoms.
    pub fn fragment_smiles(&self, atoms: &[usize]) -> String {
        LabeledGraph::fragment(self, atoms).canonical_smiles()
    }

    pub(crate) fn set_dropped_bond_stereo(&mut self, n: u32) {
        self.dropped_bond_stereo = n;
    }

    pub(crate) fn new_unchecked(atoms: Vec<Atom>, bonds: Vec<Bond>, source: String) -> Result<Molecule, MolError> {
        Molecule::assemble(atoms, bonds, source)
    }

    pub(crate) fn validate(&self) -> Result<(), MolError> {
        self.check_valences()
    }
}

impl fmt::Display for Molecule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_smiles(self))
    }
}

/// Ring membership of each bond: a bond is in a ring iff it is not a bridge.
fn ring_bonds(n: usize, bonds: &[Bond], adjacency: &[Vec<(usize, usize)>]) -> Vec<bool> {
    let mut in_ring = vec![true; bonds.len()];
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0;
    // (vertex, parent bond, next neighbor slot)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        stack.push((root, usize::MAX, 0));
        while let Some(top) = stack.last_mut() {
            let (v, parent_bond) = (top.0, top.1);
            if top.2 < adjacency[v].len() {
                let (w, b) = adjacency[v][top.2];
                top.2 += 1;
                if b == parent_bond {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, b, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] > disc[p] {
                        in_ring[parent_bond] = false;
                    }
                }
            }
        }
    }
    in_ring
}

/// Deterministic canonical SMILES. The output depends only on the
/// isomorphism class of the attributed graph (element, charge, aromatic
/// flag, isotope, hydrogen count, bond orders); stereo annotations are not
/// written.
pub fn write_smiles(mol: &Molecule) -> String {
    LabeledGraph::from_molecule(mol).canonical_smiles()
}

/// True iff `text` parses into a valid molecule.
pub fn is_valid_smiles(text: &str) -> bool {
    parse_smiles(text).is_ok()
}

/// Molecular weight in g/mol, including implicit and bracket hydrogens.
pub fn molecular_weight(mol: &Molecule) -> f64 {
    mol.atoms()
        .iter()
        .map(|a| a.element.mass() + a.explicit_h as f64 * HYDROGEN_MASS)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_flags() {
        let m = parse_smiles("C1CC1CC").unwrap();
        let flags: Vec<bool> = m.atoms().iter().map(|a| a.in_ring).collect();
        assert_eq!(flags, [true, true, true, false, false]);
        let ring_bond_count = (0..m.bond_count()).filter(|&b| m.bond_in_ring(b)).count();
        assert_eq!(ring_bond_count, 3);
    }

    #[test]
    fn weights() {
        let methane = parse_smiles("C").unwrap();
        assert!((molecular_weight(&methane) - 16.04).abs() < 0.01);
        let water = parse_smiles("O").unwrap();
        assert!((molecular_weight(&water) - 18.02).abs() < 0.01);
        // asparagine, 132.115 g/mol
        let asn = parse_smiles("NC(=O)C[C@H](N)C(=O)O").unwrap();
        assert!((molecular_weight(&asn) - 132.115).abs() < 0.1);
    }

    #[test]
    fn weight_is_additive_over_components() {
        let a = parse_smiles("CCO").unwrap();
        let b = parse_smiles("c1ccccc1").unwrap();
        let ab = parse_smiles("CCO.c1ccccc1").unwrap();
        let sum = molecular_weight(&a) + molecular_weight(&b);
        assert!((molecular_weight(&ab) - sum).abs() < 1e-9);
    }

    #[test]
    fn validity_examples() {
        assert!(is_valid_smiles("C1CC1"));
        assert!(!is_valid_smiles("C1CC"));
        assert!(!is_valid_smiles("C(C)(C)(C)(C)C"));
    }

    #[test]
    fn from_parts_rejects_bad_graphs() {
        let atoms = vec![Atom::new(Element::C), Atom::new(Element::C)];
        let dup = vec![Bond::new(0, 1, BondOrder::Single), Bond::new(1, 0, BondOrder::Single)];
        assert!(matches!(
            Molecule::from_parts(atoms.clone(), dup, ""),
            Err(MolError::Graph(_))
        ));
        let missing = vec![Bond::new(0, 2, BondOrder::Single)];
        assert!(Molecule::from_parts(atoms.clone(), missing, "").is_err());
        let self_loop = vec![Bond::new(1, 1, BondOrder::Single)];
        assert!(Molecule::from_parts(atoms, self_loop, "").is_err());
    }
}
