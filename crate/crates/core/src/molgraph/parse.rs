use std::collections::BTreeMap;

use super::element::implicit_hydrogens;
use super::{Atom, Bond, BondOrder, Chirality, Element, MolError, Molecule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BondSymbol {
    Single,
    Double,
    Triple,
    Aromatic,
    /// `/` or `\`: single bond with a directional marker we drop
    Directional,
}

struct PendingBond {
    a: usize,
    b: usize,
    symbol: Option<BondSymbol>,
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    atoms: Vec<Atom>,
    bracketed: Vec<bool>,
    bonds: Vec<PendingBond>,
    prev: Option<usize>,
    /// (branch point, atom count when the branch opened)
    branches: Vec<(usize, usize)>,
    pending: Option<(BondSymbol, usize)>,
    rings: BTreeMap<u32, (usize, Option<BondSymbol>, usize)>,
}

/// Parses a SMILES string into a [`Molecule`].
///
/// Supports the organic subset, bracket atoms (isotope, chirality, hydrogen
/// count, charge, atom class), branches, ring closures `1`-`9` and `%nn`,
/// aromatic lowercase atoms and dot-separated components. Implicit hydrogens
/// are resolved by the SMILES valence table and stored in
/// [`Atom::explicit_h`]. Directional `/` `\` markers are read as single bonds
/// and counted in [`Molecule::dropped_bond_stereo`].
pub fn parse_smiles(text: &str) -> Result<Molecule, MolError> {
    if text.is_empty() {
        return Err(MolError::syntax(0, "empty SMILES"));
    }
    let mut parser = Parser {
        text: text.as_bytes(),
        pos: 0,
        atoms: Vec::new(),
        bracketed: Vec::new(),
        bonds: Vec::new(),
        prev: None,
        branches: Vec::new(),
        pending: None,
        rings: BTreeMap::new(),
    };
    parser.run()?;
    parser.finish(text)
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<u8> {
        self.text.get(self.pos + offset).copied()
    }

    fn err(&self, msg: impl Into<String>) -> MolError {
        MolError::syntax(self.pos, msg)
    }

    fn run(&mut self) -> Result<(), MolError> {
        while let Some(c) = self.peek() {
            match c {
                b'(' => {
                    let Some(prev) = self.prev else {
                        return Err(self.err("branch without a preceding atom"));
                    };
                    if self.pending.is_some() {
                        return Err(self.err("bond symbol before '('"));
                    }
                    self.branches.push((prev, self.atoms.len()));
                    self.pos += 1;
                }
                b')' => {
                    if self.pending.is_some() {
                        return Err(self.err("dangling bond symbol before ')'"));
                    }
                    let Some((atom, opened_at)) = self.branches.pop() else {
                        return Err(self.err("unbalanced ')'"));
                    };
                    if self.atoms.len() == opened_at || self.prev.is_none() {
                        return Err(self.err("empty branch"));
                    }
                    self.prev = Some(atom);
                    self.pos += 1;
                }
                b'.' => {
                    if self.pending.is_some() {
                        return Err(self.err("bond symbol before '.'"));
                    }
                    if self.prev.is_none() {
                        return Err(self.err("'.' without a preceding atom"));
                    }
                    self.prev = None;
                    self.pos += 1;
                }
                b'-' | b'=' | b'#' | b':' | b'/' | b'\\' => {
                    if self.pending.is_some() {
                        return Err(self.err("consecutive bond symbols"));
                    }
                    let symbol = match c {
                        b'-' => BondSymbol::Single,
                        b'=' => BondSymbol::Double,
                        b'#' => BondSymbol::Triple,
                        b':' => BondSymbol::Aromatic,
                        _ => BondSymbol::Directional,
                    };
                    self.pending = Some((symbol, self.pos));
                    self.pos += 1;
                }
                b'$' => return Err(self.err("quadruple bonds are not supported")),
                b'0'..=b'9' | b'%' => self.ring_bond()?,
                b'[' => {
                    let atom = self.bracket_atom()?;
                    self.add_atom(atom, true)?;
                }
                _ => {
                    let atom = self.organic_atom()?;
                    self.add_atom(atom, false)?;
                }
            }
        }
        if let Some((_, pos)) = self.pending {
            return Err(MolError::syntax(pos, "dangling bond symbol"));
        }
        if !self.branches.is_empty() {
            return Err(self.err("unclosed branch"));
        }
        if let Some((num, &(_, _, pos))) = self.rings.iter().next() {
            return Err(MolError::syntax(pos, format!("unclosed ring bond {num}")));
        }
        if self.atoms.is_empty() {
            return Err(self.err("no atoms"));
        }
        Ok(())
    }

    fn add_atom(&mut self, atom: Atom, bracketed: bool) -> Result<(), MolError> {
        let idx = self.atoms.len();
        self.atoms.push(atom);
        self.bracketed.push(bracketed);
        let symbol = self.pending.take().map(|(s, _)| s);
        match self.prev {
            Some(prev) => self.bonds.push(PendingBond {
                a: prev,
                b: idx,
                symbol,
            }),
            None if symbol.is_some() => {
                return Err(self.err("bond symbol without a preceding atom"));
            }
            None => {}
        }
        self.prev = Some(idx);
        Ok(())
    }

    fn ring_bond(&mut self) -> Result<(), MolError> {
        let start = self.pos;
        let num = if self.peek() == Some(b'%') {
            let (Some(d1), Some(d2)) = (self.peek_at(1), self.peek_at(2)) else {
                return Err(self.err("'%' needs two digits"));
            };
            if !d1.is_ascii_digit() || !d2.is_ascii_digit() {
                return Err(self.err("'%' needs two digits"));
            }
            self.pos += 3;
            ((d1 - b'0') * 10 + (d2 - b'0')) as u32
        } else {
            let d = self.peek().unwrap();
            self.pos += 1;
            (d - b'0') as u32
        };
        let Some(atom) = self.prev else {
            return Err(MolError::syntax(start, "ring bond without a preceding atom"));
        };
        let symbol = self.pending.take().map(|(s, _)| s);
        match self.rings.remove(&num) {
            Some((open_atom, open_symbol, _)) => {
                let symbol = match (open_symbol, symbol) {
                    (Some(a), Some(b)) if a != b => {
                        return Err(MolError::syntax(
                            start,
                            format!("conflicting bond symbols on ring {num}"),
                        ));
                    }
                    (a, b) => a.or(b),
                };
                if open_atom == atom {
                    return Err(MolError::syntax(start, "ring bond closes on the same atom"));
                }
                self.bonds.push(PendingBond {
                    a: open_atom,
                    b: atom,
                    symbol,
                });
            }
            None => {
                self.rings.insert(num, (atom, symbol, start));
            }
        }
        Ok(())
    }

    fn organic_atom(&mut self) -> Result<Atom, MolError> {
        let c = self.peek().unwrap();
        let (element, aromatic, len) = match c {
            b'B' if self.peek_at(1) == Some(b'r') => (Element::BR, false, 2),
            b'C' if self.peek_at(1) == Some(b'l') => (Element::CL, false, 2),
            b'B' => (Element::B, false, 1),
            b'C' => (Element::C, false, 1),
            b'N' => (Element::N, false, 1),
            b'O' => (Element::O, false, 1),
            b'P' => (Element::P, false, 1),
            b'S' => (Element::S, false, 1),
            b'F' => (Element::F, false, 1),
            b'I' => (Element::I, false, 1),
            b'b' => (Element::B, true, 1),
            b'c' => (Element::C, true, 1),
            b'n' => (Element::N, true, 1),
            b'o' => (Element::O, true, 1),
            b'p' => (Element::P, true, 1),
            b's' => (Element::S, true, 1),
            _ => return Err(self.err(format!("unexpected character {:?}", c as char))),
        };
        self.pos += len;
        let mut atom = Atom::new(element);
        atom.aromatic = aromatic;
        Ok(atom)
    }

    fn read_number(&mut self) -> Option<u32> {
        let start = self.pos;
        let mut value: u32 = 0;
        while let Some(d @ b'0'..=b'9') = self.peek() {
            value = value.saturating_mul(10).saturating_add((d - b'0') as u32);
            self.pos += 1;
        }
        (self.pos > start).then_some(value)
    }

    fn bracket_atom(&mut self) -> Result<Atom, MolError> {
        self.pos += 1; // '['
        let isotope = match self.read_number() {
            Some(n) if n > u16::MAX as u32 => return Err(self.err("isotope out of range")),
            Some(n) => Some(n as u16),
            None => None,
        };

        let (element, aromatic) = self.bracket_symbol()?;
        let mut atom = Atom::new(element);
        atom.aromatic = aromatic;
        atom.isotope = isotope;

        if self.peek() == Some(b'@') {
            self.pos += 1;
            atom.chirality = Chirality::CounterClockwise;
            if self.peek() == Some(b'@') {
                self.pos += 1;
                atom.chirality = Chirality::Clockwise;
            } else if let (Some(a), Some(b)) = (self.peek(), self.peek_at(1)) {
                let class = [a, b];
                if matches!(&class, b"TH" | b"AL" | b"SP" | b"TB" | b"OH") {
                    self.pos += 2;
                    let n = self
                        .read_number()
                        .ok_or_else(|| self.err("chirality class needs a number"))?;
                    atom.chirality = match (&class, n) {
                        (b"TH", 2) | (b"AL", 2) => Chirality::Clockwise,
                        (b"TH", 1) | (b"AL", 1) => Chirality::CounterClockwise,
                        _ => Chirality::None,
                    };
                }
            }
        }

        if self.peek() == Some(b'H') {
            self.pos += 1;
            let h = self.read_number().unwrap_or(1);
            if h > 9 {
                return Err(self.err("hydrogen count out of range"));
            }
            atom.explicit_h = h as u8;
        }

        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let unit: i32 = if sign == b'+' { 1 } else { -1 };
            let magnitude = match self.read_number() {
                Some(n) => n as i32,
                None => {
                    let mut count = 1;
                    while self.peek() == Some(sign) {
                        self.pos += 1;
                        count += 1;
                    }
                    count
                }
            };
            if magnitude > 15 {
                return Err(self.err("charge out of range"));
            }
            atom.formal_charge = (unit * magnitude) as i8;
        }

        if self.peek() == Some(b':') {
            self.pos += 1;
            self.read_number()
                .ok_or_else(|| self.err("atom class needs a number"))?;
        }

        if self.peek() != Some(b']') {
            return Err(self.err("expected ']'"));
        }
        self.pos += 1;
        Ok(atom)
    }

    fn bracket_symbol(&mut self) -> Result<(Element, bool), MolError> {
        let Some(first) = self.peek() else {
            return Err(self.err("unterminated bracket atom"));
        };
        if first.is_ascii_lowercase() {
            for len in [2, 1] {
                let Some(sym) = self.text.get(self.pos..self.pos + len) else {
                    continue;
                };
                let element = match sym {
                    b"se" => Element::from_symbol("Se"),
                    b"as" => Element::from_symbol("As"),
                    b"te" => Element::from_symbol("Te"),
                    b"b" => Some(Element::B),
                    b"c" => Some(Element::C),
                    b"n" => Some(Element::N),
                    b"o" => Some(Element::O),
                    b"p" => Some(Element::P),
                    b"s" => Some(Element::S),
                    _ => None,
                };
                if let Some(e) = element {
                    self.pos += len;
                    return Ok((e, true));
                }
            }
            return Err(self.err("unknown aromatic element"));
        }
        if !first.is_ascii_uppercase() {
            return Err(self.err("expected element symbol"));
        }
        if let Some(&second) = self.text.get(self.pos + 1) {
            if second.is_ascii_lowercase() {
                let sym = [first, second];
                if let Some(e) = std::str::from_utf8(&sym).ok().and_then(Element::from_symbol) {
                    self.pos += 2;
                    return Ok((e, false));
                }
            }
        }
        let sym = [first];
        match std::str::from_utf8(&sym).ok().and_then(Element::from_symbol) {
            Some(e) => {
                self.pos += 1;
                Ok((e, false))
            }
            None => Err(self.err("unknown element")),
        }
    }

    fn finish(self, text: &str) -> Result<Molecule, MolError> {
        let mut dropped = 0u32;
        let mut implicit_aromatic = Vec::with_capacity(self.bonds.len());
        let bonds: Vec<Bond> = self
            .bonds
            .iter()
            .map(|pb| {
                let order = match pb.symbol {
                    Some(BondSymbol::Single) => BondOrder::Single,
                    Some(BondSymbol::Directional) => {
                        dropped += 1;
                        BondOrder::Single
                    }
                    Some(BondSymbol::Double) => BondOrder::Double,
                    Some(BondSymbol::Triple) => BondOrder::Triple,
                    Some(BondSymbol::Aromatic) => BondOrder::Aromatic,
                    None if self.atoms[pb.a].aromatic && self.atoms[pb.b].aromatic => BondOrder::Aromatic,
                    None => BondOrder::Single,
                };
                implicit_aromatic.push(pb.symbol.is_none() && order == BondOrder::Aromatic);
                Bond::new(pb.a, pb.b, order)
            })
            .collect();

        let mut mol = Molecule::new_unchecked(self.atoms, bonds, text.to_string())?;
        // an unmarked bond between aromatic atoms outside any ring links two
        // aromatic systems (biphenyl) and is single
        for (i, implicit) in implicit_aromatic.into_iter().enumerate() {
            if implicit && !mol.bond_in_ring[i] {
                mol.bonds[i].order = BondOrder::Single;
            }
        }
        for i in 0..mol.atoms.len() {
            if !self.bracketed[i] {
                let sum = mol.bond_order_sum(i);
                let atom = &mol.atoms[i];
                mol.atoms[i].explicit_h = implicit_hydrogens(atom.element, atom.aromatic, sum);
            }
        }
        mol.set_dropped_bond_stereo(dropped);
        mol.validate()?;
        Ok(mol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elements(m: &Molecule) -> Vec<&'static str> {
        m.atoms().iter().map(|a| a.element.symbol()).collect()
    }

    #[test]
    fn methane() {
        let m = parse_smiles("C").unwrap();
        assert_eq!(m.atom_count(), 1);
        assert_eq!(m.bond_count(), 0);
        assert_eq!(m.atom(0).explicit_h, 4);
    }

    #[test]
    fn benzene() {
        let m = parse_smiles("c1ccccc1").unwrap();
        assert_eq!(m.atom_count(), 6);
        assert_eq!(m.bond_count(), 6);
        assert!(m.atoms().iter().all(|a| a.aromatic && a.in_ring && a.explicit_h == 1));
        assert!(m.bonds().iter().all(|b| b.order == BondOrder::Aromatic));
        assert_eq!(m.components().len(), 1);
    }

    #[test]
    fn hexitol_with_stereo() {
        let m = parse_smiles("C([C@H]([C@H]([C@@H]([C@H](CO)O)O)O)O)O").unwrap();
        assert_eq!(m.heavy_atom_count(), 12);
        assert_eq!(m.atoms().iter().filter(|a| a.element == Element::C).count(), 6);
        assert_eq!(m.atoms().iter().filter(|a| a.element == Element::O).count(), 6);
        assert_eq!(m.atom(1).chirality, Chirality::CounterClockwise);
        assert_eq!(m.atom(3).chirality, Chirality::Clockwise);
    }

    #[test]
    fn bracket_atoms() {
        let m = parse_smiles("[NH4+].[O-]C(=O)C").unwrap();
        assert_eq!(m.atom(0).formal_charge, 1);
        assert_eq!(m.atom(0).explicit_h, 4);
        assert_eq!(m.atom(1).formal_charge, -1);
        assert_eq!(m.components().len(), 2);

        let m = parse_smiles("[13CH3:7][Fe++]").unwrap();
        assert_eq!(m.atom(0).isotope, Some(13));
        assert_eq!(m.atom(1).formal_charge, 2);
        assert_eq!(elements(&m), ["C", "Fe"]);

        let m = parse_smiles("c1cc[nH]c1").unwrap();
        assert_eq!(m.atom(3).explicit_h, 1);
        let m = parse_smiles("[se]1cccc1").unwrap();
        assert!(m.atom(0).aromatic);
        let m = parse_smiles("[Sc]").unwrap();
        assert_eq!(elements(&m), ["Sc"]);
    }

    #[test]
    fn two_letter_organic() {
        let m = parse_smiles("ClCCBr").unwrap();
        assert_eq!(elements(&m), ["Cl", "C", "C", "Br"]);
    }

    #[test]
    fn ring_closures() {
        let m = parse_smiles("C%12CC%12").unwrap();
        assert_eq!(m.bond_count(), 3);
        let m = parse_smiles("C1CC=1").unwrap();
        assert!(m.bonds().iter().any(|b| b.order == BondOrder::Double));
        assert!(parse_smiles("C=1CC-1").is_err());
        assert!(parse_smiles("C11").is_err());
        assert!(parse_smiles("C1C1").is_err());
        // digit reuse after closing
        let m = parse_smiles("C1CC1C1CC1").unwrap();
        assert_eq!(m.bond_count(), 7);
    }

    #[test]
    fn biphenyl_link_is_single() {
        let m = parse_smiles("c1ccccc1c1ccccc1").unwrap();
        let singles = m.bonds().iter().filter(|b| b.order == BondOrder::Single).count();
        assert_eq!(singles, 1);
        assert!(m.atoms().iter().all(|a| a.explicit_h <= 1));
        // explicit ':' stays aromatic
        let m = parse_smiles("c:c").unwrap();
        assert_eq!(m.bonds()[0].order, BondOrder::Aromatic);
    }

    #[test]
    fn directional_bonds_are_dropped() {
        let m = parse_smiles("F/C=C/F").unwrap();
        assert_eq!(m.dropped_bond_stereo(), 2);
        assert_eq!(m.bonds()[0].order, BondOrder::Single);
    }

    #[test]
    fn syntax_errors() {
        for bad in [
            "", "C(", "C)", "C1CC", "(C)", "C=", "=C", "C==C", "[C", "[Xx]", "Q", "C..C", "[CH10]", "C$C", "C()", "*C",
            " C",
        ] {
            assert!(parse_smiles(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn valence_errors() {
        assert!(matches!(parse_smiles("C(C)(C)(C)(C)C"), Err(MolError::Valence { .. })));
        assert!(matches!(parse_smiles("O=O=O"), Err(MolError::Valence { .. })));
        assert!(parse_smiles("[N+](C)(C)(C)C").is_ok());
        assert!(parse_smiles("CN(=O)=O").is_ok());
        assert!(parse_smiles("CS(=O)(=O)C").is_ok());
        assert!(parse_smiles("[O-][N+](=O)c1ccccc1").is_ok());
    }
}
