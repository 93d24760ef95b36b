use std::fmt;

/// A chemical element, stored as its atomic number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(u8);

// (symbol, standard atomic weight)
const TABLE: [(&str, f64); 86] = [
    ("H", 1.008),
    ("He", 4.0026),
    ("Li", 6.94),
    ("Be", 9.0122),
    ("B", 10.81),
    ("C", 12.011),
    ("N", 14.007),
    ("O", 15.999),
    ("F", 18.998),
    ("Ne", 20.180),
    ("Na", 22.990),
    ("Mg", 24.305),
    ("Al", 26.982),
    ("Si", 28.085),
    ("P", 30.974),
    ("S", 32.06),
    ("Cl", 35.45),
    ("Ar", 39.948),
    ("K", 39.098),
    ("Ca", 40.078),
    ("Sc", 44.956),
    ("Ti", 47.867),
    ("V", 50.942),
    ("Cr", 51.996),
    ("Mn", 54.938),
    ("Fe", 55.845),
    ("Co", 58.933),
    ("Ni", 58.693),
    ("Cu", 63.546),
    ("Zn", 65.38),
    ("Ga", 69.723),
    ("Ge", 72.630),
    ("As", 74.922),
    ("Se", 78.971),
    ("Br", 79.904),
    ("Kr", 83.798),
    ("Rb", 85.468),
    ("Sr", 87.62),
    ("Y", 88.906),
    ("Zr", 91.224),
    ("Nb", 92.906),
    ("Mo", 95.95),
    ("Tc", 98.0),
    ("Ru", 101.07),
    ("Rh", 102.91),
    ("Pd", 106.42),
    ("Ag", 107.87),
    ("Cd", 112.41),
    ("In", 114.82),
    ("Sn", 118.71),
    ("Sb", 121.76),
    ("Te", 127.60),
    ("I", 126.90),
    ("Xe", 131.29),
    ("Cs", 132.91),
    ("Ba", 137.33),
    ("La", 138.91),
    ("Ce", 140.12),
    ("Pr", 140.91),
    ("Nd", 144.24),
    ("Pm", 145.0),
    ("Sm", 150.36),
    ("Eu", 151.96),
    ("Gd", 157.25),
    ("Tb", 158.93),
    ("Dy", 162.50),
    ("Ho", 164.93),
    ("Er", 167.26),
    ("Tm", 168.93),
    ("Yb", 173.05),
    ("Lu", 174.97),
    ("Hf", 178.49),
    ("Ta", 180.95),
    ("W", 183.84),
    ("Re", 186.21),
    ("Os", 190.23),
    ("Ir", 192.22),
    ("Pt", 195.08),
    ("Au", 196.97),
    ("Hg", 200.59),
    ("Tl", 204.38),
    ("Pb", 207.2),
    ("Bi", 208.98),
    ("Po", 209.0),
    ("At", 210.0),
    ("Rn", 222.0),
];

pub const HYDROGEN_MASS: f64 = 1.008;

impl Element {
    pub const H: Element = Element(1);
    pub const B: Element = Element(5);
    pub const C: Element = Element(6);
    pub const N: Element = Element(7);
    pub const O: Element = Element(8);
    pub const F: Element = Element(9);
    pub const P: Element = Element(15);
    pub const S: Element = Element(16);
    pub const CL: Element = Element(17);
    pub const BR: Element = Element(35);
    pub const I: Element = Element(53);

    pub fn from_atomic_number(z: u8) -> Option<Element> {
        (1..=TABLE.len() as u8).contains(&z).then_some(Element(z))
    }

    pub fn from_symbol(symbol: &str) -> Option<Element> {
        TABLE
            .iter()
            .position(|(s, _)| *s == symbol)
            .map(|i| Element(i as u8 + 1))
    }

    pub fn atomic_number(self) -> u8 {
        self.0
    }

    pub fn symbol(self) -> &'static str {
        TABLE[self.0 as usize - 1].0
    }

    /// Standard atomic weight in g/mol.
    pub fn mass(self) -> f64 {
        TABLE[self.0 as usize - 1].1
    }

    /// Members of the SMILES organic subset may be written without brackets.
    pub fn is_organic_subset(self) -> bool {
        matches!(self.0, 5 | 6 | 7 | 8 | 9 | 15 | 16 | 17 | 35 | 53)
    }

    /// Elements that may be written as lowercase aromatic atoms.
    pub fn can_be_aromatic(self) -> bool {
        // b c n o p s, plus bracket-only as, se, te
        matches!(self.0, 5 | 6 | 7 | 8 | 15 | 16 | 33 | 34 | 52)
    }

    pub fn aromatic_symbol(self) -> Option<&'static str> {
        Some(match self.0 {
            5 => "b",
            6 => "c",
            7 => "n",
            8 => "o",
            15 => "p",
            16 => "s",
            33 => "as",
            34 => "se",
            52 => "te",
            _ => return None,
        })
    }

    /// Default valences used to infer implicit hydrogens for unbracketed atoms.
    pub fn default_valences(self) -> &'static [u8] {
        match self.0 {
            5 => &[3],
            6 => &[4],
            7 => &[3, 5],
            8 => &[2],
            15 => &[3, 5],
            16 => &[2, 4, 6],
            9 | 17 | 35 | 53 => &[1],
            _ => &[],
        }
    }

    fn main_group(self) -> Option<i32> {
        Some(match self.0 {
            5 | 13 | 31 | 49 | 81 => 13,
            6 | 14 | 32 | 50 | 82 => 14,
            7 | 15 | 33 | 51 | 83 => 15,
            8 | 16 | 34 | 52 | 84 => 16,
            9 | 17 | 35 | 53 | 85 => 17,
            _ => return None,
        })
    }

    fn period(self) -> u8 {
        match self.0 {
            1..=2 => 1,
            3..=10 => 2,
            11..=18 => 3,
            19..=36 => 4,
            37..=54 => 5,
            _ => 6,
        }
    }

    /// Largest total valence allowed for this element at the given formal
    /// charge, or `None` when the element is not valence-checked (metals,
    /// noble gases, exotic charge states).
    ///
    /// Charged atoms take the valences of their isoelectronic main-group
    /// neighbour (N+ behaves like C, O- like F). Second-row atoms are limited
    /// to their lowest valence except neutral nitrogen, which keeps the
    /// pentavalent form the SMILES valence table allows.
    pub fn max_valence(self, charge: i8) -> Option<u8> {
        if self == Element::H {
            return Some(1u8.saturating_sub(charge.unsigned_abs()));
        }
        let group = self.main_group()?;
        let effective = group - charge as i32;
        let valences: &[u8] = match effective {
            13 => &[3],
            14 => &[4],
            15 => &[3, 5],
            16 => &[2, 4, 6],
            17 => &[1, 3, 5, 7],
            18 => &[0],
            _ => return None,
        };
        if self.period() == 2 && !(self == Element::N && charge == 0) {
            Some(valences[0])
        } else {
            valences.last().copied()
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Implicit hydrogen count for an unbracketed organic-subset atom whose
/// explicit bonds sum to `bond_sum` (aromatic bonds counted as 1).
pub fn implicit_hydrogens(element: Element, aromatic: bool, bond_sum: u32) -> u8 {
    let valences = element.default_valences();
    if aromatic {
        // the aromatic system claims one valence unit
        let Some(&v) = valences.first() else { return 0 };
        return (v as u32).saturating_sub(bond_sum + 1) as u8;
    }
    valences
        .iter()
        .find(|&&v| v as u32 >= bond_sum)
        .map(|&v| (v as u32 - bond_sum) as u8)
        .unwrap_or(0)
}
