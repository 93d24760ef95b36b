use std::fmt::Write;

use super::element::implicit_hydrogens;
use super::{BondOrder, Element, Molecule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct AtomLabel {
    element: Element,
    isotope: u16,
    charge: i8,
    h: u8,
    aromatic: bool,
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    to: u32,
    order: BondOrder,
    id: u32,
}

/// The attribute view of a graph that canonicalization works on: atom
/// labels (element, isotope, charge, hydrogen count, aromatic flag) and bond
/// orders. Built either from a whole molecule or from a vertex-induced
/// fragment of one.
#[derive(Debug, Clone)]
pub struct LabeledGraph {
    labels: Vec<AtomLabel>,
    adj: Vec<Vec<Edge>>,
    edge_count: usize,
}

impl LabeledGraph {
    pub fn from_molecule(mol: &Molecule) -> LabeledGraph {
        let labels = mol
            .atoms()
            .iter()
            .map(|a| AtomLabel {
                element: a.element,
                isotope: a.isotope.unwrap_or(0),
                charge: a.formal_charge,
                h: a.explicit_h,
                aromatic: a.aromatic,
            })
            .collect();
        let mut adj = vec![Vec::new(); mol.atom_count()];
        for (id, bond) in mol.bonds().iter().enumerate() {
            adj[bond.a].push(Edge {
                to: bond.b as u32,
                order: bond.order,
                id: id as u32,
            });
            adj[bond.b].push(Edge {
                to: bond.a as u32,
                order: bond.order,
                id: id as u32,
            });
        }
        LabeledGraph {
            labels,
            adj,
            edge_count: mol.bond_count(),
        }
    }

    /// Vertex-induced subgraph on `atoms` (local index = position in the
    /// slice). Organic-subset atoms get the hydrogens implied by their
    /// bonds inside the fragment; other atoms carry none.
    pub fn fragment(mol: &Molecule, atoms: &[usize]) -> LabeledGraph {
        let local = |parent: usize| atoms.iter().position(|&a| a == parent);
        let mut adj = vec![Vec::new(); atoms.len()];
        let mut edge_count = 0u32;
        for (i, &a) in atoms.iter().enumerate() {
            for &(nb, bond) in mol.neighbors(a) {
                let Some(j) = local(nb) else { continue };
                if j > i {
                    let order = mol.bonds()[bond].order;
                    adj[i].push(Edge {
                        to: j as u32,
                        order,
                        id: edge_count,
                    });
                    adj[j].push(Edge {
                        to: i as u32,
                        order,
                        id: edge_count,
                    });
                    edge_count += 1;
                }
            }
        }
        let labels = atoms
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let atom = mol.atom(a);
                let plain = atom.element.is_organic_subset() && atom.formal_charge == 0 && atom.isotope.is_none();
                let h = if plain {
                    let sum: u32 = adj[i].iter().map(|e| e.order.valence()).sum();
                    implicit_hydrogens(atom.element, atom.aromatic, sum)
                } else {
                    0
                };
                AtomLabel {
                    element: atom.element,
                    isotope: atom.isotope.unwrap_or(0),
                    charge: atom.formal_charge,
                    h,
                    aromatic: atom.aromatic,
                }
            })
            .collect();
        LabeledGraph {
            labels,
            adj,
            edge_count: edge_count as usize,
        }
    }

    pub fn atom_count(&self) -> usize {
        self.labels.len()
    }

    /// Canonical ranks, a permutation of `0..n`.
    ///
    /// Atoms start from an invariant of (degree, element, isotope, charge,
    /// hydrogens, aromatic) and are refined by the sorted multiset of
    /// (neighbor class, bond order) until the partition is stable. Remaining
    /// ties are broken by promoting the lowest-index atom of the lowest tied
    /// class and refining again.
    pub fn ranks(&self) -> Vec<u32> {
        let n = self.labels.len();
        if n == 0 {
            return Vec::new();
        }
        let initial: Vec<(usize, AtomLabel)> = (0..n).map(|v| (self.adj[v].len(), self.labels[v])).collect();
        let mut classes = rank_by_key(&initial);
        self.refine(&mut classes);
        let mut sorted: Vec<u32> = Vec::with_capacity(n);
        loop {
            sorted.clear();
            sorted.extend_from_slice(&classes);
            sorted.sort_unstable();
            let tied = sorted.windows(2).find(|w| w[0] == w[1]).map(|w| w[0]);
            let Some(class) = tied else { break };
            let chosen = (0..n).find(|&v| classes[v] == class).unwrap();
            for (v, c) in classes.iter_mut().enumerate() {
                if *c == class && v != chosen {
                    *c = class + 1;
                }
            }
            self.refine(&mut classes);
        }
        classes
    }

    fn refine(&self, classes: &mut Vec<u32>) {
        let n = classes.len();
        let mut distinct = count_distinct(classes);
        while distinct < n {
            let keys: Vec<(u32, Vec<(u32, u8)>)> = (0..n)
                .map(|v| {
                    let mut nbrs: Vec<(u32, u8)> = self.adj[v]
                        .iter()
                        .map(|e| (classes[e.to as usize], e.order.code()))
                        .collect();
                    nbrs.sort_unstable();
                    (classes[v], nbrs)
                })
                .collect();
            let next = rank_by_key(&keys);
            let next_distinct = count_distinct(&next);
            if next_distinct == distinct {
                break;
            }
            *classes = next;
            distinct = next_distinct;
        }
    }

    /// Canonical SMILES of this graph.
    pub fn canonical_smiles(&self) -> String {
        let ranks = self.ranks();
        Writer::new(self, &ranks).write()
    }

    fn bond_sum(&self, v: usize) -> u32 {
        self.adj[v].iter().map(|e| e.order.valence()).sum()
    }

    fn ring_edges(&self) -> Vec<bool> {
        // bridges via DFS lowpoints; graphs here are small enough to recurse
        fn visit(
            g: &LabeledGraph,
            v: usize,
            parent_edge: u32,
            time: &mut usize,
            disc: &mut [usize],
            low: &mut [usize],
            ring: &mut [bool],
        ) {
            disc[v] = *time;
            low[v] = *time;
            *time += 1;
            for e in &g.adj[v] {
                if e.id == parent_edge {
                    continue;
                }
                let w = e.to as usize;
                if disc[w] == usize::MAX {
                    visit(g, w, e.id, time, disc, low, ring);
                    low[v] = low[v].min(low[w]);
                    if low[w] > disc[v] {
                        ring[e.id as usize] = false;
                    }
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            }
        }
        let n = self.labels.len();
        let mut ring = vec![true; self.edge_count];
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut time = 0;
        for v in 0..n {
            if disc[v] == usize::MAX {
                visit(self, v, u32::MAX, &mut time, &mut disc, &mut low, &mut ring);
            }
        }
        ring
    }
}

fn count_distinct(classes: &[u32]) -> usize {
    let mut sorted = classes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.len()
}

/// Class of each item = number of items with a strictly smaller key.
fn rank_by_key<K: Ord>(keys: &[K]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut classes = vec![0u32; keys.len()];
    for (pos, &i) in order.iter().enumerate() {
        classes[i] = if pos > 0 && keys[order[pos - 1]] == keys[i] {
            classes[order[pos - 1]]
        } else {
            pos as u32
        };
    }
    classes
}

/// Canonical atom ranks of a molecule; see [`LabeledGraph::ranks`].
pub fn canonical_ranks(mol: &Molecule) -> Vec<usize> {
    LabeledGraph::from_molecule(mol)
        .ranks()
        .into_iter()
        .map(|r| r as usize)
        .collect()
}

struct Writer<'a> {
    g: &'a LabeledGraph,
    ranks: &'a [u32],
    ring: Vec<bool>,
    visited: Vec<bool>,
    edge_seen: Vec<bool>,
    children: Vec<Vec<(u32, BondOrder)>>,
    /// ring closures opened at an atom: (partner, order, edge id)
    opens: Vec<Vec<(u32, BondOrder, u32)>>,
    /// ring closures closed at an atom: edge ids
    closes: Vec<Vec<u32>>,
    visit_order: Vec<u32>,
    digit_of_edge: Vec<u32>,
    free_digits: Vec<bool>,
    out: String,
}

impl<'a> Writer<'a> {
    fn new(g: &'a LabeledGraph, ranks: &'a [u32]) -> Self {
        let n = g.labels.len();
        let has_aromatic_bond = g.adj.iter().flatten().any(|e| e.order == BondOrder::Aromatic);
        let ring = if has_aromatic_bond { g.ring_edges() } else { Vec::new() };
        Writer {
            g,
            ranks,
            ring,
            visited: vec![false; n],
            edge_seen: vec![false; g.edge_count],
            children: vec![Vec::new(); n],
            opens: vec![Vec::new(); n],
            closes: vec![Vec::new(); n],
            visit_order: vec![0; n],
            digit_of_edge: vec![0; g.edge_count],
            free_digits: vec![true; 100],
            out: String::new(),
        }
    }

    fn write(mut self) -> String {
        let n = self.g.labels.len();
        let mut by_rank: Vec<usize> = (0..n).collect();
        by_rank.sort_by_key(|&v| self.ranks[v]);
        let mut counter = 0;
        for &start in &by_rank {
            if self.visited[start] {
                continue;
            }
            self.build_tree(start, &mut counter);
            if !self.out.is_empty() {
                self.out.push('.');
            }
            self.emit(start);
        }
        self.out
    }

    fn sorted_edges(&self, v: usize) -> Vec<Edge> {
        let mut edges = self.g.adj[v].clone();
        edges.sort_by_key(|e| self.ranks[e.to as usize]);
        edges
    }

    fn build_tree(&mut self, v: usize, counter: &mut u32) {
        self.visited[v] = true;
        self.visit_order[v] = *counter;
        *counter += 1;
        for e in self.sorted_edges(v) {
            if self.edge_seen[e.id as usize] {
                continue;
            }
            self.edge_seen[e.id as usize] = true;
            let w = e.to as usize;
            if self.visited[w] {
                // w is an ancestor: ring closure opened at w, closed here
                self.opens[w].push((v as u32, e.order, e.id));
                self.closes[v].push(e.id);
            } else {
                self.children[v].push((w as u32, e.order));
                self.build_tree(w, counter);
            }
        }
    }

    fn bond_symbol(&self, a: usize, b: usize, order: BondOrder, edge: Option<u32>) -> &'static str {
        let both_aromatic = self.g.labels[a].aromatic && self.g.labels[b].aromatic;
        match order {
            BondOrder::Single if both_aromatic => "-",
            BondOrder::Single => "",
            BondOrder::Double => "=",
            BondOrder::Triple => "#",
            BondOrder::Aromatic => {
                let in_ring = match edge {
                    Some(id) => self.ring[id as usize],
                    None => self.aromatic_edge_in_ring(a, b),
                };
                if both_aromatic && in_ring {
                    ""
                } else {
                    ":"
                }
            }
        }
    }

    fn aromatic_edge_in_ring(&self, a: usize, b: usize) -> bool {
        self.g.adj[a]
            .iter()
            .find(|e| e.to as usize == b)
            .map(|e| self.ring[e.id as usize])
            .unwrap_or(false)
    }

    fn take_digit(&mut self) -> u32 {
        let d = (1..100)
            .find(|&d| self.free_digits[d])
            .expect("more than 99 open ring bonds");
        self.free_digits[d] = false;
        d as u32
    }

    fn push_digit(&mut self, d: u32) {
        if d < 10 {
            write!(self.out, "{d}").unwrap();
        } else {
            write!(self.out, "%{d}").unwrap();
        }
    }

    fn emit(&mut self, v: usize) {
        self.emit_atom(v);

        let mut closes = std::mem::take(&mut self.closes[v]);
        closes.sort_by_key(|&id| self.digit_of_edge[id as usize]);
        for id in closes {
            let d = self.digit_of_edge[id as usize];
            self.push_digit(d);
            self.free_digits[d as usize] = true;
        }

        let mut opens = std::mem::take(&mut self.opens[v]);
        opens.sort_by_key(|&(w, _, _)| self.visit_order[w as usize]);
        for (w, order, id) in opens {
            let d = self.take_digit();
            self.digit_of_edge[id as usize] = d;
            let sym = self.bond_symbol(v, w as usize, order, Some(id));
            self.out.push_str(sym);
            self.push_digit(d);
        }

        let children = std::mem::take(&mut self.children[v]);
        let last = children.len().saturating_sub(1);
        for (i, (w, order)) in children.into_iter().enumerate() {
            let sym = self.bond_symbol(v, w as usize, order, None);
            if i < last {
                self.out.push('(');
                self.out.push_str(sym);
                self.emit(w as usize);
                self.out.push(')');
            } else {
                self.out.push_str(sym);
                self.emit(w as usize);
            }
        }
    }

    fn emit_atom(&mut self, v: usize) {
        let label = self.g.labels[v];
        let element = label.element;
        let organic = element.is_organic_subset() && (!label.aromatic || element.aromatic_symbol().is_some());
        let symbol = if label.aromatic {
            element.aromatic_symbol().unwrap_or(element.symbol())
        } else {
            element.symbol()
        };
        if organic
            && label.charge == 0
            && label.isotope == 0
            && label.h == implicit_hydrogens(element, label.aromatic, self.g.bond_sum(v))
        {
            self.out.push_str(symbol);
            return;
        }
        self.out.push('[');
        if label.isotope != 0 {
            write!(self.out, "{}", label.isotope).unwrap();
        }
        self.out.push_str(symbol);
        match label.h {
            0 => {}
            1 => self.out.push('H'),
            h => write!(self.out, "H{h}").unwrap(),
        }
        match label.charge {
            0 => {}
            1 => self.out.push('+'),
            -1 => self.out.push('-'),
            c if c > 0 => write!(self.out, "+{c}").unwrap(),
            c => write!(self.out, "-{}", -c).unwrap(),
        }
        self.out.push(']');
    }
}
