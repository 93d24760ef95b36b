use crate::molgraph::{BondOrder, Molecule};

fn label(m: &Molecule, i: usize) -> (u8, i8, bool) {
    let a = m.atom(i);
    (a.element.atomic_number(), a.formal_charge, a.aromatic)
}

fn order(m: &Molecule, a: usize, b: usize) -> Option<BondOrder> {
    m.bond_between(a, b).map(|b| b.order)
}

/// Pattern atoms in BFS order, each with the already-ordered neighbor it
/// was reached from (`None` for component roots).
fn search_order(pattern: &Molecule) -> Vec<(usize, Option<usize>)> {
    let n = pattern.atom_count();
    let mut seen = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        out.push((root, None));
        let mut head = out.len() - 1;
        while head < out.len() {
            let (u, _) = out[head];
            head += 1;
            for &(v, _) in pattern.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    out.push((v, Some(u)));
                }
            }
        }
    }
    out
}

/// Whether `pattern` occurs in `target` as a vertex-induced subgraph with
/// equal element, charge and aromaticity on atoms and equal bond orders.
///
/// Depth-first state-space search in the style of VF2: pattern atoms are
/// matched in BFS order, candidates are restricted to target neighbors of
/// the parent's image, and every partial mapping is checked for bond
/// agreement with all previously mapped atoms.
pub fn contains_subgraph(target: &Molecule, pattern: &Molecule) -> bool {
    let k = pattern.atom_count();
    if k == 0 {
        return true;
    }
    if k > target.atom_count() || pattern.bond_count() > target.bond_count() {
        return false;
    }
    let plan = search_order(pattern);
    let mut map = vec![usize::MAX; pattern.atom_count()];
    let mut used = vec![false; target.atom_count()];
    extend(target, pattern, &plan, 0, &mut map, &mut used)
}

fn feasible(
    target: &Molecule,
    pattern: &Molecule,
    plan: &[(usize, Option<usize>)],
    depth: usize,
    p: usize,
    t: usize,
    map: &[usize],
) -> bool {
    if label(pattern, p) != label(target, t) || pattern.degree(p) > target.degree(t) {
        return false;
    }
    plan[..depth]
        .iter()
        .all(|&(q, _)| order(pattern, p, q) == order(target, t, map[q]))
}

fn extend(
    target: &Molecule,
    pattern: &Molecule,
    plan: &[(usize, Option<usize>)],
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    if depth == plan.len() {
        return true;
    }
    let (p, parent) = plan[depth];
    let candidates: Vec<usize> = match parent {
        Some(q) => target.neighbors(map[q]).iter().map(|&(t, _)| t).collect(),
        None => (0..target.atom_count()).collect(),
    };
    for t in candidates {
        if used[t] || !feasible(target, pattern, plan, depth, p, t, map) {
            continue;
        }
        map[p] = t;
        used[t] = true;
        if extend(target, pattern, plan, depth + 1, map, used) {
            return true;
        }
        used[t] = false;
        map[p] = usize::MAX;
    }
    false
}
