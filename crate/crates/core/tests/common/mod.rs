//! Reference implementations used as test oracles. They recompute
//! everything from scratch on every step and favor obviousness over speed.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use molfrag::molgraph::{canonical_ranks, BondOrder, Molecule};

/// Brute-force vocabulary mining: every round enumerates all adjacent
/// piece pairs of every molecule, counts their unions and merges the most
/// frequent one. Returns (canon, frequency) in promotion order, including
/// the single-atom seeds.
pub fn mine_oracle(corpus: &[Molecule], n: usize) -> Vec<(String, u64)> {
    let mut seed_counts: BTreeMap<String, u64> = BTreeMap::new();
    for mol in corpus {
        for i in 0..mol.atom_count() {
            *seed_counts.entry(mol.fragment_smiles(&[i])).or_default() += 1;
        }
    }
    let mut vocab: Vec<(String, u64)> = seed_counts.into_iter().collect();
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut known: BTreeSet<String> = vocab.iter().map(|v| v.0.clone()).collect();

    // label[m][atom] = piece label; pieces are named by any member atom
    let mut labels: Vec<Vec<usize>> = corpus.iter().map(|m| (0..m.atom_count()).collect()).collect();
    let ranks: Vec<Vec<usize>> = corpus.iter().map(canonical_ranks).collect();

    while vocab.len() < n {
        let mut counts: HashMap<String, (u64, usize)> = HashMap::new();
        for (m, mol) in corpus.iter().enumerate() {
            for (a, b, atoms) in adjacent_pairs(mol, &labels[m]) {
                let _ = (a, b);
                let e = counts.entry(mol.fragment_smiles(&atoms)).or_insert((0, atoms.len()));
                e.0 += 1;
            }
        }
        let best = counts
            .iter()
            .filter(|(c, _)| !known.contains(*c))
            .min_by(|x, y| y.1 .0.cmp(&x.1 .0).then(x.1 .1.cmp(&y.1 .1)).then(x.0.cmp(y.0)));
        let Some((canon, &(freq, _))) = best else { break };
        let canon = canon.clone();
        for (m, mol) in corpus.iter().enumerate() {
            let mut occ: Vec<(Vec<usize>, usize, usize)> = adjacent_pairs(mol, &labels[m])
                .into_iter()
                .filter(|(_, _, atoms)| mol.fragment_smiles(atoms) == canon)
                .map(|(a, b, atoms)| {
                    let mut key: Vec<usize> = atoms.iter().map(|&x| ranks[m][x]).collect();
                    key.sort();
                    (key, a, b)
                })
                .collect();
            occ.sort();
            let mut used = BTreeSet::new();
            for (_, a, b) in occ {
                if used.contains(&a) || used.contains(&b) {
                    continue;
                }
                used.insert(a);
                used.insert(b);
                for l in labels[m].iter_mut() {
                    if *l == b {
                        *l = a;
                    }
                }
            }
        }
        known.insert(canon.clone());
        vocab.push((canon, freq));
    }
    vocab
}

/// Distinct pairs of adjacent piece labels with the sorted union atoms.
fn adjacent_pairs(mol: &Molecule, labels: &[usize]) -> Vec<(usize, usize, Vec<usize>)> {
    let mut pairs = BTreeSet::new();
    for bond in mol.bonds() {
        let (x, y) = (labels[bond.a], labels[bond.b]);
        if x != y {
            pairs.insert((x.min(y), x.max(y)));
        }
    }
    pairs
        .into_iter()
        .map(|(a, b)| {
            let atoms: Vec<usize> = (0..mol.atom_count())
                .filter(|&i| labels[i] == a || labels[i] == b)
                .collect();
            (a, b, atoms)
        })
        .collect()
}

/// Exhaustive induced-subgraph test: tries every injective assignment of
/// pattern atoms to target atoms with matching labels, pruning only on
/// label mismatch and injectivity, then checks the induced bonds.
pub fn contains_subgraph_oracle(target: &Molecule, pattern: &Molecule) -> bool {
    let k = pattern.atom_count();
    if k == 0 {
        return true;
    }
    if k > target.atom_count() {
        return false;
    }
    let label = |m: &Molecule, i: usize| {
        let a = m.atom(i);
        (a.element, a.formal_charge, a.aromatic)
    };
    let candidates: Vec<Vec<usize>> = (0..k)
        .map(|p| {
            (0..target.atom_count())
                .filter(|&t| label(pattern, p) == label(target, t))
                .collect()
        })
        .collect();
    let mut assign = vec![usize::MAX; k];
    let mut used = vec![false; target.atom_count()];

    fn order_at(m: &Molecule, a: usize, b: usize) -> Option<BondOrder> {
        m.bond_between(a, b).map(|bond| bond.order)
    }

    fn go(
        p: usize,
        target: &Molecule,
        pattern: &Molecule,
        candidates: &[Vec<usize>],
        assign: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if p == assign.len() {
            for i in 0..assign.len() {
                for j in i + 1..assign.len() {
                    if order_at(pattern, i, j) != order_at(target, assign[i], assign[j]) {
                        return false;
                    }
                }
            }
            return true;
        }
        for &t in &candidates[p] {
            if used[t] {
                continue;
            }
            used[t] = true;
            assign[p] = t;
            if go(p + 1, target, pattern, candidates, assign, used) {
                return true;
            }
            used[t] = false;
        }
        assign[p] = usize::MAX;
        false
    }

    go(0, target, pattern, &candidates, &mut assign, &mut used)
}

/// Sentence-level n-gram counts.
fn ngrams(tokens: &[String], n: usize) -> HashMap<Vec<String>, usize> {
    let mut out = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *out.entry(w.to_vec()).or_insert(0) += 1;
        }
    }
    out
}

/// Corpus BLEU-4 over character tokens, written straight from the
/// textbook definition: clipped n-gram precisions pooled over the corpus,
/// geometric mean with uniform weights, brevity penalty exp(1 - r/c).
pub fn bleu_oracle(pairs: &[(&str, &str)]) -> f64 {
    let mut matched = [0usize; 4];
    let mut total = [0usize; 4];
    let (mut c, mut r) = (0usize, 0usize);
    for (hyp, reference) in pairs {
        let h: Vec<String> = hyp.chars().map(|ch| ch.to_string()).collect();
        let rf: Vec<String> = reference.chars().map(|ch| ch.to_string()).collect();
        c += h.len();
        r += rf.len();
        for n in 1..=4 {
            let hc = ngrams(&h, n);
            let rc = ngrams(&rf, n);
            for (g, cnt) in &hc {
                matched[n - 1] += (*cnt).min(*rc.get(g).unwrap_or(&0));
                total[n - 1] += cnt;
            }
        }
    }
    if matched.contains(&0) {
        return 0.0;
    }
    let log_p: f64 = (0..4).map(|i| (matched[i] as f64 / total[i] as f64).ln()).sum::<f64>() / 4.0;
    let bp = if c > r { 1.0 } else { (1.0 - r as f64 / c as f64).exp() };
    bp * log_p.exp()
}

/// Placeholder values the golden prompt files were written with.
pub fn golden_fields() -> molfrag::dataset::PromptFields {
    use molfrag::dataset::Placeholder::*;
    [
        (Smiles, "CC(=O)Oc1ccccc1C(=O)O"),
        (Fragments, "<|C(=O)O|><|CC=O|><|c1ccccc1|>"),
        (Question, "What are the physical properties of this molecule"),
        (Description, "The molecule is a member of the class of benzoic acids."),
        (PropertyType, "qed"),
        (PropertyValue, "0.6"),
        (Value, "-9"),
    ]
    .into_iter()
    .map(|(p, v)| (p, v.to_string()))
    .collect()
}

/// Golden prompt text for `name` (a task name or a template variant).
pub fn golden_prompt(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/golden/prompts")
        .join(format!("{name}.txt"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    text.strip_suffix('\n').unwrap_or(&text).to_string()
}

/// (molecule, fragment) pairs of at most `max_atoms`-atom molecules. Each
/// fragment is a random connected atom subset of either the same molecule
/// or another one, so both outcomes occur.
pub fn subgraph_pairs(seed: u64, count: usize, max_atoms: usize) -> Vec<(Molecule, Molecule)> {
    use molfrag::fragmine::Fragment;
    use rand::seq::IndexedRandom;
    use rand::{Rng, SeedableRng};

    let synth = molfrag::synth::Synthesizer::new();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<Molecule> = (0..200).map(|_| synth.small(&mut rng, max_atoms)).collect();
    (0..count)
        .map(|_| {
            let target = pool.choose(&mut rng).unwrap().clone();
            let source = if rng.random_bool(0.5) {
                &target
            } else {
                pool.choose(&mut rng).unwrap()
            };
            let size = rng.random_range(1..=source.atom_count().min(7));
            let mut atoms = vec![rng.random_range(0..source.atom_count())];
            while atoms.len() < size {
                let frontier: Vec<usize> = atoms
                    .iter()
                    .flat_map(|&a| source.neighbors(a).iter().map(|&(b, _)| b))
                    .filter(|b| !atoms.contains(b))
                    .collect();
                match frontier.choose(&mut rng) {
                    Some(&b) => atoms.push(b),
                    None => break,
                }
            }
            let fragment = Fragment::from_atoms(source, &atoms).graph().clone();
            (target, fragment)
        })
        .collect()
}
