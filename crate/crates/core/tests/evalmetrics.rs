mod common;

use molfrag::dataset::{validity_range_check, PropertyKind};
use molfrag::evalmetrics::{
    contains_subgraph, cot_consistency, exact_match, extract_numeric, fragment_satisfaction, levenshtein, pair_fts,
    pair_levenshtein, property_qa_score, smiles_bleu, BleuTokenizer, GenerationPair,
};
use molfrag::fragmine::{mine_vocabulary, FragmentVocabulary};
use molfrag::molgraph::parse_smiles;
use molfrag::synth::Synthesizer;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn bleu_agrees_with_hand_oracle() {
    let corpora: [&[(&str, &str)]; 3] = [
        &[
            ("CCOc1ccccc1", "CCOc1ccccc1C"),
            ("NC(=O)CCS", "NC(=O)CS"),
            ("c1ccncc1Br", "c1ccccc1Br"),
            ("OCC(O)CO", "OCC(O)C(O)CO"),
            ("CC(C)(C)OC(=O)N", "CC(C)OC(=O)NC"),
        ],
        &[("CCCCCCCC", "CCCCCCCC"), ("CCOCCOCCO", "OCCOCCOCC")],
        &[
            ("C1CCCCC1N", "NC1CCCCC1"),
            ("Brc1ccccc1", "Clc1ccccc1"),
            ("CC#N", "CC#CC#N"),
        ],
    ];
    for pairs in corpora {
        let ours = smiles_bleu(pairs, BleuTokenizer::Character).unwrap();
        let oracle = common::bleu_oracle(pairs);
        assert!((ours - oracle).abs() < 1e-9, "{ours} vs {oracle}");
    }
    let same = [("CCOC(=O)c1ccccc1", "CCOC(=O)c1ccccc1"), ("OCCN(C)C", "OCCN(C)C")];
    assert_eq!(smiles_bleu(&same, BleuTokenizer::AtomRegex).unwrap(), 1.0);
}

#[test]
fn matcher_agrees_with_exhaustive_oracle() {
    let pairs = common::subgraph_pairs(5, 1000, 15);
    let mut hits = 0;
    for (target, fragment) in &pairs {
        let want = common::contains_subgraph_oracle(target, fragment);
        assert_eq!(
            contains_subgraph(target, fragment),
            want,
            "{} in {}",
            fragment.canonical_smiles(),
            target.canonical_smiles()
        );
        hits += usize::from(want);
    }
    assert!(hits > 200 && hits < 950, "{hits}");
}

#[test]
fn satisfaction_counts_required_fragments() {
    let m = parse_smiles("Nc1ccc(cc1)C(=O)OCCN(C)C").unwrap();
    let req = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    assert_eq!(
        fragment_satisfaction(&m, &req(&["c1ccccc1", "C(=O)O", "CN(C)C"])).unwrap(),
        3
    );
    assert_eq!(fragment_satisfaction(&m, &req(&["c1ccccc1", "C=C", "Cl"])).unwrap(), 1);
    assert_eq!(
        fragment_satisfaction(&parse_smiles("CCCCCC").unwrap(), &req(&["c1ccccc1"])).unwrap(),
        0
    );
}

#[test]
fn cot_consistency_is_multiset_based() {
    let corpus: Vec<_> = ["OCCO", "OCCO", "OCCO", "OCC(O)C(O)CO"]
        .iter()
        .map(|s| parse_smiles(s).unwrap())
        .collect();
    let vocab: FragmentVocabulary = mine_vocabulary(&corpus, 8).unwrap().vocabulary;
    let hexitol = parse_smiles("OCC(O)C(O)C(O)C(O)CO").unwrap();
    let d = molfrag::fragmine::decompose(&hexitol, &vocab).unwrap();
    let chain: Vec<String> = d.canons().map(str::to_string).collect();
    assert_eq!(cot_consistency(&chain, &hexitol, &vocab).unwrap(), (1.0, 1.0));
    assert_eq!(cot_consistency(&[], &hexitol, &vocab).unwrap(), (0.0, 0.0));

    // chain [A, A, B] against decomposition [A, B, C]
    let tsv = "token_id\tcanon_smiles\tfrequency\n0\tC\t9\n1\tO\t4\n2\tN\t1\n3\tCl\t1\n4\tCO\t8\n5\tCN\t5\n6\tOCCO\t3\n7\tCCN\t2\n";
    let vocab = FragmentVocabulary::read_tsv(tsv.as_bytes()).unwrap();
    let mol = parse_smiles("OCCO.CCN.Cl").unwrap();
    let mut d: Vec<String> = molfrag::fragmine::decompose(&mol, &vocab)
        .unwrap()
        .canons()
        .map(str::to_string)
        .collect();
    d.sort();
    assert_eq!(d, ["CCN", "Cl", "OCCO"]);
    let chain = vec!["OCCO".to_string(), "OCCO".to_string(), "CCN".to_string()];
    let (p, r) = cot_consistency(&chain, &mol, &vocab).unwrap();
    assert!((p - 2.0 / 3.0).abs() < 1e-12 && (r - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn exact_match_implies_zero_distance_and_unit_similarity() {
    let synth = Synthesizer::new();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let mol = synth.drug_like(&mut rng);
        let mut perm: Vec<usize> = (0..mol.atom_count()).collect();
        perm.shuffle(&mut rng);
        let pair = GenerationPair::new(mol.source(), molfrag::molgraph::write_smiles(&mol.permuted(&perm))).unwrap();
        assert!(exact_match(&pair));
        assert_eq!(pair_levenshtein(&pair, true), 0);
        assert_eq!(pair_fts(&pair), Some(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn levenshtein_is_a_metric(a in "[CNO()=1c]{0,12}", b in "[CNO()=1c]{0,12}", c in "[CNO()=1c]{0,12}") {
        let ab = levenshtein(&a, &b);
        prop_assert_eq!(ab, levenshtein(&b, &a));
        prop_assert_eq!(levenshtein(&a, &a), 0);
        prop_assert_eq!(ab == 0, a == b);
        prop_assert!(levenshtein(&a, &c) <= ab + levenshtein(&b, &c));
        prop_assert!(ab <= a.len().max(b.len()));
    }

    #[test]
    fn bleu_is_one_for_identical_pairs(xs in proptest::collection::vec("[CNOc1()=]{4,20}", 1..6)) {
        let pairs: Vec<(&str, &str)> = xs.iter().map(|x| (x.as_str(), x.as_str())).collect();
        prop_assert_eq!(smiles_bleu(&pairs, BleuTokenizer::Character).unwrap(), 1.0);
    }

    #[test]
    fn bleu_matches_oracle(xs in proptest::collection::vec(("[CNO=]{0,12}", "[CNO=]{1,12}"), 1..6)) {
        let pairs: Vec<(&str, &str)> = xs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let ours = smiles_bleu(&pairs, BleuTokenizer::Character).unwrap();
        prop_assert!((ours - common::bleu_oracle(&pairs)).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&ours));
    }

    #[test]
    fn valid_answers_pass_the_range_check(
        values in proptest::collection::vec(-60.0f64..60.0, 2..20),
        noise in proptest::collection::vec(any::<bool>(), 20),
    ) {
        let preds: Vec<String> = values
            .iter()
            .zip(&noise)
            .map(|(v, &n)| if n { format!("The LogP is {v:.3}.") } else { "no idea".to_string() })
            .collect();
        let refs: Vec<&str> = preds.iter().map(String::as_str).collect();
        let truths: Vec<f64> = values.iter().map(|v| v * 0.9).collect();
        let s = property_qa_score(&refs, &truths, PropertyKind::Logp).unwrap();
        let valid = refs
            .iter()
            .filter(|p| extract_numeric(p).is_some_and(|v| validity_range_check(PropertyKind::Logp, v).unwrap()))
            .count();
        prop_assert!((s.valid_ratio - valid as f64 / refs.len() as f64).abs() < 1e-12);
        prop_assert_eq!(s.mae.is_some(), valid > 0);
    }
}
