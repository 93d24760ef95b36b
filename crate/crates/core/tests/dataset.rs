mod common;

use molfrag::dataset::{
    build_record, quantize_property, render_prompt, validity_range_check, FragmentRole, PromptTemplate, PropertyKind,
    PropertyValue, RecordInput, Task,
};
use molfrag::fragmine::mine_vocabulary;
use molfrag::molgraph::Molecule;
use molfrag::synth::Synthesizer;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn prompts_match_golden_files() {
    let fields = common::golden_fields();
    for task in Task::ALL {
        assert_eq!(
            render_prompt(task, &fields).unwrap(),
            common::golden_prompt(task.name()),
            "{task}"
        );
    }
    assert_eq!(
        PromptTemplate::reverse_design_property_only().render(&fields).unwrap(),
        common::golden_prompt("reverse_design_property_only")
    );
}

#[test]
fn every_kind_and_bound() {
    use PropertyKind::*;
    // (kind, lower bound, lower closed, upper bound, upper closed)
    let table = [
        (Weight, 0.0, false, 4000.0, false),
        (Logp, -30.0, false, 50.0, false),
        (Tpsa, 0.0, true, 2000.0, false),
        (Complexity, 0.0, true, 10000.0, true),
        (Homo, -20.0, false, 20.0, false),
        (Lumo, -20.0, false, 20.0, false),
        (Gap, -20.0, false, 20.0, false),
        (Scf, -50.0, false, 0.0, false),
    ];
    for (kind, lo, lo_closed, hi, hi_closed) in table {
        let check = |v: f64| validity_range_check(kind, v).unwrap();
        assert_eq!(check(lo), lo_closed, "{kind} {lo}");
        assert_eq!(check(hi), hi_closed, "{kind} {hi}");
        assert!(check((lo + hi) / 2.0));
        assert!(!check(lo - 1e-6) && !check(hi + 1e-6));
        assert_eq!(quantize_property(PropertyValue::new(kind, 1.0)).is_ok(), kind == Logp);
    }
    for kind in [Qed, Sas, Docking] {
        assert!(validity_range_check(kind, 0.5).is_err());
    }
}

fn corpus_and_vocab() -> (Vec<Molecule>, molfrag::fragmine::FragmentVocabulary) {
    let synth = Synthesizer::new();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let corpus: Vec<Molecule> = (0..60).map(|_| synth.drug_like(&mut rng)).collect();
    let vocab = mine_vocabulary(&corpus, 80).unwrap().vocabulary;
    (corpus, vocab)
}

#[test]
fn records_for_every_task() {
    let (corpus, vocab) = corpus_and_vocab();
    let props = [
        PropertyValue::new(PropertyKind::Logp, 2.3),
        PropertyValue::new(PropertyKind::Qed, 0.64),
        PropertyValue::new(PropertyKind::Sas, 3.1),
        PropertyValue::new(PropertyKind::Docking, -9.6),
    ];
    for (i, mol) in corpus.iter().enumerate() {
        let input = RecordInput {
            props: &props,
            description: Some("The molecule is a synthetic compound."),
            question: Some("What is its LogP?"),
            answer: Some("2.3"),
            ..RecordInput::new("m", mol)
        };
        for task in Task::ALL {
            let r = build_record(&input, task, &vocab, &mut ChaCha8Rng::seed_from_u64(i as u64)).unwrap();
            assert!(!r.prompt.is_empty());
            assert_eq!(r.fragment_role, FragmentRole::for_task(task));
            let template = PromptTemplate::builtin(task);
            if !(task == Task::ReverseDesign && r.conditions.fragments.is_empty()) {
                assert!(template.match_rendered(&r.prompt).is_some(), "{task}: {}", r.prompt);
            }
            if task.is_generation() {
                assert!(r.target.ends_with(&mol.canonical_smiles()));
            }
            let back: molfrag::dataset::DatasetRecord = serde_json::from_str(&r.to_json()).unwrap();
            assert_eq!(back, r);
        }
    }
}

fn quantizable() -> impl Strategy<Value = PropertyValue> {
    (
        prop_oneof![
            Just(PropertyKind::Logp),
            Just(PropertyKind::Qed),
            Just(PropertyKind::Sas),
            Just(PropertyKind::Docking)
        ],
        -1e4f64..1e4,
    )
        .prop_map(|(k, v)| PropertyValue::new(k, if k == PropertyKind::Qed { v / 1e4 } else { v }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn quantize_is_idempotent(p in quantizable()) {
        let once = quantize_property(p).unwrap();
        prop_assert_eq!(quantize_property(once).unwrap(), once);
    }

    #[test]
    fn rendered_prompts_match_back(
        smiles in "[CNOc1()=]{1,30}",
        frags in "(<\\|[CNO=]{1,6}\\|>){1,3}",
        text in "[A-Za-z ,]{1,40}",
        value in -10i32..=-5,
    ) {
        let mut fields = common::golden_fields();
        use molfrag::dataset::Placeholder::*;
        fields.insert(Smiles, smiles);
        fields.insert(Fragments, frags);
        fields.insert(Question, text.clone());
        fields.insert(Description, text);
        fields.insert(Value, value.to_string());
        for task in Task::ALL {
            let t = PromptTemplate::builtin(task);
            let rendered = t.render(&fields).unwrap();
            let back = t.match_rendered(&rendered).unwrap();
            prop_assert_eq!(t.render(&back).unwrap(), rendered);
        }
    }

    #[test]
    fn records_are_seed_deterministic(seed in any::<u64>(), idx in 0usize..60) {
        use std::sync::OnceLock;
        static DATA: OnceLock<(Vec<Molecule>, molfrag::fragmine::FragmentVocabulary)> = OnceLock::new();
        let (corpus, vocab) = DATA.get_or_init(corpus_and_vocab);
        let props = [PropertyValue::new(PropertyKind::Logp, 1.7), PropertyValue::new(PropertyKind::Sas, 4.4)];
        let input = RecordInput { props: &props, ..RecordInput::new("x", &corpus[idx]) };
        let a = build_record(&input, Task::ReverseDesign, vocab, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let b = build_record(&input, Task::ReverseDesign, vocab, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
        prop_assert!(a.conditions.fragments.len() <= 3);
    }
}
