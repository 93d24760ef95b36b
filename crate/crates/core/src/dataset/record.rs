use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    quantize_property, DatasetError, Placeholder, PromptFields, PromptTemplate, PropertyKind, PropertyValue, Task,
};
use crate::fragmine::{decompose, fragment_tokens, FragmentVocabulary, TokenMode};
use crate::molgraph::Molecule;

/// Where fragment tokens appear in a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FragmentRole {
    /// Generated by the model ahead of the SMILES.
    Cot,
    /// Given to the model in the prompt.
    Prompt,
}

impl FragmentRole {
    pub fn for_task(task: Task) -> FragmentRole {
        match task {
            Task::DescGen | Task::LigandGen => FragmentRole::Cot,
            Task::Captioning | Task::GeneralQa | Task::PropertyQa | Task::AffinityPrediction | Task::ReverseDesign => {
                FragmentRole::Prompt
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Conditions {
    pub properties: Vec<PropertyValue>,
    pub fragments: Vec<String>,
}

/// One dataset row. Field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub task: Task,
    pub prompt: String,
    pub conditions: Conditions,
    pub fragment_role: FragmentRole,
    pub target: String,
}

impl DatasetRecord {
    /// Single-line JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

/// Everything known about one molecule.
#[derive(Debug, Clone, Copy)]
pub struct RecordInput<'a> {
    pub id: &'a str,
    pub mol: &'a Molecule,
    pub props: &'a [PropertyValue],
    pub description: Option<&'a str>,
    pub question: Option<&'a str>,
    pub answer: Option<&'a str>,
}

impl<'a> RecordInput<'a> {
    pub fn new(id: &'a str, mol: &'a Molecule) -> RecordInput<'a> {
        RecordInput {
            id,
            mol,
            props: &[],
            description: None,
            question: None,
            answer: None,
        }
    }

    fn prop(&self, kind: PropertyKind) -> Option<PropertyValue> {
        self.props.iter().copied().find(|p| p.kind == kind)
    }
}

fn need<T>(v: Option<T>, task: Task, what: &'static str) -> Result<T, DatasetError> {
    v.ok_or(DatasetError::MissingInput { task, what })
}

fn nonempty(v: Option<&str>) -> Option<&str> {
    v.map(str::trim).filter(|s| !s.is_empty())
}

/// Builds the record of `task` for one molecule.
pub fn build_record<R: Rng + ?Sized>(
    input: &RecordInput<'_>,
    task: Task,
    vocab: &FragmentVocabulary,
    rng: &mut R,
) -> Result<DatasetRecord, DatasetError> {
    let smiles = input.mol.canonical_smiles();
    let decomposition = decompose(input.mol, vocab)?;
    let role = FragmentRole::for_task(task);
    let mut fields = PromptFields::new();
    let mut conditions = Conditions::default();
    let mut template = PromptTemplate::builtin(task);

    let target = match task {
        Task::Captioning | Task::GeneralQa | Task::PropertyQa | Task::AffinityPrediction => {
            let tokens = fragment_tokens(&decomposition, TokenMode::Cot, rng);
            fields.insert(Placeholder::Smiles, smiles);
            fields.insert(Placeholder::Fragments, tokens.concat());
            conditions.fragments = tokens;
            match task {
                Task::Captioning => need(nonempty(input.description), task, "a description")?.to_string(),
                Task::GeneralQa => {
                    let q = need(nonempty(input.question), task, "a question")?;
                    fields.insert(Placeholder::Question, q.trim_end_matches('.').to_string());
                    need(nonempty(input.answer), task, "an answer")?.to_string()
                }
                Task::PropertyQa => {
                    let p = need(input.props.first().copied(), task, "a property value")?;
                    let q = match nonempty(input.question) {
                        Some(q) => q.trim_end_matches('.').to_string(),
                        None => format!(
                            "I need to know the {} of this molecule, could you please provide it? If uncertain, provide an estimate. Respond with the numerical value only",
                            p.kind.display_name()
                        ),
                    };
                    fields.insert(Placeholder::Question, q);
                    conditions.properties.push(p);
                    nonempty(input.answer).map_or_else(|| p.value.to_string(), str::to_string)
                }
                _ => {
                    let p = need(input.prop(PropertyKind::Docking), task, "a docking score")?;
                    conditions.properties.push(p);
                    p.value.to_string()
                }
            }
        }
        Task::DescGen => {
            let description = need(nonempty(input.description), task, "a description")?;
            fields.insert(Placeholder::Description, description.to_string());
            let tokens = fragment_tokens(&decomposition, TokenMode::Cot, rng);
            let target = format!("{} {smiles}", tokens.concat());
            conditions.fragments = tokens;
            target
        }
        Task::LigandGen => {
            let p = quantize_property(need(input.prop(PropertyKind::Docking), task, "a docking score")?)?;
            fields.insert(Placeholder::Value, p.condition_text());
            conditions.properties.push(p);
            let tokens = fragment_tokens(&decomposition, TokenMode::Cot, rng);
            let target = format!("{} {smiles}", tokens.concat());
            conditions.fragments = tokens;
            target
        }
        Task::ReverseDesign => {
            let candidates: Vec<PropertyValue> = [PropertyKind::Logp, PropertyKind::Qed, PropertyKind::Sas]
                .into_iter()
                .filter_map(|k| input.prop(k))
                .collect();
            let chosen = *need(candidates.choose(rng), task, "a logp, qed or sas value")?;
            let p = quantize_property(chosen)?;
            fields.insert(Placeholder::PropertyType, p.kind.name().to_string());
            fields.insert(Placeholder::PropertyValue, p.condition_text());
            conditions.properties.push(p);
            let tokens = fragment_tokens(&decomposition, TokenMode::Condition, rng);
            if tokens.is_empty() {
                template = PromptTemplate::reverse_design_property_only();
            }
            fields.insert(Placeholder::Fragments, tokens.concat());
            conditions.fragments = tokens;
            smiles
        }
    };

    Ok(DatasetRecord {
        id: input.id.to_string(),
        task,
        prompt: template.render(&fields)?,
        conditions,
        fragment_role: role,
        target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fragmine::mine_vocabulary;
    use crate::molgraph::parse_smiles;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (Vec<Molecule>, FragmentVocabulary) {
        let corpus: Vec<Molecule> = ["OCC(O)C(O)CO", "c1ccccc1CCO", "CC(=O)Nc1ccccc1", "OCCO", "CCCCCC", "O"]
            .iter()
            .map(|s| parse_smiles(s).unwrap())
            .collect();
        let n = 40;
        let vocab = mine_vocabulary(&corpus, n).unwrap().vocabulary;
        (corpus, vocab)
    }

    #[test]
    fn roles_follow_task_table() {
        let cot: Vec<Task> = Task::ALL
            .into_iter()
            .filter(|&t| FragmentRole::for_task(t) == FragmentRole::Cot)
            .collect();
        assert_eq!(cot, [Task::DescGen, Task::LigandGen]);
    }

    #[test]
    fn desc_gen_target_is_fragments_then_smiles() {
        let (corpus, vocab) = setup();
        let mut input = RecordInput::new("m1", &corpus[1]);
        input.description = Some("A phenethyl alcohol.");
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = build_record(&input, Task::DescGen, &vocab, &mut rng).unwrap();
        assert_eq!(r.fragment_role, FragmentRole::Cot);
        let mut sorted = r.conditions.fragments.clone();
        sorted.sort();
        assert_eq!(sorted, r.conditions.fragments);
        assert_eq!(
            r.target,
            format!("{} {}", sorted.concat(), corpus[1].canonical_smiles())
        );
        assert!(r.prompt.ends_with("The description is: A phenethyl alcohol."));
        assert!(matches!(
            build_record(&RecordInput::new("m1", &corpus[1]), Task::DescGen, &vocab, &mut rng),
            Err(DatasetError::MissingInput { .. })
        ));
    }

    #[test]
    fn reverse_design_single_atom_is_property_only() {
        let (corpus, vocab) = setup();
        let props = [PropertyValue::new(PropertyKind::Qed, 0.41)];
        let input = RecordInput {
            props: &props,
            ..RecordInput::new("w", &corpus[5])
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = build_record(&input, Task::ReverseDesign, &vocab, &mut rng).unwrap();
        assert!(r.conditions.fragments.is_empty());
        assert_eq!(r.conditions.properties, [PropertyValue::new(PropertyKind::Qed, 0.4)]);
        assert!(r
            .prompt
            .ends_with("constraints: The molecule should have a qed value of 0.4."));
        assert_eq!(r.target, "O");
    }

    #[test]
    fn reverse_design_is_seeded() {
        let (corpus, vocab) = setup();
        let props = [
            PropertyValue::new(PropertyKind::Logp, 1.26),
            PropertyValue::new(PropertyKind::Qed, 0.71),
            PropertyValue::new(PropertyKind::Sas, 2.5),
        ];
        let input = RecordInput {
            props: &props,
            ..RecordInput::new("x", &corpus[2])
        };
        for seed in 0..20 {
            let a = build_record(
                &input,
                Task::ReverseDesign,
                &vocab,
                &mut ChaCha8Rng::seed_from_u64(seed),
            )
            .unwrap();
            let b = build_record(
                &input,
                Task::ReverseDesign,
                &vocab,
                &mut ChaCha8Rng::seed_from_u64(seed),
            )
            .unwrap();
            assert_eq!(a.to_json(), b.to_json());
            assert!((1..=3).contains(&a.conditions.fragments.len()));
            assert_eq!(a.conditions.properties.len(), 1);
        }
    }

    #[test]
    fn comprehension_targets() {
        let (corpus, vocab) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let props = [PropertyValue::new(PropertyKind::Docking, -8.7)];
        let input = RecordInput {
            props: &props,
            ..RecordInput::new("d", &corpus[0])
        };
        let r = build_record(&input, Task::AffinityPrediction, &vocab, &mut rng).unwrap();
        assert_eq!(r.target, "-8.7");
        assert!(r.prompt.contains("Molecular fragments are <|"));
        let r = build_record(&input, Task::LigandGen, &vocab, &mut rng).unwrap();
        assert!(r.prompt.ends_with("Protein 4lde is -9."));

        let props = [PropertyValue::new(PropertyKind::Weight, 182.17)];
        let input = RecordInput {
            props: &props,
            ..RecordInput::new("q", &corpus[0])
        };
        let r = build_record(&input, Task::PropertyQa, &vocab, &mut rng).unwrap();
        assert!(r
            .prompt
            .starts_with("I need to know the molecular weight of this molecule"));
        assert!(r
            .prompt
            .contains("numerical value only. Molecular geometric features are: <FEATURES>."));
        assert_eq!(r.target, "182.17");
    }
}
