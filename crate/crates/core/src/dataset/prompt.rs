use std::collections::BTreeMap;
use std::fmt;

use regex::Regex;

use super::{DatasetError, Task};

/// Literal stand-in for the embedding slot; the features themselves are
/// injected downstream at the embedding level.
pub const FEATURES_TOKEN: &str = "<FEATURES>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Placeholder {
    Features,
    Smiles,
    Fragments,
    Description,
    PropertyType,
    PropertyValue,
    Question,
    Value,
}

impl Placeholder {
    pub const ALL: [Placeholder; 8] = [
        Placeholder::Features,
        Placeholder::Smiles,
        Placeholder::Fragments,
        Placeholder::Description,
        Placeholder::PropertyType,
        Placeholder::PropertyValue,
        Placeholder::Question,
        Placeholder::Value,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Placeholder::Features => "Features",
            Placeholder::Smiles => "SMILES",
            Placeholder::Fragments => "Fragments",
            Placeholder::Description => "Description",
            Placeholder::PropertyType => "Property Type",
            Placeholder::PropertyValue => "Property Value",
            Placeholder::Question => "Question",
            Placeholder::Value => "Value",
        }
    }

    fn from_name(name: &str) -> Option<Placeholder> {
        Placeholder::ALL.into_iter().find(|p| p.name() == name)
    }
}

impl fmt::Display for Placeholder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub type PromptFields = BTreeMap<Placeholder, String>;

const EMBEDDED: &str =
    "Molecular geometric features are: {Features}. Molecular SMILES is {SMILES}. Molecular fragments are {Fragments}.";
const GENERATE: &str = "Please give me molecular fragments based on the description. And then give me the molecular SMILES based on both the fragments and the description. The description is: ";
const DESIGN: &str = "There are some conditions, including logp (the hydrophobicity and solubility balance), qed (the drug-likeness), sas (the synthetic accessibility score), and the fragments (include specific fragments). Now please design a molecule under the given constraints: ";

#[derive(Debug, Clone, PartialEq, Eq)]
enum Segment {
    Text(String),
    Slot(Placeholder),
}

#[derive(Debug, Clone)]
pub struct PromptTemplate {
    task: Task,
    segments: Vec<Segment>,
}

impl PromptTemplate {
    /// Parses `{Name}` placeholders; unknown names are rejected.
    pub fn parse(task: Task, text: &str) -> Result<PromptTemplate, DatasetError> {
        let mut segments = Vec::new();
        let mut rest = text;
        while let Some(open) = rest.find('{') {
            let close = rest[open..]
                .find('}')
                .map(|c| open + c)
                .ok_or_else(|| DatasetError::UnknownPlaceholder(rest[open..].to_string()))?;
            if open > 0 {
                segments.push(Segment::Text(rest[..open].to_string()));
            }
            let name = &rest[open + 1..close];
            let slot =
                Placeholder::from_name(name).ok_or_else(|| DatasetError::UnknownPlaceholder(name.to_string()))?;
            segments.push(Segment::Slot(slot));
            rest = &rest[close + 1..];
        }
        if !rest.is_empty() {
            segments.push(Segment::Text(rest.to_string()));
        }
        Ok(PromptTemplate { task, segments })
    }

    /// The prompt of `task` as published.
    pub fn builtin(task: Task) -> PromptTemplate {
        let text = match task {
            Task::Captioning => format!("Please describe the molecule: {EMBEDDED}"),
            Task::GeneralQa | Task::PropertyQa => format!("{{Question}}. {EMBEDDED}"),
            Task::AffinityPrediction => format!(
                "I am interested in the docking score of the molecule to Protein 4lde, could you tell me what it is? If uncertain, provide an estimate. Respond with the numerical value only. {EMBEDDED}"
            ),
            Task::DescGen => format!("{GENERATE}{{Description}}"),
            Task::ReverseDesign => format!(
                "{DESIGN}The molecule should have these fragments {{Fragments}}. The molecule should have a {{Property Type}} value of {{Property Value}}."
            ),
            Task::LigandGen => format!("{GENERATE}The docking score of the molecule to Protein 4lde is {{Value}}."),
        };
        PromptTemplate::parse(task, &text).expect("built-in templates are well formed")
    }

    /// Reverse-design prompt for molecules without condition fragments.
    pub fn reverse_design_property_only() -> PromptTemplate {
        let text = format!("{DESIGN}The molecule should have a {{Property Type}} value of {{Property Value}}.");
        PromptTemplate::parse(Task::ReverseDesign, &text).expect("built-in templates are well formed")
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn placeholders(&self) -> Vec<Placeholder> {
        self.segments
            .iter()
            .filter_map(|s| match s {
                Segment::Slot(p) => Some(*p),
                Segment::Text(_) => None,
            })
            .collect()
    }

    /// The template text with `{Name}` placeholders.
    pub fn text(&self) -> String {
        self.segments
            .iter()
            .map(|s| match s {
                Segment::Text(t) => t.clone(),
                Segment::Slot(p) => format!("{{{p}}}"),
            })
            .collect()
    }

    /// Fills every placeholder. `{Features}` always renders as
    /// [`FEATURES_TOKEN`]; other placeholders need a non-empty value.
    pub fn render(&self, fields: &PromptFields) -> Result<String, DatasetError> {
        let mut out = String::new();
        for s in &self.segments {
            match s {
                Segment::Text(t) => out.push_str(t),
                Segment::Slot(Placeholder::Features) => out.push_str(FEATURES_TOKEN),
                Segment::Slot(p) => match fields.get(p) {
                    Some(v) if !v.is_empty() => out.push_str(v),
                    _ => return Err(DatasetError::MissingPlaceholder(*p)),
                },
            }
        }
        Ok(out)
    }

    /// Recovers placeholder values from a rendered prompt, or `None` if the
    /// text does not follow this template.
    pub fn match_rendered(&self, rendered: &str) -> Option<PromptFields> {
        let mut pattern = String::from("(?s)^");
        let slots = self.placeholders();
        for s in &self.segments {
            match s {
                Segment::Text(t) => pattern.push_str(&regex::escape(t)),
                Segment::Slot(_) => pattern.push_str("(.+?)"),
            }
        }
        pattern.push('$');
        let re = Regex::new(&pattern).expect("escaped template compiles");
        let caps = re.captures(rendered)?;
        Some(
            slots
                .into_iter()
                .enumerate()
                .map(|(i, p)| (p, caps[i + 1].to_string()))
                .collect(),
        )
    }
}

/// Renders the built-in template of `task`.
pub fn render_prompt(task: Task, fields: &PromptFields) -> Result<String, DatasetError> {
    PromptTemplate::builtin(task).render(fields)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields(pairs: &[(Placeholder, &str)]) -> PromptFields {
        pairs.iter().map(|&(p, v)| (p, v.to_string())).collect()
    }

    #[test]
    fn captioning_example() {
        let f = fields(&[(Placeholder::Smiles, "CCO"), (Placeholder::Fragments, "<|CCO|>")]);
        assert_eq!(
            render_prompt(Task::Captioning, &f).unwrap(),
            "Please describe the molecule: Molecular geometric features are: <FEATURES>. Molecular SMILES is CCO. Molecular fragments are <|CCO|>."
        );
    }

    #[test]
    fn ligand_example() {
        let f = fields(&[(Placeholder::Value, "-9")]);
        assert!(render_prompt(Task::LigandGen, &f)
            .unwrap()
            .ends_with("The docking score of the molecule to Protein 4lde is -9."));
    }

    #[test]
    fn missing_and_unknown_placeholders() {
        let f = fields(&[
            (Placeholder::Fragments, ""),
            (Placeholder::PropertyType, "qed"),
            (Placeholder::PropertyValue, "0.9"),
        ]);
        assert!(matches!(
            render_prompt(Task::ReverseDesign, &f),
            Err(DatasetError::MissingPlaceholder(Placeholder::Fragments))
        ));
        assert!(PromptTemplate::reverse_design_property_only().render(&f).is_ok());
        assert!(matches!(
            PromptTemplate::parse(Task::Captioning, "Hi {Name}"),
            Err(DatasetError::UnknownPlaceholder(_))
        ));
        assert!(PromptTemplate::parse(Task::Captioning, "Hi {SMILES").is_err());
    }

    #[test]
    fn rendered_prompts_match_back() {
        let f = fields(&[
            (Placeholder::Smiles, "CC(=O)O"),
            (Placeholder::Fragments, "<|C=O|><|CC|>"),
            (Placeholder::Question, "What is it?"),
            (Placeholder::Description, "An acid. It is sour."),
            (Placeholder::PropertyType, "logp"),
            (Placeholder::PropertyValue, "1.0"),
            (Placeholder::Value, "-7"),
        ]);
        for task in Task::ALL {
            let t = PromptTemplate::builtin(task);
            let text = t.render(&f).unwrap();
            let back = t.match_rendered(&text).unwrap();
            for (p, v) in back {
                let expected = if p == Placeholder::Features {
                    FEATURES_TOKEN
                } else {
                    &f[&p]
                };
                assert_eq!(v, expected, "{task} {p}");
            }
        }
    }
}
