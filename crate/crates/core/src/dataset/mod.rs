//! Multi-condition dataset construction: property quantization, prompt
//! templates, record assembly and property validity ranges.

mod io;
mod prompt;
mod record;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fragmine::FragError;

pub use io::{read_exclusions, read_properties, read_texts, TextFields};
pub use prompt::{render_prompt, Placeholder, PromptFields, PromptTemplate, FEATURES_TOKEN};
pub use record::{build_record, Conditions, DatasetRecord, FragmentRole, RecordInput};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("property kind {0} cannot be quantized")]
    UnsupportedKind(PropertyKind),
    #[error("unknown property kind {0:?}")]
    UnknownKind(String),
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("missing value for placeholder {{{0}}}")]
    MissingPlaceholder(Placeholder),
    #[error("unknown placeholder {{{0}}} in template")]
    UnknownPlaceholder(String),
    #[error("task {task} needs {what}")]
    MissingInput { task: Task, what: &'static str },
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error(transparent)]
    Fragment(#[from] FragError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropertyKind {
    Logp,
    Qed,
    Sas,
    Docking,
    Weight,
    Tpsa,
    Complexity,
    Homo,
    Lumo,
    Gap,
    Scf,
}

impl PropertyKind {
    pub const ALL: [PropertyKind; 11] = [
        PropertyKind::Logp,
        PropertyKind::Qed,
        PropertyKind::Sas,
        PropertyKind::Docking,
        PropertyKind::Weight,
        PropertyKind::Tpsa,
        PropertyKind::Complexity,
        PropertyKind::Homo,
        PropertyKind::Lumo,
        PropertyKind::Gap,
        PropertyKind::Scf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropertyKind::Logp => "logp",
            PropertyKind::Qed => "qed",
            PropertyKind::Sas => "sas",
            PropertyKind::Docking => "docking",
            PropertyKind::Weight => "weight",
            PropertyKind::Tpsa => "tpsa",
            PropertyKind::Complexity => "complexity",
            PropertyKind::Homo => "homo",
            PropertyKind::Lumo => "lumo",
            PropertyKind::Gap => "gap",
            PropertyKind::Scf => "scf",
        }
    }

    /// Human-readable name used in generated questions.
    pub fn display_name(self) -> &'static str {
        match self {
            PropertyKind::Logp => "LogP",
            PropertyKind::Qed => "QED",
            PropertyKind::Sas => "SAS",
            PropertyKind::Docking => "docking score",
            PropertyKind::Weight => "molecular weight",
            PropertyKind::Tpsa => "TPSA",
            PropertyKind::Complexity => "complexity",
            PropertyKind::Homo => "HOMO",
            PropertyKind::Lumo => "LUMO",
            PropertyKind::Gap => "HOMO-LUMO Gap",
            PropertyKind::Scf => "SCF Energy",
        }
    }

    /// Validity interval for model answers; `None` for the design
    /// conditions (qed, sas, docking), which have no listed range.
    pub fn valid_range(self) -> Option<ValidRange> {
        let open = |lo, hi| ValidRange {
            lo,
            lo_closed: false,
            hi,
            hi_closed: false,
        };
        Some(match self {
            PropertyKind::Weight => open(0.0, 4000.0),
            PropertyKind::Logp => open(-30.0, 50.0),
            PropertyKind::Tpsa => ValidRange {
                lo_closed: true,
                ..open(0.0, 2000.0)
            },
            PropertyKind::Complexity => ValidRange {
                lo_closed: true,
                hi_closed: true,
                ..open(0.0, 10000.0)
            },
            PropertyKind::Homo | PropertyKind::Lumo | PropertyKind::Gap => open(-20.0, 20.0),
            // 10^4 eV units
            PropertyKind::Scf => open(-50.0, 0.0),
            PropertyKind::Qed | PropertyKind::Sas | PropertyKind::Docking => return None,
        })
    }
}

impl fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropertyKind {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PropertyKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| DatasetError::UnknownKind(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidRange {
    pub lo: f64,
    pub lo_closed: bool,
    pub hi: f64,
    pub hi_closed: bool,
}

impl ValidRange {
    pub fn contains(&self, v: f64) -> bool {
        let above = if self.lo_closed { v >= self.lo } else { v > self.lo };
        let below = if self.hi_closed { v <= self.hi } else { v < self.hi };
        above && below
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropertyValue {
    pub kind: PropertyKind,
    pub value: f64,
}

impl PropertyValue {
    pub fn new(kind: PropertyKind, value: f64) -> PropertyValue {
        PropertyValue { kind, value }
    }

    /// Prompt rendering of a quantized condition: docking scores as
    /// integers, everything else with one decimal.
    pub fn condition_text(&self) -> String {
        match self.kind {
            PropertyKind::Docking => format!("{:.0}", self.value),
            _ => format!("{:.1}", self.value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Captioning,
    GeneralQa,
    PropertyQa,
    AffinityPrediction,
    DescGen,
    ReverseDesign,
    LigandGen,
}

impl Task {
    pub const ALL: [Task; 7] = [
        Task::Captioning,
        Task::GeneralQa,
        Task::PropertyQa,
        Task::AffinityPrediction,
        Task::DescGen,
        Task::ReverseDesign,
        Task::LigandGen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Captioning => "captioning",
            Task::GeneralQa => "general_qa",
            Task::PropertyQa => "property_qa",
            Task::AffinityPrediction => "affinity_prediction",
            Task::DescGen => "desc_gen",
            Task::ReverseDesign => "reverse_design",
            Task::LigandGen => "ligand_gen",
        }
    }

    /// Whether the model generates a molecule (as opposed to reading one).
    pub fn is_generation(self) -> bool {
        matches!(self, Task::DescGen | Task::ReverseDesign | Task::LigandGen)
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s.trim())
            .ok_or_else(|| DatasetError::UnknownTask(s.to_string()))
    }
}

fn round_half_away(v: f64, step: f64) -> f64 {
    // adding 0.0 turns -0.0 into 0.0
    (v / step).round() * step + 0.0
}

/// Snaps a design condition to its grid: logp and sas to multiples of 1,
/// qed to multiples of 0.1, docking to a negative integer in [-10, -5].
/// Ties round away from zero.
pub fn quantize_property(p: PropertyValue) -> Result<PropertyValue, DatasetError> {
    let value = match p.kind {
        PropertyKind::Logp | PropertyKind::Sas => round_half_away(p.value, 1.0),
        // one decimal: scale by 10 so the result is the nearest double to k/10
        PropertyKind::Qed => (p.value * 10.0).round() / 10.0 + 0.0,
        PropertyKind::Docking => p.value.round().clamp(-10.0, -5.0),
        kind => return Err(DatasetError::UnsupportedKind(kind)),
    };
    Ok(PropertyValue { kind: p.kind, value })
}

/// Whether `value` lies in the validity interval of `kind`.
pub fn validity_range_check(kind: PropertyKind, value: f64) -> Result<bool, DatasetError> {
    let range = kind
        .valid_range()
        .ok_or_else(|| DatasetError::UnknownKind(kind.name().to_string()))?;
    Ok(value.is_finite() && range.contains(value))
}
