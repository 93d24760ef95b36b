//! Side inputs for dataset building: property and text TSVs keyed by
//! molecule id, and the exclusion list.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use super::{DatasetError, PropertyKind, PropertyValue};
use crate::molgraph::parse_smiles;

fn data_lines<R: BufRead>(r: R) -> impl Iterator<Item = Result<(usize, String), DatasetError>> {
    r.lines().enumerate().filter_map(|(i, line)| match line {
        Ok(l) if l.trim().is_empty() || l.starts_with('#') => None,
        Ok(l) => Some(Ok((i + 1, l))),
        Err(e) => Some(Err(e.into())),
    })
}

fn three_columns(line_no: usize, line: &str) -> Result<[&str; 3], DatasetError> {
    let cols: Vec<&str> = line.splitn(3, '\t').collect();
    <[&str; 3]>::try_from(cols).map_err(|_| DatasetError::Format {
        line: line_no,
        msg: "expected three tab-separated columns".into(),
    })
}

/// Reads `id<TAB>kind<TAB>value` rows. A first row starting with `id`
/// is taken as a header.
pub fn read_properties<R: BufRead>(r: R) -> Result<BTreeMap<String, Vec<PropertyValue>>, DatasetError> {
    let mut out: BTreeMap<String, Vec<PropertyValue>> = BTreeMap::new();
    for (k, item) in data_lines(r).enumerate() {
        let (line_no, line) = item?;
        let [id, kind, value] = three_columns(line_no, &line)?;
        if k == 0 && id == "id" {
            continue;
        }
        let kind: PropertyKind = kind.parse()?;
        let value: f64 = value.trim().parse().map_err(|e| DatasetError::Format {
            line: line_no,
            msg: format!("bad value: {e}"),
        })?;
        if !value.is_finite() {
            return Err(DatasetError::Format {
                line: line_no,
                msg: "value is not finite".into(),
            });
        }
        out.entry(id.to_string())
            .or_default()
            .push(PropertyValue::new(kind, value));
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TextFields {
    pub description: Option<String>,
    pub question: Option<String>,
    pub answer: Option<String>,
}

/// Reads `id<TAB>field<TAB>text` rows, field one of description,
/// question or answer. Later rows overwrite earlier ones.
pub fn read_texts<R: BufRead>(r: R) -> Result<BTreeMap<String, TextFields>, DatasetError> {
    let mut out: BTreeMap<String, TextFields> = BTreeMap::new();
    for (k, item) in data_lines(r).enumerate() {
        let (line_no, line) = item?;
        let [id, field, text] = three_columns(line_no, &line)?;
        if k == 0 && id == "id" {
            continue;
        }
        let entry = out.entry(id.to_string()).or_default();
        let slot = match field {
            "description" => &mut entry.description,
            "question" => &mut entry.question,
            "answer" => &mut entry.answer,
            other => {
                return Err(DatasetError::Format {
                    line: line_no,
                    msg: format!("unknown text field {other:?}"),
                })
            }
        };
        *slot = Some(text.to_string());
    }
    Ok(out)
}

/// One SMILES per line, returned in canonical form.
pub fn read_exclusions<R: BufRead>(r: R) -> Result<BTreeSet<String>, DatasetError> {
    let mut out = BTreeSet::new();
    for item in data_lines(r) {
        let (line_no, line) = item?;
        let smiles = line.split_whitespace().next().unwrap_or_default();
        let mol = parse_smiles(smiles).map_err(|e| DatasetError::Format {
            line: line_no,
            msg: e.to_string(),
        })?;
        out.insert(mol.canonical_smiles());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn properties_with_header() {
        let text = "id\tkind\tvalue\nm1\tlogp\t2.5\nm1\tqed\t0.7\nm2\tdocking\t-9.1\n";
        let p = read_properties(text.as_bytes()).unwrap();
        assert_eq!(p["m1"].len(), 2);
        assert_eq!(p["m2"], [PropertyValue::new(PropertyKind::Docking, -9.1)]);
        assert!(read_properties("m1\tmass\t1\n".as_bytes()).is_err());
        assert!(read_properties("m1\tlogp\n".as_bytes()).is_err());
        assert!(read_properties("m1\tlogp\tNaN\n".as_bytes()).is_err());
    }

    #[test]
    fn texts_and_exclusions() {
        let t = read_texts("a\tdescription\tAn alcohol.\ta tab\na\tanswer\t42\n".as_bytes()).unwrap();
        assert_eq!(t["a"].description.as_deref(), Some("An alcohol.\ta tab"));
        assert_eq!(t["a"].answer.as_deref(), Some("42"));
        assert!(read_texts("a\tnote\tx\n".as_bytes()).is_err());
        let e = read_exclusions("OCC\n# comment\n\nc1ccccc1\n".as_bytes()).unwrap();
        assert!(e.contains(&parse_smiles("CCO").unwrap().canonical_smiles()));
        assert_eq!(e.len(), 2);
    }
}
