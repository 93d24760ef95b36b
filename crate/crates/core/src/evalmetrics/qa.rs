use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::dataset::{validity_range_check, PropertyKind};

static NUMBER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?").expect("valid number pattern"));

/// First signed decimal number in `answer`, scientific notation allowed.
pub fn extract_numeric(answer: &str) -> Option<f64> {
    NUMBER
        .find_iter(answer)
        .filter_map(|m| m.as_str().parse::<f64>().ok())
        .find(|v| v.is_finite())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QaScore {
    /// Mean absolute error over valid answers.
    pub mae: Option<f64>,
    /// Coefficient of determination over valid answers; `None` when there
    /// are no valid answers or their truths have zero variance.
    pub r2: Option<f64>,
    pub valid_ratio: f64,
}

/// Scores free-text property answers against true values. An answer is
/// valid when it contains a number inside the validity range of `kind`.
pub fn property_qa_score(preds: &[&str], truths: &[f64], kind: PropertyKind) -> Result<QaScore, EvalError> {
    if preds.len() != truths.len() {
        return Err(EvalError::LengthMismatch(preds.len(), truths.len()));
    }
    if preds.len() < 2 {
        return Err(EvalError::TooFew {
            needed: 2,
            got: preds.len(),
        });
    }
    let mut valid: Vec<(f64, f64)> = Vec::new();
    for (p, &t) in preds.iter().zip(truths) {
        if let Some(v) = extract_numeric(p) {
            if validity_range_check(kind, v)? {
                valid.push((v, t));
            }
        }
    }
    let valid_ratio = valid.len() as f64 / preds.len() as f64;
    if valid.is_empty() {
        return Ok(QaScore {
            mae: None,
            r2: None,
            valid_ratio,
        });
    }
    let n = valid.len() as f64;
    let mae = valid.iter().map(|(p, t)| (p - t).abs()).sum::<f64>() / n;
    let mean = valid.iter().map(|(_, t)| t).sum::<f64>() / n;
    let ss_tot: f64 = valid.iter().map(|(_, t)| (t - mean).powi(2)).sum();
    let ss_res: f64 = valid.iter().map(|(p, t)| (t - p).powi(2)).sum();
    let r2 = (ss_tot > 0.0).then(|| 1.0 - ss_res / ss_tot);
    Ok(QaScore {
        mae: Some(mae),
        r2,
        valid_ratio,
    })
}

/// Fraction of docking scores at or below `threshold`; 0 for no scores.
pub fn high_affinity_rate(scores: &[f64], threshold: f64) -> f64 {
    if scores.is_empty() {
        return 0.0;
    }
    scores.iter().filter(|&&s| s <= threshold).count() as f64 / scores.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(extract_numeric("The LogP is 2.31."), Some(2.31));
        assert_eq!(extract_numeric("unknown"), None);
        assert_eq!(extract_numeric("weight of 132.115 g/mol"), Some(132.115));
        assert_eq!(extract_numeric("about -1.5e-3 Hartree"), Some(-0.0015));
        assert_eq!(extract_numeric("HOMO-LUMO gap is .25"), Some(0.25));
    }

    #[test]
    fn scores() {
        let s = property_qa_score(&["1.0", "2", "3 g"], &[1.0, 2.0, 3.0], PropertyKind::Weight).unwrap();
        assert_eq!(
            s,
            QaScore {
                mae: Some(0.0),
                r2: Some(1.0),
                valid_ratio: 1.0
            }
        );
        let s = property_qa_score(&["no idea", "none"], &[1.0, 2.0], PropertyKind::Logp).unwrap();
        assert_eq!(
            s,
            QaScore {
                mae: None,
                r2: None,
                valid_ratio: 0.0
            }
        );
        let s = property_qa_score(&["2", "2", "2"], &[1.0, 2.0, 3.0], PropertyKind::Tpsa).unwrap();
        assert_eq!(s.r2, Some(0.0));
        // -5 g/mol is outside the weight range
        let s = property_qa_score(&["-5", "10"], &[1.0, 12.0], PropertyKind::Weight).unwrap();
        assert_eq!((s.valid_ratio, s.mae, s.r2), (0.5, Some(2.0), None));
        assert!(property_qa_score(&["1"], &[1.0], PropertyKind::Weight).is_err());
        assert!(property_qa_score(&["1", "2"], &[1.0], PropertyKind::Weight).is_err());
    }

    #[test]
    fn affinity() {
        assert_eq!(high_affinity_rate(&[-11.0, -9.0], -10.0), 0.5);
        assert_eq!(high_affinity_rate(&[], -10.0), 0.0);
        assert_eq!(high_affinity_rate(&[-10.0], -10.0), 1.0);
    }
}
