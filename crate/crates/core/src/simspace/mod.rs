//! Encoding-bias analysis and embedding-matrix utilities.
//!
//! Similarity matrices are built per encoding (cosine for feature vectors,
//! Tanimoto for fingerprints) and compared by Pearson correlation over
//! their entries. Embedding matrices cover vocabulary augmentation and
//! column-wise amplitude/direction drift.

mod embed;
mod io;

use rayon::prelude::*;
use thiserror::Error;

use crate::fingerprint::{cosine, tanimoto, BitFingerprint, FeatureVector, FingerprintError};

pub use embed::{augment_embeddings, weight_drift, AugmentStats, Drift, EmbeddingMatrix};
pub use io::{read_dense_matrix, read_embedding_matrix, write_dense_matrix, write_embedding_matrix};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("shape mismatch: {0} vs {1}")]
    ShapeMismatch(String, String),
    #[error("matrix {0:?} is constant")]
    ConstantMatrix(String),
    #[error("need at least {needed} items, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("column {0} has zero norm")]
    ZeroColumn(usize),
    #[error("non-finite entry at {0}")]
    NonFinite(usize),
    #[error(transparent)]
    Kernel(#[from] FingerprintError),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Items of one encoding.
#[derive(Debug, Clone, Copy)]
pub enum Items<'a> {
    Features(&'a [FeatureVector]),
    Fingerprints(&'a [BitFingerprint]),
}

impl Items<'_> {
    fn len(&self) -> usize {
        match self {
            Items::Features(v) => v.len(),
            Items::Fingerprints(v) => v.len(),
        }
    }

    fn similarity(&self, i: usize, j: usize) -> Result<f64, FingerprintError> {
        match self {
            Items::Features(v) => cosine(&v[i], &v[j]),
            Items::Fingerprints(v) => tanimoto(&v[i], &v[j]),
        }
    }
}

/// Dense symmetric n×n similarity matrix for one encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    values: Vec<f64>,
    label: String,
}

impl SimilarityMatrix {
    /// Checks shape, finiteness and symmetry (within 1e-9).
    pub fn from_values(n: usize, values: Vec<f64>, label: impl Into<String>) -> Result<SimilarityMatrix, SimError> {
        if values.len() != n * n {
            return Err(SimError::ShapeMismatch(
                format!("{n}x{n}"),
                format!("{} values", values.len()),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(SimError::NonFinite(i));
        }
        for i in 0..n {
            for j in i + 1..n {
                if (values[i * n + j] - values[j * n + i]).abs() > 1e-9 {
                    return Err(SimError::NotSymmetric(i, j));
                }
            }
        }
        Ok(SimilarityMatrix {
            n,
            values,
            label: label.into(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn with_label(mut self, label: impl Into<String>) -> SimilarityMatrix {
        self.label = label.into();
        self
    }
}

/// Pairwise similarities of `items`: cosine for feature vectors, Tanimoto
/// for fingerprints. The diagonal is 1.
pub fn similarity_matrix(items: Items<'_>, label: impl Into<String>) -> Result<SimilarityMatrix, SimError> {
    let n = items.len();
    if n < 2 {
        return Err(SimError::TooFew { needed: 2, got: n });
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (i + 1..n).map(|j| items.similarity(i, j)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    if let Items::Features(v) = items {
        // cosine(u, u) is 1 by definition but must still reject zero vectors
        if v.iter().any(|u| u.norm() == 0.0) {
            return Err(FingerprintError::ZeroVector.into());
        }
    }
    let mut values = vec![0.0; n * n];
    for (i, row) in rows.into_iter().enumerate() {
        values[i * n + i] = 1.0;
        for (k, s) in row.into_iter().enumerate() {
            let j = i + 1 + k;
            values[i * n + j] = s;
            values[j * n + i] = s;
        }
    }
    Ok(SimilarityMatrix {
        n,
        values,
        label: label.into(),
    })
}

/// Pearson correlation over all n² entries.
pub fn pearson(p: &SimilarityMatrix, q: &SimilarityMatrix) -> Result<f64, SimError> {
    pearson_with(p, q, true)
}

/// Pearson correlation over the entries of both matrices, optionally
/// leaving out the diagonal.
pub fn pearson_with(p: &SimilarityMatrix, q: &SimilarityMatrix, include_diagonal: bool) -> Result<f64, SimError> {
    if p.n != q.n {
        return Err(SimError::ShapeMismatch(
            format!("{0}x{0}", p.n),
            format!("{0}x{0}", q.n),
        ));
    }
    let n = p.n;
    let keep = |k: usize| include_diagonal || k / n != k % n;
    let pairs = || (0..n * n).filter(|&k| keep(k)).map(|k| (p.values[k], q.values[k]));
    let count = pairs().count() as f64;
    if count == 0.0 {
        return Err(SimError::ConstantMatrix(p.label.clone()));
    }
    let (sx, sy) = pairs().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / count, sy / count);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in pairs() {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(SimError::ConstantMatrix(p.label.clone()));
    }
    if syy == 0.0 {
        return Err(SimError::ConstantMatrix(q.label.clone()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Symmetric k×k table of pairwise Pearson correlations.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTable {
    pub labels: Vec<String>,
    /// Row-major k×k values.
    pub values: Vec<f64>,
}

impl CorrelationTable {
    pub fn k(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.k() + j]
    }

    /// Header row of labels, then one labelled row per matrix.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("encoding");
        for l in &self.labels {
            out.push('\t');
            out.push_str(l);
        }
        out.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(l);
            for j in 0..self.k() {
                out.push_str(&format!("\t{:.6}", self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }

    /// Long form `row,col,pearson`, one line per cell, for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,pearson\n");
        for (i, a) in self.labels.iter().enumerate() {
            for (j, b) in self.labels.iter().enumerate() {
                out.push_str(&format!("{a},{b},{}\n", self.get(i, j)));
            }
        }
        out
    }
}

pub fn bias_report(matrices: &[SimilarityMatrix], include_diagonal: bool) -> Result<CorrelationTable, SimError> {
    let k = matrices.len();
    if k < 2 {
        return Err(SimError::TooFew { needed: 2, got: k });
    }
    let mut values = vec![0.0; k * k];
    for i in 0..k {
        values[i * k + i] = 1.0;
        for j in i + 1..k {
            let rho = pearson_with(&matrices[i], &matrices[j], include_diagonal)?;
            values[i * k + j] = rho;
            values[j * k + i] = rho;
        }
    }
    Ok(CorrelationTable {
        labels: matrices.iter().map(|m| m.label.clone()).collect(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(x: &[f64]) -> FeatureVector {
        FeatureVector::new(x.to_vec()).unwrap()
    }

    fn mat(n: usize, v: &[f64]) -> SimilarityMatrix {
        SimilarityMatrix::from_values(n, v.to_vec(), "m").unwrap()
    }

    #[test]
    fn small_matrices() {
        let same = [fv(&[1.0, 2.0]), fv(&[1.0, 2.0])];
        let s = similarity_matrix(Items::Features(&same), "x").unwrap();
        for v in s.values() {
            assert!((v - 1.0).abs() < 1e-12);
        }
        let orth = [fv(&[1.0, 0.0]), fv(&[0.0, 3.0])];
        let s = similarity_matrix(Items::Features(&orth), "x").unwrap();
        assert_eq!(s.values(), &[1.0, 0.0, 0.0, 1.0]);
        assert!(similarity_matrix(Items::Features(&orth[..1]), "x").is_err());
    }

    #[test]
    fn pearson_identities() {
        let s = mat(3, &[1.0, 0.2, 0.5, 0.2, 1.0, 0.1, 0.5, 0.1, 1.0]);
        assert!((pearson(&s, &s).unwrap() - 1.0).abs() < 1e-12);
        let affine = mat(3, &s.values().iter().map(|v| 2.5 * v + 0.3).collect::<Vec<_>>());
        assert!((pearson(&s, &affine).unwrap() - 1.0).abs() < 1e-9);
        let flipped = mat(3, &s.values().iter().map(|v| 1.0 - v).collect::<Vec<_>>());
        assert!((pearson(&s, &flipped).unwrap() + 1.0).abs() < 1e-9);
        let constant = mat(3, &[0.5; 9]);
        assert!(matches!(pearson(&s, &constant), Err(SimError::ConstantMatrix(_))));
        assert!(pearson(&s, &mat(2, &[1.0, 0.0, 0.0, 1.0])).is_err());
    }

    #[test]
    fn diagonal_can_be_excluded() {
        let a = mat(3, &[1.0, 0.2, 0.5, 0.2, 1.0, 0.1, 0.5, 0.1, 1.0]);
        let b = mat(3, &[1.0, 0.1, 0.5, 0.1, 1.0, 0.2, 0.5, 0.2, 1.0]);
        let with = pearson(&a, &b).unwrap();
        let without = pearson_with(&a, &b, false).unwrap();
        assert!(with > without);
        assert!((without - 0.46 / 0.52).abs() < 1e-9);
    }

    #[test]
    fn report_shape() {
        let a = mat(2, &[1.0, 0.3, 0.3, 1.0]).with_label("a");
        let t = bias_report(&[a.clone(), a.with_label("b")], true).unwrap();
        assert_eq!(t.values, vec![1.0; 4]);
        assert_eq!(
            t.to_tsv(),
            "encoding\ta\tb\na\t1.000000\t1.000000\nb\t1.000000\t1.000000\n"
        );
        assert!(t.to_csv().starts_with("row,col,pearson\na,a,1\n"));
    }
}
