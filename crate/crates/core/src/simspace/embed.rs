use rand::Rng;
use rand_distr::StandardNormal;

use super::SimError;

/// Row-major embedding matrix, one row per vocabulary token.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<EmbeddingMatrix, SimError> {
        if values.len() != rows * cols {
            return Err(SimError::ShapeMismatch(
                format!("{rows}x{cols}"),
                format!("{} values", values.len()),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(SimError::NonFinite(i));
        }
        Ok(EmbeddingMatrix { rows, cols, values })
    }

    pub fn zeros(rows: usize, cols: usize) -> EmbeddingMatrix {
        EmbeddingMatrix {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> impl Iterator<Item = f64> + Clone + '_ {
        (0..self.rows).map(move |r| self.get(r, c))
    }

    pub fn scaled(&self, factor: f64) -> EmbeddingMatrix {
        EmbeddingMatrix {
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    fn shape(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }
}

/// Which statistics seed the new rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AugmentStats {
    /// One mean and standard deviation over every base entry.
    #[default]
    Global,
    /// Mean and standard deviation of each column.
    PerColumn,
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    (mean, var.sqrt())
}

/// Appends `n_new` rows drawn as μ + σ·ξ with ξ ~ N(0, 1), where μ and σ
/// are the (population) mean and standard deviation of the base entries.
/// The base rows are copied unchanged.
pub fn augment_embeddings<R: Rng + ?Sized>(
    base: &EmbeddingMatrix,
    n_new: usize,
    rng: &mut R,
    stats: AugmentStats,
) -> EmbeddingMatrix {
    let cols = base.cols;
    let moments: Vec<(f64, f64)> = match stats {
        AugmentStats::Global => vec![mean_std(base.values.iter().copied()); cols],
        AugmentStats::PerColumn => (0..cols).map(|c| mean_std(base.column(c))).collect(),
    };
    let mut values = Vec::with_capacity((base.rows + n_new) * cols);
    values.extend_from_slice(&base.values);
    for _ in 0..n_new {
        for &(mu, sigma) in &moments {
            let xi: f64 = rng.sample(StandardNormal);
            values.push(mu + sigma * xi);
        }
    }
    EmbeddingMatrix {
        rows: base.rows + n_new,
        cols,
        values,
    }
}

/// Column-wise change between two weight matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drift {
    /// Mean |‖wt_c‖ − ‖w0_c‖| over columns.
    pub amplitude: f64,
    /// Mean 1 − cos(wt_c, w0_c) over columns, in [0, 2].
    pub direction: f64,
}

pub fn weight_drift(w0: &EmbeddingMatrix, wt: &EmbeddingMatrix) -> Result<Drift, SimError> {
    if w0.rows != wt.rows || w0.cols != wt.cols {
        return Err(SimError::ShapeMismatch(w0.shape(), wt.shape()));
    }
    if w0.cols == 0 {
        return Err(SimError::TooFew { needed: 1, got: 0 });
    }
    let (mut amplitude, mut direction) = (0.0, 0.0);
    for c in 0..w0.cols {
        let (mut n0, mut nt, mut dot) = (0.0, 0.0, 0.0);
        for (a, b) in w0.column(c).zip(wt.column(c)) {
            n0 += a * a;
            nt += b * b;
            dot += a * b;
        }
        let (n0, nt) = (n0.sqrt(), nt.sqrt());
        if n0 == 0.0 || nt == 0.0 {
            return Err(SimError::ZeroColumn(c));
        }
        amplitude += (nt - n0).abs();
        direction += 1.0 - (dot / (n0 * nt)).clamp(-1.0, 1.0);
    }
    let cols = w0.cols as f64;
    Ok(Drift {
        amplitude: amplitude / cols,
        direction: direction / cols,
    })
}
