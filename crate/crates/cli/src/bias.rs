use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use molfrag::fingerprint::{read_features, read_fingerprint_dump, BitFingerprint, FeatureVector};
use molfrag::simspace::{bias_report, similarity_matrix, Items, SimilarityMatrix};
use serde_json::json;

use crate::input::{create, open};
use crate::{log, require_files, Failure, Outcome};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Feature-vector files (`dim= count=` header, then `id v1 .. vd`).
    #[arg(long = "features", num_args = 1..)]
    features: Vec<PathBuf>,
    /// Fingerprint dumps (`id<TAB>hex` lines).
    #[arg(long = "fingerprints", num_args = 1..)]
    fingerprints: Vec<PathBuf>,
    /// Output correlation table (TSV).
    #[arg(long)]
    out: PathBuf,
    /// Also write the long-form `row,col,pearson` CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Correlate off-diagonal entries only.
    #[arg(long)]
    exclude_diagonal: bool,
}

enum Encoding {
    Features(Vec<(String, FeatureVector)>),
    Fingerprints(Vec<(String, BitFingerprint)>),
}

impl Encoding {
    fn ids(&self) -> Vec<&str> {
        match self {
            Encoding::Features(v) => v.iter().map(|(id, _)| id.as_str()).collect(),
            Encoding::Fingerprints(v) => v.iter().map(|(id, _)| id.as_str()).collect(),
        }
    }

    fn matrix(&self, ids: &[String], label: String) -> Result<SimilarityMatrix, Failure> {
        fn pick<T: Clone>(v: &[(String, T)], ids: &[String]) -> Vec<T> {
            let by_id: HashMap<&str, &T> = v.iter().map(|(id, x)| (id.as_str(), x)).collect();
            ids.iter().map(|id| by_id[id.as_str()].clone()).collect()
        }
        let m = match self {
            Encoding::Features(v) => similarity_matrix(Items::Features(&pick(v, ids)), label)?,
            Encoding::Fingerprints(v) => similarity_matrix(Items::Fingerprints(&pick(v, ids)), label)?,
        };
        Ok(m)
    }
}

fn label(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// Molecules are aligned by id: the order of the first file, restricted to
/// ids present in every file.
pub fn run(args: &Args) -> Outcome {
    if args.features.len() + args.fingerprints.len() < 2 {
        return Err(Failure::usage("bias needs at least two encodings"));
    }
    require_files(args.features.iter().chain(&args.fingerprints))?;
    let mut encodings = Vec::new();
    for p in &args.features {
        let recs = read_features(open(p)?)?;
        encodings.push((
            label(p),
            Encoding::Features(recs.into_iter().map(|r| (r.id, r.vector)).collect()),
        ));
    }
    for p in &args.fingerprints {
        let recs = read_fingerprint_dump(open(p)?)?;
        encodings.push((
            label(p),
            Encoding::Fingerprints(recs.into_iter().map(|r| (r.id, r.fingerprint)).collect()),
        ));
    }

    let sets: Vec<std::collections::HashSet<&str>> =
        encodings.iter().map(|(_, e)| e.ids().into_iter().collect()).collect();
    let mut seen = std::collections::HashSet::new();
    let ids: Vec<String> = encodings[0]
        .1
        .ids()
        .into_iter()
        .filter(|id| sets.iter().all(|s| s.contains(id)) && seen.insert(*id))
        .map(str::to_string)
        .collect();
    let dropped = sets.iter().map(|s| s.len()).max().unwrap_or(0) - ids.len();
    if dropped > 0 {
        log::warn("ids_not_shared", json!({ "kept": ids.len(), "dropped": dropped }));
    }

    let matrices = encodings
        .iter()
        .map(|(l, e)| e.matrix(&ids, l.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let table = bias_report(&matrices, !args.exclude_diagonal)?;
    let mut w = create(&args.out)?;
    w.write_all(table.to_tsv().as_bytes())?;
    w.flush()?;
    if let Some(csv) = &args.csv {
        let mut w = create(csv)?;
        w.write_all(table.to_csv().as_bytes())?;
        w.flush()?;
    }
    log::info(
        "bias_report",
        json!({ "encodings": table.labels, "molecules": ids.len(), "include_diagonal": !args.exclude_diagonal }),
    );
    Ok(())
}
