//! `molfrag`: corpus → vocabulary → tokenized dataset → bias report →
//! metric report.

mod bias;
mod build;
mod eval;
mod input;
mod log;
mod mine;
mod tokenize;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "molfrag",
    version,
    about = "Fragment vocabulary mining, tokenization, datasets and metrics"
)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "MOLFRAG_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the number of CPUs. Never changes output.
    #[arg(long, global = true, env = "MOLFRAG_THREADS")]
    threads: Option<usize>,
    /// Unparseable input lines tolerated before failing with exit code 2.
    #[arg(long, global = true, env = "MOLFRAG_MAX_BAD_LINES", default_value_t = 0)]
    max_bad_lines: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mine a fragment vocabulary from a corpus.
    Mine(mine::Args),
    /// Decompose corpus molecules into fragment tokens (JSON lines).
    Tokenize(tokenize::Args),
    /// Write Morgan fingerprints of a corpus.
    Fingerprint(input::FingerprintArgs),
    /// Pearson correlations between per-encoding similarity matrices.
    Bias(bias::Args),
    /// Build task records (JSON lines).
    Build(build::Args),
    /// Score generated molecules against references.
    Eval(eval::Args),
}

/// A failed run: exit code 1 for usage errors, 2 for bad data.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            error: anyhow::anyhow!(msg.into()),
        }
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure {
            code: 2,
            error: e.into(),
        }
    }
}

pub type Outcome = Result<(), Failure>;

/// Settings shared by every command.
#[derive(Debug, Clone, Copy)]
pub struct Global {
    pub seed: u64,
    pub max_bad_lines: usize,
}

/// Random source of the record at `index`: one ChaCha stream per record,
/// so results do not depend on scheduling.
pub fn record_rng(seed: u64, index: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Fails with a usage error unless every path names an existing file.
pub fn require_files<'a>(paths: impl IntoIterator<Item = &'a PathBuf>) -> Outcome {
    for p in paths {
        if !Path::new(p).is_file() {
            return Err(Failure::usage(format!("no such file: {}", p.display())));
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::usage("--threads must be at least 1"));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Failure::usage(e.to_string()))?;
    let global = Global {
        seed: cli.seed,
        max_bad_lines: cli.max_bad_lines,
    };
    pool.install(|| match cli.command {
        Command::Mine(a) => mine::run(&a, global),
        Command::Tokenize(a) => tokenize::run(&a, global),
        Command::Fingerprint(a) => input::fingerprint(&a, global),
        Command::Bias(a) => bias::run(&a),
        Command::Build(a) => build::run(&a, global),
        Command::Eval(a) => eval::run(&a, global),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            log::error(&f.error, f.code);
            ExitCode::from(f.code)
        }
    }
}
