//! The `alden` command line: `run`, `fig1` and `inspect`.
//!
//! Exit codes: 0 success, 2 invalid flags or configuration, 3 data errors,
//! 4 numerical failures. Every failure prints one diagnostic line.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use crate::acquisition::Strategy;
use crate::data::{load_corpus, load_embeddings, CorpusSource, DEFAULT_EMBEDDING_DIM};
use crate::error::{Error, Result};
use crate::experiment::{
    curve_csv, figure1_csv, figure1_experiment, median, run_experiment, selections_csv, summary_csv, Dataset,
    ExperimentConfig, Figure1Config, Representation,
};
use crate::interpret::{Target, WordMode};
use crate::models::{ModelKind, TrainConfig};
use crate::output::write_atomic;
use crate::rng::{derive_seed, purpose};

#[derive(Debug, Parser)]
#[command(name = "alden", version, about = "Deep active learning by interpretation diversity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Posneg,
    Tsv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TextModel {
    Cnn,
    Meanpool,
}

impl From<TextModel> for ModelKind {
    fn from(m: TextModel) -> Self {
        match m {
            TextModel::Cnn => ModelKind::Cnn,
            TextModel::Meanpool => ModelKind::MeanPool,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WordModeArg {
    Scalar,
    Elementwise,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Logit,
    Probability,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    /// Corpus: a tsv file, a directory with a positive/negative file pair,
    /// or `POS,NEG` paths.
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Posneg)]
    pub format: Format,
    #[arg(long, value_enum, default_value_t = TextModel::Cnn)]
    pub model: TextModel,
    /// alden, rnd, egl, bald, coreset or badge.
    #[arg(long, default_value = "alden")]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long, default_value_t = 0.02)]
    pub seed_frac: f64,
    #[arg(long, default_value_t = 0.02)]
    pub budget_frac: f64,
    #[arg(long, default_value_t = 24)]
    pub iters: usize,
    /// Text word vectors; words missing from the file are random.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_EMBEDDING_DIM)]
    pub embedding_dim: usize,
    #[arg(long, default_value_t = 100)]
    pub hidden: usize,
    /// Subsample the training split to at most this many sentences.
    #[arg(long)]
    pub max_train: Option<usize>,
    #[arg(long, default_value_t = 30)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    #[arg(long, default_value_t = 32)]
    pub batch: usize,
    #[arg(long, default_value_t = 20)]
    pub bald_passes: usize,
    #[arg(long, value_enum, default_value_t = WordModeArg::Scalar)]
    pub word_mode: WordModeArg,
    #[arg(long, value_enum, default_value_t = TargetArg::Logit)]
    pub target: TargetArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Fig1Args {
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub seeds: usize,
    /// First seed; seeds are consecutive from here.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, clap::Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Posneg)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an active-learning experiment and write curves, summaries,
    /// selection logs and a manifest.
    Run(RunArgs),
    /// Cluster synthetic 2-D points by three representations and score the
    /// clusterings against the true regions.
    Fig1(Fig1Args),
    /// Print corpus statistics.
    Inspect(InspectArgs),
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::Config(_) | Error::Budget { .. } => 2,
        Error::Io { .. } | Error::Parse { .. } | Error::EmptyCorpus | Error::Input(_) => 3,
        _ => 4,
    }
}

/// Parses `args` (program name first) and executes the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Fig1(a) => cmd_fig1(a, out),
        Command::Inspect(a) => cmd_inspect(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn source(dataset: &Path, format: Format) -> Result<CorpusSource> {
    CorpusSource::resolve(dataset, format == Format::Tsv)
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

impl RunArgs {
    pub fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            model: self.model.into(),
            hidden: self.hidden,
            embedding_dim: self.embedding_dim,
            strategy: self.strategy,
            seed_fraction: self.seed_frac,
            budget_fraction: self.budget_frac,
            iterations: self.iters,
            runs: self.runs,
            base_seed: self.seed,
            train: TrainConfig {
                lr: self.lr,
                epochs: self.epochs,
                batch: self.batch,
                seed: 0,
                reinit: true,
            },
            bald_passes: self.bald_passes,
            word_mode: match self.word_mode {
                WordModeArg::Scalar => WordMode::Scalar,
                WordModeArg::Elementwise => WordMode::Elementwise,
            },
            target: match self.target {
                TargetArg::Logit => Target::Logit,
                TargetArg::Probability => Target::Probability,
            },
            max_train: self.max_train,
        }
    }

    /// Every setting that affects results, as `key=value` lines.
    pub fn manifest_lines(&self) -> Vec<String> {
        let opt = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        vec![
            format!("dataset={}", self.dataset.display()),
            format!("format={:?}", self.format).to_lowercase(),
            format!("model={}", ModelKind::from(self.model)),
            format!("strategy={}", self.strategy),
            format!("seed={}", self.seed),
            format!("runs={}", self.runs),
            format!("seed_frac={}", self.seed_frac),
            format!("budget_frac={}", self.budget_frac),
            format!("iters={}", self.iters),
            format!("embeddings={}", opt(&self.embeddings)),
            format!("embedding_dim={}", self.embedding_dim),
            format!("hidden={}", self.hidden),
            format!("max_train={}", self.max_train.map(|m| m.to_string()).unwrap_or_default()),
            format!("epochs={}", self.epochs),
            format!("lr={}", self.lr),
            format!("batch={}", self.batch),
            format!("bald_passes={}", self.bald_passes),
            format!("word_mode={:?}", self.word_mode).to_lowercase(),
            format!("target={:?}", self.target).to_lowercase(),
        ]
    }
}

/// Hex SHA-256 of the manifest configuration lines.
pub fn config_hash(lines: &[String]) -> String {
    let mut h = Sha256::new();
    for l in lines {
        h.update(l.as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        write!(s, "{b:02x}").expect("string write");
        s
    })
}

fn cmd_run(a: &RunArgs, out: &mut dyn Write) -> Result<()> {
    let config = a.config();
    config.validate()?;
    let corpus = load_corpus(&source(&a.dataset, a.format)?)?;
    let embeddings = match &a.embeddings {
        Some(p) => Some(load_embeddings(
            p,
            &corpus.vocab,
            a.embedding_dim,
            derive_seed(a.seed, &[purpose::EMBEDDINGS]),
        )?),
        None => None,
    };
    let name = a
        .dataset
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    let dataset = Dataset {
        name: name.clone(),
        corpus,
        embeddings,
    };
    let outcomes = run_experiment(&dataset, &config)?;

    let model = ModelKind::from(a.model).to_string();
    let prefix = a.strategy.name();
    let files = [
        (format!("{prefix}-curve.csv"), curve_csv(&outcomes)),
        (format!("{prefix}-summary.csv"), summary_csv(&outcomes, &model, &name)),
        (format!("{prefix}-selections.csv"), selections_csv(&outcomes)),
    ];
    let lines = a.manifest_lines();
    let mut manifest = lines.join("\n");
    writeln!(manifest, "\nconfig_hash={}", config_hash(&lines)).expect("string write");
    for (f, _) in &files {
        writeln!(manifest, "artifact={f}").expect("string write");
    }
    create_dir(&a.out)?;
    for (f, body) in &files {
        write_atomic(&a.out.join(f), body)?;
    }
    write_atomic(&a.out.join(format!("{prefix}-manifest.txt")), &manifest)?;

    let naucs: Vec<f64> = outcomes.iter().filter_map(|o| o.curve.nauc).collect();
    let report = match median(&naucs) {
        Some(m) => format!("strategy={} runs={} median_nauc={m:.6}", a.strategy, outcomes.len()),
        None => format!("strategy={} runs={} median_nauc=NA", a.strategy, outcomes.len()),
    };
    writeln!(out, "{report}").map_err(|e| Error::io("<stdout>", e))
}

fn cmd_fig1(a: &Fig1Args, out: &mut dyn Write) -> Result<()> {
    if a.n == 0 || a.seeds == 0 {
        return Err(Error::Config("--n and --seeds must be positive".into()));
    }
    let mut reports = Vec::with_capacity(a.seeds);
    for s in 0..a.seeds as u64 {
        reports.push(figure1_experiment(&Figure1Config::new(a.n, a.seed + s))?);
    }
    create_dir(&a.out)?;
    write_atomic(&a.out.join("fig1.csv"), &figure1_csv(&reports))?;
    let mut line = String::from("median_ari");
    for r in Representation::ALL {
        let v: Vec<f64> = reports.iter().map(|x| x.get(r)).collect();
        write!(line, " {r}={:.4}", median(&v).expect("at least one seed")).expect("string write");
    }
    writeln!(out, "{line}").map_err(|e| Error::io("<stdout>", e))
}

/// Nearest-rank percentile of sorted values.
fn percentile(sorted: &[usize], q: f64) -> usize {
    let rank = ((q / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

fn cmd_inspect(a: &InspectArgs, out: &mut dyn Write) -> Result<()> {
    let corpus = load_corpus(&source(&a.dataset, a.format)?)?;
    let mut lengths: Vec<usize> = corpus.sentences.iter().map(|s| s.tokens.len()).collect();
    lengths.sort_unstable();
    let positive = corpus.sentences.iter().filter(|s| s.label == Some(1)).count();
    let negative = corpus.sentences.iter().filter(|s| s.label == Some(0)).count();
    let mut text = String::new();
    writeln!(text, "sentences={}", corpus.sentences.len()).expect("string write");
    // PAD and UNK are not words of the corpus
    writeln!(text, "vocab={}", corpus.vocab.len() - 2).expect("string write");
    writeln!(text, "positive={positive}").expect("string write");
    writeln!(text, "negative={negative}").expect("string write");
    writeln!(
        text,
        "positive_fraction={:.4}",
        positive as f64 / corpus.sentences.len() as f64
    )
    .expect("string write");
    for q in [10, 50, 90, 100] {
        writeln!(text, "length_p{q}={}", percentile(&lengths, q as f64)).expect("string write");
    }
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentiles() {
        let v = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];
        assert_eq!(percentile(&v, 10.0), 1);
        assert_eq!(percentile(&v, 50.0), 5);
        assert_eq!(percentile(&v, 100.0), 10);
    }

    #[test]
    fn hash_is_hex_sha256() {
        // sha256("a\n")
        assert_eq!(
            config_hash(&["a".to_string()]),
            "87428fc522803d31065e7bce3cf03fe475096631e5e07bbd7a0fde60c4cf25c7"
        );
    }
}
