//! Command-line interface.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use e2vec_core::embedding::{nearest_units, similarity_histogram, EmbeddingModel};
use e2vec_core::synth::generate;

use crate::codebook_io::{load_codebook, save_codebook, write_text_codebook};
use crate::config::{FamilyName, Method, PipelineConfig, Preset};
use crate::corpus::{read_corpus, write_corpus};
use crate::error::{Error, Result};
use crate::eventstream::{parse_events, write_events};
use crate::features::{load_features, save_features};
use crate::grades::{load_grades, write_grades};
use crate::model_io::{load_model, save_model, write_text_vectors};
use crate::pipeline;
use crate::report::{build_report, to_json, ReportContext};

#[derive(Debug, Parser)]
#[command(name = "e2vec", version, about = "Turn e-book event streams into per-student feature vectors")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

/// Overrides applied on top of the config file.
#[derive(Debug, Args)]
pub struct Global {
    /// TOML pipeline configuration.
    #[arg(long, global = true, env = "E2VEC_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, env = "E2VEC_SEED")]
    pub seed: Option<u64>,
    #[arg(long, global = true, env = "E2VEC_THREADS")]
    pub threads: Option<usize>,
    /// Number of CodeWords.
    #[arg(long, global = true, env = "E2VEC_K")]
    pub k: Option<usize>,
    /// Embedding dimension.
    #[arg(long, global = true, env = "E2VEC_DIM")]
    pub dim: Option<usize>,
    #[arg(long, global = true, env = "E2VEC_EPOCHS")]
    pub epochs: Option<usize>,
    /// Feature method for `featurize`.
    #[arg(long, global = true, env = "E2VEC_METHOD", value_enum)]
    pub method: Option<MethodArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    E2vec,
    Oc,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    RandomForest,
    Knn,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PresetArg {
    Small,
    Full,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic course: events CSV and grades CSV.
    Synth {
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        grades: PathBuf,
        #[arg(long)]
        students: Option<usize>,
        #[arg(long, value_enum)]
        preset: Option<PresetArg>,
    },
    /// Events CSV to action corpus.
    Tokenize {
        #[arg(long)]
        events: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Action corpus to embedding model.
    Train {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write unit vectors as text.
        #[arg(long)]
        export_text: Option<PathBuf>,
    },
    /// Model and corpus to CodeBook.
    Codebook {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        export_text: Option<PathBuf>,
    },
    /// Events (plus model and CodeBook for E2Vec) to a feature CSV.
    Featurize {
        #[arg(long)]
        events: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        codebook: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train on one course, evaluate on another; writes a JSON report.
    Predict {
        #[arg(long)]
        train_features: PathBuf,
        #[arg(long)]
        train_grades: PathBuf,
        #[arg(long)]
        test_features: PathBuf,
        #[arg(long)]
        test_grades: PathBuf,
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embedding and cluster analyses.
    #[command(subcommand)]
    Analyze(Analyze),
}

#[derive(Debug, Subcommand)]
pub enum Analyze {
    /// Most similar units to a query unit.
    Neighbors {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        query: String,
        /// Candidate units come from this corpus instead of the vocabulary.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Distribution of similarities between a query unit and all candidates.
    Histogram {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        query: String,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        bins: usize,
    },
    /// Action-length statistics per CodeWord.
    Clusters {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        codebook: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
}

impl Global {
    /// Config file (or defaults) with command-line overrides applied.
    pub fn resolve(&self) -> Result<PipelineConfig> {
        let mut c = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.threads {
            c.threads = v;
        }
        if let Some(v) = self.k {
            c.codebook.k = v;
        }
        if let Some(v) = self.dim {
            c.embedding.dim = v;
        }
        if let Some(v) = self.epochs {
            c.embedding.epochs = v;
        }
        if let Some(m) = self.method {
            c.features.method = match m {
                MethodArg::E2vec => Method::E2vec,
                MethodArg::Oc => Method::Oc,
            };
        }
        c.validate()?;
        Ok(c)
    }
}

fn need(arg: &Option<PathBuf>, fallback: &Option<PathBuf>, what: &str) -> Result<PathBuf> {
    arg.clone()
        .or_else(|| fallback.clone())
        .ok_or_else(|| Error::Config(format!("no {what} path given (flag or [paths] in the config)")))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn read_events(path: &Path, cfg: &PipelineConfig) -> Result<Vec<e2vec_core::event::Event>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let (events, report) = parse_events(std::io::BufReader::new(f), &cfg.columns)?;
    if report.skipped() > 0 {
        log::warn!(
            "{}: skipped {} row(s): {} bad timestamp, {} missing id, {} malformed",
            path.display(),
            report.skipped(),
            report.bad_timestamp,
            report.missing_id,
            report.malformed
        );
    }
    if !report.unknown_columns.is_empty() {
        log::info!("{}: ignoring columns {:?}", path.display(), report.unknown_columns);
    }
    log::info!("{}: {} events", path.display(), events.len());
    Ok(events)
}

fn candidates(model: &EmbeddingModel, corpus: &Option<PathBuf>) -> Result<Vec<String>> {
    match corpus {
        Some(p) => {
            let c = read_corpus(p)?;
            let mut seen = std::collections::BTreeSet::new();
            Ok(c.corpus
                .actions()
                .flat_map(|a| a.units.iter())
                .filter(|u| seen.insert(u.as_str().to_string()))
                .map(|u| u.as_str().to_string())
                .collect())
        }
        None => Ok(model.vocab().entries().iter().map(|e| e.text.clone()).collect()),
    }
}

fn check_hash(artifact: &Path, found: Option<&str>, expected: &str) {
    match found {
        Some(h) if h == expected => {}
        Some(h) => log::warn!("{} was produced by config {h}, current config is {expected}", artifact.display()),
        None => log::warn!("{} carries no config hash", artifact.display()),
    }
}

/// Runs one command, writing human-readable output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let cfg = cli.global.resolve()?;
    let hash = cfg.hash();
    log::info!("config {hash}:\n{}", cfg.to_toml());
    let paths = &cfg.paths;

    match cli.command {
        Command::Synth {
            events,
            grades,
            students,
            preset,
        } => {
            let mut synth = cfg.synth.clone();
            if let Some(n) = students {
                synth.students = n;
            }
            if let Some(p) = preset {
                synth.preset = match p {
                    PresetArg::Small => Preset::Small,
                    PresetArg::Full => Preset::Full,
                };
            }
            let mut c2 = cfg.clone();
            c2.synth = synth;
            let course = generate(&c2.synth(), c2.synth.students, cfg.seed)?;
            write_events(create(&events)?, &course.events)?;
            write_grades(create(&grades)?, &course.grades)?;
            writeln!(out, "{} students, {} events", course.grades.len(), course.events.len())?;
        }
        Command::Tokenize { events, out: dest } => {
            let src = need(&events, &paths.events, "events")?;
            let dest = need(&dest, &paths.corpus, "corpus")?;
            let corpus = pipeline::tokenize_events(read_events(&src, &cfg)?, &cfg.tokenizer());
            write_corpus(&dest, &corpus, &hash)?;
            writeln!(out, "{} partitions, {} actions", corpus.entries.len(), corpus.action_count())?;
        }
        Command::Train {
            corpus,
            out: dest,
            export_text,
        } => {
            let src = need(&corpus, &paths.corpus, "corpus")?;
            let dest = need(&dest, &paths.model, "model")?;
            let c = read_corpus(&src)?;
            check_hash(&src, c.config_hash.as_deref(), &hash);
            let actions: Vec<_> = c.corpus.actions().cloned().collect();
            let model = pipeline::train(&actions, cfg.hyperparams(), cfg.threads)?;
            save_model(&dest, &model, &hash)?;
            if let Some(p) = export_text {
                write_text_vectors(create(&p)?, &model)?;
            }
            writeln!(out, "{} units, dim {}", model.vocab().len(), model.dim())?;
        }
        Command::Codebook {
            model,
            corpus,
            out: dest,
            export_text,
        } => {
            let mpath = need(&model, &paths.model, "model")?;
            let cpath = need(&corpus, &paths.corpus, "corpus")?;
            let dest = need(&dest, &paths.codebook, "codebook")?;
            let m = load_model(&mpath, Some(cfg.embedding.dim))?;
            check_hash(&mpath, Some(&m.config_hash), &hash);
            let c = read_corpus(&cpath)?;
            let actions = pipeline::clustering_actions(&c.corpus, cfg.codebook.dedup);
            let (_, clustering) = pipeline::build(&m.model, &actions, &cfg.kmeans())?;
            save_codebook(&dest, &clustering.codebook, &hash)?;
            if let Some(p) = export_text {
                write_text_codebook(create(&p)?, &clustering.codebook)?;
            }
            writeln!(
                out,
                "k={} over {} actions, objective {}",
                clustering.codebook.k(),
                actions.len(),
                clustering.objective
            )?;
        }
        Command::Featurize {
            events,
            model,
            codebook,
            out: dest,
        } => {
            let src = need(&events, &paths.events, "events")?;
            let dest = need(&dest, &paths.features, "features")?;
            let evs = read_events(&src, &cfg)?;
            let matrix = match cfg.features.method {
                Method::Oc => pipeline::oc_matrix(&evs, cfg.oc_norm(), &hash),
                Method::E2vec => {
                    let mpath = need(&model, &paths.model, "model")?;
                    let cpath = need(&codebook, &paths.codebook, "codebook")?;
                    let m = load_model(&mpath, None)?;
                    let cb = load_codebook(&cpath)?;
                    pipeline::check_dims(&m.model, &cb.codebook)?;
                    check_hash(&cpath, Some(&cb.config_hash), &hash);
                    let corpus = pipeline::tokenize_events(evs, &cfg.tokenizer());
                    let students = pipeline::e2vec_features(&m.model, &cb.codebook, &corpus, cfg.histogram_mode())?;
                    pipeline::e2vec_matrix(&students, &hash)
                }
            };
            save_features(&dest, &matrix)?;
            writeln!(out, "{} students, {} features ({})", matrix.rows.len(), matrix.dim(), matrix.method)?;
        }
        Command::Predict {
            train_features,
            train_grades,
            test_features,
            test_grades,
            family,
            out: dest,
        } => {
            let mut cfg = cfg.clone();
            if let Some(f) = family {
                cfg.classify.family = match f {
                    FamilyArg::RandomForest => FamilyName::RandomForest,
                    FamilyArg::Knn => FamilyName::Knn,
                };
            }
            let hash = cfg.hash();
            let trf = load_features(&train_features)?;
            let tef = load_features(&test_features)?;
            if trf.method != tef.method {
                return Err(Error::Schema(format!(
                    "train features use {} but test features use {}",
                    trf.method, tef.method
                )));
            }
            if trf.dim() != tef.dim() {
                return Err(Error::Dimension(format!(
                    "train features have {} columns, test features {}",
                    trf.dim(),
                    tef.dim()
                )));
            }
            let train = pipeline::labeled_dataset(&trf, &load_grades(&train_grades)?)?;
            let test = pipeline::labeled_dataset(&tef, &load_grades(&test_grades)?)?;
            let spec = cfg.model_spec();
            let report = e2vec_core::classify::evaluate(&spec, &train, &test, cfg.classify.folds)?;
            for w in &report.cv.warnings {
                log::warn!("{w}");
            }
            let ctx = ReportContext {
                config_hash: &hash,
                method: trf.method.name(),
                family: spec.family.name(),
                seed: spec.seed,
                folds: cfg.classify.folds,
                grid: spec.grid.iter().map(ToString::to_string).collect(),
                train_students: train.len(),
                test_users: &test.user_ids,
                test_labels: &test.labels,
            };
            let json = to_json(&build_report(&ctx, &report));
            match dest.or_else(|| cfg.paths.report.clone()) {
                Some(p) => {
                    fs::write(&p, &json).map_err(|e| Error::io(&p, e))?;
                    writeln!(
                        out,
                        "tuned F1 {} ({}), default F1 {}",
                        report.tuned.scores.f1, report.tuned.params, report.default.scores.f1
                    )?;
                }
                None => out.write_all(json.as_bytes())?,
            }
        }
        Command::Analyze(a) => analyze(a, &cfg, out)?,
    }
    Ok(())
}

fn analyze(a: Analyze, cfg: &PipelineConfig, out: &mut dyn Write) -> Result<()> {
    let paths = &cfg.paths;
    match a {
        Analyze::Neighbors {
            model,
            query,
            corpus,
            top,
        } => {
            let m = load_model(&need(&model, &paths.model, "model")?, None)?.model;
            let cands = candidates(&m, &corpus)?;
            let refs: Vec<&str> = cands.iter().map(String::as_str).collect();
            writeln!(out, "unit,cosine")?;
            for (u, s) in nearest_units(&m, &query, &refs, top)? {
                writeln!(out, "{u},{s}")?;
            }
        }
        Analyze::Histogram {
            model,
            query,
            corpus,
            bins,
        } => {
            let m = load_model(&need(&model, &paths.model, "model")?, None)?.model;
            let cands = candidates(&m, &corpus)?;
            let refs: Vec<&str> = cands.iter().filter(|c| **c != query).map(String::as_str).collect();
            let h = similarity_histogram(&m, &query, &refs, bins)?;
            writeln!(out, "lower,upper,count")?;
            for (i, c) in h.counts.iter().enumerate() {
                writeln!(out, "{},{},{c}", h.edges[i], h.edges[i + 1])?;
            }
        }
        Analyze::Clusters { model, codebook, corpus } => {
            let m = load_model(&need(&model, &paths.model, "model")?, None)?.model;
            let cb = load_codebook(&need(&codebook, &paths.codebook, "codebook")?)?.codebook;
            let c = read_corpus(&need(&corpus, &paths.corpus, "corpus")?)?;
            let actions = pipeline::clustering_actions(&c.corpus, cfg.codebook.dedup);
            let stats = pipeline::cluster_report(&m, &cb, &actions)?;
            writeln!(out, "cluster,max,mean,variance,count")?;
            for r in &stats.rows {
                writeln!(out, "{},{},{},{},{}", r.cluster, r.max, r.mean, r.variance, r.count)?;
            }
        }
    }
    Ok(())
}

/// Parses `args`, runs, reports errors on stderr, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 64 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
