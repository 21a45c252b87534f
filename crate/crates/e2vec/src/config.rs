//! Pipeline configuration, loaded from TOML.
//!
//! Every section has defaults, so an empty file is a valid configuration.
//! The config hash covers everything except file paths: two runs that differ
//! only in where they read and write produce the same artifacts.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use e2vec_core::aggregate::HistogramMode;
use e2vec_core::baseline::OcNorm;
use e2vec_core::classify::{Family, ForestParams, KnnParams, ModelSpec, Params, Weighting};
use e2vec_core::codebook::KMeansParams;
use e2vec_core::embedding::Hyperparams;
use e2vec_core::math::Fnv64;
use e2vec_core::synth::SynthConfig;
use e2vec_core::tokenizer::TokenizerConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eventstream::ColumnMap;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub events: Option<PathBuf>,
    pub grades: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub codebook: Option<PathBuf>,
    pub features: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TokenizerSection {
    pub unit_window_secs: i64,
    pub action_gap_secs: i64,
}

impl Default for TokenizerSection {
    fn default() -> Self {
        let d = TokenizerConfig::default();
        TokenizerSection {
            unit_window_secs: d.unit_window_secs,
            action_gap_secs: d.action_gap_secs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingSection {
    pub dim: usize,
    pub epochs: usize,
    pub min_count: u64,
    pub window: usize,
    pub negatives: usize,
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub bucket_count: u64,
    pub initial_lr: f64,
    pub subsample_t: f64,
}

impl Default for EmbeddingSection {
    fn default() -> Self {
        let h = Hyperparams::default();
        EmbeddingSection {
            dim: h.dim,
            epochs: h.epochs,
            min_count: h.min_count,
            window: h.window,
            negatives: h.negatives,
            ngram_min: h.ngram_min,
            ngram_max: h.ngram_max,
            bucket_count: h.bucket_count,
            initial_lr: h.initial_lr,
            subsample_t: h.subsample_t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodebookSection {
    pub k: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub restarts: usize,
    /// Cluster distinct unit sequences only.
    pub dedup: bool,
}

impl Default for CodebookSection {
    fn default() -> Self {
        let p = KMeansParams::new(10, 0);
        CodebookSection {
            k: p.k,
            max_iter: p.max_iter,
            tol: p.tol,
            restarts: p.restarts,
            dedup: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    E2vec,
    Oc,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::E2vec => "e2vec",
            Method::Oc => "oc",
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "e2vec" => Ok(Method::E2vec),
            "oc" => Ok(Method::Oc),
            _ => Err(format!("unknown method {s:?} (expected e2vec or oc)")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Histogram {
    #[default]
    Normalized,
    Counts,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    #[default]
    L2,
    L1,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeaturesSection {
    pub method: Method,
    pub histogram: Histogram,
    pub oc_norm: Norm,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    #[default]
    RandomForest,
    Knn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightingName {
    Uniform,
    Distance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifySection {
    pub family: FamilyName,
    pub folds: usize,
    pub forest_trees: Vec<usize>,
    /// 0 means unlimited depth.
    pub forest_max_depth: Vec<usize>,
    pub forest_min_split: Vec<usize>,
    pub knn_neighbors: Vec<usize>,
    pub knn_weighting: Vec<WeightingName>,
}

impl Default for ClassifySection {
    fn default() -> Self {
        ClassifySection {
            family: FamilyName::RandomForest,
            folds: 3,
            forest_trees: vec![50, 100, 200],
            forest_max_depth: vec![0, 5, 10],
            forest_min_split: vec![2, 5],
            knn_neighbors: vec![3, 5, 7, 11],
            knn_weighting: vec![WeightingName::Uniform, WeightingName::Distance],
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    #[default]
    Small,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub preset: Preset,
    pub students: usize,
}

impl Default for SynthSection {
    fn default() -> Self {
        SynthSection {
            preset: Preset::Small,
            students: 60,
        }
    }
}

/// Everything a pipeline run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Training threads; 1 gives bit-reproducible models.
    pub threads: usize,
    pub paths: Paths,
    pub columns: ColumnMap,
    pub tokenizer: TokenizerSection,
    pub embedding: EmbeddingSection,
    pub codebook: CodebookSection,
    pub features: FeaturesSection,
    pub classify: ClassifySection,
    pub synth: SynthSection,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 42,
            threads: 1,
            paths: Paths::default(),
            columns: ColumnMap::default(),
            tokenizer: TokenizerSection::default(),
            embedding: EmbeddingSection::default(),
            codebook: CodebookSection::default(),
            features: FeaturesSection::default(),
            classify: ClassifySection::default(),
            synth: SynthSection::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// 16 hex digits identifying every non-path setting.
    pub fn hash(&self) -> String {
        let mut view = self.clone();
        view.paths = Paths::default();
        let mut h = Fnv64::default();
        h.write(view.to_toml().as_bytes());
        format!("{:016x}", h.finish())
    }

    pub fn validate(&self) -> Result<()> {
        if self.threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if self.tokenizer.unit_window_secs < 0 || self.tokenizer.action_gap_secs < 0 {
            return Err(Error::Config("tokenizer thresholds must be non-negative".into()));
        }
        self.hyperparams().validate()?;
        if self.codebook.k == 0 || self.codebook.restarts == 0 || self.codebook.max_iter == 0 {
            return Err(Error::Config("codebook k, restarts and max_iter must be at least 1".into()));
        }
        if self.classify.folds < 2 {
            return Err(Error::Config("classify folds must be at least 2".into()));
        }
        self.model_spec().validate()?;
        Ok(())
    }

    pub fn tokenizer(&self) -> TokenizerConfig {
        TokenizerConfig {
            unit_window_secs: self.tokenizer.unit_window_secs,
            action_gap_secs: self.tokenizer.action_gap_secs,
        }
    }

    pub fn hyperparams(&self) -> Hyperparams {
        let e = &self.embedding;
        Hyperparams {
            dim: e.dim,
            epochs: e.epochs,
            min_count: e.min_count,
            window: e.window,
            negatives: e.negatives,
            ngram_min: e.ngram_min,
            ngram_max: e.ngram_max,
            bucket_count: e.bucket_count,
            initial_lr: e.initial_lr,
            subsample_t: e.subsample_t,
            seed: self.seed,
        }
    }

    pub fn kmeans(&self) -> KMeansParams {
        let c = &self.codebook;
        KMeansParams {
            k: c.k,
            seed: self.seed,
            max_iter: c.max_iter,
            tol: c.tol,
            restarts: c.restarts,
        }
    }

    pub fn histogram_mode(&self) -> HistogramMode {
        match self.features.histogram {
            Histogram::Normalized => HistogramMode::Normalized,
            Histogram::Counts => HistogramMode::Counts,
        }
    }

    pub fn oc_norm(&self) -> OcNorm {
        match self.features.oc_norm {
            Norm::L2 => OcNorm::L2,
            Norm::L1 => OcNorm::L1,
        }
    }

    /// Search grid in nesting order: trees, depth, min-split for forests;
    /// neighbours, weighting for kNN.
    pub fn model_spec(&self) -> ModelSpec {
        let c = &self.classify;
        let mut grid = Vec::new();
        let family = match c.family {
            FamilyName::RandomForest => {
                for &trees in &c.forest_trees {
                    for &depth in &c.forest_max_depth {
                        for &min_split in &c.forest_min_split {
                            grid.push(Params::Forest(ForestParams {
                                trees,
                                max_depth: (depth > 0).then_some(depth),
                                min_split,
                            }));
                        }
                    }
                }
                Family::RandomForest
            }
            FamilyName::Knn => {
                for &neighbors in &c.knn_neighbors {
                    for &w in &c.knn_weighting {
                        let weighting = match w {
                            WeightingName::Uniform => Weighting::Uniform,
                            WeightingName::Distance => Weighting::InverseDistance,
                        };
                        grid.push(Params::Knn(KnnParams { neighbors, weighting }));
                    }
                }
                Family::Knn
            }
        };
        ModelSpec {
            family,
            grid,
            seed: self.seed,
        }
    }

    pub fn synth(&self) -> SynthConfig {
        match self.synth.preset {
            Preset::Small => SynthConfig::small(),
            Preset::Full => SynthConfig::full(),
        }
    }
}
