//! At-risk prediction: grade labelling, random forest and k-nearest
//! neighbour classifiers, stratified grid search and F1 evaluation.

mod forest;
mod knn;
mod metrics;
mod search;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use forest::{DecisionTree, RandomForest};
pub use knn::KnnClassifier;
pub use metrics::{f1, Confusion, Scores};
pub use search::{evaluate, fit_predict, grid_search_cv, stratified_folds, CvResult, EvalReport, ModelRun, Winner};

use crate::{Error, Result};

/// Final course grade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Grade {
    A,
    B,
    C,
    D,
    F,
}

impl Grade {
    pub const ALL: [Grade; 5] = [Grade::A, Grade::B, Grade::C, Grade::D, Grade::F];

    pub fn parse(s: &str) -> Option<Grade> {
        Some(match s.trim() {
            "A" => Grade::A,
            "B" => Grade::B,
            "C" => Grade::C,
            "D" => Grade::D,
            "F" => Grade::F,
            _ => return None,
        })
    }

    /// C, D and F are at risk; A and B are not.
    pub fn at_risk(self) -> bool {
        matches!(self, Grade::C | Grade::D | Grade::F)
    }

    pub fn letter(self) -> &'static str {
        match self {
            Grade::A => "A",
            Grade::B => "B",
            Grade::C => "C",
            Grade::D => "D",
            Grade::F => "F",
        }
    }
}

/// Maps each user's grade letter to an at-risk flag.
pub fn label<'a, I>(grades: I) -> Result<BTreeMap<String, bool>>
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    grades
        .into_iter()
        .map(|(user, g)| {
            Grade::parse(g)
                .map(|grade| (String::from(user), grade.at_risk()))
                .ok_or_else(|| Error::UnknownGrade { user: user.into(), grade: g.into() })
        })
        .collect()
}

/// Feature rows with binary labels (`true` = at risk).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<bool>,
    pub user_ids: Vec<String>,
}

impl LabeledDataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<bool>, user_ids: Vec<String>) -> Result<Self> {
        if features.len() != labels.len() || features.len() != user_ids.len() {
            return Err(Error::DimensionMismatch {
                expected: features.len(),
                found: labels.len().min(user_ids.len()),
            });
        }
        if let Some(d) = features.first().map(Vec::len) {
            if let Some(bad) = features.iter().find(|r| r.len() != d) {
                return Err(Error::DimensionMismatch { expected: d, found: bad.len() });
            }
        }
        Ok(LabeledDataset { features, labels, user_ids })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    fn subset(&self, idx: &[usize]) -> (Vec<Vec<f64>>, Vec<bool>) {
        (
            idx.iter().map(|&i| self.features[i].clone()).collect(),
            idx.iter().map(|&i| self.labels[i]).collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    RandomForest,
    Knn,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::RandomForest => "random_forest",
            Family::Knn => "knn",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestParams {
    pub trees: usize,
    /// `None` grows trees until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_split: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            trees: 100,
            max_depth: None,
            min_split: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    Uniform,
    InverseDistance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnnParams {
    pub neighbors: usize,
    pub weighting: Weighting,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams {
            neighbors: 5,
            weighting: Weighting::Uniform,
        }
    }
}

/// One point of a hyperparameter grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Params {
    Forest(ForestParams),
    Knn(KnnParams),
}

impl Params {
    pub fn family(&self) -> Family {
        match self {
            Params::Forest(_) => Family::RandomForest,
            Params::Knn(_) => Family::Knn,
        }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Params::Forest(p) => {
                write!(f, "trees={} max_depth=", p.trees)?;
                match p.max_depth {
                    Some(d) => write!(f, "{d}")?,
                    None => f.write_str("none")?,
                }
                write!(f, " min_split={}", p.min_split)
            }
            Params::Knn(p) => {
                let w = match p.weighting {
                    Weighting::Uniform => "uniform",
                    Weighting::InverseDistance => "distance",
                };
                write!(f, "neighbors={} weighting={w}", p.neighbors)
            }
        }
    }
}

/// Model family, its search grid and the seed used for every fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub family: Family,
    pub grid: Vec<Params>,
    pub seed: u64,
}

impl ModelSpec {
    /// The family's standard grid with seed 42.
    pub fn with_default_grid(family: Family) -> Self {
        let grid = match family {
            Family::RandomForest => {
                let mut g = Vec::new();
                for trees in [50, 100, 200] {
                    for max_depth in [None, Some(5), Some(10)] {
                        for min_split in [2, 5] {
                            g.push(Params::Forest(ForestParams { trees, max_depth, min_split }));
                        }
                    }
                }
                g
            }
            Family::Knn => {
                let mut g = Vec::new();
                for neighbors in [3, 5, 7, 11] {
                    for weighting in [Weighting::Uniform, Weighting::InverseDistance] {
                        g.push(Params::Knn(KnnParams { neighbors, weighting }));
                    }
                }
                g
            }
        };
        ModelSpec { family, grid, seed: 42 }
    }

    /// Library-default parameters of the family.
    pub fn default_params(&self) -> Params {
        match self.family {
            Family::RandomForest => Params::Forest(ForestParams::default()),
            Family::Knn => Params::Knn(KnnParams::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config("hyperparameter grid is empty".into()));
        }
        if let Some(p) = self.grid.iter().find(|p| p.family() != self.family) {
            return Err(Error::Config(alloc::format!("grid point {p} does not belong to {}", self.family.name())));
        }
        for p in &self.grid {
            match p {
                Params::Forest(f) if f.trees == 0 || f.min_split < 2 || f.max_depth == Some(0) => {
                    return Err(Error::Config(alloc::format!("invalid forest parameters {p}")));
                }
                Params::Knn(k) if k.neighbors == 0 => {
                    return Err(Error::Config(alloc::format!("invalid knn parameters {p}")));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// A fitted model of either family.
#[derive(Debug, Clone)]
pub enum Model {
    Forest(RandomForest),
    Knn(KnnClassifier),
}

impl Model {
    pub fn fit(params: &Params, features: &[Vec<f64>], labels: &[bool], seed: u64) -> Result<Model> {
        if features.is_empty() {
            return Err(Error::Config("cannot fit on an empty training set".into()));
        }
        Ok(match params {
            Params::Forest(p) => Model::Forest(RandomForest::fit(p, features, labels, seed)),
            Params::Knn(p) => Model::Knn(KnnClassifier::fit(p, features, labels)),
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Model::Forest(m) => m.dim(),
            Model::Knn(m) => m.dim(),
        }
    }

    pub fn predict_one(&self, x: &[f64]) -> bool {
        match self {
            Model::Forest(m) => m.predict_proba(x) > 0.5,
            Model::Knn(m) => m.predict(x),
        }
    }

    pub fn predict(&self, rows: &[Vec<f64>]) -> Result<Vec<bool>> {
        let d = self.dim();
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: bad.len() });
        }
        Ok(rows.iter().map(|r| self.predict_one(r)).collect())
    }
}
