use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::{f1, LabeledDataset, Model, ModelSpec, Params, Scores};
use crate::rng;
use crate::{Error, Result};

/// Splits indices into `folds` groups with per-class round-robin after a
/// seeded shuffle, so each fold keeps the label mix.
pub fn stratified_folds(labels: &[bool], folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut r = rng::stream(seed, 0x666f_6c64);
    let mut out = alloc::vec![Vec::new(); folds];
    let mut next = 0usize;
    for class in [false, true] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut r);
        for i in idx {
            out[next % folds].push(i);
            next += 1;
        }
    }
    for f in &mut out {
        f.sort_unstable();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub best: Params,
    pub best_score: f64,
    /// Mean validation F1 of every grid point, in grid order.
    pub scores: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Picks the grid point with the highest mean validation F1; the earliest
/// point wins ties.
pub fn grid_search_cv(spec: &ModelSpec, train: &LabeledDataset, folds: usize) -> Result<CvResult> {
    spec.validate()?;
    if folds < 2 {
        return Err(Error::Config("need at least two folds".into()));
    }
    if train.len() < folds {
        return Err(Error::Config(format!("{} samples cannot fill {folds} folds", train.len())));
    }
    if train.labels.iter().all(|&l| l) || train.labels.iter().all(|&l| !l) {
        return Err(Error::Config("training data must contain both classes".into()));
    }
    let parts = stratified_folds(&train.labels, folds, spec.seed);
    let mut warnings = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        let pos = p.iter().filter(|&&j| train.labels[j]).count();
        if pos == 0 || pos == p.len() {
            warnings.push(format!("fold {i} holds a single class; its F1 uses the zero-division convention"));
        }
    }

    let mut scores = Vec::with_capacity(spec.grid.len());
    for params in &spec.grid {
        let mut total = 0.0;
        for held in 0..folds {
            let fit_idx: Vec<usize> = parts
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != held)
                .flat_map(|(_, p)| p.iter().copied())
                .collect();
            let (x, y) = train.subset(&fit_idx);
            let model = Model::fit(params, &x, &y, spec.seed)?;
            let (vx, vy) = train.subset(&parts[held]);
            total += f1(&model.predict(&vx)?, &vy).f1;
        }
        scores.push(total / folds as f64);
    }
    let (best_i, best_score) = scores
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc });
    Ok(CvResult {
        best: spec.grid[best_i],
        best_score,
        scores,
        warnings,
    })
}

/// Fits `params` on all of `train` and predicts `test`.
pub fn fit_predict(params: &Params, seed: u64, train: &LabeledDataset, test: &[Vec<f64>]) -> Result<Vec<bool>> {
    if let Some(bad) = test.iter().find(|r| r.len() != train.dim()) {
        return Err(Error::DimensionMismatch {
            expected: train.dim(),
            found: bad.len(),
        });
    }
    Model::fit(params, &train.features, &train.labels, seed)?.predict(test)
}

/// One fitted configuration evaluated on the test set.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelRun {
    pub params: Params,
    pub scores: Scores,
    pub predictions: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    Tuned,
    Default,
}

/// Tuned and default models of one family, trained on one course and
/// evaluated on another.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub cv: CvResult,
    pub tuned: ModelRun,
    pub default: ModelRun,
    /// Higher test F1; the tuned model wins ties.
    pub winner: Winner,
}

impl EvalReport {
    pub fn best(&self) -> &ModelRun {
        match self.winner {
            Winner::Tuned => &self.tuned,
            Winner::Default => &self.default,
        }
    }
}

pub fn evaluate(spec: &ModelSpec, train: &LabeledDataset, test: &LabeledDataset, folds: usize) -> Result<EvalReport> {
    if test.is_empty() {
        return Err(Error::Config("test set is empty".into()));
    }
    let cv = grid_search_cv(spec, train, folds)?;
    let run = |params: Params| -> Result<ModelRun> {
        let predictions = fit_predict(&params, spec.seed, train, &test.features)?;
        Ok(ModelRun {
            params,
            scores: f1(&predictions, &test.labels),
            predictions,
        })
    };
    let tuned = run(cv.best)?;
    let default = run(spec.default_params())?;
    let winner = if default.scores.f1 > tuned.scores.f1 {
        Winner::Default
    } else {
        Winner::Tuned
    };
    Ok(EvalReport { cv, tuned, default, winner })
}
