//! JSON evaluation reports, one per (feature method, model family) cell.

use e2vec_core::classify::{f1, EvalReport, ModelRun, Scores, Winner};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoresJson {
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl From<&Scores> for ScoresJson {
    fn from(s: &Scores) -> Self {
        ScoresJson {
            f1: s.f1,
            precision: s.precision,
            recall: s.recall,
            tp: s.confusion.tp,
            fp: s.confusion.fp,
            tn: s.confusion.tn,
            fn_: s.confusion.fn_,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunJson {
    pub params: String,
    pub scores: ScoresJson,
}

impl From<&ModelRun> for RunJson {
    fn from(r: &ModelRun) -> Self {
        RunJson {
            params: r.params.to_string(),
            scores: (&r.scores).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvJson {
    pub folds: usize,
    pub best_params: String,
    pub best_score: f64,
    /// Mean validation F1 per grid point, in grid order.
    pub grid: Vec<(String, f64)>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionJson {
    pub user_id: String,
    pub at_risk: bool,
    pub tuned: bool,
    pub default: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportJson {
    pub config_hash: String,
    pub method: String,
    pub family: String,
    pub seed: u64,
    pub train_students: usize,
    pub test_students: usize,
    pub test_at_risk: usize,
    /// F1 of predicting every test student at risk.
    pub always_at_risk_f1: f64,
    pub cv: CvJson,
    pub tuned: RunJson,
    pub default: RunJson,
    /// `"tuned"` or `"default"`, whichever scored higher on the test set.
    pub best: String,
    pub best_f1: f64,
    pub predictions: Vec<PredictionJson>,
}

pub struct ReportContext<'a> {
    pub config_hash: &'a str,
    pub method: &'a str,
    pub family: &'a str,
    pub seed: u64,
    pub folds: usize,
    pub grid: Vec<String>,
    pub train_students: usize,
    pub test_users: &'a [String],
    pub test_labels: &'a [bool],
}

pub fn build_report(ctx: &ReportContext<'_>, r: &EvalReport) -> ReportJson {
    let baseline = f1(&vec![true; ctx.test_labels.len()], ctx.test_labels);
    let predictions = ctx
        .test_users
        .iter()
        .enumerate()
        .map(|(i, u)| PredictionJson {
            user_id: u.clone(),
            at_risk: ctx.test_labels[i],
            tuned: r.tuned.predictions[i],
            default: r.default.predictions[i],
        })
        .collect();
    ReportJson {
        config_hash: ctx.config_hash.into(),
        method: ctx.method.into(),
        family: ctx.family.into(),
        seed: ctx.seed,
        train_students: ctx.train_students,
        test_students: ctx.test_labels.len(),
        test_at_risk: ctx.test_labels.iter().filter(|&&l| l).count(),
        always_at_risk_f1: baseline.f1,
        cv: CvJson {
            folds: ctx.folds,
            best_params: r.cv.best.to_string(),
            best_score: r.cv.best_score,
            grid: ctx.grid.iter().cloned().zip(r.cv.scores.iter().copied()).collect(),
            warnings: r.cv.warnings.clone(),
        },
        tuned: (&r.tuned).into(),
        default: (&r.default).into(),
        best: match r.winner {
            Winner::Tuned => "tuned",
            Winner::Default => "default",
        }
        .into(),
        best_f1: r.best().scores.f1,
        predictions,
    }
}

pub fn to_json(report: &ReportJson) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}
