//! Stage functions shared by the command line and by tests.

use std::collections::BTreeMap;

use e2vec_core::aggregate::{student_vector, HistogramMode, StudentVector};
use e2vec_core::baseline::{oc_vector, OcNorm};
use e2vec_core::classify::{label, LabeledDataset};
use e2vec_core::codebook::{build_codebook, dedup_actions, ClusterStats, CodeBook, Clustering, KMeansParams};
use e2vec_core::embedding::{EmbeddingModel, Hyperparams, Trainer};
use e2vec_core::event::{by_user, partition, Event};
use e2vec_core::tokenizer::{Action, ActionCorpus, TokenizerConfig};
use e2vec_core::vectorize::{action_vector, ActionVector};

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, FeatureRow};

pub fn tokenize_events(events: Vec<Event>, cfg: &TokenizerConfig) -> ActionCorpus {
    ActionCorpus::from_partitions(&partition(events), cfg)
}

/// Trains with `threads` lock-free workers. One thread is bit-reproducible;
/// more threads trade that for speed.
pub fn train(actions: &[Action], hyper: Hyperparams, threads: usize) -> Result<EmbeddingModel> {
    if actions.is_empty() {
        return Err(Error::Degenerate("corpus has no actions".into()));
    }
    let threads = threads.max(1);
    if threads == 1 {
        return Ok(e2vec_core::embedding::train(actions, hyper)?);
    }
    let trainer = Trainer::new(actions, hyper)?;
    std::thread::scope(|s| {
        for w in 0..threads {
            let t = &trainer;
            s.spawn(move || t.run_worker(w, threads));
        }
    });
    Ok(trainer.finish())
}

/// Embeds actions, logging and dropping any whose units are all zero.
pub fn action_vectors<'a, I>(model: &EmbeddingModel, actions: I) -> Vec<ActionVector>
where
    I: IntoIterator<Item = &'a Action>,
{
    let mut out = Vec::new();
    for a in actions {
        match action_vector(model, a) {
            Ok(v) => {
                if v.skipped > 0 {
                    log::warn!("action {a}: {} unit(s) had zero vectors", v.skipped);
                }
                out.push(v)
            }
            Err(e) => log::warn!("action {a} skipped: {e}"),
        }
    }
    out
}

/// The actions the CodeBook is built from: distinct unit sequences when
/// `dedup` is set, otherwise every action.
pub fn clustering_actions(corpus: &ActionCorpus, dedup: bool) -> Vec<Action> {
    let all: Vec<Action> = corpus.actions().cloned().collect();
    if dedup {
        dedup_actions(&all)
    } else {
        all
    }
}

pub fn build(model: &EmbeddingModel, actions: &[Action], params: &KMeansParams) -> Result<(Vec<Action>, Clustering)> {
    let mut kept = Vec::with_capacity(actions.len());
    let mut vectors = Vec::with_capacity(actions.len());
    for a in actions {
        match action_vector(model, a) {
            Ok(v) => {
                kept.push(a.clone());
                vectors.push(v);
            }
            Err(e) => log::warn!("action {a} left out of clustering: {e}"),
        }
    }
    let clustering = build_codebook(&vectors, params)?;
    Ok((kept, clustering))
}

/// Length statistics of the clusters that `actions` fall into.
pub fn cluster_report(model: &EmbeddingModel, codebook: &CodeBook, actions: &[Action]) -> Result<ClusterStats> {
    check_dims(model, codebook)?;
    let mut kept = Vec::new();
    let mut assignments = Vec::new();
    for a in actions {
        let v = action_vector(model, a)?;
        assignments.push(codebook.assign(&v.values)?);
        kept.push(a.clone());
    }
    Ok(e2vec_core::codebook::cluster_stats(&kept, &assignments, codebook.k())?)
}

pub fn check_dims(model: &EmbeddingModel, codebook: &CodeBook) -> Result<()> {
    if model.dim() != codebook.dim() {
        return Err(Error::Dimension(format!(
            "embedding dimension {} does not match codebook dimension {}",
            model.dim(),
            codebook.dim()
        )));
    }
    Ok(())
}

/// Bag-of-actions vectors for every student in the corpus, by user id.
pub fn e2vec_features(
    model: &EmbeddingModel,
    codebook: &CodeBook,
    corpus: &ActionCorpus,
    mode: HistogramMode,
) -> Result<Vec<StudentVector>> {
    check_dims(model, codebook)?;
    corpus
        .per_student()
        .into_iter()
        .map(|(user, actions)| {
            let vectors = action_vectors(model, actions);
            let sv = student_vector(codebook, &vectors, user, mode)?;
            if sv.is_empty() {
                log::warn!("student {user} has no actions; emitting a zero vector");
            }
            Ok(sv)
        })
        .collect()
}

pub fn e2vec_matrix(students: &[StudentVector], config_hash: &str) -> FeatureMatrix {
    FeatureMatrix {
        method: crate::config::Method::E2vec,
        config_hash: config_hash.into(),
        rows: students
            .iter()
            .map(|s| FeatureRow {
                user_id: s.user_id.clone(),
                values: s.values.clone(),
                count: s.action_count as u64,
            })
            .collect(),
    }
}

/// Operation Count vectors for every student, by user id.
pub fn oc_matrix(events: &[Event], norm: OcNorm, config_hash: &str) -> FeatureMatrix {
    FeatureMatrix {
        method: crate::config::Method::Oc,
        config_hash: config_hash.into(),
        rows: by_user(events)
            .into_iter()
            .map(|(user, evs)| {
                let v = oc_vector(user, evs, norm);
                FeatureRow {
                    user_id: v.user_id.clone(),
                    values: v.to_vec(),
                    count: v.operation_count,
                }
            })
            .collect(),
    }
}

/// Joins features with grades by user id. Students missing from either side
/// are dropped with a warning.
pub fn labeled_dataset(features: &FeatureMatrix, grades: &[(String, String)]) -> Result<LabeledDataset> {
    let labels = label(grades.iter().map(|(u, g)| (u.as_str(), g.as_str())))?;
    let known: BTreeMap<&str, ()> = features.rows.iter().map(|r| (r.user_id.as_str(), ())).collect();
    for u in labels.keys().filter(|u| !known.contains_key(u.as_str())) {
        log::warn!("graded student {u} has no feature row");
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut ids = Vec::new();
    for r in &features.rows {
        match labels.get(&r.user_id) {
            Some(&l) => {
                x.push(r.values.clone());
                y.push(l);
                ids.push(r.user_id.clone());
            }
            None => log::warn!("student {} has no grade; left out", r.user_id),
        }
    }
    if ids.is_empty() {
        return Err(Error::Schema("no student appears in both the feature and the grade file".into()));
    }
    Ok(LabeledDataset::new(x, y, ids)?)
}
