//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::Instant;

use clap::Parser;
use e2vec::cli::{run, Cli};
use e2vec::codebook_io::save_codebook;
use e2vec::config::PipelineConfig;
use e2vec::corpus::write_actions;
use e2vec::eventstream::{parse_events, ColumnMap};
use e2vec::model_io::{save_model, write_text_vectors};
use e2vec::pipeline;
use e2vec_core::baseline::OcNorm;
use e2vec_core::classify::{evaluate, f1, Family, ModelSpec};
use e2vec_core::codebook::{build_codebook, CodeBook, Fingerprint, KMeansParams};
use e2vec_core::embedding::sgns::pair_gradient;
use e2vec_core::embedding::subword::ngrams;
use e2vec_core::embedding::{nearest_units, train, EmbeddingModel, Hyperparams, Vocab, VocabEntry};
use e2vec_core::event::{partition, Event, Timestamp};
use e2vec_core::math::cosine;
use e2vec_core::synth::{generate, SynthConfig};
use e2vec_core::tokenizer::{op_symbol, tokenize_ops, Action, ActionCorpus, TokenizerConfig};
use e2vec_core::vectorize::action_vector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SAMPLE_LOG: &str = "\
userid,contentsid,operationname,pageno,marker,memo length,devicecode,eventtime
u1,c1,OPEN,1,,0,pc,2022-04-06 13:00:00
u1,c1,NEXT,1,,0,pc,2022-04-06 13:00:10
u1,c1,NEXT,2,,0,pc,2022-04-06 13:00:24
u1,c1,NEXT,3,,0,pc,2022-04-06 13:00:24
u1,c1,PREV,3,,0,pc,2022-04-06 13:01:22
u1,c1,ADD MARKER,2,marked text,0,pc,2022-04-06 13:01:30
u1,c1,NEXT,2,,0,pc,2022-04-06 13:14:21
";

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sample_events() -> Vec<Event> {
    parse_events(SAMPLE_LOG.as_bytes(), &ColumnMap::default()).unwrap().0
}

fn lines(actions: &[Action]) -> Vec<Vec<String>> {
    actions
        .iter()
        .map(|a| a.units.iter().map(|u| u.as_str().to_string()).collect())
        .collect()
}

fn golden_tokenization() -> Outcome {
    let events = sample_events();
    let start = Instant::now();
    let corpus = pipeline::tokenize_events(events, &TokenizerConfig::default());
    let elapsed = start.elapsed();
    let got: Vec<Action> = corpus.actions().cloned().collect();
    let got = lines(&got);
    let expected = vec![vec!["OsNmNNm".to_string(), "PsAl".into()], vec!["N".into()]];
    check(
        got == expected && elapsed.as_secs_f64() < 1e-3,
        format!("{got:?} in {:.1} us", elapsed.as_secs_f64() * 1e6),
    )
}

const OPS: [&str; 9] = [
    "NEXT", "PREV", "OPEN", "ADD MARKER", "CLOSE", "PAGE JUMP", "GET IT", "MEMO", "SEARCH",
];

fn random_partition(r: &mut ChaCha8Rng) -> Vec<(&'static str, i64)> {
    let n = r.random_range(1..=80);
    let mut t = 1_649_203_200i64;
    (0..n)
        .map(|i| {
            if i > 0 {
                t += match r.random_range(0..13) {
                    0..=3 => 0,
                    4..=7 => r.random_range(1..=10),
                    8..=10 => r.random_range(11..=300),
                    11 => r.random_range(301..=5000),
                    _ => [1, 10, 11, 60, 61, 300, 301][r.random_range(0..7)],
                };
            }
            (OPS[r.random_range(0..OPS.len())], t)
        })
        .collect()
}

fn partition_violation(ops: &[(&str, i64)], actions: &[Action]) -> Option<String> {
    let mut syms = String::new();
    for a in actions {
        for u in &a.units {
            let s = u.as_str();
            if s.chars().count() > 15 {
                return Some(format!("unit {s} longer than 15"));
            }
            if s.starts_with(['s', 'm', 'l']) {
                return Some(format!("unit {s} starts with an interval"));
            }
            let mut prev = false;
            for c in s.chars() {
                let interval = matches!(c, 's' | 'm' | 'l');
                if interval && prev {
                    return Some(format!("adjacent intervals in {s}"));
                }
                prev = interval;
                if !interval && c != '_' {
                    syms.push(c);
                }
            }
        }
    }
    let expected: String = ops.iter().map(|(o, _)| op_symbol(o).symbol()).collect();
    if syms != expected {
        return Some(format!("operations {syms} do not reconstruct {expected}"));
    }
    // Each action must cover a run of operations whose internal gaps are
    // all <= 300 s and which is followed by a gap > 300 s.
    let mut i = 0;
    for a in actions {
        let n: usize = a.units.iter().map(|u| u.primitives().filter(|p| !p.is_interval()).count()).sum();
        let last = i + n - 1;
        if (i..last).any(|j| ops[j + 1].1 - ops[j].1 > 300) {
            return Some("long gap inside an action".into());
        }
        if last + 1 < ops.len() && ops[last + 1].1 - ops[last].1 <= 300 {
            return Some("action split without a long gap".into());
        }
        i = last + 1;
    }
    None
}

fn tokenizer_properties() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(7);
    let start = Instant::now();
    let cfg = TokenizerConfig::default();
    let mut events = 0;
    for case in 0..10_000 {
        let ops = random_partition(&mut r);
        events += ops.len();
        let actions = tokenize_ops(ops.iter().map(|&(o, t)| (o, Timestamp(t))), &cfg);
        if let Some(v) = partition_violation(&ops, &actions) {
            return Err(format!("partition {case}: {v}"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 30.0, format!("10000 partitions, {events} events, {secs:.2} s"))
}

fn loss_oracle(hidden: &[f64], outputs: &[Vec<f64>], labels: &[bool]) -> f64 {
    let mut l = 0.0;
    for (o, &y) in outputs.iter().zip(labels) {
        let s: f64 = o.iter().zip(hidden).map(|(a, b)| a * b).sum();
        let p = 1.0 / (1.0 + (-s).exp());
        l -= if y { p.ln() } else { (1.0 - p).ln() };
    }
    l
}

fn rel_error(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt() + b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale < 1e-12 {
        diff
    } else {
        diff / scale
    }
}

fn gradient_check() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let start = Instant::now();
    let eps = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let dim = r.random_range(1..=8);
        let negatives = r.random_range(0..=5);
        let hidden: Vec<f64> = (0..dim).map(|_| r.random_range(-1.0..1.0)).collect();
        let outputs: Vec<Vec<f64>> = (0..=negatives)
            .map(|_| (0..dim).map(|_| r.random_range(-1.0..1.0)).collect())
            .collect();
        let mut labels = vec![true];
        labels.extend(std::iter::repeat_n(false, negatives));
        let flat = outputs.concat();
        let mut gh = vec![0.0; dim];
        let mut go = vec![0.0; flat.len()];
        pair_gradient(&hidden, &flat, &labels, &mut gh, &mut go);

        let mut num_h = vec![0.0; dim];
        for j in 0..dim {
            let (mut p, mut m) = (hidden.clone(), hidden.clone());
            p[j] += eps;
            m[j] -= eps;
            num_h[j] = (loss_oracle(&p, &outputs, &labels) - loss_oracle(&m, &outputs, &labels)) / (2.0 * eps);
        }
        let mut num_o = vec![0.0; flat.len()];
        for i in 0..flat.len() {
            let (mut p, mut m) = (outputs.clone(), outputs.clone());
            p[i / dim][i % dim] += eps;
            m[i / dim][i % dim] -= eps;
            num_o[i] = (loss_oracle(&hidden, &p, &labels) - loss_oracle(&hidden, &m, &labels)) / (2.0 * eps);
        }
        worst = worst.max(rel_error(&gh, &num_h)).max(rel_error(&go, &num_o));
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst < 1e-5 && secs < 10.0, format!("worst relative error {worst:.2e}, {secs:.2} s"))
}

/// Marker-wrapped character 3-grams. Two strings share some n-gram of
/// length >= 3 exactly when they share one of length 3.
fn grams(s: &str) -> BTreeSet<String> {
    ngrams(s, 3, 3).into_iter().collect()
}

struct Trained {
    model: EmbeddingModel,
    units: Vec<String>,
    most_frequent: String,
    seconds: f64,
}

fn train_full_preset() -> Trained {
    let start = Instant::now();
    let course = generate(&SynthConfig::full(), 60, 42).unwrap();
    let corpus = ActionCorpus::from_partitions(&partition(course.events), &TokenizerConfig::default());
    let actions: Vec<Action> = corpus.actions().cloned().collect();
    let model = train(&actions, Hyperparams::default()).unwrap();
    let units: Vec<String> = model.vocab().entries().iter().map(|e| e.text.clone()).collect();
    let most_frequent = units[0].clone();
    Trained {
        model,
        units,
        most_frequent,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn subword_coherence(t: &Trained) -> Outcome {
    let cands: Vec<&str> = t.units.iter().map(String::as_str).collect();
    let nn = nearest_units(&t.model, &t.most_frequent, &cands, 5).map_err(|e| e.to_string())?;
    let qg = grams(&t.most_frequent);
    let all_share = nn.len() == 5 && nn.iter().all(|(u, _)| !grams(u).is_disjoint(&qg));

    let vecs: Vec<Vec<f64>> = cands.iter().map(|c| t.model.unit_vector(c).values).collect();
    let gs: Vec<BTreeSet<String>> = cands.iter().map(|c| grams(c)).collect();
    let cs: Vec<BTreeSet<char>> = cands.iter().map(|c| c.chars().collect()).collect();
    let (mut share, mut n_share, mut disjoint, mut n_disjoint) = (0.0, 0usize, 0.0, 0usize);
    for i in 0..cands.len() {
        for j in i + 1..cands.len() {
            let Some(c) = cosine(&vecs[i], &vecs[j]) else { continue };
            if !gs[i].is_disjoint(&gs[j]) {
                share += c;
                n_share += 1;
            }
            if cs[i].is_disjoint(&cs[j]) {
                disjoint += c;
                n_disjoint += 1;
            }
        }
    }
    if n_share == 0 || n_disjoint == 0 {
        return Err(format!("{n_share} sharing and {n_disjoint} disjoint pairs"));
    }
    let (share, disjoint) = (share / n_share as f64, disjoint / n_disjoint as f64);
    let names: Vec<&str> = nn.iter().map(|(u, _)| u.as_str()).collect();
    check(
        all_share && share - disjoint >= 0.1 && t.seconds < 300.0,
        format!(
            "query {} neighbours {names:?}; sharing pairs {share:.3} vs disjoint {disjoint:.3} (gap {:.3}); trained in {:.1} s",
            t.most_frequent,
            share - disjoint,
            t.seconds
        ),
    )
}

fn oov_embedding(t: &Trained) -> Outcome {
    let oov = "NsNsNsPsNsAsNsNsJ";
    if t.model.vocab().id(oov).is_some() {
        return Err(format!("{oov} is in the vocabulary"));
    }
    let v = t.model.unit_vector(oov);
    let nonzero = !v.degenerate && v.values.iter().any(|&x| x != 0.0);
    let cands: Vec<&str> = t.units.iter().map(String::as_str).collect();
    let nn = nearest_units(&t.model, oov, &cands, 5).map_err(|e| e.to_string())?;
    let og = grams(oov);
    let share = nn.iter().all(|(u, _)| !grams(u).is_disjoint(&og));
    let names: Vec<&str> = nn.iter().map(|(u, _)| u.as_str()).collect();
    check(nonzero && share, format!("{oov}: nonzero={nonzero}, neighbours {names:?}"))
}

fn action_vector_oracle(t: &Trained) -> Outcome {
    let mut text = Vec::new();
    write_text_vectors(&mut text, &t.model).map_err(|e| e.to_string())?;
    let text = String::from_utf8(text).unwrap();
    let mut rows = text.lines();
    let header: Vec<usize> = rows.next().unwrap().split(' ').map(|x| x.parse().unwrap()).collect();
    let exported: BTreeMap<&str, Vec<f64>> = rows
        .map(|l| {
            let mut f = l.split(' ');
            let unit = f.next().unwrap();
            (unit, f.map(|x| x.parse().unwrap()).collect())
        })
        .collect();
    if exported.len() != header[0] {
        return Err("export row count disagrees with its header".into());
    }
    let units: Vec<&str> = exported.keys().copied().collect();
    let mut r = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = r.random_range(1..=8);
        let picked: Vec<&str> = (0..n).map(|_| units[r.random_range(0..units.len())]).collect();
        let action = Action::parse(&picked.join(" ")).unwrap();
        let got = action_vector(&t.model, &action).map_err(|e| e.to_string())?;
        let mut mean = vec![0.0; header[1]];
        for u in &picked {
            let v = &exported[u];
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            mean.iter_mut().zip(v).for_each(|(m, x)| *m += x / norm);
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        for (a, b) in got.values.iter().zip(&mean) {
            worst = worst.max((a - b).abs());
        }
    }
    check(worst <= 1e-12, format!("1000 actions, max abs difference {worst:.2e}"))
}

fn brute_force(points: &[Vec<f64>], k: usize) -> f64 {
    let dim = points[0].len();
    let unit: Vec<Vec<f64>> = points
        .iter()
        .map(|v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter().map(|x| x / n).collect()
        })
        .collect();
    let mut best = f64::INFINITY;
    for code in 0..k.pow(points.len() as u32) {
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0.0; k];
        let mut c = code;
        for p in &unit {
            let l = c % k;
            c /= k;
            counts[l] += 1.0;
            sums[l].iter_mut().zip(p).for_each(|(s, x)| *s += x);
        }
        let cost: f64 = (0..k).map(|l| counts[l] - sums[l].iter().map(|s| s * s).sum::<f64>().sqrt()).sum();
        best = best.min(cost);
    }
    best
}

fn kmeans_oracle() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let mut monotone = true;
    for _ in 0..20 {
        let dim = r.random_range(2..=4);
        let k = r.random_range(1..=3);
        let n = r.random_range(k..=10);
        let points: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
        let c = build_codebook(&points, &KMeansParams::new(k, 42)).map_err(|e| e.to_string())?;
        worst = worst.max((c.objective - brute_force(&points, k)).abs());
        monotone &= c.history.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    }
    check(
        worst < 1e-9 && monotone,
        format!("20 instances, max gap to optimum {worst:.2e}, monotone={monotone}"),
    )
}

fn cli(args: &[&str], out: &mut Vec<u8>) -> e2vec::Result<()> {
    let cli = Cli::try_parse_from(std::iter::once("e2vec").chain(args.iter().copied())).expect("valid arguments");
    run(cli, out)
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn cluster_report() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    // Every unit vector is its own word row: no n-gram fits in 20 chars.
    let hyper = Hyperparams {
        dim: 4,
        ngram_min: 20,
        ngram_max: 20,
        bucket_count: 1,
        ..Hyperparams::default()
    };
    let axis = |u: &str| match u.chars().next() {
        Some('N') => 0,
        Some('P') => 1,
        _ => 2,
    };
    let words = ["N", "Nm", "Ns", "Nl", "P", "Pm", "A", "Am", "As", "Al"];
    let vocab = Vocab::from_entries(words.iter().map(|w| VocabEntry { text: w.to_string(), count: 1 }).collect());
    let mut input = vec![0.0f32; words.len() * 4];
    for (i, w) in words.iter().enumerate() {
        input[i * 4 + axis(w)] = 1.0 + i as f32 / 10.0;
    }
    let model = EmbeddingModel::from_parts(hyper, vocab, (0..words.len() as u64).collect(), input, vec![0.0; words.len() * 4])
        .unwrap();
    let fp = Fingerprint { corpus_hash: 0, seed: 0, iterations: 0 };
    let mut centroids = vec![0.0; 16];
    for i in 0..4 {
        centroids[i * 5] = 1.0;
    }
    let cb = CodeBook::from_parts(4, centroids, fp).unwrap();
    // Cluster 0 lengths 1,2,3,4; cluster 1 lengths 2,2,6,6; cluster 2
    // lengths 1,1,1,1; cluster 3 is empty.
    let fixture = [
        "N", "N Nm", "Nm Ns Nl", "N Nm Ns Nl",
        "P Pm", "Pm P", "P P P P P P", "Pm Pm Pm Pm Pm Pm",
        "A", "Am", "As", "Al",
    ];
    let actions: Vec<Action> = fixture.iter().map(|s| Action::parse(s).unwrap()).collect();
    let (m, c, k) = (path(dir.path(), "m.bin"), path(dir.path(), "c.txt"), path(dir.path(), "cb.bin"));
    save_model(Path::new(&m), &model, "0").unwrap();
    save_codebook(Path::new(&k), &cb, "0").unwrap();
    write_actions(std::fs::File::create(&c).unwrap(), &actions, "0").unwrap();
    let mut out = Vec::new();
    cli(&["analyze", "clusters", "--model", &m, "--codebook", &k, "--corpus", &c], &mut out).map_err(|e| e.to_string())?;
    let got = String::from_utf8(out).unwrap();
    let expected = "cluster,max,mean,variance,count\n3,0,0,0,0\n2,1,1,0,4\n0,4,2.5,1.25,4\n1,6,4,4,4\n";
    check(got == expected, format!("{:?}", got.trim_end().replace('\n', " | ")))
}

fn end_to_end_prediction() -> Outcome {
    let course = generate(&SynthConfig::small(), 120, 42).map_err(|e| e.to_string())?;
    let train_users: BTreeSet<&str> = course.grades[..60].iter().map(|g| g.0.as_str()).collect();
    let (train_ev, test_ev): (Vec<Event>, Vec<Event>) =
        course.events.iter().cloned().partition(|e| train_users.contains(e.user_id.as_str()));
    let grades: Vec<(String, String)> = course.grades.iter().map(|(u, g)| (u.clone(), g.letter().to_string())).collect();
    let cfg = PipelineConfig::default();
    let train_corpus = pipeline::tokenize_events(train_ev, &cfg.tokenizer());
    let test_corpus = pipeline::tokenize_events(test_ev, &cfg.tokenizer());
    let actions: Vec<Action> = train_corpus.actions().cloned().collect();
    let model = pipeline::train(&actions, cfg.hyperparams(), 1).map_err(|e| e.to_string())?;
    let distinct = pipeline::clustering_actions(&train_corpus, true);
    let (_, clustering) = pipeline::build(&model, &distinct, &KMeansParams::new(10, 42)).map_err(|e| e.to_string())?;
    let dataset = |corpus: &ActionCorpus| {
        let students = pipeline::e2vec_features(&model, &clustering.codebook, corpus, cfg.histogram_mode()).unwrap();
        pipeline::labeled_dataset(&pipeline::e2vec_matrix(&students, "0"), &grades).unwrap()
    };
    let (train_set, test_set) = (dataset(&train_corpus), dataset(&test_corpus));
    let r = evaluate(&ModelSpec::with_default_grid(Family::RandomForest), &train_set, &test_set, 3)
        .map_err(|e| e.to_string())?;
    let baseline = f1(&vec![true; test_set.len()], &test_set.labels).f1;
    let got = r.tuned.scores.f1;
    check(
        got >= baseline + 0.05,
        format!(
            "{} train / {} test students; random forest F1 {got:.3} ({}) vs always-at-risk {baseline:.3}",
            train_set.len(),
            test_set.len(),
            r.tuned.params
        ),
    )
}

fn full_run(dir: &Path) -> e2vec::Result<BTreeMap<String, Vec<u8>>> {
    let p = |n: &str| path(dir, n);
    let mut sink = Vec::new();
    let steps: Vec<Vec<String>> = vec![
        vec!["synth".into(), "--events".into(), p("a.csv"), "--grades".into(), p("a_grades.csv"), "--students".into(), "40".into(), "--seed".into(), "1".into()],
        vec!["synth".into(), "--events".into(), p("b.csv"), "--grades".into(), p("b_grades.csv"), "--students".into(), "40".into(), "--seed".into(), "2".into()],
        vec!["tokenize".into(), "--events".into(), p("a.csv"), "--out".into(), p("a.corpus")],
        vec!["tokenize".into(), "--events".into(), p("b.csv"), "--out".into(), p("b.corpus")],
        vec!["train".into(), "--corpus".into(), p("a.corpus"), "--out".into(), p("model.bin"), "--export-text".into(), p("model.vec")],
        vec!["codebook".into(), "--model".into(), p("model.bin"), "--corpus".into(), p("a.corpus"), "--out".into(), p("codebook.bin"), "--export-text".into(), p("codebook.txt")],
        vec!["featurize".into(), "--events".into(), p("a.csv"), "--model".into(), p("model.bin"), "--codebook".into(), p("codebook.bin"), "--out".into(), p("a_e2vec.csv")],
        vec!["featurize".into(), "--events".into(), p("b.csv"), "--model".into(), p("model.bin"), "--codebook".into(), p("codebook.bin"), "--out".into(), p("b_e2vec.csv")],
        vec!["featurize".into(), "--method".into(), "oc".into(), "--events".into(), p("a.csv"), "--out".into(), p("a_oc.csv")],
        vec!["featurize".into(), "--method".into(), "oc".into(), "--events".into(), p("b.csv"), "--out".into(), p("b_oc.csv")],
        vec!["predict".into(), "--train-features".into(), p("a_e2vec.csv"), "--train-grades".into(), p("a_grades.csv"), "--test-features".into(), p("b_e2vec.csv"), "--test-grades".into(), p("b_grades.csv"), "--out".into(), p("report_e2vec.json")],
        vec!["predict".into(), "--family".into(), "knn".into(), "--train-features".into(), p("a_oc.csv"), "--train-grades".into(), p("a_grades.csv"), "--test-features".into(), p("b_oc.csv"), "--test-grades".into(), p("b_grades.csv"), "--out".into(), p("report_oc.json")],
    ];
    for s in &steps {
        let args: Vec<&str> = s.iter().map(String::as_str).collect();
        cli(&args, &mut sink)?;
    }
    let mut files = BTreeMap::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let e = e.unwrap();
        files.insert(e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap());
    }
    Ok(files)
}

fn determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = full_run(a.path()).map_err(|e| e.to_string())?;
    let second = full_run(b.path()).map_err(|e| e.to_string())?;
    let names: Vec<&String> = first.keys().collect();
    let differing: Vec<&String> = first.iter().filter(|(k, v)| second.get(*k) != Some(v)).map(|(k, _)| k).collect();
    check(
        differing.is_empty() && first.len() == second.len() && first.len() >= 18,
        format!("{} files compared {names:?}; differing {differing:?}", first.len()),
    )
}

fn oc_baseline() -> Outcome {
    let m = pipeline::oc_matrix(&sample_events(), OcNorm::L2, "0");
    let got = &m.rows[0].values;
    // Four NEXT, one PREV, one OPEN, one ADD MARKER.
    let r = 19f64.sqrt();
    let expected = [4.0 / r, 1.0 / r, 1.0 / r, 1.0 / r, 0.0, 0.0, 0.0];
    let worst = got.iter().zip(expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    check(
        m.rows.len() == 1 && got.len() == 7 && worst <= 1e-12,
        format!("{got:?}, max abs difference {worst:.2e}"),
    )
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (1, "golden tokenization", golden_tokenization()),
        (2, "tokenizer properties", tokenizer_properties()),
        (3, "embedding gradient check", gradient_check()),
    ];
    let trained = train_full_preset();
    results.push((4, "subword coherence", subword_coherence(&trained)));
    results.push((5, "out-of-vocabulary embedding", oov_embedding(&trained)));
    results.push((6, "action vector oracle", action_vector_oracle(&trained)));
    results.push((7, "spherical k-means oracle", kmeans_oracle()));
    results.push((8, "cluster report", cluster_report()));
    results.push((9, "end-to-end prediction", end_to_end_prediction()));
    results.push((10, "determinism", determinism()));
    results.push((11, "operation count baseline", oc_baseline()));

    let mut failed = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {n:>2} {name}: PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2} {name}: FAIL ({detail})");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        results.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
