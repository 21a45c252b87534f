use e2vec_core::codebook::{build_codebook, cluster_stats, CodeBook, Fingerprint, KMeansParams};
use e2vec_core::tokenizer::Action;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

/// Smallest spherical k-means objective over every assignment of the
/// points to `k` labels. For a fixed partition the best centroid of a
/// cluster is its normalized sum, which costs |C| - |sum C|.
fn brute_force(points: &[Vec<f64>], k: usize) -> f64 {
    let n = points.len();
    let dim = points[0].len();
    let p: Vec<Vec<f64>> = points.iter().map(|v| unit(v)).collect();
    let mut labels = vec![0usize; n];
    let mut best = f64::INFINITY;
    loop {
        let mut total = 0.0;
        for c in 0..k {
            let mut sum = vec![0.0; dim];
            let mut count = 0.0;
            for (x, &l) in p.iter().zip(&labels) {
                if l == c {
                    count += 1.0;
                    sum.iter_mut().zip(x).for_each(|(s, v)| *s += v);
                }
            }
            total += count - sum.iter().map(|s| s * s).sum::<f64>().sqrt();
        }
        best = best.min(total);
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            labels[i] += 1;
            if labels[i] < k {
                break;
            }
            labels[i] = 0;
            i += 1;
        }
    }
}

fn instance() -> impl Strategy<Value = (Vec<Vec<f64>>, usize)> {
    (2usize..=4, 1usize..=3).prop_flat_map(|(dim, k)| {
        let point = prop::collection::vec(-1.0f64..1.0, dim)
            .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3);
        (prop::collection::vec(point, k..=10), Just(k))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn single_run_history_never_rises((points, k) in instance(), seed in 0u64..1000) {
        let params = KMeansParams { restarts: 1, ..KMeansParams::new(k, seed) };
        let c = build_codebook(&points, &params).unwrap();
        prop_assert!(c.history.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{:?}", c.history);
        prop_assert!(c.objective >= brute_force(&points, k) - 1e-9);
        for i in 0..k {
            let n: f64 = c.codebook.centroid(i).iter().map(|x| x * x).sum();
            prop_assert!((n - 1.0).abs() < 1e-9);
        }
    }
}

/// Random instances with n <= 10 and k <= 3 drawn from a fixed stream.
fn small_instances(count: usize) -> Vec<(Vec<Vec<f64>>, usize, u64)> {
    let mut r = ChaCha8Rng::seed_from_u64(2024);
    (0..count)
        .map(|_| {
            let dim = r.random_range(2..=4);
            let k = r.random_range(1..=3);
            let n = r.random_range(k..=10);
            let pts = (0..n)
                .map(|_| (0..dim).map(|_| r.random_range(-1.0..1.0)).collect())
                .collect();
            (pts, k, r.random())
        })
        .collect()
}

#[test]
fn restarts_reach_the_exhaustive_optimum() {
    for (i, (points, k, seed)) in small_instances(200).into_iter().enumerate() {
        let c = build_codebook(&points, &KMeansParams::new(k, seed)).unwrap();
        let opt = brute_force(&points, k);
        assert!((c.objective - opt).abs() < 1e-9, "instance {i}: got {} optimum {opt}", c.objective);
        assert!(c.history.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{:?}", c.history);
    }
}

#[test]
fn eight_points_two_clusters() {
    let mut r = ChaCha8Rng::seed_from_u64(8);
    let pts: Vec<Vec<f64>> = (0..8).map(|_| (0..3).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
    let c = build_codebook(&pts, &KMeansParams::new(2, 42)).unwrap();
    assert!((c.objective - brute_force(&pts, 2)).abs() < 1e-9);
}

#[test]
fn seeded_runs_are_identical() {
    let pts: Vec<Vec<f64>> = (0..30).map(|i| vec![(i as f64).sin(), (i as f64 * 0.7).cos(), 0.3]).collect();
    let a = build_codebook(&pts, &KMeansParams::new(4, 9)).unwrap();
    let b = build_codebook(&pts, &KMeansParams::new(4, 9)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn too_few_points_and_zero_vectors_are_rejected() {
    assert!(build_codebook(&[vec![1.0, 0.0]], &KMeansParams::new(2, 0)).is_err());
    assert!(build_codebook(&[vec![1.0, 0.0], vec![0.0, 0.0]], &KMeansParams::new(1, 0)).is_err());
    assert!(build_codebook(&[vec![1.0, 0.0]], &KMeansParams::new(0, 0)).is_err());
}

#[test]
fn assignment_prefers_lower_index_on_ties() {
    let fp = Fingerprint { corpus_hash: 0, seed: 0, iterations: 0 };
    let cb = CodeBook::from_parts(2, vec![1.0, 0.0, 0.0, 1.0], fp).unwrap();
    assert_eq!(cb.assign(&[1.0, 1.0]).unwrap(), 0);
    assert_eq!(cb.assign(&[0.1, 1.0]).unwrap(), 1);
    assert!(cb.assign(&[0.0, 0.0]).is_err());
    assert!(cb.assign(&[1.0]).is_err());
}

#[test]
fn length_statistics_by_hand() {
    let acts: Vec<Action> = ["N", "N Nm", "N Nm Pm Am", "Pm", "Am Am Am"]
        .iter()
        .map(|s| Action::parse(s).unwrap())
        .collect();
    let stats = cluster_stats(&acts, &[0, 0, 0, 2, 2], 4).unwrap();
    let rows: Vec<(usize, usize, f64, f64, usize)> =
        stats.rows.iter().map(|r| (r.cluster, r.max, r.mean, r.variance, r.count)).collect();
    // Cluster 0 lengths 1, 2, 4: mean 7/3, population variance 14/9.
    assert_eq!(rows[0], (1, 0, 0.0, 0.0, 0));
    assert_eq!(rows[1], (3, 0, 0.0, 0.0, 0));
    assert_eq!(rows[2], (2, 3, 2.0, 1.0, 2));
    assert_eq!(rows[3].0, 0);
    assert_eq!(rows[3].1, 4);
    assert!((rows[3].2 - 7.0 / 3.0).abs() < 1e-12);
    assert!((rows[3].3 - 14.0 / 9.0).abs() < 1e-12);
    assert!(cluster_stats(&acts, &[0, 0, 0, 2, 9], 4).is_err());
}
