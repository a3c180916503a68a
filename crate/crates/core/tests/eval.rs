mod common;

use common::oracles;
use diachrony::embed::TrainConfig;
use diachrony::eval::synthetic::{planted_shift_corpus, PlantedShiftConfig};
use diachrony::eval::{
    bootstrap_ci, intersection_at_k, party_drift, quantile, run_stability, track_topics, ChangeDetector, DetectorError,
    EvalError, StabilityConfig, TrackConfig, DEFAULT_K_LIST,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn vocab(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i:04}")).collect()
}

/// Counts shared members by pairwise comparison.
fn brute_intersection(a: &[String], b: &[String], k: usize) -> f64 {
    let shared = a[..k].iter().filter(|x| b[..k].iter().any(|y| y == *x)).count();
    shared as f64 / k as f64
}

#[test]
fn intersection_examples() {
    let v = vocab(30);
    assert_eq!(intersection_at_k(&v, &v, 10).unwrap(), 1.0);
    assert_eq!(intersection_at_k(&v[..10], &v[10..20], 10).unwrap(), 0.0);
    // Seven shared, three different.
    let mut b: Vec<String> = v[..7].to_vec();
    b.extend_from_slice(&v[20..23]);
    b.reverse();
    assert_eq!(brute_intersection(&v, &b, 10), 0.7);
    assert_eq!(intersection_at_k(&v, &b, 10).unwrap(), 0.7);
    assert_eq!(intersection_at_k(&b, &v, 10).unwrap(), 0.7);
}

#[test]
fn intersection_matches_brute_force_on_random_lists() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let v = vocab(60);
    for _ in 0..200 {
        let mut a = v.clone();
        let mut b = v.clone();
        a.shuffle(&mut rng);
        b.shuffle(&mut rng);
        for k in [1, 5, 17, 60] {
            let got = intersection_at_k(&a, &b, k).unwrap();
            assert_eq!(got, brute_intersection(&a, &b, k));
            assert_eq!(got, intersection_at_k(&b, &a, k).unwrap());
            assert!((0.0..=1.0).contains(&got));
        }
    }
}

#[test]
fn intersection_errors() {
    let v = vocab(5);
    assert!(matches!(
        intersection_at_k(&v, &v, 6),
        Err(EvalError::TooShort { len: 5, k: 6 })
    ));
    assert!(matches!(intersection_at_k(&v, &v, 0), Err(EvalError::InvalidK)));
    let dup = vec![v[0].clone(), v[0].clone()];
    assert!(matches!(
        intersection_at_k(&dup, &v, 2),
        Err(EvalError::DuplicateEntry(_))
    ));
}

struct Fixed(Vec<String>);

impl ChangeDetector for Fixed {
    fn label(&self) -> String {
        "fixed".into()
    }
    fn ranking(&self, _seed: u64) -> Result<Vec<String>, DetectorError> {
        Ok(self.0.clone())
    }
}

struct Shuffled(Vec<String>);

impl ChangeDetector for Shuffled {
    fn label(&self) -> String {
        "shuffled".into()
    }
    fn ranking(&self, seed: u64) -> Result<Vec<String>, DetectorError> {
        let mut v = self.0.clone();
        v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Ok(v)
    }
}

struct FailsOn(u64);

impl ChangeDetector for FailsOn {
    fn label(&self) -> String {
        "fails".into()
    }
    fn ranking(&self, seed: u64) -> Result<Vec<String>, DetectorError> {
        if seed == self.0 {
            Err("no vectors".into())
        } else {
            Ok(vocab(20))
        }
    }
}

#[test]
fn fixed_ranking_is_perfectly_stable() {
    let config = StabilityConfig {
        bootstrap_resamples: 1000,
        ..StabilityConfig::default()
    };
    let report = run_stability(&Fixed(vocab(1000)), &config).unwrap();
    assert_eq!(report.seeds, (0..10).collect::<Vec<u64>>());
    assert_eq!(
        report.rows.iter().map(|r| r.k).collect::<Vec<_>>(),
        DEFAULT_K_LIST.to_vec()
    );
    for row in &report.rows {
        assert_eq!(row.pairs, 45);
        assert_eq!((row.mean, row.ci_low, row.ci_high), (1.0, 1.0, 1.0));
    }
    assert_eq!(report.top_lists.len(), 10);
    assert!(report.skipped_k.is_empty());
}

#[test]
fn random_rankings_overlap_by_chance() {
    let config = StabilityConfig {
        bootstrap_resamples: 1000,
        base_seed: 100,
        ..StabilityConfig::default()
    };
    let report = run_stability(&Shuffled(vocab(1000)), &config).unwrap();
    for row in &report.rows {
        assert_eq!(row.pairs, 45);
        // Hypergeometric mean overlap k / |V|.
        let expected = row.k as f64 / 1000.0;
        assert!((row.mean - expected).abs() <= 0.05, "k={} {}", row.k, row.mean);
        assert!(0.0 <= row.ci_low && row.ci_low <= row.ci_high && row.ci_high <= 1.0);
    }
    assert!(report.rows[0].mean <= 0.05);
    assert_eq!(report.rows.last().unwrap().mean, 1.0);
}

#[test]
fn short_rankings_skip_large_k_and_failures_name_the_seed() {
    let config = StabilityConfig {
        n_runs: 4,
        bootstrap_resamples: 100,
        ..StabilityConfig::default()
    };
    let report = run_stability(&Fixed(vocab(150)), &config).unwrap();
    assert_eq!(report.skipped_k, vec![200, 500, 1000]);
    assert!(report.rows.iter().all(|r| r.pairs == 6));
    assert!(report.top_lists.iter().all(|l| l.len() == 100));
    let config = StabilityConfig {
        n_runs: 5,
        base_seed: 10,
        k_list: vec![5],
        bootstrap_resamples: 100,
        level: 0.95,
    };
    assert!(matches!(
        run_stability(&FailsOn(13), &config),
        Err(EvalError::RunFailed { seed: 13, .. })
    ));
    let bad = StabilityConfig {
        n_runs: 1,
        ..config.clone()
    };
    assert!(run_stability(&Fixed(vocab(20)), &bad).is_err());
    let bad = StabilityConfig {
        k_list: vec![10, 5],
        ..config
    };
    assert!(run_stability(&Fixed(vocab(20)), &bad).is_err());
}

#[test]
fn quantile_type_seven() {
    let s = [1.0, 2.0, 3.0, 4.0];
    assert_eq!(quantile(&s, 0.0), 1.0);
    assert_eq!(quantile(&s, 1.0), 4.0);
    assert_eq!(quantile(&s, 0.5), 2.5);
    assert!((quantile(&s, 0.25) - 1.75).abs() < 1e-12);
}

#[test]
fn bootstrap_basics() {
    assert_eq!(bootstrap_ci(&[0.3; 10], 0.95, 500, 1).unwrap(), (0.3, 0.3));
    assert!(matches!(
        bootstrap_ci(&[1.0], 0.95, 500, 1),
        Err(EvalError::TooFewSamples(1))
    ));
    let halves: Vec<f64> = (0..50).map(|i| (i % 2) as f64).collect();
    let (lo, hi) = bootstrap_ci(&halves, 0.95, 2000, 2).unwrap();
    assert!(lo <= 0.5 && 0.5 <= hi);
    assert_eq!(bootstrap_ci(&halves, 0.95, 2000, 2).unwrap(), (lo, hi));
}

#[test]
fn wider_levels_contain_narrower_ones() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for seed in 0..20 {
        let s: Vec<f64> = (0..25).map(|_| oracles::gaussian(&mut rng)).collect();
        let (a, b) = bootstrap_ci(&s, 0.95, 2000, seed).unwrap();
        let (c, d) = bootstrap_ci(&s, 0.99, 2000, seed).unwrap();
        assert!(c <= a && b <= d);
    }
}

#[test]
fn bootstrap_coverage_of_normal_means() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut covered = 0;
    for trial in 0..200 {
        let s: Vec<f64> = (0..30).map(|_| oracles::gaussian(&mut rng)).collect();
        let (lo, hi) = bootstrap_ci(&s, 0.95, 10_000, trial).unwrap();
        covered += usize::from(lo <= 0.0 && 0.0 <= hi);
    }
    let rate = covered as f64 / 200.0;
    assert!((0.92..=0.98).contains(&rate), "{rate}");
}

fn series() -> diachrony::eval::synthetic::PlantedCorpus {
    planted_shift_corpus(&PlantedShiftConfig {
        slices: 4,
        shift_at: 2,
        planted: 1,
        tokens_per_slice: 30_000,
        seed: 5,
        ..PlantedShiftConfig::default()
    })
    .unwrap()
}

fn track_config() -> TrackConfig {
    TrackConfig {
        n_seeds: 6,
        base_seed: 0,
        train: TrainConfig {
            dim: 30,
            ..TrainConfig::compass()
        },
        bootstrap_resamples: 2000,
        level: 0.95,
        neighbors: 5,
    }
}

#[test]
fn planted_topic_drops_in_the_shift_pair() {
    let corpus = series();
    let planted = corpus.planted[0].clone();
    let stable = corpus.stable_words()[3].clone();
    let report = track_topics(&[planted.clone(), stable.clone()], &corpus.slices, &track_config()).unwrap();
    assert_eq!(report.rows.len(), 6);
    assert!(report.absent.is_empty());
    let min = report.minimum(&planted).unwrap();
    assert_eq!(min.pair_index, 1);
    for r in report.rows_for(&planted).filter(|r| r.pair_index != 1) {
        assert!(min.ci_high < r.ci_low, "{min:?} vs {r:?}");
    }
    for r in report.rows_for(&stable) {
        assert!(r.mean >= 0.9, "{r:?}");
        assert_eq!(r.samples, 6);
    }
}

#[test]
fn duplicate_slices_are_self_similar() {
    let corpus = series();
    let slice = corpus.slices[0].1.clone();
    let slices = vec![("a".to_string(), slice.clone()), ("b".to_string(), slice)];
    let topics: Vec<String> = corpus.stable_words().into_iter().step_by(9).collect();
    let report = track_topics(&topics, &slices, &track_config()).unwrap();
    for r in &report.rows {
        assert!(r.mean >= 0.9, "{r:?}");
    }
    let missing = track_topics(&["nowhere".to_string()], &slices, &track_config()).unwrap_err();
    assert!(matches!(missing, EvalError::Absent(ref w) if w == &["nowhere".to_string()]));
}

#[test]
fn party_tags_drift_and_absences() {
    let corpus = series();
    // A steady tag and one whose contexts swap at the shift.
    let steady = corpus.stable_words()[12].clone();
    let moved = corpus.planted[0].clone();
    let mut slices = corpus.slices.clone();
    // The steady tag disappears from the last slice.
    let gone = corpus.stable_words()[20].clone();
    slices[3].1.retain(|t| *t != gone);
    let tags = vec![steady.clone(), moved.clone(), gone.clone()];
    let report = party_drift(&tags, &slices, &track_config()).unwrap();
    assert_eq!(report.minimum(&moved).unwrap().pair_index, 1);
    for r in report.rows_for(&steady) {
        assert!(r.mean >= 0.9, "{r:?}");
    }
    assert_eq!(report.rows_for(&gone).count(), 2);
    assert_eq!(
        report.absent,
        vec![(gone.clone(), slices[2].0.clone(), slices[3].0.clone())]
    );
    let moved_neighbors = report.neighbors.iter().find(|n| n.word == moved).unwrap();
    assert_eq!(moved_neighbors.neighbors_a.len(), 5);
    assert_eq!(
        (moved_neighbors.slice_a.as_str(), moved_neighbors.slice_b.as_str()),
        (slices[1].0.as_str(), slices[2].0.as_str())
    );
    assert_eq!(report.neighbors.len(), 3);
}
