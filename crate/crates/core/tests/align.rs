mod common;

use common::oracles;
use diachrony::align::{align_models, orthogonal_procrustes, AlignError, AlignOptions};
use diachrony::embed::{cosine_similarity, EmbeddingModel, MatrixRole, Vocabulary};
use diachrony::linalg::Matrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix<f64> {
    Matrix::from_fn(rows, cols, |_, _| oracles::gaussian(rng))
}

fn model(words: &[String], target: Matrix<f64>, id: &str) -> EmbeddingModel<f64> {
    let vocab = Vocabulary::from_ordered(
        words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), 1000 - i as u64))
            .collect(),
    )
    .unwrap();
    EmbeddingModel::new(vocab, target.clone(), target, id.to_string(), 0).unwrap()
}

fn words(n: usize, prefix: &str) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i:03}")).collect()
}

#[test]
fn recovers_a_planted_rotation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = gaussian_matrix(1000, 50, &mut rng);
    let q = oracles::random_orthogonal(50, &mut rng);
    assert!(q.orthogonality_defect() < 1e-12);
    let y = x.matmul(&q);
    let r = orthogonal_procrustes(&x, &y).unwrap();
    assert!(!r.rank_deficient);
    assert!(r.rotation.max_abs_diff(&q) <= 1e-4, "{}", r.rotation.max_abs_diff(&q));
    assert!(r.rotation.orthogonality_defect() <= 1e-6);
    let oracle = oracles::procrustes(&x, &y);
    assert!(r.rotation.max_abs_diff(&oracle) <= 1e-8);
}

#[test]
fn noisy_targets_match_the_svd_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (n, d) in [(40, 5), (300, 20), (64, 64)] {
        let x = gaussian_matrix(n, d, &mut rng);
        let y = gaussian_matrix(n, d, &mut rng);
        let r = orthogonal_procrustes(&x, &y).unwrap().rotation;
        assert!(r.orthogonality_defect() <= 1e-6);
        assert!(r.max_abs_diff(&oracles::procrustes(&x, &y)) <= 1e-6);
    }
}

#[test]
fn identical_inputs_give_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = gaussian_matrix(100, 12, &mut rng);
    let r = orthogonal_procrustes(&x, &x).unwrap().rotation;
    assert!(r.max_abs_diff(&Matrix::identity(12)) <= 1e-6);
}

#[test]
fn beats_random_rotations() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = gaussian_matrix(200, 10, &mut rng);
    let y = gaussian_matrix(200, 10, &mut rng);
    let r = orthogonal_procrustes(&x, &y).unwrap().rotation;
    let best = x.matmul(&r).sub(&y).frobenius_norm();
    for _ in 0..100 {
        let q = oracles::random_orthogonal(10, &mut rng);
        assert!(best <= x.matmul(&q).sub(&y).frobenius_norm());
    }
}

#[test]
fn rank_deficient_input_still_orthogonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let base = gaussian_matrix(50, 3, &mut rng);
    // Rank-3 data in 6 dimensions.
    let x = Matrix::from_fn(50, 6, |i, j| base.row(i)[j % 3]);
    let p = orthogonal_procrustes(&x, &x).unwrap();
    assert!(p.rank_deficient);
    assert!(p.rotation.orthogonality_defect() <= 1e-6);
}

#[test]
fn shape_errors() {
    let a = Matrix::<f64>::zeros(10, 3);
    assert!(matches!(
        orthogonal_procrustes(&a, &Matrix::zeros(9, 3)),
        Err(AlignError::ShapeMismatch(..))
    ));
    assert!(matches!(
        orthogonal_procrustes(&Matrix::<f64>::zeros(2, 3), &Matrix::zeros(2, 3)),
        Err(AlignError::TooFewRows { rows: 2, dim: 3 })
    ));
}

#[test]
fn aligning_a_rotated_copy_restores_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let w = words(120, "w");
    let t = gaussian_matrix(120, 16, &mut rng);
    let q = oracles::random_orthogonal(16, &mut rng);
    let reference = model(&w, t.clone(), "b");
    let source = model(&w, t.matmul(&q), "a");
    for center in [false, true] {
        let options = AlignOptions {
            center,
            role: MatrixRole::Target,
        };
        let (aligned, result) = align_models(&source, &reference, options).unwrap();
        assert_eq!(result.shared_words.len(), 120);
        assert!(result.rotation.orthogonality_defect() <= 1e-6);
        assert!(result.residual <= result.unaligned_residual);
        for word in &w {
            let c = cosine_similarity(
                aligned.vector(word, MatrixRole::Target).unwrap(),
                reference.vector(word, MatrixRole::Target).unwrap(),
            )
            .unwrap();
            assert!(c >= 0.999, "{word}: {c}");
        }
        // The reference is untouched and only the aligned role is rotated.
        assert_eq!(reference.target().as_slice(), t.as_slice());
        assert_eq!(aligned.context().as_slice(), source.context().as_slice());
    }
    let (same, _) = align_models(&reference, &reference, AlignOptions::default()).unwrap();
    assert!(same.target().max_abs_diff(reference.target()) <= 1e-6);
}

#[test]
fn alignment_keeps_intra_model_cosines() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let w = words(80, "w");
    let a = model(&w, gaussian_matrix(80, 10, &mut rng), "a");
    let b = model(&w, gaussian_matrix(80, 10, &mut rng), "b");
    let (aligned, result) = align_models(&a, &b, AlignOptions::default()).unwrap();
    assert!(result.residual <= result.unaligned_residual);
    for i in (0..80).step_by(7) {
        for j in (0..80).step_by(5) {
            let before = oracles::cosine(a.target().row(i), a.target().row(j));
            let after = oracles::cosine(aligned.target().row(i), aligned.target().row(j));
            assert!((before - after).abs() <= 1e-6);
        }
    }
}

#[test]
fn partial_overlap_uses_shared_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut wa = words(60, "w");
    let mut wb = words(60, "w");
    wa.extend(words(5, "only_a"));
    wb.extend(words(7, "only_b"));
    let a = model(&wa, gaussian_matrix(65, 8, &mut rng), "a");
    let b = model(&wb, gaussian_matrix(67, 8, &mut rng), "b");
    let (aligned, result) = align_models(&a, &b, AlignOptions::default()).unwrap();
    assert_eq!(result.shared_words, words(60, "w"));
    assert_eq!(aligned.len(), 65);
}

#[test]
fn alignment_errors() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a = model(&words(20, "a"), gaussian_matrix(20, 4, &mut rng), "a");
    let b = model(&words(20, "b"), gaussian_matrix(20, 4, &mut rng), "b");
    assert!(matches!(
        align_models(&a, &b, AlignOptions::default()),
        Err(AlignError::NoSharedVocabulary)
    ));
    let c = model(&words(3, "a"), gaussian_matrix(3, 4, &mut rng), "c");
    let err = align_models(&a, &c, AlignOptions::default()).unwrap_err();
    assert_eq!(err, AlignError::TooFewShared { shared: 3, dim: 4 });
    assert!(err.to_string().contains("dim <= 3"));
    let d = model(&words(20, "a"), gaussian_matrix(20, 5, &mut rng), "d");
    assert!(matches!(
        align_models(&a, &d, AlignOptions::default()),
        Err(AlignError::DimensionMismatch(4, 5))
    ));
}
