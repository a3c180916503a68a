//! Orthogonal Procrustes alignment of embedding spaces.

use thiserror::Error;

use crate::embed::{EmbeddingModel, MatrixRole};
use crate::linalg::{svd_jacobi, Matrix, SvdOptions};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum AlignError {
    #[error("matrices have shapes {0:?} and {1:?}")]
    ShapeMismatch((usize, usize), (usize, usize)),
    #[error("{rows} rows cannot determine a {dim}-dimensional rotation")]
    TooFewRows { rows: usize, dim: usize },
    #[error("models share no vocabulary")]
    NoSharedVocabulary,
    #[error("only {shared} shared words for {dim} dimensions; train with dim <= {shared} or enlarge the slices")]
    TooFewShared { shared: usize, dim: usize },
    #[error("model dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

#[derive(Debug, Clone)]
pub struct Procrustes<F> {
    pub rotation: Matrix<F>,
    /// `XᵀY` was rank deficient; the rotation is still orthogonal but not
    /// unique.
    pub rank_deficient: bool,
}

/// The orthogonal `R` minimizing `‖X·R − Y‖_F`: `R = U·Vᵀ` for
/// `XᵀY = U·Σ·Vᵀ`.
pub fn orthogonal_procrustes<F: Scalar>(x: &Matrix<F>, y: &Matrix<F>) -> Result<Procrustes<F>, AlignError> {
    if x.rows() != y.rows() || x.cols() != y.cols() {
        return Err(AlignError::ShapeMismatch((x.rows(), x.cols()), (y.rows(), y.cols())));
    }
    if x.rows() < x.cols() {
        return Err(AlignError::TooFewRows {
            rows: x.rows(),
            dim: x.cols(),
        });
    }
    let m = x.t_matmul(y);
    let svd = svd_jacobi(&m, SvdOptions::default());
    if !svd.converged {
        log::warn!("Jacobi SVD stopped after {} sweeps without converging", svd.sweeps);
    }
    Ok(Procrustes {
        rotation: svd.u.matmul(&svd.v.transpose()),
        rank_deficient: svd.rank_deficient,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlignOptions {
    /// Subtract the column mean of the shared rows before solving.
    pub center: bool,
    pub role: MatrixRole,
}

impl Default for AlignOptions {
    fn default() -> Self {
        Self {
            center: false,
            role: MatrixRole::Target,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AlignmentResult<F> {
    pub rotation: Matrix<F>,
    /// In source vocabulary order.
    pub shared_words: Vec<String>,
    /// `‖X·R − Y‖_F` over the normalized shared rows.
    pub residual: F,
    /// `‖X − Y‖_F` over the same rows.
    pub unaligned_residual: F,
    pub rank_deficient: bool,
}

/// Rotates `source` onto `reference`.
///
/// The rotation is solved on the shared words' rows, length-normalized and
/// optionally centered, then applied to every raw row of the source's
/// `options.role` matrix. Centering only affects the solve; no translation
/// is applied to the returned model.
pub fn align_models<F: Scalar>(
    source: &EmbeddingModel<F>,
    reference: &EmbeddingModel<F>,
    options: AlignOptions,
) -> Result<(EmbeddingModel<F>, AlignmentResult<F>), AlignError> {
    if source.dim() != reference.dim() {
        return Err(AlignError::DimensionMismatch(source.dim(), reference.dim()));
    }
    let mut src_rows = Vec::new();
    let mut ref_rows = Vec::new();
    let mut shared_words = Vec::new();
    for (i, w) in source.vocab().words().iter().enumerate() {
        if let Some(j) = reference.vocab().index_of(w) {
            src_rows.push(i);
            ref_rows.push(j);
            shared_words.push(w.clone());
        }
    }
    if shared_words.is_empty() {
        return Err(AlignError::NoSharedVocabulary);
    }
    let dim = source.dim();
    if shared_words.len() < dim {
        return Err(AlignError::TooFewShared {
            shared: shared_words.len(),
            dim,
        });
    }
    let prepare = |m: &Matrix<F>, rows: &[usize]| {
        let mut s = m.select_rows(rows);
        s.normalize_rows();
        if options.center {
            s.center_columns();
        }
        s
    };
    let x = prepare(source.matrix(options.role), &src_rows);
    let y = prepare(reference.matrix(options.role), &ref_rows);
    let Procrustes {
        rotation,
        rank_deficient,
    } = orthogonal_procrustes(&x, &y)?;
    let residual = x.matmul(&rotation).sub(&y).frobenius_norm();
    let unaligned_residual = x.sub(&y).frobenius_norm();
    let rotated = source.matrix(options.role).matmul(&rotation);
    let aligned = source
        .clone()
        .with_matrix(options.role, rotated)
        .expect("rotation keeps the matrix shape");
    Ok((
        aligned,
        AlignmentResult {
            rotation,
            shared_words,
            residual,
            unaligned_residual,
            rank_deficient,
        },
    ))
}
