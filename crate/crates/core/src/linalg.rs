//! Dense row-major matrices and a one-sided Jacobi SVD.

use std::fmt;

use crate::scalar::{dot, norm, Scalar};

#[derive(Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix({}x{})", self.rows, self.cols)
    }
}

impl<F: Scalar> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must be rows * cols");
        Self { rows, cols, data }
    }

    pub fn from_rows<R: AsRef<[F]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[F] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [F] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<F> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [F] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[F]> {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    /// New matrix made of the given rows, in order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix<F>) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let a = self.row(i);
            let o = out.row_mut(i);
            for (k, &aik) in a.iter().enumerate() {
                if aik == F::zero() {
                    continue;
                }
                for (oj, &bkj) in o.iter_mut().zip(other.row(k)) {
                    *oj += aik * bkj;
                }
            }
        }
        out
    }

    /// `selfᵀ · other` without materializing the transpose.
    pub fn t_matmul(&self, other: &Matrix<F>) -> Self {
        assert_eq!(self.rows, other.rows, "row counts differ");
        let mut out = Self::zeros(self.cols, other.cols);
        for r in 0..self.rows {
            let a = self.row(r);
            let b = other.row(r);
            for (i, &ai) in a.iter().enumerate() {
                if ai == F::zero() {
                    continue;
                }
                for (oj, &bj) in out.row_mut(i).iter_mut().zip(b) {
                    *oj += ai * bj;
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Matrix<F>) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> F {
        norm(&self.data)
    }

    pub fn max_abs_diff(&self, other: &Matrix<F>) -> F {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(F::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// `max |MᵀM − I|` elementwise.
    pub fn orthogonality_defect(&self) -> F {
        let gram = self.t_matmul(self);
        gram.max_abs_diff(&Matrix::identity(self.cols))
    }

    /// Scales each non-zero row to unit length.
    pub fn normalize_rows(&mut self) {
        let cols = self.cols;
        for row in self.data.chunks_exact_mut(cols.max(1)) {
            let n = norm(row);
            if n > F::zero() {
                row.iter_mut().for_each(|x| *x /= n);
            }
        }
    }

    /// Subtracts the column means.
    pub fn center_columns(&mut self) -> Vec<F> {
        let mut mean = vec![F::zero(); self.cols];
        if self.rows == 0 {
            return mean;
        }
        for row in self.iter_rows() {
            for (m, &x) in mean.iter_mut().zip(row) {
                *m += x;
            }
        }
        let n = F::from_usize_lossy(self.rows);
        mean.iter_mut().for_each(|m| *m /= n);
        let cols = self.cols;
        for row in self.data.chunks_exact_mut(cols.max(1)) {
            for (x, &m) in row.iter_mut().zip(&mean) {
                *x -= m;
            }
        }
        mean
    }

    pub fn cast<G: Scalar>(&self) -> Matrix<G> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| G::of(x.to_f64_lossy())).collect(),
        }
    }
}

impl<F> std::ops::Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for Matrix<F> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdOptions {
    /// Relative off-diagonal tolerance; raised to a few machine epsilons for
    /// low-precision scalars.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for SvdOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_sweeps: 60,
        }
    }
}

/// `A = U · diag(singular) · Vᵀ` with singular values in descending order.
#[derive(Debug, Clone)]
pub struct Svd<F> {
    pub u: Matrix<F>,
    pub singular: Vec<F>,
    pub v: Matrix<F>,
    /// Some singular value is zero relative to the largest; the matching
    /// columns of `u` were completed to an orthonormal basis.
    pub rank_deficient: bool,
    pub sweeps: usize,
    pub converged: bool,
}

/// One-sided (Hestenes) Jacobi SVD of an `m × n` matrix with `m ≥ n`.
pub fn svd_jacobi<F: Scalar>(a: &Matrix<F>, options: SvdOptions) -> Svd<F> {
    let (m, n) = (a.rows(), a.cols());
    assert!(m >= n, "svd_jacobi needs rows >= cols");
    let tol = F::of(options.tolerance).max(F::epsilon() * F::of(4.0));
    // Rows of `w` are the columns of A being orthogonalized; rows of `vt` are
    // the columns of V.
    let mut w = a.transpose();
    let mut vt = Matrix::<F>::identity(n);
    let mut sweeps = 0;
    let mut converged = n < 2;
    while !converged && sweeps < options.max_sweeps {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let (wp, wq) = (w.row(p), w.row(q));
                    (dot(wp, wp), dot(wq, wq), dot(wp, wq))
                };
                if gamma == F::zero() || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (F::one() + zeta * zeta).sqrt());
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = c * t;
                rotate_rows(&mut w, p, q, c, s);
                rotate_rows(&mut vt, p, q, c, s);
            }
        }
        converged = !rotated;
    }

    let mut singular: Vec<F> = (0..n).map(|j| norm(w.row(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        singular[j]
            .partial_cmp(&singular[i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let sigma_max = order.first().map_or(F::zero(), |&i| singular[i]);
    let rank_tol = sigma_max * F::epsilon() * F::from_usize_lossy(m.max(1)) * F::of(16.0);

    let mut u_cols: Vec<Vec<F>> = Vec::with_capacity(n);
    let mut deficient = Vec::new();
    let mut v_cols: Vec<Vec<F>> = Vec::with_capacity(n);
    let mut sorted_sigma = Vec::with_capacity(n);
    for (pos, &j) in order.iter().enumerate() {
        let s = singular[j];
        v_cols.push(vt.row(j).to_vec());
        if s > rank_tol && s > F::zero() {
            u_cols.push(w.row(j).iter().map(|&x| x / s).collect());
            sorted_sigma.push(s);
        } else {
            u_cols.push(vec![F::zero(); m]);
            deficient.push(pos);
            sorted_sigma.push(F::zero());
        }
    }
    for &pos in &deficient {
        u_cols[pos] = complete_basis(&u_cols, pos, m);
    }
    singular.clear();
    singular.extend(sorted_sigma);

    let u = Matrix::from_fn(m, n, |i, j| u_cols[j][i]);
    let v = Matrix::from_fn(n, n, |i, j| v_cols[j][i]);
    Svd {
        u,
        singular,
        v,
        rank_deficient: !deficient.is_empty(),
        sweeps,
        converged,
    }
}

fn rotate_rows<F: Scalar>(mat: &mut Matrix<F>, p: usize, q: usize, c: F, s: F) {
    let cols = mat.cols();
    let (head, tail) = mat.as_mut_slice().split_at_mut(q * cols);
    let rp = &mut head[p * cols..(p + 1) * cols];
    let rq = &mut tail[..cols];
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// A unit vector orthogonal to every non-zero column in `cols` except
/// `skip`, built from the standard basis by Gram-Schmidt.
fn complete_basis<F: Scalar>(cols: &[Vec<F>], skip: usize, m: usize) -> Vec<F> {
    let others: Vec<&Vec<F>> = cols
        .iter()
        .enumerate()
        .filter(|(i, c)| *i != skip && c.iter().any(|x| *x != F::zero()))
        .map(|(_, c)| c)
        .collect();
    let mut best: Option<(F, Vec<F>)> = None;
    for k in 0..m {
        let mut v = vec![F::zero(); m];
        v[k] = F::one();
        for _ in 0..2 {
            for o in &others {
                let proj = dot(&v, o);
                v.iter_mut().zip(o.iter()).for_each(|(x, &y)| *x -= proj * y);
            }
        }
        let len = norm(&v);
        if len > F::of(0.5) {
            v.iter_mut().for_each(|x| *x /= len);
            return v;
        }
        if best.as_ref().is_none_or(|(b, _)| len > *b) {
            best = Some((len, v));
        }
    }
    let (len, mut v) = best.expect("m >= 1");
    v.iter_mut().for_each(|x| *x /= len);
    v
}
