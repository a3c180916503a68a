//! Reference implementations written directly from the textbook
//! definitions, deliberately naive and independent of the library code.

/// Jaro similarity over chars: matching window floor(max/2) - 1,
/// transpositions halved.
pub fn jaro(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let window = (a.len().max(b.len()) / 2).saturating_sub(1);
    let mut a_matched = vec![false; a.len()];
    let mut b_matched = vec![false; b.len()];
    let mut m = 0usize;
    for i in 0..a.len() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(b.len());
        for j in lo..hi {
            if !b_matched[j] && a[i] == b[j] {
                a_matched[i] = true;
                b_matched[j] = true;
                m += 1;
                break;
            }
        }
    }
    if m == 0 {
        return 0.0;
    }
    let a_seq: Vec<char> = a.iter().zip(&a_matched).filter(|(_, &f)| f).map(|(c, _)| *c).collect();
    let b_seq: Vec<char> = b.iter().zip(&b_matched).filter(|(_, &f)| f).map(|(c, _)| *c).collect();
    let half_t = a_seq.iter().zip(&b_seq).filter(|(x, y)| x != y).count() as f64 / 2.0;
    let m = m as f64;
    (m / a.len() as f64 + m / b.len() as f64 + (m - half_t) / m) / 3.0
}

/// Jaro-Winkler with scaling 0.1 over a common prefix of at most 4 chars.
pub fn jaro_winkler(a: &str, b: &str) -> f64 {
    let j = jaro(a, b);
    let l = a.chars().zip(b.chars()).take(4).take_while(|(x, y)| x == y).count() as f64;
    j + l * 0.1 * (1.0 - j)
}

/// Sample mean.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Plain cosine in f64.
pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let d: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    d / (nu * nv)
}

pub fn to_nalgebra(m: &diachrony::linalg::Matrix<f64>) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub fn from_nalgebra(m: &nalgebra::DMatrix<f64>) -> diachrony::linalg::Matrix<f64> {
    diachrony::linalg::Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Orthogonal factor of the QR decomposition of a random matrix, with the
/// column signs fixed so the distribution is uniform.
pub fn random_orthogonal(d: usize, rng: &mut impl rand::Rng) -> diachrony::linalg::Matrix<f64> {
    let a = nalgebra::DMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    from_nalgebra(&q)
}

/// Box-Muller standard normal.
pub fn gaussian(rng: &mut impl rand::Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// `U·Vᵀ` from nalgebra's SVD of `XᵀY`.
pub fn procrustes(
    x: &diachrony::linalg::Matrix<f64>,
    y: &diachrony::linalg::Matrix<f64>,
) -> diachrony::linalg::Matrix<f64> {
    let m = to_nalgebra(x).transpose() * to_nalgebra(y);
    let svd = m.svd(true, true);
    from_nalgebra(&(svd.u.unwrap() * svd.v_t.unwrap()))
}
