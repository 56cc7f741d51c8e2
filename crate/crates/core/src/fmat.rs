//! Dense f64 matrices and the floating-point kernels: modified Gram-Schmidt
//! with re-orthogonalization, one-sided Jacobi SVD, and a cyclic Jacobi
//! eigensolver for symmetric matrices. Sizes here are desk scale, so the
//! emphasis is on accuracy and determinism rather than speed.

use crate::tol::ToleranceConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct FMat {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
}

impl FMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FMat {
            rows,
            cols,
            a: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = FMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        FMat {
            rows: r,
            cols: c,
            a: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = FMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.a[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn to_row_vecs(&self) -> Vec<Vec<f64>> {
        self.rows_iter().map(|r| r.to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> FMat {
        FMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &FMat) -> FMat {
        assert_eq!(self.cols, other.rows);
        let mut out = FMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let lhs = self[(i, k)];
                if lhs == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += lhs * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn add(&self, other: &FMat) -> FMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        FMat {
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, other: &FMat) -> FMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        FMat {
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> FMat {
        FMat {
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().map(|x| x * s).collect(),
        }
    }

    /// Entrywise max-abs norm.
    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &FMat) -> f64 {
        self.sub(other).max_abs()
    }

    /// Gram matrix of the rows: G(i, j) = <row_i, row_j>.
    pub fn gram(&self) -> FMat {
        let mut g = FMat::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in i..self.rows {
                let v = dot(self.row(i), self.row(j));
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }

    /// Singular values, descending, by one-sided Jacobi on the columns.
    pub fn singular_values(&self) -> Vec<f64> {
        let (_, sigma, _) = self.svd(false);
        sigma
    }

    /// One-sided Jacobi SVD. Returns (column-orthogonal W with W = U*Sigma,
    /// singular values descending, V with columns = right singular vectors);
    /// V is only accumulated when `want_v` is set.
    pub fn svd(&self, want_v: bool) -> (FMat, Vec<f64>, Option<FMat>) {
        let n = self.cols;
        let mut w = self.clone();
        let mut v = if want_v { Some(FMat::identity(n)) } else { None };
        let eps = 1e-15;
        for _sweep in 0..60 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    let (mut app, mut aqq, mut apq) = (0.0, 0.0, 0.0);
                    for i in 0..w.rows {
                        let x = w[(i, p)];
                        let y = w[(i, q)];
                        app += x * x;
                        aqq += y * y;
                        apq += x * y;
                    }
                    let denom = (app * aqq).sqrt();
                    if denom == 0.0 || apq.abs() <= eps * denom {
                        continue;
                    }
                    off = off.max(apq.abs() / denom);
                    let tau = (aqq - app) / (2.0 * apq);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for i in 0..w.rows {
                        let x = w[(i, p)];
                        let y = w[(i, q)];
                        w[(i, p)] = c * x - s * y;
                        w[(i, q)] = s * x + c * y;
                    }
                    if let Some(vm) = v.as_mut() {
                        for i in 0..n {
                            let x = vm[(i, p)];
                            let y = vm[(i, q)];
                            vm[(i, p)] = c * x - s * y;
                            vm[(i, q)] = s * x + c * y;
                        }
                    }
                }
            }
            if off < eps {
                break;
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        let norms: Vec<f64> = (0..n)
            .map(|j| (0..w.rows).map(|i| w[(i, j)] * w[(i, j)]).sum::<f64>().sqrt())
            .collect();
        order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());
        let w_sorted = FMat::from_fn(w.rows, n, |i, j| w[(i, order[j])]);
        let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
        let v_sorted = v.map(|vm| FMat::from_fn(n, n, |i, j| vm[(i, order[j])]));
        (w_sorted, sigma, v_sorted)
    }

    /// Numerical rank: singular values above rank_tol * max(sigma_max, 1).
    pub fn rank(&self, tol: &ToleranceConfig) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let sigma = self.singular_values();
        let cutoff = tol.rank_tol * sigma.first().copied().unwrap_or(0.0).max(1.0);
        sigma.iter().filter(|&&s| s > cutoff).count()
    }

    /// Rows spanning { x : self * x = 0 } numerically.
    pub fn null_space(&self, tol: &ToleranceConfig) -> Vec<Vec<f64>> {
        if self.cols == 0 {
            return Vec::new();
        }
        if self.rows == 0 {
            return (0..self.cols)
                .map(|j| {
                    let mut e = vec![0.0; self.cols];
                    e[j] = 1.0;
                    e
                })
                .collect();
        }
        let (_, sigma, v) = self.svd(true);
        let v = v.unwrap();
        let cutoff = tol.rank_tol * sigma.first().copied().unwrap_or(0.0).max(1.0);
        (0..self.cols)
            .filter(|&j| sigma.get(j).is_none_or(|&s| s <= cutoff))
            .map(|j| v.col(j))
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for FMat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.a[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for FMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.a[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    a.iter().map(|x| x / n).collect()
}

pub fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Modified Gram-Schmidt over rows with one re-orthogonalization pass.
/// Rows whose residual falls below `drop_tol` relative to their input norm
/// (or absolutely, for zero inputs) are dropped; the result is an
/// orthonormal basis of the row span.
pub fn mgs_rows(rows: &[Vec<f64>], drop_tol: f64) -> FMat {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        let scale = norm(r).max(1.0);
        let mut u = r.clone();
        for _pass in 0..2 {
            for b in &basis {
                let c = dot(&u, b);
                axpy(&mut u, -c, b);
            }
        }
        let n = norm(&u);
        if n > drop_tol * scale {
            basis.push(u.iter().map(|x| x / n).collect());
        }
    }
    if basis.is_empty() {
        FMat::zeros(0, rows.first().map_or(0, |r| r.len()))
    } else {
        FMat::from_rows(basis)
    }
}

/// Orthogonal projector onto the row span, built from an orthonormalized
/// basis: P = B^T B.
pub fn projection_onto_rows_float(rows: &[Vec<f64>], tol: &ToleranceConfig) -> FMat {
    let ambient = rows.first().map_or(0, |r| r.len());
    let b = mgs_rows(rows, tol.rank_tol);
    let mut p = FMat::zeros(ambient, ambient);
    for k in 0..b.nrows() {
        let r = b.row(k);
        for i in 0..ambient {
            if r[i] == 0.0 {
                continue;
            }
            for j in 0..ambient {
                p[(i, j)] += r[i] * r[j];
            }
        }
    }
    p
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues ascending and the matrix whose columns are the
/// matching eigenvectors.
pub fn sym_eig(m: &FMat) -> (Vec<f64>, FMat) {
    assert_eq!(m.nrows(), m.ncols());
    let n = m.nrows();
    let mut a = m.clone();
    let mut v = FMat::identity(n);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-14 * (1.0 + a.max_abs()) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let vecs = FMat::from_fn(n, n, |i, j| v[(i, order[j])]);
    (vals, vecs)
}

/// Apply a scalar function to a symmetric PSD matrix through its
/// eigendecomposition. Used for S^{1/2} and S^{-1/2}.
pub fn sym_func(m: &FMat, f: impl Fn(f64) -> f64) -> FMat {
    let (vals, vecs) = sym_eig(m);
    let n = m.nrows();
    let mut out = FMat::zeros(n, n);
    for (k, &lam) in vals.iter().enumerate() {
        let flam = f(lam);
        if flam == 0.0 {
            continue;
        }
        let col = vecs.col(k);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += flam * col[i] * col[j];
            }
        }
    }
    out
}

/// Extreme eigenvalues of a symmetric matrix, checking symmetry first.
pub fn symmetric_spectrum_extremes_float(
    m: &FMat,
    tol: &ToleranceConfig,
) -> crate::error::Result<(f64, f64)> {
    if m.nrows() != m.ncols() {
        return Err(crate::error::Error::NotSymmetric);
    }
    if m.max_abs_diff(&m.transpose()) > tol.ortho_tol * (1.0 + m.max_abs()) {
        return Err(crate::error::Error::NotSymmetric);
    }
    if m.nrows() == 0 {
        return Ok((0.0, 0.0));
    }
    let (vals, _) = sym_eig(m);
    Ok((vals[0], vals[vals.len() - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mgs_drops_dependent_rows() {
        let rows = vec![
            vec![1.0, 0.0],
            vec![2.0, 0.0],
            vec![0.0, 1.0],
        ];
        let b = mgs_rows(&rows, 1e-10);
        assert_eq!(b.nrows(), 2);
        let g = b.gram();
        assert!(g.max_abs_diff(&FMat::identity(2)) < 1e-12);
    }

    #[test]
    fn mgs_empty_input() {
        let b = mgs_rows(&[], 1e-10);
        assert_eq!(b.nrows(), 0);
    }

    #[test]
    fn mgs_gram_residual_on_random_vectors() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let b = mgs_rows(&rows, 1e-10);
        assert_eq!(b.nrows(), 3);
        assert!(b.gram().max_abs_diff(&FMat::identity(3)) < 1e-10);
    }

    #[test]
    fn svd_of_diagonal() {
        let m = FMat::from_rows(vec![vec![3.0, 0.0], vec![0.0, 2.0]]);
        let s = m.singular_values();
        assert!((s[0] - 3.0).abs() < 1e-12 && (s[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rank_and_null_space() {
        let tol = ToleranceConfig::default();
        let m = FMat::from_rows(vec![vec![1.0, 2.0, 0.0], vec![2.0, 4.0, 0.0]]);
        assert_eq!(m.rank(&tol), 1);
        let ns = m.null_space(&tol);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for r in m.mul_vec(v) {
                assert!(r.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn float_projector_is_idempotent_and_symmetric() {
        use rand::{Rng, SeedableRng};
        let tol = ToleranceConfig::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(91);
        for _ in 0..10 {
            let rows: Vec<Vec<f64>> = (0..2)
                .map(|_| (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let p = projection_onto_rows_float(&rows, &tol);
            assert!(p.mul(&p).max_abs_diff(&p) <= tol.ortho_tol);
            assert!(p.max_abs_diff(&p.transpose()) <= tol.ortho_tol);
        }
    }

    #[test]
    fn float_spectrum_rejects_asymmetry() {
        let tol = ToleranceConfig::default();
        let asym = FMat::from_rows(vec![vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(symmetric_spectrum_extremes_float(&asym, &tol).is_err());
        let sym = FMat::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        let (lo, hi) = symmetric_spectrum_extremes_float(&sym, &tol).unwrap();
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 3.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_eigen_of_frame_operator() {
        let s = FMat::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        let (vals, vecs) = sym_eig(&s);
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        // Reconstruct.
        let lam = FMat::from_fn(2, 2, |i, j| if i == j { vals[i] } else { 0.0 });
        let re = vecs.mul(&lam).mul(&vecs.transpose());
        assert!(re.max_abs_diff(&s) < 1e-12);
    }

    #[test]
    fn inv_sqrt_of_psd() {
        let s = FMat::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        let r = sym_func(&s, |x| 1.0 / x.sqrt());
        let should_be_identity = r.mul(&s).mul(&r);
        assert!(should_be_identity.max_abs_diff(&FMat::identity(2)) < 1e-12);
    }
}
