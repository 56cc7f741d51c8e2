//! Complex counterparts of the exact and float matrix kernels. Only the
//! operator-level operations need these (analysis, frame operator, Parseval
//! checks, Naimark completion, and rank decisions over the complex field), so
//! the surface is deliberately small.

use crate::fmat::FMat;
use crate::scalar::{clear_denominators_gauss, CQ};
use num_complex::Complex64;

/// Dense Gaussian-rational matrix, rows as vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CqMat {
    rows: usize,
    cols: usize,
    a: Vec<CQ>,
}

impl CqMat {
    pub fn from_rows(rows: Vec<Vec<CQ>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        CqMat {
            rows: r,
            cols: c,
            a: rows.into_iter().flatten().collect(),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CqMat {
            rows,
            cols,
            a: vec![CQ::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CqMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = CQ::one();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[CQ] {
        &self.a[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[CQ]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    /// Exact rank by Bareiss elimination over the Gaussian integers.
    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<crate::scalar::GaussInt>> = self
            .rows_iter()
            .map(clear_denominators_gauss)
            .collect();
        crate::qmat::bareiss_rank(rows)
    }

    /// A * B^H with B given in rows-as-vectors form is not needed; what the
    /// frame ops use is the sesquilinear Gram G(i, j) = <row_i, row_j> with
    /// the convention <u, v> = sum u_k conj(v_k).
    pub fn gram(&self) -> CqMat {
        let mut g = CqMat::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in 0..self.rows {
                g[(i, j)] = herm_dot(self.row(i), self.row(j));
            }
        }
        g
    }

    /// Frame operator S = sum over rows of phi phi^*: S(k, l) =
    /// sum_i phi_i(k) conj(phi_i(l)).
    pub fn frame_operator(&self) -> CqMat {
        let mut s = CqMat::zeros(self.cols, self.cols);
        for i in 0..self.rows {
            let r = self.row(i);
            for k in 0..self.cols {
                for l in 0..self.cols {
                    let t = r[k].mul(&r[l].conj());
                    s[(k, l)] = s[(k, l)].add(&t);
                }
            }
        }
        s
    }

    pub fn is_identity(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expect = if i == j { CQ::one() } else { CQ::zero() };
                if self[(i, j)] != expect {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_cf(&self) -> CfMat {
        CfMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_c64())
    }

    /// Realification: the 2N x 2N real symmetric image of a Hermitian matrix
    /// has the same spectrum with doubled multiplicities.
    pub fn realify(&self) -> crate::qmat::QMat {
        let mut m = crate::qmat::QMat::zeros(2 * self.rows, 2 * self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = &self[(i, j)];
                m[(i, j)] = z.re.clone();
                m[(i, j + self.cols)] = -z.im.clone();
                m[(i + self.rows, j)] = z.im.clone();
                m[(i + self.rows, j + self.cols)] = z.re.clone();
            }
        }
        m
    }
}

impl std::ops::Index<(usize, usize)> for CqMat {
    type Output = CQ;
    fn index(&self, (i, j): (usize, usize)) -> &CQ {
        &self.a[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CqMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut CQ {
        &mut self.a[i * self.cols + j]
    }
}

/// <u, v> = sum u_k conj(v_k), exact.
pub fn herm_dot(u: &[CQ], v: &[CQ]) -> CQ {
    let mut acc = CQ::zero();
    for (x, y) in u.iter().zip(v) {
        acc = acc.add(&x.mul(&y.conj()));
    }
    acc
}

/// Dense complex float matrix, rows as vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CfMat {
    rows: usize,
    cols: usize,
    a: Vec<Complex64>,
}

impl CfMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CfMat {
            rows,
            cols,
            a: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CfMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        CfMat {
            rows: r,
            cols: c,
            a: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = CfMat::zeros(rows, cols);
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

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.a[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_row_vecs(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn gram(&self) -> CfMat {
        let mut g = CfMat::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in 0..self.rows {
                g[(i, j)] = herm_dot_f(self.row(i), self.row(j));
            }
        }
        g
    }

    pub fn frame_operator(&self) -> CfMat {
        let mut s = CfMat::zeros(self.cols, self.cols);
        for i in 0..self.rows {
            let r = self.row(i);
            for k in 0..self.cols {
                for l in 0..self.cols {
                    s[(k, l)] += r[k] * r[l].conj();
                }
            }
        }
        s
    }

    pub fn max_abs_diff(&self, other: &CfMat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.a
            .iter()
            .zip(&other.a)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).norm()))
    }

    /// Hermitian realification for spectral computations.
    pub fn realify(&self) -> FMat {
        let mut m = FMat::zeros(2 * self.rows, 2 * self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self[(i, j)];
                m[(i, j)] = z.re;
                m[(i, j + self.cols)] = -z.im;
                m[(i + self.rows, j)] = z.im;
                m[(i + self.rows, j + self.cols)] = z.re;
            }
        }
        m
    }
}

impl std::ops::Index<(usize, usize)> for CfMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.a[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CfMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.a[i * self.cols + j]
    }
}

pub fn herm_dot_f(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(x, y)| x * y.conj()).sum()
}

pub fn cnorm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Complex modified Gram-Schmidt over rows with re-orthogonalization.
pub fn cmgs_rows(rows: &[Vec<Complex64>], drop_tol: f64) -> CfMat {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for r in rows {
        let scale = cnorm(r).max(1.0);
        let mut u = r.clone();
        for _pass in 0..2 {
            for b in &basis {
                let c = herm_dot_f(&u, b);
                for (ui, bi) in u.iter_mut().zip(b) {
                    *ui -= c * bi;
                }
            }
        }
        let n = cnorm(&u);
        if n > drop_tol * scale {
            basis.push(u.iter().map(|z| z / n).collect());
        }
    }
    if basis.is_empty() {
        CfMat::zeros(0, rows.first().map_or(0, |r| r.len()))
    } else {
        CfMat::from_rows(basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q_int, Q};
    use num_traits::Zero;

    fn cq(re: i64, im: i64) -> CQ {
        CQ::new(q_int(re), q_int(im))
    }

    #[test]
    fn complex_rank_sees_complex_dependence() {
        // (1, i) and (i, -1) are parallel over C but not over R coordinates.
        let m = CqMat::from_rows(vec![
            vec![cq(1, 0), cq(0, 1)],
            vec![cq(0, 1), cq(-1, 0)],
        ]);
        assert_eq!(m.rank(), 1);
        let full = CqMat::from_rows(vec![vec![cq(1, 0), cq(0, 1)], vec![cq(0, 1), cq(1, 0)]]);
        assert_eq!(full.rank(), 2);
    }

    #[test]
    fn frame_operator_of_complex_onb_is_identity() {
        let m = CqMat::from_rows(vec![vec![cq(1, 0), cq(0, 0)], vec![cq(0, 0), cq(0, 1)]]);
        assert!(m.frame_operator().is_identity());
    }

    #[test]
    fn realify_preserves_hermitian_spectrum() {
        // S = [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let s = CqMat::from_rows(vec![vec![cq(2, 0), cq(0, 1)], vec![cq(0, -1), cq(2, 0)]]);
        let r = s.realify();
        assert!(r.is_symmetric());
        let width = Q::new(1.into(), 1_000_000_000u64.into());
        let (lo, hi) =
            crate::qmat::symmetric_spectrum_extremes_exact(&r, &width).unwrap();
        assert!(lo.contains(&q_int(1)));
        assert!(hi.contains(&q_int(3)));
        assert!(!lo.width().is_zero() || lo.lo == q_int(1));
    }

    #[test]
    fn complex_mgs_orthonormalizes() {
        let rows = vec![
            vec![Complex64::new(1.0, 1.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)],
        ];
        let b = cmgs_rows(&rows, 1e-10);
        assert_eq!(b.nrows(), 2);
        assert!(b.gram().max_abs_diff(&CfMat::identity(2)) < 1e-12);
    }
}
