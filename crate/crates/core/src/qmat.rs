//! Dense exact-rational matrices and the elimination kernels behind every
//! combinatorial decision in the crate. Rows are the working orientation:
//! a family of vectors is the matrix whose rows are those vectors.

use crate::error::{Error, Result};
use crate::poly::{QPoly, SturmChain};
use crate::scalar::{clear_denominators, q_int, q_to_f64, ExactDomain, Q};
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq)]
pub struct QMat {
    rows: usize,
    cols: usize,
    a: Vec<Q>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat {
            rows,
            cols,
            a: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMat {
            rows: r,
            cols: c,
            a: rows.into_iter().flatten().collect(),
        }
    }

    /// Convenience for tests and fixtures.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        QMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| q_int(x)).collect())
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.a[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[Q]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn to_row_vecs(&self) -> Vec<Vec<Q>> {
        self.rows_iter().map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> QMat {
        let mut t = QMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = QMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let lhs = &self[(i, k)];
                if lhs.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = lhs * &other[(k, j)];
                    out[(i, j)] = &out[(i, j)] + t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| dot(self.row(i), v))
            .collect()
    }

    pub fn add(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let a = self
            .a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| x + y)
            .collect();
        QMat {
            rows: self.rows,
            cols: self.cols,
            a,
        }
    }

    pub fn sub(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let a = self
            .a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| x - y)
            .collect();
        QMat {
            rows: self.rows,
            cols: self.cols,
            a,
        }
    }

    pub fn scale(&self, s: &Q) -> QMat {
        QMat {
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().map(|x| x * s).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self[(i, j)] != self[(j, i)] {
                    return false;
                }
            }
        }
        true
    }

    pub fn trace(&self) -> Q {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self[(i, i)].clone()).sum()
    }

    pub fn to_fmat(&self) -> crate::fmat::FMat {
        crate::fmat::FMat::from_fn(self.rows, self.cols, |i, j| q_to_f64(&self[(i, j)]))
    }

    /// Exact rank by fraction-free (Bareiss) elimination on the
    /// denominator-cleared integer image.
    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<num_bigint::BigInt>> = self
            .rows_iter()
            .map(clear_denominators)
            .collect();
        bareiss_rank(rows)
    }

    /// Exact determinant, also fraction-free. The per-row denominator
    /// clearing is undone by dividing back the scaling factors.
    pub fn det(&self) -> Q {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Q::one();
        }
        let mut scale = Q::one();
        let mut rows: Vec<Vec<num_bigint::BigInt>> = Vec::with_capacity(n);
        for r in self.rows_iter() {
            let ints = clear_denominators(r);
            // The clearing multiplied the row by lcm; compensate.
            let mut lcm = num_bigint::BigInt::one();
            for q in r {
                lcm = num_integer::lcm(lcm, q.denom().clone());
            }
            scale *= Q::from_integer(lcm);
            rows.push(ints);
        }
        let d = bareiss_det(rows);
        Q::from_integer(d) / scale
    }

    /// Reduced row echelon form; returns the reduced matrix and pivot columns.
    pub fn rref(&self) -> (QMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].clone();
            for j in c..m.cols {
                m[(r, j)] = &m[(r, j)] / &inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let t = &f * &m[(r, j)];
                        m[(i, j)] = &m[(i, j)] - t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.a.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    /// Basis of { x : self * x = 0 }, returned as rows. With the rows =
    /// vectors convention this is the orthogonal complement of the row span.
    pub fn null_space(&self) -> Vec<Vec<Q>> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (row, &c) in pivots.iter().enumerate() {
                v[c] = Some(row);
            }
            v
        };
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut x = vec![Q::zero(); self.cols];
            x[free] = Q::one();
            for (&pc, row) in pivots.iter().zip(0..) {
                x[pc] = -r[(row, free)].clone();
            }
            basis.push(x);
        }
        basis
    }

    /// Exact inverse via Gauss-Jordan.
    pub fn inverse(&self) -> Result<QMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = QMat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Q::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return Err(Error::SingularOperator);
        }
        let mut out = QMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Ok(out)
    }

    /// True iff v lies in the span of the rows.
    pub fn row_space_contains(&self, v: &[Q]) -> bool {
        assert_eq!(v.len(), self.cols);
        let base = self.rank();
        let mut rows = self.to_row_vecs();
        rows.push(v.to_vec());
        QMat::from_rows(rows).rank() == base
    }

    /// Stack rows of both matrices (same column count).
    pub fn vstack(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.cols);
        let mut rows = self.to_row_vecs();
        rows.extend(other.to_row_vecs());
        QMat::from_rows(rows)
    }

    /// Characteristic polynomial det(xI - A) by Faddeev-LeVerrier.
    pub fn char_poly(&self) -> QPoly {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut coeffs = vec![Q::zero(); n + 1];
        coeffs[n] = Q::one();
        let mut m = self.clone();
        for k in 1..=n {
            if k > 1 {
                // M <- A (M + c_{n-k+1} I)
                let mut shifted = m;
                let c = coeffs[n - k + 1].clone();
                for i in 0..n {
                    shifted[(i, i)] = &shifted[(i, i)] + &c;
                }
                m = self.mul(&shifted);
            }
            coeffs[n - k] = -(m.trace() / q_int(k as i64));
        }
        QPoly::new(coeffs)
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.a[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.a[i * self.cols + j]
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[Q]) -> Q {
    dot(a, a)
}

/// Rank of an integer-domain matrix by Bareiss elimination with column
/// pivoting: all divisions are exact by the Sylvester identity.
pub fn bareiss_rank<T: ExactDomain>(mut m: Vec<Vec<T>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut prev = T::ring_one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_ring_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in (r + 1)..rows {
            for j in (c + 1)..cols {
                let t = m[r][c]
                    .ring_mul(&m[i][j])
                    .ring_sub(&m[i][c].ring_mul(&m[r][j]));
                m[i][j] = t.exact_div(&prev);
            }
            m[i][c] = T::ring_zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

fn bareiss_det(mut m: Vec<Vec<num_bigint::BigInt>>) -> num_bigint::BigInt {
    let n = m.len();
    let mut prev = num_bigint::BigInt::one();
    let mut sign = 1i8;
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !Zero::is_zero(&m[i][c])) else {
            return num_bigint::BigInt::zero();
        };
        if p != c {
            m.swap(c, p);
            sign = -sign;
        }
        for i in (c + 1)..n {
            for j in (c + 1)..n {
                let t = m[c][c]
                    .ring_mul(&m[i][j])
                    .ring_sub(&m[i][c].ring_mul(&m[c][j]));
                m[i][j] = t.exact_div(&prev);
            }
            m[i][c] = Zero::zero();
        }
        prev = m[c][c].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Exact Gram-Schmidt without normalization: returns pairwise-orthogonal rows
/// spanning the same space (dependent inputs dropped) and their squared norms.
/// Square roots leave the rationals, so unit vectors are a float-mode notion.
pub fn gram_schmidt_rows(rows: &[Vec<Q>]) -> (Vec<Vec<Q>>, Vec<Q>) {
    let mut ortho: Vec<Vec<Q>> = Vec::new();
    let mut sq: Vec<Q> = Vec::new();
    for v in rows {
        let mut u = v.clone();
        for (b, nsq) in ortho.iter().zip(&sq) {
            let coef = dot(&u, b) / nsq;
            if coef.is_zero() {
                continue;
            }
            for (ui, bi) in u.iter_mut().zip(b) {
                let t = &coef * bi;
                *ui = &*ui - t;
            }
        }
        let n = norm_sq(&u);
        if !n.is_zero() {
            ortho.push(u);
            sq.push(n);
        }
    }
    (ortho, sq)
}

/// Exact orthogonal projector onto the span of the given rows.
pub fn projector_onto_rows(rows: &[Vec<Q>], ambient: usize) -> QMat {
    let (ortho, sq) = gram_schmidt_rows(rows);
    let mut p = QMat::zeros(ambient, ambient);
    for (u, nsq) in ortho.iter().zip(&sq) {
        for i in 0..ambient {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..ambient {
                let t = &u[i] * &u[j] / nsq;
                p[(i, j)] = &p[(i, j)] + t;
            }
        }
    }
    p
}

/// Certified rational enclosure of a real algebraic number.
#[derive(Debug, Clone, PartialEq)]
pub struct Enclosure {
    pub lo: Q,
    pub hi: Q,
}

impl Enclosure {
    pub fn point(q: Q) -> Self {
        Enclosure { lo: q.clone(), hi: q }
    }

    pub fn mid_f64(&self) -> f64 {
        (q_to_f64(&self.lo) + q_to_f64(&self.hi)) / 2.0
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn contains(&self, q: &Q) -> bool {
        &self.lo <= q && q <= &self.hi
    }
}

/// Certified enclosures of the extreme eigenvalues of an exactly symmetric
/// rational matrix, via characteristic-polynomial Sturm bisection.
pub fn symmetric_spectrum_extremes_exact(m: &QMat, width: &Q) -> Result<(Enclosure, Enclosure)> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = m.nrows();
    if n == 0 {
        return Ok((Enclosure::point(Q::zero()), Enclosure::point(Q::zero())));
    }
    let p = m.char_poly();
    let chain = SturmChain::new(&p);
    // Gershgorin interval padded so the endpoints are never roots.
    let mut lo = None::<Q>;
    let mut hi = None::<Q>;
    for i in 0..n {
        let radius: Q = (0..n)
            .filter(|&j| j != i)
            .map(|j| m[(i, j)].abs())
            .sum();
        let l = &m[(i, i)] - &radius;
        let h = &m[(i, i)] + &radius;
        lo = Some(lo.map_or(l.clone(), |c: Q| c.min(l)));
        hi = Some(hi.map_or(h.clone(), |c: Q| c.max(h)));
    }
    let lo = lo.unwrap() - Q::one();
    let hi = hi.unwrap() + Q::one();

    let max_encl = isolate_extreme(&chain, &lo, &hi, width, true);
    let min_encl = isolate_extreme(&chain, &lo, &hi, width, false);
    Ok((min_encl, max_encl))
}

fn isolate_extreme(
    chain: &SturmChain,
    lo: &Q,
    hi: &Q,
    width: &Q,
    largest: bool,
) -> Enclosure {
    // The sign-change count ignores zeros, so roots_in stays correct when a
    // midpoint lands exactly on a root; a midpoint equal to a non-extreme
    // root must not be mistaken for the answer.
    let mut a = lo.clone();
    let mut b = hi.clone();
    while &(&b - &a) > width {
        let mid = (&a + &b) / q_int(2);
        let keep_upper = if largest {
            chain.roots_in(&mid, &b) >= 1
        } else {
            chain.roots_in(&a, &mid) == 0
        };
        if keep_upper {
            a = mid;
        } else {
            b = mid;
        }
    }
    Enclosure { lo: a, hi: b }
}
