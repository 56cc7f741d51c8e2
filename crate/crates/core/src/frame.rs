//! The core objects: vector families (frames), subspaces, and their
//! operators. All inputs are stored exactly — every finite double is a
//! rational — and the mode tag records whether float tolerances apply.

use crate::cmat::{CfMat, CqMat};
use crate::error::{Error, Result};
use crate::fmat::{self, FMat};
use crate::qmat::{self, Enclosure, QMat};
use crate::scalar::{q_from_f64, q_to_f64, CQ, Q};
use crate::tol::{Field, Mode, ToleranceConfig};
use num_complex::Complex64;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyData {
    Real(Vec<Vec<Q>>),
    Complex(Vec<Vec<CQ>>),
}

/// An indexed family of vectors in N-dimensional real or complex space.
///
/// `decision_rows`, when present, is an exact family with the same verdicts
/// for every scale-invariant decision (rank, spark, complement property):
/// it differs from the stored vectors by per-vector nonzero scalings and,
/// unless `decision_isometric` is set, a global invertible map. Families
/// produced by normalizing exact data carry their unnormalized exact
/// originals here, so combinatorial decisions stay exact.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFamily {
    ambient: usize,
    mode: Mode,
    data: FamilyData,
    decision_rows: Option<Vec<Vec<Q>>>,
    decision_isometric: bool,
}

impl VectorFamily {
    pub fn new_real(ambient: usize, rows: Vec<Vec<Q>>, mode: Mode) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != ambient) {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in ambient dimension {}",
                bad.len(),
                ambient
            )));
        }
        Ok(VectorFamily {
            ambient,
            mode,
            data: FamilyData::Real(rows),
            decision_rows: None,
            decision_isometric: false,
        })
    }

    pub fn new_complex(ambient: usize, rows: Vec<Vec<CQ>>, mode: Mode) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != ambient) {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in ambient dimension {}",
                bad.len(),
                ambient
            )));
        }
        if rows.iter().all(|r| r.iter().all(CQ::is_real)) {
            let real = rows
                .into_iter()
                .map(|r| r.into_iter().map(|z| z.re).collect())
                .collect();
            return Self::new_real(ambient, real, mode);
        }
        Ok(VectorFamily {
            ambient,
            mode,
            data: FamilyData::Complex(rows),
            decision_rows: None,
            decision_isometric: false,
        })
    }

    pub fn from_f64_rows(ambient: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(q_from_f64).collect())
            .collect();
        Self::new_real(ambient, rows, Mode::Float)
    }

    pub fn from_i64_rows(ambient: usize, rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| crate::scalar::q_int(x)).collect())
            .collect();
        Self::new_real(ambient, rows, Mode::Exact).expect("consistent fixture dims")
    }

    /// Attach exact scale-equivalent decision representatives.
    pub fn with_decision_rows(mut self, rows: Vec<Vec<Q>>, isometric: bool) -> Self {
        assert_eq!(rows.len(), self.len());
        self.decision_rows = Some(rows);
        self.decision_isometric = isometric;
        self
    }

    pub fn len(&self) -> usize {
        match &self.data {
            FamilyData::Real(r) => r.len(),
            FamilyData::Complex(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn field(&self) -> Field {
        match &self.data {
            FamilyData::Real(_) => Field::Real,
            FamilyData::Complex(_) => Field::Complex,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn data(&self) -> &FamilyData {
        &self.data
    }

    pub fn real_rows(&self) -> Result<&Vec<Vec<Q>>> {
        match &self.data {
            FamilyData::Real(r) => Ok(r),
            FamilyData::Complex(_) => Err(Error::ComplexNotSupported),
        }
    }

    pub fn has_zero_vector(&self) -> Option<usize> {
        match &self.data {
            FamilyData::Real(rows) => rows.iter().position(|r| r.iter().all(Q::is_zero)),
            FamilyData::Complex(rows) => rows.iter().position(|r| r.iter().all(CQ::is_zero)),
        }
    }

    /// Exact rows used by scale-invariant combinatorial decisions.
    pub fn decision_matrix(&self) -> Result<QMat> {
        if let Some(rows) = &self.decision_rows {
            return Ok(QMat::from_rows(rows.clone()));
        }
        Ok(QMat::from_rows(self.real_rows()?.clone()))
    }

    /// Exact rows safe for metric-sensitive decisions (norm retrieval):
    /// decision representatives are only used when they differ from the true
    /// vectors by per-vector scalings.
    pub fn metric_matrix(&self) -> Result<QMat> {
        match &self.decision_rows {
            Some(rows) if self.decision_isometric => Ok(QMat::from_rows(rows.clone())),
            _ => Ok(QMat::from_rows(self.real_rows()?.clone())),
        }
    }

    pub fn decision_cqmat(&self) -> CqMat {
        match &self.data {
            FamilyData::Real(rows) => CqMat::from_rows(
                rows.iter()
                    .map(|r| r.iter().map(|q| CQ::from_real(q.clone())).collect())
                    .collect(),
            ),
            FamilyData::Complex(rows) => CqMat::from_rows(rows.clone()),
        }
    }

    pub fn to_fmat(&self) -> Result<FMat> {
        let rows = self.real_rows()?;
        Ok(FMat::from_fn(rows.len(), self.ambient, |i, j| {
            q_to_f64(&rows[i][j])
        }))
    }

    pub fn to_cfmat(&self) -> CfMat {
        match &self.data {
            FamilyData::Real(rows) => CfMat::from_fn(rows.len(), self.ambient, |i, j| {
                Complex64::new(q_to_f64(&rows[i][j]), 0.0)
            }),
            FamilyData::Complex(rows) => {
                CfMat::from_fn(rows.len(), self.ambient, |i, j| rows[i][j].to_c64())
            }
        }
    }

    /// Exact rank of the family (dimension of its span).
    pub fn rank(&self) -> usize {
        match &self.data {
            FamilyData::Real(_) => self.decision_matrix().unwrap().rank(),
            FamilyData::Complex(_) => self.decision_cqmat().rank(),
        }
    }

    pub fn is_frame(&self) -> bool {
        self.rank() == self.ambient
    }

    /// Analysis operator as a matrix: row i is the conjugate of vector i, so
    /// that (T x)_i = <x, phi_i>.
    pub fn analysis_qmat(&self) -> Result<QMat> {
        Ok(QMat::from_rows(self.real_rows()?.clone()))
    }

    pub fn analysis_cqmat(&self) -> CqMat {
        match &self.data {
            FamilyData::Real(rows) => CqMat::from_rows(
                rows.iter()
                    .map(|r| r.iter().map(|q| CQ::from_real(q.clone())).collect())
                    .collect(),
            ),
            FamilyData::Complex(rows) => CqMat::from_rows(
                rows.iter()
                    .map(|r| r.iter().map(CQ::conj).collect())
                    .collect(),
            ),
        }
    }

    /// Frame operator S = sum_i phi_i phi_i^*: exact, symmetric (Hermitian) PSD.
    pub fn frame_operator_qmat(&self) -> Result<QMat> {
        let rows = self.real_rows()?;
        let mut s = QMat::zeros(self.ambient, self.ambient);
        for r in rows {
            for k in 0..self.ambient {
                if r[k].is_zero() {
                    continue;
                }
                for l in 0..self.ambient {
                    let t = &r[k] * &r[l];
                    s[(k, l)] = &s[(k, l)] + t;
                }
            }
        }
        Ok(s)
    }

    pub fn frame_operator_cqmat(&self) -> CqMat {
        self.decision_cqmat().frame_operator()
    }

    /// Gram matrix of the family, exact: G(i, j) = <phi_i, phi_j>.
    pub fn gram_qmat(&self) -> Result<QMat> {
        let a = self.analysis_qmat()?;
        Ok(a.mul(&a.transpose()))
    }

    /// Optimal frame bounds as the spectrum extremes of the frame operator.
    /// Exact families get certified rational enclosures; float families get
    /// Jacobi eigenvalues. A non-spanning family is flagged, with A = 0.
    pub fn frame_bounds(&self, tol: &ToleranceConfig) -> FrameBounds {
        let is_frame = self.is_frame();
        let (lower, upper) = match (&self.data, self.mode) {
            (FamilyData::Real(_), Mode::Exact) => {
                let s = self.frame_operator_qmat().unwrap();
                let width = q_from_f64(tol.witness_tol);
                let (lo, hi) = qmat::symmetric_spectrum_extremes_exact(&s, &width)
                    .expect("frame operator is symmetric by construction");
                (Bound::from_enclosure(lo), Bound::from_enclosure(hi))
            }
            (FamilyData::Real(_), Mode::Float) => {
                let s = self.frame_operator_qmat().unwrap().to_fmat();
                let (vals, _) = fmat::sym_eig(&s);
                (
                    Bound::from_f64(vals.first().copied().unwrap_or(0.0)),
                    Bound::from_f64(vals.last().copied().unwrap_or(0.0)),
                )
            }
            (FamilyData::Complex(_), Mode::Exact) => {
                let s = self.frame_operator_cqmat().realify();
                let width = q_from_f64(tol.witness_tol);
                let (lo, hi) = qmat::symmetric_spectrum_extremes_exact(&s, &width)
                    .expect("realified frame operator is symmetric");
                (Bound::from_enclosure(lo), Bound::from_enclosure(hi))
            }
            (FamilyData::Complex(_), Mode::Float) => {
                let s = self.to_cfmat().frame_operator().realify();
                let (vals, _) = fmat::sym_eig(&s);
                (
                    Bound::from_f64(vals.first().copied().unwrap_or(0.0)),
                    Bound::from_f64(vals.last().copied().unwrap_or(0.0)),
                )
            }
        };
        FrameBounds {
            lower,
            upper,
            is_frame,
        }
    }

    /// Parseval test: exact identity for exact families, tolerance check on
    /// ||S - I||_max for float ones.
    pub fn is_parseval(&self, tol: &ToleranceConfig) -> bool {
        match (&self.data, self.mode) {
            (FamilyData::Real(_), Mode::Exact) => {
                self.frame_operator_qmat().unwrap() == QMat::identity(self.ambient)
            }
            (FamilyData::Real(_), Mode::Float) => {
                let s = self.frame_operator_qmat().unwrap().to_fmat();
                s.max_abs_diff(&FMat::identity(self.ambient)) <= tol.ortho_tol
            }
            (FamilyData::Complex(_), Mode::Exact) => self.frame_operator_cqmat().is_identity(),
            (FamilyData::Complex(_), Mode::Float) => {
                let s = self.to_cfmat().frame_operator();
                s.max_abs_diff(&CfMat::identity(self.ambient)) <= tol.ortho_tol
            }
        }
    }

    /// Canonical tight transform {S^{-1/2} phi_i}: Parseval for every frame,
    /// an orthonormal basis when M = N. Inherently floating (matrix square
    /// roots are irrational); exact inputs keep their exact originals as
    /// decision representatives, so spark decisions on the output are exact.
    pub fn canonical_tight_transform(&self) -> Result<VectorFamily> {
        let rows = self.real_rows()?;
        if !self.is_frame() {
            return Err(Error::NotAFrame);
        }
        let s = self.frame_operator_qmat()?.to_fmat();
        let si = fmat::sym_func(&s, |x| 1.0 / x.sqrt());
        let new_rows: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| {
                let rf: Vec<f64> = r.iter().map(q_to_f64).collect();
                si.mul_vec(&rf)
            })
            .collect();
        let out = VectorFamily::from_f64_rows(self.ambient, new_rows)?;
        // S^{-1/2} is invertible: spark and complement-property verdicts are
        // those of the original, but the metric changed.
        let decision = self
            .decision_rows
            .clone()
            .unwrap_or_else(|| rows.clone());
        Ok(out.with_decision_rows(decision, false))
    }

    /// Riesz bounds: extreme eigenvalues of the Gram matrix. Requires M = N
    /// and independence.
    pub fn riesz_bounds(&self, tol: &ToleranceConfig) -> Result<(Bound, Bound)> {
        let _ = self.real_rows()?;
        if self.len() != self.ambient || self.rank() != self.ambient {
            return Err(Error::NotRieszBasis);
        }
        let g = self.gram_qmat()?;
        match self.mode {
            Mode::Exact => {
                let width = q_from_f64(tol.witness_tol);
                let (lo, hi) = qmat::symmetric_spectrum_extremes_exact(&g, &width)
                    .expect("gram matrix is symmetric");
                Ok((Bound::from_enclosure(lo), Bound::from_enclosure(hi)))
            }
            Mode::Float => {
                let (vals, _) = fmat::sym_eig(&g.to_fmat());
                Ok((
                    Bound::from_f64(vals[0]),
                    Bound::from_f64(vals[vals.len() - 1]),
                ))
            }
        }
    }

    /// Dual Riesz basis {phi_i^*} with <phi_i^*, phi_j> = delta_ij, exact.
    pub fn dual_riesz_basis(&self) -> Result<VectorFamily> {
        let rows = self.real_rows()?;
        if self.len() != self.ambient {
            return Err(Error::NotRieszBasis);
        }
        let a = QMat::from_rows(rows.clone());
        let inv = a.inverse().map_err(|_| Error::NotRieszBasis)?;
        let dual_rows = inv.transpose().to_row_vecs();
        VectorFamily::new_real(self.ambient, dual_rows, self.mode)
    }
}

/// One optimal frame bound; exact inputs carry a certified enclosure.
#[derive(Debug, Clone, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub enclosure: Option<Enclosure>,
}

impl Bound {
    fn from_f64(value: f64) -> Self {
        Bound {
            value,
            enclosure: None,
        }
    }

    fn from_enclosure(e: Enclosure) -> Self {
        Bound {
            value: e.mid_f64(),
            enclosure: Some(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameBounds {
    pub lower: Bound,
    pub upper: Bound,
    pub is_frame: bool,
}

/// A linear subspace of R^N, stored redundantly: an exact spanning set, an
/// exact orthogonal (unnormalized) basis with squared norms, an exact
/// projector, and a floating orthonormal basis. Exact representations keep
/// the rank arguments of the certifiers exact; the float basis serves the
/// operations that need unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient: usize,
    span: Vec<Vec<Q>>,
    ortho: Vec<Vec<Q>>,
    sq_norms: Vec<Q>,
    onb: FMat,
    projector: QMat,
    mode: Mode,
}

impl Subspace {
    pub fn from_span_rows(ambient: usize, rows: Vec<Vec<Q>>, mode: Mode) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != ambient) {
            return Err(Error::DimensionMismatch(format!(
                "spanning vector of length {} in ambient dimension {}",
                bad.len(),
                ambient
            )));
        }
        let (ortho, sq_norms) = qmat::gram_schmidt_rows(&rows);
        let onb_rows: Vec<Vec<f64>> = ortho
            .iter()
            .zip(&sq_norms)
            .map(|(u, nsq)| {
                let n = q_to_f64(nsq).sqrt();
                u.iter().map(|q| q_to_f64(q) / n).collect()
            })
            .collect();
        let onb = if onb_rows.is_empty() {
            FMat::zeros(0, ambient)
        } else {
            FMat::from_rows(onb_rows)
        };
        let projector = qmat::projector_onto_rows(&ortho, ambient);
        // Keep only an independent spanning set.
        let span = ortho.clone();
        Ok(Subspace {
            ambient,
            span,
            ortho,
            sq_norms,
            onb,
            projector,
            mode,
        })
    }

    pub fn from_f64_rows(ambient: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(q_from_f64).collect())
            .collect();
        Self::from_span_rows(ambient, rows, Mode::Float)
    }

    pub fn from_i64_rows(ambient: usize, rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<Q>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| crate::scalar::q_int(x)).collect())
            .collect();
        Self::from_span_rows(ambient, rows, Mode::Exact).expect("consistent fixture dims")
    }

    /// The full space.
    pub fn full(ambient: usize) -> Self {
        let rows = (0..ambient)
            .map(|i| {
                let mut e = vec![Q::zero(); ambient];
                e[i] = crate::scalar::q_one();
                e
            })
            .collect();
        Self::from_span_rows(ambient, rows, Mode::Exact).unwrap()
    }

    /// The zero subspace (dimension 0).
    pub fn zero(ambient: usize) -> Self {
        Self::from_span_rows(ambient, Vec::new(), Mode::Exact).unwrap()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.ortho.len()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Exact orthogonal rows (unnormalized) spanning the subspace.
    pub fn ortho_rows(&self) -> &[Vec<Q>] {
        &self.ortho
    }

    pub fn sq_norms(&self) -> &[Q] {
        &self.sq_norms
    }

    /// Floating orthonormal basis, rows as vectors.
    pub fn onb(&self) -> &FMat {
        &self.onb
    }

    /// Exact orthogonal projector onto the subspace.
    pub fn projector(&self) -> &QMat {
        &self.projector
    }

    pub fn projector_f64(&self) -> FMat {
        self.projector.to_fmat()
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        let pv = self.project(v);
        pv.iter().zip(v).all(|(a, b)| a == b)
    }

    pub fn project(&self, v: &[Q]) -> Vec<Q> {
        self.projector.mul_vec(v)
    }

    pub fn project_f64(&self, v: &[f64]) -> Vec<f64> {
        self.projector_f64().mul_vec(v)
    }

    /// Exact basis of the orthogonal complement.
    pub fn perp_basis(&self) -> Vec<Vec<Q>> {
        if self.ortho.is_empty() {
            return QMat::identity(self.ambient).to_row_vecs();
        }
        QMat::from_rows(self.ortho.clone()).null_space()
    }

    pub fn perp(&self) -> Subspace {
        Subspace::from_span_rows(self.ambient, self.perp_basis(), self.mode)
            .expect("complement basis has consistent dims")
    }

    /// Image under an exact linear map (rows transform by T^T on the right).
    pub fn apply(&self, t: &QMat) -> Result<Subspace> {
        if t.ncols() != self.ambient {
            return Err(Error::DimensionMismatch(
                "operator columns must match ambient dimension".into(),
            ));
        }
        let rows: Vec<Vec<Q>> = self.span.iter().map(|r| t.mul_vec(r)).collect();
        Subspace::from_span_rows(t.nrows(), rows, self.mode)
    }

    pub fn equals(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.projector == *other.projector()
    }

    /// Coordinates of a vector v (assumed inside) w.r.t. the exact orthogonal
    /// basis: v = sum c_j ortho_j. The basis is not unit-norm, so the metric
    /// in these coordinates is diag(sq_norms).
    pub fn coords(&self, v: &[Q]) -> Vec<Q> {
        self.ortho
            .iter()
            .zip(&self.sq_norms)
            .map(|(u, nsq)| qmat::dot(u, v) / nsq)
            .collect()
    }
}

/// An indexed family of subspaces sharing one ambient space.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceFamily {
    ambient: usize,
    subspaces: Vec<Subspace>,
}

impl SubspaceFamily {
    pub fn new(ambient: usize, subspaces: Vec<Subspace>) -> Result<Self> {
        if let Some(bad) = subspaces.iter().find(|s| s.ambient() != ambient) {
            return Err(Error::DimensionMismatch(format!(
                "subspace of ambient dimension {} in family of ambient dimension {}",
                bad.ambient(),
                ambient
            )));
        }
        Ok(SubspaceFamily {
            ambient,
            subspaces,
        })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.subspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subspaces.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Subspace> {
        self.subspaces.iter()
    }

    pub fn get(&self, i: usize) -> &Subspace {
        &self.subspaces[i]
    }

    /// Apply an invertible exact operator to every subspace.
    pub fn apply(&self, t: &QMat) -> Result<SubspaceFamily> {
        if t.nrows() != self.ambient || t.ncols() != self.ambient {
            return Err(Error::DimensionMismatch(
                "operator must be square in the ambient dimension".into(),
            ));
        }
        if t.rank() != self.ambient {
            return Err(Error::SingularOperator);
        }
        let subspaces = self
            .subspaces
            .iter()
            .map(|s| s.apply(t))
            .collect::<Result<Vec<_>>>()?;
        SubspaceFamily::new(self.ambient, subspaces)
    }
}
