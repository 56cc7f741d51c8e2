//! Bundled reference families used by the demo subcommands, the regression
//! tests and the acceptance suite: a six-subspace family of R^3 whose
//! projection norms determine vectors up to sign, the five-vector set
//! obtained from it by a non-orthogonal basis choice, the shear operator
//! that breaks the subspace family, and related small families.

use crate::frame::{Subspace, SubspaceFamily, VectorFamily};
use crate::qmat::QMat;

/// Six subspaces of R^3: span{e1,e2}, span{e2}, span{e3}, span{e1+e2},
/// span{e2+e3}, span{e1+e3}. The family does phase retrieval.
pub fn six_subspace_family() -> SubspaceFamily {
    let subspaces = vec![
        Subspace::from_i64_rows(3, &[&[1, 0, 0], &[0, 1, 0]]),
        Subspace::from_i64_rows(3, &[&[0, 1, 0]]),
        Subspace::from_i64_rows(3, &[&[0, 0, 1]]),
        Subspace::from_i64_rows(3, &[&[1, 1, 0]]),
        Subspace::from_i64_rows(3, &[&[0, 1, 1]]),
        Subspace::from_i64_rows(3, &[&[1, 0, 1]]),
    ];
    SubspaceFamily::new(3, subspaces).unwrap()
}

/// Orthogonal complements of the six subspaces; this family also does phase
/// retrieval (it can retrieve the norm of any vector).
pub fn complement_subspace_family() -> SubspaceFamily {
    let subspaces = six_subspace_family()
        .iter()
        .map(|w| w.perp())
        .collect();
    SubspaceFamily::new(3, subspaces).unwrap()
}

/// The five vectors {e1+e2, e2, e3, e2+e3, e1+e3}: the union of a
/// non-orthogonal basis of span{e1,e2} with spanning vectors of the other
/// five subspaces. Fails the complement property on the partition
/// {e2, e3, e2+e3} | {e1+e2, e1+e3}.
pub fn riesz_union_five() -> VectorFamily {
    VectorFamily::from_i64_rows(
        3,
        &[
            &[1, 1, 0],
            &[0, 1, 0],
            &[0, 0, 1],
            &[0, 1, 1],
            &[1, 0, 1],
        ],
    )
}

/// The invertible shear e1 -> e1 - e2, e2 -> e2, e3 -> e3 (columns are the
/// images). Applying it to the six subspaces destroys phase retrieval.
pub fn shear_operator() -> QMat {
    QMat::from_i64(&[&[1, 0, 0], &[-1, 1, 0], &[0, 0, 1]])
}

/// {e1, e2, e3, e1+e2, e1+e3, e2+e3}: does phase retrieval in R^3 although
/// no full-spark subfamily of it does.
pub fn six_vector_family() -> VectorFamily {
    VectorFamily::from_i64_rows(
        3,
        &[
            &[1, 0, 0],
            &[0, 1, 0],
            &[0, 0, 1],
            &[1, 1, 0],
            &[1, 0, 1],
            &[0, 1, 1],
        ],
    )
}

/// {e1, e2, e1+e2}: a minimal (2N-1) full-spark family in the plane.
pub fn full_spark_three_in_two() -> VectorFamily {
    VectorFamily::from_i64_rows(2, &[&[1, 0], &[0, 1], &[1, 1]])
}

/// {e1, e2}: spans the plane but fails phase retrieval.
pub fn two_in_r2() -> VectorFamily {
    VectorFamily::from_i64_rows(2, &[&[1, 0], &[0, 1]])
}
