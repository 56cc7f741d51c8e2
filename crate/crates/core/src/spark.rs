//! Combinatorial certifiers: spark, full spark, the complement property,
//! complement deficiency, and the hyperplane structure of near-failures.
//!
//! Enumeration is canonical everywhere: subsets ascend by size, then by
//! bitmask value within a size, and the representative of an unordered
//! partition {S, S^c} is the side containing index 1. Witnesses are the
//! first hit in that order, independent of worker count.

use crate::cert::{
    Arithmetic, CpOutcome, EnumerationDigest, PartitionCertificate,
};
use crate::error::{Error, Result};
use crate::frame::VectorFamily;
use crate::qmat::{bareiss_rank, QMat};
use crate::scalar::{clear_denominators, clear_denominators_gauss, GaussInt, Q};
use crate::tol::{Field, ToleranceConfig};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

/// Exponential scans refuse larger families unless forced.
pub const SCAN_GUARD: usize = 24;

/// Policy for the subset scans: the guard override and the arithmetic the
/// rank decisions run in. Exact is the default; float ranks exist for the
/// tolerance-guarded mode.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScanPolicy {
    pub force: bool,
    pub float_ranks: Option<ToleranceConfig>,
}

impl ScanPolicy {
    pub fn exact() -> Self {
        ScanPolicy::default()
    }

    fn arithmetic(&self) -> Arithmetic {
        if self.float_ranks.is_some() {
            Arithmetic::Float
        } else {
            Arithmetic::Exact
        }
    }
}

fn ensure_scan_size(m: usize, policy: &ScanPolicy) -> Result<()> {
    if m > 63 {
        return Err(Error::ScanTooLarge { m, guard: 63 });
    }
    if m > SCAN_GUARD && !policy.force {
        return Err(Error::ScanTooLarge {
            m,
            guard: SCAN_GUARD,
        });
    }
    Ok(())
}

/// Rank-of-subset oracle over one family, with denominators cleared once up
/// front so each subset rank is a single integer Bareiss elimination.
pub enum RankOracle {
    Int(Vec<Vec<BigInt>>),
    Gauss(Vec<Vec<GaussInt>>),
    Float(Vec<Vec<f64>>, ToleranceConfig),
    ComplexFloat(Vec<Vec<f64>>, ToleranceConfig),
}

impl RankOracle {
    pub fn for_family(f: &VectorFamily, policy: &ScanPolicy) -> Result<RankOracle> {
        match (f.field(), policy.float_ranks) {
            (Field::Real, None) => {
                let rows = f
                    .decision_matrix()?
                    .rows_iter()
                    .map(clear_denominators)
                    .collect();
                Ok(RankOracle::Int(rows))
            }
            (Field::Complex, None) => {
                let rows = f
                    .decision_cqmat()
                    .rows_iter()
                    .map(clear_denominators_gauss)
                    .collect();
                Ok(RankOracle::Gauss(rows))
            }
            (Field::Real, Some(tol)) => Ok(RankOracle::Float(
                f.to_fmat()?.to_row_vecs(),
                tol,
            )),
            (Field::Complex, Some(tol)) => {
                // Complex rank via realification: rank_C = rank_R / 2.
                let c = f.to_cfmat();
                let rows: Vec<Vec<f64>> = c
                    .to_row_vecs()
                    .into_iter()
                    .map(|r| {
                        let mut out: Vec<f64> = r.iter().map(|z| z.re).collect();
                        out.extend(r.iter().map(|z| z.im));
                        out
                    })
                    .collect();
                Ok(RankOracle::ComplexFloat(rows, tol))
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            RankOracle::Int(r) => r.len(),
            RankOracle::Gauss(r) => r.len(),
            RankOracle::Float(r, _) | RankOracle::ComplexFloat(r, _) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rank of the subfamily selected by the bitmask.
    pub fn rank_mask(&self, mask: u64) -> usize {
        match self {
            RankOracle::Int(rows) => bareiss_rank(pick(rows, mask)),
            RankOracle::Gauss(rows) => bareiss_rank(pick(rows, mask)),
            RankOracle::Float(rows, tol) => {
                let sel = pick(rows, mask);
                if sel.is_empty() {
                    0
                } else {
                    crate::fmat::FMat::from_rows(sel).rank(tol)
                }
            }
            RankOracle::ComplexFloat(rows, tol) => {
                let sel: Vec<Vec<f64>> = (0..rows.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .flat_map(|i| {
                        // Each complex row contributes (re, im) and (-im, re).
                        let r = &rows[i];
                        let half = r.len() / 2;
                        let a = r.clone();
                        let mut b: Vec<f64> = r[half..].iter().map(|x| -x).collect();
                        b.extend_from_slice(&r[..half]);
                        [a, b]
                    })
                    .collect();
                if sel.is_empty() {
                    0
                } else {
                    crate::fmat::FMat::from_rows(sel).rank(tol) / 2
                }
            }
        }
    }
}

fn pick<T: Clone>(rows: &[Vec<T>], mask: u64) -> Vec<Vec<T>> {
    (0..rows.len())
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| rows[i].clone())
        .collect()
}

/// Ascending masks of fixed popcount via Gosper's hack.
pub fn masks_of_size(bits: usize, size: usize) -> Vec<u64> {
    if size > bits {
        return Vec::new();
    }
    if size == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let last: u64 = ((1u64 << size) - 1) << (bits - size);
    let mut v: u64 = (1u64 << size) - 1;
    loop {
        out.push(v);
        if v == last {
            break;
        }
        let t = v | (v - 1);
        v = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
    }
    out
}

/// Representatives of unordered partitions of {1..m}: subsets containing
/// index 1, ascending by (size, value). One size class at a time.
fn representative_classes(m: usize) -> impl Iterator<Item = Vec<u64>> {
    (1..=m).map(move |s| {
        masks_of_size(m - 1, s - 1)
            .into_iter()
            .map(|g| (g << 1) | 1)
            .collect()
    })
}

/// Spark: cardinality of the smallest linearly dependent subfamily, M+1 if
/// the family is independent. Ascends by subset size with early exit; any
/// (N+1)-subset is automatically dependent.
#[derive(Debug, Clone, Serialize)]
pub struct SparkOutcome {
    pub spark: usize,
    pub full_spark: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dependent_subset: Option<Vec<usize>>,
    pub arithmetic: Arithmetic,
}

pub fn spark(f: &VectorFamily, policy: &ScanPolicy) -> Result<SparkOutcome> {
    let m = f.len();
    let n = f.ambient();
    if m == 0 {
        return Err(Error::TooFewVectors { got: 0, dim: n });
    }
    ensure_scan_size(m, policy)?;
    let oracle = RankOracle::for_family(f, policy)?;
    let arithmetic = policy.arithmetic();
    for k in 1..=m.min(n + 1) {
        if k == n + 1 {
            // Every (N+1)-subset in N dimensions is dependent.
            return Ok(SparkOutcome {
                spark: k,
                full_spark: m >= n,
                dependent_subset: Some((1..=k).collect()),
                arithmetic,
            });
        }
        let hit = masks_of_size(m, k)
            .into_par_iter()
            .find_first(|&mask| oracle.rank_mask(mask) < k);
        if let Some(mask) = hit {
            return Ok(SparkOutcome {
                spark: k,
                full_spark: false,
                dependent_subset: Some(mask_to_indices(mask, m)),
                arithmetic,
            });
        }
    }
    // Independent family.
    Ok(SparkOutcome {
        spark: m + 1,
        full_spark: m >= n,
        dependent_subset: None,
        arithmetic,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FullSparkOutcome {
    pub full_spark: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dependent_subset: Option<Vec<usize>>,
    pub arithmetic: Arithmetic,
}

/// Full spark: every N-subset invertible. Requires M >= N.
pub fn is_full_spark(f: &VectorFamily, policy: &ScanPolicy) -> Result<FullSparkOutcome> {
    let m = f.len();
    let n = f.ambient();
    if m < n {
        return Err(Error::TooFewVectors { got: m, dim: n });
    }
    ensure_scan_size(m, policy)?;
    let oracle = RankOracle::for_family(f, policy)?;
    let hit = masks_of_size(m, n)
        .into_par_iter()
        .find_first(|&mask| oracle.rank_mask(mask) < n);
    Ok(FullSparkOutcome {
        full_spark: hit.is_none(),
        dependent_subset: hit.map(|mask| mask_to_indices(mask, m)),
        arithmetic: policy.arithmetic(),
    })
}

pub fn mask_to_indices(mask: u64, m: usize) -> Vec<usize> {
    (0..m).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

/// Complement property: every 2-partition has a side spanning the ambient
/// space. One representative per unordered partition, pruning the complement
/// rank when the subset side already spans.
pub fn check_complement_property(f: &VectorFamily, policy: &ScanPolicy) -> Result<CpOutcome> {
    let oracle = RankOracle::for_family(f, policy)?;
    let n = f.ambient();
    let m = f.len();
    ensure_scan_size(m, policy)?;
    let arithmetic = policy.arithmetic();
    if m == 0 {
        let holds = n == 0;
        return Ok(CpOutcome {
            holds,
            arithmetic,
            digest: EnumerationDigest::default(),
            witness: (!holds).then(|| PartitionCertificate::from_mask(0, 0, 0, 0, n)),
        });
    }
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut digest = EnumerationDigest::default();
    for class in representative_classes(m) {
        let failing = class.par_iter().copied().find_first(|&mask| {
            let r1 = oracle.rank_mask(mask);
            r1 < n && oracle.rank_mask(full & !mask) < n
        });
        if let Some(mask) = failing {
            // Canonical digest: walk the prefix up to the witness.
            for &prior in class.iter().take_while(|&&x| x != mask) {
                digest.checked += 1;
                if oracle.rank_mask(prior) == n {
                    digest.pruned += 1;
                }
            }
            digest.checked += 1;
            let d1 = oracle.rank_mask(mask);
            let d2 = oracle.rank_mask(full & !mask);
            return Ok(CpOutcome {
                holds: false,
                arithmetic,
                digest,
                witness: Some(PartitionCertificate::from_mask(mask, m, d1, d2, n)),
            });
        }
        let (checked, pruned) = class
            .par_iter()
            .map(|&mask| (1usize, (oracle.rank_mask(mask) == n) as usize))
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        digest.checked += checked;
        digest.pruned += pruned;
    }
    Ok(CpOutcome {
        holds: true,
        arithmetic,
        digest,
        witness: None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DeficiencyOutcome {
    /// Minimum number of vectors whose addition can give the complement
    /// property; 0 exactly when the property already holds.
    pub k: usize,
    pub witness: PartitionCertificate,
    pub arithmetic: Arithmetic,
}

/// Complement deficiency: k = N - min over non-spanning I of dim span(I^c).
pub fn complement_deficiency(f: &VectorFamily, policy: &ScanPolicy) -> Result<DeficiencyOutcome> {
    let n = f.ambient();
    if f.rank() != n {
        return Err(Error::NotAFrame);
    }
    let m = f.len();
    ensure_scan_size(m, policy)?;
    let oracle = RankOracle::for_family(f, policy)?;
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };

    // Candidate: (dim of complement, class order index, side) for every
    // non-spanning I; both orientations of a representative are examined.
    let mut best: Option<(usize, usize, u8, u64, usize)> = None;
    let mut order_base = 0usize;
    for class in representative_classes(m) {
        let class_best = class
            .par_iter()
            .enumerate()
            .map(|(idx, &mask)| {
                let r1 = oracle.rank_mask(mask);
                let r2 = oracle.rank_mask(full & !mask);
                let mut cand: Option<(usize, usize, u8, u64, usize)> = None;
                if r1 < n {
                    cand = Some((r2, order_base + idx, 0, mask, r1));
                }
                if r2 < n {
                    let c2 = (r1, order_base + idx, 1, full & !mask, r2);
                    cand = Some(match cand {
                        Some(c1) if c1 <= c2 => c1,
                        _ => c2,
                    });
                }
                cand
            })
            .reduce(
                || None,
                |a, b| match (a, b) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, None) => x,
                    (None, y) => y,
                },
            );
        best = match (best, class_best) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        };
        order_base += class.len();
    }
    let (dim_complement, _, _, mask, dim_subset) =
        best.expect("a frame always has the empty non-spanning subset");
    Ok(DeficiencyOutcome {
        k: n - dim_complement,
        witness: PartitionCertificate::from_mask(mask, m, dim_subset, dim_complement, n),
        arithmetic: policy.arithmetic(),
    })
}

/// Every partition where neither side spans, with both span dimensions, and
/// whether each such partition splits into two hyperplanes.
#[derive(Debug, Clone, Serialize)]
pub struct HyperplaneScan {
    pub ambient: usize,
    pub partitions: Vec<PartitionCertificate>,
    pub all_hyperplanes: bool,
    pub checked: usize,
}

pub fn hyperplane_partition_scan(f: &VectorFamily, policy: &ScanPolicy) -> Result<HyperplaneScan> {
    let n = f.ambient();
    let m = f.len();
    ensure_scan_size(m, policy)?;
    let oracle = RankOracle::for_family(f, policy)?;
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut partitions = Vec::new();
    let mut checked = 0usize;
    for class in representative_classes(m) {
        checked += class.len();
        let mut found: Vec<PartitionCertificate> = class
            .par_iter()
            .filter_map(|&mask| {
                let r1 = oracle.rank_mask(mask);
                if r1 == n {
                    return None;
                }
                let r2 = oracle.rank_mask(full & !mask);
                if r2 == n {
                    return None;
                }
                Some(PartitionCertificate::from_mask(mask, m, r1, r2, n))
            })
            .collect();
        found.sort_by_key(|c| c.mask());
        partitions.extend(found);
    }
    let all_hyperplanes = partitions
        .iter()
        .all(|c| c.dim_subset == n - 1 && c.dim_complement == n - 1);
    Ok(HyperplaneScan {
        ambient: n,
        partitions,
        all_hyperplanes,
        checked,
    })
}

/// True iff some non-spanning partition has a side of dimension <= N-2, in
/// which case no single added subspace can repair phase retrieval.
pub fn cp_blocked_forever_vectors(f: &VectorFamily, policy: &ScanPolicy) -> Result<bool> {
    let scan = hyperplane_partition_scan(f, policy)?;
    Ok(scan
        .partitions
        .iter()
        .any(|c| c.min_dim() + 2 <= f.ambient()))
}

/// Exact null-space rows of the subfamily selected by the mask: the
/// orthogonal complement of span{phi_i : i in mask}.
pub fn subset_perp(rows: &[Vec<Q>], ambient: usize, mask: u64) -> Vec<Vec<Q>> {
    let sel: Vec<Vec<Q>> = (0..rows.len())
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| rows[i].clone())
        .collect();
    if sel.is_empty() {
        return QMat::identity(ambient).to_row_vecs();
    }
    QMat::from_rows(sel).null_space()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cert::PartitionVerdict;
    use crate::scalar::{q_int, CQ};
    use crate::tol::Mode;

    fn pol() -> ScanPolicy {
        ScanPolicy::exact()
    }

    #[test]
    fn masks_enumerate_in_canonical_order() {
        assert_eq!(masks_of_size(4, 2), vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(masks_of_size(3, 0), vec![0]);
        assert_eq!(masks_of_size(3, 3), vec![0b111]);
    }

    #[test]
    fn spark_examples() {
        let f = VectorFamily::from_i64_rows(2, &[&[1, 0], &[0, 1], &[2, 0]]);
        let s = spark(&f, &pol()).unwrap();
        assert_eq!(s.spark, 2);
        assert_eq!(s.dependent_subset, Some(vec![1, 3]));

        let with_zero = VectorFamily::from_i64_rows(2, &[&[1, 0], &[0, 0]]);
        assert_eq!(spark(&with_zero, &pol()).unwrap().spark, 1);

        let f = VectorFamily::from_i64_rows(2, &[&[1, 0], &[0, 1], &[1, 1]]);
        let s = spark(&f, &pol()).unwrap();
        assert_eq!(s.spark, 3);
        assert!(s.full_spark);

        // Independent family smaller than the dimension.
        let ind = VectorFamily::from_i64_rows(3, &[&[1, 0, 0], &[0, 1, 0]]);
        let s = spark(&ind, &pol()).unwrap();
        assert_eq!(s.spark, 3);
        assert!(!s.full_spark);
    }

    #[test]
    fn full_spark_examples() {
        let f = VectorFamily::from_i64_rows(2, &[&[1, 0], &[0, 1], &[1, 1]]);
        assert!(is_full_spark(&f, &pol()).unwrap().full_spark);

        // Six vectors in 3-space with e1, e2, e1+e2 dependent.
        let f = VectorFamily::from_i64_rows(
            3,
            &[
                &[1, 0, 0],
                &[0, 1, 0],
                &[0, 0, 1],
                &[1, 1, 0],
                &[1, 0, 1],
                &[0, 1, 1],
            ],
        );
        let out = is_full_spark(&f, &pol()).unwrap();
        assert!(!out.full_spark);
        assert_eq!(out.dependent_subset, Some(vec![1, 2, 4]));

        let short = VectorFamily::from_i64_rows(3, &[&[1, 0, 0]]);
        assert!(matches!(
            is_full_spark(&short, &pol()),
            Err(Error::TooFewVectors { .. })
        ));
    }

    #[test]
    fn spark_equals_full_spark_criterion() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..40 {
            let n = rng.gen_range(1usize..=3);
            let m = rng.gen_range(n..=n + 3);
            let rows: Vec<Vec<Q>> = (0..m)
                .map(|_| (0..n).map(|_| q_int(rng.gen_range(-2i64..=2))).collect())
                .collect();
            let f = VectorFamily::new_real(n, rows, Mode::Exact).unwrap();
            if f.has_zero_vector().is_some() {
                continue;
            }
            let s = spark(&f, &pol()).unwrap();
            let fs = is_full_spark(&f, &pol()).unwrap();
            assert_eq!(s.spark == n + 1, fs.full_spark);
            assert_eq!(s.full_spark, fs.full_spark);
        }
    }

    #[test]
    fn complement_property_examples() {
        let f = VectorFamily::from_i64_rows(2, &[&[1, 0], &[0, 1], &[1, 1]]);
        let out = check_complement_property(&f, &pol()).unwrap();
        assert!(out.holds);
        assert!(out.digest.checked > 0);

        // Five vectors in 3-space failing on the known partition.
        let f = VectorFamily::from_i64_rows(
            3,
            &[
                &[1, 1, 0],
                &[0, 1, 0],
                &[0, 0, 1],
                &[0, 1, 1],
                &[1, 0, 1],
            ],
        );
        let out = check_complement_property(&f, &pol()).unwrap();
        assert!(!out.holds);
        let w = out.witness.unwrap();
        // First failing representative: {e1+e2, e1+e3} vs {e2, e3, e2+e3}.
        assert_eq!(w.subset, vec![1, 5]);
        assert_eq!((w.dim_subset, w.dim_complement), (2, 2));
        assert_eq!(w.verdict, PartitionVerdict::BothDeficient);

        let f = VectorFamily::from_i64_rows(2, &[&[1, 0], &[0, 1]]);
        let out = check_complement_property(&f, &pol()).unwrap();
        assert!(!out.holds);
        assert_eq!(out.witness.unwrap().subset, vec![1]);
    }

    #[test]
    fn deficiency_examples() {
        let f = VectorFamily::from_i64_rows(2, &[&[1, 0], &[0, 1]]);
        let out = complement_deficiency(&f, &pol()).unwrap();
        assert_eq!(out.k, 1);
        assert_eq!(out.witness.subset, vec![1]);
        assert_eq!(out.witness.dim_complement, 1);

        let cp = VectorFamily::from_i64_rows(2, &[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(complement_deficiency(&cp, &pol()).unwrap().k, 0);

        let single = VectorFamily::from_i64_rows(1, &[&[1]]);
        assert_eq!(complement_deficiency(&single, &pol()).unwrap().k, 0);

        let not_frame = VectorFamily::from_i64_rows(2, &[&[1, 0]]);
        assert!(matches!(
            complement_deficiency(&not_frame, &pol()),
            Err(Error::NotAFrame)
        ));
    }

    #[test]
    fn deficiency_zero_iff_cp_holds() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let mut seen_both = (false, false);
        for _ in 0..500 {
            let n = rng.gen_range(2usize..=4);
            let m = rng.gen_range(n..=8);
            let rows: Vec<Vec<Q>> = (0..m)
                .map(|_| (0..n).map(|_| q_int(rng.gen_range(-2i64..=2))).collect())
                .collect();
            let f = VectorFamily::new_real(n, rows, Mode::Exact).unwrap();
            if f.rank() != n {
                continue;
            }
            let cp = check_complement_property(&f, &pol()).unwrap();
            let k = complement_deficiency(&f, &pol()).unwrap().k;
            assert_eq!(cp.holds, k == 0);
            if cp.holds {
                seen_both.0 = true;
            } else {
                seen_both.1 = true;
            }
        }
        assert!(seen_both.0 && seen_both.1, "sampler should hit both verdicts");
    }

    #[test]
    fn cp_monotone_under_added_vectors() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let n = 3;
            let m = rng.gen_range(3usize..=5);
            let rows: Vec<Vec<Q>> = (0..m)
                .map(|_| (0..n).map(|_| q_int(rng.gen_range(-2i64..=2))).collect())
                .collect();
            let f = VectorFamily::new_real(n, rows.clone(), Mode::Exact).unwrap();
            if f.rank() != n {
                continue;
            }
            let mut extended = rows;
            extended.push((0..n).map(|_| q_int(rng.gen_range(-2i64..=2))).collect());
            let g = VectorFamily::new_real(n, extended, Mode::Exact).unwrap();
            let (cf, cg) = (
                check_complement_property(&f, &pol()).unwrap().holds,
                check_complement_property(&g, &pol()).unwrap().holds,
            );
            if cf {
                assert!(cg, "adding a vector must preserve the complement property");
            }
            let (kf, kg) = (
                complement_deficiency(&f, &pol()).unwrap().k,
                complement_deficiency(&g, &pol()).unwrap().k,
            );
            assert!(kg <= kf, "adding a vector must not increase deficiency");
        }
    }

    #[test]
    fn hyperplane_scan_examples() {
        // Two basis vectors in 3-space: the (e1 | e2) partition has dims
        // (1, 1), far from hyperplanes.
        let f = VectorFamily::from_i64_rows(3, &[&[1, 0, 0], &[0, 1, 0]]);
        let scan = hyperplane_partition_scan(&f, &pol()).unwrap();
        assert!(!scan.all_hyperplanes);
        assert!(scan
            .partitions
            .iter()
            .any(|c| c.dim_subset == 1 && c.dim_complement == 1));
        assert!(cp_blocked_forever_vectors(&f, &pol()).unwrap());

        // A full-spark family of 2N-1 vectors has no non-spanning partition.
        let f = VectorFamily::from_i64_rows(2, &[&[1, 0], &[0, 1], &[1, 1]]);
        let scan = hyperplane_partition_scan(&f, &pol()).unwrap();
        assert!(scan.partitions.is_empty());
        assert!(scan.all_hyperplanes);
        assert!(!cp_blocked_forever_vectors(&f, &pol()).unwrap());
    }

    #[test]
    fn cp_at_minimal_size_implies_full_spark() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4242);
        let mut cp_count = 0;
        for _ in 0..200 {
            let n = rng.gen_range(2usize..=4);
            let rows: Vec<Vec<Q>> = (0..2 * n - 1)
                .map(|_| (0..n).map(|_| q_int(rng.gen_range(-3i64..=3))).collect())
                .collect();
            let f = match VectorFamily::new_real(n, rows, Mode::Exact) {
                Ok(f) => f,
                Err(_) => continue,
            };
            if f.has_zero_vector().is_some() {
                continue;
            }
            if check_complement_property(&f, &pol()).unwrap().holds {
                cp_count += 1;
                assert!(
                    is_full_spark(&f, &pol()).unwrap().full_spark,
                    "a (2N-1)-vector family with the complement property must be full spark"
                );
            }
        }
        assert!(cp_count > 50, "sampler should produce many property holders");
    }

    #[test]
    fn scan_guard_refuses_large_families() {
        let mut rows: Vec<Vec<Q>> = vec![vec![q_int(0), q_int(0)]];
        rows.extend((1..=SCAN_GUARD).map(|i| vec![q_int(i as i64), q_int(1)]));
        let f = VectorFamily::new_real(2, rows, Mode::Exact).unwrap();
        assert!(matches!(
            check_complement_property(&f, &pol()),
            Err(Error::ScanTooLarge { .. })
        ));
        assert!(matches!(spark(&f, &pol()), Err(Error::ScanTooLarge { .. })));
        // Forcing lifts the guard; the zero vector makes spark exit at once.
        let forced = ScanPolicy {
            force: true,
            ..ScanPolicy::default()
        };
        assert_eq!(spark(&f, &forced).unwrap().spark, 1);
    }

    #[test]
    fn complex_complement_property() {
        // {e1, i e1, e2} in C^2 fails: {1, 2} spans only a line, {3} too.
        let i = CQ::new(q_int(0), q_int(1));
        let one = CQ::one();
        let zero = CQ::zero();
        let f = VectorFamily::new_complex(
            2,
            vec![
                vec![one.clone(), zero.clone()],
                vec![i, zero.clone()],
                vec![zero.clone(), one.clone()],
            ],
            Mode::Exact,
        )
        .unwrap();
        let out = check_complement_property(&f, &pol()).unwrap();
        assert!(!out.holds);

        // A complex family of 3 = 2N-1 vectors with every pair independent.
        let f = VectorFamily::new_complex(
            2,
            vec![
                vec![CQ::new(q_int(1), q_int(1)), CQ::new(q_int(0), q_int(2))],
                vec![CQ::new(q_int(2), q_int(-1)), CQ::new(q_int(1), q_int(0))],
                vec![CQ::new(q_int(1), q_int(0)), CQ::new(q_int(1), q_int(-1))],
            ],
            Mode::Exact,
        )
        .unwrap();
        assert!(check_complement_property(&f, &pol()).unwrap().holds);
    }

    #[test]
    fn complex_float_ranks_match_exact_ranks() {
        // Tolerance-ranked complex decisions agree with the exact Gaussian
        // elimination on rational inputs, including a complex dependence
        // invisible over the reals.
        let i = |a: i64, b: i64| CQ::new(q_int(a), q_int(b));
        let f = VectorFamily::new_complex(
            2,
            vec![
                vec![i(1, 0), i(0, 1)],
                vec![i(0, 1), i(-1, 0)],
                vec![i(2, 1), i(0, 3)],
            ],
            Mode::Exact,
        )
        .unwrap();
        let float_policy = ScanPolicy {
            force: false,
            float_ranks: Some(ToleranceConfig::default()),
        };
        let exact = RankOracle::for_family(&f, &pol()).unwrap();
        let float = RankOracle::for_family(&f, &float_policy).unwrap();
        for mask in 1u64..8 {
            assert_eq!(exact.rank_mask(mask), float.rank_mask(mask), "mask {mask}");
        }
    }

    #[test]
    fn float_ranks_agree_with_exact_on_integer_inputs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let float_policy = ScanPolicy {
            force: false,
            float_ranks: Some(ToleranceConfig::default()),
        };
        for _ in 0..50 {
            let n = rng.gen_range(1usize..=4);
            let m = rng.gen_range(1usize..=5);
            let rows: Vec<Vec<Q>> = (0..m)
                .map(|_| {
                    (0..n)
                        .map(|_| q_int(rng.gen_range(-1000i64..=1000)))
                        .collect()
                })
                .collect();
            let f = VectorFamily::new_real(n, rows, Mode::Exact).unwrap();
            let exact = RankOracle::for_family(&f, &pol()).unwrap();
            let float = RankOracle::for_family(&f, &float_policy).unwrap();
            let full = (1u64 << m) - 1;
            assert_eq!(exact.rank_mask(full), float.rank_mask(full));
        }
    }
}
