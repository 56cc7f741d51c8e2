//! Phase retrieval and norm retrieval, by vectors and by subspaces (real
//! case). Vector decisions reduce to the complement property and are exact.
//! Subspace passes are budgeted (multistart residual searches); subspace
//! failures are certified by witnesses, exact ones whenever the failing
//! structure is rational.

use crate::cert::{Arithmetic, Decision, PrCertificate, WitnessPair, WVec};
use crate::error::{Error, Result};
use crate::fmat::{self, FMat};
use crate::frame::{Subspace, SubspaceFamily, VectorFamily};
use crate::qmat::{self, QMat};
use crate::random::{random_unit_vector, rng_from_seed};
use crate::scalar::{q_from_f64, q_to_f64, Q};
use crate::spark::{
    check_complement_property, hyperplane_partition_scan, subset_perp, HyperplaneScan,
    ScanPolicy,
};
use crate::tol::{Mode, ToleranceConfig};
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

/// Multistart search budget for the subspace deciders.
#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub starts: usize,
    pub seed: u64,
    pub max_iters: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            starts: 200,
            seed: 0,
            max_iters: 80,
        }
    }
}

/// Real phase retrieval for vector families: exactly the complement
/// property. FAIL certificates carry a pair (x, y) with equal measurement
/// magnitudes and x != +-y, built from the failing partition and verified in
/// rational arithmetic.
pub fn pr_vectors_real(f: &VectorFamily, policy: &ScanPolicy) -> Result<PrCertificate> {
    f.real_rows()?;
    let cp = check_complement_property(f, policy)?;
    if cp.holds {
        return Ok(PrCertificate::pass_exact(cp.arithmetic));
    }
    let partition = cp.witness.expect("failing scan carries a partition");
    let witness = match policy.float_ranks {
        None => {
            let rows = f.decision_matrix()?.to_row_vecs();
            let (u, v) = exact_perp_pair(&rows, f.ambient(), partition.mask());
            debug_assert!(verify_phase_pair_exact(&rows, &u, &v));
            Some(exact_pair(&u, &v, PairGoal::Phase))
        }
        Some(t) => float_pair_from_partition(&f.to_fmat()?, partition.mask(), &t),
    };
    Ok(PrCertificate {
        decision: Decision::Fail,
        arithmetic: cp.arithmetic,
        partition: Some(partition),
        witness,
        search_budget: None,
        min_residual: None,
        note: None,
    })
}

/// First null directions of a partition's two sides, exact. Both sides are
/// rank-deficient by construction of the failing partition.
fn exact_perp_pair(rows: &[Vec<Q>], ambient: usize, mask: u64) -> (Vec<Q>, Vec<Q>) {
    let full = full_mask(rows.len());
    let u = subset_perp(rows, ambient, mask)
        .into_iter()
        .next()
        .expect("deficient side has a nonzero perp");
    let v = subset_perp(rows, ambient, full & !mask)
        .into_iter()
        .next()
        .expect("deficient side has a nonzero perp");
    (u, v)
}

/// Tolerance-mode witness: polarize float null directions of the two sides
/// and keep the pair only if the measurements verify within witness_tol.
fn float_pair_from_partition(
    rows: &FMat,
    mask: u64,
    tol: &ToleranceConfig,
) -> Option<WitnessPair> {
    let m = rows.nrows();
    let side = |selector: bool| -> Vec<Vec<f64>> {
        (0..m)
            .filter(|i| (mask >> i & 1 == 1) == selector)
            .map(|i| rows.row(i).to_vec())
            .collect()
    };
    let null_of = |sel: Vec<Vec<f64>>| -> Option<Vec<f64>> {
        if sel.is_empty() {
            let mut e = vec![0.0; rows.ncols()];
            if e.is_empty() {
                return None;
            }
            e[0] = 1.0;
            return Some(e);
        }
        FMat::from_rows(sel).null_space(tol).into_iter().next()
    };
    let u = null_of(side(true))?;
    let v = null_of(side(false))?;
    let x: Vec<f64> = u.iter().zip(&v).map(|(a, b)| (a + b) / 2.0).collect();
    let y: Vec<f64> = u.iter().zip(&v).map(|(a, b)| (a - b) / 2.0).collect();
    let residual = (0..m)
        .map(|i| {
            let r = rows.row(i);
            (fmat::dot(r, &x).abs() - fmat::dot(r, &y).abs()).abs()
        })
        .fold(0.0f64, f64::max);
    let separation = fmat::norm(&u).min(fmat::norm(&v));
    (residual <= tol.witness_tol && separation > tol.witness_tol).then_some(WitnessPair {
        x: WVec::Float(x),
        y: WVec::Float(y),
        u: WVec::Float(u),
        v: WVec::Float(v),
        measurement_residual: residual,
        separation,
    })
}

/// Complex families: the complement property is necessary but not
/// sufficient, so the verdict is FAIL (exact) or inconclusive.
pub fn pr_vectors_complex_necessary(
    f: &VectorFamily,
    policy: &ScanPolicy,
) -> Result<PrCertificate> {
    let cp = check_complement_property(f, policy)?;
    Ok(if cp.holds {
        PrCertificate {
            decision: Decision::Inconclusive,
            arithmetic: cp.arithmetic,
            partition: None,
            witness: None,
            search_budget: None,
            min_residual: None,
            note: Some(
                "necessary condition passed; complex sufficiency is not decided".into(),
            ),
        }
    } else {
        PrCertificate {
            decision: Decision::Fail,
            arithmetic: cp.arithmetic,
            partition: cp.witness,
            witness: None,
            search_budget: None,
            min_residual: None,
            note: Some("complement property fails, so phase retrieval fails".into()),
        }
    })
}

/// Real norm retrieval for vector families. Criterion (derived from the
/// polarization identity, validated against brute-force witness search):
/// the property holds iff for every partition (I, I^c) the orthogonal
/// complements of the two spans are mutually orthogonal. A failing pair of
/// complement vectors u, v with <u, v> != 0 polarizes into a witness with
/// equal measurements and different norms.
pub fn norm_retrieval_vectors_real(
    f: &VectorFamily,
    policy: &ScanPolicy,
) -> Result<PrCertificate> {
    let rows = f.metric_matrix()?.to_row_vecs();
    nr_exact_rows(&rows, f.ambient(), None, policy)
}

/// Norm retrieval over explicit rows with an optional diagonal metric
/// (used for decisions inside a subspace in orthogonal coordinates).
pub(crate) fn nr_exact_rows(
    rows: &[Vec<Q>],
    ambient: usize,
    metric: Option<&[Q]>,
    policy: &ScanPolicy,
) -> Result<PrCertificate> {
    let m = rows.len();
    if m > crate::spark::SCAN_GUARD && !policy.force {
        return Err(Error::ScanTooLarge {
            m,
            guard: crate::spark::SCAN_GUARD,
        });
    }
    let weighted: Vec<Vec<Q>> = rows
        .iter()
        .map(|r| match metric {
            None => r.clone(),
            Some(g) => r.iter().zip(g).map(|(x, w)| x * w).collect(),
        })
        .collect();
    let g_dot = |a: &[Q], b: &[Q]| -> Q {
        match metric {
            None => qmat::dot(a, b),
            Some(g) => a
                .iter()
                .zip(b)
                .zip(g)
                .map(|((x, y), w)| x * y * w)
                .sum(),
        }
    };
    let full = full_mask(m);
    // Representative partitions: subset side contains index 1 (every
    // partition once); for the empty family the single partition is
    // (empty, empty).
    let reps: Vec<u64> = if m == 0 {
        vec![0]
    } else {
        (1..=m)
            .flat_map(|s| {
                crate::spark::masks_of_size(m - 1, s - 1)
                    .into_iter()
                    .map(|g| (g << 1) | 1)
            })
            .collect()
    };
    for mask in reps {
        let a = subset_perp(&weighted, ambient, mask);
        if a.is_empty() {
            continue;
        }
        let b = subset_perp(&weighted, ambient, full & !mask);
        for u in &a {
            for v in &b {
                let inner = g_dot(u, v);
                if !inner.is_zero() {
                    let pair = exact_pair(u, v, PairGoal::Norm(q_to_f64(&inner)));
                    return Ok(PrCertificate {
                        decision: Decision::Fail,
                        arithmetic: Arithmetic::Exact,
                        partition: None,
                        witness: Some(pair),
                        search_budget: None,
                        min_residual: None,
                        note: None,
                    });
                }
            }
        }
    }
    Ok(PrCertificate::pass_exact(Arithmetic::Exact))
}

enum PairGoal {
    Phase,
    /// Carries <u, v>, the norm-square gap of the polarized pair.
    Norm(f64),
}

fn exact_pair(u: &[Q], v: &[Q], goal: PairGoal) -> WitnessPair {
    let half = Q::new(1.into(), 2.into());
    let x: Vec<Q> = u.iter().zip(v).map(|(a, b)| (a + b) * &half).collect();
    let y: Vec<Q> = u.iter().zip(v).map(|(a, b)| (a - b) * &half).collect();
    let separation = match goal {
        PairGoal::Phase => {
            let nu = q_to_f64(&qmat::norm_sq(u)).sqrt();
            let nv = q_to_f64(&qmat::norm_sq(v)).sqrt();
            nu.min(nv)
        }
        PairGoal::Norm(gap) => gap.abs(),
    };
    WitnessPair {
        x: WVec::Exact(x),
        y: WVec::Exact(y),
        u: WVec::Exact(u.to_vec()),
        v: WVec::Exact(v.to_vec()),
        measurement_residual: 0.0,
        separation,
    }
}

fn verify_phase_pair_exact(rows: &[Vec<Q>], u: &[Q], v: &[Q]) -> bool {
    rows.iter()
        .all(|r| (qmat::dot(r, u) * qmat::dot(r, v)).is_zero())
        && !u.iter().all(Q::is_zero)
        && !v.iter().all(Q::is_zero)
}

fn full_mask(m: usize) -> u64 {
    if m >= 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

/// Basis selection for the orthonormal-basis union of a subspace family.
#[derive(Debug, Clone, Copy)]
pub enum BasisChoice {
    /// The stored bases: exact orthogonal rows scaled by rational
    /// approximations of the reciprocal norms, so every vector is an exact
    /// rational multiple of an exact direction and unit-length to within
    /// rounding. Scale-invariant decisions on the union are exact.
    Stored,
    /// Rotate each stored basis by a seeded random orthogonal map.
    Randomized(u64),
}

/// Concatenated orthonormal bases of the subspaces, with the provenance map
/// (subspace index, basis index) for each flat row, both 0-based.
pub fn onb_union(
    sf: &SubspaceFamily,
    choice: BasisChoice,
) -> Result<(VectorFamily, Vec<(usize, usize)>)> {
    let n = sf.ambient();
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut map = Vec::new();
    match choice {
        BasisChoice::Stored => {
            for (i, w) in sf.iter().enumerate() {
                for (j, (u, nsq)) in w.ortho_rows().iter().zip(w.sq_norms()).enumerate() {
                    let c = q_from_f64(1.0 / q_to_f64(nsq).sqrt());
                    rows.push(u.iter().map(|q| q * &c).collect());
                    map.push((i, j));
                }
            }
        }
        BasisChoice::Randomized(seed) => {
            let mut rng = rng_from_seed(seed);
            for (i, w) in sf.iter().enumerate() {
                let d = w.dim();
                if d == 0 {
                    continue;
                }
                let gauss: Vec<Vec<f64>> = (0..d)
                    .map(|_| (0..d).map(|_| crate::random::standard_normal(&mut rng)).collect())
                    .collect();
                let rot = fmat::mgs_rows(&gauss, 1e-9);
                assert_eq!(rot.nrows(), d, "random rotation should be full rank");
                let rotated = rot.mul(w.onb());
                for j in 0..d {
                    rows.push(rotated.row(j).iter().map(|&x| q_from_f64(x)).collect());
                    map.push((i, j));
                }
            }
        }
    }
    let family = VectorFamily::new_real(n, rows, Mode::Float)?;
    Ok((family, map))
}

/// Apply an invertible operator to every vector of a family.
pub fn apply_invertible_vectors(f: &VectorFamily, t: &QMat) -> Result<VectorFamily> {
    let rows = f.real_rows()?;
    let n = f.ambient();
    if t.nrows() != n || t.ncols() != n {
        return Err(Error::DimensionMismatch(
            "operator must be square in the ambient dimension".into(),
        ));
    }
    if t.rank() != n {
        return Err(Error::SingularOperator);
    }
    let new_rows: Vec<Vec<Q>> = rows.iter().map(|r| t.mul_vec(r)).collect();
    VectorFamily::new_real(n, new_rows, f.mode())
}

/// {P phi_i} expressed in coordinates of range(P). The stored entries are
/// the floating isometric coordinates; the exact (non-isometric) orthogonal
/// coordinates ride along as decision representatives, so spark and
/// complement-property verdicts on the projected family remain exact.
pub fn project_family(f: &VectorFamily, p: &Subspace) -> Result<VectorFamily> {
    let rows = f.real_rows()?;
    if p.ambient() != f.ambient() {
        return Err(Error::DimensionMismatch(
            "projection ambient dimension must match the family".into(),
        ));
    }
    let d = p.dim();
    let mut coord_rows: Vec<Vec<Q>> = Vec::with_capacity(rows.len());
    let mut float_rows: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    let scale: Vec<f64> = p.sq_norms().iter().map(|q| q_to_f64(q).sqrt()).collect();
    for r in rows {
        let pr = p.project(r);
        let c = p.coords(&pr);
        float_rows.push(
            c.iter()
                .zip(&scale)
                .map(|(q, s)| q_to_f64(q) * s)
                .collect(),
        );
        coord_rows.push(c);
    }
    let out = VectorFamily::from_f64_rows(d, float_rows)?;
    Ok(out.with_decision_rows(coord_rows, false))
}

/// Three-way case split of the equimodular-basis construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquimodularCase {
    /// Px and Py are proportional with unimodular ratio: any basis works.
    ProportionalProjections,
    /// <Px, Py> = 0: directions Px + Py and Px - Py.
    OrthogonalProjections,
    /// General position: rotate Py by the sign of <Px, Py> first.
    General,
}

/// Orthonormal basis {phi_j} of the subspace with |<x, phi_j>| = |<y, phi_j>|
/// for all j, given equal projection norms. Rows of the result are the basis.
pub fn equimodular_onb(
    w: &Subspace,
    x: &[f64],
    y: &[f64],
    tol: &ToleranceConfig,
) -> Result<(FMat, EquimodularCase)> {
    let px = w.project_f64(x);
    let py = w.project_f64(y);
    let nx = fmat::norm(&px);
    let ny = fmat::norm(&py);
    if (nx - ny).abs() > tol.witness_tol * nx.max(ny).max(1.0) {
        return Err(Error::NormsDiffer);
    }
    let scale = nx.max(ny);
    // Degenerate or proportional projections: the stored basis already works.
    if scale <= tol.witness_tol {
        return Ok((w.onb().clone(), EquimodularCase::ProportionalProjections));
    }
    let diff: f64 = px.iter().zip(&py).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let sum: f64 = px.iter().zip(&py).map(|(a, b)| (a + b) * (a + b)).sum::<f64>().sqrt();
    if diff <= tol.witness_tol * scale || sum <= tol.witness_tol * scale {
        return Ok((w.onb().clone(), EquimodularCase::ProportionalProjections));
    }
    let inner = fmat::dot(&px, &py);
    let (case, d) = if inner.abs() <= tol.witness_tol * scale * scale {
        (EquimodularCase::OrthogonalProjections, 0.0)
    } else {
        (EquimodularCase::General, inner.signum())
    };
    let rotated: Vec<f64> = if case == EquimodularCase::OrthogonalProjections {
        py.clone()
    } else {
        py.iter().map(|v| d * v).collect()
    };
    let phi1: Vec<f64> = px.iter().zip(&rotated).map(|(a, b)| a + b).collect();
    let phi2: Vec<f64> = px.iter().zip(&rotated).map(|(a, b)| a - b).collect();
    let mut basis = vec![fmat::normalize(&phi1), fmat::normalize(&phi2)];
    // Complete within W with vectors orthogonal to span{Px, Py}.
    for j in 0..w.dim() {
        if basis.len() == w.dim() {
            break;
        }
        let mut cand = w.onb().row(j).to_vec();
        for _pass in 0..2 {
            for b in &basis {
                let c = fmat::dot(&cand, b);
                fmat::axpy(&mut cand, -c, b);
            }
        }
        let norm = fmat::norm(&cand);
        if norm > 1e-8 {
            basis.push(cand.iter().map(|v| v / norm).collect());
        }
    }
    debug_assert_eq!(basis.len(), w.dim());
    Ok((FMat::from_rows(basis), case))
}

/// Structured exact candidates for a direction that breaks a subspace
/// decision: complements of single subspaces and of spans of subspace
/// subsets. These catch every failure whose degeneracy is rational.
fn exact_candidates(sf: &SubspaceFamily, policy: &ScanPolicy) -> Result<Vec<Vec<Q>>> {
    let m = sf.len();
    let n = sf.ambient();
    if m > crate::spark::SCAN_GUARD && !policy.force {
        return Err(Error::ScanTooLarge {
            m,
            guard: crate::spark::SCAN_GUARD,
        });
    }
    let mut out: Vec<Vec<Q>> = Vec::new();
    // Standard basis directions.
    for i in 0..n {
        let mut e = vec![Q::zero(); n];
        e[i] = crate::scalar::q_one();
        out.push(e);
    }
    // Null directions of spans of subspace subsets (singletons first).
    for mask in 1u64..full_mask(m) + 1 {
        let mut stacked: Vec<Vec<Q>> = Vec::new();
        for (i, w) in sf.iter().enumerate() {
            if mask >> i & 1 == 1 {
                stacked.extend(w.ortho_rows().iter().cloned());
            }
        }
        if stacked.is_empty() {
            continue;
        }
        let mat = QMat::from_rows(stacked);
        if mat.rank() < n {
            out.extend(mat.null_space());
        }
    }
    out.dedup();
    Ok(out)
}

fn k_rows_exact(sf: &SubspaceFamily, u: &[Q]) -> Vec<Vec<Q>> {
    sf.iter().map(|w| w.projector().mul_vec(u)).collect()
}

/// Decide phase retrieval by subspaces (real). Stage (a): the union of the
/// stored orthonormal bases must pass the complement property (necessary);
/// failures there are exact. Stage (b): structured exact candidates for a
/// direction u with span{P_i u} deficient. Stage (c): multistart
/// minimization of sigma_min([P_1 u | ... | P_M u]) over the unit sphere;
/// passes are budgeted, failures verified.
pub fn pr_subspaces_real(
    sf: &SubspaceFamily,
    cfg: &SearchConfig,
    tol: &ToleranceConfig,
    policy: &ScanPolicy,
) -> Result<PrCertificate> {
    let n = sf.ambient();
    if n == 0 {
        return Ok(PrCertificate::pass_exact(Arithmetic::Exact));
    }
    let (union, map) = onb_union(sf, BasisChoice::Stored)?;
    let cp = check_complement_property(&union, policy)?;
    if !cp.holds {
        let partition = cp.witness.expect("failing scan carries a partition");
        let (witness, arithmetic) = match policy.float_ranks {
            None => {
                let rows = union.decision_matrix()?.to_row_vecs();
                let (u, v) = exact_perp_pair(&rows, n, partition.mask());
                debug_assert!(verify_subspace_phase_pair_exact(sf, &u, &v));
                (Some(exact_pair(&u, &v, PairGoal::Phase)), Arithmetic::Exact)
            }
            Some(t) => (
                float_pair_from_partition(&union.to_fmat()?, partition.mask(), &t),
                Arithmetic::Float,
            ),
        };
        return Ok(PrCertificate {
            decision: Decision::Fail,
            arithmetic,
            partition: Some(partition),
            witness,
            search_budget: None,
            min_residual: None,
            note: Some(format!(
                "partition indexes the orthonormal-basis union; row -> (subspace, basis vector): {:?}",
                map.iter().map(|&(i, j)| (i + 1, j + 1)).collect::<Vec<_>>()
            )),
        });
    }
    // Stage (b): exact candidates.
    for u in exact_candidates(sf, policy)? {
        let k = k_rows_exact(sf, &u);
        let kmat = QMat::from_rows(k);
        if kmat.rank() < n {
            let v = kmat
                .null_space()
                .into_iter()
                .next()
                .expect("rank-deficient stack has a null direction");
            debug_assert!(verify_subspace_phase_pair_exact(sf, &u, &v));
            let pair = exact_pair(&u, &v, PairGoal::Phase);
            return Ok(PrCertificate {
                decision: Decision::Fail,
                arithmetic: Arithmetic::Exact,
                partition: None,
                witness: Some(pair),
                search_budget: None,
                min_residual: None,
                note: Some("failing direction found among rational candidates".into()),
            });
        }
    }
    // Stage (c): multistart floating search.
    let projs: Vec<FMat> = sf.iter().map(|w| w.projector_f64()).collect();
    let starts = collect_starts(sf, &union, cfg, n);
    let budget = starts.len();
    // Parallel over starts; the reduction keys on (residual, start index),
    // so the result is deterministic for any worker count.
    let best = starts
        .into_par_iter()
        .enumerate()
        .map(|(idx, s)| {
            let (res, u, w) = minimize_sigma_min(&projs, n, s, cfg.max_iters);
            (res, idx, u, w)
        })
        .min_by(|a, b| {
            (a.0, a.1)
                .partial_cmp(&(b.0, b.1))
                .expect("residuals are finite")
        });
    let (res, _, u, w) = best.expect("at least one start");
    if res <= tol.witness_tol {
        let x: Vec<f64> = u.iter().zip(&w).map(|(a, b)| (a + b) / 2.0).collect();
        let y: Vec<f64> = u.iter().zip(&w).map(|(a, b)| (a - b) / 2.0).collect();
        let meas = projs
            .iter()
            .map(|p| {
                let px = p.mul_vec(&x);
                let py = p.mul_vec(&y);
                (fmat::dot(&px, &x) - fmat::dot(&py, &y)).abs()
            })
            .fold(0.0f64, f64::max);
        if meas <= tol.witness_tol {
            return Ok(PrCertificate {
                decision: Decision::Fail,
                arithmetic: Arithmetic::Float,
                partition: None,
                witness: Some(WitnessPair {
                    x: WVec::Float(x),
                    y: WVec::Float(y),
                    u: WVec::Float(u),
                    v: WVec::Float(w),
                    measurement_residual: meas,
                    separation: 1.0,
                }),
                search_budget: Some(budget),
                min_residual: Some(res),
                note: None,
            });
        }
    }
    if res <= 10.0 * tol.witness_tol {
        return Ok(PrCertificate {
            decision: Decision::Inconclusive,
            arithmetic: Arithmetic::Float,
            partition: None,
            witness: None,
            search_budget: Some(budget),
            min_residual: Some(res),
            note: Some("search residual in the indeterminate band".into()),
        });
    }
    Ok(PrCertificate {
        decision: Decision::PassBudgeted,
        arithmetic: Arithmetic::Float,
        partition: None,
        witness: None,
        search_budget: Some(budget),
        min_residual: Some(res),
        note: None,
    })
}

fn verify_subspace_phase_pair_exact(sf: &SubspaceFamily, u: &[Q], v: &[Q]) -> bool {
    if u.iter().all(Q::is_zero) || v.iter().all(Q::is_zero) {
        return false;
    }
    let half = Q::new(1.into(), 2.into());
    let x: Vec<Q> = u.iter().zip(v).map(|(a, b)| (a + b) * &half).collect();
    let y: Vec<Q> = u.iter().zip(v).map(|(a, b)| (a - b) * &half).collect();
    sf.iter().all(|w| {
        let p = w.projector();
        qmat::dot(&p.mul_vec(&x), &x) == qmat::dot(&p.mul_vec(&y), &y)
    })
}

fn collect_starts(
    sf: &SubspaceFamily,
    union: &VectorFamily,
    cfg: &SearchConfig,
    n: usize,
) -> Vec<Vec<f64>> {
    let mut starts: Vec<Vec<f64>> = Vec::new();
    if let Ok(fm) = union.to_fmat() {
        for i in 0..fm.nrows() {
            let r = fm.row(i);
            let norm = fmat::norm(r);
            if norm > 1e-12 {
                starts.push(r.iter().map(|x| x / norm).collect());
            }
        }
    }
    for w in sf.iter() {
        for pb in w.perp_basis() {
            let r: Vec<f64> = pb.iter().map(q_to_f64).collect();
            let norm = fmat::norm(&r);
            if norm > 1e-12 {
                starts.push(r.iter().map(|x| x / norm).collect());
            }
        }
    }
    let mut rng = rng_from_seed(cfg.seed);
    for _ in 0..cfg.starts {
        starts.push(random_unit_vector(&mut rng, n));
    }
    if starts.is_empty() {
        // Zero-budget searches still need one probe.
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        starts.push(e);
    }
    starts
}

/// Alternating minimization of g(u, w) = sum_i <w, P_i u>^2 over unit u, w:
/// each half-step is the smallest eigenvector of the symmetric matrix
/// K(v) K(v)^T built at the other point. Returns (sigma_min at u, u, w).
fn minimize_sigma_min(
    projs: &[FMat],
    n: usize,
    u0: Vec<f64>,
    max_iters: usize,
) -> (f64, Vec<f64>, Vec<f64>) {
    let kkt = |v: &[f64]| -> FMat {
        let mut m = FMat::zeros(n, n);
        for p in projs {
            let pv = p.mul_vec(v);
            for i in 0..n {
                if pv[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    m[(i, j)] += pv[i] * pv[j];
                }
            }
        }
        m
    };
    let mut u = fmat::normalize(&u0);
    let mut w = {
        let (_, vecs) = fmat::sym_eig(&kkt(&u));
        vecs.col(0)
    };
    let mut last = f64::INFINITY;
    for _ in 0..max_iters {
        let (vals_u, vecs_u) = fmat::sym_eig(&kkt(&w));
        u = vecs_u.col(0);
        let g1 = vals_u[0];
        let (vals_w, vecs_w) = fmat::sym_eig(&kkt(&u));
        w = vecs_w.col(0);
        let g2 = vals_w[0];
        let g = g1.min(g2);
        if (last - g).abs() <= 1e-18 {
            break;
        }
        last = g;
    }
    let (vals, vecs) = fmat::sym_eig(&kkt(&u));
    let w_final = vecs.col(0);
    (vals[0].max(0.0).sqrt(), u, w_final)
}

/// Norm retrieval by subspaces (real): fails iff some u lies outside
/// span{P_i u}. Exact rational candidates first, then a multistart ascent
/// on the relative residual ||(I - Q_u) u|| / ||u||.
pub fn norm_retrieval_subspaces_real(
    sf: &SubspaceFamily,
    cfg: &SearchConfig,
    tol: &ToleranceConfig,
    policy: &ScanPolicy,
) -> Result<PrCertificate> {
    let n = sf.ambient();
    if n == 0 {
        return Ok(PrCertificate::pass_exact(Arithmetic::Exact));
    }
    for u in exact_candidates(sf, policy)? {
        let k = k_rows_exact(sf, &u);
        let proj = qmat::projector_onto_rows(&k, n);
        let pu = proj.mul_vec(&u);
        let v: Vec<Q> = u.iter().zip(&pu).map(|(a, b)| a - b).collect();
        if !v.iter().all(Q::is_zero) {
            let gap = q_to_f64(&qmat::dot(&u, &v));
            let pair = exact_pair(&u, &v, PairGoal::Norm(gap));
            debug_assert!(verify_subspace_norm_pair_exact(sf, &u, &v));
            return Ok(PrCertificate {
                decision: Decision::Fail,
                arithmetic: Arithmetic::Exact,
                partition: None,
                witness: Some(pair),
                search_budget: None,
                min_residual: None,
                note: Some("direction escaping its projection span found exactly".into()),
            });
        }
    }
    let projs: Vec<FMat> = sf.iter().map(|w| w.projector_f64()).collect();
    let (union, _) = onb_union(sf, BasisChoice::Stored)?;
    let starts = collect_starts(sf, &union, cfg, n);
    let budget = starts.len();
    // Parallel ascent over starts, deterministic by (residual, start index).
    let best = starts
        .into_par_iter()
        .enumerate()
        .map(|(idx, s)| {
            let (h, u, r) = maximize_escape(&projs, s, cfg.max_iters);
            (h, idx, u, r)
        })
        .max_by(|a, b| {
            (a.0, std::cmp::Reverse(a.1))
                .partial_cmp(&(b.0, std::cmp::Reverse(b.1)))
                .expect("residuals are finite")
        });
    let (h, _, u, r) = best.expect("at least one start");
    if h > 10.0 * tol.witness_tol {
        let v = fmat::normalize(&r);
        let x: Vec<f64> = u.iter().zip(&v).map(|(a, b)| (a + b) / 2.0).collect();
        let y: Vec<f64> = u.iter().zip(&v).map(|(a, b)| (a - b) / 2.0).collect();
        let meas = projs
            .iter()
            .map(|p| {
                let px = p.mul_vec(&x);
                let py = p.mul_vec(&y);
                (fmat::dot(&px, &x) - fmat::dot(&py, &y)).abs()
            })
            .fold(0.0f64, f64::max);
        if meas <= tol.witness_tol {
            return Ok(PrCertificate {
                decision: Decision::Fail,
                arithmetic: Arithmetic::Float,
                partition: None,
                witness: Some(WitnessPair {
                    x: WVec::Float(x),
                    y: WVec::Float(y),
                    u: WVec::Float(u),
                    v: WVec::Float(v),
                    measurement_residual: meas,
                    separation: h,
                }),
                search_budget: Some(budget),
                min_residual: Some(h),
                note: None,
            });
        }
    }
    if h > tol.witness_tol {
        return Ok(PrCertificate {
            decision: Decision::Inconclusive,
            arithmetic: Arithmetic::Float,
            partition: None,
            witness: None,
            search_budget: Some(budget),
            min_residual: Some(h),
            note: Some("escape residual in the indeterminate band".into()),
        });
    }
    Ok(PrCertificate {
        decision: Decision::PassBudgeted,
        arithmetic: Arithmetic::Float,
        partition: None,
        witness: None,
        search_budget: Some(budget),
        min_residual: Some(h),
        note: None,
    })
}

fn verify_subspace_norm_pair_exact(sf: &SubspaceFamily, u: &[Q], v: &[Q]) -> bool {
    let half = Q::new(1.into(), 2.into());
    let x: Vec<Q> = u.iter().zip(v).map(|(a, b)| (a + b) * &half).collect();
    let y: Vec<Q> = u.iter().zip(v).map(|(a, b)| (a - b) * &half).collect();
    let measurements_agree = sf.iter().all(|w| {
        let p = w.projector();
        qmat::dot(&p.mul_vec(&x), &x) == qmat::dot(&p.mul_vec(&y), &y)
    });
    let norms_differ = qmat::norm_sq(&x) != qmat::norm_sq(&y);
    measurements_agree && norms_differ
}

/// Escape residual h(u) = ||(I - Q_u) u|| for unit u, where Q_u projects
/// onto span{P_i u}; simple hill climb along the escape direction.
fn maximize_escape(projs: &[FMat], u0: Vec<f64>, max_iters: usize) -> (f64, Vec<f64>, Vec<f64>) {
    let escape = |u: &[f64]| -> (f64, Vec<f64>) {
        let k_rows: Vec<Vec<f64>> = projs.iter().map(|p| p.mul_vec(u)).collect();
        let basis = fmat::mgs_rows(&k_rows, 1e-12);
        let mut r = u.to_vec();
        for i in 0..basis.nrows() {
            let b = basis.row(i);
            let c = fmat::dot(&r, b);
            fmat::axpy(&mut r, -c, b);
        }
        (fmat::norm(&r), r)
    };
    let mut u = fmat::normalize(&u0);
    let (mut h, mut r) = escape(&u);
    for _ in 0..max_iters {
        if h <= 1e-16 {
            break;
        }
        let mut improved = false;
        for step in [1.0, 0.5, 0.25, 0.1] {
            let cand: Vec<f64> = fmat::normalize(
                &u.iter()
                    .zip(&r)
                    .map(|(a, b)| a + step * b)
                    .collect::<Vec<f64>>(),
            );
            let (hc, rc) = escape(&cand);
            if hc > h + 1e-14 {
                u = cand;
                h = hc;
                r = rc;
                improved = true;
                break;
            }
        }
        if !improved {
            break;
        }
    }
    (h, u, r)
}

/// Premise-checked reduction: per-subspace families that retrieve norms
/// within their subspaces flatten to a family whose phase retrieval decides
/// the subspace family's.
#[derive(Debug, Clone, Serialize)]
pub struct SpanningCheckOutcome {
    pub pass: bool,
    /// 1-based indices of subspaces whose selection fails norm retrieval
    /// within the subspace.
    pub premise_failures: Vec<usize>,
    pub flattened: PrCertificate,
}

pub fn norm_retrieval_spanning_check(
    sf: &SubspaceFamily,
    selections: &[VectorFamily],
    policy: &ScanPolicy,
) -> Result<SpanningCheckOutcome> {
    if selections.len() != sf.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} selections for {} subspaces",
            selections.len(),
            sf.len()
        )));
    }
    let mut premise_failures = Vec::new();
    let mut flat_rows: Vec<Vec<Q>> = Vec::new();
    for (i, (w, sel)) in sf.iter().zip(selections).enumerate() {
        let rows = sel.real_rows()?;
        if sel.ambient() != sf.ambient() {
            return Err(Error::DimensionMismatch(
                "selection vectors must live in the ambient space".into(),
            ));
        }
        let mut coord_rows = Vec::new();
        for (j, r) in rows.iter().enumerate() {
            if !w.contains(r) {
                return Err(Error::VectorsOutsideSubspace {
                    subspace: i + 1,
                    vector: j + 1,
                });
            }
            coord_rows.push(w.coords(r));
            flat_rows.push(r.clone());
        }
        let nr = nr_exact_rows(&coord_rows, w.dim(), Some(w.sq_norms()), policy)?;
        if nr.decision != Decision::PassExact {
            premise_failures.push(i + 1);
        }
    }
    let flattened_family =
        VectorFamily::new_real(sf.ambient(), flat_rows, Mode::Exact)?;
    let flattened = pr_vectors_real(&flattened_family, policy)?;
    let pass = premise_failures.is_empty() && flattened.decision.is_pass();
    Ok(SpanningCheckOutcome {
        pass,
        premise_failures,
        flattened,
    })
}

/// Hyperplane scan of the orthonormal-basis union of a subspace family.
pub fn hyperplane_scan_subspaces(
    sf: &SubspaceFamily,
    policy: &ScanPolicy,
) -> Result<HyperplaneScan> {
    let (union, _) = onb_union(sf, BasisChoice::Stored)?;
    hyperplane_partition_scan(&union, policy)
}

/// True iff some non-spanning partition of the union has a side of
/// dimension at most N-2: then no single added subspace can repair phase
/// retrieval.
pub fn cp_blocked_forever_subspaces(sf: &SubspaceFamily, policy: &ScanPolicy) -> Result<bool> {
    let scan = hyperplane_scan_subspaces(sf, policy)?;
    Ok(scan
        .partitions
        .iter()
        .any(|c| c.min_dim() + 2 <= sf.ambient()))
}

/// Which reconstruction branch the six-subspace demo used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DemoBranch {
    TwoCoordsZero,
    FirstCoordZero,
    General,
}

/// Forward map of the demo: projection norms of x onto the six subspaces.
pub fn demo_projection_norms(x: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), 3);
    crate::fixtures::six_subspace_family()
        .iter()
        .map(|w| fmat::norm(&w.project_f64(x)))
        .collect()
}

/// Reconstruct a vector of R^3, up to global sign, from its six projection
/// norms onto the demo subspaces. The six values must be realizable; the
/// result is cross-checked through the forward map.
pub fn reconstruct_from_demo_norms(
    norms: &[f64],
    tol: &ToleranceConfig,
) -> Result<(Vec<f64>, DemoBranch)> {
    if norms.len() != 6 {
        return Err(Error::UnrealizableNorms("expected six values".into()));
    }
    if norms.iter().any(|&v| !v.is_finite() || v < 0.0) {
        return Err(Error::UnrealizableNorms(
            "norms must be finite and nonnegative".into(),
        ));
    }
    let scale = norms.iter().fold(0.0f64, |m, &v| m.max(v)).max(1.0);
    let eps = tol.witness_tol * scale;
    let (n1, n2, n3, n4, n5, n6) = (norms[0], norms[1], norms[2], norms[3], norms[4], norms[5]);
    let a1_sq = n1 * n1 - n2 * n2;
    if a1_sq < -eps * scale {
        return Err(Error::UnrealizableNorms(
            "first projection norm must dominate the second".into(),
        ));
    }
    let a1 = a1_sq.max(0.0).sqrt();
    let (x_hat, branch) = if [a1, n2, n3].iter().filter(|&&v| v <= eps).count() >= 2 {
        // At most one coordinate magnitude is nonzero.
        let coords = [a1, n2, n3];
        let i = (0..3).max_by(|&a, &b| coords[a].partial_cmp(&coords[b]).unwrap()).unwrap();
        let mut x = vec![0.0; 3];
        x[i] = coords[i];
        (x, DemoBranch::TwoCoordsZero)
    } else if a1 <= eps {
        // First coordinate vanishes; normalize the second positive.
        let alpha3 = (2.0 * n5 * n5 - n2 * n2 - n3 * n3) / (2.0 * n2);
        (vec![0.0, n2, alpha3], DemoBranch::FirstCoordZero)
    } else {
        let alpha2 = (2.0 * n4 * n4 - n1 * n1) / (2.0 * a1);
        let alpha3 = (2.0 * n6 * n6 + n2 * n2 - n1 * n1 - n3 * n3) / (2.0 * a1);
        (vec![a1, alpha2, alpha3], DemoBranch::General)
    };
    // Realizability: the reconstruction must reproduce all six norms.
    let forward = demo_projection_norms(&x_hat);
    let mismatch = forward
        .iter()
        .zip(norms)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    if mismatch > 20.0 * eps {
        return Err(Error::UnrealizableNorms(format!(
            "forward map mismatch {mismatch:.3e}"
        )));
    }
    Ok((x_hat, branch))
}
