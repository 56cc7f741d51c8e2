//! Naimark complements of Parseval frames: complete the analysis isometry to
//! a unitary and read the complement off the new columns. Unit vectors are
//! required throughout, so this is a floating operation; exact inputs are
//! converted and the certificate notes the conversion.

use crate::cert::{Arithmetic, Certificate};
use crate::cmat::{herm_dot_f, CfMat};
use crate::error::{Error, Result};
use crate::fmat;
use crate::frame::VectorFamily;
use crate::random::{rng_from_seed, standard_normal, Seed};
use crate::scalar::CQ;
use crate::tol::{Field, Mode, ToleranceConfig};
use num_complex::Complex64;

/// How the isometry is completed to a unitary: deterministically from
/// residuals of the standard basis (pivots by largest residual norm, ties to
/// the lowest index), or from seeded Gaussian draws. Both produce the same
/// complement up to a unitary, which is the freedom the theory allows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completion {
    Deterministic,
    Randomized(Seed),
}

#[derive(Debug, Clone)]
pub struct NaimarkOutcome {
    pub complement: VectorFamily,
    /// Set when M = N and the complement lives in dimension zero.
    pub zero_complement: bool,
    pub converted_from_exact: bool,
}

/// Construct the Naimark complement of a Parseval frame of M vectors in
/// dimension N: a Parseval frame of M vectors in dimension M - N such that
/// the direct sums form an orthonormal basis of M-space.
pub fn naimark_complement(
    f: &VectorFamily,
    tol: &ToleranceConfig,
    completion: Completion,
) -> Result<NaimarkOutcome> {
    let m = f.len();
    let n = f.ambient();
    if m < n {
        return Err(Error::NotParseval);
    }
    if !f.is_parseval(tol) {
        return Err(Error::NotParseval);
    }
    let converted_from_exact = f.mode() == Mode::Exact;
    if m == n {
        let complement = match f.field() {
            Field::Real => VectorFamily::new_real(0, vec![Vec::new(); m], Mode::Float)?,
            Field::Complex => {
                VectorFamily::new_complex(0, vec![Vec::new(); m], Mode::Float)?
            }
        };
        return Ok(NaimarkOutcome {
            complement,
            zero_complement: true,
            converted_from_exact,
        });
    }
    let complement = match f.field() {
        Field::Real => real_complement(f, completion)?,
        Field::Complex => complex_complement(f, completion)?,
    };
    Ok(NaimarkOutcome {
        complement,
        zero_complement: false,
        converted_from_exact,
    })
}

fn real_complement(f: &VectorFamily, completion: Completion) -> Result<VectorFamily> {
    let m = f.len();
    let n = f.ambient();
    // Columns of the analysis isometry: orthonormal vectors in R^M.
    let t = f.to_fmat()?;
    let mut basis: Vec<Vec<f64>> = (0..n).map(|j| t.col(j)).collect();
    let added = complete_orthonormal_real(&mut basis, m, completion);
    // psi_i = i-th coordinates of the added columns.
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|i| added.iter().map(|c| c[i]).collect())
        .collect();
    VectorFamily::from_f64_rows(m - n, rows)
}

fn complete_orthonormal_real(
    basis: &mut Vec<Vec<f64>>,
    ambient: usize,
    completion: Completion,
) -> Vec<Vec<f64>> {
    let mut added = Vec::new();
    let mut rng = match completion {
        Completion::Deterministic => None,
        Completion::Randomized(seed) => Some(rng_from_seed(seed)),
    };
    while basis.len() < ambient {
        let candidate = match rng.as_mut() {
            None => {
                // Largest residual among standard basis vectors, lowest
                // index on ties.
                let mut best: Option<(f64, usize, Vec<f64>)> = None;
                for i in 0..ambient {
                    let mut r = vec![0.0; ambient];
                    r[i] = 1.0;
                    project_out_real(&mut r, basis);
                    let norm = fmat::norm(&r);
                    if best.as_ref().is_none_or(|(b, _, _)| norm > *b + 1e-12) {
                        best = Some((norm, i, r));
                    }
                }
                best.expect("ambient > 0").2
            }
            Some(rng) => {
                let mut r: Vec<f64> = (0..ambient).map(|_| standard_normal(rng)).collect();
                project_out_real(&mut r, basis);
                r
            }
        };
        let norm = fmat::norm(&candidate);
        if norm < 1e-8 {
            continue;
        }
        let mut unit: Vec<f64> = candidate.iter().map(|x| x / norm).collect();
        // Re-orthogonalize once for stability.
        project_out_real(&mut unit, basis);
        let norm = fmat::norm(&unit);
        let unit: Vec<f64> = unit.iter().map(|x| x / norm).collect();
        basis.push(unit.clone());
        added.push(unit);
    }
    added
}

fn project_out_real(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c = fmat::dot(v, b);
        fmat::axpy(v, -c, b);
    }
}

fn complex_complement(f: &VectorFamily, completion: Completion) -> Result<VectorFamily> {
    let m = f.len();
    let n = f.ambient();
    let t = f.to_cfmat();
    // Columns of the complex analysis isometry: conj(row_i)[j] stacked.
    let mut basis: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..m).map(|i| t[(i, j)].conj()).collect())
        .collect();
    let mut added: Vec<Vec<Complex64>> = Vec::new();
    let mut rng = match completion {
        Completion::Deterministic => None,
        Completion::Randomized(seed) => Some(rng_from_seed(seed)),
    };
    while basis.len() < m {
        let candidate: Vec<Complex64> = match rng.as_mut() {
            None => {
                let mut best: Option<(f64, usize, Vec<Complex64>)> = None;
                for i in 0..m {
                    let mut r = vec![Complex64::new(0.0, 0.0); m];
                    r[i] = Complex64::new(1.0, 0.0);
                    project_out_complex(&mut r, &basis);
                    let norm = crate::cmat::cnorm(&r);
                    if best.as_ref().is_none_or(|(b, _, _)| norm > *b + 1e-12) {
                        best = Some((norm, i, r));
                    }
                }
                best.expect("m > 0").2
            }
            Some(rng) => {
                let mut r: Vec<Complex64> = (0..m)
                    .map(|_| Complex64::new(standard_normal(rng), standard_normal(rng)))
                    .collect();
                project_out_complex(&mut r, &basis);
                r
            }
        };
        let norm = crate::cmat::cnorm(&candidate);
        if norm < 1e-8 {
            continue;
        }
        let mut unit: Vec<Complex64> = candidate.iter().map(|z| z / norm).collect();
        project_out_complex(&mut unit, &basis);
        let norm = crate::cmat::cnorm(&unit);
        let unit: Vec<Complex64> = unit.iter().map(|z| z / norm).collect();
        basis.push(unit.clone());
        added.push(unit);
    }
    // psi_i: conj back so that the direct sums are orthonormal rows.
    let rows: Vec<Vec<CQ>> = (0..m)
        .map(|i| {
            added
                .iter()
                .map(|c| {
                    let z = c[i].conj();
                    CQ::new(
                        crate::scalar::q_from_f64(z.re),
                        crate::scalar::q_from_f64(z.im),
                    )
                })
                .collect()
        })
        .collect();
    VectorFamily::new_complex(m - n, rows, Mode::Float)
}

fn project_out_complex(v: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for b in basis {
        let c = herm_dot_f(v, b);
        for (vi, bi) in v.iter_mut().zip(b) {
            *vi -= c * bi;
        }
    }
}

/// Verify that (f, g) is a Naimark pair: both Parseval and
/// Gram(f) + Gram(g) = I_M within ortho_tol.
pub fn verify_naimark_pair(
    f: &VectorFamily,
    g: &VectorFamily,
    tol: &ToleranceConfig,
) -> Result<Certificate> {
    let m = f.len();
    if g.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "families of {} and {} vectors cannot be a Naimark pair",
            m,
            g.len()
        )));
    }
    // Mismatched dimensions (for example a family paired with itself) are
    // legitimate inputs that simply fail the Gram identity.
    let gram_f = f.to_cfmat().gram();
    let gram_g = g.to_cfmat().gram();
    let sum = CfMat::from_fn(m, m, |i, j| gram_f[(i, j)] + gram_g[(i, j)]);
    let gram_residual = sum.max_abs_diff(&CfMat::identity(m));
    let f_parseval = f.is_parseval(tol);
    let g_parseval = g.ambient() == 0 || g.is_parseval(tol);
    let arithmetic = if f.mode() == Mode::Exact && g.mode() == Mode::Exact {
        Arithmetic::FloatConvertedFromExact
    } else {
        Arithmetic::Float
    };
    let pass = f_parseval && g_parseval && gram_residual <= tol.ortho_tol;
    Ok(if pass {
        Certificate::pass(arithmetic, Some(gram_residual))
    } else {
        let note = if !f_parseval {
            "first family is not Parseval"
        } else if !g_parseval {
            "second family is not Parseval"
        } else {
            "Gram matrices do not sum to the identity"
        };
        Certificate::fail(arithmetic, Some(gram_residual), note)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_parseval_frame, rng_from_seed};
    use crate::scalar::q_parse;
    use crate::spark::{is_full_spark, ScanPolicy};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    /// Rows of a rational orthogonal matrix restricted to the first two
    /// coordinates: an exactly Parseval frame of 3 vectors in 2-space.
    fn rational_parseval() -> VectorFamily {
        let rows = vec![
            vec![q_parse("2/3").unwrap(), q_parse("2/3").unwrap()],
            vec![q_parse("2/3").unwrap(), q_parse("-1/3").unwrap()],
            vec![q_parse("-1/3").unwrap(), q_parse("2/3").unwrap()],
        ];
        VectorFamily::new_real(2, rows, Mode::Exact).unwrap()
    }

    #[test]
    fn square_parseval_has_zero_complement() {
        let onb = VectorFamily::from_i64_rows(2, &[&[1, 0], &[0, 1]]);
        let out = naimark_complement(&onb, &tol(), Completion::Deterministic).unwrap();
        assert!(out.zero_complement);
        assert_eq!(out.complement.ambient(), 0);
        assert_eq!(out.complement.len(), 2);
        let cert = verify_naimark_pair(&onb, &out.complement, &tol()).unwrap();
        assert!(cert.pass);
    }

    #[test]
    fn complement_of_restricted_orthogonal_rows() {
        // The construction run backwards: the leftover third coordinates of
        // the same orthogonal matrix are a complement, unique up to a
        // unitary, so the Gram matrices must match.
        let f = rational_parseval();
        assert!(f.is_parseval(&tol()));
        let out = naimark_complement(&f, &tol(), Completion::Deterministic).unwrap();
        assert!(out.converted_from_exact);
        let expected = VectorFamily::new_real(
            1,
            vec![
                vec![q_parse("-1/3").unwrap()],
                vec![q_parse("2/3").unwrap()],
                vec![q_parse("2/3").unwrap()],
            ],
            Mode::Exact,
        )
        .unwrap();
        assert!(verify_naimark_pair(&f, &expected, &tol()).unwrap().pass);
        let got = out.complement.to_fmat().unwrap().gram();
        let want = expected.to_fmat().unwrap().gram();
        assert!(got.max_abs_diff(&want) < 1e-10);
    }

    #[test]
    fn random_parseval_complement_identities() {
        let mut rng = rng_from_seed(5);
        for _ in 0..10 {
            let f = random_parseval_frame(&mut rng, 3, 5);
            let out = naimark_complement(&f, &tol(), Completion::Deterministic).unwrap();
            assert!(out.complement.is_parseval(&tol()));
            let cert = verify_naimark_pair(&f, &out.complement, &tol()).unwrap();
            assert!(cert.pass);
            assert!(cert.max_residual.unwrap() <= 1e-10);
        }
    }

    #[test]
    fn self_pair_fails_for_nontrivial_parseval() {
        let f = rational_parseval();
        let cert = verify_naimark_pair(&f, &f, &tol()).unwrap();
        assert!(!cert.pass);
    }

    #[test]
    fn complements_are_unitarily_equivalent() {
        let mut rng = rng_from_seed(11);
        let f = random_parseval_frame(&mut rng, 2, 5);
        let a = naimark_complement(&f, &tol(), Completion::Randomized(100)).unwrap();
        let b = naimark_complement(&f, &tol(), Completion::Randomized(200)).unwrap();
        let ga = a.complement.to_fmat().unwrap().gram();
        let gb = b.complement.to_fmat().unwrap().gram();
        assert!(ga.max_abs_diff(&gb) < 1e-9);
    }

    #[test]
    fn full_spark_duality_on_random_parsevals() {
        let mut rng = rng_from_seed(23);
        // The frame side carries exact decision rows; the float-born
        // complement is judged by tolerance-ranked singular values.
        let exact = ScanPolicy::exact();
        let float = ScanPolicy {
            force: false,
            float_ranks: Some(tol()),
        };
        let mut seen_degenerate = false;
        for _ in 0..25 {
            use rand::Rng;
            let n = rng.gen_range(2usize..=3);
            let m = rng.gen_range(n + 1..=6);
            let f = random_parseval_frame(&mut rng, n, m);
            let psi = naimark_complement(&f, &tol(), Completion::Deterministic)
                .unwrap()
                .complement;
            let a = is_full_spark(&f, &exact).unwrap().full_spark;
            let b = is_full_spark(&psi, &float).unwrap().full_spark;
            assert_eq!(a, b, "full-spark verdicts of a Naimark pair must agree");
            seen_degenerate |= !a;
        }
        // Force a degenerate base so both directions of the equivalence are
        // exercised: e1, e2, e1+e2, e3 in 3-space is not full spark.
        let base = VectorFamily::from_i64_rows(3, &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 0], &[0, 0, 1]]);
        let f = base.canonical_tight_transform().unwrap();
        let psi = naimark_complement(&f, &tol(), Completion::Deterministic)
            .unwrap()
            .complement;
        assert!(!is_full_spark(&f, &exact).unwrap().full_spark);
        assert!(!is_full_spark(&psi, &float).unwrap().full_spark);
        let _ = seen_degenerate;
    }

    #[test]
    fn complex_parseval_complement() {
        use num_complex::Complex64;
        // Random complex Parseval frame from a unitary completion of two
        // orthonormal columns in C^4.
        let mut rng = rng_from_seed(31);
        let raw: Vec<Vec<Complex64>> = (0..4)
            .map(|_| {
                (0..4)
                    .map(|_| Complex64::new(standard_normal(&mut rng), standard_normal(&mut rng)))
                    .collect()
            })
            .collect();
        let u = crate::cmat::cmgs_rows(&raw, 1e-9);
        assert_eq!(u.nrows(), 4);
        // Rows of the unitary restricted to the first 2 coordinates.
        let rows: Vec<Vec<CQ>> = (0..4)
            .map(|i| {
                (0..2)
                    .map(|j| {
                        CQ::new(
                            crate::scalar::q_from_f64(u[(i, j)].re),
                            crate::scalar::q_from_f64(u[(i, j)].im),
                        )
                    })
                    .collect()
            })
            .collect();
        let f = VectorFamily::new_complex(2, rows, Mode::Float).unwrap();
        assert!(f.is_parseval(&tol()));
        let out = naimark_complement(&f, &tol(), Completion::Deterministic).unwrap();
        assert!(out.complement.is_parseval(&tol()));
        assert!(verify_naimark_pair(&f, &out.complement, &tol()).unwrap().pass);
    }

    #[test]
    fn non_parseval_is_rejected() {
        let f = VectorFamily::from_i64_rows(2, &[&[1, 0], &[0, 1], &[1, 1]]);
        assert!(matches!(
            naimark_complement(&f, &tol(), Completion::Deterministic),
            Err(Error::NotParseval)
        ));
    }
}
