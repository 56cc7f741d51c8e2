//! Seeded generators shared by the randomized constructions and the test
//! suites. Everything flows from a user seed through ChaCha8, so identical
//! seeds give identical draws on every platform.

use crate::frame::VectorFamily;
use crate::scalar::{q_int, Q};
use crate::spark::{is_full_spark, ScanPolicy};
use crate::tol::Mode;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Seed = u64;

pub fn rng_from_seed(seed: Seed) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer vector with entries in [-bound, bound], not all zero.
pub fn random_int_vector(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Vec<Q> {
    loop {
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-bound..=bound)).collect();
        if v.iter().any(|&x| x != 0) {
            return v.into_iter().map(q_int).collect();
        }
    }
}

pub fn random_int_rows(rng: &mut ChaCha8Rng, m: usize, n: usize, bound: i64) -> Vec<Vec<Q>> {
    (0..m).map(|_| random_int_vector(rng, n, bound)).collect()
}

/// Uniform point on the unit sphere (Gaussian draw, normalized).
pub fn random_unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| standard_normal(rng)).collect();
        let norm = crate::fmat::norm(&v);
        if norm > 1e-6 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

/// Box-Muller; good enough here and keeps the dependency surface small.
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Random integer family of m vectors spanning R^n, retried until full rank.
pub fn random_frame(rng: &mut ChaCha8Rng, n: usize, m: usize, bound: i64) -> VectorFamily {
    assert!(m >= n, "a frame needs at least n vectors");
    loop {
        let rows = random_int_rows(rng, m, n, bound);
        let f = VectorFamily::new_real(n, rows, Mode::Exact).unwrap();
        if f.is_frame() {
            return f;
        }
    }
}

/// Random integer family verified full spark exactly, retried on failure.
pub fn random_full_spark_family(
    rng: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    bound: i64,
) -> VectorFamily {
    loop {
        let f = random_frame(rng, n, m, bound);
        if is_full_spark(&f, &ScanPolicy::exact())
            .map(|o| o.full_spark)
            .unwrap_or(false)
        {
            return f;
        }
    }
}

/// Random Parseval frame: canonical tight transform of a random full-rank
/// integer family. Float mode, with the exact original kept for decisions.
pub fn random_parseval_frame(rng: &mut ChaCha8Rng, n: usize, m: usize) -> VectorFamily {
    random_frame(rng, n, m, 9)
        .canonical_tight_transform()
        .expect("random frame spans by construction")
}
