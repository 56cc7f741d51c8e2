//! Exact scalars: rationals, Gaussian rationals and Gaussian integers.
//!
//! Every finite `f64` is a dyadic rational, so conversions from float to
//! exact are lossless; conversions back may round.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q_zero() -> Q {
    Q::zero()
}

pub fn q_one() -> Q {
    Q::one()
}

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Exact conversion; panics on NaN/infinity, which never enter via parsing.
pub fn q_from_f64(x: f64) -> Q {
    Q::from_f64(x).expect("finite float expected")
}

pub fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Parse "p/q" or "p" with arbitrary-precision integers.
pub fn q_parse(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().ok()?;
            let d: BigInt = den.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(Q::from_integer(n))
        }
    }
}

/// Canonical display form, "p/q" or "p" for integers.
pub fn q_display(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Gaussian rational a + bi with exact components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CQ {
    pub re: Q,
    pub im: Q,
}

impl CQ {
    pub fn new(re: Q, im: Q) -> Self {
        CQ { re, im }
    }

    pub fn from_real(re: Q) -> Self {
        CQ { re, im: Q::zero() }
    }

    pub fn zero() -> Self {
        CQ::new(Q::zero(), Q::zero())
    }

    pub fn one() -> Self {
        CQ::new(Q::one(), Q::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        CQ::new(self.re.clone(), -self.im.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        CQ::new(&self.re + &other.re, &self.im + &other.im)
    }

    pub fn sub(&self, other: &Self) -> Self {
        CQ::new(&self.re - &other.re, &self.im - &other.im)
    }

    pub fn mul(&self, other: &Self) -> Self {
        CQ::new(
            &self.re * &other.re - &self.im * &other.im,
            &self.re * &other.im + &self.im * &other.re,
        )
    }

    /// |z|^2 as an exact rational.
    pub fn norm_sq(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn div(&self, other: &Self) -> Self {
        let d = other.norm_sq();
        assert!(!d.is_zero(), "division by zero Gaussian rational");
        let num = self.mul(&other.conj());
        CQ::new(num.re / d.clone(), num.im / d)
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(q_to_f64(&self.re), q_to_f64(&self.im))
    }
}

/// Ring shared by the fraction-free elimination kernels: exact integral
/// domain with divisions that are guaranteed exact when they occur.
pub trait ExactDomain: Clone {
    fn ring_zero() -> Self;
    fn ring_one() -> Self;
    fn is_ring_zero(&self) -> bool;
    fn ring_mul(&self, other: &Self) -> Self;
    fn ring_sub(&self, other: &Self) -> Self;
    /// Division known to be exact by the Bareiss identity.
    fn exact_div(&self, d: &Self) -> Self;
}

impl ExactDomain for BigInt {
    fn ring_zero() -> Self {
        Zero::zero()
    }
    fn ring_one() -> Self {
        One::one()
    }
    fn is_ring_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn ring_sub(&self, other: &Self) -> Self {
        self - other
    }
    fn exact_div(&self, d: &Self) -> Self {
        debug_assert!(!Zero::is_zero(d));
        debug_assert!(Zero::is_zero(&(self % d)), "non-exact Bareiss division");
        self / d
    }
}

/// Gaussian integer a + bi.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn new(re: BigInt, im: BigInt) -> Self {
        GaussInt { re, im }
    }
}

impl ExactDomain for GaussInt {
    fn ring_zero() -> Self {
        GaussInt::new(BigInt::zero(), BigInt::zero())
    }
    fn ring_one() -> Self {
        GaussInt::new(BigInt::one(), BigInt::zero())
    }
    fn is_ring_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn ring_mul(&self, other: &Self) -> Self {
        GaussInt::new(
            &self.re * &other.re - &self.im * &other.im,
            &self.re * &other.im + &self.im * &other.re,
        )
    }
    fn ring_sub(&self, other: &Self) -> Self {
        GaussInt::new(&self.re - &other.re, &self.im - &other.im)
    }
    fn exact_div(&self, d: &Self) -> Self {
        let n = &d.re * &d.re + &d.im * &d.im;
        debug_assert!(!n.is_zero());
        let num = self.ring_mul(&GaussInt::new(d.re.clone(), -d.im.clone()));
        debug_assert!((&num.re % &n).is_zero() && (&num.im % &n).is_zero());
        GaussInt::new(num.re / &n, num.im / n)
    }
}

/// Clear denominators of a rational row: returns integer entries equal to the
/// row scaled by the lcm of denominators. Row scaling preserves rank, spans
/// and null spaces, so the elimination kernels work on the integer image.
pub fn clear_denominators(row: &[Q]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for q in row {
        lcm = num_integer::lcm(lcm, q.denom().clone());
    }
    row.iter()
        .map(|q| q.numer() * (&lcm / q.denom()))
        .collect()
}

/// Same for Gaussian rational rows.
pub fn clear_denominators_gauss(row: &[CQ]) -> Vec<GaussInt> {
    let mut lcm = BigInt::one();
    for z in row {
        lcm = num_integer::lcm(lcm, z.re.denom().clone());
        lcm = num_integer::lcm(lcm, z.im.denom().clone());
    }
    row.iter()
        .map(|z| {
            GaussInt::new(
                z.re.numer() * (&lcm / z.re.denom()),
                z.im.numer() * (&lcm / z.im.denom()),
            )
        })
        .collect()
}

/// Signum as an exact comparison against zero: -1, 0 or 1.
pub fn q_sign(q: &Q) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["3/4", "-7/2", "5", "0", "-12"] {
            let q = q_parse(s).unwrap();
            assert_eq!(q_display(&q), s);
        }
        assert!(q_parse("1/0").is_none());
        assert!(q_parse("x").is_none());
    }

    #[test]
    fn float_conversion_is_exact() {
        let q = q_from_f64(0.1);
        // 0.1 is not 1/10 in binary; the conversion must preserve the bits.
        assert_eq!(q_to_f64(&q), 0.1);
        assert_ne!(q, Q::new(BigInt::from(1), BigInt::from(10)));
    }

    #[test]
    fn gauss_int_exact_division() {
        // (1+2i)(3-i) = 5+5i; dividing back must be exact.
        let a = GaussInt::new(BigInt::from(1), BigInt::from(2));
        let b = GaussInt::new(BigInt::from(3), BigInt::from(-1));
        let p = a.ring_mul(&b);
        assert_eq!(p.exact_div(&b), a);
        assert_eq!(p.exact_div(&a), b);
    }

    #[test]
    fn denominator_clearing_scales_consistently() {
        let row = vec![q_parse("1/2").unwrap(), q_parse("1/3").unwrap(), q_int(2)];
        let ints = clear_denominators(&row);
        assert_eq!(ints, vec![BigInt::from(3), BigInt::from(2), BigInt::from(12)]);
    }
}
