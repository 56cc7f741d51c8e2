//! Minimal rational polynomial arithmetic: just enough for characteristic
//! polynomials and Sturm-sequence root isolation of symmetric spectra.

use crate::scalar::{q_sign, Q};
use num_traits::Zero;

/// Dense polynomial over the rationals, coefficients in ascending degree,
/// normalized so the leading coefficient is nonzero (empty = zero poly).
#[derive(Debug, Clone, PartialEq)]
pub struct QPoly {
    pub coeffs: Vec<Q>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return QPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * crate::scalar::q_int(i as i64))
            .collect();
        QPoly::new(coeffs)
    }

    /// Remainder of self divided by rhs.
    pub fn rem(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero polynomial");
        let mut r = self.coeffs.clone();
        let dlead = rhs.coeffs.last().unwrap().clone();
        let dn = rhs.coeffs.len();
        while r.len() >= dn && !r.is_empty() {
            if r.last().unwrap().is_zero() {
                r.pop();
                continue;
            }
            let factor = r.last().unwrap() / &dlead;
            let shift = r.len() - dn;
            for (i, c) in rhs.coeffs.iter().enumerate() {
                let t = &factor * c;
                r[shift + i] = &r[shift + i] - t;
            }
            // Leading term cancels by construction.
            r.pop();
        }
        QPoly::new(r)
    }
}

/// Standard Sturm chain: p, p', then negated remainders. Counts distinct
/// real roots even in the presence of multiplicities.
pub struct SturmChain {
    chain: Vec<QPoly>,
}

impl SturmChain {
    pub fn new(p: &QPoly) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        while !chain.last().unwrap().is_zero() {
            let n = chain.len();
            let r = chain[n - 2].rem(&chain[n - 1]);
            let neg = QPoly::new(r.coeffs.into_iter().map(|c| -c).collect());
            chain.push(neg);
        }
        chain.pop();
        SturmChain { chain }
    }

    fn sign_changes(&self, x: &Q) -> usize {
        let mut changes = 0;
        let mut last = 0i8;
        for p in &self.chain {
            let s = q_sign(&p.eval(x));
            if s != 0 {
                if last != 0 && s != last {
                    changes += 1;
                }
                last = s;
            }
        }
        changes
    }

    /// Number of distinct real roots in (a, b]; requires p(a) != 0 and
    /// p(b) != 0 for the textbook guarantee, which callers arrange.
    pub fn roots_in(&self, a: &Q, b: &Q) -> usize {
        self.sign_changes(a).saturating_sub(self.sign_changes(b))
    }
}
