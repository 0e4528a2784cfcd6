//! Dense univariate polynomials over the rationals: evaluation and Sturm counting.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Coefficients, lowest degree first. Trailing zeros are trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly(Vec<BigRational>);

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly(coeffs)
    }

    /// From integer coefficients listed highest degree first.
    pub fn from_int_desc(desc: &[BigInt]) -> Self {
        RatPoly::new(desc.iter().rev().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Remainder of Euclidean division by a nonzero polynomial.
    pub fn rem(&self, d: &RatPoly) -> RatPoly {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = &d.0[dd];
        let mut r = self.0.clone();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let q = &r[k] / lead;
            if !q.is_zero() {
                for (i, c) in d.0.iter().enumerate() {
                    let idx = k - dd + i;
                    r[idx] = &r[idx] - &q * c;
                }
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        RatPoly::new(r)
    }

    fn neg(&self) -> RatPoly {
        RatPoly(self.0.iter().map(|c| -c).collect())
    }

    /// The Sturm chain `p, p', -rem(p, p'), ...`.
    pub fn sturm_chain(&self) -> Vec<RatPoly> {
        let mut chain = vec![self.clone()];
        let d = self.derivative();
        if d.is_zero() {
            return chain;
        }
        chain.push(d);
        loop {
            let n = chain.len();
            let r = chain[n - 2].rem(&chain[n - 1]).neg();
            if r.is_zero() {
                break;
            }
            chain.push(r);
        }
        chain
    }

    /// Number of distinct real roots in `(a, b]`; endpoints must not be roots.
    pub fn count_roots(&self, a: &BigRational, b: &BigRational) -> usize {
        let chain = self.sturm_chain();
        let changes = |x: &BigRational| {
            let signs: Vec<i8> = chain
                .iter()
                .map(|p| {
                    let v = p.eval(x);
                    if v.is_positive() {
                        1
                    } else if v.is_negative() {
                        -1
                    } else {
                        0
                    }
                })
                .filter(|s| *s != 0)
                .collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        changes(a).saturating_sub(changes(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64) -> BigRational {
        BigRational::from_integer(p.into())
    }

    #[test]
    fn sturm_counts_plastic_root() {
        // x^3 - x - 1
        let p = RatPoly::from_int_desc(&[1.into(), 0.into(), (-1).into(), (-1).into()]);
        assert_eq!(p.count_roots(&r(1), &r(2)), 1);
        assert_eq!(p.count_roots(&r(-5), &r(5)), 1);
        // x^2 - 2 has two roots in [-2, 2]
        let q = RatPoly::from_int_desc(&[1.into(), 0.into(), (-2).into()]);
        assert_eq!(q.count_roots(&r(-2), &r(2)), 2);
        assert_eq!(q.count_roots(&r(0), &r(2)), 1);
    }

    #[test]
    fn remainder() {
        // (x^2 - 1) mod (x - 1) = 0
        let a = RatPoly::from_int_desc(&[1.into(), 0.into(), (-1).into()]);
        let b = RatPoly::from_int_desc(&[1.into(), (-1).into()]);
        assert!(a.rem(&b).is_zero());
        assert_eq!(a.eval(&r(3)), r(8));
    }
}
