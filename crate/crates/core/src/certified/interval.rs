//! Closed intervals with dyadic endpoints and outward rounding.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::dyadic::{Dyadic, Round};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntervalError {
    DivisionByZero,
    LogOfNonPositive,
    SqrtOfNegative,
}

impl fmt::Display for IntervalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntervalError::DivisionByZero => write!(f, "divisor interval contains zero"),
            IntervalError::LogOfNonPositive => write!(f, "logarithm of an interval reaching zero"),
            IntervalError::SqrtOfNegative => write!(f, "square root of a negative interval"),
        }
    }
}

impl std::error::Error for IntervalError {}

/// `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(d: Dyadic) -> Self {
        Interval { lo: d.clone(), hi: d }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Interval::point(Dyadic::from_int(n))
    }

    pub fn zero() -> Self {
        Interval::point(Dyadic::zero())
    }

    pub fn one() -> Self {
        Interval::point(Dyadic::one())
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        Interval {
            lo: Dyadic::from_rational(r, prec, Round::Down),
            hi: Dyadic::from_rational(r, prec, Round::Up),
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, d: &Dyadic) -> bool {
        &self.lo <= d && d <= &self.hi
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        &self.lo.to_rational() <= r && r <= &self.hi.to_rational()
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Intersection, or `None` when disjoint.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = if self.lo >= other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi <= other.hi { &self.hi } else { &other.hi };
        (lo <= hi).then(|| Interval { lo: lo.clone(), hi: hi.clone() })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// `hi - lo <= 2^(1-prec) * max(1, |lo|)`.
    pub fn meets_precision(&self, prec: u32) -> bool {
        let scale = if self.lo.abs() > Dyadic::one() { self.lo.abs() } else { Dyadic::one() };
        self.width() <= scale.shl(1 - prec as i64)
    }

    /// Widen the endpoints outward to `prec` significant bits.
    pub fn round_outward(&self, prec: u32) -> Interval {
        Interval::rounded(self.lo.clone(), self.hi.clone(), prec)
    }

    fn rounded(lo: Dyadic, hi: Dyadic, prec: u32) -> Interval {
        Interval { lo: lo.round(prec, Round::Down), hi: hi.round(prec, Round::Up) }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let m = self.lo.abs().max(self.hi.clone());
            Interval { lo: Dyadic::zero(), hi: m }
        }
    }

    pub fn add(&self, o: &Interval, prec: u32) -> Interval {
        Interval::rounded(self.lo.add(&o.lo), self.hi.add(&o.hi), prec)
    }

    pub fn sub(&self, o: &Interval, prec: u32) -> Interval {
        Interval::rounded(self.lo.sub(&o.hi), self.hi.sub(&o.lo), prec)
    }

    pub fn mul(&self, o: &Interval, prec: u32) -> Interval {
        let c = [
            self.lo.mul(&o.lo),
            self.lo.mul(&o.hi),
            self.hi.mul(&o.lo),
            self.hi.mul(&o.hi),
        ];
        let lo = c.iter().min().cloned().unwrap_or_else(Dyadic::zero);
        let hi = c.iter().max().cloned().unwrap_or_else(Dyadic::zero);
        Interval::rounded(lo, hi, prec)
    }

    pub fn sqr(&self, prec: u32) -> Interval {
        let a = self.abs();
        Interval::rounded(a.lo.mul(&a.lo), a.hi.mul(&a.hi), prec)
    }

    pub fn recip(&self, prec: u32) -> Result<Interval, IntervalError> {
        if self.contains_zero() {
            return Err(IntervalError::DivisionByZero);
        }
        let one = Dyadic::one();
        Ok(Interval {
            lo: one.div(&self.hi, prec, Round::Down),
            hi: one.div(&self.lo, prec, Round::Up),
        })
    }

    pub fn div(&self, o: &Interval, prec: u32) -> Result<Interval, IntervalError> {
        if o.contains_zero() {
            return Err(IntervalError::DivisionByZero);
        }
        let q = |a: &Dyadic, b: &Dyadic, d| a.div(b, prec + 2, d);
        let lo = [
            q(&self.lo, &o.lo, Round::Down),
            q(&self.lo, &o.hi, Round::Down),
            q(&self.hi, &o.lo, Round::Down),
            q(&self.hi, &o.hi, Round::Down),
        ]
        .into_iter()
        .min()
        .unwrap_or_else(Dyadic::zero);
        let hi = [
            q(&self.lo, &o.lo, Round::Up),
            q(&self.lo, &o.hi, Round::Up),
            q(&self.hi, &o.lo, Round::Up),
            q(&self.hi, &o.hi, Round::Up),
        ]
        .into_iter()
        .max()
        .unwrap_or_else(Dyadic::zero);
        Ok(Interval::rounded(lo, hi, prec))
    }

    /// Square root; a lower endpoint below zero is clamped to zero as long as the
    /// upper endpoint is nonnegative (the caller vouches the exact value is `>= 0`).
    pub fn sqrt(&self, prec: u32) -> Result<Interval, IntervalError> {
        if self.hi.is_negative() {
            return Err(IntervalError::SqrtOfNegative);
        }
        let lo = if self.lo.is_negative() {
            Dyadic::zero()
        } else {
            self.lo.sqrt(prec, Round::Down)
        };
        Ok(Interval { lo, hi: self.hi.sqrt(prec, Round::Up) })
    }

    /// Whether `sqrt` would clamp the lower endpoint.
    pub fn sqrt_was_clamped(&self) -> bool {
        self.lo.is_negative()
    }

    pub fn powi(&self, k: u32, prec: u32) -> Interval {
        let pw = |d: &Dyadic| (0..k).fold(Dyadic::one(), |acc, _| acc.mul(d));
        if k % 2 == 1 {
            // odd powers are monotone
            Interval::rounded(pw(&self.lo), pw(&self.hi), prec)
        } else {
            let a = self.abs();
            Interval::rounded(pw(&a.lo), pw(&a.hi), prec)
        }
    }

    pub fn min(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(o.lo.clone()),
            hi: self.hi.clone().min(o.hi.clone()),
        }
    }

    pub fn max(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().max(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
        }
    }

    pub fn exp(&self, prec: u32) -> Interval {
        let lo = exp_point(&self.lo, prec);
        let hi = if self.is_point() { lo.clone() } else { exp_point(&self.hi, prec) };
        Interval { lo: lo.lo, hi: hi.hi }
    }

    pub fn ln(&self, prec: u32) -> Result<Interval, IntervalError> {
        if !self.lo.is_positive() {
            return Err(IntervalError::LogOfNonPositive);
        }
        let lo = ln_point(&self.lo, prec);
        let hi = if self.is_point() { lo.clone() } else { ln_point(&self.hi, prec) };
        Ok(Interval { lo: lo.lo, hi: hi.hi })
    }

    /// `self^e` for `self > 0`, via `exp(e ln self)`.
    pub fn pow(&self, e: &Interval, prec: u32) -> Result<Interval, IntervalError> {
        let l = self.ln(prec + 16)?;
        Ok(e.mul(&l, prec + 16).exp(prec))
    }

    /// Midpoint, rounded down to `prec` bits.
    pub fn mid(&self) -> Dyadic {
        self.lo.add(&self.hi).shl(-1)
    }

    pub fn to_f64_bounds(&self) -> (f64, f64) {
        (self.lo.to_f64(Round::Down), self.hi.to_f64(Round::Up))
    }

    /// Rough midpoint for display and plotting.
    pub fn approx_f64(&self) -> f64 {
        let (a, b) = self.to_f64_bounds();
        if a.is_finite() && b.is_finite() {
            0.5 * (a + b)
        } else if a.is_finite() {
            a
        } else {
            b
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

fn tiny(prec: u32) -> Dyadic {
    Dyadic::pow2(-(prec as i64))
}

/// Enclosure of `exp(x)` for a dyadic point.
fn exp_point(x: &Dyadic, prec: u32) -> Interval {
    if x.is_zero() {
        return Interval::one();
    }
    // reduce to |y| <= 2^-8, then square back up
    let mag = x.magnitude();
    let s = (mag + 8).max(0);
    let wp = prec + s as u32 + 24;
    let y = Interval::point(x.shl(-s));
    let mut sum = Interval::one();
    let mut term = Interval::one();
    let eps = tiny(wp);
    let mut k: u32 = 1;
    loop {
        term = term.mul(&y, wp).div(&Interval::from_int(k), wp).expect("k > 0");
        sum = sum.add(&term, wp);
        let bound = term.abs().hi.clone();
        if bound < eps {
            break;
        }
        k += 1;
    }
    // tail after term k: |y|^(k+1)/(k+1)! * 1/(1-|y|) <= 2 |term|
    let r = term.abs().hi.shl(1);
    sum = Interval { lo: sum.lo.sub(&r), hi: sum.hi.add(&r) };
    for _ in 0..s {
        sum = sum.sqr(wp);
    }
    Interval::rounded(sum.lo, sum.hi, prec)
}

/// `2 atanh(z) = 2 sum z^(2j+1)/(2j+1)` for `|z| <= 1/3`, as an enclosure.
fn atanh2(z: &Interval, wp: u32) -> Interval {
    let z2 = z.sqr(wp);
    let mut pow = z.clone();
    let mut sum = z.clone();
    let eps = tiny(wp);
    let mut j: u32 = 1;
    loop {
        pow = pow.mul(&z2, wp);
        let term = pow.div(&Interval::from_int(2 * j + 1), wp).expect("odd > 0");
        sum = sum.add(&term, wp);
        if term.abs().hi < eps {
            break;
        }
        j += 1;
    }
    // remaining terms are bounded by a geometric series with ratio z^2 <= 1/9
    let r = pow.mul(&z2, wp).abs().hi.shl(1);
    let sum = Interval { lo: sum.lo.sub(&r), hi: sum.hi.add(&r) };
    sum.add(&sum, wp)
}

fn ln2(wp: u32) -> Interval {
    let third = Interval::from_rational(&BigRational::new(1.into(), 3.into()), wp + 8);
    atanh2(&third, wp)
}

/// Enclosure of `ln(x)` for a positive dyadic point.
fn ln_point(x: &Dyadic, prec: u32) -> Interval {
    assert!(x.is_positive());
    if *x == Dyadic::one() {
        return Interval::zero();
    }
    // x = f 2^k with f in [3/4, 3/2)
    let mut k = x.magnitude() - 1;
    let mut f = x.shl(-k);
    if f >= Dyadic::new(BigInt::from(3), -1) {
        f = f.shl(-1);
        k += 1;
    }
    let wp = prec + 24 + (64 - (k.unsigned_abs()).leading_zeros());
    let fi = Interval::point(f);
    let one = Interval::one();
    let z = fi.sub(&one, wp).div(&fi.add(&one, wp), wp).expect("f + 1 > 0");
    let mut out = if z.lo.is_zero() && z.hi.is_zero() { Interval::zero() } else { atanh2(&z, wp) };
    if k != 0 {
        out = out.add(&ln2(wp).mul(&Interval::from_int(k), wp), wp);
    }
    Interval::rounded(out.lo, out.hi, prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(iv: &Interval) -> f64 {
        iv.approx_f64()
    }

    #[test]
    fn exp_and_ln_known_values() {
        let e = Interval::one().exp(128);
        assert!(e.meets_precision(120));
        assert!((approx(&e) - std::f64::consts::E).abs() < 1e-15);
        let l2 = Interval::from_int(2).ln(128).unwrap();
        assert!((approx(&l2) - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(l2.meets_precision(120));
        let big = Interval::from_int(1_000_000).ln(100).unwrap();
        assert!((approx(&big) - 1e6f64.ln()).abs() < 1e-12);
        let small = Interval::point(Dyadic::pow2(-70)).ln(100).unwrap();
        assert!((approx(&small) + 70.0 * std::f64::consts::LN_2).abs() < 1e-12);
        let neg = Interval::from_int(-30).exp(100);
        assert!((approx(&neg) / (-30f64).exp() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exp_ln_roundtrip_contains_input() {
        for v in [3i64, 17, 12345] {
            let x = Interval::from_int(v);
            let back = x.ln(160).unwrap().exp(140);
            assert!(back.contains(&Dyadic::from_int(v)), "{v}: {back}");
        }
    }

    #[test]
    fn pow_of_perfect_square() {
        let four = Interval::from_int(4);
        let half = Interval::from_rational(&BigRational::new(1.into(), 2.into()), 128);
        let r = four.pow(&half, 128).unwrap();
        assert!(r.contains(&Dyadic::from_int(2)));
        assert!(r.meets_precision(100));
    }

    #[test]
    fn division_guards() {
        let z = Interval::new(Dyadic::from_int(-1), Dyadic::from_int(1));
        assert_eq!(Interval::one().div(&z, 64), Err(IntervalError::DivisionByZero));
        assert_eq!(z.ln(64), Err(IntervalError::LogOfNonPositive));
        let s = z.sqrt(64).unwrap();
        assert_eq!(s.lo(), &Dyadic::zero());
    }

    #[test]
    fn even_powers_stay_nonnegative() {
        let z = Interval::new(Dyadic::from_int(-2), Dyadic::from_int(1));
        let p = z.powi(2, 64);
        assert!(!p.lo().is_negative());
        assert_eq!(p.hi(), &Dyadic::from_int(4));
        let c = z.powi(3, 64);
        assert_eq!(c.lo(), &Dyadic::from_int(-8));
    }
}
