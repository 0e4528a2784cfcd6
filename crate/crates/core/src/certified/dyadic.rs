//! Exact dyadic rationals `m * 2^e` with directed rounding to a bit budget.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction for the inexact operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

/// The value `mant * 2^exp`. Kept normalized: `mant` is odd, or zero with `exp == 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

/// `floor(m / 2^s)` or `ceil(m / 2^s)`.
fn shift_right(m: &BigInt, s: u64, dir: Round) -> BigInt {
    if s == 0 {
        return m.clone();
    }
    let d = pow2(s);
    match dir {
        Round::Down => m.div_floor(&d),
        Round::Up => -((-m).div_floor(&d)),
    }
}

fn div_dir(num: &BigInt, den: &BigInt, dir: Round) -> BigInt {
    match dir {
        Round::Down => num.div_floor(den),
        Round::Up => -((-num).div_floor(den)),
    }
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        if let Some(tz) = self.mant.trailing_zeros() {
            if tz > 0 {
                self.mant >>= tz;
                self.exp += tz as i64;
            }
        }
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic::new(n.into(), 0)
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Self {
        Dyadic { mant: BigInt::one(), exp: k }
    }

    pub fn mant(&self) -> &BigInt {
        &self.mant
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    /// Position of the leading bit: `2^(mag-1) <= |x| < 2^mag`. Zero maps to `i64::MIN`.
    pub fn magnitude(&self) -> i64 {
        if self.is_zero() {
            return i64::MIN;
        }
        self.mant.bits() as i64 + self.exp
    }

    pub fn neg(&self) -> Self {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    /// Multiply by `2^k`, exactly.
    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    pub fn add(&self, other: &Dyadic) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << ((self.exp - e) as u64);
        let b = &other.mant << ((other.exp - e) as u64);
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Self {
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    /// Round to at most `prec` significant bits in direction `dir`.
    pub fn round(&self, prec: u32, dir: Round) -> Self {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let s = bits - prec as u64;
        Dyadic::new(shift_right(&self.mant, s, dir), self.exp + s as i64)
    }

    /// Round to a multiple of `2^-frac_bits` in direction `dir`.
    pub fn round_abs(&self, frac_bits: i64, dir: Round) -> Self {
        if self.exp >= -frac_bits {
            return self.clone();
        }
        let s = (-frac_bits - self.exp) as u64;
        Dyadic::new(shift_right(&self.mant, s, dir), -frac_bits)
    }

    /// Directed approximation of a rational with `prec` significant bits.
    pub fn from_rational(r: &BigRational, prec: u32, dir: Round) -> Self {
        let num = r.numer();
        let den = r.denom();
        if num.is_zero() {
            return Dyadic::zero();
        }
        // den is a power of two: exact.
        if den.is_one() {
            return Dyadic::from_int(num.clone()).round(prec, dir);
        }
        if let Some(tz) = den.trailing_zeros() {
            if (den >> tz).is_one() {
                return Dyadic::new(num.clone(), -(tz as i64)).round(prec, dir);
            }
        }
        let k = prec as i64 + 2 - (num.bits() as i64 - den.bits() as i64);
        Dyadic::quotient(num, den, k, dir)
    }

    /// `num / den` rounded to a multiple of `2^-k`.
    fn quotient(num: &BigInt, den: &BigInt, k: i64, dir: Round) -> Self {
        if k >= 0 {
            Dyadic::new(div_dir(&(num << (k as u64)), den, dir), -k)
        } else {
            Dyadic::new(div_dir(num, &(den << ((-k) as u64)), dir), -k)
        }
    }

    pub fn div(&self, other: &Dyadic, prec: u32, dir: Round) -> Self {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        // (ma/mb) 2^(ea-eb); choose k so the integer quotient has ~prec+2 bits
        let k = prec as i64 + 2 - (self.mant.bits() as i64 - other.mant.bits() as i64);
        let q = Dyadic::quotient(&self.mant, &other.mant, k, dir);
        q.shl(self.exp - other.exp)
    }

    /// Directed square root of a nonnegative dyadic.
    pub fn sqrt(&self, prec: u32, dir: Round) -> Self {
        assert!(!self.is_negative(), "square root of a negative dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        // m 2^e = (m 2^s) 2^(e-s) with s >= 0 and e - s even
        let want = 2 * (prec as i64 + 2) - self.mant.bits() as i64;
        let mut s = want.max(0);
        if (self.exp - s).rem_euclid(2) != 0 {
            s += 1;
        }
        let big = &self.mant << (s as u64);
        let root = big.sqrt();
        let exact = &root * &root == big;
        let root = match dir {
            Round::Up if !exact => root + 1,
            _ => root,
        };
        Dyadic::new(root, (self.exp - s) / 2)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << (self.exp as u64))
        } else {
            BigRational::new(self.mant.clone(), pow2((-self.exp) as u64))
        }
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << (self.exp as u64)
        } else {
            shift_right(&self.mant, (-self.exp) as u64, Round::Down)
        }
    }

    pub fn ceil(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << (self.exp as u64)
        } else {
            shift_right(&self.mant, (-self.exp) as u64, Round::Up)
        }
    }

    /// Directed conversion to `f64`.
    pub fn to_f64(&self, dir: Round) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = self.round(53, dir);
        let mag = r.magnitude();
        if mag > 1000 {
            return match (r.is_negative(), dir) {
                (false, Round::Up) => f64::INFINITY,
                (false, Round::Down) => f64::MAX,
                (true, Round::Down) => f64::NEG_INFINITY,
                (true, Round::Up) => f64::MIN,
            };
        }
        if mag < -1000 {
            return match (r.is_negative(), dir) {
                (false, Round::Down) => 0.0,
                (false, Round::Up) => f64::MIN_POSITIVE,
                (true, Round::Down) => -f64::MIN_POSITIVE,
                (true, Round::Up) => -0.0,
            };
        }
        // |mant| < 2^53 is exact; scaling by a power of two in range is exact
        let m = r.mant.to_f64().expect("53-bit mantissa");
        m * 2f64.powi(r.exp as i32)
    }

    /// Exact value of a finite `f64`.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Dyadic::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp_bits == 0 {
            (frac as i64, -1074)
        } else {
            ((frac | (1u64 << 52)) as i64, exp_bits - 1075)
        };
        Some(Dyadic::new(BigInt::from(sign * m), e))
    }

    /// Exact decimal expansion (every dyadic has a terminating one).
    pub fn to_decimal_string(&self) -> String {
        if self.exp >= 0 {
            return (&self.mant << (self.exp as u64)).to_string();
        }
        let k = (-self.exp) as u32;
        // m / 2^k = m 5^k / 10^k
        let scaled = self.mant.abs() * num_traits::pow(BigInt::from(5), k as usize);
        let mut digits = scaled.to_string();
        if digits.len() <= k as usize {
            let pad = k as usize + 1 - digits.len();
            digits = "0".repeat(pad) + &digits;
        }
        let split = digits.len() - k as usize;
        let (int_part, frac_part) = digits.split_at(split);
        let frac_part = frac_part.trim_end_matches('0');
        let sign = if self.is_negative() { "-" } else { "" };
        if frac_part.is_empty() {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // same sign: compare magnitudes first when they differ enough
        let (ma, mb) = (self.magnitude(), other.magnitude());
        if ma != mb {
            let c = ma.cmp(&mb);
            return if sa > 0 { c } else { c.reverse() };
        }
        self.sub(other).signum().cmp(&0)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn rational_brackets() {
        let third = rat(1, 3);
        let lo = Dyadic::from_rational(&third, 64, Round::Down);
        let hi = Dyadic::from_rational(&third, 64, Round::Up);
        assert!(lo.to_rational() < third && third < hi.to_rational());
        let w = hi.sub(&lo);
        assert!(w <= Dyadic::pow2(-64));
        let neg = rat(-7, 5);
        assert!(Dyadic::from_rational(&neg, 40, Round::Down).to_rational() <= neg);
        assert!(Dyadic::from_rational(&neg, 40, Round::Up).to_rational() >= neg);
    }

    #[test]
    fn sqrt_brackets() {
        for q in [2i64, 3, 5, 10, 1_000_003] {
            let d = Dyadic::from_int(q);
            let lo = d.sqrt(100, Round::Down);
            let hi = d.sqrt(100, Round::Up);
            assert!(lo.mul(&lo) <= d && hi.mul(&hi) >= d, "sqrt({q})");
            assert!(hi.sub(&lo) <= Dyadic::pow2(-90));
        }
        let four = Dyadic::from_int(4);
        assert_eq!(four.sqrt(10, Round::Up), Dyadic::from_int(2));
        let small = Dyadic::new(BigInt::from(3), -41);
        let lo = small.sqrt(80, Round::Down);
        let hi = small.sqrt(80, Round::Up);
        assert!(lo.mul(&lo) <= small && hi.mul(&hi) >= small);
    }

    #[test]
    fn decimal_strings_are_exact() {
        assert_eq!(Dyadic::new(BigInt::from(3), -3).to_decimal_string(), "0.375");
        assert_eq!(Dyadic::new(BigInt::from(-5), -1).to_decimal_string(), "-2.5");
        assert_eq!(Dyadic::new(BigInt::from(5), 3).to_decimal_string(), "40");
        assert_eq!(Dyadic::new(BigInt::from(1), -4).to_decimal_string(), "0.0625");
    }

    #[test]
    fn f64_directed() {
        let third = Dyadic::from_rational(&rat(1, 3), 200, Round::Down);
        let lo = third.to_f64(Round::Down);
        let hi = third.to_f64(Round::Up);
        assert!(lo < hi);
        assert!(Dyadic::from_f64(lo).unwrap() <= third);
        assert!(Dyadic::from_f64(hi).unwrap() >= third);
        assert_eq!(Dyadic::from_f64(0.375).unwrap(), Dyadic::new(BigInt::from(3), -3));
    }

    #[test]
    fn ordering() {
        let a = Dyadic::new(BigInt::from(3), -2);
        let b = Dyadic::new(BigInt::from(7), -3);
        assert!(a < b);
        assert!(b.neg() < a.neg());
        assert_eq!(a.cmp(&a.clone()), Ordering::Equal);
    }
}
