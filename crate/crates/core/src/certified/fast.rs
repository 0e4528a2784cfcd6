//! Rigorous double-precision intervals for hot enumeration loops.
//!
//! Every IEEE operation is correctly rounded, so stepping one ulp outward after
//! each operation keeps the enclosure valid. Callers fall back to the
//! arbitrary-precision path whenever these bounds cannot decide a question.

use super::interval::Interval;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F64Iv {
    pub lo: f64,
    pub hi: f64,
}

impl F64Iv {
    pub fn new(lo: f64, hi: f64) -> F64Iv {
        debug_assert!(lo <= hi);
        F64Iv { lo, hi }
    }

    /// An exactly representable integer (|n| < 2^53) or any exact double.
    pub fn point(x: f64) -> F64Iv {
        F64Iv { lo: x, hi: x }
    }

    pub fn from_interval(iv: &Interval) -> F64Iv {
        let (lo, hi) = iv.to_f64_bounds();
        F64Iv { lo, hi }
    }

    pub fn add(self, o: F64Iv) -> F64Iv {
        F64Iv { lo: (self.lo + o.lo).next_down(), hi: (self.hi + o.hi).next_up() }
    }

    pub fn sub(self, o: F64Iv) -> F64Iv {
        F64Iv { lo: (self.lo - o.hi).next_down(), hi: (self.hi - o.lo).next_up() }
    }

    pub fn neg(self) -> F64Iv {
        F64Iv { lo: -self.hi, hi: -self.lo }
    }

    pub fn mul(self, o: F64Iv) -> F64Iv {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        F64Iv { lo: lo.next_down(), hi: hi.next_up() }
    }

    /// Multiply by an exact double.
    pub fn scale(self, k: f64) -> F64Iv {
        self.mul(F64Iv::point(k))
    }

    pub fn sqr(self) -> F64Iv {
        let a = self.abs();
        F64Iv { lo: (a.lo * a.lo).next_down().max(0.0), hi: (a.hi * a.hi).next_up() }
    }

    pub fn abs(self) -> F64Iv {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            self.neg()
        } else {
            F64Iv { lo: 0.0, hi: self.hi.max(-self.lo) }
        }
    }

    pub fn div(self, o: F64Iv) -> Option<F64Iv> {
        if o.lo <= 0.0 && o.hi >= 0.0 {
            return None;
        }
        let c = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(F64Iv { lo: lo.next_down(), hi: hi.next_up() })
    }

    /// Square root, clamping a negative lower end to zero.
    pub fn sqrt(self) -> F64Iv {
        let lo = if self.lo <= 0.0 { 0.0 } else { self.lo.sqrt().next_down().max(0.0) };
        F64Iv { lo, hi: self.hi.max(0.0).sqrt().next_up() }
    }

    pub fn max(self, o: F64Iv) -> F64Iv {
        F64Iv { lo: self.lo.max(o.lo), hi: self.hi.max(o.hi) }
    }

    pub fn min(self, o: F64Iv) -> F64Iv {
        F64Iv { lo: self.lo.min(o.lo), hi: self.hi.min(o.hi) }
    }

    pub fn contains_zero(self) -> bool {
        self.lo <= 0.0 && self.hi >= 0.0
    }

    /// The nearest integer when it is determined by the enclosure and not a tie.
    pub fn round_certain(self) -> Option<f64> {
        if !(self.lo.abs() < 1.0e15 && self.hi.abs() < 1.0e15) {
            return None;
        }
        // n +- 0.5 is exact at this magnitude; both ends must sit strictly inside
        let n = self.lo.round();
        (n - 0.5 < self.lo && self.hi < n + 0.5).then_some(n)
    }

    pub fn is_finite(self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encloses_known_products() {
        let t = F64Iv::new(1.414_213_562_373_095, 1.414_213_562_373_095_2);
        let s = t.mul(t);
        assert!(s.lo <= 2.0 && s.hi >= 2.0);
        let r = F64Iv::point(2.0).sqrt();
        assert!(r.lo <= t.hi && r.hi >= t.lo);
        assert_eq!(F64Iv::new(2.4, 2.45).round_certain(), Some(2.0));
        assert_eq!(F64Iv::new(2.4, 2.6).round_certain(), None);
    }
}
