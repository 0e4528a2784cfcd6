//! Symbolic components of the vector θ and their certified evaluation.
//!
//! Text grammar (components are comma separated; a comma followed by something
//! that is not a new `kind:` prefix continues the current component):
//!
//! ```text
//! theta     := component ("," component)*
//! component := "rat:" rational
//!            | "dec:" decimal
//!            | "sqrt:" rational                     (rational > 0)
//!            | "alg:" int ("," int)* "@[" number "," number "]"
//!            | "lac:" uint "@" schedule             (base >= 2)
//! rational  := int ("/" uint)?
//! decimal   := "-"? digits ("." digits)?
//! number    := rational | decimal
//! schedule  := uint ("," uint)* (",...")?  |  "fact"
//! ```
//!
//! `alg` lists the integer coefficients of the minimal polynomial from the
//! leading one down to the constant term; the bracket must isolate exactly one
//! real root with a sign change. `lac:b@a1,...,aK` is the finite sum of
//! `b^-ak`; a trailing `...` continues the exponents geometrically with ratio
//! `aK / a(K-1)` (which must be an integer >= 2), and `fact` uses `ak = k!`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::dyadic::{Dyadic, Round};
use super::interval::Interval;
use super::poly::RatPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecError(pub String);

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed theta spec: {}", self.0)
    }
}

impl std::error::Error for SpecError {}

fn bad<T>(msg: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError(msg.into()))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Schedule {
    Finite(Vec<u64>),
    Geometric { prefix: Vec<u64>, ratio: u64 },
    Factorial,
}

impl Schedule {
    /// The k-th exponent (0-based), saturating at `u64::MAX`.
    fn exponent(&self, k: usize) -> Option<u64> {
        match self {
            Schedule::Finite(v) => v.get(k).copied(),
            Schedule::Geometric { prefix, ratio } => {
                if k < prefix.len() {
                    return Some(prefix[k]);
                }
                let mut a = *prefix.last()?;
                for _ in prefix.len()..=k {
                    a = a.saturating_mul(*ratio);
                }
                Some(a)
            }
            Schedule::Factorial => {
                let mut a: u64 = 1;
                for i in 1..=(k as u64 + 1) {
                    a = a.saturating_mul(i);
                }
                Some(a)
            }
        }
    }

    fn is_finite(&self) -> bool {
        matches!(self, Schedule::Finite(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    Rational(BigRational),
    Decimal { text: String, value: BigRational },
    Sqrt(BigRational),
    Algebraic { coeffs: Vec<BigInt>, lo: BigRational, hi: BigRational },
    Lacunary { base: u32, schedule: Schedule },
}

fn parse_int(s: &str) -> Result<BigInt, SpecError> {
    let t = s.trim();
    if t.is_empty() || !t.trim_start_matches('-').chars().all(|c| c.is_ascii_digit()) {
        return bad(format!("expected an integer, found `{s}`"));
    }
    BigInt::from_str(t).or_else(|_| bad(format!("expected an integer, found `{s}`")))
}

fn parse_u64(s: &str) -> Result<u64, SpecError> {
    let t = s.trim();
    if t.is_empty() || !t.chars().all(|c| c.is_ascii_digit()) {
        return bad(format!("expected a nonnegative integer, found `{s}`"));
    }
    t.parse::<u64>().or_else(|_| bad(format!("integer out of range: `{s}`")))
}

fn parse_rational(s: &str) -> Result<BigRational, SpecError> {
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return bad(format!("zero denominator in `{s}`"));
            }
            if q.is_negative() {
                return bad(format!("negative denominator in `{s}`"));
            }
            Ok(BigRational::new(parse_int(p)?, q))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

/// Exact value of a decimal literal.
pub fn parse_decimal(s: &str) -> Result<BigRational, SpecError> {
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    let digits_ok = |d: &str| d.chars().all(|c| c.is_ascii_digit());
    if int_part.is_empty() || !digits_ok(int_part) || !digits_ok(frac_part) || (body.contains('.') && frac_part.is_empty()) {
        return bad(format!("expected a decimal literal, found `{s}`"));
    }
    let mant = BigInt::from_str(&format!("{int_part}{frac_part}")).or_else(|_| bad(s.to_string()))?;
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let v = BigRational::new(mant, den);
    Ok(if neg { -v } else { v })
}

fn parse_number(s: &str) -> Result<BigRational, SpecError> {
    if s.contains('.') {
        parse_decimal(s)
    } else {
        parse_rational(s)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact square root of a nonnegative rational when it has one.
pub(crate) fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let p = r.numer().sqrt();
    let q = r.denom().sqrt();
    (&p * &p == *r.numer() && &q * &q == *r.denom()).then(|| BigRational::new(p, q))
}

impl Component {
    pub fn parse(s: &str) -> Result<Component, SpecError> {
        let (kind, body) = s.split_once(':').ok_or_else(|| SpecError(format!("missing `kind:` prefix in `{s}`")))?;
        let comp = match kind.trim() {
            "rat" => Component::Rational(parse_rational(body)?),
            "dec" => Component::Decimal { text: body.trim().to_string(), value: parse_decimal(body)? },
            "sqrt" => {
                let q = parse_rational(body)?;
                if !q.is_positive() {
                    return bad(format!("sqrt needs a positive rational, found `{body}`"));
                }
                Component::Sqrt(q)
            }
            "alg" => {
                let (cs, bracket) = body.split_once('@').ok_or_else(|| SpecError(format!("alg needs `@[lo,hi]` in `{s}`")))?;
                let coeffs = cs.split(',').map(parse_int).collect::<Result<Vec<_>, _>>()?;
                let inner = bracket
                    .trim()
                    .strip_prefix('[')
                    .and_then(|b| b.strip_suffix(']'))
                    .ok_or_else(|| SpecError(format!("alg bracket must look like `[lo,hi]`, found `{bracket}`")))?;
                let (lo, hi) = inner.split_once(',').ok_or_else(|| SpecError(format!("alg bracket needs two bounds: `{bracket}`")))?;
                let c = Component::Algebraic { coeffs, lo: parse_number(lo)?, hi: parse_number(hi)? };
                c.check_isolating()?;
                c
            }
            "lac" => {
                let (b, sched) = body.split_once('@').ok_or_else(|| SpecError(format!("lac needs `base@schedule` in `{s}`")))?;
                let base = parse_u64(b)?;
                if !(2..=u32::MAX as u64).contains(&base) {
                    return bad(format!("lac base must be >= 2, found {base}"));
                }
                let schedule = if sched.trim() == "fact" {
                    Schedule::Factorial
                } else {
                    let mut parts: Vec<&str> = sched.split(',').collect();
                    let open = parts.last().is_some_and(|p| p.trim() == "...");
                    if open {
                        parts.pop();
                    }
                    let exps = parts.into_iter().map(parse_u64).collect::<Result<Vec<_>, _>>()?;
                    if exps.is_empty() || exps.windows(2).any(|w| w[0] >= w[1]) || exps[0] == 0 {
                        return bad(format!("lac exponents must be positive and strictly increasing: `{sched}`"));
                    }
                    if open {
                        if exps.len() < 2 {
                            return bad("`...` needs at least two exponents to infer the ratio");
                        }
                        let (a, b) = (exps[exps.len() - 2], exps[exps.len() - 1]);
                        if b % a != 0 || b / a < 2 {
                            return bad(format!("`...` needs an integer ratio >= 2, found {b}/{a}"));
                        }
                        Schedule::Geometric { ratio: b / a, prefix: exps }
                    } else {
                        Schedule::Finite(exps)
                    }
                };
                Component::Lacunary { base: base as u32, schedule }
            }
            other => return bad(format!("unknown component kind `{other}`")),
        };
        Ok(comp)
    }

    fn check_isolating(&self) -> Result<(), SpecError> {
        let Component::Algebraic { coeffs, lo, hi } = self else {
            return Ok(());
        };
        if coeffs.len() < 2 || coeffs[0].is_zero() {
            return bad("alg needs a polynomial of degree >= 1 with nonzero leading coefficient");
        }
        if lo >= hi {
            return bad("alg bracket must satisfy lo < hi");
        }
        let p = RatPoly::from_int_desc(coeffs);
        let (a, b) = (p.eval(lo), p.eval(hi));
        if a.is_zero() || b.is_zero() {
            return bad("alg bracket endpoint is a root");
        }
        if a.is_positive() == b.is_positive() {
            return bad("alg bracket has no sign change");
        }
        let count = p.count_roots(lo, hi);
        if count != 1 {
            return bad(format!("alg bracket is not isolating: it holds {count} distinct real roots"));
        }
        Ok(())
    }

    /// The exact value when the component is rational.
    pub fn exact_value(&self) -> Option<BigRational> {
        match self {
            Component::Rational(r) => Some(r.clone()),
            Component::Decimal { value, .. } => Some(value.clone()),
            Component::Sqrt(q) => exact_sqrt(q),
            Component::Algebraic { coeffs, .. } if coeffs.len() == 2 => {
                Some(BigRational::new(-coeffs[1].clone(), coeffs[0].clone()))
            }
            Component::Lacunary { base, schedule: Schedule::Finite(exps) } => {
                let b = BigInt::from(*base);
                Some(exps.iter().fold(BigRational::zero(), |acc, &a| {
                    acc + BigRational::new(BigInt::one(), num_traits::pow(b.clone(), a as usize))
                }))
            }
            _ => None,
        }
    }

    /// Certified enclosure with relative width about `2^-prec`.
    pub fn eval(&self, prec: u32) -> Interval {
        let w = prec + 8;
        if let Some(v) = self.exact_value() {
            return Interval::from_rational(&v, w);
        }
        match self {
            Component::Sqrt(q) => Interval::from_rational(q, w + 4)
                .sqrt(w)
                .expect("sqrt component is positive"),
            Component::Algebraic { coeffs, lo, hi } => bisect_root(coeffs, lo, hi, w),
            Component::Lacunary { base, schedule } => lacunary(*base, schedule, w),
            _ => unreachable!("rational components handled above"),
        }
    }
}

fn bisect_root(coeffs: &[BigInt], lo: &BigRational, hi: &BigRational, prec: u32) -> Interval {
    // endpoints are kept as integers over a common scale `s = den * 2^k`
    let den = num_integer::Integer::lcm(lo.denom(), hi.denom());
    let mut a = lo.numer() * (&den / lo.denom());
    let mut b = hi.numer() * (&den / hi.denom());
    let mut s = den;
    // sign of s^d p(m / s)
    let sign_at = |m: &BigInt, s: &BigInt| -> i32 {
        let d = coeffs.len() - 1;
        let mut acc = coeffs[0].clone();
        let mut sp = BigInt::one();
        let mut pows = Vec::with_capacity(d + 1);
        for _ in 0..=d {
            pows.push(sp.clone());
            sp *= s;
        }
        for (i, c) in coeffs.iter().enumerate().skip(1) {
            acc = acc * m + c * &pows[i];
        }
        match acc.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    };
    let rising = sign_at(&a, &s) < 0;
    loop {
        let mag = a.abs().max(b.abs()).max(s.clone());
        if (&b - &a) << (prec as usize + 2) <= mag {
            break;
        }
        a <<= 1;
        b <<= 1;
        s <<= 1;
        let m: BigInt = (&a + &b) >> 1;
        match sign_at(&m, &s) {
            0 => return Interval::from_rational(&BigRational::new(m, s), prec),
            v if (v < 0) == rising => a = m,
            _ => b = m,
        }
    }
    Interval::new(
        Dyadic::from_rational(&BigRational::new(a, s.clone()), prec, Round::Down),
        Dyadic::from_rational(&BigRational::new(b, s), prec, Round::Up),
    )
}

fn lacunary(base: u32, schedule: &Schedule, prec: u32) -> Interval {
    let b = BigInt::from(base);
    let log2b = (32 - base.leading_zeros() - 1) as u64; // floor(log2 base) >= 1
    let cut = prec as u64 + 8;
    let mut sum = BigRational::zero();
    let mut k = 0usize;
    let mut next = None;
    while let Some(a) = schedule.exponent(k) {
        if a.saturating_mul(log2b) >= cut {
            next = Some(a);
            break;
        }
        sum += BigRational::new(BigInt::one(), num_traits::pow(b.clone(), a as usize));
        k += 1;
    }
    let iv = Interval::from_rational(&sum, prec);
    match next {
        // the remaining terms sum to at most 2 b^-a(K+1) <= 2^(1 - a log2 b)
        Some(a) if !schedule.is_finite() || schedule.exponent(k).is_some() => {
            let tail_exp = 1i64 - a.saturating_mul(log2b).min(i64::MAX as u64 / 2) as i64;
            let hi = iv.hi().add(&Dyadic::pow2(tail_exp)).round(prec, Round::Up);
            Interval::new(iv.lo().clone(), hi)
        }
        _ => iv,
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Rational(r) => write!(f, "rat:{}", fmt_rational(r)),
            Component::Decimal { text, .. } => write!(f, "dec:{text}"),
            Component::Sqrt(q) => write!(f, "sqrt:{}", fmt_rational(q)),
            Component::Algebraic { coeffs, lo, hi } => {
                let cs: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                write!(f, "alg:{}@[{},{}]", cs.join(","), fmt_rational(lo), fmt_rational(hi))
            }
            Component::Lacunary { base, schedule } => {
                let sched = match schedule {
                    Schedule::Finite(v) => v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(","),
                    Schedule::Geometric { prefix, .. } => {
                        let mut s = prefix.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
                        s.push_str(",...");
                        s
                    }
                    Schedule::Factorial => "fact".to_string(),
                };
                write!(f, "lac:{base}@{sched}")
            }
        }
    }
}

const KINDS: [&str; 5] = ["rat:", "dec:", "sqrt:", "alg:", "lac:"];

/// The full specification of θ = (θ₁, …, θₙ).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThetaSpec {
    components: Vec<Component>,
}

impl ThetaSpec {
    pub fn new(components: Vec<Component>) -> Result<Self, SpecError> {
        if components.is_empty() {
            return bad("theta needs at least one component");
        }
        Ok(ThetaSpec { components })
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// True when every component is rational, i.e. `1, θ₁, …, θₙ` are certainly dependent.
    pub fn is_rational(&self) -> bool {
        self.components.iter().all(|c| c.exact_value().is_some())
    }
}

impl FromStr for ThetaSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        let mut pieces: Vec<String> = Vec::new();
        for tok in s.split(',') {
            let t = tok.trim();
            if KINDS.iter().any(|k| t.starts_with(k)) || pieces.is_empty() {
                pieces.push(t.to_string());
            } else if let Some(last) = pieces.last_mut() {
                last.push(',');
                last.push_str(t);
            }
        }
        let components = pieces.iter().map(|p| Component::parse(p)).collect::<Result<Vec<_>, _>>()?;
        ThetaSpec::new(components)
    }
}

impl fmt::Display for ThetaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl Serialize for ThetaSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ThetaSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Approximate value, for plotting and messages only.
pub fn approx(c: &Component) -> f64 {
    c.eval(64).approx_f64()
}

#[allow(dead_code)]
fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
