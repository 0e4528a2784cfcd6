//! Refinable certified reals.
//!
//! A [`CertifiedScalar`] is an expression DAG plus the tightest interval
//! computed for it so far. Refinement re-evaluates the DAG at a higher working
//! precision and intersects with the previous enclosure, so intervals never
//! widen. Rational subexpressions are folded exactly at construction time.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::dyadic::Dyadic;
use super::interval::{Interval, IntervalError};
use super::theta::{exact_sqrt, Component};

/// Working precision used when a value is first built.
pub const INITIAL_BITS: u32 = 64;
/// Ceiling for the escalation performed while building fallible operations.
const BUILD_CEILING: u32 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarError {
    DivisionByZero,
    LogOfNonPositive,
    SqrtOfNegative,
    PrecisionExhausted { bits: u32 },
}

impl fmt::Display for ScalarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarError::DivisionByZero => write!(f, "division by a quantity not separated from zero"),
            ScalarError::LogOfNonPositive => write!(f, "logarithm of a quantity not certified positive"),
            ScalarError::SqrtOfNegative => write!(f, "square root of a negative quantity"),
            ScalarError::PrecisionExhausted { bits } => {
                write!(f, "precision exhausted: could not certify at {bits} bits")
            }
        }
    }
}

impl std::error::Error for ScalarError {}

impl From<IntervalError> for ScalarError {
    fn from(e: IntervalError) -> Self {
        match e {
            IntervalError::DivisionByZero => ScalarError::DivisionByZero,
            IntervalError::LogOfNonPositive => ScalarError::LogOfNonPositive,
            IntervalError::SqrtOfNegative => ScalarError::SqrtOfNegative,
        }
    }
}

/// Outcome of a certified comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Comparison {
    Less,
    Greater,
    EqualProven,
    Undecided,
}

impl Comparison {
    pub fn reverse(self) -> Comparison {
        match self {
            Comparison::Less => Comparison::Greater,
            Comparison::Greater => Comparison::Less,
            c => c,
        }
    }

    pub fn is_le(self) -> bool {
        matches!(self, Comparison::Less | Comparison::EqualProven)
    }

    pub fn is_ge(self) -> bool {
        matches!(self, Comparison::Greater | Comparison::EqualProven)
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Comparison::Less => "LESS",
            Comparison::Greater => "GREATER",
            Comparison::EqualProven => "EQUAL_PROVEN",
            Comparison::Undecided => "UNDECIDED",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Kind {
    Rat(BigRational),
    Theta(Arc<Component>),
    Neg(Arc<Node>),
    Abs(Arc<Node>),
    Sqrt(Arc<Node>),
    Exp(Arc<Node>),
    Ln(Arc<Node>),
    PowI(Arc<Node>, u32),
    Add(Arc<Node>, Arc<Node>),
    Sub(Arc<Node>, Arc<Node>),
    Mul(Arc<Node>, Arc<Node>),
    Div(Arc<Node>, Arc<Node>),
    Pow(Arc<Node>, Arc<Node>),
    Min(Arc<Node>, Arc<Node>),
    Max(Arc<Node>, Arc<Node>),
    /// The unique root of a polynomial (coefficients lowest degree first) in
    /// `[lo, hi]`, negative to its left and positive to its right.
    Root { coeffs: Vec<Arc<Node>>, lo: Arc<Node>, hi: Arc<Node> },
}

struct Node {
    kind: Kind,
    cache: Mutex<Option<(u32, Interval)>>,
}

impl Node {
    fn new(kind: Kind) -> Arc<Node> {
        Arc::new(Node { kind, cache: Mutex::new(None) })
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Node {}

impl Hash for Node {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind.hash(state)
    }
}

impl fmt::Debug for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

fn eval(n: &Arc<Node>, w: u32) -> Result<Interval, ScalarError> {
    if let Kind::Rat(r) = &n.kind {
        return Ok(Interval::from_rational(r, w));
    }
    {
        let c = n.cache.lock().unwrap_or_else(|e| e.into_inner());
        if let Some((p, iv)) = c.as_ref() {
            if *p >= w {
                return Ok(iv.clone());
            }
        }
    }
    let fresh = compute(&n.kind, w)?;
    let mut c = n.cache.lock().unwrap_or_else(|e| e.into_inner());
    let iv = match c.as_ref() {
        Some((_, old)) => fresh.intersect(old).unwrap_or(fresh),
        None => fresh,
    };
    *c = Some((w, iv.clone()));
    Ok(iv)
}

fn compute(k: &Kind, w: u32) -> Result<Interval, ScalarError> {
    Ok(match k {
        Kind::Rat(r) => Interval::from_rational(r, w),
        Kind::Theta(c) => c.eval(w),
        Kind::Neg(a) => eval(a, w)?.neg(),
        Kind::Abs(a) => eval(a, w)?.abs(),
        Kind::Sqrt(a) => eval(a, 2 * w)?.sqrt(w)?,
        Kind::Exp(a) => eval(a, w + 8)?.exp(w),
        Kind::Ln(a) => eval(a, w + 8)?.ln(w)?,
        Kind::PowI(a, k) => eval(a, w + 8)?.powi(*k, w),
        Kind::Add(a, b) => eval(a, w)?.add(&eval(b, w)?, w),
        Kind::Sub(a, b) => eval(a, w)?.sub(&eval(b, w)?, w),
        Kind::Mul(a, b) => eval(a, w)?.mul(&eval(b, w)?, w),
        Kind::Div(a, b) => eval(a, w)?.div(&eval(b, w)?, w)?,
        Kind::Pow(a, b) => eval(a, w + 8)?.pow(&eval(b, w + 8)?, w)?,
        Kind::Min(a, b) => eval(a, w)?.min(&eval(b, w)?),
        Kind::Max(a, b) => eval(a, w)?.max(&eval(b, w)?),
        Kind::Root { coeffs, lo, hi } => {
            let cs = coeffs.iter().map(|c| eval(c, w + 16)).collect::<Result<Vec<_>, _>>()?;
            bisect(&cs, eval(lo, w)?.lo().clone(), eval(hi, w)?.hi().clone(), w)
        }
    })
}

fn horner(cs: &[Interval], x: &Dyadic, w: u32) -> Interval {
    let xi = Interval::point(x.clone());
    cs.iter().rev().fold(Interval::zero(), |acc, c| acc.mul(&xi, w + 16).add(c, w + 16))
}

fn bisect(cs: &[Interval], mut a: Dyadic, mut b: Dyadic, w: u32) -> Interval {
    loop {
        let iv = Interval::new(a.clone(), b.clone());
        if iv.meets_precision(w) {
            return iv;
        }
        let m = a.add(&b).shl(-1);
        let v = horner(cs, &m, w);
        if v.is_positive() {
            b = m;
        } else if v.is_negative() {
            a = m;
        } else if v.is_point() {
            return Interval::point(m);
        } else {
            // the root is close to m: tighten from the quarter points instead
            let q1 = a.add(&m).shl(-1);
            let q3 = m.add(&b).shl(-1);
            let (l, r) = (horner(cs, &q1, w), horner(cs, &q3, w));
            if !(l.is_negative() && r.is_positive()) {
                return iv;
            }
            a = q1;
            b = q3;
        }
    }
}

/// A certified real: an exact expression and an enclosing interval.
#[derive(Clone)]
pub struct CertifiedScalar {
    node: Arc<Node>,
    iv: Interval,
    prec: u32,
}

impl fmt::Debug for CertifiedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CertifiedScalar({})", self.iv)
    }
}

impl fmt::Display for CertifiedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.iv)
    }
}

impl PartialEq for CertifiedScalar {
    /// Structural identity of the defining expressions.
    fn eq(&self, other: &Self) -> bool {
        self.node == other.node
    }
}

fn as_rat(n: &Arc<Node>) -> Option<&BigRational> {
    match &n.kind {
        Kind::Rat(r) => Some(r),
        _ => None,
    }
}

fn rat_pow(r: &BigRational, k: i64) -> BigRational {
    let p = num_traits::pow(r.clone(), k.unsigned_abs() as usize);
    if k < 0 {
        p.recip()
    } else {
        p
    }
}

/// Exact `q`-th root of a positive rational, when it exists.
fn exact_root(r: &BigRational, q: u32) -> Option<BigRational> {
    if !r.is_positive() {
        return None;
    }
    let n = r.numer().nth_root(q);
    let d = r.denom().nth_root(q);
    (num_traits::pow(n.clone(), q as usize) == *r.numer() && num_traits::pow(d.clone(), q as usize) == *r.denom())
        .then(|| BigRational::new(n, d))
}

impl CertifiedScalar {
    fn build(kind: Kind) -> Result<CertifiedScalar, ScalarError> {
        let node = Node::new(kind);
        let mut w = INITIAL_BITS;
        loop {
            match eval(&node, w) {
                Ok(iv) => return Ok(CertifiedScalar { node, iv, prec: 0 }),
                Err(e) if w >= BUILD_CEILING => return Err(e),
                Err(_) => w *= 2,
            }
        }
    }

    fn build_total(kind: Kind) -> CertifiedScalar {
        CertifiedScalar::build(kind).expect("operation defined for all operands in its domain")
    }

    pub fn from_rational(r: BigRational) -> CertifiedScalar {
        let iv = Interval::from_rational(&r, INITIAL_BITS);
        CertifiedScalar { node: Node::new(Kind::Rat(r)), iv, prec: 0 }
    }

    pub fn from_int(n: impl Into<BigInt>) -> CertifiedScalar {
        CertifiedScalar::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn from_ratio(p: i64, q: i64) -> CertifiedScalar {
        CertifiedScalar::from_rational(BigRational::new(p.into(), q.into()))
    }

    pub fn zero() -> CertifiedScalar {
        CertifiedScalar::from_int(0)
    }

    pub fn one() -> CertifiedScalar {
        CertifiedScalar::from_int(1)
    }

    /// The exact value of a finite `f64`.
    pub fn from_f64(x: f64) -> Option<CertifiedScalar> {
        Dyadic::from_f64(x).map(|d| CertifiedScalar::from_rational(d.to_rational()))
    }

    /// The exact value of a decimal literal such as `-0.34`.
    pub fn parse_decimal(s: &str) -> Option<CertifiedScalar> {
        super::theta::parse_decimal(s).ok().map(CertifiedScalar::from_rational)
    }

    /// A component of θ; rational components fold to their exact value.
    pub fn theta(c: &Component) -> CertifiedScalar {
        match c.exact_value() {
            Some(v) => CertifiedScalar::from_rational(v),
            None => CertifiedScalar::build_total(Kind::Theta(Arc::new(c.clone()))),
        }
    }

    /// Current enclosure.
    pub fn interval(&self) -> &Interval {
        &self.iv
    }

    /// Precision certified by the last `refine`, or 0 for a freshly built value.
    pub fn precision_bits(&self) -> u32 {
        self.prec
    }

    pub fn lower(&self) -> &Dyadic {
        self.iv.lo()
    }

    pub fn upper(&self) -> &Dyadic {
        self.iv.hi()
    }

    pub fn exact(&self) -> Option<&BigRational> {
        as_rat(&self.node)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact().is_some_and(|r| r.is_zero())
    }

    pub fn approx_f64(&self) -> f64 {
        self.iv.approx_f64()
    }

    /// Rigorous `f64` bounds.
    pub fn f64_bounds(&self) -> (f64, f64) {
        self.iv.to_f64_bounds()
    }

    /// Enclosure at working precision `w` (not necessarily meeting `w` bits).
    pub fn interval_at(&self, w: u32) -> Result<Interval, ScalarError> {
        let iv = eval(&self.node, w)?;
        Ok(iv.intersect(&self.iv).unwrap_or(iv))
    }

    /// Tighten until the width invariant holds at `prec` bits.
    pub fn refine(&self, prec: u32) -> Result<CertifiedScalar, ScalarError> {
        if self.prec >= prec || (self.iv.meets_precision(prec) && self.prec > 0) {
            return Ok(CertifiedScalar { prec: self.prec.max(prec), ..self.clone() });
        }
        let ceiling = (prec * 16).max(2048);
        let mut w = prec + 32;
        loop {
            let iv = self.interval_at(w)?;
            if iv.meets_precision(prec) {
                let out = iv.round_outward(prec + 8);
                let iv = if out.meets_precision(prec) { out } else { iv };
                return Ok(CertifiedScalar { node: self.node.clone(), iv, prec });
            }
            if w >= ceiling {
                return Err(ScalarError::PrecisionExhausted { bits: prec });
            }
            w = (w * 2).min(ceiling);
        }
    }

    /// Like `refine`, but keeps the best enclosure found instead of failing.
    pub fn refine_lossy(&self, prec: u32) -> CertifiedScalar {
        match self.refine(prec) {
            Ok(s) => s,
            Err(_) => {
                let iv = self.interval_at((prec * 16).max(2048)).unwrap_or_else(|_| self.iv.clone());
                CertifiedScalar { node: self.node.clone(), iv, prec: self.prec }
            }
        }
    }

    pub fn neg(&self) -> CertifiedScalar {
        if let Some(r) = self.exact() {
            return CertifiedScalar::from_rational(-r);
        }
        CertifiedScalar::build_total(Kind::Neg(self.node.clone()))
    }

    pub fn abs(&self) -> CertifiedScalar {
        if let Some(r) = self.exact() {
            return CertifiedScalar::from_rational(r.abs());
        }
        CertifiedScalar::build_total(Kind::Abs(self.node.clone()))
    }

    pub fn add(&self, o: &CertifiedScalar) -> CertifiedScalar {
        match (self.exact(), o.exact()) {
            (Some(a), Some(b)) => CertifiedScalar::from_rational(a + b),
            (Some(a), _) if a.is_zero() => o.clone(),
            (_, Some(b)) if b.is_zero() => self.clone(),
            _ => CertifiedScalar::build_total(Kind::Add(self.node.clone(), o.node.clone())),
        }
    }

    pub fn sub(&self, o: &CertifiedScalar) -> CertifiedScalar {
        match (self.exact(), o.exact()) {
            (Some(a), Some(b)) => CertifiedScalar::from_rational(a - b),
            (_, Some(b)) if b.is_zero() => self.clone(),
            _ => CertifiedScalar::build_total(Kind::Sub(self.node.clone(), o.node.clone())),
        }
    }

    pub fn mul(&self, o: &CertifiedScalar) -> CertifiedScalar {
        match (self.exact(), o.exact()) {
            (Some(a), Some(b)) => CertifiedScalar::from_rational(a * b),
            (Some(a), _) if a.is_zero() => CertifiedScalar::zero(),
            (_, Some(b)) if b.is_zero() => CertifiedScalar::zero(),
            (Some(a), _) if a.is_one() => o.clone(),
            (_, Some(b)) if b.is_one() => self.clone(),
            _ => CertifiedScalar::build_total(Kind::Mul(self.node.clone(), o.node.clone())),
        }
    }

    pub fn div(&self, o: &CertifiedScalar) -> Result<CertifiedScalar, ScalarError> {
        match (self.exact(), o.exact()) {
            (_, Some(b)) if b.is_zero() => Err(ScalarError::DivisionByZero),
            (Some(a), Some(b)) => Ok(CertifiedScalar::from_rational(a / b)),
            (_, Some(b)) if b.is_one() => Ok(self.clone()),
            (Some(a), _) if a.is_zero() => Ok(CertifiedScalar::zero()),
            _ => CertifiedScalar::build(Kind::Div(self.node.clone(), o.node.clone())),
        }
    }

    pub fn recip(&self) -> Result<CertifiedScalar, ScalarError> {
        CertifiedScalar::one().div(self)
    }

    pub fn sqr(&self) -> CertifiedScalar {
        self.powi(2)
    }

    pub fn powi(&self, k: u32) -> CertifiedScalar {
        match (self.exact(), k) {
            (Some(r), _) => CertifiedScalar::from_rational(rat_pow(r, k as i64)),
            (_, 0) => CertifiedScalar::one(),
            (_, 1) => self.clone(),
            _ => CertifiedScalar::build_total(Kind::PowI(self.node.clone(), k)),
        }
    }

    /// Square root of a quantity known to be nonnegative.
    pub fn sqrt(&self) -> Result<CertifiedScalar, ScalarError> {
        if let Some(r) = self.exact() {
            if r.is_negative() {
                return Err(ScalarError::SqrtOfNegative);
            }
            if let Some(s) = exact_sqrt(r) {
                return Ok(CertifiedScalar::from_rational(s));
            }
        }
        CertifiedScalar::build(Kind::Sqrt(self.node.clone()))
    }

    pub fn exp(&self) -> CertifiedScalar {
        if self.is_exact_zero() {
            return CertifiedScalar::one();
        }
        CertifiedScalar::build_total(Kind::Exp(self.node.clone()))
    }

    pub fn ln(&self) -> Result<CertifiedScalar, ScalarError> {
        if let Some(r) = self.exact() {
            if !r.is_positive() {
                return Err(ScalarError::LogOfNonPositive);
            }
            if r.is_one() {
                return Ok(CertifiedScalar::zero());
            }
        }
        CertifiedScalar::build(Kind::Ln(self.node.clone()))
    }

    /// `self^e` for `self > 0`; exact when both are rational and the result is.
    pub fn pow(&self, e: &CertifiedScalar) -> Result<CertifiedScalar, ScalarError> {
        if let Some(q) = e.exact() {
            if q.is_zero() {
                return Ok(CertifiedScalar::one());
            }
            if q.is_integer() {
                if let Some(k) = q.to_integer().to_i64().filter(|k| k.unsigned_abs() <= 1 << 12) {
                    return if k >= 0 {
                        Ok(self.powi(k as u32))
                    } else {
                        self.powi(k.unsigned_abs() as u32).recip()
                    };
                }
            }
            if let Some(b) = self.exact() {
                if b.is_one() {
                    return Ok(CertifiedScalar::one());
                }
                let den = q.denom().to_u32().filter(|d| *d <= 64);
                let num = q.numer().to_i64().filter(|k| k.unsigned_abs() <= 1 << 12);
                if let (Some(d), Some(k)) = (den, num) {
                    if let Some(root) = exact_root(b, d) {
                        return Ok(CertifiedScalar::from_rational(rat_pow(&root, k)));
                    }
                }
            }
        }
        if let Some(b) = self.exact() {
            if !b.is_positive() {
                return Err(ScalarError::LogOfNonPositive);
            }
        }
        CertifiedScalar::build(Kind::Pow(self.node.clone(), e.node.clone()))
    }

    pub fn min(&self, o: &CertifiedScalar) -> CertifiedScalar {
        if let (Some(a), Some(b)) = (self.exact(), o.exact()) {
            return CertifiedScalar::from_rational(a.min(b).clone());
        }
        if self == o {
            return self.clone();
        }
        CertifiedScalar::build_total(Kind::Min(self.node.clone(), o.node.clone()))
    }

    pub fn max(&self, o: &CertifiedScalar) -> CertifiedScalar {
        if let (Some(a), Some(b)) = (self.exact(), o.exact()) {
            return CertifiedScalar::from_rational(a.max(b).clone());
        }
        if self == o {
            return self.clone();
        }
        CertifiedScalar::build_total(Kind::Max(self.node.clone(), o.node.clone()))
    }

    /// Sum of many terms as a balanced tree.
    pub fn sum(xs: &[CertifiedScalar]) -> CertifiedScalar {
        reduce(xs, CertifiedScalar::zero, |a, b| a.add(b))
    }

    /// Minimum of a nonempty list as a balanced tree.
    pub fn min_of(xs: &[CertifiedScalar]) -> CertifiedScalar {
        assert!(!xs.is_empty(), "minimum of an empty list");
        reduce(xs, CertifiedScalar::zero, |a, b| a.min(b))
    }

    /// Maximum of a nonempty list as a balanced tree.
    pub fn max_of(xs: &[CertifiedScalar]) -> CertifiedScalar {
        assert!(!xs.is_empty(), "maximum of an empty list");
        reduce(xs, CertifiedScalar::zero, |a, b| a.max(b))
    }

    /// The unique root in `[lo, hi]` of the polynomial with coefficients `coeffs`
    /// (lowest degree first). The caller guarantees the polynomial is `<= 0` at
    /// `lo`, `>= 0` at `hi`, negative left of the root and positive right of it.
    pub fn poly_root(coeffs: &[CertifiedScalar], lo: &CertifiedScalar, hi: &CertifiedScalar) -> CertifiedScalar {
        CertifiedScalar::build_total(Kind::Root {
            coeffs: coeffs.iter().map(|c| c.node.clone()).collect(),
            lo: lo.node.clone(),
            hi: hi.node.clone(),
        })
    }

    /// Sign against zero.
    pub fn sign(&self, max_precision: u32) -> Comparison {
        certified_compare(self, &CertifiedScalar::zero(), max_precision)
    }

    /// `[lo, hi]` as exact decimal strings after outward rounding to `prec` bits.
    pub fn bounds_strings(&self, prec: u32) -> [String; 2] {
        let iv = self.iv.round_outward(prec.max(8) + 8);
        [iv.lo().to_decimal_string(), iv.hi().to_decimal_string()]
    }
}

fn reduce<F>(xs: &[CertifiedScalar], empty: fn() -> CertifiedScalar, f: F) -> CertifiedScalar
where
    F: Fn(&CertifiedScalar, &CertifiedScalar) -> CertifiedScalar + Copy,
{
    match xs.len() {
        0 => empty(),
        1 => xs[0].clone(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            f(&reduce(a, empty, f), &reduce(b, empty, f))
        }
    }
}

fn separate(a: &Interval, b: &Interval) -> Option<Comparison> {
    if a.hi() < b.lo() {
        Some(Comparison::Less)
    } else if a.lo() > b.hi() {
        Some(Comparison::Greater)
    } else {
        None
    }
}

/// Compare two certified reals, refining both up to `max_precision` bits.
pub fn certified_compare(a: &CertifiedScalar, b: &CertifiedScalar, max_precision: u32) -> Comparison {
    if let (Some(x), Some(y)) = (a.exact(), b.exact()) {
        return match x.cmp(y) {
            Ordering::Less => Comparison::Less,
            Ordering::Greater => Comparison::Greater,
            Ordering::Equal => Comparison::EqualProven,
        };
    }
    if a == b {
        return Comparison::EqualProven;
    }
    if let Some(c) = separate(&a.iv, &b.iv) {
        return c;
    }
    let mut w = INITIAL_BITS;
    while w < max_precision {
        w = (w * 2).min(max_precision);
        let (Ok(x), Ok(y)) = (a.interval_at(w), b.interval_at(w)) else {
            continue;
        };
        if let Some(c) = separate(&x, &y) {
            return c;
        }
    }
    Comparison::Undecided
}

/// A certified real or `+∞`.
#[derive(Clone, Debug, PartialEq)]
pub enum ExtScalar {
    Finite(CertifiedScalar),
    Infinite,
}

impl ExtScalar {
    pub fn finite(&self) -> Option<&CertifiedScalar> {
        match self {
            ExtScalar::Finite(s) => Some(s),
            ExtScalar::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtScalar::Infinite)
    }

    /// `1/x` with `1/∞ = 0`.
    pub fn recip(&self) -> Result<CertifiedScalar, ScalarError> {
        match self {
            ExtScalar::Finite(s) => s.recip(),
            ExtScalar::Infinite => Ok(CertifiedScalar::zero()),
        }
    }

    pub fn refine_lossy(&self, prec: u32) -> ExtScalar {
        match self {
            ExtScalar::Finite(s) => ExtScalar::Finite(s.refine_lossy(prec)),
            ExtScalar::Infinite => ExtScalar::Infinite,
        }
    }

    /// JSON rendering: `[lo, hi]` decimal strings or `"inf"`.
    pub fn to_json(&self, prec: u32) -> serde_json::Value {
        match self {
            ExtScalar::Finite(s) => serde_json::json!(s.bounds_strings(prec)),
            ExtScalar::Infinite => serde_json::json!("inf"),
        }
    }
}

impl From<CertifiedScalar> for ExtScalar {
    fn from(s: CertifiedScalar) -> Self {
        ExtScalar::Finite(s)
    }
}

/// Comparison on the extended line; `∞` equals itself.
pub fn compare_ext(a: &ExtScalar, b: &ExtScalar, max_precision: u32) -> Comparison {
    match (a, b) {
        (ExtScalar::Infinite, ExtScalar::Infinite) => Comparison::EqualProven,
        (ExtScalar::Infinite, _) => Comparison::Greater,
        (_, ExtScalar::Infinite) => Comparison::Less,
        (ExtScalar::Finite(x), ExtScalar::Finite(y)) => certified_compare(x, y, max_precision),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> CertifiedScalar {
        CertifiedScalar::from_int(2).sqrt().unwrap()
    }

    #[test]
    fn compare_examples() {
        let a = CertifiedScalar::parse_decimal("1.41").unwrap();
        assert_eq!(certified_compare(&sqrt2(), &a, 128), Comparison::Greater);
        assert_eq!(certified_compare(&a, &sqrt2(), 128), Comparison::Less);
        let t = CertifiedScalar::from_ratio(1, 3);
        assert_eq!(certified_compare(&t, &CertifiedScalar::from_ratio(1, 3), 64), Comparison::EqualProven);
        let sq = sqrt2().mul(&sqrt2());
        assert_eq!(certified_compare(&sq, &CertifiedScalar::from_int(2), 64), Comparison::Undecided);
        assert_eq!(certified_compare(&sqrt2(), &sqrt2(), 64), Comparison::EqualProven);
    }

    #[test]
    fn refine_meets_width_and_never_widens() {
        let x = CertifiedScalar::from_int(3).sqrt().unwrap().ln().unwrap();
        let mut prev = x.refine(16).unwrap();
        for p in [32, 64, 128, 256] {
            let r = x.refine(p).unwrap();
            assert!(r.interval().meets_precision(p));
            assert!(r.lower() >= prev.lower() || p > prev.precision_bits());
            prev = r;
        }
    }

    #[test]
    fn exact_folding() {
        let four = CertifiedScalar::from_int(4);
        let half = CertifiedScalar::from_ratio(1, 2);
        assert_eq!(four.pow(&half).unwrap().exact(), Some(&BigRational::from_integer(2.into())));
        let m = CertifiedScalar::from_ratio(-1, 2);
        assert_eq!(four.pow(&m).unwrap().exact(), Some(&BigRational::new(1.into(), 2.into())));
        assert!(CertifiedScalar::zero().ln().is_err());
        assert!(CertifiedScalar::one().div(&CertifiedScalar::zero()).is_err());
    }

    #[test]
    fn poly_root_of_quadratic() {
        // x^2 - 2 on [1, 2]
        let cs = [CertifiedScalar::from_int(-2), CertifiedScalar::zero(), CertifiedScalar::one()];
        let r = CertifiedScalar::poly_root(&cs, &CertifiedScalar::one(), &CertifiedScalar::from_int(2));
        let r = r.refine(100).unwrap();
        assert!(r.interval().overlaps(sqrt2().refine(100).unwrap().interval()));
    }
}
