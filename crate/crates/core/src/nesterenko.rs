//! Nesterenko's criterion at instance level: checking the cylinder hypothesis
//! on finite evidence, the exponents `δ(d)` and the dimension bound, direct
//! angle checks for rational subspaces, and the refinement under linear
//! independence.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::certified::{
    certified_compare, max_bits, theta::parse_decimal, CertifiedScalar, Comparison, Dyadic, ExtScalar,
    ScalarError, ThetaSpec,
};
use crate::geometry::{
    angle_tangent, height, int_from_json, project, saturate, GeometryError, IntegerVector, LineFrame,
    RationalSubspace,
};
use crate::par;
use crate::records::{RecordKind, RecordList};

pub const ASYMPTOTIC_BANNER: &str =
    "the limsup condition on log t_(k+1) / log t_k is asymptotic; finite data can only report this statistic, never prove it";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Bound {
    /// `r(x_k) <= t_k`
    R,
    /// `c1 t_k^-β <= h(x_k)`
    LowerH,
    /// `h(x_k) <= c2 t_k^-α`
    UpperH,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bound::R => "R",
            Bound::LowerH => "LOWER_H",
            Bound::UpperH => "UPPER_H",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NesterenkoError {
    Invalid(String),
    EntryViolation { k: usize, bound: Bound },
    DimensionTooLarge { d: u32 },
    ConditionFails { value: [String; 2] },
    PrecisionExhausted(String),
    Geometry(GeometryError),
}

impl fmt::Display for NesterenkoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NesterenkoError::Invalid(s) => write!(f, "invalid input: {s}"),
            NesterenkoError::EntryViolation { k, bound } => write!(f, "entry {k} violates {bound}"),
            NesterenkoError::DimensionTooLarge { d } => write!(f, "d = {d} is not below (1+β)/(1+β-α)"),
            NesterenkoError::ConditionFails { value } => {
                write!(f, "refinement condition fails: value in [{}, {}] is not above n-1", value[0], value[1])
            }
            NesterenkoError::PrecisionExhausted(s) => write!(f, "precision exhausted: {s}"),
            NesterenkoError::Geometry(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for NesterenkoError {}

impl From<GeometryError> for NesterenkoError {
    fn from(e: GeometryError) -> Self {
        NesterenkoError::Geometry(e)
    }
}

impl From<ScalarError> for NesterenkoError {
    fn from(e: ScalarError) -> Self {
        NesterenkoError::Geometry(GeometryError::Scalar(e))
    }
}

#[derive(Clone, Debug)]
pub struct EvidenceEntry {
    pub t: CertifiedScalar,
    pub x: IntegerVector,
}

#[derive(Clone, Debug)]
pub struct EvidenceSequence {
    pub alpha: CertifiedScalar,
    pub beta: CertifiedScalar,
    pub c1: CertifiedScalar,
    pub c2: CertifiedScalar,
    pub entries: Vec<EvidenceEntry>,
    /// Carried along by packaged evidence; optional in files.
    pub theta: Option<ThetaSpec>,
}

fn positive(s: &CertifiedScalar, what: &str, maxp: u32) -> Result<(), NesterenkoError> {
    match s.sign(maxp) {
        Comparison::Greater => Ok(()),
        _ => Err(NesterenkoError::Invalid(format!("{what} must be certified positive"))),
    }
}

impl EvidenceSequence {
    pub fn new(
        alpha: CertifiedScalar,
        beta: CertifiedScalar,
        c1: CertifiedScalar,
        c2: CertifiedScalar,
        entries: Vec<EvidenceEntry>,
        precision: u32,
    ) -> Result<EvidenceSequence, NesterenkoError> {
        let maxp = max_bits(precision);
        positive(&alpha, "alpha", maxp)?;
        positive(&c1, "c1", maxp)?;
        positive(&c2, "c2", maxp)?;
        if !certified_compare(&beta, &alpha, maxp).is_ge() || certified_compare(&beta, &alpha, maxp) == Comparison::Undecided {
            return Err(NesterenkoError::Invalid("beta must be certified >= alpha".into()));
        }
        for (i, e) in entries.iter().enumerate() {
            positive(&e.t, &format!("t_{}", i + 1), maxp)?;
        }
        for (i, w) in entries.windows(2).enumerate() {
            if certified_compare(&w[0].t, &w[1].t, maxp) != Comparison::Less {
                return Err(NesterenkoError::Invalid(format!("t_k must increase strictly (entry {})", i + 2)));
            }
        }
        Ok(EvidenceSequence { alpha, beta, c1, c2, entries, theta: None })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> =
            self.entries.iter().map(|e| serde_json::json!({"t": scalar_text(&e.t), "x": e.x})).collect();
        let mut o = serde_json::json!({
            "alpha": scalar_text(&self.alpha),
            "beta": scalar_text(&self.beta),
            "c1": scalar_text(&self.c1),
            "c2": scalar_text(&self.c2),
            "entries": entries,
        });
        if let Some(t) = &self.theta {
            o["theta"] = serde_json::json!(t.to_string());
        }
        o
    }

    pub fn from_json(v: &serde_json::Value, precision: u32) -> Result<EvidenceSequence, NesterenkoError> {
        let field = |k: &str| -> Result<CertifiedScalar, NesterenkoError> {
            v.get(k).ok_or_else(|| NesterenkoError::Invalid(format!("missing `{k}`"))).and_then(scalar_from_json)
        };
        let list = v
            .get("entries")
            .and_then(|e| e.as_array())
            .ok_or_else(|| NesterenkoError::Invalid("missing `entries` array".into()))?;
        let mut entries = Vec::with_capacity(list.len());
        for e in list {
            let t = e.get("t").ok_or_else(|| NesterenkoError::Invalid("entry without `t`".into())).and_then(scalar_from_json)?;
            let x = e
                .get("x")
                .and_then(|x| x.as_array())
                .ok_or_else(|| NesterenkoError::Invalid("entry without `x` array".into()))?
                .iter()
                .map(|c| int_from_json(c).ok_or_else(|| NesterenkoError::Invalid(format!("bad coordinate {c}"))))
                .collect::<Result<Vec<BigInt>, _>>()?;
            entries.push(EvidenceEntry { t, x: IntegerVector::new(x) });
        }
        let mut ev = EvidenceSequence::new(field("alpha")?, field("beta")?, field("c1")?, field("c2")?, entries, precision)?;
        if let Some(t) = v.get("theta").and_then(|t| t.as_str()) {
            ev.theta = Some(t.parse().map_err(|e| NesterenkoError::Invalid(format!("{e}")))?);
        }
        Ok(ev)
    }
}

/// Exact text for an exact scalar, otherwise the midpoint of a tight enclosure.
fn scalar_text(s: &CertifiedScalar) -> String {
    match s.exact() {
        Some(q) => rational_text(q),
        None => s.refine_lossy(128).interval().mid().to_decimal_string(),
    }
}

/// A decimal when the denominator divides a power of ten, else `p/q`.
fn rational_text(q: &BigRational) -> String {
    if q.denom().is_one() {
        return q.numer().to_string();
    }
    let ten = BigInt::from(10);
    let mut scale = BigInt::one();
    for k in 1..=60usize {
        scale *= &ten;
        if (&scale % q.denom()).is_zero() {
            let digits = (q.numer().abs() * &scale / q.denom()).to_string();
            let digits = format!("{digits:0>width$}", width = k + 1);
            let (int, frac) = digits.split_at(digits.len() - k);
            let sign = if q.is_negative() { "-" } else { "" };
            return format!("{sign}{int}.{}", frac.trim_end_matches('0'));
        }
    }
    format!("{}/{}", q.numer(), q.denom())
}

/// Round a positive dyadic to `sig` significant decimal digits, outward in `up`.
fn round_decimal(x: &Dyadic, sig: i32, up: bool) -> BigRational {
    let q = x.to_rational();
    let mag = x.to_f64(crate::certified::Round::Down).abs().log10().floor() as i32;
    let k = (sig - 1 - mag).max(0) as u32;
    let scale = BigInt::from(10).pow(k);
    let y = &q * BigRational::from_integer(scale.clone());
    let n = if up { y.ceil() } else { y.floor() };
    BigRational::new(n.to_integer(), scale)
}

fn scalar_from_json(v: &serde_json::Value) -> Result<CertifiedScalar, NesterenkoError> {
    let text = match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Number(n) => n.to_string(),
        _ => return Err(NesterenkoError::Invalid(format!("expected a number, found {v}"))),
    };
    parse_scalar(&text).ok_or_else(|| NesterenkoError::Invalid(format!("cannot parse `{text}`")))
}

/// `p/q` or a decimal.
pub fn parse_scalar(s: &str) -> Option<CertifiedScalar> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(CertifiedScalar::from_rational(BigRational::new(p, q)));
    }
    parse_decimal(s).ok().map(CertifiedScalar::from_rational)
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryCheck {
    pub k: usize,
    pub r_le_t: Comparison,
    pub lower_h: Comparison,
    pub upper_h: Comparison,
}

impl EntryCheck {
    /// The first bound that is not certified to hold.
    pub fn failure(&self) -> Option<Bound> {
        let ok = |c: Comparison| matches!(c, Comparison::Less | Comparison::EqualProven);
        if !ok(self.r_le_t) {
            Some(Bound::R)
        } else if !ok(self.lower_h) {
            Some(Bound::LowerH)
        } else if !ok(self.upper_h) {
            Some(Bound::UpperH)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug)]
pub struct HypothesisReport {
    pub entries: Vec<EntryCheck>,
    /// `max log t_(k+1) / log t_k` over consecutive pairs with `t_k > 1`.
    pub ratio_statistic: Option<CertifiedScalar>,
    /// The `k` attaining the statistic.
    pub ratio_at: Option<usize>,
}

impl HypothesisReport {
    pub fn first_violation(&self) -> Option<(usize, Bound)> {
        self.entries.iter().find_map(|e| e.failure().map(|b| (e.k, b)))
    }

    pub fn to_json(&self, precision: u32) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|e| {
                serde_json::json!({
                    "k": e.k,
                    "r_le_t": e.r_le_t,
                    "lower_h": e.lower_h,
                    "upper_h": e.upper_h,
                    "ok": e.failure().is_none(),
                })
            })
            .collect();
        serde_json::json!({
            "entries": entries,
            "all_hold": self.first_violation().is_none(),
            "ratio_statistic": self.ratio_statistic.as_ref().map(|s| s.bounds_strings(precision)),
            "ratio_at": self.ratio_at,
            "note": ASYMPTOTIC_BANNER,
        })
    }
}

/// Check every entry independently and report all verdicts.
pub fn check_entries(frame: &LineFrame, ev: &EvidenceSequence, precision: u32) -> Result<HypothesisReport, NesterenkoError> {
    if ev.entries.len() < 2 {
        return Err(NesterenkoError::Invalid("at least two entries are needed".into()));
    }
    let maxp = max_bits(precision);
    let checks = par::map(&ev.entries.iter().enumerate().collect::<Vec<_>>(), |(i, e)| {
        let p = project(frame, &e.x, precision)?;
        let lo = ev.c1.mul(&e.t.pow(&ev.beta.neg())?);
        let hi = ev.c2.mul(&e.t.pow(&ev.alpha.neg())?);
        Ok::<_, NesterenkoError>(EntryCheck {
            k: i + 1,
            r_le_t: certified_compare(&p.r, &e.t, maxp),
            lower_h: certified_compare(&lo, &p.h, maxp),
            upper_h: certified_compare(&p.h, &hi, maxp),
        })
    });
    let entries = checks.into_iter().collect::<Result<Vec<_>, _>>()?;
    let one = CertifiedScalar::one();
    let mut best: Option<(CertifiedScalar, usize)> = None;
    for (i, w) in ev.entries.windows(2).enumerate() {
        if certified_compare(&w[0].t, &one, maxp) != Comparison::Greater {
            continue;
        }
        let q = w[1].t.ln()?.div(&w[0].t.ln()?)?;
        best = match best {
            Some((b, k)) if certified_compare(&q, &b, maxp) != Comparison::Greater => Some((b, k)),
            _ => Some((q, i + 1)),
        };
    }
    let (ratio_statistic, ratio_at) = match best {
        Some((q, k)) => (Some(q), Some(k)),
        None => (None, None),
    };
    Ok(HypothesisReport { entries, ratio_statistic, ratio_at })
}

/// Check the hypothesis; the first failing entry is an error.
pub fn check_hypothesis(frame: &LineFrame, ev: &EvidenceSequence, precision: u32) -> Result<HypothesisReport, NesterenkoError> {
    let rep = check_entries(frame, ev, precision)?;
    match rep.first_violation() {
        Some((k, bound)) => Err(NesterenkoError::EntryViolation { k, bound }),
        None => Ok(rep),
    }
}

/// `δ(d) = (1+β) / (1+β - d(1+β-α))`, for `d < (1+β)/(1+β-α)`.
pub fn delta(alpha: &CertifiedScalar, beta: &CertifiedScalar, d: u32, precision: u32) -> Result<CertifiedScalar, NesterenkoError> {
    if d == 0 {
        return Err(NesterenkoError::Invalid("d must be at least 1".into()));
    }
    let one = CertifiedScalar::one();
    let num = one.add(beta);
    let gap = num.sub(alpha);
    let den = num.sub(&gap.mul(&CertifiedScalar::from_int(d)));
    match den.sign(max_bits(precision)) {
        Comparison::Greater => Ok(num.div(&den)?),
        Comparison::Undecided => Err(NesterenkoError::PrecisionExhausted(format!("proviso for d = {d}"))),
        _ => Err(NesterenkoError::DimensionTooLarge { d }),
    }
}

#[derive(Clone, Debug)]
pub struct DimensionBound {
    /// `(1+β)/(1+β-α)`
    pub bound: CertifiedScalar,
    /// `⌈bound⌉`, the integer conclusion; `None` if the enclosure straddles an integer.
    pub at_least: Option<BigInt>,
}

impl DimensionBound {
    pub fn to_json(&self, precision: u32) -> serde_json::Value {
        serde_json::json!({
            "bound": self.bound.bounds_strings(precision),
            "dim_at_least": self.at_least.as_ref().map(|b| b.to_string()),
        })
    }
}

/// Lower bound for `dim_Q(Q + Qθ_1 + ... + Qθ_n)`.
pub fn dimension_bound(alpha: &CertifiedScalar, beta: &CertifiedScalar, precision: u32) -> Result<DimensionBound, NesterenkoError> {
    let maxp = max_bits(precision);
    positive(alpha, "alpha", maxp)?;
    let one = CertifiedScalar::one();
    let num = one.add(beta);
    let bound = num.div(&num.sub(alpha))?;
    let at_least = match bound.exact() {
        Some(q) => Some(q.ceil().to_integer()),
        None => {
            let iv = bound.refine_lossy(maxp.min(256));
            let (lo, hi) = (iv.lower().floor(), iv.upper().floor());
            (lo == hi && Dyadic::from_int(lo.clone()) < *iv.lower()).then(|| lo + 1)
        }
    };
    Ok(DimensionBound { bound, at_least })
}

/// Adjusted parameters of the first proof step.
#[derive(Clone, Debug)]
pub struct NesterenkoParams {
    pub eps: CertifiedScalar,
    pub eps_prime: CertifiedScalar,
    pub alpha_prime: CertifiedScalar,
    pub beta_prime: CertifiedScalar,
    pub delta_prime: CertifiedScalar,
    pub c3: CertifiedScalar,
}

impl NesterenkoParams {
    pub fn new(
        alpha: &CertifiedScalar,
        beta: &CertifiedScalar,
        eps: CertifiedScalar,
        eps_prime: CertifiedScalar,
        c3: CertifiedScalar,
        precision: u32,
    ) -> Result<NesterenkoParams, NesterenkoError> {
        let maxp = max_bits(precision);
        positive(&eps, "eps", maxp)?;
        positive(&eps_prime, "eps'", maxp)?;
        positive(&c3, "c3", maxp)?;
        if certified_compare(&eps_prime, &CertifiedScalar::one(), maxp) != Comparison::Less {
            return Err(NesterenkoError::Invalid("eps' must be below 1".into()));
        }
        let one = CertifiedScalar::one();
        let alpha_prime = one.sub(&eps_prime).mul(alpha);
        let beta_prime = one.add(&eps_prime).mul(beta);
        let delta_prime = one.add(&beta_prime).div(&alpha_prime)?;
        Ok(NesterenkoParams { eps, eps_prime, alpha_prime, beta_prime, delta_prime, c3 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AngleVerdict {
    Holds,
    Violated,
    Undecided,
}

#[derive(Clone, Debug)]
pub struct AngleCheck {
    pub verdict: AngleVerdict,
    pub phi: ExtScalar,
    pub height: CertifiedScalar,
    pub rhs: CertifiedScalar,
    /// `ℓ ⊥ L`: φ is infinite and the bound holds trivially.
    pub degenerate: bool,
    /// For lines: `r(v) >= h(v)^(1-δ')`.
    pub sharp: Option<Comparison>,
}

impl AngleCheck {
    pub fn to_json(&self, precision: u32) -> serde_json::Value {
        serde_json::json!({
            "verdict": self.verdict,
            "phi": self.phi.to_json(precision),
            "height": self.height.bounds_strings(precision),
            "rhs": self.rhs.bounds_strings(precision),
            "degenerate": self.degenerate,
            "sharp_d1": self.sharp.map(|c| match c {
                Comparison::Greater | Comparison::EqualProven => "HOLDS",
                Comparison::Less => "VIOLATED",
                Comparison::Undecided => "UNDECIDED",
            }),
        })
    }
}

/// `φ(L) >= c3 H(L)^(-δ-ε)`, plus the line form when `L` is one-dimensional
/// and `δ'` is given.
pub fn angle_bound_check(
    frame: &LineFrame,
    l: &RationalSubspace,
    delta: &CertifiedScalar,
    eps: &CertifiedScalar,
    c3: &CertifiedScalar,
    delta_prime: Option<&CertifiedScalar>,
    precision: u32,
) -> Result<AngleCheck, NesterenkoError> {
    let maxp = max_bits(precision);
    positive(c3, "c3", maxp)?;
    let phi = angle_tangent(frame, l, precision)?;
    let h = height(l);
    let rhs = c3.mul(&h.pow(&delta.add(eps).neg())?);
    let (verdict, degenerate) = match &phi {
        ExtScalar::Infinite => (AngleVerdict::Holds, true),
        ExtScalar::Finite(p) => (
            match certified_compare(p, &rhs, maxp) {
                Comparison::Greater | Comparison::EqualProven => AngleVerdict::Holds,
                Comparison::Less => AngleVerdict::Violated,
                Comparison::Undecided => AngleVerdict::Undecided,
            },
            false,
        ),
    };
    let sharp = match (delta_prime, l.dim) {
        (Some(dp), 1) => {
            let v = l.saturated_basis[0].clone();
            let p = project(frame, &v, precision)?;
            let target = p.h.pow(&CertifiedScalar::one().sub(dp))?;
            Some(certified_compare(&p.r, &target, maxp))
        }
        _ => None,
    };
    Ok(AngleCheck { verdict, phi, height: h, rhs, degenerate, sharp })
}

/// `min φ(L) H(L)^(δ+ε)` over a batch: the largest `c3` the batch allows.
pub fn empirical_c3(
    frame: &LineFrame,
    subspaces: &[RationalSubspace],
    delta: &CertifiedScalar,
    eps: &CertifiedScalar,
    precision: u32,
) -> Result<Option<CertifiedScalar>, NesterenkoError> {
    let mut vals = Vec::new();
    for l in subspaces {
        if let ExtScalar::Finite(p) = angle_tangent(frame, l, precision)? {
            vals.push(p.mul(&height(l).pow(&delta.add(eps))?).refine_lossy(precision));
        }
    }
    Ok((!vals.is_empty()).then(|| CertifiedScalar::min_of(&vals)))
}

/// The refinement for `d = n` when `1, θ_1, ..., θ_n` are independent.
#[derive(Clone, Debug)]
pub struct Prop4Bounds {
    /// `(α-1)(1+β) / (α(1+β-α))`, to be compared with `n-1`.
    pub condition_value: CertifiedScalar,
    pub omega_upper: CertifiedScalar,
    pub delta_refined: CertifiedScalar,
    /// `δ_refined` against `δ(n)`; `None` when `d = n` is not admissible.
    pub versus_delta_n: Option<Comparison>,
}

impl Prop4Bounds {
    pub fn to_json(&self, precision: u32) -> serde_json::Value {
        serde_json::json!({
            "condition": "HOLDS",
            "condition_value": self.condition_value.bounds_strings(precision),
            "omega_upper": self.omega_upper.bounds_strings(precision),
            "delta_refined": self.delta_refined.bounds_strings(precision),
            "refined_vs_delta_n": self.versus_delta_n,
            "improves": self.versus_delta_n.map(|c| c == Comparison::Less),
        })
    }
}

pub fn prop4_bounds(n: u32, alpha: &CertifiedScalar, beta: &CertifiedScalar, precision: u32) -> Result<Prop4Bounds, NesterenkoError> {
    let maxp = max_bits(precision);
    let one = CertifiedScalar::one();
    if n == 0 {
        return Err(NesterenkoError::Invalid("n must be at least 1".into()));
    }
    if certified_compare(alpha, &one, maxp) != Comparison::Greater {
        return Err(NesterenkoError::Invalid("alpha must be certified > 1".into()));
    }
    let a1 = alpha.sub(&one);
    let b1 = one.add(beta);
    let gap = b1.sub(alpha);
    let nm1 = CertifiedScalar::from_int(n - 1);
    let num_delta = a1.mul(&b1);
    let num_omega = nm1.mul(alpha).mul(&gap);
    let condition_value = num_delta.div(&alpha.mul(&gap))?;
    match certified_compare(&condition_value, &nm1, maxp) {
        Comparison::Greater => {}
        Comparison::Undecided => return Err(NesterenkoError::PrecisionExhausted("refinement condition".into())),
        _ => return Err(NesterenkoError::ConditionFails { value: condition_value.bounds_strings(precision) }),
    }
    let den = num_delta.sub(&num_omega);
    let omega_upper = num_omega.div(&den)?;
    let delta_refined = num_delta.div(&den)?;
    let versus_delta_n = delta(alpha, beta, n, precision).ok().map(|d| certified_compare(&delta_refined, &d, maxp));
    Ok(Prop4Bounds { condition_value, omega_upper, delta_refined, versus_delta_n })
}

/// Package LIN records as evidence: `t_k = r(x_k)` rounded up, `α = β` the
/// least-squares slope of `-log h` against `log t`, and `c1`, `c2` the
/// extreme values of `h t^α`, rounded outward so every entry holds.
pub fn package_evidence(list: &RecordList, precision: u32) -> Result<EvidenceSequence, NesterenkoError> {
    if list.kind != RecordKind::Lin {
        return Err(NesterenkoError::Invalid(
            "evidence needs LIN records: the cylinder has r(x) <= t with h(x) shrinking like t^-α".into(),
        ));
    }
    let maxp = max_bits(precision);
    let frame = LineFrame::new(&list.theta);
    let mut pts: Vec<(CertifiedScalar, IntegerVector, CertifiedScalar)> = Vec::new();
    for rec in &list.records {
        let p = project(&frame, &rec.x, precision)?;
        if p.h.sign(maxp) != Comparison::Greater {
            continue;
        }
        let t = CertifiedScalar::from_rational(round_decimal(p.r.refine_lossy(precision).upper(), 12, true));
        if t.sign(maxp) != Comparison::Greater {
            continue;
        }
        if let Some((last, _, _)) = pts.last() {
            if certified_compare(&t, last, maxp) != Comparison::Greater {
                continue;
            }
        }
        pts.push((t, rec.x.clone(), p.h));
    }
    if pts.len() < 2 {
        return Err(NesterenkoError::Invalid("fewer than two usable records".into()));
    }
    let xs: Vec<f64> = pts.iter().map(|(t, _, _)| t.approx_f64().ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, _, h)| -h.approx_f64().ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 1.0 };
    if !(slope.is_finite() && slope > 0.0) {
        return Err(NesterenkoError::Invalid(format!("fitted slope {slope} is not positive")));
    }
    // six decimals keep the file readable
    let alpha = CertifiedScalar::from_rational(BigRational::new(BigInt::from((slope * 1e6).round() as i64), BigInt::from(1_000_000)));
    let norm: Vec<CertifiedScalar> =
        pts.iter().map(|(t, _, h)| Ok(h.mul(&t.pow(&alpha)?))).collect::<Result<_, ScalarError>>()?;
    let lo = CertifiedScalar::min_of(&norm).refine_lossy(precision);
    let hi = CertifiedScalar::max_of(&norm).refine_lossy(precision);
    let c1 = CertifiedScalar::from_rational(round_decimal(lo.lower(), 6, false));
    let c2 = CertifiedScalar::from_rational(round_decimal(hi.upper(), 6, true));
    if c1.is_exact_zero() || c1.exact().is_some_and(|q| q.is_negative()) {
        return Err(NesterenkoError::Invalid("normalised h is not bounded away from zero".into()));
    }
    let entries = pts.into_iter().map(|(t, x, _)| EvidenceEntry { t, x }).collect();
    let mut ev = EvidenceSequence::new(alpha.clone(), alpha, c1, c2, entries, precision)?;
    ev.theta = Some(list.theta.clone());
    Ok(ev)
}

/// The line spanned by a primitive integer vector.
pub fn line(v: &IntegerVector) -> Result<RationalSubspace, NesterenkoError> {
    Ok(saturate(std::slice::from_ref(v))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> CertifiedScalar {
        CertifiedScalar::from_ratio(p, d)
    }

    fn exact(s: &CertifiedScalar) -> BigRational {
        s.exact().cloned().expect("exact value")
    }

    #[test]
    fn delta_examples() {
        assert_eq!(exact(&delta(&q(1, 1), &q(1, 1), 1, 64).unwrap()), BigRational::from_integer(2.into()));
        // α = β = 3: δ(d) = 4 / (4 - d)
        for d in 1..4 {
            assert_eq!(exact(&delta(&q(3, 1), &q(3, 1), d, 64).unwrap()), BigRational::new(4.into(), (4 - d as i64).into()));
        }
        assert_eq!(delta(&q(3, 1), &q(3, 1), 4, 64).unwrap_err(), NesterenkoError::DimensionTooLarge { d: 4 });
        // d = 1: (1+β)/α
        assert_eq!(exact(&delta(&q(3, 2), &q(7, 3), 1, 64).unwrap()), BigRational::new(20.into(), 9.into()));
    }

    #[test]
    fn dimension_examples() {
        let b = dimension_bound(&q(1, 1), &q(1, 1), 64).unwrap();
        assert_eq!(exact(&b.bound), BigRational::from_integer(2.into()));
        assert_eq!(b.at_least, Some(BigInt::from(2)));
        let b = dimension_bound(&q(5, 2), &q(5, 2), 64).unwrap();
        assert_eq!(exact(&b.bound), BigRational::new(7.into(), 2.into()));
        assert_eq!(b.at_least, Some(BigInt::from(4)));
        let b = dimension_bound(&q(1, 1), &q(1_000_000, 1), 64).unwrap();
        assert!(b.bound.approx_f64() < 1.000_01 && b.bound.approx_f64() > 1.0);
    }

    #[test]
    fn prop4_examples() {
        let p = prop4_bounds(2, &q(2, 1), &q(2, 1), 64).unwrap();
        assert_eq!(exact(&p.condition_value), BigRational::new(3.into(), 2.into()));
        assert_eq!(exact(&p.omega_upper), BigRational::from_integer(2.into()));
        assert_eq!(exact(&p.delta_refined), BigRational::from_integer(3.into()));
        assert!(matches!(prop4_bounds(2, &q(1, 1), &q(2, 1), 64), Err(NesterenkoError::Invalid(_))));
        assert!(matches!(prop4_bounds(3, &q(2, 1), &q(3, 1), 64), Err(NesterenkoError::ConditionFails { .. })));
    }

    #[test]
    fn params_invariants() {
        let p = NesterenkoParams::new(&q(2, 1), &q(3, 1), q(1, 10), q(1, 100), q(1, 1), 64).unwrap();
        assert!(certified_compare(&p.alpha_prime, &q(2, 1), 64) == Comparison::Less);
        assert!(certified_compare(&p.beta_prime, &q(3, 1), 64) == Comparison::Greater);
        assert!(certified_compare(&p.delta_prime, &q(2, 1), 64) == Comparison::Greater);
    }

    #[test]
    fn geometric_ratio_statistic() {
        let frame = LineFrame::new(&"sqrt:2".parse().unwrap());
        // x = (0, 1): r = 2/sqrt 3 · ..., h = sqrt(2/3); generous constants
        let entries: Vec<EvidenceEntry> = (1..6)
            .map(|k| EvidenceEntry { t: CertifiedScalar::from_int(1i64 << k), x: IntegerVector::from_i64(&[0, 1]) })
            .collect();
        let ev = EvidenceSequence::new(q(1, 1), q(1, 1), q(1, 1000), q(1000, 1), entries, 64).unwrap();
        let rep = check_entries(&frame, &ev, 64).unwrap();
        assert_eq!(rep.ratio_at, Some(1));
        assert!((rep.ratio_statistic.unwrap().approx_f64() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn upper_violation() {
        let frame = LineFrame::new(&"sqrt:2".parse().unwrap());
        let entries = vec![
            EvidenceEntry { t: CertifiedScalar::from_int(2), x: IntegerVector::from_i64(&[-1, 1]) },
            EvidenceEntry { t: CertifiedScalar::from_int(3), x: IntegerVector::from_i64(&[0, 1]) },
        ];
        // h((0,1)) = sqrt(2/3) > 1/100 · 3^-1
        let ev = EvidenceSequence::new(q(1, 1), q(1, 1), q(1, 1000), q(1, 100), entries, 64).unwrap();
        let e = check_hypothesis(&frame, &ev, 64).unwrap_err();
        assert_eq!(e, NesterenkoError::EntryViolation { k: 1, bound: Bound::UpperH });
    }

    #[test]
    fn evidence_validation() {
        let e = vec![
            EvidenceEntry { t: CertifiedScalar::from_int(3), x: IntegerVector::from_i64(&[0, 1]) },
            EvidenceEntry { t: CertifiedScalar::from_int(2), x: IntegerVector::from_i64(&[0, 1]) },
        ];
        assert!(EvidenceSequence::new(q(1, 1), q(1, 1), q(1, 1), q(1, 1), e.clone(), 64).is_err());
        assert!(EvidenceSequence::new(q(2, 1), q(1, 1), q(1, 1), q(1, 1), e[..1].to_vec(), 64).is_err());
    }

    #[test]
    fn scalar_text_roundtrip() {
        for s in ["3", "1.25", "1/3", "-2/7"] {
            let v = parse_scalar(s).unwrap();
            assert_eq!(exact(&parse_scalar(&scalar_text(&v)).unwrap()), exact(&v));
        }
    }
}
