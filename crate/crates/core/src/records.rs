//! Best-approximation records and finite-scale exponent estimates.
//!
//! SIM records minimise `max_i |x_0 θ_i - x_i|` over `1 <= x_0 <= T`; LIN
//! records minimise `|x_0 + Σ θ_i x_i|` over nonzero `(x_1..x_n)` with
//! `max |x_i| <= T`. Candidates are screened with double-precision intervals
//! and every decision the screen cannot settle goes through the certified
//! comparison.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use serde::{Deserialize, Serialize};

use crate::certified::{
    certified_compare, max_bits, theta::parse_decimal, CertifiedScalar, Comparison, Dyadic, F64Iv,
    ScalarError, ThetaSpec,
};
use crate::geometry::{project, GeometryError, IntegerVector, LineFrame};
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RecordKind {
    Sim,
    Lin,
}

impl fmt::Display for RecordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecordKind::Sim => "SIM",
            RecordKind::Lin => "LIN",
        })
    }
}

impl FromStr for RecordKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "sim" => Ok(RecordKind::Sim),
            "lin" => Ok(RecordKind::Lin),
            _ => Err(format!("unknown record kind `{s}` (expected sim or lin)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RecordError {
    InvalidBound,
    BudgetExceeded { candidates: u128, budget: u64 },
    PrecisionExhausted { at: String },
    TooFewRecords { found: usize, needed: usize },
    /// A record with zero error: the exponent is infinite.
    DegenerateRecords,
    Csv(String),
    Geometry(GeometryError),
}

impl fmt::Display for RecordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecordError::InvalidBound => write!(f, "search bound must be at least 1"),
            RecordError::BudgetExceeded { candidates, budget } => {
                write!(f, "{candidates} candidates exceed the enumeration budget {budget}")
            }
            RecordError::PrecisionExhausted { at } => {
                write!(f, "comparison undecided at maximum precision near {at}")
            }
            RecordError::TooFewRecords { found, needed } => {
                write!(f, "{found} records found, at least {needed} needed")
            }
            RecordError::DegenerateRecords => write!(f, "record list contains an exact relation (err = 0)"),
            RecordError::Csv(m) => write!(f, "record CSV: {m}"),
            RecordError::Geometry(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RecordError {}

impl From<GeometryError> for RecordError {
    fn from(e: GeometryError) -> Self {
        RecordError::Geometry(e)
    }
}

impl From<ScalarError> for RecordError {
    fn from(e: ScalarError) -> Self {
        RecordError::Geometry(GeometryError::Scalar(e))
    }
}

#[derive(Clone, Debug)]
pub struct ApproxRecord {
    pub kind: RecordKind,
    pub x: IntegerVector,
    pub height_t: u64,
    pub err: CertifiedScalar,
    pub r: CertifiedScalar,
    pub h: CertifiedScalar,
    /// Some `x_0 θ_i` was exactly a half-integer and rounded to even.
    pub tie: bool,
    pub r_clamped: bool,
}

#[derive(Clone, Debug)]
pub struct RecordList {
    pub kind: RecordKind,
    pub theta: ThetaSpec,
    pub search_bound: u64,
    pub precision: u32,
    pub records: Vec<ApproxRecord>,
    /// The relation vector when an exact zero error stopped the enumeration.
    pub degenerate: Option<IntegerVector>,
}

/// The error expression of `x` for the given problem.
pub fn error_of(kind: RecordKind, frame: &LineFrame, x: &IntegerVector) -> Result<CertifiedScalar, GeometryError> {
    match kind {
        RecordKind::Lin => Ok(frame.linear_form(x)?.abs()),
        RecordKind::Sim => {
            if x.dim() != frame.n() + 1 {
                return Err(GeometryError::DimensionMismatch { expected: frame.n() + 1, found: x.dim() });
            }
            let x0 = CertifiedScalar::from_int(x.0[0].clone());
            let parts: Vec<CertifiedScalar> = frame
                .components()
                .iter()
                .zip(&x.0[1..])
                .map(|(t, xi)| t.mul(&x0).sub(&CertifiedScalar::from_int(xi.clone())).abs())
                .collect();
            Ok(CertifiedScalar::max_of(&parts))
        }
    }
}

/// Nearest integer with ties to even. `None` when the value cannot be
/// separated from a half-integer within `max_precision` bits.
pub fn certified_nearest(v: &CertifiedScalar, max_precision: u32) -> Option<(BigInt, bool)> {
    if let Some(q) = v.exact() {
        let fl = q.floor().to_integer();
        let frac = q - BigRational::from_integer(fl.clone());
        let half = BigRational::new(1.into(), 2.into());
        return Some(match frac.cmp(&half) {
            std::cmp::Ordering::Less => (fl, false),
            std::cmp::Ordering::Greater => (fl + 1, false),
            std::cmp::Ordering::Equal if fl.is_even() => (fl, true),
            std::cmp::Ordering::Equal => (fl + 1, true),
        });
    }
    let half = Dyadic::pow2(-1);
    let mut w = 64;
    loop {
        let iv = v.interval_at(w).ok()?;
        let a = iv.lo().add(&half);
        let b = iv.hi().add(&half);
        let fa = a.floor();
        if fa == b.floor() && a > Dyadic::from_int(fa.clone()) {
            return Some((fa, false));
        }
        if w >= max_precision {
            return None;
        }
        w = (w * 2).min(max_precision);
    }
}

#[derive(Clone, Debug)]
struct Cand {
    x: IntegerVector,
    t: u64,
    fast: F64Iv,
    tie: bool,
}

struct Ctx<'a> {
    kind: RecordKind,
    frame: &'a LineFrame,
    maxp: u32,
}

impl Ctx<'_> {
    fn err(&self, c: &Cand) -> Result<CertifiedScalar, RecordError> {
        Ok(error_of(self.kind, self.frame, &c.x)?)
    }

    /// `a` has certified-smaller error than `b`.
    fn beats(&self, a: &Cand, b: &Cand) -> Result<bool, RecordError> {
        if a.fast.hi < b.fast.lo {
            return Ok(true);
        }
        if a.fast.lo > b.fast.hi {
            return Ok(false);
        }
        match certified_compare(&self.err(a)?, &self.err(b)?, self.maxp) {
            Comparison::Less => Ok(true),
            Comparison::Greater | Comparison::EqualProven => Ok(false),
            Comparison::Undecided => Err(RecordError::PrecisionExhausted { at: a.x.to_string() }),
        }
    }

    fn is_zero(&self, c: &Cand) -> Result<bool, RecordError> {
        if c.fast.lo > 0.0 {
            return Ok(false);
        }
        match self.err(c)?.sign(self.maxp) {
            Comparison::EqualProven => Ok(true),
            Comparison::Greater => Ok(false),
            _ => Err(RecordError::PrecisionExhausted { at: c.x.to_string() }),
        }
    }

    fn cand_from_expr(&self, x: IntegerVector, t: u64, tie: bool) -> Result<Cand, RecordError> {
        let e = error_of(self.kind, self.frame, &x)?.refine_lossy(64);
        let (lo, hi) = e.f64_bounds();
        Ok(Cand { x, t, fast: F64Iv::new(lo.max(0.0), hi), tie })
    }

    fn slow_sim(&self, x0: u64) -> Result<Cand, RecordError> {
        let x0c = CertifiedScalar::from_int(x0);
        let mut coords = vec![BigInt::from(x0)];
        let mut tie = false;
        for t in self.frame.components() {
            let (k, tk) = certified_nearest(&t.mul(&x0c), self.maxp)
                .ok_or_else(|| RecordError::PrecisionExhausted { at: format!("x0={x0}") })?;
            tie |= tk;
            coords.push(k);
        }
        self.cand_from_expr(IntegerVector(coords), x0, tie)
    }

    fn slow_lin(&self, xs: &[i64], t: u64) -> Result<Cand, RecordError> {
        let s = CertifiedScalar::sum(
            &self
                .frame
                .components()
                .iter()
                .zip(xs)
                .map(|(th, &c)| th.mul(&CertifiedScalar::from_int(c)))
                .collect::<Vec<_>>(),
        );
        let (x0, tie) = certified_nearest(&s.neg(), self.maxp)
            .ok_or_else(|| RecordError::PrecisionExhausted { at: format!("{xs:?}") })?;
        let mut coords = vec![x0];
        coords.extend(xs.iter().map(|&c| BigInt::from(c)));
        self.cand_from_expr(IntegerVector(coords), t, tie)
    }

    /// Offer `c` as the next local record. Returns `true` when the candidate
    /// was an exact relation and the scan must stop.
    fn offer(&self, out: &mut Vec<Cand>, c: Cand) -> Result<bool, RecordError> {
        if let Some(b) = out.last() {
            if !self.beats(&c, b)? {
                return Ok(false);
            }
        }
        let zero = self.is_zero(&c)?;
        out.push(c);
        Ok(zero)
    }

    fn sim_chunk(&self, lo: u64, hi: u64) -> Result<Vec<Cand>, RecordError> {
        let fast = self.frame.fast_components();
        let mut xs = vec![0f64; fast.len()];
        let mut out: Vec<Cand> = Vec::new();
        for x0 in lo..=hi {
            let bound = out.last().map_or(f64::INFINITY, |b| b.fast.hi);
            let xf = x0 as f64;
            let mut err = F64Iv::point(0.0);
            let mut certain = true;
            let mut worse = false;
            for (i, th) in fast.iter().enumerate() {
                let p = th.scale(xf);
                let Some(k) = p.round_certain() else {
                    certain = false;
                    break;
                };
                let d = p.sub(F64Iv::point(k)).abs();
                if d.lo > bound {
                    worse = true;
                    break;
                }
                xs[i] = k;
                err = err.max(d);
            }
            if worse {
                continue;
            }
            let c = if certain {
                let mut coords = vec![BigInt::from(x0)];
                coords.extend(xs.iter().map(|&k| BigInt::from(k as i64)));
                Cand { x: IntegerVector(coords), t: x0, fast: err, tie: false }
            } else {
                self.slow_sim(x0)?
            };
            if self.offer(&mut out, c)? {
                break;
            }
        }
        Ok(out)
    }

    fn lin_chunk(&self, lo: u64, hi: u64) -> Result<Vec<Cand>, RecordError> {
        let fast = self.frame.fast_components();
        let n = fast.len();
        let mut out: Vec<Cand> = Vec::new();
        for h in lo..=hi {
            let mut best: Option<Cand> = None;
            let mut failure = None;
            let mut stop = false;
            for_each_shell(n, h as i64, |xs| {
                let bound = match (&best, out.last()) {
                    (Some(a), Some(b)) => a.fast.hi.min(b.fast.hi),
                    (Some(a), None) => a.fast.hi,
                    (None, Some(b)) => b.fast.hi,
                    (None, None) => f64::INFINITY,
                };
                let mut s = F64Iv::point(0.0);
                for (th, &c) in fast.iter().zip(xs) {
                    if c != 0 {
                        s = s.add(th.scale(c as f64));
                    }
                }
                let c = match s.neg().round_certain() {
                    Some(k) => {
                        let e = s.add(F64Iv::point(k)).abs();
                        if e.lo > bound {
                            return true;
                        }
                        let mut coords = vec![BigInt::from(k as i64)];
                        coords.extend(xs.iter().map(|&c| BigInt::from(c)));
                        Cand { x: IntegerVector(coords), t: h, fast: e, tie: false }
                    }
                    None => match self.slow_lin(xs, h) {
                        Ok(c) => c,
                        Err(e) => {
                            failure = Some(e);
                            return false;
                        }
                    },
                };
                let better = match &best {
                    None => Ok(true),
                    Some(b) => self.beats(&c, b),
                };
                match better {
                    Ok(true) => {
                        match self.is_zero(&c) {
                            Ok(z) => stop = z,
                            Err(e) => {
                                failure = Some(e);
                                return false;
                            }
                        }
                        best = Some(c);
                        !stop
                    }
                    Ok(false) => true,
                    Err(e) => {
                        failure = Some(e);
                        false
                    }
                }
            });
            if let Some(e) = failure {
                return Err(e);
            }
            if let Some(b) = best {
                if self.offer(&mut out, b)? {
                    break;
                }
            }
        }
        Ok(out)
    }

    fn merge(&self, chunks: Vec<Result<Vec<Cand>, RecordError>>) -> Result<(Vec<Cand>, bool), RecordError> {
        let mut out = Vec::new();
        for ch in chunks {
            for c in ch? {
                if self.offer(&mut out, c)? {
                    return Ok((out, true));
                }
            }
        }
        Ok((out, false))
    }

    fn finish(&self, theta: &ThetaSpec, bound: u64, precision: u32, cands: Vec<Cand>, degenerate: bool) -> Result<RecordList, RecordError> {
        let mut records = Vec::with_capacity(cands.len());
        for c in &cands {
            let p = project(self.frame, &c.x, precision)?;
            records.push(ApproxRecord {
                kind: self.kind,
                x: c.x.clone(),
                height_t: c.t,
                err: self.err(c)?.refine_lossy(precision),
                r: p.r,
                h: p.h,
                tie: c.tie,
                r_clamped: p.r_clamped,
            });
        }
        Ok(RecordList {
            kind: self.kind,
            theta: theta.clone(),
            search_bound: bound,
            precision,
            degenerate: degenerate.then(|| cands.last().map(|c| c.x.clone())).flatten(),
            records,
        })
    }
}

/// Digit order `0, 1, -1, 2, -2, ...` for the odometer.
fn zigzag(i: i64) -> i64 {
    if i % 2 == 1 {
        (i + 1) / 2
    } else {
        -(i / 2)
    }
}

/// Visit every `(x_1..x_n)` with `max |x_i| = h` whose first nonzero entry is
/// positive. The callback returns `false` to stop early.
fn for_each_shell(n: usize, h: i64, mut f: impl FnMut(&[i64]) -> bool) {
    let mut x = vec![0i64; n];
    let mut idx = vec![0i64; n];
    for j in 0..n {
        // entries before j lie in (-h, h), entry j is ±h, entries after in [-h, h]
        let lim: Vec<i64> = (0..n)
            .map(|i| match i.cmp(&j) {
                std::cmp::Ordering::Less => 2 * h - 1,
                std::cmp::Ordering::Equal => 2,
                std::cmp::Ordering::Greater => 2 * h + 1,
            })
            .collect();
        idx.iter_mut().for_each(|v| *v = 0);
        loop {
            for i in 0..n {
                x[i] = if i == j { if idx[i] == 0 { h } else { -h } } else { zigzag(idx[i]) };
            }
            let canonical = x.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0);
            if canonical && !f(&x) {
                return;
            }
            let mut i = n;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < lim[i] {
                    break;
                }
                idx[i] = 0;
                if i == 0 {
                    i = usize::MAX;
                    break;
                }
            }
            if i == usize::MAX {
                break;
            }
        }
    }
}

/// Number of LIN candidates for bound `t`: `((2t+1)^n - 1) / 2`.
pub fn lin_candidates(n: usize, t: u64) -> u128 {
    let side = 2 * t as u128 + 1;
    let mut total: u128 = 1;
    for _ in 0..n {
        total = total.saturating_mul(side);
    }
    (total - 1) / 2
}

const SIM_CHUNK: u64 = 1 << 20;
const LIN_CHUNK: u128 = 1 << 16;

pub fn enumerate_sim(theta: &ThetaSpec, t: u64, precision: u32) -> Result<RecordList, RecordError> {
    if t < 1 {
        return Err(RecordError::InvalidBound);
    }
    let frame = LineFrame::new(theta);
    let ctx = Ctx { kind: RecordKind::Sim, frame: &frame, maxp: max_bits(precision) };
    let ranges: Vec<(u64, u64)> =
        (0..t.div_ceil(SIM_CHUNK)).map(|k| (k * SIM_CHUNK + 1, ((k + 1) * SIM_CHUNK).min(t))).collect();
    let chunks = par::map(&ranges, |&(lo, hi)| ctx.sim_chunk(lo, hi));
    let (cands, degenerate) = ctx.merge(chunks)?;
    ctx.finish(theta, t, precision, cands, degenerate)
}

pub fn enumerate_lin(theta: &ThetaSpec, t: u64, precision: u32, budget: u64) -> Result<RecordList, RecordError> {
    if t < 1 {
        return Err(RecordError::InvalidBound);
    }
    let n = theta.n();
    let total = lin_candidates(n, t);
    if total > budget as u128 {
        return Err(RecordError::BudgetExceeded { candidates: total, budget });
    }
    let frame = LineFrame::new(theta);
    let ctx = Ctx { kind: RecordKind::Lin, frame: &frame, maxp: max_bits(precision) };
    // consecutive heights grouped so each chunk holds roughly LIN_CHUNK candidates
    let mut ranges = Vec::new();
    let (mut start, mut acc) = (1u64, 0u128);
    for h in 1..=t {
        acc += lin_candidates(n, h) - lin_candidates(n, h - 1);
        if acc >= LIN_CHUNK || h == t {
            ranges.push((start, h));
            start = h + 1;
            acc = 0;
        }
    }
    let chunks = par::map(&ranges, |&(lo, hi)| ctx.lin_chunk(lo, hi));
    let (cands, degenerate) = ctx.merge(chunks)?;
    ctx.finish(theta, t, precision, cands, degenerate)
}

#[derive(Clone, Debug)]
pub struct ExponentEstimates {
    pub kind: RecordKind,
    pub regular: CertifiedScalar,
    pub uniform: CertifiedScalar,
    /// Indices into the record list, inclusive.
    pub window: (usize, usize),
    pub search_bound: u64,
    pub records: usize,
}

pub const MIN_RECORDS: usize = 4;

/// Slopes over the trailing `⌈tail·K⌉` records (at least two). The regular
/// estimate is the largest `log(1/err_k)/log t_k`; the uniform one the
/// smallest `log(1/err_k)/log t_{k+1}`, which treats `err_k` as the best error
/// available for every `t < t_{k+1}`.
pub fn estimate_exponents(list: &RecordList, tail_fraction: f64) -> Result<ExponentEstimates, RecordError> {
    let recs = &list.records;
    let k = recs.len();
    if k < MIN_RECORDS {
        return Err(RecordError::TooFewRecords { found: k, needed: MIN_RECORDS });
    }
    if list.degenerate.is_some() || recs.iter().any(|r| r.err.is_exact_zero()) {
        return Err(RecordError::DegenerateRecords);
    }
    let tail = tail_fraction.clamp(f64::MIN_POSITIVE, 1.0);
    let m = ((tail * k as f64).ceil() as usize).clamp(2, k);
    let first = k - m;
    let neg_ln = |r: &ApproxRecord| -> Result<CertifiedScalar, RecordError> { Ok(r.err.ln()?.neg()) };
    let ln_t = |t: u64| -> Result<CertifiedScalar, RecordError> { Ok(CertifiedScalar::from_int(t).ln()?) };
    let mut regular = Vec::new();
    let mut uniform = Vec::new();
    for i in first..k {
        let a = neg_ln(&recs[i])?;
        if recs[i].height_t > 1 {
            regular.push(a.div(&ln_t(recs[i].height_t)?)?);
        }
        if i + 1 < k {
            uniform.push(a.div(&ln_t(recs[i + 1].height_t)?)?);
        }
    }
    let p = list.precision;
    Ok(ExponentEstimates {
        kind: list.kind,
        regular: CertifiedScalar::max_of(&regular).refine_lossy(p),
        uniform: CertifiedScalar::min_of(&uniform).refine_lossy(p),
        window: (first, k - 1),
        search_bound: list.search_bound,
        records: k,
    })
}

impl ExponentEstimates {
    pub fn to_json(&self, precision: u32) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind,
            "regular": self.regular.bounds_strings(precision),
            "uniform": self.uniform.bounds_strings(precision),
            "window": [self.window.0, self.window.1],
            "search_bound": self.search_bound,
            "records": self.records,
        })
    }
}

impl RecordList {
    pub fn csv_header(n: usize) -> String {
        let mut cols = vec!["kind".to_string(), "k".into(), "t".into(), "err_lo".into(), "err_hi".into()];
        cols.extend((0..=n).map(|i| format!("x{i}")));
        cols.extend(["r_lo", "r_hi", "h_lo", "h_hi"].map(String::from));
        cols.join(",")
    }

    pub fn to_csv(&self) -> String {
        let p = self.precision;
        let mut s = RecordList::csv_header(self.theta.n());
        s.push('\n');
        for (k, r) in self.records.iter().enumerate() {
            let mut row = vec![r.kind.to_string(), k.to_string(), r.height_t.to_string()];
            row.extend(r.err.bounds_strings(p));
            row.extend(r.x.0.iter().map(|c| c.to_string()));
            row.extend(r.r.bounds_strings(p));
            row.extend(r.h.bounds_strings(p));
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let p = self.precision;
        let recs: Vec<serde_json::Value> = self
            .records
            .iter()
            .enumerate()
            .map(|(k, r)| {
                serde_json::json!({
                    "k": k,
                    "t": r.height_t,
                    "x": r.x,
                    "err": r.err.bounds_strings(p),
                    "r": r.r.bounds_strings(p),
                    "h": r.h.bounds_strings(p),
                    "tie": r.tie,
                    "r_clamped": r.r_clamped,
                })
            })
            .collect();
        serde_json::json!({
            "kind": self.kind,
            "theta": self.theta.to_string(),
            "search_bound": self.search_bound,
            "precision": p,
            "degenerate": self.degenerate,
            "records": recs,
        })
    }

    /// Read a CSV written by [`RecordList::to_csv`]. Errors, distances and
    /// heights are recomputed from θ and must overlap the stored bounds.
    pub fn from_csv(text: &str, theta: &ThetaSpec, precision: u32) -> Result<RecordList, RecordError> {
        let n = theta.n();
        let frame = LineFrame::new(theta);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| RecordError::Csv("empty input".into()))?;
        if header.trim() != RecordList::csv_header(n) {
            return Err(RecordError::Csv(format!("header does not match n={n}")));
        }
        let bad = |m: &str, line: usize| RecordError::Csv(format!("row {line}: {m}"));
        let mut kind = None;
        let mut records = Vec::new();
        for (i, line) in lines.enumerate() {
            let f: Vec<&str> = line.trim().split(',').collect();
            if f.len() != n + 10 {
                return Err(bad("wrong column count", i + 1));
            }
            let k: RecordKind = f[0].parse().map_err(|e: String| bad(&e, i + 1))?;
            if kind.is_some_and(|q| q != k) {
                return Err(bad("mixed record kinds", i + 1));
            }
            kind = Some(k);
            let t: u64 = f[2].parse().map_err(|_| bad("bad height", i + 1))?;
            let coords = f[5..6 + n]
                .iter()
                .map(|s| s.parse::<BigInt>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| bad("bad coordinate", i + 1))?;
            let x = IntegerVector(coords);
            let err = error_of(k, &frame, &x)?.refine_lossy(precision);
            let p = project(&frame, &x, precision)?;
            for (v, lo, hi, what) in [(&err, f[3], f[4], "err"), (&p.r, f[6 + n], f[7 + n], "r"), (&p.h, f[8 + n], f[9 + n], "h")] {
                let lo = parse_decimal(lo).map_err(|_| bad("bad bound", i + 1))?;
                let hi = parse_decimal(hi).map_err(|_| bad("bad bound", i + 1))?;
                let iv = v.interval();
                if iv.lo().to_rational() > hi || iv.hi().to_rational() < lo {
                    return Err(bad(&format!("{what} does not match θ"), i + 1));
                }
            }
            records.push(ApproxRecord { kind: k, x, height_t: t, err, r: p.r, h: p.h, tie: false, r_clamped: p.r_clamped });
        }
        let kind = kind.ok_or_else(|| RecordError::Csv("no records".into()))?;
        let degenerate = records.last().filter(|r| r.err.is_exact_zero()).map(|r| r.x.clone());
        Ok(RecordList {
            kind,
            theta: theta.clone(),
            search_bound: records.last().map_or(0, |r| r.height_t),
            precision,
            records,
            degenerate,
        })
    }
}

/// `t` values of a record list as `f64`, for plotting.
pub fn plot_points(list: &RecordList) -> Vec<(f64, f64)> {
    list.records
        .iter()
        .filter(|r| !r.err.is_exact_zero())
        .map(|r| ((r.height_t as f64).ln(), -r.err.approx_f64().ln()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> ThetaSpec {
        s.parse().unwrap()
    }

    fn xs(r: &ApproxRecord) -> Vec<i64> {
        r.x.to_i64().unwrap()
    }

    #[test]
    fn sim_records_sqrt2_sqrt3() {
        let l = enumerate_sim(&spec("sqrt:2,sqrt:3"), 10, 128).unwrap();
        let got: Vec<Vec<i64>> = l.records.iter().map(xs).collect();
        assert_eq!(got, vec![vec![1, 1, 2], vec![3, 4, 5], vec![7, 10, 12]]);
        assert!((l.records[2].err.approx_f64() - 0.12436).abs() < 1e-5);
        let l = enumerate_sim(&spec("sqrt:2,sqrt:3"), 1, 128).unwrap();
        assert_eq!(l.records.len(), 1);
    }

    #[test]
    fn sim_rational_degenerate() {
        let l = enumerate_sim(&spec("rat:1/2,rat:1/2"), 10, 64).unwrap();
        assert!(l.records[0].tie);
        assert_eq!(l.degenerate, Some(IntegerVector::from_i64(&[2, 1, 1])));
        assert!(l.records.last().unwrap().err.is_exact_zero());
    }

    #[test]
    fn lin_records() {
        let l = enumerate_lin(&spec("sqrt:2,sqrt:3"), 1, 128, 100).unwrap();
        assert_eq!(l.records.len(), 1);
        assert_eq!(xs(&l.records[0]), vec![-3, 1, 1]);
        assert!((l.records[0].err.approx_f64() - 0.14626).abs() < 1e-5);

        let l = enumerate_lin(&spec("rat:0,rat:0"), 1, 64, 100).unwrap();
        assert_eq!(l.degenerate, Some(IntegerVector::from_i64(&[0, 1, 0])));

        let l = enumerate_lin(&spec("sqrt:2"), 5, 64, 100).unwrap();
        let t: Vec<u64> = l.records.iter().map(|r| r.height_t).collect();
        assert_eq!(t, vec![1, 2, 5]);
        assert!(matches!(enumerate_lin(&spec("sqrt:2,sqrt:3"), 100, 64, 1000), Err(RecordError::BudgetExceeded { .. })));
    }

    #[test]
    fn shells_are_complete() {
        for n in 1..=3 {
            for h in 1..=3 {
                let mut seen = std::collections::HashSet::new();
                for_each_shell(n, h, |x| {
                    assert!(seen.insert(x.to_vec()));
                    true
                });
                assert_eq!(seen.len() as u128, lin_candidates(n, h as u64) - lin_candidates(n, h as u64 - 1));
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let th = spec("sqrt:2,sqrt:3");
        let l = enumerate_sim(&th, 100, 96).unwrap();
        let back = RecordList::from_csv(&l.to_csv(), &th, 96).unwrap();
        assert_eq!(back.records.len(), l.records.len());
        assert_eq!(back.to_csv(), l.to_csv());
    }

    #[test]
    fn estimator_closed_form() {
        // err_k = 1/t_k with t_k = 2^k
        let th = spec("sqrt:2");
        let records: Vec<ApproxRecord> = (1..=8)
            .map(|k| {
                let t = 1u64 << k;
                ApproxRecord {
                    kind: RecordKind::Sim,
                    x: IntegerVector::from_i64(&[t as i64, 0]),
                    height_t: t,
                    err: CertifiedScalar::from_ratio(1, t as i64),
                    r: CertifiedScalar::one(),
                    h: CertifiedScalar::one(),
                    tie: false,
                    r_clamped: false,
                }
            })
            .collect();
        let list = RecordList { kind: RecordKind::Sim, theta: th, search_bound: 256, precision: 64, records, degenerate: None };
        let e = estimate_exponents(&list, 0.5).unwrap();
        assert!((e.regular.approx_f64() - 1.0).abs() < 1e-12);
        assert!((e.uniform.approx_f64() - 5.0 / 6.0).abs() < 1e-12);
        assert_eq!(e.window, (4, 7));
    }
}
