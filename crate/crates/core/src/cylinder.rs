//! Empty cylinders around `ℓ⊥`: the minimax scale `t` attached to a record
//! vector, the exponents `(α, β)` it induces, and two independent emptiness
//! verdicts (the corner certificate and exhaustive enumeration).
//!
//! The cylinder is `{x : r(x) < t, t^-β <= h(x) <= t^-α - t^-β}`.

use std::fmt;

use serde::Serialize;

use crate::certified::{certified_compare, max_bits, CertifiedScalar, Comparison, F64Iv, ScalarError};
use crate::geometry::{project, GeometryError, IntegerVector, LineFrame};
use crate::par;
use crate::records::{RecordKind, RecordList};

/// Lower bound for π used in the Minkowski volume estimate.
const PI_LO: f64 = 333.0 / 106.0;

#[derive(Clone, Debug, PartialEq)]
pub enum CylinderError {
    Precondition(String),
    DegenerateT,
    BudgetExceeded { needed: u128, budget: u64 },
    PrecisionExhausted { at: String },
    Geometry(GeometryError),
}

impl fmt::Display for CylinderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CylinderError::Precondition(s) => write!(f, "precondition violated: {s}"),
            CylinderError::DegenerateT => write!(f, "t cannot be separated from 1"),
            CylinderError::BudgetExceeded { needed, budget } => {
                write!(f, "enumeration needs {needed} candidates, budget is {budget}")
            }
            CylinderError::PrecisionExhausted { at } => write!(f, "precision exhausted at {at}"),
            CylinderError::Geometry(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CylinderError {}

impl From<GeometryError> for CylinderError {
    fn from(e: GeometryError) -> Self {
        CylinderError::Geometry(e)
    }
}

impl From<ScalarError> for CylinderError {
    fn from(e: ScalarError) -> Self {
        CylinderError::Geometry(GeometryError::Scalar(e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    #[serde(rename = "CASE1")]
    Case1,
    #[serde(rename = "CASE2")]
    Case2,
}

impl CaseTag {
    pub fn record_kind(self) -> RecordKind {
        match self {
            CaseTag::Case1 => RecordKind::Sim,
            CaseTag::Case2 => RecordKind::Lin,
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseTag::Case1 => "CASE1",
            CaseTag::Case2 => "CASE2",
        })
    }
}

impl std::str::FromStr for CaseTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "CASE1" | "1" => Ok(CaseTag::Case1),
            "CASE2" | "2" => Ok(CaseTag::Case2),
            _ => Err(format!("unknown case {s:?}")),
        }
    }
}

/// The half-open cylinder with its derived radii.
#[derive(Clone, Debug)]
pub struct Cylinder {
    pub t: CertifiedScalar,
    pub alpha: CertifiedScalar,
    pub beta: CertifiedScalar,
    /// `t^α`
    pub t_alpha: CertifiedScalar,
    /// `t^β`
    pub t_beta: CertifiedScalar,
    /// `t^-β`
    pub h_floor: CertifiedScalar,
    /// `t^-α - t^-β`
    pub h_ceil: CertifiedScalar,
    /// `t^{α-1-β}`, the value `r(v)` must take.
    pub r_target: CertifiedScalar,
    /// `t^β > 2 t^α` as decided by the certified comparison.
    pub hypothesis: Comparison,
}

impl Cylinder {
    pub fn new(
        t: CertifiedScalar,
        alpha: CertifiedScalar,
        beta: CertifiedScalar,
        precision: u32,
    ) -> Result<Cylinder, CylinderError> {
        if t.sign(max_bits(precision)) != Comparison::Greater {
            return Err(CylinderError::Precondition("t must be certified positive".into()));
        }
        let t_alpha = t.pow(&alpha)?;
        let t_beta = t.pow(&beta)?;
        let h_floor = t_beta.recip()?;
        let h_ceil = t_alpha.recip()?.sub(&h_floor);
        let r_target = t.pow(&alpha.sub(&CertifiedScalar::one()).sub(&beta))?;
        let two_ta = t_alpha.mul(&CertifiedScalar::from_int(2));
        let hypothesis = certified_compare(&t_beta, &two_ta, max_bits(precision));
        Ok(Cylinder { t, alpha, beta, t_alpha, t_beta, h_floor, h_ceil, r_target, hypothesis })
    }

    /// Certified membership with the half-open semantics.
    pub fn contains(&self, frame: &LineFrame, x: &IntegerVector, precision: u32) -> Result<bool, CylinderError> {
        let p = project(frame, x, precision)?;
        self.contains_projected(&p.r, &p.h, x, max_bits(precision))
    }

    fn contains_projected(
        &self,
        r: &CertifiedScalar,
        h: &CertifiedScalar,
        x: &IntegerVector,
        maxp: u32,
    ) -> Result<bool, CylinderError> {
        let undecided = || CylinderError::PrecisionExhausted { at: x.to_string() };
        match certified_compare(r, &self.t, maxp) {
            Comparison::Less => {}
            Comparison::Greater | Comparison::EqualProven => return Ok(false),
            Comparison::Undecided => return Err(undecided()),
        }
        match certified_compare(h, &self.h_floor, maxp) {
            Comparison::Less => return Ok(false),
            Comparison::Undecided => return Err(undecided()),
            _ => {}
        }
        match certified_compare(h, &self.h_ceil, maxp) {
            Comparison::Greater => Ok(false),
            Comparison::Undecided => Err(undecided()),
            _ => Ok(true),
        }
    }

    pub fn to_json(&self, precision: u32) -> serde_json::Value {
        let b = |s: &CertifiedScalar| serde_json::json!(s.bounds_strings(precision));
        serde_json::json!({
            "t": b(&self.t),
            "alpha": b(&self.alpha),
            "beta": b(&self.beta),
            "h_floor": b(&self.h_floor),
            "h_ceil": b(&self.h_ceil),
            "hypothesis": self.hypothesis == Comparison::Greater,
        })
    }
}

fn fast_norm(frame: &LineFrame) -> F64Iv {
    frame.fast_components().iter().fold(F64Iv::point(1.0), |a, t| a.add(t.sqr())).sqrt()
}

fn to_fast(s: &CertifiedScalar) -> F64Iv {
    let (lo, hi) = s.f64_bounds();
    F64Iv::new(lo, hi)
}

fn ceil_i64(x: f64) -> i64 {
    x.ceil().clamp(-9.0e15, 9.0e15) as i64
}

fn floor_i64(x: f64) -> i64 {
    x.floor().clamp(-9.0e15, 9.0e15) as i64
}

/// Volume of the unit `n`-ball, rounded down.
fn unit_ball_volume_lo(n: usize) -> f64 {
    let mut v = if n % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if n % 2 == 0 { 2 } else { 3 };
    while k <= n {
        v *= 2.0 * PI_LO / k as f64;
        k += 2;
    }
    v * (1.0 - 1e-12)
}

/// `(2^n K / V_n)^{1/(n+1)}`: the scale at which `{r <= t, h K <= t}` has
/// volume `2^{n+1}`, so a nonzero integer point exists by Minkowski.
pub fn minkowski_scale(n: usize, k_hi: f64) -> f64 {
    let q = 2f64.powi(n as i32) * k_hi / unit_ball_volume_lo(n);
    q.powf(1.0 / (n as f64 + 1.0)) * (1.0 + 1e-9)
}

/// Coordinate bound for points with `r <= tau`, `h <= tau / k`.
fn radius(tau: f64, k_lo: f64) -> f64 {
    let a = F64Iv::point(tau);
    let b = F64Iv::point(tau).div(F64Iv::point(k_lo)).map_or(f64::INFINITY, |v| v.hi);
    a.sqr().add(F64Iv::point(b).sqr()).sqrt().hi
}

/// The quadratic form `Q(x') = |x'|² + (θ·x')²` on `(x_1..x_n)`.
///
/// A point `x` with `|x| <= R` and `|x_0 + θ·x'| <= l` has `Q(x') <= (R + l)²`,
/// so enumerating this ellipsoid instead of the cube `[-R, R]^n` loses nothing
/// and saves a factor of about `|(1,θ)|` (times `V_n / 2^n`).
struct Ellipse {
    th: Vec<f64>,
    fast: Vec<F64Iv>,
    /// `sqrt((M^-1)_ii)` for `M = I + θθ^T`
    lim: Vec<f64>,
}

impl Ellipse {
    fn new(frame: &LineFrame) -> Ellipse {
        let fast = frame.fast_components().to_vec();
        let th: Vec<f64> = fast.iter().map(|t| 0.5 * (t.lo + t.hi)).collect();
        let nsq = 1.0 + th.iter().map(|t| t * t).sum::<f64>();
        let lim = th.iter().map(|t| (1.0 - t * t / nsq).max(0.0).sqrt()).collect();
        Ellipse { th, fast, lim }
    }

    /// Largest `|x_1|` inside radius `rho`.
    fn first(&self, rho: f64) -> i64 {
        floor_i64(rho * self.lim[0] + 1.0)
    }

    fn q(&self, x: &[i64]) -> (F64Iv, F64Iv) {
        let s = x.iter().zip(&self.fast).fold(F64Iv::point(0.0), |a, (&c, t)| a.add(t.mul(F64Iv::point(c as f64))));
        let q = x.iter().fold(s.sqr(), |a, &c| a.add(F64Iv::point(c as f64).sqr()));
        (s, q)
    }

    /// Inclusive range of the last coordinate given the others, widened by one.
    fn last_range(&self, x: &[i64], rho: f64) -> Option<(i64, i64)> {
        let m = x.len() - 1;
        let p: f64 = x[..m].iter().zip(&self.th).map(|(&c, t)| c as f64 * t).sum();
        let c = x[..m].iter().map(|&c| (c as f64) * (c as f64)).sum::<f64>() + p * p;
        let a = 1.0 + self.th[m] * self.th[m];
        let b = self.th[m] * p;
        let d = b * b - a * (c - rho * rho);
        let tol = 1e-9 * (b * b + a * (c.abs() + rho * rho)) + 1e-9;
        if d < -tol {
            return None;
        }
        let sd = d.max(0.0).sqrt();
        Some((floor_i64((-b - sd) / a) - 1, ceil_i64((-b + sd) / a) + 1))
    }

    fn mids(&self, rho: f64) -> Vec<(i64, i64)> {
        let n = self.th.len();
        (1..n.saturating_sub(1)).map(|i| floor_i64(rho * self.lim[i] + 1.0)).map(|b| (-b, b)).collect()
    }

    /// Visit the canonical points of the ellipsoid with `x_1 = a >= 0`. The
    /// callback returns `false` to stop; so does this function.
    fn slab(&self, a: i64, rho: f64, f: &mut impl FnMut(&[i64]) -> bool) -> bool {
        let n = self.th.len();
        if n == 1 {
            return a == 0 || a > self.first(rho) || f(&[a]);
        }
        let mut x = vec![0i64; n];
        x[0] = a;
        let mut go = true;
        box_product(&self.mids(rho), &mut |mid| {
            x[1..n - 1].copy_from_slice(mid);
            let Some((lo, hi)) = self.last_range(&x, rho) else { return true };
            for last in lo..=hi {
                x[n - 1] = last;
                if a == 0 && !canonical(&x) {
                    continue;
                }
                if !f(&x) {
                    go = false;
                    return false;
                }
            }
            true
        });
        go
    }

    /// Number of points `slab` visits over all `a`, counting both signs of
    /// the first coordinate once.
    fn count(&self, rho: f64) -> f64 {
        let n = self.th.len();
        let top = self.first(rho);
        if n == 1 {
            return top as f64;
        }
        let mut total = 0.0;
        let mut x = vec![0i64; n];
        for a in 0..=top {
            x[0] = a;
            box_product(&self.mids(rho), &mut |mid| {
                x[1..n - 1].copy_from_slice(mid);
                if let Some((lo, hi)) = self.last_range(&x, rho) {
                    total += (hi - lo + 1) as f64;
                }
                true
            });
        }
        total
    }
}

fn canonical(x: &[i64]) -> bool {
    x.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

struct Minimax<'a> {
    frame: &'a LineFrame,
    k: CertifiedScalar,
    kf: F64Iv,
    norm: F64Iv,
    maxp: u32,
    precision: u32,
    budget: u64,
    visited: u64,
    best_hi: f64,
    contenders: Vec<(Vec<i64>, F64Iv)>,
}

impl Minimax<'_> {
    fn charge(&mut self) -> Result<(), CylinderError> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(CylinderError::BudgetExceeded { needed: self.visited as u128, budget: self.budget });
        }
        Ok(())
    }

    fn visit(&mut self, x: &[i64]) -> Result<(), CylinderError> {
        let (r, h) = self.frame.fast_project(x);
        let v = r.max(h.mul(self.kf));
        if v.lo > self.best_hi {
            return Ok(());
        }
        if v.hi < self.best_hi {
            self.best_hi = v.hi;
            let b = self.best_hi;
            self.contenders.retain(|(_, w)| w.lo <= b);
        }
        self.contenders.push((x.to_vec(), v));
        Ok(())
    }

    /// `|x_0 + θ·x'|` bound for points that can still beat the current best.
    fn window(&self) -> f64 {
        F64Iv::point(self.best_hi).mul(self.norm).div(self.kf).map_or(f64::INFINITY, |v| v.hi)
    }

    fn cap(&self) -> f64 {
        F64Iv::point(radius(self.best_hi, self.kf.lo)).add(F64Iv::point(self.window())).hi
    }

    /// Scan `(x_1..x_n)` over ellipsoids of doubling radius, `x_0` in the
    /// window allowed by the current best value.
    fn scan_ellipse(&mut self) -> Result<(), CylinderError> {
        let n = self.frame.n();
        let mut e0 = vec![0i64; n + 1];
        e0[0] = 1;
        self.charge()?;
        self.visit(&e0)?;
        let ell = Ellipse::new(self.frame);
        let mut prev = 0.0f64;
        let mut rho = 1.0f64;
        loop {
            let mut a = 0;
            while a <= ell.first(rho.min(self.cap())) {
                let r = rho.min(self.cap());
                let mut err = None;
                let mut x = vec![0i64; n + 1];
                ell.slab(a, r, &mut |xp| {
                    let (s, q) = ell.q(xp);
                    if q.hi < prev * prev {
                        return true;
                    }
                    if let Err(e) = self.charge() {
                        err = Some(e);
                        return false;
                    }
                    let cap = self.cap();
                    if q.lo > cap * cap {
                        return true;
                    }
                    let w = F64Iv::point(self.window());
                    let lo = ceil_i64(s.neg().sub(w).lo);
                    let hi = floor_i64(s.neg().add(w).hi);
                    x[1..].copy_from_slice(xp);
                    for x0 in lo..=hi {
                        x[0] = x0;
                        if let Err(e) = self.visit(&x) {
                            err = Some(e);
                            return false;
                        }
                    }
                    true
                });
                if let Some(e) = err {
                    return Err(e);
                }
                a += 1;
            }
            if rho >= self.cap() {
                return Ok(());
            }
            prev = rho;
            rho *= 2.0;
        }
    }

    /// Scan `x_0 = 0, 1, 2, ...` with each `x_i` within `r (1 + |θ_i|)` of
    /// `x_0 θ_i`.
    fn scan_heights(&mut self) -> Result<(), CylinderError> {
        let n = self.frame.n();
        let fast = self.frame.fast_components().to_vec();
        let mut x0 = 0i64;
        loop {
            if x0 as f64 > radius(self.best_hi, self.kf.lo) {
                return Ok(());
            }
            let ranges: Vec<(i64, i64)> = fast
                .iter()
                .map(|t| {
                    let c = t.mul(F64Iv::point(x0 as f64));
                    let d = F64Iv::point(self.best_hi).mul(F64Iv::point(1.0).add(t.abs())).hi;
                    (ceil_i64(c.sub(F64Iv::point(d)).lo), floor_i64(c.add(F64Iv::point(d)).hi))
                })
                .collect();
            let mut x = vec![x0; n + 1];
            let mut err = Ok(());
            box_product(&ranges, &mut |xp| {
                if x0 == 0 && !canonical(xp) {
                    return true;
                }
                x[1..].copy_from_slice(xp);
                if let Err(e) = self.charge().and_then(|_| self.visit(&x)) {
                    err = Err(e);
                    return false;
                }
                true
            });
            err?;
            x0 += 1;
        }
    }

    fn certify(self) -> Result<(CertifiedScalar, IntegerVector), CylinderError> {
        let mut best: Option<(IntegerVector, CertifiedScalar)> = None;
        let mut cands: Vec<&Vec<i64>> = self.contenders.iter().filter(|(_, v)| v.lo <= self.best_hi).map(|(x, _)| x).collect();
        cands.sort();
        for x in cands {
            let x = IntegerVector::from_i64(x);
            let p = project(self.frame, &x, self.precision)?;
            let v = p.r.max(&p.h.mul(&self.k));
            best = match best {
                None => Some((x, v)),
                Some((bx, bv)) => match certified_compare(&v, &bv, self.maxp) {
                    Comparison::Less => Some((x, v)),
                    Comparison::Greater | Comparison::EqualProven => Some((bx, bv)),
                    Comparison::Undecided => return Err(CylinderError::PrecisionExhausted { at: x.to_string() }),
                },
            };
        }
        let (x, v) = best.ok_or_else(|| CylinderError::Precondition("empty search".into()))?;
        Ok((v, x))
    }
}

/// Cartesian product of inclusive ranges; the callback returns `false` to stop.
fn box_product(ranges: &[(i64, i64)], f: &mut impl FnMut(&[i64]) -> bool) {
    if ranges.iter().any(|&(a, b)| a > b) {
        return;
    }
    let mut x: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        if !f(&x) {
            return;
        }
        let mut i = x.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if x[i] < ranges[i].1 {
                x[i] += 1;
                break;
            }
            x[i] = ranges[i].0;
        }
    }
}

/// Estimated work of the two scans at scale `tau`.
fn scan_costs(frame: &LineFrame, tau: f64, k: F64Iv) -> (f64, f64) {
    let w = F64Iv::point(tau).mul(fast_norm(frame)).div(k).map_or(f64::INFINITY, |v| v.hi);
    let r = radius(tau, k.lo);
    let shells = unit_ball_volume_lo(frame.n()) * (r + w + 1.0).powi(frame.n() as i32) / (2.0 * fast_norm(frame).lo);
    let heights = frame
        .fast_components()
        .iter()
        .fold(r + 1.0, |a, t| a * (2.0 * tau * (1.0 + t.abs().hi) + 1.0));
    (shells, heights)
}

/// `min max(r(x), h(x) K)` over nonzero integer `x`, with the attaining point
/// (lexicographically first among exact ties, up to sign).
pub fn minimax_scale(
    frame: &LineFrame,
    k: &CertifiedScalar,
    precision: u32,
    budget: u64,
) -> Result<(CertifiedScalar, IntegerVector), CylinderError> {
    let maxp = max_bits(precision);
    if k.sign(maxp) != Comparison::Greater {
        return Err(CylinderError::Precondition("scale factor must be positive".into()));
    }
    let kf = to_fast(&k.refine_lossy(64));
    let mut tau = 2.0 * minkowski_scale(frame.n(), kf.hi);
    loop {
        let mut m = Minimax {
            frame,
            k: k.clone(),
            kf,
            norm: fast_norm(frame),
            maxp,
            precision,
            budget,
            visited: 0,
            best_hi: tau,
            contenders: Vec::new(),
        };
        let (shells, heights) = scan_costs(frame, tau, kf);
        if shells <= heights {
            m.scan_ellipse()?;
        } else {
            m.scan_heights()?;
        }
        if !m.contenders.is_empty() {
            return m.certify();
        }
        tau *= 2.0;
    }
}

/// The smallest `t` for which `{r <= t, h <= t h(v)^{-1-γ}}` holds a nonzero
/// integer point.
pub fn smallest_t(
    frame: &LineFrame,
    v: &IntegerVector,
    gamma: &CertifiedScalar,
    precision: u32,
    budget: u64,
) -> Result<(CertifiedScalar, IntegerVector), CylinderError> {
    let maxp = max_bits(precision);
    let p = project(frame, v, precision)?;
    if p.h.sign(maxp) != Comparison::Greater {
        return Err(CylinderError::Precondition("h(v) must be positive".into()));
    }
    if gamma.sign(maxp) != Comparison::Greater {
        return Err(CylinderError::Precondition("gamma must be positive".into()));
    }
    let k = p.h.pow(&CertifiedScalar::one().add(gamma))?;
    minimax_scale(frame, &k, precision, budget)
}

/// `α = log h(v) / log t`, `β = α(1+γ) - 1`.
pub fn derive_alpha_beta(
    h_v: &CertifiedScalar,
    gamma: &CertifiedScalar,
    t: &CertifiedScalar,
    precision: u32,
) -> Result<(CertifiedScalar, CertifiedScalar), CylinderError> {
    let maxp = max_bits(precision);
    if t.sign(maxp) != Comparison::Greater || h_v.sign(maxp) != Comparison::Greater {
        return Err(CylinderError::Precondition("t and h(v) must be positive".into()));
    }
    match certified_compare(t, &CertifiedScalar::one(), maxp) {
        Comparison::Less | Comparison::Greater => {}
        _ => return Err(CylinderError::DegenerateT),
    }
    let alpha = h_v.ln()?.div(&t.ln()?)?;
    let beta = alpha.mul(&CertifiedScalar::one().add(gamma)).sub(&CertifiedScalar::one());
    Ok((alpha, beta))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LemmaVerdict {
    CertifiedEmpty,
    HypothesisFails,
    Undecided,
}

impl fmt::Display for LemmaVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LemmaVerdict::CertifiedEmpty => "CERTIFIED_EMPTY",
            LemmaVerdict::HypothesisFails => "HYPOTHESIS_FAILS",
            LemmaVerdict::Undecided => "UNDECIDED",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub verdict: LemmaVerdict,
    pub hypothesis: Comparison,
    /// `r(v)` against `t^{α-1-β}`
    pub r_match: Comparison,
    /// `h(v)` against `t^α`
    pub h_match: Comparison,
    /// `h(v) t^-β - r(v) t` against 0
    pub lower_corner: Comparison,
    /// `h(v)(t^-α - t^-β) + r(v) t` against 1
    pub upper_corner: Comparison,
}

/// Certify `C ∩ Z^{n+1} = ∅` through the corner inequalities.
///
/// Both corner values sit on the excluded face `r = t`. When `v` matches the
/// cylinder they equal exactly 0 and 1, and `r(y) < t` makes the inequalities
/// strict inside `C`, so equality (proven, or within the certified overlap of
/// the match) is accepted.
pub fn lemma_certificate(frame: &LineFrame, v: &IntegerVector, c: &Cylinder, precision: u32) -> Result<LemmaReport, CylinderError> {
    let maxp = max_bits(precision);
    let p = project(frame, v, precision)?;
    let r_match = certified_compare(&p.r, &c.r_target, maxp);
    let h_match = certified_compare(&p.h, &c.t_alpha, maxp);
    let lower = p.h.mul(&c.h_floor).sub(&p.r.mul(&c.t));
    let upper = p.h.mul(&c.h_ceil).add(&p.r.mul(&c.t));
    let lower_corner = lower.sign(maxp);
    let upper_corner = certified_compare(&upper, &CertifiedScalar::one(), maxp);
    let matched = |m: Comparison| matches!(m, Comparison::EqualProven | Comparison::Undecided);
    let overlap = matched(r_match) && matched(h_match);
    let r_pos = p.r.sign(maxp) == Comparison::Greater;
    let lower_ok = lower_corner == Comparison::Greater
        || (r_pos && (lower_corner == Comparison::EqualProven || (overlap && lower_corner == Comparison::Undecided)));
    let upper_ok = upper_corner == Comparison::Less
        || (r_pos && (upper_corner == Comparison::EqualProven || (overlap && upper_corner == Comparison::Undecided)));
    let verdict = match c.hypothesis {
        Comparison::Less | Comparison::EqualProven => LemmaVerdict::HypothesisFails,
        Comparison::Undecided => LemmaVerdict::Undecided,
        Comparison::Greater if overlap && lower_ok && upper_ok => LemmaVerdict::CertifiedEmpty,
        Comparison::Greater => LemmaVerdict::Undecided,
    };
    Ok(LemmaReport { verdict, hypothesis: c.hypothesis, r_match, h_match, lower_corner, upper_corner })
}

#[derive(Clone, Debug, PartialEq)]
pub enum BruteVerdict {
    Empty { checked: u64 },
    Witness(IntegerVector),
}

impl BruteVerdict {
    pub fn is_empty(&self) -> bool {
        matches!(self, BruteVerdict::Empty { .. })
    }
}

/// Number of candidates `brute_force_empty` would enumerate.
pub fn brute_force_cost(frame: &LineFrame, c: &Cylinder) -> u128 {
    let (shells, heights) = brute_plan(frame, c);
    shells.min(heights) as u128
}

/// Radius of the enumeration ellipsoid and the two scan costs.
fn brute_plan(frame: &LineFrame, c: &Cylinder) -> (f64, f64) {
    let (rho, _) = brute_radius(frame, c);
    let t = to_fast(&c.t).hi;
    let r = rho;
    let shells = Ellipse::new(frame).count(rho);
    let heights = frame
        .fast_components()
        .iter()
        .fold(r + 1.0, |a, th| a * (2.0 * t * (1.0 + th.abs().hi) + 1.0));
    (shells, heights)
}

/// `(ρ, l)`: points of `C` have `|x_0 + θ·x'| <= l` and `Q(x') <= ρ²`.
fn brute_radius(frame: &LineFrame, c: &Cylinder) -> (f64, f64) {
    let t = to_fast(&c.t).hi;
    let hc = to_fast(&c.h_ceil).hi.max(0.0);
    let l = F64Iv::point(hc).mul(fast_norm(frame)).hi;
    let box_r = F64Iv::point(t).sqr().add(F64Iv::point(hc).sqr()).sqrt().hi + 1.0;
    (F64Iv::point(box_r).add(F64Iv::point(l)).hi, l)
}

/// Enumerate every integer point that can lie in `C` and test membership.
/// Returns the lexicographically first witness.
pub fn brute_force_empty(frame: &LineFrame, c: &Cylinder, precision: u32, budget: u64) -> Result<BruteVerdict, CylinderError> {
    let maxp = max_bits(precision);
    let hf = to_fast(&c.h_floor);
    let hc = to_fast(&c.h_ceil);
    if hc.hi < hf.lo {
        return Ok(BruteVerdict::Empty { checked: 0 });
    }
    match certified_compare(&c.h_ceil, &c.h_floor, maxp) {
        Comparison::Less => return Ok(BruteVerdict::Empty { checked: 0 }),
        Comparison::Undecided => return Err(CylinderError::PrecisionExhausted { at: "h-band".into() }),
        _ => {}
    }
    let (shells, heights) = brute_plan(frame, c);
    let need = shells.min(heights);
    if need > budget as f64 {
        return Err(CylinderError::BudgetExceeded { needed: need as u128, budget });
    }
    let tf = to_fast(&c.t);
    let n = frame.n();
    let fast = frame.fast_components().to_vec();
    let (rho, l) = brute_radius(frame, c);
    let ell = Ellipse::new(frame);
    let by_ellipse = shells <= heights;

    // canonical representatives only; C is symmetric under x -> -x
    let test = |x: &[i64], out: &mut Vec<Vec<i64>>| -> Result<(), CylinderError> {
        let (r, h) = frame.fast_project(x);
        if r.lo >= tf.hi || h.hi < hf.lo || h.lo > hc.hi {
            return Ok(());
        }
        let xv = IntegerVector::from_i64(x);
        let p = project(frame, &xv, precision)?;
        if c.contains_projected(&p.r, &p.h, &xv, maxp)? {
            out.push(x.to_vec());
        }
        Ok(())
    };

    let slabs: Vec<i64> = if by_ellipse { (0..=ell.first(rho)).collect() } else { (0..=floor_i64(rho)).collect() };
    let results = par::map(&slabs, |&a| -> Result<Vec<Vec<i64>>, CylinderError> {
        let mut found = Vec::new();
        let mut x = vec![0i64; n + 1];
        let mut res = Ok(());
        if by_ellipse {
            if a == 0 {
                // x' = 0: only (x_0, 0, ..., 0) with 1 <= x_0 <= l
                for x0 in 1..=floor_i64(l) {
                    x[0] = x0;
                    test(&x, &mut found)?;
                }
            }
            let w = F64Iv::point(l);
            ell.slab(a, rho, &mut |xp| {
                let (s, _) = ell.q(xp);
                let lo = ceil_i64(s.neg().sub(w).lo);
                let hi = floor_i64(s.neg().add(w).hi);
                x[1..].copy_from_slice(xp);
                for x0 in lo..=hi {
                    x[0] = x0;
                    if let Err(e) = test(&x, &mut found) {
                        res = Err(e);
                        return false;
                    }
                }
                true
            });
        } else {
            let ranges: Vec<(i64, i64)> = fast
                .iter()
                .map(|t| {
                    let c = t.mul(F64Iv::point(a as f64));
                    let d = F64Iv::point(tf.hi).mul(F64Iv::point(1.0).add(t.abs())).hi;
                    (ceil_i64(c.sub(F64Iv::point(d)).lo), floor_i64(c.add(F64Iv::point(d)).hi))
                })
                .collect();
            x[0] = a;
            box_product(&ranges, &mut |xp| {
                if a == 0 && !canonical(xp) {
                    return true;
                }
                x[1..].copy_from_slice(xp);
                if let Err(e) = test(&x, &mut found) {
                    res = Err(e);
                    return false;
                }
                true
            });
        }
        res.map(|_| found)
    });
    let mut witnesses = Vec::new();
    for r in results {
        witnesses.extend(r?);
    }
    let first = witnesses
        .into_iter()
        .flat_map(|w| {
            let neg: Vec<i64> = w.iter().map(|c| -c).collect();
            [w, neg]
        })
        .min();
    Ok(match first {
        Some(w) => BruteVerdict::Witness(IntegerVector::from_i64(&w)),
        None => BruteVerdict::Empty { checked: need as u64 },
    })
}

#[derive(Clone, Debug)]
pub struct PipelineWitness {
    pub index: usize,
    pub v: IntegerVector,
    pub case_tag: CaseTag,
    pub gamma: CertifiedScalar,
    pub t: CertifiedScalar,
    pub alpha: CertifiedScalar,
    pub beta: CertifiedScalar,
    pub boundary_point: Option<IntegerVector>,
    pub cylinder: Cylinder,
    pub lemma: LemmaReport,
    /// `None` when brute force was not requested.
    pub brute: Option<Result<BruteVerdict, CylinderError>>,
    /// `β` against `α`
    pub beta_vs_alpha: Comparison,
    /// `α(1+γ) = 1+β` holds within certified overlap.
    pub ratio_consistent: bool,
}

impl PipelineWitness {
    /// The finite-scale exponent bounds implied by this witness, as
    /// `(name, value)` pairs.
    pub fn implied_bounds(&self) -> Vec<(&'static str, CertifiedScalar)> {
        match self.case_tag {
            CaseTag::Case1 => vec![("omega_lower", self.beta.clone()), ("omega_hat_upper", self.alpha.clone())],
            CaseTag::Case2 => {
                let inv = |s: &CertifiedScalar| s.recip().unwrap_or_else(|_| CertifiedScalar::zero());
                vec![("lambda_lower", inv(&self.beta)), ("lambda_hat_upper", inv(&self.alpha))]
            }
        }
    }

    pub fn to_json(&self, precision: u32) -> serde_json::Value {
        let b = |s: &CertifiedScalar| serde_json::json!(s.bounds_strings(precision));
        let brute = match &self.brute {
            None => serde_json::json!({"verdict": "SKIPPED"}),
            Some(Ok(BruteVerdict::Empty { checked })) => serde_json::json!({"verdict": "EMPTY", "checked": checked}),
            Some(Ok(BruteVerdict::Witness(w))) => serde_json::json!({"verdict": "WITNESS", "x": w}),
            Some(Err(e)) => serde_json::json!({"verdict": "ERROR", "error": e.to_string()}),
        };
        let implied: serde_json::Map<String, serde_json::Value> =
            self.implied_bounds().into_iter().map(|(k, v)| (k.to_string(), b(&v))).collect();
        serde_json::json!({
            "index": self.index,
            "v": self.v,
            "case": self.case_tag,
            "gamma": b(&self.gamma),
            "t": b(&self.t),
            "alpha": b(&self.alpha),
            "beta": b(&self.beta),
            "boundary_point": self.boundary_point,
            "cylinder": self.cylinder.to_json(precision),
            "lemma": self.lemma,
            "brute_force": brute,
            "beta_vs_alpha": self.beta_vs_alpha,
            "ratio_consistent": self.ratio_consistent,
            "implied": implied,
        })
    }
}

/// One record run through the pipeline.
#[derive(Clone, Debug)]
pub struct PipelineEntry {
    pub index: usize,
    pub v: IntegerVector,
    pub result: Result<PipelineWitness, CylinderError>,
}

impl PipelineEntry {
    pub fn to_json(&self, precision: u32) -> serde_json::Value {
        match &self.result {
            Ok(w) => w.to_json(precision),
            Err(e) => serde_json::json!({"index": self.index, "v": self.v, "error": e.to_string()}),
        }
    }
}

/// Build the witness attached to a single record vector.
pub fn pipeline_witness(
    frame: &LineFrame,
    index: usize,
    v: &IntegerVector,
    case: CaseTag,
    precision: u32,
    budget: u64,
    brute: bool,
) -> Result<PipelineWitness, CylinderError> {
    let maxp = max_bits(precision);
    let p = project(frame, v, precision)?;
    let one = CertifiedScalar::one();
    let (h_cmp, r_cmp) = (certified_compare(&p.h, &one, maxp), certified_compare(&p.r, &one, maxp));
    let ok = match case {
        CaseTag::Case1 => h_cmp == Comparison::Greater && r_cmp == Comparison::Less,
        CaseTag::Case2 => h_cmp == Comparison::Less && r_cmp == Comparison::Greater,
    };
    if !ok || p.r.sign(maxp) != Comparison::Greater {
        return Err(CylinderError::Precondition(format!("{v} does not fit {case}: need h(v) and r(v) on opposite sides of 1")));
    }
    let gamma = p.r.ln()?.neg().div(&p.h.ln()?)?;
    // h(v)^{1+γ} = h(v) / r(v)
    let k = p.h.div(&p.r)?;
    let (t, x) = minimax_scale(frame, &k, precision, budget)?;
    let (alpha, beta) = derive_alpha_beta(&p.h, &gamma, &t, precision)?;
    let cylinder = Cylinder::new(t.clone(), alpha.clone(), beta.clone(), precision)?;
    let lemma = lemma_certificate(frame, v, &cylinder, precision)?;
    let brute = brute.then(|| brute_force_empty(frame, &cylinder, precision, budget));
    let beta_vs_alpha = certified_compare(&beta, &alpha, maxp);
    let ratio = certified_compare(&alpha.mul(&one.add(&gamma)), &one.add(&beta), maxp);
    Ok(PipelineWitness {
        index,
        v: v.clone(),
        case_tag: case,
        gamma,
        t,
        alpha,
        beta,
        boundary_point: Some(x),
        cylinder,
        lemma,
        brute,
        beta_vs_alpha,
        ratio_consistent: matches!(ratio, Comparison::EqualProven | Comparison::Undecided),
    })
}

/// Run every record of `list` through the pipeline. SIM records feed CASE1,
/// LIN records CASE2.
pub fn ss_pipeline(list: &RecordList, precision: u32, budget: u64, brute: bool) -> Vec<PipelineEntry> {
    let frame = LineFrame::new(&list.theta);
    let case = match list.kind {
        RecordKind::Sim => CaseTag::Case1,
        RecordKind::Lin => CaseTag::Case2,
    };
    list.records
        .iter()
        .enumerate()
        .map(|(i, rec)| PipelineEntry {
            index: i,
            v: rec.x.clone(),
            result: pipeline_witness(&frame, i, &rec.x, case, precision, budget, brute),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certified::ThetaSpec;

    fn frame(s: &str) -> LineFrame {
        LineFrame::new(&s.parse::<ThetaSpec>().unwrap())
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume_lo(1) - 2.0).abs() < 1e-9);
        assert!((unit_ball_volume_lo(2) - std::f64::consts::PI).abs() < 1e-4);
        assert!((unit_ball_volume_lo(3) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-3);
        assert!(unit_ball_volume_lo(3) < 4.0 * std::f64::consts::PI / 3.0);
    }

    #[test]
    fn spec_lemma_example() {
        let f = frame("rat:0,rat:0");
        let c = Cylinder::new(CertifiedScalar::from_int(4), CertifiedScalar::from_ratio(1, 2), CertifiedScalar::from_int(2), 64)
            .unwrap();
        assert_eq!(c.hypothesis, Comparison::Greater);
        assert_eq!(c.r_target.exact().cloned(), CertifiedScalar::from_ratio(1, 32).exact().cloned());
        // corner values are exactly 0 and 1; check the arithmetic directly
        let hv = CertifiedScalar::from_int(2);
        let rv = CertifiedScalar::from_ratio(1, 32);
        let lower = hv.mul(&c.h_floor).sub(&rv.mul(&c.t));
        let upper = hv.mul(&c.h_ceil).add(&rv.mul(&c.t));
        assert!(lower.is_exact_zero());
        assert_eq!(certified_compare(&upper, &CertifiedScalar::one(), 64), Comparison::EqualProven);
        let _ = f;
    }

    #[test]
    fn hypothesis_guard() {
        let f = frame("sqrt:2,sqrt:3");
        let c = Cylinder::new(CertifiedScalar::from_int(4), CertifiedScalar::from_int(1), CertifiedScalar::from_int(1), 64)
            .unwrap();
        let rep = lemma_certificate(&f, &IntegerVector::from_i64(&[1, 1, 2]), &c, 64).unwrap();
        assert_eq!(rep.verdict, LemmaVerdict::HypothesisFails);
    }

    #[test]
    fn smallest_t_guard() {
        let f = frame("rat:0,rat:0");
        let e = smallest_t(&f, &IntegerVector::from_i64(&[0, 1, 0]), &CertifiedScalar::one(), 64, 1_000_000);
        assert!(matches!(e, Err(CylinderError::Precondition(_))));
    }

    #[test]
    fn alpha_beta_substitution() {
        let t = CertifiedScalar::from_int(3);
        let (a, b) = derive_alpha_beta(&t, &CertifiedScalar::one(), &t, 64).unwrap();
        assert!(a.interval().contains_rational(&num_rational::BigRational::from_integer(1.into())));
        assert!(b.interval().contains_rational(&num_rational::BigRational::from_integer(1.into())));
        let (a, b) = derive_alpha_beta(&CertifiedScalar::from_int(9), &CertifiedScalar::from_ratio(1, 2), &t, 64).unwrap();
        assert!((a.approx_f64() - 2.0).abs() < 1e-12 && (b.approx_f64() - 2.0).abs() < 1e-12);
        assert_eq!(
            derive_alpha_beta(&t, &CertifiedScalar::one(), &CertifiedScalar::one(), 64).unwrap_err(),
            CylinderError::DegenerateT
        );
    }

    #[test]
    fn brute_force_axis() {
        // θ = (0,0): h(x) = |x_0|; with t = 10, α = 0, β = 1 the band is
        // [0.1, 0.9] and holds no integer
        let f = frame("rat:0,rat:0");
        let c = Cylinder::new(CertifiedScalar::from_int(10), CertifiedScalar::zero(), CertifiedScalar::one(), 64).unwrap();
        assert_eq!(c.h_ceil.exact().cloned(), CertifiedScalar::from_ratio(9, 10).exact().cloned());
        assert!(brute_force_empty(&f, &c, 64, 1_000_000).unwrap().is_empty());
        // α > β inverts the band
        let c = Cylinder::new(CertifiedScalar::from_int(10), CertifiedScalar::from_int(2), CertifiedScalar::one(), 64).unwrap();
        assert_eq!(brute_force_empty(&f, &c, 64, 1).unwrap(), BruteVerdict::Empty { checked: 0 });
        // widening the band to [0.1, 1.9] admits (1, 0, 0)
        let c = Cylinder::new(CertifiedScalar::from_int(10), CertifiedScalar::from_ratio(-1, 2), CertifiedScalar::one(), 64);
        let c = c.unwrap();
        assert!(matches!(brute_force_empty(&f, &c, 64, 1_000_000).unwrap(), BruteVerdict::Witness(_)));
    }

    #[test]
    fn minimax_on_record() {
        let f = frame("sqrt:2,sqrt:3");
        let v = IntegerVector::from_i64(&[7, 10, 12]);
        let w = pipeline_witness(&f, 3, &v, CaseTag::Case1, 64, 10_000_000, true).unwrap();
        let t = w.t.approx_f64();
        // exhaustive oracle over a generous box
        let p = project(&f, &v, 64).unwrap();
        let k = p.h.approx_f64() / p.r.approx_f64();
        let mut best = f64::INFINITY;
        for a in -40i64..=40 {
            for b in -40i64..=40 {
                for c in -40i64..=40 {
                    if (a, b, c) == (0, 0, 0) {
                        continue;
                    }
                    let (r, h) = f.fast_project(&[a, b, c]);
                    best = best.min(r.lo.max(h.lo * k));
                }
            }
        }
        assert!((t - best).abs() < 1e-9 * best.max(1.0), "{t} vs {best}");
        assert!(w.ratio_consistent);
    }
}
