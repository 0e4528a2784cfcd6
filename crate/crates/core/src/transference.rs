//! Transference inequalities between the four exponents `λ, λ̂, ω, ω̂`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::certified::{
    certified_compare, compare_ext, max_bits, theta::parse_decimal, CertifiedScalar, Comparison, ExtScalar, RatPoly,
};
use crate::records::{ExponentEstimates, RecordKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    ExactInput,
    Estimated,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TupleError {
    Parse(String),
    DimensionTooSmall,
    /// A trivial relation fails for an exact tuple.
    TrivialRelation(&'static str),
}

impl fmt::Display for TupleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TupleError::Parse(m) => write!(f, "tuple: {m}"),
            TupleError::DimensionTooSmall => write!(f, "tuple needs n >= 2"),
            TupleError::TrivialRelation(r) => write!(f, "exact tuple violates the trivial relation {r}"),
        }
    }
}

impl std::error::Error for TupleError {}

#[derive(Clone, Debug)]
pub struct ExponentTuple {
    pub n: u32,
    pub lambda: CertifiedScalar,
    pub lambda_hat: CertifiedScalar,
    pub omega: ExtScalar,
    pub omega_hat: CertifiedScalar,
    pub provenance: Provenance,
}

impl ExponentTuple {
    /// Exact tuples must satisfy `λ >= λ̂ >= 1/n`, `ω >= ω̂ >= n`, `λ̂ <= 1`.
    pub fn new(
        n: u32,
        lambda: CertifiedScalar,
        lambda_hat: CertifiedScalar,
        omega: ExtScalar,
        omega_hat: CertifiedScalar,
        provenance: Provenance,
    ) -> Result<ExponentTuple, TupleError> {
        if n < 2 {
            return Err(TupleError::DimensionTooSmall);
        }
        let e = ExponentTuple { n, lambda, lambda_hat, omega, omega_hat, provenance };
        if provenance == Provenance::ExactInput {
            let maxp = max_bits(128);
            let inv_n = CertifiedScalar::from_ratio(1, n as i64);
            let nn = CertifiedScalar::from_int(n);
            let checks: [(&'static str, Comparison); 5] = [
                ("lambda >= lambda_hat", certified_compare(&e.lambda, &e.lambda_hat, maxp)),
                ("lambda_hat >= 1/n", certified_compare(&e.lambda_hat, &inv_n, maxp)),
                ("omega >= omega_hat", compare_ext(&e.omega, &e.omega_hat.clone().into(), maxp)),
                ("omega_hat >= n", certified_compare(&e.omega_hat, &nn, maxp)),
                ("lambda_hat <= 1", certified_compare(&CertifiedScalar::one(), &e.lambda_hat, maxp)),
            ];
            if let Some((name, _)) = checks.iter().find(|(_, c)| *c == Comparison::Less) {
                return Err(TupleError::TrivialRelation(name));
            }
        }
        Ok(e)
    }
}

fn parse_value(s: &str) -> Result<BigRational, TupleError> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| TupleError::Parse(format!("bad numerator in `{s}`")))?;
        let q: BigInt = q.trim().parse().map_err(|_| TupleError::Parse(format!("bad denominator in `{s}`")))?;
        if q.is_zero() {
            return Err(TupleError::Parse("zero denominator".into()));
        }
        return Ok(BigRational::new(p, q));
    }
    parse_decimal(s).map_err(|e| TupleError::Parse(e.0))
}

/// `n:λ,λ̂,ω,ω̂` with decimal or `p/q` entries; `ω` may be `inf`.
pub fn parse_tuple(s: &str, provenance: Provenance) -> Result<ExponentTuple, TupleError> {
    let (n, rest) = s.split_once(':').ok_or_else(|| TupleError::Parse("expected n:lambda,lambda_hat,omega,omega_hat".into()))?;
    let n: u32 = n.trim().parse().map_err(|_| TupleError::Parse(format!("bad dimension `{n}`")))?;
    let parts: Vec<&str> = rest.split(',').collect();
    if parts.len() != 4 {
        return Err(TupleError::Parse(format!("expected 4 values, found {}", parts.len())));
    }
    let q = |s: &str| parse_value(s).map(CertifiedScalar::from_rational);
    let omega = match parts[2].trim() {
        "inf" | "infinity" => ExtScalar::Infinite,
        s => ExtScalar::Finite(q(s)?),
    };
    ExponentTuple::new(n, q(parts[0])?, q(parts[1])?, omega, q(parts[3])?, provenance)
}

/// The ESTIMATED tuple from a SIM and a LIN estimate of the same θ.
pub fn tuple_from_estimates(sim: &ExponentEstimates, lin: &ExponentEstimates, n: u32) -> Result<ExponentTuple, TupleError> {
    if sim.kind != RecordKind::Sim || lin.kind != RecordKind::Lin {
        return Err(TupleError::Parse("need one SIM and one LIN estimate".into()));
    }
    ExponentTuple::new(
        n,
        sim.regular.clone(),
        sim.uniform.clone(),
        ExtScalar::Finite(lin.regular.clone()),
        lin.uniform.clone(),
        Provenance::Estimated,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Holds,
    Violated,
    Undecided,
    #[serde(rename = "N/A")]
    NotApplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Branch {
    Alt1,
    Alt2,
    AllEqual,
    Undecided,
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub lhs: Option<ExtScalar>,
    pub rhs: Option<ExtScalar>,
    pub verdict: Verdict,
    /// `lhs - rhs`; for identities `-|lhs - rhs|`.
    pub slack: Option<ExtScalar>,
    pub severity: Option<Severity>,
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Derived {
    pub b: Option<CertifiedScalar>,
    pub a: Option<CertifiedScalar>,
    pub g_lin: Option<CertifiedScalar>,
    pub g_sim: Option<CertifiedScalar>,
    pub geo_mean_pow: Option<CertifiedScalar>,
}

#[derive(Clone, Debug)]
pub struct InequalityReport {
    pub n: u32,
    pub provenance: Provenance,
    pub precision: u32,
    pub entries: Vec<Entry>,
    pub derived: Derived,
    pub branch: Option<Branch>,
}

pub const OUT_OF_SCOPE: &[&str] = &["schleischitz_rough"];

type Q = Result<ExtScalar, String>;

fn fin(x: CertifiedScalar) -> Q {
    Ok(ExtScalar::Finite(x))
}

fn div(a: &CertifiedScalar, b: &CertifiedScalar, what: &str) -> Result<CertifiedScalar, String> {
    a.div(b).map_err(|_| format!("{what} has a zero denominator"))
}

fn q_fin(q: &Q) -> Result<CertifiedScalar, String> {
    match q {
        Ok(ExtScalar::Finite(x)) => Ok(x.clone()),
        Ok(ExtScalar::Infinite) => Err("infinite operand".into()),
        Err(e) => Err(e.clone()),
    }
}

struct Ctx {
    maxp: u32,
    prec: u32,
    provenance: Provenance,
}

impl Ctx {
    fn verdict_of(&self, c: Comparison) -> Verdict {
        match c {
            Comparison::Greater | Comparison::EqualProven => Verdict::Holds,
            Comparison::Less => Verdict::Violated,
            Comparison::Undecided => Verdict::Undecided,
        }
    }

    fn severity(&self, v: Verdict) -> Option<Severity> {
        (v == Verdict::Violated).then_some(match self.provenance {
            Provenance::ExactInput => Severity::Error,
            Provenance::Estimated => Severity::Warning,
        })
    }

    fn na(&self, name: &'static str, why: String) -> Entry {
        Entry { name, lhs: None, rhs: None, verdict: Verdict::NotApplicable, slack: None, severity: None, note: Some(why) }
    }

    /// `lhs >= rhs`.
    fn ge(&self, name: &'static str, lhs: Q, rhs: Q) -> Entry {
        let (l, r) = match (lhs, rhs) {
            (Ok(l), Ok(r)) => (l, r),
            (Err(e), _) | (_, Err(e)) => return self.na(name, e),
        };
        let verdict = self.verdict_of(compare_ext(&l, &r, self.maxp));
        let slack = match (&l, &r) {
            (ExtScalar::Infinite, _) => Some(ExtScalar::Infinite),
            (ExtScalar::Finite(a), ExtScalar::Finite(b)) => Some(ExtScalar::Finite(a.sub(b).refine_lossy(self.prec))),
            (ExtScalar::Finite(_), ExtScalar::Infinite) => None,
        };
        Entry {
            name,
            lhs: Some(l.refine_lossy(self.prec)),
            rhs: Some(r.refine_lossy(self.prec)),
            verdict,
            slack,
            severity: self.severity(verdict),
            note: None,
        }
    }

    /// `lhs = rhs`.
    fn eq(&self, name: &'static str, lhs: Q, rhs: Q) -> Entry {
        let (l, r) = match (q_fin(&lhs), q_fin(&rhs)) {
            (Ok(l), Ok(r)) => (l, r),
            (Err(e), _) | (_, Err(e)) => return self.na(name, e),
        };
        let verdict = match certified_compare(&l, &r, self.maxp) {
            Comparison::EqualProven => Verdict::Holds,
            Comparison::Less | Comparison::Greater => Verdict::Violated,
            Comparison::Undecided => Verdict::Undecided,
        };
        Entry {
            name,
            slack: Some(ExtScalar::Finite(l.sub(&r).abs().neg().refine_lossy(self.prec))),
            lhs: Some(l.refine_lossy(self.prec).into()),
            rhs: Some(r.refine_lossy(self.prec).into()),
            verdict,
            severity: self.severity(verdict),
            note: None,
        }
    }

    /// `a >= b >= c`, judged by the weaker link.
    fn chain(&self, name: &'static str, a: Q, b: Q, c: Q) -> Entry {
        let first = self.ge(name, a.clone(), b.clone());
        let second = self.ge(name, b, c.clone());
        if let Some(e) = [&first, &second].into_iter().find(|e| e.verdict == Verdict::NotApplicable) {
            return self.na(name, e.note.clone().unwrap_or_default());
        }
        let verdict = [first.verdict, second.verdict]
            .into_iter()
            .max_by_key(|v| match v {
                Verdict::Violated => 2,
                Verdict::Undecided => 1,
                _ => 0,
            })
            .unwrap_or(Verdict::Holds);
        let slack = match (first.slack, second.slack) {
            (Some(ExtScalar::Finite(x)), Some(ExtScalar::Finite(y))) => Some(ExtScalar::Finite(x.min(&y).refine_lossy(self.prec))),
            (Some(ExtScalar::Infinite), s) | (s, Some(ExtScalar::Infinite)) => s,
            _ => None,
        };
        Entry {
            name,
            lhs: first.lhs,
            rhs: second.rhs,
            verdict,
            slack,
            severity: self.severity(verdict),
            note: None,
        }
    }
}

/// `f(x) = ω̂⁻¹ xⁿ - x + (1 - ω̂⁻¹)` with rational `ω̂`.
pub fn mm_poly_f(omega_hat: &BigRational, n: u32) -> RatPoly {
    let w = omega_hat.recip();
    let mut c = vec![BigRational::zero(); n as usize + 1];
    c[0] = BigRational::one() - &w;
    c[1] -= BigRational::one();
    c[n as usize] += w;
    RatPoly::new(c)
}

/// `g(x) = (1 - λ̂) xⁿ - x^{n-1} + λ̂` with rational `λ̂`.
pub fn mm_poly_g(lambda_hat: &BigRational, n: u32) -> RatPoly {
    let mut c = vec![BigRational::zero(); n as usize + 1];
    c[0] = lambda_hat.clone();
    c[n as usize - 1] -= BigRational::one();
    c[n as usize] += BigRational::one() - lambda_hat;
    RatPoly::new(c)
}

/// Largest real root of `f`. After removing the factor `x - 1` the cofactor
/// `ω̂⁻¹(1 + x + ... + x^{n-1}) - 1` is increasing on `x > 0`, so the answer is
/// `1` when the cofactor is nonnegative at `1` and its unique root in `[1, ω̂]`
/// otherwise.
pub fn mm_root_lin(omega_hat: &CertifiedScalar, n: u32, precision: u32) -> Result<CertifiedScalar, String> {
    if n < 2 {
        return Err("n must be at least 2".into());
    }
    let w = omega_hat.recip().map_err(|_| "omega_hat must be positive".to_string())?;
    let mut coeffs = vec![w.clone(); n as usize];
    coeffs[0] = w.sub(&CertifiedScalar::one());
    let at_one = w.mul(&CertifiedScalar::from_int(n)).sub(&CertifiedScalar::one());
    deflated_root(coeffs, at_one, omega_hat.clone(), precision)
}

/// Largest real root of `g`. The cofactor after removing `x - 1` is
/// `(1 - λ̂) x^{n-1} - λ̂(1 + x + ... + x^{n-2})`, with value `1 - nλ̂` at `1`
/// and `1 - λ̂ > 0` at `1/(1 - λ̂)`.
pub fn mm_root_sim(lambda_hat: &CertifiedScalar, n: u32, precision: u32) -> Result<CertifiedScalar, String> {
    if n < 2 {
        return Err("n must be at least 2".into());
    }
    let one = CertifiedScalar::one();
    let lead = one.sub(lambda_hat);
    let maxp = max_bits(precision);
    if certified_compare(&lead, &CertifiedScalar::zero(), maxp) != Comparison::Greater {
        return Err("lambda_hat must be below 1".into());
    }
    let mut coeffs = vec![lambda_hat.neg(); n as usize];
    coeffs[n as usize - 1] = lead.clone();
    let at_one = one.sub(&lambda_hat.mul(&CertifiedScalar::from_int(n)));
    let hi = lead.recip().map_err(|e| e.to_string())?;
    deflated_root(coeffs, at_one, hi, precision)
}

fn deflated_root(coeffs: Vec<CertifiedScalar>, at_one: CertifiedScalar, hi: CertifiedScalar, precision: u32) -> Result<CertifiedScalar, String> {
    let one = CertifiedScalar::one();
    match at_one.sign(max_bits(precision)) {
        Comparison::Greater | Comparison::EqualProven => return Ok(one),
        Comparison::Less | Comparison::Undecided => {}
    }
    // widen the bracket if the certified sign at the upper end is not positive
    let mut hi = hi.max(&one);
    for _ in 0..64 {
        let v = eval_poly(&coeffs, &hi);
        if v.sign(max_bits(precision)) == Comparison::Greater {
            break;
        }
        hi = hi.mul(&CertifiedScalar::from_int(2));
    }
    CertifiedScalar::poly_root(&coeffs, &one, &hi).refine(precision).map_err(|e| e.to_string())
}

fn eval_poly(coeffs: &[CertifiedScalar], x: &CertifiedScalar) -> CertifiedScalar {
    coeffs.iter().rev().fold(CertifiedScalar::zero(), |acc, c| acc.mul(x).add(c))
}

/// `A = (1 - ω̂⁻¹)/(1 - λ̂)`.
pub fn quantity_a(e: &ExponentTuple) -> Result<CertifiedScalar, String> {
    let one = CertifiedScalar::one();
    let num = one.sub(&div(&one, &e.omega_hat, "omega_hat^-1")?);
    div(&num, &one.sub(&e.lambda_hat), "A")
}

/// `B = (1 + λ)/(1 + ω⁻¹)`, with `ω⁻¹ = 0` for infinite `ω`.
pub fn quantity_b(e: &ExponentTuple) -> Result<CertifiedScalar, String> {
    let one = CertifiedScalar::one();
    let winv = e.omega.recip().map_err(|_| "omega is zero".to_string())?;
    div(&one.add(&e.lambda), &one.add(&winv), "B")
}

/// `(ω̂ λ̂)^{1/(n-1)}`.
pub fn geo_mean_pow(e: &ExponentTuple) -> Result<CertifiedScalar, String> {
    let p = e.omega_hat.mul(&e.lambda_hat);
    p.pow(&CertifiedScalar::from_ratio(1, e.n as i64 - 1)).map_err(|e| e.to_string())
}

fn admissible_uniform(e: &ExponentTuple, maxp: u32) -> Result<(), String> {
    if certified_compare(&e.lambda_hat, &CertifiedScalar::one(), maxp) != Comparison::Less {
        return Err("requires lambda_hat < 1".into());
    }
    if certified_compare(&e.omega_hat, &CertifiedScalar::one(), maxp) != Comparison::Greater {
        return Err("requires omega_hat > 1".into());
    }
    Ok(())
}

/// Which chain of the alternative holds. By substitution,
/// `g(A) = λ̂ - A^{n-1}/ω̂`, whose sign is that of `ω̂λ̂ - A^{n-1}`:
/// positive puts `G_sim <= A <= P <= G_lin`, negative the reverse chain, and
/// zero makes all four quantities coincide.
pub fn ordering_branch(e: &ExponentTuple, precision: u32) -> Branch {
    let maxp = max_bits(precision);
    if admissible_uniform(e, maxp).is_err() {
        return Branch::Undecided;
    }
    let Ok(a) = quantity_a(e) else { return Branch::Undecided };
    let d = e.omega_hat.mul(&e.lambda_hat).sub(&a.powi(e.n - 1));
    match d.sign(maxp) {
        Comparison::Greater => Branch::Alt2,
        Comparison::Less => Branch::Alt1,
        Comparison::EqualProven => Branch::AllEqual,
        Comparison::Undecided => Branch::Undecided,
    }
}

pub fn evaluate_inequalities(e: &ExponentTuple, precision: u32) -> InequalityReport {
    let maxp = max_bits(precision);
    let cx = Ctx { maxp, prec: precision, provenance: e.provenance };
    let n = e.n;
    let one = CertifiedScalar::one();
    let nn = CertifiedScalar::from_int(n);
    let nm1 = CertifiedScalar::from_int(n - 1);
    let lam = &e.lambda;
    let lamh = &e.lambda_hat;
    let omh = &e.omega_hat;

    let lam_inv = div(&one, lam, "lambda^-1");
    let omh_inv = div(&one, omh, "omega_hat^-1");
    let om_inv = e.omega.recip().map_err(|_| "omega^-1 has a zero denominator".to_string());
    let one_m_lamh = one.sub(lamh);
    let lamh_lt_1 = certified_compare(lamh, &one, maxp) == Comparison::Less;
    let uniform_ok = admissible_uniform(e, maxp);

    // (1 + ω)/(1 + λ)
    let ratio_reg: Q = match &e.omega {
        ExtScalar::Infinite => Ok(ExtScalar::Infinite),
        ExtScalar::Finite(w) => div(&one.add(w), &one.add(lam), "(1+omega)/(1+lambda)").map(ExtScalar::Finite),
    };
    // (1 + ω⁻¹)/(1 + λ⁻¹)
    let ratio_inv: Q = (|| {
        let wi = om_inv.clone()?;
        let li = lam_inv.clone()?;
        div(&one.add(&wi), &one.add(&li), "(1+omega^-1)/(1+lambda^-1)").map(ExtScalar::Finite)
    })();
    let w_over_wh: Q = match &e.omega {
        ExtScalar::Infinite => Ok(ExtScalar::Infinite),
        ExtScalar::Finite(w) => div(w, omh, "omega/omega_hat").map(ExtScalar::Finite),
    };
    let l_over_lh: Q = div(lam, lamh, "lambda/lambda_hat").map(ExtScalar::Finite);
    let need_lamh = |q: Result<CertifiedScalar, String>| -> Q {
        if !lamh_lt_1 {
            return Err("requires lambda_hat < 1".into());
        }
        q.map(ExtScalar::Finite)
    };
    let need_uniform = |q: Result<CertifiedScalar, String>| -> Q {
        uniform_ok.clone()?;
        q.map(ExtScalar::Finite)
    };

    let b = quantity_b(e);
    let a = uniform_ok.clone().and_then(|_| quantity_a(e));
    let g_lin = uniform_ok.clone().and_then(|_| mm_root_lin(omh, n, precision));
    let g_sim = uniform_ok.clone().and_then(|_| mm_root_sim(lamh, n, precision));
    let geo = geo_mean_pow(e);
    let bl_rhs_1 = need_lamh(div(&nm1, &one_m_lamh, "(n-1)/(1-lambda_hat)"));
    let bl_rhs_2: Q = omh_inv.clone().and_then(|wi| div(&one.sub(&wi), &nm1, "(1-omega_hat^-1)/(n-1)")).map(ExtScalar::Finite);

    let mut entries = vec![
        cx.ge("trivial_lambda_ge_lambda_hat", fin(lam.clone()), fin(lamh.clone())),
        cx.ge("trivial_lambda_hat_ge_1_over_n", fin(lamh.clone()), fin(CertifiedScalar::from_ratio(1, n as i64))),
        cx.ge("trivial_omega_ge_omega_hat", Ok(e.omega.clone()), fin(omh.clone())),
        cx.ge("trivial_omega_hat_ge_n", fin(omh.clone()), fin(nn.clone())),
        cx.ge("jarnik_lambda_hat_le_1", fin(one.clone()), fin(lamh.clone())),
        cx.ge("khintchine_1", ratio_reg.clone(), fin(nn.clone())),
        cx.ge("khintchine_2", ratio_inv.clone(), fin(CertifiedScalar::from_ratio(1, n as i64))),
        cx.ge("bugeaud_laurent_1", ratio_reg.clone(), bl_rhs_1.clone()),
        cx.ge("bugeaud_laurent_2", ratio_inv.clone(), bl_rhs_2.clone()),
        cx.ge("german_uniform_1", fin(omh.clone()), bl_rhs_1.clone()),
        cx.ge("german_uniform_2", fin(lamh.clone()), bl_rhs_2.clone()),
        cx.ge("schmidt_summerer_1", ratio_reg.clone(), fin(omh.clone())),
        cx.ge("schmidt_summerer_2", ratio_inv.clone(), fin(lamh.clone())),
        cx.ge("rewritten_1", w_over_wh.clone(), b.clone().map(ExtScalar::Finite)),
        cx.ge("rewritten_2", l_over_lh.clone(), b.clone().map(ExtScalar::Finite)),
        cx.ge("prop1_b_ge_a", b.clone().map(ExtScalar::Finite), need_uniform(a.clone())),
        cx.ge("cor1_1", w_over_wh.clone(), need_uniform(a.clone())),
        cx.ge("cor1_2", l_over_lh.clone(), need_uniform(a.clone())),
        cx.ge("marnat_moshchevitin_1", w_over_wh.clone(), need_uniform(g_lin.clone())),
        cx.ge("marnat_moshchevitin_2", l_over_lh.clone(), need_uniform(g_sim.clone())),
        cx.ge(
            "cor2_1",
            w_over_wh.clone(),
            need_uniform(b.clone().and_then(|b| g_lin.clone().map(|g| b.max(&g)))),
        ),
        cx.ge(
            "cor2_2",
            l_over_lh.clone(),
            need_uniform(b.clone().and_then(|b| g_sim.clone().map(|g| b.max(&g)))),
        ),
        cx.ge(
            "cor2_3",
            need_uniform(a.clone()),
            need_uniform(g_lin.clone().and_then(|gl| g_sim.clone().map(|gs| gl.min(&gs)))),
        ),
        cx.ge(
            "schleischitz_dual_1",
            match &e.omega {
                ExtScalar::Infinite => Ok(ExtScalar::Infinite),
                ExtScalar::Finite(w) => div(&w.powi(n - 1), &omh.powi(n), "omega^(n-1)/omega_hat^n").map(ExtScalar::Finite),
            },
            fin(lamh.clone()),
        ),
        cx.ge(
            "schleischitz_dual_2",
            match &e.omega {
                ExtScalar::Infinite => Ok(ExtScalar::Infinite),
                ExtScalar::Finite(w) => div(&w.powi(n), &omh.powi(n + 1), "omega^n/omega_hat^(n+1)").map(ExtScalar::Finite),
            },
            fin(lam.clone()),
        ),
    ];
    if n == 2 {
        entries.push(cx.eq("jarnik_identity", omh_inv.clone().map(|wi| ExtScalar::Finite(wi.add(lamh))), fin(one.clone())));
        entries.push(cx.ge("jarnik_1", w_over_wh.clone(), fin(omh.sub(&one))));
        entries.push(cx.ge("jarnik_2", l_over_lh.clone(), need_lamh(div(lamh, &one_m_lamh, "lambda_hat/(1-lambda_hat)"))));
    }
    entries.push(cx.chain("bl_chain_1", ratio_reg, fin(omh.clone()), bl_rhs_1));
    entries.push(cx.chain("bl_chain_2", ratio_inv, fin(lamh.clone()), bl_rhs_2));

    let refine = |x: Result<CertifiedScalar, String>| x.ok().map(|v| v.refine_lossy(precision));
    InequalityReport {
        n,
        provenance: e.provenance,
        precision,
        entries,
        derived: Derived { b: refine(b), a: refine(a), g_lin: refine(g_lin), g_sim: refine(g_sim), geo_mean_pow: refine(geo) },
        branch: uniform_ok.is_ok().then(|| ordering_branch(e, precision)),
    }
}

impl InequalityReport {
    pub fn entry(&self, name: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Violations that count as errors (exact input only).
    pub fn has_errors(&self) -> bool {
        self.entries.iter().any(|e| e.severity == Some(Severity::Error))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let p = self.precision;
        let ext = |x: &Option<ExtScalar>| x.as_ref().map_or(serde_json::Value::Null, |v| v.to_json(p));
        let sc = |x: &Option<CertifiedScalar>| {
            x.as_ref().map_or(serde_json::Value::Null, |v| serde_json::json!(v.bounds_strings(p)))
        };
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|e| {
                let mut o = serde_json::json!({
                    "name": e.name,
                    "lhs": ext(&e.lhs),
                    "rhs": ext(&e.rhs),
                    "verdict": e.verdict,
                    "slack": ext(&e.slack),
                });
                if let Some(s) = e.severity {
                    o["severity"] = serde_json::json!(s);
                }
                if let Some(n) = &e.note {
                    o["note"] = serde_json::json!(n);
                }
                o
            })
            .collect();
        serde_json::json!({
            "n": self.n,
            "provenance": self.provenance,
            "inequalities": entries,
            "derived": {
                "B": sc(&self.derived.b),
                "A": sc(&self.derived.a),
                "G_lin": sc(&self.derived.g_lin),
                "G_sim": sc(&self.derived.g_sim),
                "geo_mean_pow": sc(&self.derived.geo_mean_pow),
            },
            "branch": self.branch,
            "out_of_scope": OUT_OF_SCOPE,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn tuple(s: &str) -> ExponentTuple {
        parse_tuple(s, Provenance::ExactInput).unwrap()
    }

    fn close(x: &CertifiedScalar, want: f64) -> bool {
        (x.approx_f64() - want).abs() < 1e-12
    }

    #[test]
    fn trivial_point_holds_everywhere() {
        let r = evaluate_inequalities(&tuple("2:1/2,1/2,2,2"), 128);
        for e in &r.entries {
            assert_eq!(e.verdict, Verdict::Holds, "{}", e.name);
        }
        assert_eq!(r.branch, Some(Branch::AllEqual));
    }

    #[test]
    fn b_and_a_by_substitution() {
        let r = evaluate_inequalities(&tuple("2:1,1/2,4,2"), 128);
        assert_eq!(r.derived.b.as_ref().unwrap().exact(), Some(&q(8, 5)));
        assert_eq!(r.derived.a.as_ref().unwrap().exact(), Some(&q(1, 1)));
        assert_eq!(r.entry("prop1_b_ge_a").unwrap().verdict, Verdict::Holds);
    }

    #[test]
    fn impossible_exact_tuple_is_flagged() {
        // omega_hat = 6 > (1 + omega)/(1 + lambda) = 4/2
        let r = evaluate_inequalities(&tuple("3:1,1/2,3,3"), 128);
        let e = r.entry("schmidt_summerer_1").unwrap();
        assert_eq!(e.verdict, Verdict::Violated);
        assert_eq!(e.severity, Some(Severity::Error));
        assert!(r.has_errors());
    }

    #[test]
    fn jarnik_identity_violation() {
        let r = evaluate_inequalities(&tuple("2:1,3/5,3,2"), 128);
        assert_eq!(r.entry("jarnik_identity").unwrap().verdict, Verdict::Violated);
        let r = evaluate_inequalities(&parse_tuple("2:1,3/5,3,2", Provenance::Estimated).unwrap(), 128);
        assert_eq!(r.entry("jarnik_identity").unwrap().severity, Some(Severity::Warning));
    }

    #[test]
    fn infinite_omega() {
        let r = evaluate_inequalities(&tuple("2:1,1/2,inf,2"), 128);
        assert!(r.entry("khintchine_1").unwrap().lhs.as_ref().unwrap().is_infinite());
        assert_eq!(r.derived.b.as_ref().unwrap().exact(), Some(&q(2, 1)));
        assert_eq!(r.entry("khintchine_2").unwrap().verdict, Verdict::Holds);
    }

    #[test]
    fn degenerate_denominators() {
        let r = evaluate_inequalities(&tuple("2:1,1,3,3"), 128);
        assert_eq!(r.entry("prop1_b_ge_a").unwrap().verdict, Verdict::NotApplicable);
        assert_eq!(r.branch, None);
    }

    #[test]
    fn mm_roots() {
        let p = 128;
        assert!(close(&mm_root_lin(&CertifiedScalar::from_int(3), 2, p).unwrap(), 2.0));
        assert_eq!(mm_root_lin(&CertifiedScalar::from_int(3), 3, p).unwrap().exact(), Some(&q(1, 1)));
        assert!(close(&mm_root_lin(&CertifiedScalar::from_int(4), 3, p).unwrap(), (13f64.sqrt() - 1.0) / 2.0));
        assert!(close(&mm_root_sim(&CertifiedScalar::from_ratio(3, 5), 2, p).unwrap(), 1.5));
        assert_eq!(mm_root_sim(&CertifiedScalar::from_ratio(1, 3), 3, p).unwrap().exact(), Some(&q(1, 1)));
        assert_eq!(mm_root_sim(&CertifiedScalar::from_ratio(1, 2), 2, p).unwrap().exact(), Some(&q(1, 1)));
    }

    #[test]
    fn mm_polys_vanish_at_one() {
        for n in 2..=6 {
            assert!(mm_poly_f(&q(7, 2), n).eval(&q(1, 1)).is_zero());
            assert!(mm_poly_g(&q(2, 5), n).eval(&q(1, 1)).is_zero());
        }
    }

    #[test]
    fn branches() {
        assert_eq!(ordering_branch(&tuple("2:3,1/2,4,3"), 128), Branch::Alt2);
        assert_eq!(ordering_branch(&tuple("2:1,2/3,3,3"), 128), Branch::AllEqual);
        let b = ordering_branch(&tuple("3:1,17/50,5,4"), 128);
        assert_ne!(b, Branch::Undecided);
    }
}
