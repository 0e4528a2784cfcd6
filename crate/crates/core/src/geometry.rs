//! Geometry relative to the line spanned by `(1, θ_1, ..., θ_n)`.
//!
//! For an integer point `x`, `h(x)` is the distance to the orthogonal
//! complement of the line (the normalized linear form) and `r(x)` the distance
//! to the line itself.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::certified::{
    max_bits, CertifiedScalar, Comparison, ExtScalar, F64Iv, ScalarError, ThetaSpec,
};
use crate::lattice;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeometryError {
    DimensionMismatch { expected: usize, found: usize },
    DependentInput,
    WrongDimension { expected: usize, found: usize },
    EmptySubspace,
    Scalar(ScalarError),
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::DimensionMismatch { expected, found } => {
                write!(f, "vector has {found} coordinates, expected {expected}")
            }
            GeometryError::DependentInput => write!(f, "spanning vectors are linearly dependent"),
            GeometryError::WrongDimension { expected, found } => {
                write!(f, "subspace has dimension {found}, expected {expected}")
            }
            GeometryError::EmptySubspace => write!(f, "subspace is zero"),
            GeometryError::Scalar(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for GeometryError {}

impl From<ScalarError> for GeometryError {
    fn from(e: ScalarError) -> Self {
        GeometryError::Scalar(e)
    }
}

/// A point `(x_0, ..., x_n)` of the integer lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntegerVector(pub Vec<BigInt>);

impl IntegerVector {
    pub fn new(coords: Vec<BigInt>) -> Self {
        IntegerVector(coords)
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        IntegerVector(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn norm_sq(&self) -> BigInt {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn neg(&self) -> Self {
        IntegerVector(self.0.iter().map(|c| -c).collect())
    }

    /// Coordinates as `i64` when they all fit.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.0.iter().map(ToPrimitive::to_i64).collect()
    }

    pub fn dot(&self, o: &IntegerVector) -> BigInt {
        self.0.iter().zip(&o.0).map(|(a, b)| a * b).sum()
    }
}

impl fmt::Display for IntegerVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// JSON numbers when they fit in `i64`, decimal strings otherwise.
impl Serialize for IntegerVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<serde_json::Value> = self.0.iter().map(int_to_json).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntegerVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<serde_json::Value>::deserialize(d)?;
        v.iter().map(int_from_json).collect::<Option<Vec<_>>>().map(IntegerVector).ok_or_else(|| D::Error::custom("expected integer coordinates"))
    }
}

pub fn int_to_json(c: &BigInt) -> serde_json::Value {
    match c.to_i64() {
        Some(i) => serde_json::Value::from(i),
        None => serde_json::Value::from(c.to_string()),
    }
}

pub fn int_from_json(v: &serde_json::Value) -> Option<BigInt> {
    match v {
        serde_json::Value::Number(n) => n.as_i64().map(BigInt::from),
        serde_json::Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

/// The line `ℓ` together with cached certified and double-precision data.
#[derive(Clone, Debug)]
pub struct LineFrame {
    theta: ThetaSpec,
    comps: Vec<CertifiedScalar>,
    norm_sq: CertifiedScalar,
    norm: CertifiedScalar,
    fast: Vec<F64Iv>,
    fast_norm_sq: F64Iv,
}

impl LineFrame {
    pub fn new(theta: &ThetaSpec) -> LineFrame {
        let comps: Vec<CertifiedScalar> = theta.components().iter().map(CertifiedScalar::theta).collect();
        let mut sq = vec![CertifiedScalar::one()];
        sq.extend(comps.iter().map(|c| c.sqr()));
        let norm_sq = CertifiedScalar::sum(&sq);
        let norm = norm_sq.sqrt().expect("norm square is at least one");
        let fast: Vec<F64Iv> = comps
            .iter()
            .map(|c| {
                let (lo, hi) = c.refine_lossy(64).f64_bounds();
                F64Iv::new(lo, hi)
            })
            .collect();
        let fast_norm_sq = fast.iter().fold(F64Iv::point(1.0), |acc, t| acc.add(t.sqr()));
        LineFrame { theta: theta.clone(), comps, norm_sq, norm, fast, fast_norm_sq }
    }

    pub fn theta(&self) -> &ThetaSpec {
        &self.theta
    }

    pub fn n(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[CertifiedScalar] {
        &self.comps
    }

    /// `1 + Σ θ_i²`.
    pub fn direction_norm_sq(&self) -> &CertifiedScalar {
        &self.norm_sq
    }

    pub fn direction_norm(&self) -> &CertifiedScalar {
        &self.norm
    }

    pub fn fast_components(&self) -> &[F64Iv] {
        &self.fast
    }

    fn check(&self, x: &IntegerVector) -> Result<(), GeometryError> {
        if x.dim() != self.n() + 1 {
            return Err(GeometryError::DimensionMismatch { expected: self.n() + 1, found: x.dim() });
        }
        Ok(())
    }

    /// The exact linear form `x_0 + Σ θ_i x_i`.
    pub fn linear_form(&self, x: &IntegerVector) -> Result<CertifiedScalar, GeometryError> {
        self.check(x)?;
        let mut terms = vec![CertifiedScalar::from_int(x.0[0].clone())];
        for (c, t) in x.0[1..].iter().zip(&self.comps) {
            if !c.is_zero() {
                terms.push(t.mul(&CertifiedScalar::from_int(c.clone())));
            }
        }
        Ok(CertifiedScalar::sum(&terms))
    }

    /// `(r, h)` with double-precision interval arithmetic. Coordinates must be
    /// below `2^53` in magnitude.
    pub fn fast_project(&self, x: &[i64]) -> (F64Iv, F64Iv) {
        let xs: Vec<F64Iv> = x.iter().map(|&c| F64Iv::point(c as f64)).collect();
        let mut form = xs[0];
        for (c, t) in xs[1..].iter().zip(&self.fast) {
            form = form.add(t.mul(*c));
        }
        let norm = self.fast_norm_sq.sqrt();
        let h = form.abs().div(norm).expect("norm is at least one");
        // Lagrange identity: |x|²|u|² - <x,u>² = Σ_{i<j} (x_i u_j - x_j u_i)²
        let u: Vec<F64Iv> = std::iter::once(F64Iv::point(1.0)).chain(self.fast.iter().copied()).collect();
        let mut acc = F64Iv::point(0.0);
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                acc = acc.add(xs[i].mul(u[j]).sub(xs[j].mul(u[i])).sqr());
            }
        }
        let r = acc.div(self.fast_norm_sq).expect("norm is at least one").sqrt();
        (r, h)
    }
}

/// Distances of an integer point to `ℓ⊥` and `ℓ`.
#[derive(Clone, Debug)]
pub struct Projection {
    pub r: CertifiedScalar,
    pub h: CertifiedScalar,
    /// `r²` could not be certified nonnegative; `r` was clamped at zero.
    pub r_clamped: bool,
}

/// `h = |x_0 + Σθ_i x_i| / |(1,θ)|` and `r = sqrt(|x|² - h²)`.
pub fn project(frame: &LineFrame, x: &IntegerVector, precision: u32) -> Result<Projection, GeometryError> {
    let form = frame.linear_form(x)?;
    let h = form.abs().div(frame.direction_norm())?;
    let nx = CertifiedScalar::from_int(x.norm_sq());
    let r_sq = nx.mul(frame.direction_norm_sq()).sub(&form.sqr()).div(frame.direction_norm_sq())?;
    let max = max_bits(precision);
    let r_clamped = match r_sq.sign(max) {
        Comparison::Greater | Comparison::EqualProven => false,
        Comparison::Less => unreachable!("a squared distance is never negative"),
        Comparison::Undecided => true,
    };
    let r = r_sq.sqrt()?;
    Ok(Projection { r: r.refine_lossy(precision), h: h.refine_lossy(precision), r_clamped })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InnerVerdict {
    StrictlyBetween0And1,
    Outside,
    Undecided,
}

/// Whether `0 < <v, x> < 1` for a rational point `x`. The inner product is
/// exact, so the verdict is never undecided for rational input.
pub fn inner_certificate(v: &IntegerVector, x: &[BigRational]) -> InnerVerdict {
    if v.dim() != x.len() {
        return InnerVerdict::Undecided;
    }
    let s: BigRational = v.0.iter().zip(x).map(|(a, b)| b * BigRational::from_integer(a.clone())).sum();
    if s.is_positive() && s < BigRational::from_integer(1.into()) {
        InnerVerdict::StrictlyBetween0And1
    } else {
        InnerVerdict::Outside
    }
}

/// A subspace defined over the rationals with its saturated integer basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalSubspace {
    pub spanning: Vec<IntegerVector>,
    pub saturated_basis: Vec<IntegerVector>,
    pub dim: usize,
}

impl RationalSubspace {
    pub fn ambient(&self) -> usize {
        self.spanning.first().map_or(0, IntegerVector::dim)
    }

    fn rows(&self) -> Vec<Vec<BigInt>> {
        self.saturated_basis.iter().map(|v| v.0.clone()).collect()
    }
}

/// Saturated basis of `span ∩ Z^{n+1}`, in Hermite normal form.
pub fn saturate(spanning: &[IntegerVector]) -> Result<RationalSubspace, GeometryError> {
    let Some(first) = spanning.first() else {
        return Err(GeometryError::EmptySubspace);
    };
    let m = first.dim();
    if let Some(v) = spanning.iter().find(|v| v.dim() != m) {
        return Err(GeometryError::DimensionMismatch { expected: m, found: v.dim() });
    }
    let rows: Vec<Vec<BigInt>> = spanning.iter().map(|v| v.0.clone()).collect();
    if lattice::rank(&rows) != rows.len() {
        return Err(GeometryError::DependentInput);
    }
    let basis = lattice::saturate(&rows, m);
    Ok(RationalSubspace {
        spanning: spanning.to_vec(),
        dim: basis.len(),
        saturated_basis: basis.into_iter().map(IntegerVector).collect(),
    })
}

/// Covolume `sqrt(det Gram)` of the saturated lattice.
pub fn height(l: &RationalSubspace) -> CertifiedScalar {
    let det = lattice::bareiss_det(&lattice::gram(&l.rows()));
    CertifiedScalar::from_int(det).sqrt().expect("Gram determinant is positive")
}

/// Tangent of the angle between `ℓ` and `L`; infinite when `ℓ ⊥ L`.
///
/// With `B` the basis, `G = B Bᵀ` and `b = B (1, θ)`, the squared length of the
/// projection of `(1, θ)` onto `L` is `q = bᵀ adj(G) b / det G`, and
/// `φ² = (|(1,θ)|² - q) / q`.
pub fn angle_tangent(frame: &LineFrame, l: &RationalSubspace, precision: u32) -> Result<ExtScalar, GeometryError> {
    if l.dim == 0 {
        return Err(GeometryError::EmptySubspace);
    }
    if l.ambient() != frame.n() + 1 {
        return Err(GeometryError::DimensionMismatch { expected: frame.n() + 1, found: l.ambient() });
    }
    let rows = l.rows();
    let g = lattice::gram(&rows);
    let det = CertifiedScalar::from_int(lattice::bareiss_det(&g));
    let adj = lattice::adjugate(&g);
    let b: Vec<CertifiedScalar> =
        l.saturated_basis.iter().map(|v| frame.linear_form(v)).collect::<Result<_, _>>()?;
    let mut terms = Vec::new();
    for (i, row) in adj.iter().enumerate() {
        for (j, a) in row.iter().enumerate() {
            if !a.is_zero() {
                terms.push(b[i].mul(&b[j]).mul(&CertifiedScalar::from_int(a.clone())));
            }
        }
    }
    let q = CertifiedScalar::sum(&terms).div(&det)?;
    if q.is_exact_zero() {
        return Ok(ExtScalar::Infinite);
    }
    let max = max_bits(precision);
    if q.sign(max) != Comparison::Greater {
        return Ok(ExtScalar::Infinite);
    }
    let diff = frame.direction_norm_sq().sub(&q);
    let phi = match diff.sign(max) {
        Comparison::EqualProven => CertifiedScalar::zero(),
        _ => diff.div(&q)?.sqrt()?,
    };
    Ok(ExtScalar::Finite(phi.refine_lossy(precision)))
}

/// Primitive integer vector orthogonal to a hyperplane `L`, first nonzero
/// coordinate positive.
pub fn integer_normal(l: &RationalSubspace, n: usize) -> Result<IntegerVector, GeometryError> {
    if l.dim != n || l.ambient() != n + 1 {
        return Err(GeometryError::WrongDimension { expected: n, found: l.dim });
    }
    let k = lattice::kernel(&l.rows(), n + 1);
    let mut w = k.into_iter().next().ok_or(GeometryError::DependentInput)?;
    let g = w.iter().fold(BigInt::zero(), |acc, c| num_integer::Integer::gcd(&acc, c));
    for c in w.iter_mut() {
        *c = &*c / &g;
    }
    if w.iter().find(|c| !c.is_zero()).is_some_and(Signed::is_negative) {
        for c in w.iter_mut() {
            *c = -c.clone();
        }
    }
    Ok(IntegerVector(w))
}

/// Matrix JSON for a subspace: the saturated basis as rows.
pub fn subspace_to_json(l: &RationalSubspace) -> serde_json::Value {
    serde_json::json!({
        "dim": l.dim,
        "spanning": l.spanning,
        "saturated_basis": l.saturated_basis,
    })
}
