//! Hermite expansion of truncated trivariate power series.
//!
//! A series `f = Σ λ_{m,n,p} x^m y^n z^p` solves `∂f/∂z = ∂²f/∂x∂y` exactly
//! when its coefficients obey
//!
//! ```text
//! p λ_{m,n,p} = (m+1)(n+1) λ_{m+1,n+1,p-1}
//! ```
//!
//! and then `f = Σ λ_{m,n,0} H_{m,n}(x, y, z)`. Tensors are truncated by the
//! weighted degree `m + n + 2p`, which the recurrence preserves, so every
//! relation lies either entirely inside or entirely outside the bound.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::hermite::{factorial, hermite_eval, hermite_poly, HermiteIndex, X, Y, Z};
use crate::identities::{VerificationReport, Witness};
use crate::kernels::complex_from_json;
use crate::poly::{ensure_finite, parse_rational, ComplexValue, SparsePoly};

/// Relative tolerance for floating-point coefficient comparisons.
pub const FLOAT_REL_TOL: f64 = 1e-12;
/// Absolute floor below which float coefficients compare equal.
pub const FLOAT_ABS_FLOOR: f64 = 1e-15;

/// Coefficient field of a tensor: exact rationals or complex floats.
pub trait TensorCoeff: Clone + Debug + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn mul_int(&self, k: &BigInt) -> Self;
    fn div_int(&self, k: &BigInt) -> Self;
    /// Exact equality for rationals, tolerance-based for floats.
    fn close(&self, other: &Self) -> bool;
    fn to_complex(&self) -> ComplexValue;
    fn to_json(&self) -> Value;
}

impl TensorCoeff for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn mul_int(&self, k: &BigInt) -> Self {
        self * BigRational::from_integer(k.clone())
    }

    fn div_int(&self, k: &BigInt) -> Self {
        self / BigRational::from_integer(k.clone())
    }

    fn close(&self, other: &Self) -> bool {
        self == other
    }

    fn to_complex(&self) -> ComplexValue {
        ComplexValue::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
}

impl TensorCoeff for ComplexValue {
    fn zero() -> Self {
        ComplexValue::new(0.0, 0.0)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn mul_int(&self, k: &BigInt) -> Self {
        self * k.to_f64().unwrap_or(f64::INFINITY)
    }

    fn div_int(&self, k: &BigInt) -> Self {
        self / k.to_f64().unwrap_or(f64::INFINITY)
    }

    fn close(&self, other: &Self) -> bool {
        let diff = (self - other).norm();
        diff <= FLOAT_ABS_FLOOR || diff <= FLOAT_REL_TOL * self.norm().max(other.norm())
    }

    fn to_complex(&self) -> ComplexValue {
        *self
    }

    fn to_json(&self) -> Value {
        json!({"re": self.re, "im": self.im})
    }
}

fn weight(m: u32, n: u32, p: u32) -> u64 {
    m as u64 + n as u64 + 2 * p as u64
}

/// Maclaurin coefficients `λ_{m,n,p}` of `x^m y^n z^p` with
/// `m + n + 2p <= max_degree`. Absent entries are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffTensor<T> {
    max_degree: u32,
    entries: BTreeMap<(u32, u32, u32), T>,
}

impl<T: TensorCoeff> CoeffTensor<T> {
    pub fn new(max_degree: u32) -> Self {
        CoeffTensor {
            max_degree,
            entries: BTreeMap::new(),
        }
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn in_bounds(&self, m: u32, n: u32, p: u32) -> bool {
        weight(m, n, p) <= self.max_degree as u64
    }

    /// Stores `value` at `(m, n, p)`, replacing any previous entry.
    pub fn set(&mut self, m: u32, n: u32, p: u32, value: T) -> Result<()> {
        if !self.in_bounds(m, n, p) {
            return Err(Error::InvalidArgument(format!(
                "index ({m}, {n}, {p}) exceeds max_degree {}",
                self.max_degree
            )));
        }
        if value.is_zero() {
            self.entries.remove(&(m, n, p));
        } else {
            self.entries.insert((m, n, p), value);
        }
        Ok(())
    }

    pub fn get(&self, m: u32, n: u32, p: u32) -> T {
        self.entries
            .get(&(m, n, p))
            .cloned()
            .unwrap_or_else(T::zero)
    }

    /// Non-zero entries in ascending `(m, n, p)` order.
    pub fn entries(&self) -> impl Iterator<Item = ((u32, u32, u32), &T)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `a·self + b·other`; both tensors must share `max_degree`.
    pub fn linear_combination(&self, a: &T, other: &Self, b: &T) -> Result<Self> {
        if self.max_degree != other.max_degree {
            return Err(Error::InvalidArgument(format!(
                "max_degree mismatch: {} vs {}",
                self.max_degree, other.max_degree
            )));
        }
        let mut out = CoeffTensor::new(self.max_degree);
        for (&(m, n, p), v) in &self.entries {
            out.set(m, n, p, v.mul(a))?;
        }
        for (&(m, n, p), v) in &other.entries {
            let sum = out.get(m, n, p).add(&v.mul(b));
            out.set(m, n, p, sum)?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|(&(m, n, p), c)| json!({"m": m, "n": n, "p": p, "coeff": c.to_json()}))
            .collect();
        json!({"max_degree": self.max_degree, "entries": entries})
    }
}

impl CoeffTensor<BigRational> {
    /// Reads the coefficients of an arity-3 polynomial, dropping terms whose
    /// weighted degree exceeds `max_degree`.
    pub fn from_poly(poly: &SparsePoly, max_degree: u32) -> Result<Self> {
        if poly.arity() != 3 {
            return Err(Error::Arity {
                expected: 3,
                found: poly.arity(),
            });
        }
        let mut t = CoeffTensor::new(max_degree);
        for (e, c) in poly.terms() {
            if t.in_bounds(e[X], e[Y], e[Z]) {
                t.set(e[X], e[Y], e[Z], c.clone())?;
            }
        }
        Ok(t)
    }

    pub fn to_poly(&self) -> SparsePoly {
        SparsePoly::from_terms(
            3,
            self.entries
                .iter()
                .map(|(&(m, n, p), c)| (vec![m, n, p], c.clone())),
        )
        .expect("arity-3 exponent vectors")
    }

    pub fn to_complex(&self) -> CoeffTensor<ComplexValue> {
        CoeffTensor {
            max_degree: self.max_degree,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (*k, TensorCoeff::to_complex(v)))
                .collect(),
        }
    }
}

/// A tensor read from JSON: exact when every coefficient is an integer or a
/// `"p/q"` string, complex otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyTensor {
    Exact(CoeffTensor<BigRational>),
    Float(CoeffTensor<ComplexValue>),
}

enum RawCoeff {
    Exact(BigRational),
    Float(ComplexValue),
}

fn raw_coeff(v: &Value) -> Result<RawCoeff> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => {
            Ok(RawCoeff::Exact(parse_rational(&n.to_string())?))
        }
        Value::String(s) => match parse_rational(s) {
            Ok(r) => Ok(RawCoeff::Exact(r)),
            Err(_) => Ok(RawCoeff::Float(complex_from_json(v)?)),
        },
        _ => Ok(RawCoeff::Float(complex_from_json(v)?)),
    }
}

fn field_u32(obj: &Map<String, Value>, key: &str) -> Result<u32> {
    obj.get(key)
        .and_then(Value::as_u64)
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| Error::Parse(format!("missing or invalid integer field {key:?}")))
}

impl AnyTensor {
    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Parse("tensor must be a JSON object".into()))?;
        for key in obj.keys() {
            if key != "max_degree" && key != "entries" {
                return Err(Error::Parse(format!("unknown tensor field {key:?}")));
            }
        }
        let max_degree = field_u32(obj, "max_degree")?;
        let raw = obj
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"entries\" array".into()))?;
        let mut parsed = Vec::with_capacity(raw.len());
        for e in raw {
            let e = e
                .as_object()
                .ok_or_else(|| Error::Parse("tensor entry must be an object".into()))?;
            let coeff = e
                .get("coeff")
                .ok_or_else(|| Error::Parse("tensor entry without \"coeff\"".into()))?;
            parsed.push((
                field_u32(e, "m")?,
                field_u32(e, "n")?,
                field_u32(e, "p")?,
                raw_coeff(coeff)?,
            ));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (m, n, p, _) in &parsed {
            if !seen.insert((*m, *n, *p)) {
                return Err(Error::Parse(format!("duplicate entry ({m}, {n}, {p})")));
            }
        }
        if parsed.iter().all(|e| matches!(e.3, RawCoeff::Exact(_))) {
            let mut t = CoeffTensor::new(max_degree);
            for (m, n, p, c) in parsed {
                if let RawCoeff::Exact(r) = c {
                    t.set(m, n, p, r)?;
                }
            }
            Ok(AnyTensor::Exact(t))
        } else {
            let mut t = CoeffTensor::new(max_degree);
            for (m, n, p, c) in parsed {
                let v = match c {
                    RawCoeff::Exact(r) => TensorCoeff::to_complex(&r),
                    RawCoeff::Float(z) => z,
                };
                t.set(m, n, p, ensure_finite("coeff", v)?)?;
            }
            Ok(AnyTensor::Float(t))
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            AnyTensor::Exact(t) => t.to_json(),
            AnyTensor::Float(t) => t.to_json(),
        }
    }
}

/// Coefficients `λ_{m,n}` of `f = Σ λ_{m,n} H_{m,n}(x, y, z)` for
/// `m + n <= max_degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteExpansion<T> {
    pub max_degree: u32,
    pub coeffs: BTreeMap<HermiteIndex, T>,
}

impl<T: TensorCoeff> HermiteExpansion<T> {
    pub fn new(max_degree: u32) -> Self {
        HermiteExpansion {
            max_degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn get(&self, idx: HermiteIndex) -> T {
        self.coeffs.get(&idx).cloned().unwrap_or_else(T::zero)
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .coeffs
            .iter()
            .map(|(i, c)| json!({"m": i.m, "n": i.n, "coeff": c.to_json()}))
            .collect();
        json!({"max_degree": self.max_degree, "coeffs": coeffs})
    }
}

fn recurrence_sides<T: TensorCoeff>(t: &CoeffTensor<T>, m: u32, n: u32, p: u32) -> (T, T) {
    let lhs = t.get(m, n, p).mul_int(&BigInt::from(p));
    let rhs = t
        .get(m + 1, n + 1, p - 1)
        .mul_int(&(BigInt::from(m + 1) * BigInt::from(n + 1)));
    (lhs, rhs)
}

/// Triples `(m, n, p)` with `p >= 1` inside the bound, by weighted degree
/// and then by `p`, `m`.
fn relation_indices(max_degree: u32) -> impl Iterator<Item = (u32, u32, u32)> {
    (2..=max_degree).flat_map(|w| {
        (1..=w / 2).flat_map(move |p| {
            let rest = w - 2 * p;
            (0..=rest).map(move |m| (m, rest - m, p))
        })
    })
}

/// Index of a failed relation with its expected and actual sides.
type Violation<T> = ((u32, u32, u32), T, T);

fn first_violation<T: TensorCoeff>(t: &CoeffTensor<T>) -> (usize, Option<Violation<T>>) {
    let mut checked = 0;
    for (m, n, p) in relation_indices(t.max_degree) {
        checked += 1;
        let (lhs, rhs) = recurrence_sides(t, m, n, p);
        if !lhs.close(&rhs) {
            return (checked, Some(((m, n, p), rhs, lhs)));
        }
    }
    (checked, None)
}

/// Checks `p λ_{m,n,p} = (m+1)(n+1) λ_{m+1,n+1,p-1}` at every triple inside
/// the bound. Both sides share a weighted degree, so no relation is skipped.
pub fn pde_check<T: TensorCoeff>(t: &CoeffTensor<T>) -> VerificationReport {
    let (checked, violation) = first_violation(t);
    let params: Map<String, Value> = [
        ("max_degree".to_string(), json!(t.max_degree)),
        ("checked".to_string(), json!(checked)),
        ("skipped".to_string(), json!(0)),
    ]
    .into_iter()
    .collect();
    match violation {
        None => VerificationReport::pass("pde-coefficients", params),
        Some(((m, n, p), expected, actual)) => VerificationReport::fail(
            "pde-coefficients",
            params,
            Witness::Mismatch {
                at: format!("(m,n,p)=({m},{n},{p})"),
                expected: format!("(m+1)(n+1)*lambda[m+1,n+1,p-1] = {}", expected.to_json()),
                actual: format!("p*lambda[m,n,p] = {}", actual.to_json()),
            },
        ),
    }
}

/// Reads the expansion coefficients off the `p = 0` layer after confirming
/// the recurrence.
pub fn hermite_expand<T: TensorCoeff>(t: &CoeffTensor<T>) -> Result<HermiteExpansion<T>> {
    if let (_, Some(((m, n, p), _, _))) = first_violation(t) {
        return Err(Error::NotHermiteExpandable { m, n, p });
    }
    let mut e = HermiteExpansion::new(t.max_degree);
    for ((m, n, p), c) in t.entries() {
        if p == 0 {
            e.coeffs.insert(HermiteIndex::new(m, n), c.clone());
        }
    }
    Ok(e)
}

/// Rebuilds the full tensor from
/// `λ_{m,n,p} = (m+p)! (n+p)! / (m! n! p!) · λ_{m+p,n+p,0}`.
pub fn tensor_from_expansion<T: TensorCoeff>(e: &HermiteExpansion<T>) -> CoeffTensor<T> {
    let mut t = CoeffTensor::new(e.max_degree);
    for (idx, c) in &e.coeffs {
        for p in 0..=HermiteIndex::min(*idx) {
            let (m, n) = (idx.m - p, idx.n - p);
            let num = factorial(m + p) * factorial(n + p);
            let den = factorial(m) * factorial(n) * factorial(p);
            let v = c.mul_int(&num).div_int(&den);
            if t.in_bounds(m, n, p) {
                t.set(m, n, p, v).expect("index checked in bounds");
            }
        }
    }
    t
}

/// `Σ λ_{m,n} H_{m,n}(x, y, z)` summed in blocks of constant `m + n`.
pub fn reconstruct_eval<T: TensorCoeff>(
    e: &HermiteExpansion<T>,
    x: ComplexValue,
    y: ComplexValue,
    z: ComplexValue,
) -> Result<ComplexValue> {
    ensure_finite("x", x)?;
    ensure_finite("y", y)?;
    ensure_finite("z", z)?;
    let mut blocks: BTreeMap<u32, ComplexValue> = BTreeMap::new();
    for (idx, c) in &e.coeffs {
        let term = c.to_complex() * hermite_eval(*idx, x, y, z)?;
        *blocks.entry(idx.degree()).or_default() += term;
    }
    let total: ComplexValue = blocks.values().sum();
    if total.re.is_finite() && total.im.is_finite() {
        Ok(total)
    } else {
        Err(Error::EvalOverflow)
    }
}

/// `Σ λ_{m,n} H_{m,n}` as an exact polynomial.
pub fn reconstruct_poly(e: &HermiteExpansion<BigRational>) -> SparsePoly {
    e.coeffs.iter().fold(SparsePoly::zero(3), |acc, (idx, c)| {
        &acc + &hermite_poly(*idx).scale(c)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{integer, rational};
    use proptest::prelude::*;

    fn fact_f64(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    fn r(n: i64, d: i64) -> BigRational {
        rational(n, d)
    }

    fn tensor(
        max_degree: u32,
        entries: &[((u32, u32, u32), BigRational)],
    ) -> CoeffTensor<BigRational> {
        let mut t = CoeffTensor::new(max_degree);
        for ((m, n, p), c) in entries {
            t.set(*m, *n, *p, c.clone()).unwrap();
        }
        t
    }

    /// Maclaurin coefficients of exp(sx + ty + stz): s^m t^n (st)^p / (m! n! p!).
    fn exp_tensor(s: &BigRational, t: &BigRational, max_degree: u32) -> CoeffTensor<BigRational> {
        let mut out = CoeffTensor::new(max_degree);
        for m in 0..=max_degree {
            for n in 0..=max_degree - m {
                for p in 0..=(max_degree - m - n) / 2 {
                    let fact = integer(factorial(m) * factorial(n) * factorial(p));
                    let v = num_traits::pow(s.clone(), (m + p) as usize)
                        * num_traits::pow(t.clone(), (n + p) as usize)
                        / fact;
                    out.set(m, n, p, v).unwrap();
                }
            }
        }
        out
    }

    /// Applies the recurrence one step at a time from the p = 0 layer.
    fn tensor_by_iteration(e: &HermiteExpansion<BigRational>) -> CoeffTensor<BigRational> {
        let d = e.max_degree;
        let mut t = CoeffTensor::new(d);
        for (idx, c) in &e.coeffs {
            t.set(idx.m, idx.n, 0, c.clone()).unwrap();
        }
        for p in 1..=d / 2 {
            for m in 0..=d - 2 * p {
                for n in 0..=d - 2 * p - m {
                    let v = t.get(m + 1, n + 1, p - 1) * integer((m + 1) * (n + 1)) / integer(p);
                    t.set(m, n, p, v).unwrap();
                }
            }
        }
        t
    }

    #[test]
    fn pde_check_examples() {
        let t = tensor(4, &[((1, 1, 0), integer(1)), ((0, 0, 1), integer(1))]);
        let rep = pde_check(&t);
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.params["skipped"], json!(0));

        let t = tensor(4, &[((0, 0, 1), integer(1))]);
        let rep = pde_check(&t);
        assert!(!rep.passed());
        match rep.witness.unwrap() {
            Witness::Mismatch { at, .. } => assert_eq!(at, "(m,n,p)=(0,0,1)"),
            w => panic!("unexpected witness {w:?}"),
        }
        assert!(matches!(
            hermite_expand(&t),
            Err(Error::NotHermiteExpandable { m: 0, n: 0, p: 1 })
        ));

        assert!(pde_check(&CoeffTensor::<BigRational>::new(6)).passed());
        assert!(pde_check(&CoeffTensor::<BigRational>::new(0)).passed());
    }

    #[test]
    fn expand_examples() {
        let t = tensor(4, &[((1, 1, 0), integer(1)), ((0, 0, 1), integer(1))]);
        let e = hermite_expand(&t).unwrap();
        assert_eq!(e.coeffs.len(), 1);
        assert_eq!(e.get(HermiteIndex::new(1, 1)), integer(1));

        let e = hermite_expand(&tensor(3, &[((0, 0, 0), integer(1))])).unwrap();
        assert_eq!(
            e.coeffs.into_iter().collect::<Vec<_>>(),
            vec![(HermiteIndex::new(0, 0), integer(1))]
        );

        let half = r(1, 2);
        let t = exp_tensor(&half, &half, 14);
        assert!(pde_check(&t).passed());
        let e = hermite_expand(&t).unwrap();
        for m in 0..=14u32 {
            for n in 0..=14 - m {
                let expected = num_traits::pow(half.clone(), (m + n) as usize)
                    / integer(factorial(m) * factorial(n));
                assert_eq!(e.get(HermiteIndex::new(m, n)), expected);
            }
        }
        // at (1,1,1) the degree-d block is [u^d] exp(u + u²/4) = Σ_j 1/((d-2j)! j! 4^j)
        let block = |d: u32| -> f64 {
            (0..=d / 2)
                .map(|j| 1.0 / (fact_f64(d - 2 * j) * fact_f64(j) * 4f64.powi(j as i32)))
                .sum()
        };
        let partial: f64 = (0..=14).map(block).sum();
        let tail: f64 = (15..=60).map(block).sum();
        let v = reconstruct_eval(&e, 1.0.into(), 1.0.into(), 1.0.into()).unwrap();
        assert!((v - ComplexValue::new(partial, 0.0)).norm() < 1e-13);
        let closed = ComplexValue::new(1.25f64.exp(), 0.0);
        assert!(
            (v - closed).norm() <= tail * (1.0 + 1e-6),
            "{v} vs {closed}"
        );
    }

    #[test]
    fn reconstruct_examples() {
        let mut e = HermiteExpansion::new(2);
        e.coeffs.insert(HermiteIndex::new(1, 1), integer(1));
        assert_eq!(
            reconstruct_eval(&e, 1.0.into(), 1.0.into(), 1.0.into()).unwrap(),
            ComplexValue::new(2.0, 0.0)
        );
        let empty = HermiteExpansion::<BigRational>::new(5);
        assert_eq!(
            reconstruct_eval(&empty, 1.0.into(), 2.0.into(), 3.0.into()).unwrap(),
            ComplexValue::new(0.0, 0.0)
        );
        assert!(reconstruct_poly(&empty).is_zero());
        assert!(reconstruct_eval(&e, f64::NAN.into(), 1.0.into(), 1.0.into()).is_err());
    }

    #[test]
    fn closed_product_matches_iteration() {
        let t = exp_tensor(&r(2, 3), &r(-3, 5), 12);
        let e = hermite_expand(&t).unwrap();
        assert_eq!(tensor_from_expansion(&e), tensor_by_iteration(&e));
        assert_eq!(tensor_from_expansion(&e), t);
    }

    #[test]
    fn hermite_tensors_expand_to_deltas() {
        for m in 0..=6 {
            for n in 0..=6 {
                let t = CoeffTensor::from_poly(&hermite_poly(HermiteIndex::new(m, n)), 12).unwrap();
                assert!(pde_check(&t).passed());
                let e = hermite_expand(&t).unwrap();
                assert_eq!(e.coeffs.len(), 1);
                assert_eq!(e.get(HermiteIndex::new(m, n)), integer(1));
            }
        }
    }

    #[test]
    fn float_tensors() {
        let exact = exp_tensor(&r(1, 2), &r(1, 3), 10);
        let float = exact.to_complex();
        assert!(pde_check(&float).passed());
        let e = hermite_expand(&float).unwrap();
        let ee = hermite_expand(&exact).unwrap();
        for (idx, c) in &ee.coeffs {
            assert!(e.get(*idx).close(&TensorCoeff::to_complex(c)));
        }
        let mut bad = float.clone();
        let v = bad.get(0, 0, 1) * (1.0 + 1e-9);
        bad.set(0, 0, 1, v).unwrap();
        assert!(!pde_check(&bad).passed());
        let mut fine = float.clone();
        let v = fine.get(0, 0, 1) * (1.0 + 1e-14);
        fine.set(0, 0, 1, v).unwrap();
        assert!(pde_check(&fine).passed());
    }

    #[test]
    fn bounds_enforced() {
        let mut t = CoeffTensor::<BigRational>::new(4);
        assert!(t.set(1, 1, 1, integer(1)).is_ok());
        assert!(t.set(1, 0, 2, integer(1)).is_err());
        t.set(1, 1, 1, integer(0)).unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn json_formats() {
        let text = r#"{"max_degree": 4, "entries": [
            {"m": 1, "n": 1, "p": 0, "coeff": "1"},
            {"m": 0, "n": 0, "p": 1, "coeff": 1}]}"#;
        let t = AnyTensor::from_json(&serde_json::from_str(text).unwrap()).unwrap();
        let AnyTensor::Exact(exact) = &t else {
            panic!("expected exact tensor")
        };
        assert_eq!(exact.len(), 2);
        assert_eq!(
            t.to_json(),
            json!({"max_degree": 4, "entries": [
                {"m": 0, "n": 0, "p": 1, "coeff": "1"},
                {"m": 1, "n": 1, "p": 0, "coeff": "1"}]})
        );
        let e = hermite_expand(exact).unwrap();
        assert_eq!(
            e.to_json(),
            json!({"max_degree": 4, "coeffs": [{"m": 1, "n": 1, "coeff": "1"}]})
        );

        let text = r#"{"max_degree": 2, "entries": [
            {"m": 0, "n": 0, "p": 0, "coeff": {"re": 0.5, "im": -1}},
            {"m": 1, "n": 0, "p": 0, "coeff": "1/4"}]}"#;
        let t = AnyTensor::from_json(&serde_json::from_str(text).unwrap()).unwrap();
        let AnyTensor::Float(f) = t else {
            panic!("expected float tensor")
        };
        assert_eq!(f.get(1, 0, 0), ComplexValue::new(0.25, 0.0));

        for bad in [
            r#"{"max_degree": 2}"#,
            r#"{"max_degree": 2, "entries": [{"m": 3, "n": 0, "p": 0, "coeff": "1"}]}"#,
            r#"{"max_degree": 2, "entries": [{"m": 0, "n": 0, "coeff": "1"}]}"#,
            r#"{"max_degree": 2, "entries": [{"m": 0, "n": 0, "p": 0, "coeff": "x"}]}"#,
            r#"{"max_degree": 2, "entries": [{"m": 0, "n": 0, "p": 0, "coeff": "1"}, {"m": 0, "n": 0, "p": 0, "coeff": "2"}]}"#,
            r#"{"max_degree": -1, "entries": []}"#,
            r#"{"max_degree": 2, "entries": [], "extra": 1}"#,
        ] {
            assert!(
                AnyTensor::from_json(&serde_json::from_str(bad).unwrap()).is_err(),
                "{bad}"
            );
        }
    }

    fn small_rat() -> impl Strategy<Value = BigRational> {
        (-20i64..=20, 1i64..=6).prop_map(|(n, d)| r(n, d))
    }

    fn expansion_strategy(max_degree: u32) -> impl Strategy<Value = HermiteExpansion<BigRational>> {
        proptest::collection::btree_map((0..=max_degree, 0..=max_degree), small_rat(), 0..8)
            .prop_map(move |m| {
                let mut e = HermiteExpansion::new(max_degree);
                for ((a, b), c) in m {
                    if a + b <= max_degree && !Zero::is_zero(&c) {
                        e.coeffs.insert(HermiteIndex::new(a, b), c);
                    }
                }
                e
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn round_trip_through_polynomials(e in expansion_strategy(10)) {
            let t = tensor_from_expansion(&e);
            prop_assert!(pde_check(&t).passed());
            let from_poly = CoeffTensor::from_poly(&reconstruct_poly(&e), 10).unwrap();
            prop_assert_eq!(&from_poly, &t);
            let again = hermite_expand(&from_poly).unwrap();
            prop_assert_eq!(tensor_from_expansion(&again), t);
        }

        #[test]
        fn expansion_is_linear(e1 in expansion_strategy(8), e2 in expansion_strategy(8), a in small_rat(), b in small_rat()) {
            let t1 = tensor_from_expansion(&e1);
            let t2 = tensor_from_expansion(&e2);
            let combo = t1.linear_combination(&a, &t2, &b).unwrap();
            let lhs = hermite_expand(&combo).unwrap();
            let x1 = hermite_expand(&t1).unwrap();
            let x2 = hermite_expand(&t2).unwrap();
            for m in 0..=8u32 {
                for n in 0..=8 - m {
                    let idx = HermiteIndex::new(m, n);
                    prop_assert_eq!(lhs.get(idx), &a * x1.get(idx) + &b * x2.get(idx));
                }
            }
        }

        #[test]
        fn perturbing_a_higher_layer_is_detected(e in expansion_strategy(8), m in 0u32..3, n in 0u32..3, p in 1u32..3) {
            let mut t = tensor_from_expansion(&e);
            let v = t.get(m, n, p) + integer(1);
            t.set(m, n, p, v).unwrap();
            prop_assert!(!pde_check(&t).passed());
            prop_assert!(hermite_expand(&t).is_err());
        }
    }
}
