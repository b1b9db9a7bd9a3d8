//! Exact, degree-bounded verification of the polynomial identities satisfied
//! by `H_{m,n}(x, y, z)`.
//!
//! Every verifier builds both sides of an identity as [`SparsePoly`] values
//! with rational coefficients and compares them canonically. A failing
//! comparison carries the difference polynomial as its witness.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::hermite::{
    binomial, expand_hermite_combination, factorial, heat_operator_formal, hermite_eval,
    monomial_in_hermite, scaling_map, HermiteCache, HermiteIndex, X, Y, Z,
};
use crate::poly::{integer, ComplexValue, SparsePoly};

static CACHE: OnceLock<HermiteCache> = OnceLock::new();

fn h(m: u32, n: u32) -> Arc<SparsePoly> {
    CACHE
        .get_or_init(|| HermiteCache::new(48))
        .get(HermiteIndex::new(m, n))
}

/// `1 / Π j!` over the given arguments.
fn inv_factorials(args: &[u32]) -> BigRational {
    let den = args
        .iter()
        .fold(BigInt::one(), |acc, &j| acc * factorial(j));
    BigRational::new(BigInt::one(), den)
}

fn z_power(k: u32, sign: i64) -> SparsePoly {
    let c = if sign < 0 && k % 2 == 1 {
        -integer(1)
    } else {
        integer(1)
    };
    SparsePoly::monomial(vec![0, 0, k], c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Evidence attached to a failed verification.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// Left side minus right side.
    Polynomial(SparsePoly),
    /// A numeric or index-level mismatch.
    Mismatch {
        at: String,
        expected: String,
        actual: String,
    },
}

impl Serialize for Witness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Witness::Polynomial(p) => p.serialize(s),
            Witness::Mismatch {
                at,
                expected,
                actual,
            } => {
                let mut map = s.serialize_map(Some(3))?;
                map.serialize_entry("at", at)?;
                map.serialize_entry("expected", expected)?;
                map.serialize_entry("actual", actual)?;
                map.end()
            }
        }
    }
}

/// Outcome of one identity check. `status` is `Pass` exactly when `witness`
/// is absent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    pub params: Map<String, Value>,
    pub status: Status,
    pub witness: Option<Witness>,
}

impl VerificationReport {
    pub fn pass(identity: &str, params: Map<String, Value>) -> Self {
        VerificationReport {
            identity: identity.to_string(),
            params,
            status: Status::Pass,
            witness: None,
        }
    }

    pub fn fail(identity: &str, params: Map<String, Value>, witness: Witness) -> Self {
        VerificationReport {
            identity: identity.to_string(),
            params,
            status: Status::Fail,
            witness: Some(witness),
        }
    }

    /// Pass iff `lhs == rhs`; otherwise the witness is `lhs - rhs`.
    pub fn compare(
        identity: &str,
        params: Map<String, Value>,
        lhs: &SparsePoly,
        rhs: &SparsePoly,
    ) -> Result<Self> {
        let diff = lhs.try_sub(rhs)?;
        Ok(if diff.is_zero() {
            Self::pass(identity, params)
        } else {
            Self::fail(identity, params, Witness::Polynomial(diff))
        })
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serialization is infallible")
    }
}

fn params(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

/// Lazily enumerates the compositions of `total` into `parts` ordered
/// non-negative parts, in reverse lexicographic order.
#[derive(Clone, Debug)]
pub struct Compositions {
    current: Option<Vec<u32>>,
}

impl Compositions {
    pub fn new(total: u32, parts: usize) -> Self {
        let current = (parts > 0).then(|| {
            let mut v = vec![0; parts];
            v[0] = total;
            v
        });
        Compositions { current }
    }

    /// `C(total + parts - 1, parts - 1)`.
    pub fn count(total: u32, parts: usize) -> BigInt {
        if parts == 0 {
            return BigInt::zero();
        }
        binomial(total + parts as u32 - 1, parts as u32 - 1)
    }
}

impl Iterator for Compositions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let k = next.len();
        let last = next[k - 1];
        next[k - 1] = 0;
        if let Some(i) = (0..k - 1).rev().find(|&i| next[i] > 0) {
            next[i] -= 1;
            next[i + 1] = last + 1;
            self.current = Some(next);
        }
        Some(out)
    }
}

/// Index set of the addition formula: all `(m_1..m_k)` summing to `M`
/// paired with all `(n_1..n_k)` summing to `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompositionSet {
    pub target: (u32, u32),
    pub parts: usize,
}

impl CompositionSet {
    pub fn new(m: u32, n: u32, parts: usize) -> Self {
        CompositionSet {
            target: (m, n),
            parts,
        }
    }

    pub fn m_compositions(&self) -> Compositions {
        Compositions::new(self.target.0, self.parts)
    }

    pub fn n_compositions(&self) -> Compositions {
        Compositions::new(self.target.1, self.parts)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<u32>, Vec<u32>)> + '_ {
        let ns: Vec<Vec<u32>> = self.n_compositions().collect();
        self.m_compositions()
            .flat_map(move |mc| ns.clone().into_iter().map(move |nc| (mc.clone(), nc)))
    }
}

/// `H_{m1+m2,n1+n2}/(m1!m2!n1!n2!)` against the double sum of products
/// `H_{m1-p1,n1-p2} H_{m2-p2,n2-p1} z^{p1+p2}` over `p1 ≤ m1∧n2`,
/// `p2 ≤ n1∧m2`.
pub fn verify_nielsen_linearization(
    m1: u32,
    n1: u32,
    m2: u32,
    n2: u32,
) -> Result<VerificationReport> {
    let lhs = h(m1 + m2, n1 + n2).scale(&inv_factorials(&[m1, m2, n1, n2]));
    let rhs = linearization_rhs(m1, n1, m2, n2);
    VerificationReport::compare(
        "nielsen-lin",
        params(&[
            ("m1", json!(m1)),
            ("n1", json!(n1)),
            ("m2", json!(m2)),
            ("n2", json!(n2)),
        ]),
        &lhs,
        &rhs,
    )
}

fn linearization_rhs(m1: u32, n1: u32, m2: u32, n2: u32) -> SparsePoly {
    let mut rhs = SparsePoly::zero(3);
    for p1 in 0..=m1.min(n2) {
        for p2 in 0..=n1.min(m2) {
            let w = inv_factorials(&[p1, p2, m1 - p1, m2 - p2, n1 - p2, n2 - p1]);
            let prod = &*h(m1 - p1, n1 - p2) * &*h(m2 - p2, n2 - p1);
            rhs = &rhs + &(&prod * &z_power(p1 + p2, 1)).scale(&w);
        }
    }
    rhs
}

/// Which factorials divide the `p`-th term of the product formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductReading {
    /// `(n1-p1)!(n2-p2)!`, each `p` paired with the `n` that does not bound
    /// it. A factorial of a negative argument contributes a zero term.
    Transposed,
    /// `(n1-p2)!(n2-p1)!`, pairing each `p` with the same `n` as the
    /// summation bound does.
    Exchanged,
}

impl ProductReading {
    pub fn name(self) -> &'static str {
        match self {
            ProductReading::Transposed => "transposed-denominators",
            ProductReading::Exchanged => "exchanged-denominators",
        }
    }
}

fn product_rhs(m1: u32, n1: u32, m2: u32, n2: u32, reading: ProductReading) -> SparsePoly {
    let mut rhs = SparsePoly::zero(3);
    for p1 in 0..=m1.min(n2) {
        for p2 in 0..=n1.min(m2) {
            let (d1, d2) = match reading {
                ProductReading::Transposed => (n1 as i64 - p1 as i64, n2 as i64 - p2 as i64),
                ProductReading::Exchanged => (n1 as i64 - p2 as i64, n2 as i64 - p1 as i64),
            };
            if d1 < 0 || d2 < 0 {
                continue;
            }
            let w = inv_factorials(&[p1, p2, m1 - p1, m2 - p2, d1 as u32, d2 as u32]);
            let term = &*h(m1 + m2 - p1 - p2, n1 + n2 - p1 - p2) * &z_power(p1 + p2, -1);
            rhs = &rhs + &term.scale(&w);
        }
    }
    rhs
}

/// `H_{m1,n1} H_{m2,n2}/(m1!m2!n1!n2!)` against its expansion in single
/// Hermite polynomials weighted by `(-z)^{p1+p2}`. Both factorial pairings
/// are tried; the report records the outcome of each and passes when at
/// least one reading holds exactly.
pub fn verify_nielsen_product(m1: u32, n1: u32, m2: u32, n2: u32) -> Result<VerificationReport> {
    let lhs = (&*h(m1, n1) * &*h(m2, n2)).scale(&inv_factorials(&[m1, m2, n1, n2]));
    let mut p = params(&[
        ("m1", json!(m1)),
        ("n1", json!(n1)),
        ("m2", json!(m2)),
        ("n2", json!(n2)),
    ]);
    let mut passing = None;
    let mut exchanged_diff = None;
    for reading in [ProductReading::Exchanged, ProductReading::Transposed] {
        let diff = lhs.try_sub(&product_rhs(m1, n1, m2, n2, reading))?;
        let ok = diff.is_zero();
        p.insert(
            reading.name().into(),
            json!(if ok { "pass" } else { "fail" }),
        );
        if ok && passing.is_none() {
            passing = Some(reading);
        }
        if reading == ProductReading::Exchanged {
            exchanged_diff = Some(diff);
        }
    }
    Ok(match passing {
        Some(r) => {
            p.insert("reading".into(), json!(r.name()));
            VerificationReport::pass("nielsen-prod", p)
        }
        None => VerificationReport::fail(
            "nielsen-prod",
            p,
            Witness::Polynomial(exchanged_diff.expect("exchanged reading is always tried")),
        ),
    })
}

/// Substitutes the linearization formula into the product formula: the
/// composite of the two triangular transforms must return
/// `H_{m1,n1} H_{m2,n2}/(m1!m2!n1!n2!)` unchanged.
pub fn verify_nielsen_duality(m1: u32, n1: u32, m2: u32, n2: u32) -> Result<VerificationReport> {
    let normalized_product = |a: u32, b: u32, c: u32, d: u32| {
        (&*h(a, b) * &*h(c, d)).scale(&inv_factorials(&[a, b, c, d]))
    };
    let lhs = normalized_product(m1, n1, m2, n2);
    let mut rhs = SparsePoly::zero(3);
    for p1 in 0..=m1.min(n2) {
        for p2 in 0..=n1.min(m2) {
            let (a, b, c, d) = (m1 - p1, n1 - p2, m2 - p2, n2 - p1);
            // H_{a+c,b+d}/(a!b!c!d!) rewritten through the linearization sum
            let mut single = SparsePoly::zero(3);
            for q1 in 0..=a.min(d) {
                for q2 in 0..=b.min(c) {
                    let term = normalized_product(a - q1, b - q2, c - q2, d - q1);
                    let w = inv_factorials(&[q1, q2]);
                    single = &single + &(&term * &z_power(q1 + q2, 1)).scale(&w);
                }
            }
            let w = inv_factorials(&[p1, p2]);
            rhs = &rhs + &(&single * &z_power(p1 + p2, -1)).scale(&w);
        }
    }
    VerificationReport::compare(
        "nielsen-duality",
        params(&[
            ("m1", json!(m1)),
            ("n1", json!(n1)),
            ("m2", json!(m2)),
            ("n2", json!(n2)),
        ]),
        &lhs,
        &rhs,
    )
}

/// Largest number of blocks for which the addition formula is expanded
/// symbolically; beyond it both sides are compared at exact rational points.
pub const ADDITION_SYMBOLIC_MAX_PARTS: usize = 3;
const ADDITION_POINTS: usize = 4;

/// `H_{M,N}(Σ a_j x_j, Σ b_j y_j, Σ a_j b_j z_j)` against the composition
/// sum of multinomially weighted products `Π_j H_{m_j,n_j}(x_j, y_j, z_j)`.
pub fn verify_addition(
    big_m: u32,
    big_n: u32,
    a: &[BigRational],
    b: &[BigRational],
) -> Result<VerificationReport> {
    if a.len() != b.len() {
        return Err(Error::Arity {
            expected: a.len(),
            found: b.len(),
        });
    }
    let k = a.len();
    if k == 0 {
        return Err(Error::InvalidArgument(
            "addition formula needs k >= 1".into(),
        ));
    }
    let mut p = params(&[
        ("M", json!(big_m)),
        ("N", json!(big_n)),
        ("k", json!(k)),
        (
            "a",
            json!(a.iter().map(ToString::to_string).collect::<Vec<_>>()),
        ),
        (
            "b",
            json!(b.iter().map(ToString::to_string).collect::<Vec<_>>()),
        ),
    ]);
    let set = CompositionSet::new(big_m, big_n, k);
    let mn_fact = BigRational::from_integer(factorial(big_m) * factorial(big_n));
    let weight = |mc: &[u32], nc: &[u32]| -> BigRational {
        let mut w = &mn_fact * inv_factorials(mc) * inv_factorials(nc);
        for j in 0..k {
            w *= num_traits::pow(a[j].clone(), mc[j] as usize);
            w *= num_traits::pow(b[j].clone(), nc[j] as usize);
        }
        w
    };

    if k <= ADDITION_SYMBOLIC_MAX_PARTS {
        p.insert("mode".into(), json!("symbolic"));
        let arity = 3 * k;
        let mut xs = SparsePoly::zero(arity);
        let mut ys = SparsePoly::zero(arity);
        let mut zs = SparsePoly::zero(arity);
        for j in 0..k {
            xs = &xs + &SparsePoly::var(arity, 3 * j)?.scale(&a[j]);
            ys = &ys + &SparsePoly::var(arity, 3 * j + 1)?.scale(&b[j]);
            zs = &zs + &SparsePoly::var(arity, 3 * j + 2)?.scale(&(&a[j] * &b[j]));
        }
        let lhs = h(big_m, big_n).compose(&[xs, ys, zs])?;
        let mut rhs = SparsePoly::zero(arity);
        for (mc, nc) in set.iter() {
            let w = weight(&mc, &nc);
            if w.is_zero() {
                continue;
            }
            let mut term = SparsePoly::constant(arity, w);
            for j in 0..k {
                let block = h(mc[j], nc[j]).embed(arity, &[3 * j, 3 * j + 1, 3 * j + 2])?;
                term = &term * &block;
            }
            rhs = &rhs + &term;
        }
        VerificationReport::compare("addition", p, &lhs, &rhs)
    } else {
        p.insert("mode".into(), json!("pointwise"));
        p.insert("points".into(), json!(ADDITION_POINTS));
        let seed = 0xadd0_u64 ^ (u64::from(big_m) << 32) ^ (u64::from(big_n) << 16) ^ k as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for point_idx in 0..ADDITION_POINTS {
            let coords: Vec<BigRational> = (0..3 * k).map(|_| small_rational(&mut rng)).collect();
            let mut xyz = [
                BigRational::zero(),
                BigRational::zero(),
                BigRational::zero(),
            ];
            for j in 0..k {
                xyz[0] += &a[j] * &coords[3 * j];
                xyz[1] += &b[j] * &coords[3 * j + 1];
                xyz[2] += &a[j] * &b[j] * &coords[3 * j + 2];
            }
            let lhs = h(big_m, big_n).eval_exact(&xyz)?;
            let mut rhs = BigRational::zero();
            for (mc, nc) in set.iter() {
                let mut term = weight(&mc, &nc);
                for j in 0..k {
                    if term.is_zero() {
                        break;
                    }
                    term *= h(mc[j], nc[j]).eval_exact(&coords[3 * j..3 * j + 3])?;
                }
                rhs += term;
            }
            if lhs != rhs {
                return Ok(VerificationReport::fail(
                    "addition",
                    p,
                    Witness::Mismatch {
                        at: format!("point {point_idx}"),
                        expected: lhs.to_string(),
                        actual: rhs.to_string(),
                    },
                ));
            }
        }
        Ok(VerificationReport::pass("addition", p))
    }
}

/// Rational with numerator in `[-6, 6]` and denominator in `[1, 4]`.
pub fn small_rational<R: Rng>(rng: &mut R) -> BigRational {
    let num: i64 = rng.random_range(-6..=6);
    let den: i64 = rng.random_range(1..=4);
    BigRational::new(num.into(), den.into())
}

// variable slots of the generating-function ring (x, y, z, s1, s2, t1, t2)
const S1: usize = 3;
const S2: usize = 4;
const T1: usize = 5;
const T2: usize = 6;

/// Truncated formal exponential of
/// `(s1+s2)x + (t1+t2)y + (s1+s2)(t1+t2)z`, keeping every term of total
/// degree `<= order` in `(s1, s2, t1, t2)`.
pub fn fourvar_exponential(order: u32) -> SparsePoly {
    let v = |i| SparsePoly::var(7, i).expect("slot within arity 7");
    let s = &v(S1) + &v(S2);
    let t = &v(T1) + &v(T2);
    let exponent = &(&(&s * &v(X)) + &(&t * &v(Y))) + &(&(&s * &t) * &v(Z));
    let st_vars = [S1, S2, T1, T2];
    let mut acc = SparsePoly::one(7);
    let mut term = SparsePoly::one(7);
    for j in 1..=order {
        term = term
            .try_mul_truncated(&exponent, &st_vars, order)
            .expect("same arity")
            .scale(&BigRational::new(BigInt::one(), BigInt::from(j)));
        if term.is_zero() {
            break;
        }
        acc = &acc + &term;
    }
    acc
}

/// Compares every Taylor coefficient of the four-variable exponential up to
/// `order` with `H_{m1+m2,n1+n2}(x, y, z)/(m1!m2!n1!n2!)`.
pub fn verify_fourvar_genfn(order: u32) -> Result<VerificationReport> {
    let series = fourvar_exponential(order);
    let coeffs = series.coefficients_in(&[S1, S2, T1, T2]);
    let mut checked = 0u64;
    let mut p = params(&[("order", json!(order))]);
    for total in 0..=order {
        for key in Compositions::new(total, 4) {
            let (m1, m2, n1, n2) = (key[0], key[1], key[2], key[3]);
            let expected = h(m1 + m2, n1 + n2)
                .embed(7, &[X, Y, Z])?
                .scale(&inv_factorials(&[m1, m2, n1, n2]));
            let actual = coeffs
                .get(&key)
                .cloned()
                .unwrap_or_else(|| SparsePoly::zero(7));
            checked += 1;
            let diff = actual.try_sub(&expected)?;
            if !diff.is_zero() {
                p.insert("coefficients_checked".into(), json!(checked));
                p.insert(
                    "first_failure".into(),
                    json!({"s1": m1, "s2": m2, "t1": n1, "t2": n2}),
                );
                return Ok(VerificationReport::fail(
                    "fourvar",
                    p,
                    Witness::Polynomial(diff),
                ));
            }
        }
    }
    if let Some(extra) = coeffs.keys().find(|k| k.iter().sum::<u32>() > order) {
        return Ok(VerificationReport::fail(
            "fourvar",
            p,
            Witness::Mismatch {
                at: format!("{extra:?}"),
                expected: "truncated".into(),
                actual: "present".into(),
            },
        ));
    }
    p.insert("coefficients_checked".into(), json!(checked));
    Ok(VerificationReport::pass("fourvar", p))
}

/// `∂H/∂z == ∂²H/∂x∂y` for one index pair.
pub fn verify_pde(m: u32, n: u32) -> Result<VerificationReport> {
    let hp = h(m, n);
    let lhs = hp.diff(Z)?;
    let rhs = hp.diff(X)?.diff(Y)?;
    VerificationReport::compare(
        "pde",
        params(&[("m", json!(m)), ("n", json!(n))]),
        &lhs,
        &rhs,
    )
}

/// `exp(z ∂²/∂x∂y){x^m y^n} == H_{m,n}` for one index pair.
pub fn verify_operator(m: u32, n: u32) -> Result<VerificationReport> {
    let mono = SparsePoly::monomial(vec![m, n, 0], integer(1));
    let lhs = heat_operator_formal(&mono)?;
    VerificationReport::compare(
        "operator",
        params(&[("m", json!(m)), ("n", json!(n))]),
        &lhs,
        &h(m, n),
    )
}

/// Re-expands the Hermite combination for `x^m y^n` and compares it with the
/// monomial.
pub fn verify_inversion(m: u32, n: u32) -> Result<VerificationReport> {
    let back = expand_hermite_combination(&monomial_in_hermite(m, n))?;
    VerificationReport::compare(
        "inversion",
        params(&[("m", json!(m)), ("n", json!(n))]),
        &back,
        &SparsePoly::monomial(vec![m, n, 0], integer(1)),
    )
}

pub const SCALING_TOL: f64 = 1e-10;

/// Draws a complex point with `|x|, |y|` components in `[-1.5, 1.5]` and
/// `0.25 <= |z| <= 2`.
pub fn random_scaling_point<R: Rng>(rng: &mut R) -> (ComplexValue, ComplexValue, ComplexValue) {
    let mut c = || ComplexValue::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
    let (x, y) = (c(), c());
    let r: f64 = rng.random_range(0.25..2.0);
    let theta: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    (x, y, ComplexValue::from_polar(r, theta))
}

/// Scaling map against direct evaluation for all `m, n <= max_index` at one
/// point, within [`SCALING_TOL`] relative.
pub fn verify_scaling_at(
    max_index: u32,
    x: ComplexValue,
    y: ComplexValue,
    z: ComplexValue,
) -> Result<VerificationReport> {
    let p = params(&[
        ("max_index", json!(max_index)),
        ("x", json!({"re": x.re, "im": x.im})),
        ("y", json!({"re": y.re, "im": y.im})),
        ("z", json!({"re": z.re, "im": z.im})),
    ]);
    for m in 0..=max_index {
        for n in 0..=max_index {
            let idx = HermiteIndex::new(m, n);
            let direct = hermite_eval(idx, x, y, z)?;
            let scaled = scaling_map(idx, x, y, z)?;
            let err = (direct - scaled).norm();
            if err > SCALING_TOL * direct.norm().max(1.0) {
                return Ok(VerificationReport::fail(
                    "scaling",
                    p,
                    Witness::Mismatch {
                        at: format!("(m, n) = ({m}, {n})"),
                        expected: direct.to_string(),
                        actual: scaled.to_string(),
                    },
                ));
            }
        }
    }
    Ok(VerificationReport::pass("scaling", p))
}

/// Batched sweeps. Each returns reports in index order regardless of how the
/// work is scheduled.
pub mod sweep {
    use super::*;

    fn grid(max: u32) -> Vec<(u32, u32)> {
        (0..=max)
            .flat_map(|m| (0..=max).map(move |n| (m, n)))
            .collect()
    }

    /// All `(m1, n1, m2, n2)` with `m1 + n1 + m2 + n2 <= max_total`.
    pub fn quadruples(max_total: u32) -> Vec<(u32, u32, u32, u32)> {
        let mut out = Vec::new();
        for m1 in 0..=max_total {
            for n1 in 0..=max_total - m1 {
                for m2 in 0..=max_total - m1 - n1 {
                    for n2 in 0..=max_total - m1 - n1 - m2 {
                        out.push((m1, n1, m2, n2));
                    }
                }
            }
        }
        out
    }

    fn over_grid<F>(max: u32, f: F) -> Result<Vec<VerificationReport>>
    where
        F: Fn(u32, u32) -> Result<VerificationReport> + Sync,
    {
        grid(max).into_par_iter().map(|(m, n)| f(m, n)).collect()
    }

    fn over_quadruples<F>(max_total: u32, f: F) -> Result<Vec<VerificationReport>>
    where
        F: Fn(u32, u32, u32, u32) -> Result<VerificationReport> + Sync,
    {
        quadruples(max_total)
            .into_par_iter()
            .map(|(a, b, c, d)| f(a, b, c, d))
            .collect()
    }

    pub fn pde(max_index: u32) -> Result<Vec<VerificationReport>> {
        over_grid(max_index, verify_pde)
    }

    pub fn operator(max_index: u32) -> Result<Vec<VerificationReport>> {
        over_grid(max_index, verify_operator)
    }

    pub fn inversion(max_index: u32) -> Result<Vec<VerificationReport>> {
        over_grid(max_index, verify_inversion)
    }

    pub fn nielsen_linearization(max_total: u32) -> Result<Vec<VerificationReport>> {
        over_quadruples(max_total, verify_nielsen_linearization)
    }

    pub fn nielsen_product(max_total: u32) -> Result<Vec<VerificationReport>> {
        over_quadruples(max_total, verify_nielsen_product)
    }

    pub fn nielsen_duality(max_total: u32) -> Result<Vec<VerificationReport>> {
        over_quadruples(max_total, verify_nielsen_duality)
    }

    /// Seeded `(a, b)` vectors of small non-zero rationals.
    pub fn addition_vectors(
        k: usize,
        count: usize,
        seed: u64,
    ) -> Vec<(Vec<BigRational>, Vec<BigRational>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((k as u64) << 40));
        let nonzero = |rng: &mut ChaCha8Rng| loop {
            let r = small_rational(rng);
            if !r.is_zero() {
                break r;
            }
        };
        (0..count)
            .map(|_| {
                let a = (0..k).map(|_| nonzero(&mut rng)).collect();
                let b = (0..k).map(|_| nonzero(&mut rng)).collect();
                (a, b)
            })
            .collect()
    }

    /// Addition formula for `M, N <= max_index`, `k = 1..=max_parts`, with
    /// `vectors` seeded `(a, b)` pairs per `k`.
    pub fn addition(
        max_index: u32,
        max_parts: usize,
        vectors: usize,
        seed: u64,
    ) -> Result<Vec<VerificationReport>> {
        let mut jobs = Vec::new();
        for k in 1..=max_parts {
            for (a, b) in addition_vectors(k, vectors, seed) {
                for (m, n) in grid(max_index) {
                    jobs.push((m, n, a.clone(), b.clone()));
                }
            }
        }
        jobs.into_par_iter()
            .map(|(m, n, a, b)| verify_addition(m, n, &a, &b))
            .collect()
    }

    /// Options for [`by_name`]; unset bounds fall back to per-identity defaults.
    #[derive(Clone, Debug, Default, PartialEq, Eq)]
    pub struct SweepOptions {
        pub max_degree: Option<u32>,
        pub k: Option<usize>,
        pub samples: Option<usize>,
        pub seed: u64,
    }

    /// Identity names accepted by [`by_name`].
    pub const NAMES: [&str; 9] = [
        "pde",
        "nielsen-lin",
        "nielsen-prod",
        "duality",
        "addition",
        "fourvar",
        "inversion",
        "operator",
        "scaling",
    ];

    /// Runs the named sweep. `k` applies only to `addition`, `samples` only
    /// to `addition` (vectors per block count) and `scaling` (points).
    pub fn by_name(name: &str, opts: &SweepOptions) -> Result<Vec<VerificationReport>> {
        if opts.k.is_some() && name != "addition" {
            return Err(Error::InvalidArgument(format!(
                "k does not apply to {name}"
            )));
        }
        if opts.samples.is_some() && name != "addition" && name != "scaling" {
            return Err(Error::InvalidArgument(format!(
                "samples does not apply to {name}"
            )));
        }
        let d = |default: u32| opts.max_degree.unwrap_or(default);
        match name {
            "pde" => pde(d(12)),
            "operator" => operator(d(12)),
            "inversion" => inversion(d(10)),
            "nielsen-lin" => nielsen_linearization(d(8)),
            "nielsen-prod" => nielsen_product(d(8)),
            "duality" => nielsen_duality(d(8)),
            "addition" => {
                let k = opts.k.unwrap_or(3);
                if k == 0 {
                    return Err(Error::InvalidArgument("k must be at least 1".into()));
                }
                addition(d(3), k, opts.samples.unwrap_or(10), opts.seed)
            }
            "fourvar" => Ok(vec![verify_fourvar_genfn(d(6))?]),
            "scaling" => scaling(d(12), opts.samples.unwrap_or(20), opts.seed),
            _ => Err(Error::InvalidArgument(format!(
                "unknown identity {name:?}; expected one of {}",
                NAMES.join(", ")
            ))),
        }
    }

    pub fn scaling(max_index: u32, points: usize, seed: u64) -> Result<Vec<VerificationReport>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<_> = (0..points)
            .map(|_| random_scaling_point(&mut rng))
            .collect();
        pts.into_par_iter()
            .map(|(x, y, z)| verify_scaling_at(max_index, x, y, z))
            .collect()
    }
}
