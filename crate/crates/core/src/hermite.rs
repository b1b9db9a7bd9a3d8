//! The complex Hermite polynomials
//!
//! `H_{m,n}(x, y, z) = Σ_{k=0}^{min(m,n)} k! C(m,k) C(n,k) x^{m-k} y^{n-k} z^k`
//!
//! together with the classical Hermite polynomials `H_n(u)`, the terminating
//! operator `exp(c ∂²/∂x∂y)`, the inverse (monomial) expansion and the
//! scaling map that relates `H_{m,n}(x, y, z)` to the `z = -1` family.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{ensure_finite, integer, ComplexValue, SparsePoly};

/// Variable slots of the arity-3 ring.
pub const X: usize = 0;
pub const Y: usize = 1;
pub const Z: usize = 2;

/// Degree pair `(m, n)` of `H_{m,n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HermiteIndex {
    pub m: u32,
    pub n: u32,
}

impl HermiteIndex {
    pub const fn new(m: u32, n: u32) -> Self {
        HermiteIndex { m, n }
    }

    /// `m ∧ n`, the length of the defining sum minus one.
    pub fn min(self) -> u32 {
        self.m.min(self.n)
    }

    pub fn degree(self) -> u32 {
        self.m + self.n
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `k! C(m,k) C(n,k)`, the integer weight of the `z^k` term of `H_{m,n}`.
pub fn hermite_weight(m: u32, n: u32, k: u32) -> BigInt {
    factorial(k) * binomial(m, k) * binomial(n, k)
}

/// Exact `H_{m,n}(x, y, z)` as an arity-3 polynomial.
pub fn hermite_poly(idx: HermiteIndex) -> SparsePoly {
    let HermiteIndex { m, n } = idx;
    let terms = (0..=idx.min()).map(|k| (vec![m - k, n - k, k], integer(hermite_weight(m, n, k))));
    SparsePoly::from_terms(3, terms).expect("exponent vectors have length 3")
}

/// `H_{m,n}(x, y, z)` by direct summation, without building the polynomial.
///
/// Consecutive terms are related by the ratio
/// `(m-k)(n-k)/(k+1) · z/(xy)`, so no factorial is ever formed.
pub fn hermite_eval(
    idx: HermiteIndex,
    x: ComplexValue,
    y: ComplexValue,
    z: ComplexValue,
) -> Result<ComplexValue> {
    ensure_finite("x", x)?;
    ensure_finite("y", y)?;
    ensure_finite("z", z)?;
    let HermiteIndex { m, n } = idx;
    let j = idx.min();
    let xy = x * y;
    let zero = ComplexValue::new(0.0, 0.0);

    let value = if xy == zero {
        // only terms with x^{m-k} y^{n-k} = 1 survive, i.e. k = m or k = n
        let mut v = zero;
        if x == zero && y == zero {
            if m == n {
                v = weight_f64(m, n, j)? * z.powu(j);
            }
        } else if x == zero {
            // y != 0: need m - k = 0, so k = m (requires m <= n)
            if m <= n {
                v = weight_f64(m, n, m)? * y.powu(n - m) * z.powu(m);
            }
        } else if n <= m {
            v = weight_f64(m, n, n)? * x.powu(m - n) * z.powu(n);
        }
        v
    } else {
        let ratio = z / xy;
        let mut term = x.powu(m) * y.powu(n);
        let mut sum = term;
        for k in 0..j {
            term *= ratio * (f64::from(m - k) * f64::from(n - k) / f64::from(k + 1));
            sum += term;
        }
        sum
    };
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::EvalOverflow)
    }
}

fn weight_f64(m: u32, n: u32, k: u32) -> Result<f64> {
    hermite_weight(m, n, k)
        .to_f64()
        .filter(|w| w.is_finite())
        .ok_or(Error::EvalOverflow)
}

/// Definition with `z = -1`: `Σ (-1)^k k! C(m,k) C(n,k) x^{m-k} y^{n-k}`.
pub fn hermite_bivariate_eval(
    idx: HermiteIndex,
    x: ComplexValue,
    y: ComplexValue,
) -> Result<ComplexValue> {
    hermite_eval(idx, x, y, ComplexValue::new(-1.0, 0.0))
}

/// Integer coefficients of the classical Hermite polynomial, lowest power
/// first: `H_n(u) = Σ_k (-1)^k n!/(k!(n-2k)!) (2u)^{n-2k}`.
pub fn classical_hermite_coeffs(n: u32) -> Vec<BigInt> {
    let mut coeffs = vec![BigInt::zero(); n as usize + 1];
    let nf = factorial(n);
    for k in 0..=n / 2 {
        let p = n - 2 * k;
        let mut c = &nf / (factorial(k) * factorial(p)) * (BigInt::one() << p);
        if k % 2 == 1 {
            c = -c;
        }
        coeffs[p as usize] = c;
    }
    coeffs
}

/// `H_n(u)` from exact integer coefficients, converted to `f64` only for the
/// final Horner pass.
pub fn classical_hermite_eval(n: u32, u: ComplexValue) -> Result<ComplexValue> {
    ensure_finite("u", u)?;
    let coeffs = classical_hermite_coeffs(n);
    let mut acc = ComplexValue::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        let cf = c
            .to_f64()
            .filter(|v| v.is_finite())
            .ok_or(Error::EvalOverflow)?;
        acc = acc * u + cf;
    }
    if acc.re.is_finite() && acc.im.is_finite() {
        Ok(acc)
    } else {
        Err(Error::EvalOverflow)
    }
}

/// Applies `exp(c ∂²/∂x∂y)` to `p` as the terminating sum
/// `Σ_k c^k/k! (∂²/∂x∂y)^k p`. Arity-2 inputs are promoted to `(x, y, z)`.
pub fn heat_operator_apply(p: &SparsePoly, c: &BigRational) -> Result<SparsePoly> {
    let mut out = SparsePoly::zero(3);
    let mut ck = BigRational::one();
    for term in heat_series(p)? {
        out = &out + &term.scale(&ck);
        ck *= c;
    }
    Ok(out)
}

/// `exp(z ∂²/∂x∂y)` with the formal variable `z` in place of a scalar, so
/// that `x^m y^n` maps to `H_{m,n}(x, y, z)`.
pub fn heat_operator_formal(p: &SparsePoly) -> Result<SparsePoly> {
    let z = SparsePoly::var(3, Z)?;
    let mut out = SparsePoly::zero(3);
    let mut zk = SparsePoly::one(3);
    for term in heat_series(p)? {
        out = &out + &(&term * &zk);
        zk = &zk * &z;
    }
    Ok(out)
}

/// `[(1/k!) (∂²/∂x∂y)^k p]` for `k = 0, 1, …` up to the first vanishing term.
fn heat_series(p: &SparsePoly) -> Result<Vec<SparsePoly>> {
    let mut out = Vec::new();
    let mut current = promote(p)?;
    let mut k: u32 = 0;
    while !current.is_zero() {
        out.push(current.clone());
        k += 1;
        current = current
            .diff(X)?
            .diff(Y)?
            .scale(&BigRational::new(BigInt::one(), BigInt::from(k)));
    }
    Ok(out)
}

fn promote(p: &SparsePoly) -> Result<SparsePoly> {
    match p.arity() {
        3 => Ok(p.clone()),
        2 => p.embed(3, &[X, Y]),
        found => Err(Error::Arity { expected: 3, found }),
    }
}

/// `x^m y^n = Σ_k k! C(m,k) C(n,k) (-z)^k H_{m-k,n-k}(x, y, z)`.
///
/// Each entry is the coefficient polynomial (a monomial in `z`) paired with
/// the Hermite index it multiplies.
pub fn monomial_in_hermite(m: u32, n: u32) -> Vec<(SparsePoly, HermiteIndex)> {
    (0..=m.min(n))
        .map(|k| {
            let mut c = integer(hermite_weight(m, n, k));
            if k % 2 == 1 {
                c = -c;
            }
            (
                SparsePoly::monomial(vec![0, 0, k], c),
                HermiteIndex::new(m - k, n - k),
            )
        })
        .collect()
}

/// Expands `Σ coeff · H_idx` back into a polynomial.
pub fn expand_hermite_combination(combo: &[(SparsePoly, HermiteIndex)]) -> Result<SparsePoly> {
    combo.iter().try_fold(SparsePoly::zero(3), |acc, (c, idx)| {
        acc.try_add(&c.try_mul(&hermite_poly(*idx))?)
    })
}

/// `(√(-z))^{m+n} · H_{m,n}(x/√(-z), y/√(-z), -1)` on the principal branch.
pub fn scaling_map(
    idx: HermiteIndex,
    x: ComplexValue,
    y: ComplexValue,
    z: ComplexValue,
) -> Result<ComplexValue> {
    ensure_finite("z", z)?;
    if z == ComplexValue::new(0.0, 0.0) {
        return Err(Error::SingularScaling);
    }
    let r = (-z).sqrt();
    let inner = hermite_bivariate_eval(idx, x / r, y / r)?;
    let v = r.powu(idx.degree()) * inner;
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::EvalOverflow)
    }
}

/// Build-on-demand table of `H_{m,n}` polynomials.
///
/// Entries with `m + n` above the configured bound are built fresh and not
/// retained. Reads take a shared lock; a missing entry is built outside the
/// lock and inserted whole.
#[derive(Debug)]
pub struct HermiteCache {
    max_degree: u32,
    table: RwLock<HashMap<HermiteIndex, Arc<SparsePoly>>>,
    factorials: RwLock<Vec<BigInt>>,
}

impl Default for HermiteCache {
    fn default() -> Self {
        Self::new(64)
    }
}

impl HermiteCache {
    pub fn new(max_degree: u32) -> Self {
        HermiteCache {
            max_degree,
            table: RwLock::new(HashMap::new()),
            factorials: RwLock::new(vec![BigInt::one()]),
        }
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn get(&self, idx: HermiteIndex) -> Arc<SparsePoly> {
        if let Some(p) = self.table.read().expect("cache lock poisoned").get(&idx) {
            return Arc::clone(p);
        }
        let built = Arc::new(hermite_poly(idx));
        if idx.degree() > self.max_degree {
            return built;
        }
        let mut table = self.table.write().expect("cache lock poisoned");
        Arc::clone(table.entry(idx).or_insert(built))
    }

    pub fn len(&self) -> usize {
        self.table.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `j!`, extending the stored table as needed.
    pub fn factorial(&self, j: u32) -> BigInt {
        if let Some(f) = self
            .factorials
            .read()
            .expect("cache lock poisoned")
            .get(j as usize)
        {
            return f.clone();
        }
        let mut table = self.factorials.write().expect("cache lock poisoned");
        while table.len() <= j as usize {
            let next = table.last().expect("table starts with 0!") * table.len();
            table.push(next);
        }
        table[j as usize].clone()
    }
}
