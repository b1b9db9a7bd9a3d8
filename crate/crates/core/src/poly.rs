//! Exact sparse multivariate polynomials over arbitrary-precision rationals.
//!
//! A [`SparsePoly`] is a map from exponent vectors to non-zero rational
//! coefficients. Terms are kept in graded lexicographic order so iteration
//! and serialization are deterministic. The zero polynomial is the empty map;
//! its arity is still tracked.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex number with double-precision components.
pub type ComplexValue = Complex64;

/// Rejects NaN or infinite components.
pub fn ensure_finite(label: &str, value: ComplexValue) -> Result<ComplexValue> {
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(format!("{label} = {value}")))
    }
}

/// Exponent vector ordered by total degree, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact multivariate polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    arity: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

fn check_arity(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Arity { expected, found })
    }
}

impl SparsePoly {
    pub fn zero(arity: usize) -> Self {
        SparsePoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, BigRational::one())
    }

    pub fn constant(arity: usize, c: BigRational) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(Monomial(vec![0; arity]), c);
        p
    }

    /// The formal variable with index `var`.
    pub fn var(arity: usize, var: usize) -> Result<Self> {
        if var >= arity {
            return Err(Error::Arity {
                expected: arity,
                found: var + 1,
            });
        }
        let mut exps = vec![0; arity];
        exps[var] = 1;
        Ok(Self::monomial(exps, BigRational::one()))
    }

    pub fn monomial(exps: Vec<u32>, coeff: BigRational) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(Monomial(exps), coeff);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// duplicates and dropping zeros.
    pub fn from_terms<I>(arity: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, BigRational)>,
    {
        let mut p = Self::zero(arity);
        for (exps, c) in terms {
            check_arity(arity, exps.len())?;
            p.add_term(Monomial(exps), c);
        }
        Ok(p)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigRational)> {
        self.terms.iter().map(|(m, c)| (m.exps(), c))
    }

    pub fn coeff(&self, exps: &[u32]) -> BigRational {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn try_add(&self, other: &SparsePoly) -> Result<SparsePoly> {
        check_arity(self.arity, other.arity)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &SparsePoly) -> Result<SparsePoly> {
        check_arity(self.arity, other.arity)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    /// Exact product. Fails when the arities differ.
    pub fn try_mul(&self, other: &SparsePoly) -> Result<SparsePoly> {
        check_arity(self.arity, other.arity)?;
        let mut out = SparsePoly::zero(self.arity);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    /// Product that drops every term whose degree in `vars` exceeds `max_degree`.
    pub fn try_mul_truncated(
        &self,
        other: &SparsePoly,
        vars: &[usize],
        max_degree: u32,
    ) -> Result<SparsePoly> {
        check_arity(self.arity, other.arity)?;
        let partial = |m: &Monomial| vars.iter().map(|&v| m.0[v]).sum::<u32>();
        let mut out = SparsePoly::zero(self.arity);
        for (ma, ca) in &self.terms {
            let da = partial(ma);
            if da > max_degree {
                continue;
            }
            for (mb, cb) in &other.terms {
                if da + partial(mb) <= max_degree {
                    out.add_term(ma.mul(mb), ca * cb);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &BigRational) -> SparsePoly {
        if factor.is_zero() {
            return SparsePoly::zero(self.arity);
        }
        SparsePoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * factor))
                .collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> SparsePoly {
        let mut acc = SparsePoly::one(self.arity);
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn diff(&self, var: usize) -> Result<SparsePoly> {
        if var >= self.arity {
            return Err(Error::Arity {
                expected: self.arity,
                found: var + 1,
            });
        }
        let mut out = SparsePoly::zero(self.arity);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] -= 1;
            out.add_term(Monomial(exps), c * BigInt::from(e));
        }
        Ok(out)
    }

    /// Numeric value at `point`; coefficients are converted to `f64` here and
    /// nowhere else.
    pub fn eval(&self, point: &[ComplexValue]) -> Result<ComplexValue> {
        check_arity(self.arity, point.len())?;
        for (i, v) in point.iter().enumerate() {
            ensure_finite(&format!("point[{i}]"), *v)?;
        }
        let max_exp: Vec<u32> = (0..self.arity)
            .map(|v| self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<ComplexValue>> = point
            .iter()
            .zip(&max_exp)
            .map(|(x, &e)| {
                let mut row = Vec::with_capacity(e as usize + 1);
                let mut acc = ComplexValue::new(1.0, 0.0);
                row.push(acc);
                for _ in 0..e {
                    acc *= x;
                    row.push(acc);
                }
                row
            })
            .collect();
        let mut sum = ComplexValue::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let cf = c.to_f64().ok_or(Error::EvalOverflow)?;
            let term =
                m.0.iter()
                    .enumerate()
                    .fold(ComplexValue::new(cf, 0.0), |acc, (v, &e)| {
                        acc * powers[v][e as usize]
                    });
            sum += term;
        }
        if sum.re.is_finite() && sum.im.is_finite() {
            Ok(sum)
        } else {
            Err(Error::EvalOverflow)
        }
    }

    /// Exact value at a rational point.
    pub fn eval_exact(&self, point: &[BigRational]) -> Result<BigRational> {
        check_arity(self.arity, point.len())?;
        let mut sum = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[v].clone(), e as usize);
                }
            }
            sum += t;
        }
        Ok(sum)
    }

    /// Substitutes `subs[i]` for variable `i`. All substitutes must share one
    /// arity, which becomes the arity of the result.
    pub fn compose(&self, subs: &[SparsePoly]) -> Result<SparsePoly> {
        check_arity(self.arity, subs.len())?;
        let target = subs.first().map(SparsePoly::arity).ok_or(Error::Arity {
            expected: self.arity,
            found: 0,
        })?;
        for s in subs {
            check_arity(target, s.arity)?;
        }
        let mut power_cache: Vec<Vec<SparsePoly>> = subs
            .iter()
            .map(|s| vec![SparsePoly::one(target), s.clone()])
            .collect();
        let mut out = SparsePoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = SparsePoly::constant(target, c.clone());
            for (v, &e) in m.0.iter().enumerate() {
                let cache = &mut power_cache[v];
                while cache.len() <= e as usize {
                    let next = &cache[cache.len() - 1] * &subs[v];
                    cache.push(next);
                }
                if e > 0 {
                    t = &t * &cache[e as usize];
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Re-indexes variables into a wider ring: variable `i` becomes
    /// variable `var_map[i]` of a polynomial with arity `new_arity`.
    pub fn embed(&self, new_arity: usize, var_map: &[usize]) -> Result<SparsePoly> {
        check_arity(self.arity, var_map.len())?;
        if let Some(&bad) = var_map.iter().find(|&&v| v >= new_arity) {
            return Err(Error::Arity {
                expected: new_arity,
                found: bad + 1,
            });
        }
        let mut out = SparsePoly::zero(new_arity);
        for (m, c) in &self.terms {
            let mut exps = vec![0; new_arity];
            for (i, &e) in m.0.iter().enumerate() {
                exps[var_map[i]] += e;
            }
            out.add_term(Monomial(exps), c.clone());
        }
        Ok(out)
    }

    /// Groups terms by their exponents on `vars`, returning the coefficient
    /// polynomial (in the remaining slots, arity unchanged) of each pattern.
    pub fn coefficients_in(&self, vars: &[usize]) -> BTreeMap<Vec<u32>, SparsePoly> {
        let mut out: BTreeMap<Vec<u32>, SparsePoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key: Vec<u32> = vars.iter().map(|&v| m.0[v]).collect();
            let mut rest = m.0.clone();
            for &v in vars {
                rest[v] = 0;
            }
            out.entry(key)
                .or_insert_with(|| SparsePoly::zero(self.arity))
                .add_term(Monomial(rest), c.clone());
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("polynomial serialization is infallible")
    }

    pub fn from_json(arity: usize, value: &serde_json::Value) -> Result<SparsePoly> {
        let terms: Vec<TermRecord> =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let parsed = terms
            .into_iter()
            .map(|t| Ok((t.exps, parse_rational(&t.coeff)?)))
            .collect::<Result<Vec<_>>>()?;
        SparsePoly::from_terms(arity, parsed)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    exps: Vec<u32>,
    coeff: String,
}

impl Serialize for SparsePoly {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (m, c) in &self.terms {
            seq.serialize_element(&TermRecord {
                exps: m.0.clone(),
                coeff: c.to_string(),
            })?;
        }
        seq.end()
    }
}

/// Parses `"3"`, `"-1/2"` and similar decimal-string rationals.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let r = BigRational::from_str(s).map_err(|e| Error::Parse(format!("rational {s:?}: {e}")))?;
    Ok(r)
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

impl fmt::Display for SparsePoly {
    /// Human-readable form, highest graded-lex term first. Variables are
    /// named x, y, z for arity 3 and x0, x1, … otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names: Vec<String> = if self.arity == 3 {
            vec!["x".into(), "y".into(), "z".into()]
        } else {
            (0..self.arity).map(|i| format!("x{i}")).collect()
        };
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> =
                m.0.iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(v, &e)| {
                        if e == 1 {
                            names[v].clone()
                        } else {
                            format!("{}^{}", names[v], e)
                        }
                    })
                    .collect();
            if vars.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", abs, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&SparsePoly> for &SparsePoly {
            type Output = SparsePoly;
            /// Panics on arity mismatch; use the `try_` method to get an error instead.
            fn $method(self, rhs: &SparsePoly) -> SparsePoly {
                self.$checked(rhs)
                    .expect("arity mismatch in polynomial arithmetic")
            }
        }
        impl $tr<SparsePoly> for SparsePoly {
            type Output = SparsePoly;
            fn $method(self, rhs: SparsePoly) -> SparsePoly {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        self.scale(&-BigRational::one())
    }
}
