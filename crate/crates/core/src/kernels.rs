//! Closed forms and truncated series for the generating-function kernels of
//! the complex and classical Hermite polynomials.
//!
//! Every series is summed in blocks of constant total degree by
//! [`adaptive_truncate`]. Terms are produced from normalized Hermite values
//! (`H_{m,n}/√(m!n!)` and `H_n/√(2^n n!)`) built by three-term recurrences,
//! which keeps individual terms representable far past the point where raw
//! factorials overflow. Every closed form with a singularity checks its
//! convergence domain first and returns
//! [`Error::OutsideConvergenceDomain`] outside it.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::hermite::classical_hermite_eval;
use crate::poly::{ensure_finite, ComplexValue};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ORDER: usize = 200;
/// Convergence guards require `|q| < 1 - DOMAIN_MARGIN`.
pub const DOMAIN_MARGIN: f64 = 1e-9;
/// Series behind a closed-form comparison stop at `tol * SERIES_TOL_FACTOR`
/// so the remaining tail sits well inside the comparison tolerance.
pub const SERIES_TOL_FACTOR: f64 = 1e-2;

fn cplx(re: f64) -> ComplexValue {
    ComplexValue::new(re, 0.0)
}

fn finite(c: ComplexValue) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

fn checked(c: ComplexValue) -> Result<ComplexValue> {
    if finite(c) {
        Ok(c)
    } else {
        Err(Error::EvalOverflow)
    }
}

/// Stopping rule for [`adaptive_truncate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy {
    pub tol: f64,
    pub max_order: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            tol: DEFAULT_TOL,
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

impl TruncationPolicy {
    pub fn new(tol: f64, max_order: usize) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tol must be positive, got {tol}"
            )));
        }
        Ok(TruncationPolicy { tol, max_order })
    }

    fn tightened(self) -> Self {
        TruncationPolicy {
            tol: self.tol * SERIES_TOL_FACTOR,
            ..self
        }
    }
}

pub fn serialize_complex<S: Serializer>(
    c: &ComplexValue,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Parts {
        re: f64,
        im: f64,
    }
    Parts { re: c.re, im: c.im }.serialize(s)
}

/// Outcome of a truncated summation.
///
/// `tail_estimate` is the magnitude of the last block relative to
/// `max(1, |value|)`, so `converged` implies `tail_estimate <= tol`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesResult {
    #[serde(serialize_with = "serialize_complex")]
    pub value: ComplexValue,
    pub order_used: usize,
    pub tail_estimate: f64,
    pub converged: bool,
}

/// Sums `block(0) + block(1) + …` until three consecutive blocks each fall
/// below `tol · max(1, |partial sum|)`. Hitting `max_order`, or a non-finite
/// block, ends the sum with `converged = false`.
pub fn adaptive_truncate<F>(mut block: F, policy: TruncationPolicy) -> SeriesResult
where
    F: FnMut(usize) -> ComplexValue,
{
    let mut sum = cplx(0.0);
    let mut quiet_blocks = 0;
    let mut last = f64::INFINITY;
    for order in 0..=policy.max_order {
        let b = block(order);
        if !finite(b) {
            return SeriesResult {
                value: sum,
                order_used: order,
                tail_estimate: f64::INFINITY,
                converged: false,
            };
        }
        sum += b;
        let scale = sum.norm().max(1.0);
        last = b.norm() / scale;
        if last < policy.tol {
            quiet_blocks += 1;
            if quiet_blocks == 3 {
                return SeriesResult {
                    value: sum,
                    order_used: order,
                    tail_estimate: last,
                    converged: true,
                };
            }
        } else {
            quiet_blocks = 0;
        }
    }
    SeriesResult {
        value: sum,
        order_used: policy.max_order,
        tail_estimate: last,
        converged: false,
    }
}

fn guard(quantity: &str, value: f64) -> Result<()> {
    if value < 1.0 - DOMAIN_MARGIN {
        Ok(())
    } else {
        Err(Error::OutsideConvergenceDomain {
            quantity: quantity.to_string(),
            value,
            bound: 1.0 - DOMAIN_MARGIN,
        })
    }
}

fn ensure_all_finite(values: &[(&str, ComplexValue)]) -> Result<()> {
    for (label, v) in values {
        ensure_finite(label, *v)?;
    }
    Ok(())
}

/// Triangular table of `H_{m,n}(x, y, z)/√(m! n!)`, filled one total degree
/// at a time from
/// `Ĥ_{m,n} = (x Ĥ_{m-1,n} + √n z Ĥ_{m-1,n-1}) / √m`.
#[derive(Clone, Debug)]
pub struct ScaledHermiteTable {
    x: ComplexValue,
    y: ComplexValue,
    z: ComplexValue,
    rows: Vec<Vec<ComplexValue>>,
    filled: Option<usize>,
}

impl ScaledHermiteTable {
    pub fn new(x: ComplexValue, y: ComplexValue, z: ComplexValue) -> Self {
        ScaledHermiteTable {
            x,
            y,
            z,
            rows: Vec::new(),
            filled: None,
        }
    }

    pub fn ensure_degree(&mut self, degree: usize) {
        let start = self.filled.map_or(0, |d| d + 1);
        for d in start..=degree {
            self.rows.push(Vec::new());
            for m in 0..=d {
                let n = d - m;
                let v = if m == 0 {
                    if n == 0 {
                        cplx(1.0)
                    } else {
                        self.y * self.rows[0][n - 1] / (n as f64).sqrt()
                    }
                } else {
                    let mut acc = self.x * self.rows[m - 1][n];
                    if n > 0 {
                        acc += (n as f64).sqrt() * self.z * self.rows[m - 1][n - 1];
                    }
                    acc / (m as f64).sqrt()
                };
                debug_assert_eq!(self.rows[m].len(), n);
                self.rows[m].push(v);
            }
            self.filled = Some(d);
        }
    }

    pub fn get(&mut self, m: usize, n: usize) -> ComplexValue {
        self.ensure_degree(m + n);
        self.rows[m][n]
    }
}

/// `H_n(u)/√(2^n n!)` from
/// `ĥ_{n+1} = (√2 u ĥ_n - √n ĥ_{n-1}) / √(n+1)`.
#[derive(Clone, Debug)]
pub struct ScaledClassicalHermite {
    u: ComplexValue,
    values: Vec<ComplexValue>,
}

impl ScaledClassicalHermite {
    pub fn new(u: ComplexValue) -> Self {
        ScaledClassicalHermite {
            u,
            values: vec![cplx(1.0)],
        }
    }

    pub fn get(&mut self, n: usize) -> ComplexValue {
        let sqrt2 = std::f64::consts::SQRT_2;
        while self.values.len() <= n {
            let k = self.values.len() - 1;
            let prev = if k == 0 {
                cplx(0.0)
            } else {
                self.values[k - 1]
            };
            let next = (sqrt2 * self.u * self.values[k] - (k as f64).sqrt() * prev)
                / ((k + 1) as f64).sqrt();
            self.values.push(next);
        }
        self.values[n]
    }
}

/// `w^j / √(j!)` for `j = 0, 1, …`, extended on demand.
#[derive(Clone, Debug)]
struct ScaledPowers {
    w: ComplexValue,
    values: Vec<ComplexValue>,
}

impl ScaledPowers {
    fn new(w: ComplexValue) -> Self {
        ScaledPowers {
            w,
            values: vec![cplx(1.0)],
        }
    }

    fn get(&mut self, j: usize) -> ComplexValue {
        while self.values.len() <= j {
            let k = self.values.len();
            let next = self.values[k - 1] * self.w / (k as f64).sqrt();
            self.values.push(next);
        }
        self.values[j]
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

// --- generating function -------------------------------------------------

/// Point for `Σ H_{m,n}(x,y,z) s^m t^n/(m!n!) = exp(sx + ty + stz)`.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenfnParams {
    #[serde(deserialize_with = "de_complex")]
    pub x: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub y: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub z: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub s: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub t: ComplexValue,
}

pub fn genfn_closed(p: &GenfnParams) -> Result<ComplexValue> {
    ensure_all_finite(&[("x", p.x), ("y", p.y), ("z", p.z), ("s", p.s), ("t", p.t)])?;
    checked((p.s * p.x + p.t * p.y + p.s * p.t * p.z).exp())
}

pub fn genfn_series(p: &GenfnParams, policy: TruncationPolicy) -> Result<SeriesResult> {
    genfn_closed(p)?;
    let mut table = ScaledHermiteTable::new(p.x, p.y, p.z);
    let mut sp = ScaledPowers::new(p.s);
    let mut tp = ScaledPowers::new(p.t);
    Ok(adaptive_truncate(
        |d| {
            (0..=d)
                .map(|m| table.get(m, d - m) * sp.get(m) * tp.get(d - m))
                .sum()
        },
        policy,
    ))
}

// --- Mehler kernel -------------------------------------------------------

/// Two points and the kernel variables `(s, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MehlerParams {
    #[serde(deserialize_with = "de_complex")]
    pub x1: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub y1: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub z1: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub x2: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub y2: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub z2: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub s: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub t: ComplexValue,
}

impl MehlerParams {
    fn check(&self) -> Result<()> {
        ensure_all_finite(&[
            ("x1", self.x1),
            ("y1", self.y1),
            ("z1", self.z1),
            ("x2", self.x2),
            ("y2", self.y2),
            ("z2", self.z2),
            ("s", self.s),
            ("t", self.t),
        ])?;
        guard("|s t z1 z2|", (self.s * self.t * self.z1 * self.z2).norm())
    }
}

/// `exp((s x1 x2 + t y1 y2 + (z1 x2 y2 + z2 x1 y1) s t)/(1 - s t z1 z2)) / (1 - s t z1 z2)`
pub fn mehler_closed(p: &MehlerParams) -> Result<ComplexValue> {
    p.check()?;
    let st = p.s * p.t;
    let den = 1.0 - st * p.z1 * p.z2;
    let num =
        p.s * p.x1 * p.x2 + p.t * p.y1 * p.y2 + (p.z1 * p.x2 * p.y2 + p.z2 * p.x1 * p.y1) * st;
    checked((num / den).exp() / den)
}

/// `Σ H_{m,n}(x1,y1,z1) H_{m,n}(x2,y2,z2) s^m t^n/(m!n!)`
pub fn mehler_series(p: &MehlerParams, policy: TruncationPolicy) -> Result<SeriesResult> {
    p.check()?;
    let mut h1 = ScaledHermiteTable::new(p.x1, p.y1, p.z1);
    let mut h2 = ScaledHermiteTable::new(p.x2, p.y2, p.z2);
    Ok(adaptive_truncate(
        |d| {
            (0..=d)
                .map(|m| {
                    let n = d - m;
                    h1.get(m, n) * h2.get(m, n) * p.s.powu(m as u32) * p.t.powu(n as u32)
                })
                .sum()
        },
        policy,
    ))
}

// --- multilinear generating function ------------------------------------

/// Outer point `(x, y, z)` and `r` inner points with their `(s_j, t_j)`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultilinearParams {
    #[serde(deserialize_with = "de_complex")]
    pub x: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub y: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub z: ComplexValue,
    #[serde(deserialize_with = "de_complex_vec")]
    pub xs: Vec<ComplexValue>,
    #[serde(deserialize_with = "de_complex_vec")]
    pub ys: Vec<ComplexValue>,
    #[serde(deserialize_with = "de_complex_vec")]
    pub zs: Vec<ComplexValue>,
    #[serde(deserialize_with = "de_complex_vec")]
    pub ss: Vec<ComplexValue>,
    #[serde(deserialize_with = "de_complex_vec")]
    pub ts: Vec<ComplexValue>,
}

impl MultilinearParams {
    pub fn r(&self) -> usize {
        self.xs.len()
    }

    /// `(a, b, c) = (Σ s_j x_j, Σ t_j y_j, Σ s_j t_j z_j)`.
    pub fn aggregates(&self) -> (ComplexValue, ComplexValue, ComplexValue) {
        let mut a = cplx(0.0);
        let mut b = cplx(0.0);
        let mut c = cplx(0.0);
        for j in 0..self.r() {
            a += self.ss[j] * self.xs[j];
            b += self.ts[j] * self.ys[j];
            c += self.ss[j] * self.ts[j] * self.zs[j];
        }
        (a, b, c)
    }

    /// Whether `|c| < 1` also holds (the guard enforced is `|c z| < 1`).
    pub fn aggregate_below_one(&self) -> bool {
        self.aggregates().2.norm() < 1.0
    }

    fn check(&self) -> Result<()> {
        let r = self.r();
        for (name, v) in [
            ("ys", &self.ys),
            ("zs", &self.zs),
            ("ss", &self.ss),
            ("ts", &self.ts),
        ] {
            if v.len() != r {
                return Err(Error::Arity {
                    expected: r,
                    found: v.len(),
                })
                .map_err(|e| Error::InvalidArgument(format!("{name}: {e}")));
            }
        }
        if r == 0 {
            return Err(Error::InvalidArgument(
                "multilinear kernel needs r >= 1".into(),
            ));
        }
        ensure_all_finite(&[("x", self.x), ("y", self.y), ("z", self.z)])?;
        for v in [&self.xs, &self.ys, &self.zs, &self.ss, &self.ts] {
            for (j, c) in v.iter().enumerate() {
                ensure_finite(&format!("inner[{j}]"), *c)?;
            }
        }
        let (_, _, c) = self.aggregates();
        guard("|c z|", (c * self.z).norm())
    }
}

/// `exp((a x + b y + c x y + a b z)/(1 - c z)) / (1 - c z)`
pub fn multilinear_closed(p: &MultilinearParams) -> Result<ComplexValue> {
    p.check()?;
    let (a, b, c) = p.aggregates();
    let den = 1.0 - c * p.z;
    let num = a * p.x + b * p.y + c * p.x * p.y + a * b * p.z;
    checked((num / den).exp() / den)
}

/// The `r`-fold sum over `(m_j, n_j)` of
/// `Π_j H_{m_j,n_j}(x_j,y_j,z_j) s_j^{m_j} t_j^{n_j}/(m_j!n_j!) · H_{Σm,Σn}(x,y,z)`.
///
/// The inner products are accumulated as a running 2-D convolution over the
/// `r` factors, which visits each index tuple once per block of constant
/// total degree `Σ (m_j + n_j)`.
pub fn multilinear_series(p: &MultilinearParams, policy: TruncationPolicy) -> Result<SeriesResult> {
    p.check()?;
    let r = p.r();
    let mut tables: Vec<ScaledHermiteTable> = (0..r)
        .map(|j| ScaledHermiteTable::new(p.xs[j], p.ys[j], p.zs[j]))
        .collect();
    let mut s_pows: Vec<ScaledPowers> = p.ss.iter().map(|&s| ScaledPowers::new(s)).collect();
    let mut t_pows: Vec<ScaledPowers> = p.ts.iter().map(|&t| ScaledPowers::new(t)).collect();
    let mut outer = ScaledHermiteTable::new(p.x, p.y, p.z);
    // factor[j][m][n] = H_j s_j^m t_j^n / (m! n!); conv[j] is the convolution of factors 0..=j
    let mut factor: Vec<Vec<Vec<ComplexValue>>> = vec![Vec::new(); r];
    let mut conv: Vec<Vec<Vec<ComplexValue>>> = vec![Vec::new(); r];

    Ok(adaptive_truncate(
        |d| {
            for j in 0..r {
                factor[j].push(Vec::new());
                conv[j].push(Vec::new());
            }
            for (j, rows) in factor.iter_mut().enumerate() {
                for (m, row) in rows.iter_mut().enumerate() {
                    let n = d - m;
                    debug_assert_eq!(row.len(), n);
                    row.push(tables[j].get(m, n) * s_pows[j].get(m) * t_pows[j].get(n));
                }
            }
            for m in 0..=d {
                let n = d - m;
                conv[0][m].push(factor[0][m][n]);
                for j in 1..r {
                    let mut acc = cplx(0.0);
                    for a in 0..=m {
                        for b in 0..=n {
                            acc += conv[j - 1][a][b] * factor[j][m - a][n - b];
                        }
                    }
                    conv[j][m].push(acc);
                }
            }
            (0..=d)
                .map(|k| {
                    let l = d - k;
                    let norm = (0.5 * (ln_factorial(k) + ln_factorial(l))).exp();
                    conv[r - 1][k][l] * outer.get(k, l) * norm
                })
                .sum()
        },
        policy,
    ))
}

// --- mixed real/complex kernels -----------------------------------------

/// Point for the mixed kernel `Σ (-1)^{m+n} H_{m,n}(x,y,z) H_m(u) H_n(v) s^m t^n/(m!n!)`.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedParams {
    #[serde(deserialize_with = "de_complex")]
    pub x: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub y: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub z: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub u: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub v: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub s: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub t: ComplexValue,
}

impl MixedParams {
    fn check(&self) -> Result<()> {
        ensure_all_finite(&[
            ("x", self.x),
            ("y", self.y),
            ("z", self.z),
            ("u", self.u),
            ("v", self.v),
            ("s", self.s),
            ("t", self.t),
        ])?;
        guard("|2 s t z|", (2.0 * self.s * self.t * self.z).norm())
    }

    /// `(1 - 4s²t²z², exponent, principal √(1 - 4s²t²z²))`
    fn pieces(&self) -> (ComplexValue, ComplexValue, ComplexValue) {
        let stz = self.s * self.t * self.z;
        let den = 1.0 - 4.0 * stz * stz;
        let a = self.s * self.x + self.u;
        let b = self.t * self.y + self.v;
        let expo = self.u * self.u + self.v * self.v + (4.0 * stz * a * b - a * a - b * b) / den;
        (den, expo, den.sqrt())
    }
}

/// `exp(u²+v²)/√(1-4s²t²z²) · exp((4stz(sx+u)(ty+v) - (sx+u)² - (ty+v)²)/(1-4s²t²z²))`
pub fn mixed_kernel_closed(p: &MixedParams) -> Result<ComplexValue> {
    p.check()?;
    let (_, expo, root) = p.pieces();
    checked(expo.exp() / root)
}

pub fn mixed_kernel_series(p: &MixedParams, policy: TruncationPolicy) -> Result<SeriesResult> {
    mixed_kernel_shifted_series(0, p, policy)
}

/// Shifted mixed kernel with `H_{m+k}(u)` in place of `H_m(u)`:
/// `exp(u²+v²) H_k((u + sx - 2stz(v+ty))/√D) / D^{(k+1)/2} · exp(…)`,
/// `D = 1 - 4s²t²z²`, principal branch.
pub fn mixed_kernel_shifted_closed(k: u32, p: &MixedParams) -> Result<ComplexValue> {
    p.check()?;
    let (_, expo, root) = p.pieces();
    let arg = (p.u + p.s * p.x - 2.0 * p.s * p.t * p.z * (p.v + p.t * p.y)) / root;
    let hk = classical_hermite_eval(k, arg)?;
    checked(expo.exp() * hk / root.powu(k + 1))
}

pub fn mixed_kernel_shifted_series(
    k: u32,
    p: &MixedParams,
    policy: TruncationPolicy,
) -> Result<SeriesResult> {
    p.check()?;
    let k = k as usize;
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut table = ScaledHermiteTable::new(p.x, p.y, p.z);
    let mut hu = ScaledClassicalHermite::new(p.u);
    let mut hv = ScaledClassicalHermite::new(p.v);
    let sw = -sqrt2 * p.s;
    let tw = -sqrt2 * p.t;
    let shift_norm = |m: usize| -> f64 {
        // √(2^k (m+k)!/m!)
        let ln = k as f64 * std::f64::consts::LN_2
            + ((m + 1)..=(m + k)).map(|i| (i as f64).ln()).sum::<f64>();
        (0.5 * ln).exp()
    };
    Ok(adaptive_truncate(
        |d| {
            (0..=d)
                .map(|m| {
                    let n = d - m;
                    table.get(m, n)
                        * hu.get(m + k)
                        * hv.get(n)
                        * sw.powu(m as u32)
                        * tw.powu(n as u32)
                        * shift_norm(m)
                })
                .sum()
        },
        policy,
    ))
}

// --- classical Mehler and Weisner ----------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalParams {
    #[serde(deserialize_with = "de_complex")]
    pub u: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub v: ComplexValue,
    #[serde(deserialize_with = "de_complex")]
    pub t: ComplexValue,
}

impl ClassicalParams {
    fn check(&self) -> Result<()> {
        ensure_all_finite(&[("u", self.u), ("v", self.v), ("t", self.t)])?;
        guard("|2 t|", (2.0 * self.t).norm())
    }

    fn exponent(&self) -> (ComplexValue, ComplexValue) {
        let (u, v, t) = (self.u, self.v, self.t);
        let den = 1.0 - 4.0 * t * t;
        ((4.0 * t * u * v - 4.0 * (u * u + v * v) * t * t) / den, den)
    }
}

/// `exp((4tuv - 4(u²+v²)t²)/(1-4t²)) / √(1-4t²)`
pub fn classical_mehler_closed(p: &ClassicalParams) -> Result<ComplexValue> {
    weisner_closed(0, p)
}

/// `H_k((u - 2tv)/√(1-4t²)) exp(…) / (1-4t²)^{(k+1)/2}`
pub fn weisner_closed(k: u32, p: &ClassicalParams) -> Result<ComplexValue> {
    p.check()?;
    let (expo, den) = p.exponent();
    let root = den.sqrt();
    let hk = classical_hermite_eval(k, (p.u - 2.0 * p.t * p.v) / root)?;
    checked(expo.exp() * hk / root.powu(k + 1))
}

/// `Σ H_n(u) H_n(v) t^n/n!`
pub fn classical_mehler_series(
    p: &ClassicalParams,
    policy: TruncationPolicy,
) -> Result<SeriesResult> {
    weisner_series(0, p, policy)
}

/// `Σ H_{n+k}(u) H_n(v) t^n/n!`
pub fn weisner_series(
    k: u32,
    p: &ClassicalParams,
    policy: TruncationPolicy,
) -> Result<SeriesResult> {
    p.check()?;
    let k = k as usize;
    let mut hu = ScaledClassicalHermite::new(p.u);
    let mut hv = ScaledClassicalHermite::new(p.v);
    let w = 2.0 * p.t;
    Ok(adaptive_truncate(
        |n| {
            let ln = k as f64 * std::f64::consts::LN_2
                + ((n + 1)..=(n + k)).map(|i| (i as f64).ln()).sum::<f64>();
            hu.get(n + k) * hv.get(n) * w.powu(n as u32) * (0.5 * ln).exp()
        },
        policy,
    ))
}

// --- dispatch -----------------------------------------------------------

/// Named kernel identities, as exposed on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    Genfn,
    Mehler,
    Multilinear,
    Mixed,
    MixedShifted,
    ClassicalMehler,
    Weisner,
}

impl KernelKind {
    pub const ALL: [KernelKind; 7] = [
        KernelKind::Genfn,
        KernelKind::Mehler,
        KernelKind::Multilinear,
        KernelKind::Mixed,
        KernelKind::MixedShifted,
        KernelKind::ClassicalMehler,
        KernelKind::Weisner,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Genfn => "genfn",
            KernelKind::Mehler => "mehler",
            KernelKind::Multilinear => "multilinear",
            KernelKind::Mixed => "mixed",
            KernelKind::MixedShifted => "mixed-shifted",
            KernelKind::ClassicalMehler => "classical-mehler",
            KernelKind::Weisner => "weisner",
        }
    }
}

impl std::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown kernel {s:?}")))
    }
}

/// Closed form against truncated series at one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelComparison {
    pub kernel: String,
    #[serde(serialize_with = "serialize_complex")]
    pub closed: ComplexValue,
    #[serde(flatten)]
    pub series: SeriesResult,
    pub abs_error: f64,
    pub tol: f64,
    pub within_tol: bool,
    /// Multilinear kernel only: whether `|c| < 1` holds besides `|c z| < 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aggregate_below_one: Option<bool>,
}

impl KernelComparison {
    pub fn new(kernel: &str, closed: ComplexValue, series: SeriesResult, tol: f64) -> Self {
        let abs_error = (closed - series.value).norm();
        KernelComparison {
            kernel: kernel.to_string(),
            closed,
            series,
            abs_error,
            tol,
            within_tol: series.converged && abs_error <= tol * closed.norm().max(1.0),
            aggregate_below_one: None,
        }
    }

    pub fn ok(&self) -> bool {
        self.within_tol
    }
}

#[derive(Deserialize)]
struct WithShift<P> {
    k: u32,
    #[serde(flatten)]
    rest: P,
}

fn parse<P: for<'de> Deserialize<'de>>(v: &Value) -> Result<P> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses a parameter object for `kind` and compares closed form and series.
/// The series is summed at `policy.tol * SERIES_TOL_FACTOR`; agreement is
/// judged at `policy.tol` relative to `max(1, |closed|)`.
pub fn compare_kernel(
    kind: KernelKind,
    params: &Value,
    policy: TruncationPolicy,
) -> Result<KernelComparison> {
    let inner = policy.tightened();
    let mut aggregate_below_one = None;
    let (closed, series) = match kind {
        KernelKind::Genfn => {
            let p: GenfnParams = parse(params)?;
            (genfn_closed(&p)?, genfn_series(&p, inner)?)
        }
        KernelKind::Mehler => {
            let p: MehlerParams = parse(params)?;
            (mehler_closed(&p)?, mehler_series(&p, inner)?)
        }
        KernelKind::Multilinear => {
            let p: MultilinearParams = parse(params)?;
            aggregate_below_one = Some(p.aggregate_below_one());
            (multilinear_closed(&p)?, multilinear_series(&p, inner)?)
        }
        KernelKind::Mixed => {
            let p: MixedParams = parse(params)?;
            (mixed_kernel_closed(&p)?, mixed_kernel_series(&p, inner)?)
        }
        KernelKind::MixedShifted => {
            let p: WithShift<MixedParams> = parse(params)?;
            (
                mixed_kernel_shifted_closed(p.k, &p.rest)?,
                mixed_kernel_shifted_series(p.k, &p.rest, inner)?,
            )
        }
        KernelKind::ClassicalMehler => {
            let p: ClassicalParams = parse(params)?;
            (
                classical_mehler_closed(&p)?,
                classical_mehler_series(&p, inner)?,
            )
        }
        KernelKind::Weisner => {
            let p: WithShift<ClassicalParams> = parse(params)?;
            (
                weisner_closed(p.k, &p.rest)?,
                weisner_series(p.k, &p.rest, inner)?,
            )
        }
    };
    Ok(KernelComparison {
        aggregate_below_one,
        ..KernelComparison::new(kind.name(), closed, series, policy.tol)
    })
}

// --- complex input parsing ----------------------------------------------

/// Parses `"1.5"`, `"-2i"`, `"0.3-1e-2i"` and similar `a+bi` strings.
pub fn parse_complex(s: &str) -> Result<ComplexValue> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let cleaned = cleaned.replace('j', "i");
    let v: ComplexValue = cleaned
        .parse()
        .map_err(|e| Error::Parse(format!("complex {s:?}: {e:?}")))?;
    ensure_finite(s, v)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ComplexRepr {
    Real(f64),
    Text(String),
    Parts {
        re: f64,
        #[serde(default)]
        im: f64,
    },
}

impl ComplexRepr {
    fn into_value(self) -> Result<ComplexValue> {
        match self {
            ComplexRepr::Real(r) => ensure_finite("value", cplx(r)),
            ComplexRepr::Text(s) => parse_complex(&s),
            ComplexRepr::Parts { re, im } => ensure_finite("value", ComplexValue::new(re, im)),
        }
    }
}

/// Accepts a JSON number, an `"a+bi"` string or `{"re": …, "im": …}`.
pub fn de_complex<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ComplexValue, D::Error> {
    ComplexRepr::deserialize(d)?
        .into_value()
        .map_err(serde::de::Error::custom)
}

pub fn de_complex_vec<'de, D: Deserializer<'de>>(
    d: D,
) -> std::result::Result<Vec<ComplexValue>, D::Error> {
    Vec::<ComplexRepr>::deserialize(d)?
        .into_iter()
        .map(|c| c.into_value().map_err(serde::de::Error::custom))
        .collect()
}

/// Parses a complex value from JSON in any of the accepted forms.
pub fn complex_from_json(v: &Value) -> Result<ComplexValue> {
    serde_json::from_value::<ComplexRepr>(v.clone())
        .map_err(|e| Error::Parse(e.to_string()))?
        .into_value()
}
