//! Python bindings: the `chermite` extension module.

use pyo3::create_exception;
use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;

use chermite_core::Error;

create_exception!(
    chermite,
    DomainError,
    PyValueError,
    "Kernel parameters outside the convergence domain."
);
create_exception!(
    chermite,
    NotExpandableError,
    PyValueError,
    "Tensor violates the coefficient recurrence."
);

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::OutsideConvergenceDomain { .. } => DomainError::new_err(e.to_string()),
        Error::NotHermiteExpandable { .. } => NotExpandableError::new_err(e.to_string()),
        Error::EvalOverflow => PyOverflowError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pymodule]
pub mod chermite {
    use num_complex::Complex64;
    use num_rational::BigRational;
    use pyo3::exceptions::PyValueError;
    use pyo3::prelude::*;
    use pyo3::types::PyString;
    use serde_json::Value;

    use chermite_core::expansion::{self, AnyTensor, CoeffTensor, HermiteExpansion, TensorCoeff};
    use chermite_core::hermite::{self, HermiteIndex};
    use chermite_core::identities::sweep::{self, SweepOptions};
    use chermite_core::kernels::{self, KernelKind, TruncationPolicy};
    use chermite_core::poly::parse_rational;
    use chermite_core::SparsePoly;

    use super::to_py_err;

    #[pymodule_export]
    use super::{DomainError, NotExpandableError};

    fn json_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
        py.import("json")?.call_method1("loads", (v.to_string(),))
    }

    /// Accepts a JSON string or any object `json.dumps` can serialize.
    fn py_to_json(obj: &Bound<'_, PyAny>) -> PyResult<Value> {
        let text: String = if obj.is_instance_of::<PyString>() {
            obj.extract()?
        } else {
            obj.py()
                .import("json")?
                .call_method1("dumps", (obj,))?
                .extract()?
        };
        serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Sparse polynomial with exact rational coefficients.
    #[pyclass(name = "Poly", frozen, eq, skip_from_py_object)]
    #[derive(Clone, PartialEq)]
    pub struct Poly {
        inner: SparsePoly,
    }

    #[pymethods]
    impl Poly {
        /// Builds a polynomial from `[(exponents, "p/q"), ...]`.
        #[new]
        #[pyo3(signature = (arity, terms = Vec::new()))]
        fn new(arity: usize, terms: Vec<(Vec<u32>, String)>) -> PyResult<Self> {
            let parsed = terms
                .into_iter()
                .map(|(e, c)| Ok((e, parse_rational(&c)?)))
                .collect::<chermite_core::Result<Vec<_>>>()
                .map_err(to_py_err)?;
            let inner = SparsePoly::from_terms(arity, parsed).map_err(to_py_err)?;
            Ok(Poly { inner })
        }

        #[staticmethod]
        fn var(arity: usize, index: usize) -> PyResult<Self> {
            SparsePoly::var(arity, index)
                .map(|inner| Poly { inner })
                .map_err(to_py_err)
        }

        #[staticmethod]
        fn from_json(arity: usize, text: &str) -> PyResult<Self> {
            let v: Value =
                serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
            SparsePoly::from_json(arity, &v)
                .map(|inner| Poly { inner })
                .map_err(to_py_err)
        }

        #[getter]
        fn arity(&self) -> usize {
            self.inner.arity()
        }

        fn __len__(&self) -> usize {
            self.inner.len()
        }

        /// Total degree, or `None` for the zero polynomial.
        fn total_degree(&self) -> Option<u32> {
            self.inner.total_degree()
        }

        /// Coefficient of one monomial as a `"p/q"` string.
        fn coeff(&self, exps: Vec<u32>) -> String {
            self.inner.coeff(&exps).to_string()
        }

        fn terms(&self) -> Vec<(Vec<u32>, String)> {
            self.inner
                .terms()
                .map(|(e, c)| (e.to_vec(), c.to_string()))
                .collect()
        }

        fn __add__(&self, other: &Poly) -> PyResult<Poly> {
            self.inner
                .try_add(&other.inner)
                .map(|inner| Poly { inner })
                .map_err(to_py_err)
        }

        fn __sub__(&self, other: &Poly) -> PyResult<Poly> {
            self.inner
                .try_sub(&other.inner)
                .map(|inner| Poly { inner })
                .map_err(to_py_err)
        }

        fn __mul__(&self, other: &Poly) -> PyResult<Poly> {
            self.inner
                .try_mul(&other.inner)
                .map(|inner| Poly { inner })
                .map_err(to_py_err)
        }

        fn __neg__(&self) -> Poly {
            Poly {
                inner: -&self.inner,
            }
        }

        fn __pow__(&self, exp: u32, _modulo: Option<Py<PyAny>>) -> Poly {
            Poly {
                inner: self.inner.pow(exp),
            }
        }

        fn scale(&self, factor: &str) -> PyResult<Poly> {
            let f = parse_rational(factor).map_err(to_py_err)?;
            Ok(Poly {
                inner: self.inner.scale(&f),
            })
        }

        fn diff(&self, var: usize) -> PyResult<Poly> {
            self.inner
                .diff(var)
                .map(|inner| Poly { inner })
                .map_err(to_py_err)
        }

        fn eval(&self, point: Vec<Complex64>) -> PyResult<Complex64> {
            self.inner.eval(&point).map_err(to_py_err)
        }

        fn to_json(&self) -> String {
            self.inner.to_json().to_string()
        }

        fn __str__(&self) -> String {
            self.inner.to_string()
        }

        fn __repr__(&self) -> String {
            format!("Poly({}, {})", self.inner.arity(), self.inner)
        }
    }

    /// `H_{m,n}(x, y, z)` as an exact polynomial in `(x, y, z)`.
    #[pyfunction]
    fn hermite_poly(m: u32, n: u32) -> Poly {
        Poly {
            inner: hermite::hermite_poly(HermiteIndex::new(m, n)),
        }
    }

    #[pyfunction]
    fn hermite_eval(
        m: u32,
        n: u32,
        x: Complex64,
        y: Complex64,
        z: Complex64,
    ) -> PyResult<Complex64> {
        hermite::hermite_eval(HermiteIndex::new(m, n), x, y, z).map_err(to_py_err)
    }

    /// Integer coefficients of the physicists' Hermite polynomial, lowest degree first.
    #[pyfunction]
    fn classical_hermite(n: u32) -> Vec<num_bigint::BigInt> {
        hermite::classical_hermite_coeffs(n)
    }

    #[pyfunction]
    fn classical_hermite_eval(n: u32, u: Complex64) -> PyResult<Complex64> {
        hermite::classical_hermite_eval(n, u).map_err(to_py_err)
    }

    /// `H_{m,n}` evaluated through the scaling relation with the bivariate family.
    #[pyfunction]
    fn scaling_map(
        m: u32,
        n: u32,
        x: Complex64,
        y: Complex64,
        z: Complex64,
    ) -> PyResult<Complex64> {
        hermite::scaling_map(HermiteIndex::new(m, n), x, y, z).map_err(to_py_err)
    }

    /// `exp(c ∂²/∂x∂y)` applied to a polynomial in `(x, y)` or `(x, y, z)`.
    /// Without `c` the formal variable `z` takes its place.
    #[pyfunction]
    #[pyo3(signature = (poly, c = None))]
    fn heat_operator_apply(poly: &Poly, c: Option<&str>) -> PyResult<Poly> {
        let out = match c {
            Some(c) => {
                hermite::heat_operator_apply(&poly.inner, &parse_rational(c).map_err(to_py_err)?)
            }
            None => hermite::heat_operator_formal(&poly.inner),
        };
        out.map(|inner| Poly { inner }).map_err(to_py_err)
    }

    /// `x^m y^n` as `[(coefficient in z, (j, k)), ...]` over `H_{j,k}`.
    #[pyfunction]
    fn monomial_in_hermite(m: u32, n: u32) -> Vec<(Poly, (u32, u32))> {
        hermite::monomial_in_hermite(m, n)
            .into_iter()
            .map(|(c, idx)| (Poly { inner: c }, (idx.m, idx.n)))
            .collect()
    }

    /// Runs an identity sweep and returns its reports as dictionaries.
    #[pyfunction]
    #[pyo3(signature = (identity, max_degree = None, k = None, samples = None, seed = 0))]
    fn verify<'py>(
        py: Python<'py>,
        identity: &str,
        max_degree: Option<u32>,
        k: Option<usize>,
        samples: Option<usize>,
        seed: u64,
    ) -> PyResult<Vec<Bound<'py, PyAny>>> {
        let opts = SweepOptions {
            max_degree,
            k,
            samples,
            seed,
        };
        let reports = py
            .detach(|| sweep::by_name(identity, &opts))
            .map_err(to_py_err)?;
        reports
            .iter()
            .map(|r| json_to_py(py, &r.to_json()))
            .collect()
    }

    /// Closed form against truncated series; `params` is a dict or JSON string.
    #[pyfunction]
    #[pyo3(signature = (name, params, tol = kernels::DEFAULT_TOL, max_order = kernels::DEFAULT_MAX_ORDER))]
    fn kernel<'py>(
        py: Python<'py>,
        name: &str,
        params: &Bound<'py, PyAny>,
        tol: f64,
        max_order: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let kind: KernelKind = name.parse().map_err(to_py_err)?;
        let policy = TruncationPolicy::new(tol, max_order).map_err(to_py_err)?;
        let params = py_to_json(params)?;
        let cmp = py
            .detach(|| kernels::compare_kernel(kind, &params, policy))
            .map_err(to_py_err)?;
        json_to_py(
            py,
            &serde_json::to_value(&cmp).expect("comparison serializes"),
        )
    }

    fn expansion_json<T: TensorCoeff>(e: &HermiteExpansion<T>) -> Value {
        e.to_json()
    }

    fn check_typed<T: TensorCoeff>(t: &CoeffTensor<T>) -> Value {
        expansion::pde_check(t).to_json()
    }

    /// Verification report for the coefficient recurrence of a tensor.
    #[pyfunction]
    fn pde_check<'py>(py: Python<'py>, tensor: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        let report = match AnyTensor::from_json(&py_to_json(tensor)?).map_err(to_py_err)? {
            AnyTensor::Exact(t) => check_typed(&t),
            AnyTensor::Float(t) => check_typed(&t),
        };
        json_to_py(py, &report)
    }

    /// Hermite expansion of a coefficient tensor given as a dict or JSON string.
    #[pyfunction]
    fn expand<'py>(py: Python<'py>, tensor: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        let out = match AnyTensor::from_json(&py_to_json(tensor)?).map_err(to_py_err)? {
            AnyTensor::Exact(t) => {
                expansion_json(&expansion::hermite_expand::<BigRational>(&t).map_err(to_py_err)?)
            }
            AnyTensor::Float(t) => {
                expansion_json(&expansion::hermite_expand::<Complex64>(&t).map_err(to_py_err)?)
            }
        };
        json_to_py(py, &out)
    }
}
