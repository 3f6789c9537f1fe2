//! Python bindings for `ntt_kernel`.
//!
//! Build a loadable module with `PYO3_BUILD_EXTENSION_MODULE=1 cargo build
//! --release -p ntt-kernel-py` and copy `libntt_kernel_py.so` to
//! `ntt_kernel_py.so` on the Python path.

use ntt_kernel::analysis::{self, CaseReport, SearchSpace};
use ntt_kernel::bench::{run_bench, BenchConfig};
use ntt_kernel::transform::{self, Order, Spectrum};
use ntt_kernel::{crt, oracle, params, Polynomial, ShiftSemantics, TransformKind};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: ntt_kernel::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn semantics(name: &str) -> PyResult<ShiftSemantics> {
    match name {
        "signed" | "signed-floor" => Ok(ShiftSemantics::SignedFloor),
        "arith" | "arithmetic-floor" => Ok(ShiftSemantics::ArithmeticFloor),
        other => Err(PyValueError::new_err(format!("unknown shift semantics `{other}`"))),
    }
}

fn kind(name: &str) -> PyResult<TransformKind> {
    name.parse().map_err(err)
}

fn report_dict<'py>(py: Python<'py>, r: &CaseReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("w", r.w)?;
    d.set_item("t", r.t)?;
    d.set_item("a", r.a)?;
    d.set_item("h", r.h)?;
    d.set_item("k", r.k)?;
    d.set_item("alg_output", r.alg_output)?;
    d.set_item("semantics", r.semantics.name())?;
    d.set_item(
        "verdict",
        if r.verdict == analysis::Verdict::Match {
            "match"
        } else {
            "mismatch"
        },
    )?;
    Ok(d)
}

/// Modulus `p`, word size `n` and the precomputed reduction constants.
#[pyclass(frozen, name = "ReductionContext", module = "ntt_kernel_py")]
pub struct PyReductionContext {
    inner: ntt_kernel::ReductionContext,
}

#[pymethods]
impl PyReductionContext {
    #[new]
    #[pyo3(signature = (p, n, alpha = 0, ell = 0))]
    fn new(p: u64, n: u32, alpha: u32, ell: u32) -> PyResult<Self> {
        let inner = ntt_kernel::ReductionContext::new(p, n)
            .map_err(err)?
            .with_alpha(alpha)
            .with_ell(ell);
        Ok(Self { inner })
    }

    #[getter]
    fn p(&self) -> u64 {
        self.inner.p()
    }
    #[getter]
    fn n(&self) -> u32 {
        self.inner.word_bits()
    }
    #[getter]
    fn alpha(&self) -> u32 {
        self.inner.alpha()
    }
    #[getter]
    fn ell(&self) -> u32 {
        self.inner.ell()
    }
    #[getter]
    fn mu(&self) -> u64 {
        self.inner.mu()
    }

    fn mont_redc(&self, t: u64) -> PyResult<u64> {
        self.inner.mont_redc(t).map_err(err)
    }

    fn signed_mont_redc(&self, a: i64) -> PyResult<i64> {
        self.inner.signed_mont_redc(a).map_err(err)
    }

    fn plantard_redc(&self, w: u64, t: u64) -> PyResult<u64> {
        self.inner.plantard_redc(w, t).map_err(err)
    }

    /// The published signed Plantard formula; `semantics` is "signed" or "arith".
    #[pyo3(signature = (w, t, semantics = "arith"))]
    fn signed_plantard_redc(&self, w: i64, t: i64, semantics: &str) -> PyResult<i64> {
        self.inner
            .signed_plantard_redc(w, t, self::semantics(semantics)?)
            .map_err(err)
    }

    fn modified_plantard_mul(&self, w: u64, t: u64) -> PyResult<u64> {
        self.inner.modified_plantard_mul(w, t).map_err(err)
    }

    fn to_plantard_domain(&self, w: u64) -> PyResult<u64> {
        self.inner.to_plantard_domain(w).map_err(err)
    }

    fn to_montgomery_domain(&self, w: u64) -> PyResult<u64> {
        self.inner.to_montgomery_domain(w).map_err(err)
    }

    fn crt_predicted_value(&self, w: i64, t: i64) -> PyResult<i64> {
        analysis::crt_predicted_value(w, t, &self.inner).map_err(err)
    }

    #[pyo3(signature = (w, t, semantics = "arith"))]
    fn verify_alg6_case<'py>(&self, py: Python<'py>, w: i64, t: i64, semantics: &str) -> PyResult<Bound<'py, PyDict>> {
        let r = analysis::verify_alg6_case(w, t, &self.inner, self::semantics(semantics)?).map_err(err)?;
        report_dict(py, &r)
    }

    /// Mismatching cases of the signed Plantard formula, exhaustive unless
    /// `random` gives a sample count.
    #[pyo3(signature = (semantics = "arith", budget = 1 << 24, random = None, seed = 0))]
    fn search_counterexamples<'py>(
        &self,
        py: Python<'py>,
        semantics: &str,
        budget: u64,
        random: Option<u64>,
        seed: u64,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let space = match random {
            Some(count) => SearchSpace::Random { count, seed },
            None => SearchSpace::Exhaustive,
        };
        let found =
            analysis::search_counterexamples(&self.inner, self::semantics(semantics)?, &space, budget).map_err(err)?;
        found.iter().map(|r| report_dict(py, r)).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "ReductionContext(p={}, n={}, alpha={}, ell={})",
            self.inner.p(),
            self.inner.word_bits(),
            self.inner.alpha(),
            self.inner.ell()
        )
    }
}

/// Validated transform parameters with twiddle tables for each kind.
#[pyclass(frozen, name = "NttParams", module = "ntt_kernel_py")]
pub struct PyNttParams {
    inner: ntt_kernel::NttParams,
}

#[pymethods]
impl PyNttParams {
    #[getter]
    fn p(&self) -> u64 {
        self.inner.p()
    }
    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }
    #[getter]
    fn n(&self) -> u32 {
        self.inner.word_bits()
    }
    #[getter]
    fn ell(&self) -> u32 {
        self.inner.ell()
    }
    #[getter]
    fn omega(&self) -> u64 {
        self.inner.omega()
    }
    #[getter]
    fn kinds(&self) -> Vec<&'static str> {
        self.inner.kinds().iter().map(|k| k.name()).collect()
    }

    /// Forward transform; returns `(values, bound)` with values in
    /// bit-reversed order, each below `bound`.
    #[pyo3(signature = (coeffs, kind = "improved"))]
    fn ntt(&self, coeffs: Vec<u64>, kind: &str) -> PyResult<(Vec<u64>, u64)> {
        let f = Polynomial::new(coeffs).map_err(err)?;
        let s = transform::ntt_forward(&f, &self.inner, self::kind(kind)?).map_err(err)?;
        Ok((s.values().to_vec(), s.bound()))
    }

    /// Inverse of [`ntt`]; accepts lazy values and returns canonical coefficients.
    #[pyo3(signature = (values, kind = "improved"))]
    fn intt(&self, values: Vec<u64>, kind: &str) -> PyResult<Vec<u64>> {
        let s = Spectrum::new(values, Order::BitReversed);
        let f = transform::intt_inverse(&s, &self.inner, self::kind(kind)?).map_err(err)?;
        Ok(f.into_coeffs())
    }

    #[pyo3(signature = (a, b, kind = "improved"))]
    fn convolve(&self, a: Vec<u64>, b: Vec<u64>, kind: &str) -> PyResult<Vec<u64>> {
        let a = Polynomial::new(a).map_err(err)?;
        let b = Polynomial::new(b).map_err(err)?;
        let c = transform::cyclic_convolution_with(&a, &b, &self.inner, self::kind(kind)?).map_err(err)?;
        Ok(c.into_coeffs())
    }

    fn __repr__(&self) -> String {
        format!(
            "NttParams(p={}, size={}, n={}, kinds={:?})",
            self.inner.p(),
            self.inner.size(),
            self.inner.word_bits(),
            self.kinds()
        )
    }
}

#[pyfunction]
fn preset(name: &str) -> PyResult<PyNttParams> {
    Ok(PyNttParams {
        inner: params::preset(name).map_err(err)?,
    })
}

#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    params::PRESET_NAMES.to_vec()
}

#[pyfunction]
#[pyo3(signature = (p, size, n = 32, kinds = None))]
fn build_params(p: u64, size: usize, n: u32, kinds: Option<Vec<String>>) -> PyResult<PyNttParams> {
    let kinds = match kinds {
        Some(names) => names.iter().map(|k| kind(k)).collect::<PyResult<Vec<_>>>()?,
        None => TransformKind::ALL.to_vec(),
    };
    Ok(PyNttParams {
        inner: params::build_params(p, size, n, &kinds).map_err(err)?,
    })
}

#[pyfunction]
fn naive_dft(f: Vec<u64>, omega: u64, p: u64) -> Vec<u64> {
    oracle::naive_dft(&f, omega, p)
}

#[pyfunction]
fn schoolbook_cyclic_convolution(a: Vec<u64>, b: Vec<u64>, p: u64) -> PyResult<Vec<u64>> {
    oracle::schoolbook_cyclic_convolution(&a, &b, p).map_err(err)
}

/// `(p_inv, r_inv)` with `p_inv p + r_inv R = 1 + p R`.
#[pyfunction]
fn qin_identity(p: u128, r: u128) -> PyResult<(u128, u128)> {
    let w = crt::qin_identity(p, r).map_err(err)?;
    Ok((w.p_inv, w.r_inv))
}

#[pyfunction]
fn crt_recombine(r_p: u128, r_r: u128, p: u128, r: u128) -> PyResult<u128> {
    let pair = crt::ModulusPair::new(p, r).map_err(err)?;
    crt::crt_recombine(r_p, r_r, &pair).map_err(err)
}

/// Runs the forward-transform benchmark and returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (preset, iters = 1000, seed = 1))]
fn bench_json(py: Python<'_>, preset: String, iters: u64, seed: u64) -> PyResult<String> {
    let report = py
        .detach(|| run_bench(&BenchConfig::new(preset, iters, seed)))
        .map_err(err)?;
    serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn ntt_kernel_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyReductionContext>()?;
    m.add_class::<PyNttParams>()?;
    m.add_function(wrap_pyfunction!(preset, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(build_params, m)?)?;
    m.add_function(wrap_pyfunction!(naive_dft, m)?)?;
    m.add_function(wrap_pyfunction!(schoolbook_cyclic_convolution, m)?)?;
    m.add_function(wrap_pyfunction!(qin_identity, m)?)?;
    m.add_function(wrap_pyfunction!(crt_recombine, m)?)?;
    m.add_function(wrap_pyfunction!(bench_json, m)?)?;
    Ok(())
}
