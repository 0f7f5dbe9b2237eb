//! Python bindings for the main types and operations: channel
//! parameterization, the output density and information-density sampler,
//! the four rate bounds, and full sweeps.

// fires inside pyo3-expanded glue
#![allow(clippy::useless_conversion)]

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use rician_fbl::bounds::{self, BoundKind, SampleBatch};
use rician_fbl::cli::fmt_sig9;
use rician_fbl::density;
use rician_fbl::engine::{self, RunOptions, SweepSpec};
use rician_fbl::model;
use rician_fbl::numerics::{self, QuadratureSpec};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// Channel parameters with derived Rician moments.
#[pyclass(name = "ChannelParams")]
#[derive(Clone)]
struct PyChannelParams {
    inner: model::ChannelParams,
}

#[pymethods]
impl PyChannelParams {
    #[new]
    fn new(kappa: f64, rho_db: f64, n_total: usize, ell: usize) -> PyResult<Self> {
        Ok(PyChannelParams {
            inner: model::derive_params(kappa, rho_db, n_total, ell).map_err(value_err)?,
        })
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho
    }

    #[getter]
    fn n_c(&self) -> usize {
        self.inner.n_c
    }

    #[getter]
    fn ell(&self) -> usize {
        self.inner.ell
    }

    #[getter]
    fn mu_h(&self) -> f64 {
        self.inner.mu_h
    }

    #[getter]
    fn sigma_h2(&self) -> f64 {
        self.inner.sigma_h2
    }

    fn __repr__(&self) -> String {
        format!(
            "ChannelParams(kappa={}, rho={}, n_c={}, ell={})",
            self.inner.kappa, self.inner.rho, self.inner.n_c, self.inner.ell
        )
    }
}

/// log I_nu(x), never overflowing.
#[pyfunction]
fn log_bessel_i(order: u32, x: f64) -> PyResult<f64> {
    numerics::log_bessel_i(order, x).map_err(value_err)
}

/// Inverse Gaussian Q function.
#[pyfunction]
fn q_inv(epsilon: f64) -> PyResult<f64> {
    numerics::q_inv(epsilon).map_err(value_err)
}

/// log G(p, a, b, nu), the half-line Bessel integral of the output density.
#[pyfunction]
#[pyo3(signature = (p, a, b, nu, rel_tol=1e-9))]
fn log_g(p: f64, a: f64, b: f64, nu: u32, rel_tol: f64) -> PyResult<f64> {
    let args = density::GIntegralArgs::new(p, a, b, nu).map_err(value_err)?;
    let spec = QuadratureSpec {
        rel_tol,
        ..Default::default()
    };
    Ok(density::log_g(&args, &spec).map_err(runtime_err)?.ln())
}

/// log of the shell-code-induced output pdf at squared norm `y_norm2`.
#[pyfunction]
fn log_output_pdf(y_norm2: f64, params: &PyChannelParams) -> PyResult<f64> {
    Ok(
        density::log_output_pdf(y_norm2, &params.inner, &QuadratureSpec::default())
            .map_err(runtime_err)?
            .ln(),
    )
}

/// One information-density draw from an explicit noise vector of
/// (re, im) pairs.
#[pyfunction]
fn sample_info_density(params: &PyChannelParams, noise: Vec<(f64, f64)>) -> PyResult<f64> {
    let noise: Vec<Complex64> = noise
        .into_iter()
        .map(|(re, im)| Complex64::new(re, im))
        .collect();
    Ok(
        density::sample_info_density(&params.inner, &noise, &QuadratureSpec::default())
            .map_err(runtime_err)?
            .value,
    )
}

/// Draws a batch of codeword information-density sums; returns the sums.
#[pyfunction]
#[pyo3(signature = (params, n_p, samples, seed))]
fn draw_batch(
    params: &PyChannelParams,
    n_p: usize,
    samples: usize,
    seed: u64,
) -> PyResult<Vec<f64>> {
    let quad = QuadratureSpec::default();
    let sampler = density::BlockSampler::new(&params.inner, n_p, &quad).map_err(runtime_err)?;
    let batch = engine::generate_batch(&sampler, params.inner.ell, samples, seed, 0, n_p as u64, 1024)
        .map_err(runtime_err)?;
    Ok(batch.sums)
}

/// Dependence-testing achievability rate from a batch of sums.
#[pyfunction]
fn dt_max_rate(
    sums: Vec<f64>,
    epsilon: f64,
    n_c: usize,
    ell: usize,
    rho: f64,
) -> PyResult<(f64, f64, bool)> {
    let batch = SampleBatch::new(sums, 0).map_err(value_err)?;
    let r = bounds::dt_max_rate(&batch, epsilon, n_c, ell, rho).map_err(value_err)?;
    Ok((r.rate_bpcu, r.stderr_rate, r.feasible))
}

/// Min-max converse rate from a batch of sums.
#[pyfunction]
fn converse_rate(sums: Vec<f64>, epsilon: f64, n_c: usize, ell: usize) -> PyResult<(f64, f64, bool)> {
    let batch = SampleBatch::new(sums, 0).map_err(value_err)?;
    let r = bounds::converse_rate(&batch, epsilon, n_c, ell).map_err(value_err)?;
    Ok((r.rate_bpcu, r.stderr_rate, r.feasible))
}

/// AWGN normal approximation in bits per channel use.
#[pyfunction]
fn normal_approx(rho: f64, n: usize, epsilon: f64) -> PyResult<f64> {
    Ok(bounds::normal_approx(rho, n, epsilon)
        .map_err(value_err)?
        .rate_bpcu)
}

/// Runs a sweep and returns rows as dicts matching the CSV schema.
#[pyfunction]
#[pyo3(signature = (n, ells, kappas, rho_db, epsilon, nps, bound_names, samples, seed, threads=None))]
#[allow(clippy::too_many_arguments)]
fn run_sweep(
    py: Python<'_>,
    n: usize,
    ells: Vec<usize>,
    kappas: Vec<f64>,
    rho_db: f64,
    epsilon: f64,
    nps: Vec<usize>,
    bound_names: Vec<String>,
    samples: usize,
    seed: u64,
    threads: Option<usize>,
) -> PyResult<Vec<PyObject>> {
    let bounds_kinds: Vec<BoundKind> = bound_names
        .iter()
        .map(|s| BoundKind::parse(s).map_err(value_err))
        .collect::<PyResult<_>>()?;
    let spec = SweepSpec {
        n_total: n,
        ell_values: ells,
        kappa_values: kappas,
        rho_db,
        epsilon,
        np_values: nps,
        bounds: bounds_kinds,
        samples,
        master_seed: seed,
    };
    let opts = RunOptions {
        threads,
        ..Default::default()
    };
    let out = engine::run(&spec, &opts).map_err(runtime_err)?;
    out.rows
        .iter()
        .map(|r| {
            let d = pyo3::types::PyDict::new_bound(py);
            d.set_item("ell", r.ell)?;
            d.set_item("n_c", r.n_c)?;
            d.set_item("kappa", r.kappa)?;
            d.set_item("n_p", r.n_p)?;
            d.set_item("bound", r.kind.label())?;
            d.set_item("rate_bpcu", r.rate_bpcu)?;
            d.set_item("stderr", r.stderr)?;
            d.set_item("aux", r.aux)?;
            d.set_item("samples", r.samples)?;
            d.set_item("seed", r.seed)?;
            Ok(d.into())
        })
        .collect()
}

/// Nine-significant-digit formatting used by the CSV writer.
#[pyfunction]
fn format_rate(v: f64) -> String {
    fmt_sig9(v)
}

#[pymodule]
fn rician_fbl_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChannelParams>()?;
    m.add_function(wrap_pyfunction!(log_bessel_i, m)?)?;
    m.add_function(wrap_pyfunction!(q_inv, m)?)?;
    m.add_function(wrap_pyfunction!(log_g, m)?)?;
    m.add_function(wrap_pyfunction!(log_output_pdf, m)?)?;
    m.add_function(wrap_pyfunction!(sample_info_density, m)?)?;
    m.add_function(wrap_pyfunction!(draw_batch, m)?)?;
    m.add_function(wrap_pyfunction!(dt_max_rate, m)?)?;
    m.add_function(wrap_pyfunction!(converse_rate, m)?)?;
    m.add_function(wrap_pyfunction!(normal_approx, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(format_rate, m)?)?;
    Ok(())
}
