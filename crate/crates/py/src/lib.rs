//! Python module `acp`: thin wrappers over `acp_core`.
//!
//! Replica `r` of every sampling function uses the same stream as the `acp`
//! binary, so results match the CLI for equal seeds.

use acp_core::branching::{self, GWParams};
use acp_core::lattice::{run_from, Boundary, Initial, SimParams};
use acp_core::meanfield::{self, MFParams, MFState};
use acp_core::rng::par_replicas;
use acp_core::{percolation, stats};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: acp_core::Error) -> PyErr {
    match e {
        acp_core::Error::InvalidParameter { .. } => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Progeny generating function `E s^π` of the dominating branching process.
#[pyfunction]
#[pyo3(signature = (s, d, gamma, tol = 1e-12))]
fn progeny_pgf(s: f64, d: u32, gamma: f64, tol: f64) -> PyResult<f64> {
    let params = GWParams::new(d, gamma).map_err(py_err)?;
    branching::solve_progeny_pgf(s, &params, tol).map_err(py_err)
}

/// `(c, s)` with `P(π > k) <= c * s**-k`.
#[pyfunction]
fn tail_certificate(d: u32, gamma: f64) -> PyResult<(f64, f64)> {
    let params = GWParams::new(d, gamma).map_err(py_err)?;
    let t = branching::tail_certificate(&params, None).map_err(py_err)?;
    Ok((t.c, t.s))
}

/// Total progenies of independent branching runs, one per replica.
#[pyfunction]
#[pyo3(signature = (d, gamma, replicas, seed = 0, cap = 1_000_000))]
fn sample_progeny(d: u32, gamma: f64, replicas: u64, seed: u64, cap: u64) -> PyResult<Vec<u64>> {
    let params = GWParams::new(d, gamma).map_err(py_err)?;
    Ok(par_replicas(seed, replicas, |_, rng| branching::simulate_progeny(&params, cap, rng).progeny))
}

/// Single-source runs on a box; each run is returned as a dict of observables.
#[pyfunction]
#[pyo3(signature = (
    replicas = 1, seed = 0, d = 1, half_width = 100, lambda1 = 0.0, lambda2 = f64::INFINITY,
    gamma = 0.2, boundary = "healthy_frozen", horizon = 1e3,
))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    replicas: u64,
    seed: u64,
    d: u32,
    half_width: u32,
    lambda1: f64,
    lambda2: f64,
    gamma: f64,
    boundary: &str,
    horizon: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let params = SimParams {
        d,
        half_width,
        lambda1,
        lambda2,
        gamma,
        boundary: boundary.parse::<Boundary>().map_err(py_err)?,
        horizon,
        seed,
    };
    let lattice = params.lattice().map_err(py_err)?;
    let runs = par_replicas(seed, replicas, |_, rng| {
        run_from(&lattice, params.rates(), &Initial::SingleSymptomaticAtOrigin, horizon, rng)
    });
    runs.into_iter()
        .map(|run| {
            let s = run.map_err(py_err)?;
            let dict = PyDict::new(py);
            dict.set_item("pi1", s.pi1)?;
            dict.set_item("pi2", s.pi2)?;
            dict.set_item("t_cumulative", s.t_cumulative)?;
            dict.set_item("extinction_time", s.extinction_time)?;
            dict.set_item("max_space", s.max_space)?;
            dict.set_item("max_time", s.max_time)?;
            dict.set_item("extinct", s.extinct)?;
            Ok(dict)
        })
        .collect()
}

/// RK4 trajectory of the mean-field system as `(t, u1, u2)` rows.
#[pyfunction]
#[pyo3(signature = (lambda1, lambda2, gamma, u1 = 0.1, u2 = 0.1, t_end = 200.0, dt = 0.01))]
fn meanfield_trajectory(
    lambda1: f64,
    lambda2: f64,
    gamma: f64,
    u1: f64,
    u2: f64,
    t_end: f64,
    dt: f64,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let params = MFParams::new(lambda1, lambda2, gamma).map_err(py_err)?;
    let path = meanfield::integrate(MFState::new(u1, u2), &params, t_end, dt).map_err(py_err)?;
    Ok(path.into_iter().map(|(t, s)| (t, s.u1, s.u2)).collect())
}

/// Interior fixed point `(u1, u2)`, or `None` below the threshold.
#[pyfunction]
fn interior_fixed_point(lambda1: f64, lambda2: f64, gamma: f64) -> PyResult<Option<(f64, f64)>> {
    let params = MFParams::new(lambda1, lambda2, gamma).map_err(py_err)?;
    let report = meanfield::interior_fixed_point(&params, 1e-14).map_err(py_err)?;
    Ok(report.point.map(|p| (p.u1, p.u2)))
}

/// Number of directed self-avoiding paths with `n` arrows in `Z^d x Z`.
#[pyfunction]
fn count_paths(n: u32, d: usize) -> PyResult<u64> {
    Ok(percolation::count_directed_sa_paths(n, d).map_err(py_err)?.count)
}

#[pyfunction]
#[pyo3(signature = (successes, n, z = stats::Z95))]
fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    stats::wilson_interval(successes, n, z)
}

/// `(p_hat, ci_low, ci_high)` for `P(X > k)`.
#[pyfunction]
fn tail_estimate(samples: Vec<f64>, k: f64) -> PyResult<(f64, f64, f64)> {
    let t = stats::tail_estimate(&samples, k).map_err(py_err)?;
    Ok((t.p_hat, t.ci_low, t.ci_high))
}

#[pymodule]
fn acp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(progeny_pgf, m)?)?;
    m.add_function(wrap_pyfunction!(tail_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(sample_progeny, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(meanfield_trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(interior_fixed_point, m)?)?;
    m.add_function(wrap_pyfunction!(count_paths, m)?)?;
    m.add_function(wrap_pyfunction!(wilson_interval, m)?)?;
    m.add_function(wrap_pyfunction!(tail_estimate, m)?)?;
    m.add("Z95", stats::Z95)?;
    Ok(())
}
