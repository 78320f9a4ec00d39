//! Python bindings: `import voros`.
//!
//! Potentials are passed as JSON strings in the same format the CLI reads,
//! e.g. `'{"variant": "AbsLinear"}'`.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use voros_core::airy::{self, AiryKind};
use voros_core::bethe::{self, BetheSolution};
use voros_core::eqc::{self, EqcOptions, ModifiedEqc, VorosOptions};
use voros_core::oracle::{self, BoundaryCondition, Origin};
use voros_core::potentials::{self, PotentialSpec};
use voros_core::tba::{self, MedianCurve, PseudoEnergy, SpdpParams, TbaOptions, ThetaGrid};
use voros_core::wkb;

create_exception!(voros, VorosError, PyException);

type CyclePeriods = Vec<(String, Vec<(f64, f64)>)>;
type RegularizedCurves = (Vec<f64>, Vec<f64>, Vec<f64>, f64, f64);

fn py_err(e: voros_core::Error) -> PyErr {
    VorosError::new_err(e.to_string())
}

fn parse_potential(json: &str) -> PyResult<PotentialSpec> {
    serde_json::from_str(json).map_err(|e| VorosError::new_err(format!("potential: {e}")))
}

fn grid(half_width: f64, len: usize) -> PyResult<ThetaGrid> {
    ThetaGrid::new(half_width, len).map_err(py_err)
}

fn options(tol: f64, max_iter: usize) -> TbaOptions {
    TbaOptions {
        tol,
        max_iter,
        ..TbaOptions::default()
    }
}

/// Roots and energy of a Bethe-like system.
#[pyclass(name = "BetheSolution", frozen)]
struct PyBetheSolution {
    inner: BetheSolution,
}

#[pymethods]
impl PyBetheSolution {
    #[getter]
    fn roots(&self) -> Vec<f64> {
        self.inner.roots.clone()
    }

    #[getter]
    fn energy(&self) -> f64 {
        self.inner.energy
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual
    }

    fn __repr__(&self) -> String {
        format!(
            "BetheSolution(roots={:?}, energy={})",
            self.inner.roots, self.inner.energy
        )
    }
}

#[pyfunction]
#[pyo3(signature = (n, scale = 1.0))]
fn solve_qho_bethe(n: usize, scale: f64) -> PyResult<PyBetheSolution> {
    let inner = bethe::solve_qho_bethe(n, scale).map_err(py_err)?;
    Ok(PyBetheSolution { inner })
}

#[pyfunction]
#[pyo3(signature = (n_nodes, l = 0, a0 = 1.0))]
fn solve_hydrogen_bethe(n_nodes: usize, l: usize, a0: f64) -> PyResult<PyBetheSolution> {
    let inner = bethe::solve_hydrogen_bethe(n_nodes, l, a0).map_err(py_err)?;
    Ok(PyBetheSolution { inner })
}

/// `(Ai(x), Ai'(x))`.
#[pyfunction]
fn airy_ai(x: f64) -> PyResult<(f64, f64)> {
    let v = airy::airy_ai(x).map_err(py_err)?;
    Ok((v.ai, v.ai_prime))
}

/// First `count` zeros of `Ai` (or of `Ai'` when `derivative` is set).
#[pyfunction]
#[pyo3(signature = (count, derivative = false))]
fn airy_zeros(count: usize, derivative: bool) -> PyResult<Vec<f64>> {
    let kind = if derivative {
        AiryKind::AiPrime
    } else {
        AiryKind::Ai
    };
    airy::airy_zeros(kind, count).map_err(py_err)
}

/// Exact `|x|` levels `E_0..E_{n_max}` from Airy zeros.
#[pyfunction]
fn true_abs_spectrum(n_max: usize) -> PyResult<Vec<f64>> {
    Ok(airy::true_abs_spectrum(n_max).map_err(py_err)?.values())
}

#[pyfunction]
fn true_theta(n: usize) -> PyResult<f64> {
    airy::true_theta(n).map_err(py_err)
}

/// Naive Bohr–Sommerfeld `|x|` levels.
#[pyfunction]
fn naive_abs_spectrum(n_max: usize) -> PyResult<Vec<f64>> {
    Ok(eqc::naive_abs_spectrum(n_max).map_err(py_err)?.values())
}

/// Classical periods of the minimal-chamber cycles as `(label, mass)` pairs.
#[pyfunction]
fn classical_masses(potential: &str, energy: f64) -> PyResult<Vec<(String, f64)>> {
    let spec = parse_potential(potential)?;
    let cycles = potentials::minimal_chamber_cycles(&spec, energy).map_err(py_err)?;
    cycles
        .iter()
        .map(|c| {
            let m = potentials::classical_mass(&spec, c, energy).map_err(py_err)?;
            Ok((c.label.clone(), m))
        })
        .collect()
}

/// Quantum periods of order `0..=order` for every cycle, as complex numbers.
#[pyfunction]
fn quantum_periods(potential: &str, energy: f64, order: usize) -> PyResult<CyclePeriods> {
    let spec = parse_potential(potential)?;
    let cycles = potentials::minimal_chamber_cycles(&spec, energy).map_err(py_err)?;
    cycles
        .iter()
        .map(|c| {
            let p = wkb::quantum_periods(&spec, energy, c, order).map_err(py_err)?;
            Ok((c.label.clone(), p.iter().map(|v| (v.re, v.im)).collect()))
        })
        .collect()
}

/// Shooting eigenvalues `E_0..E_{levels-1}`; `bc` is `full_line`,
/// `dirichlet` or `neumann`.
#[pyfunction]
#[pyo3(signature = (potential, levels, bc = "full_line"))]
fn shooting_spectrum(potential: &str, levels: usize, bc: &str) -> PyResult<Vec<f64>> {
    let spec = parse_potential(potential)?;
    let origin = match bc {
        "full_line" => Origin::FullLine,
        "dirichlet" => Origin::Dirichlet,
        "neumann" => Origin::Neumann,
        other => {
            return Err(VorosError::new_err(format!(
                "unknown boundary condition `{other}`"
            )))
        }
    };
    let bc = BoundaryCondition::new(origin);
    (0..levels)
        .map(|n| oracle::shooting_eigenvalue(&spec, &bc, n).map_err(py_err))
        .collect()
}

/// Solved single-plus-double-pole TBA system.
#[pyclass(name = "PseudoEnergy", frozen)]
struct PyPseudoEnergy {
    inner: PseudoEnergy,
    curve: MedianCurve,
}

#[pymethods]
impl PyPseudoEnergy {
    #[getter]
    fn theta(&self) -> Vec<f64> {
        self.inner.grid.nodes()
    }

    #[getter]
    fn eps_1(&self) -> Vec<f64> {
        self.inner.values[0].clone()
    }

    #[getter]
    fn eps_hat(&self) -> Vec<f64> {
        self.inner.values[1].clone()
    }

    #[getter]
    fn masses(&self) -> Vec<f64> {
        self.inner.masses.clone()
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.report.iterations
    }

    #[getter]
    fn final_update(&self) -> f64 {
        self.inner.report.final_update
    }

    fn fixed_point_residual(&self) -> PyResult<f64> {
        self.inner.fixed_point_residual().map_err(py_err)
    }

    /// `eps_a(theta)` for component 0 (`eps_1`) or 1 (`eps_hat`).
    fn value_at(&self, component: usize, theta: f64) -> PyResult<f64> {
        if component >= self.inner.values.len() {
            return Err(VorosError::new_err(format!("no component {component}")));
        }
        Ok(self.inner.value_at(component, theta))
    }

    /// Median-resummed period `B_med(theta)`.
    fn median_period(&self, theta: f64) -> PyResult<f64> {
        self.curve.value_at(theta).map_err(py_err)
    }

    /// `(theta, B_med)` at the nodes away from the grid edges.
    fn median_curve(&self) -> Vec<(f64, f64)> {
        self.curve.samples()
    }

    /// Modified quantization residual at `theta`.
    #[pyo3(signature = (theta, l = 0))]
    fn eqc_residual(&self, theta: f64, l: u32) -> PyResult<f64> {
        let opts = EqcOptions {
            experimental: l > 0,
            ..EqcOptions::default()
        };
        eqc::modified_eqc_residual(theta, &self.inner, l, opts).map_err(py_err)
    }

    /// Roots of the quantization condition in `[lo, hi]`.
    fn eqc_roots(&self, lo: f64, hi: f64) -> PyResult<Vec<f64>> {
        let e = ModifiedEqc::new(&self.inner, 0, EqcOptions::default()).map_err(py_err)?;
        Ok(e.roots(lo, hi)
            .map_err(py_err)?
            .into_iter()
            .map(|r| r.0)
            .collect())
    }

    /// Lowest `n_max + 1` Voros levels `theta_n`.
    fn voros_spectrum(&self, n_max: usize) -> PyResult<Vec<f64>> {
        let t = eqc::voros_spectrum_from(&self.inner, n_max, &VorosOptions::default())
            .map_err(py_err)?;
        Ok(t.values())
    }
}

#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (energy = 1.0, u2 = 1e-8, l = 1e-5, half_width = 12.0, len = 4096, tol = 1e-10, max_iter = 500))]
fn solve_tba(
    py: Python<'_>,
    energy: f64,
    u2: f64,
    l: f64,
    half_width: f64,
    len: usize,
    tol: f64,
    max_iter: usize,
) -> PyResult<PyPseudoEnergy> {
    let params = SpdpParams { energy, u2, l };
    let grid = grid(half_width, len)?;
    let opts = options(tol, max_iter);
    let inner = py
        .detach(|| tba::solve_tba_spdp(params, grid, &opts))
        .map_err(py_err)?;
    let curve = MedianCurve::new(&inner).map_err(py_err)?;
    Ok(PyPseudoEnergy { inner, curve })
}

/// Regularized system: returns `(theta, e^{-A}, B)` and the fitted shift.
#[pyfunction]
#[pyo3(signature = (half_width = 12.0, len = 4096))]
fn solve_regularized(py: Python<'_>, half_width: f64, len: usize) -> PyResult<RegularizedCurves> {
    let grid = grid(half_width, len)?;
    let sol = py
        .detach(|| tba::solve_tba_regularized(grid, &TbaOptions::default()))
        .map_err(py_err)?;
    let fit = tba::fit_closed_form_shift(&sol).map_err(py_err)?;
    Ok((
        grid.nodes(),
        sol.exp_minus_a(),
        sol.b.clone(),
        fit.shift,
        fit.sup_error,
    ))
}

#[pymodule]
fn voros(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("VorosError", m.py().get_type::<VorosError>())?;
    m.add_class::<PyBetheSolution>()?;
    m.add_class::<PyPseudoEnergy>()?;
    m.add_function(wrap_pyfunction!(solve_qho_bethe, m)?)?;
    m.add_function(wrap_pyfunction!(solve_hydrogen_bethe, m)?)?;
    m.add_function(wrap_pyfunction!(airy_ai, m)?)?;
    m.add_function(wrap_pyfunction!(airy_zeros, m)?)?;
    m.add_function(wrap_pyfunction!(true_abs_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(true_theta, m)?)?;
    m.add_function(wrap_pyfunction!(naive_abs_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(classical_masses, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_periods, m)?)?;
    m.add_function(wrap_pyfunction!(shooting_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(solve_tba, m)?)?;
    m.add_function(wrap_pyfunction!(solve_regularized, m)?)?;
    Ok(())
}
