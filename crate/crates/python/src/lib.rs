//! Python bindings for the two-barrier scattering library.

use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;
use twobarrier_core::chartimes::TimeReport;
use twobarrier_core::wavepacket::{
    asymptotic_group_times_packet, cm_track, fit_asymptotic_times, PacketConfig, PacketEngine, TimeGrid,
};
use twobarrier_core::{self as core, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidSystem(_) | Error::Domain(_) => PyValueError::new_err(e.to_string()),
        Error::Numerical(_) | Error::UnderResolved { .. } => PyArithmeticError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let items = a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(o) => {
            let d = PyDict::new(py);
            for (k, x) in o {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

/// Serializable record as a dict. Non-finite floats become None.
fn record<'py>(py: Python<'py>, r: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(r).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// Two identical rectangular barriers.
#[pyclass(name = "BarrierSystem", frozen, from_py_object)]
#[derive(Clone)]
struct PyBarrierSystem {
    inner: core::BarrierSystem,
}

#[pymethods]
impl PyBarrierSystem {
    /// Reduced units (ħ = 1, m = 1/2) unless `units="si"`, where lengths are
    /// nm, energies eV and `mass` is in electron masses.
    #[new]
    #[pyo3(signature = (v0, d, gap, a1, units = "reduced", mass = None))]
    fn new(v0: f64, d: f64, gap: f64, a1: f64, units: &str, mass: Option<f64>) -> PyResult<Self> {
        let inner = match (units, mass) {
            ("reduced", None) => core::BarrierSystem::reduced(v0, d, gap, a1),
            ("reduced", Some(_)) => return Err(PyValueError::new_err("reduced units fix m = 1/2")),
            ("si", m) => core::BarrierSystem::si(v0, d, gap, a1, m.unwrap_or(1.0)),
            (u, _) => return Err(PyValueError::new_err(format!("units must be 'reduced' or 'si', got {u:?}"))),
        }
        .map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn v0(&self) -> f64 {
        self.inner.v0
    }

    #[getter]
    fn d(&self) -> f64 {
        self.inner.d
    }

    #[getter]
    fn gap(&self) -> f64 {
        self.inner.gap
    }

    #[getter]
    fn a1(&self) -> f64 {
        self.inner.a1
    }

    #[getter]
    fn b2(&self) -> f64 {
        self.inner.b2()
    }

    #[getter]
    fn tau0(&self) -> f64 {
        self.inner.tau0()
    }

    fn wavenumber(&self, energy: f64) -> f64 {
        self.inner.wavenumber(energy)
    }

    fn velocity(&self, k: f64) -> f64 {
        self.inner.velocity(k)
    }

    fn tau_free(&self, k: f64) -> f64 {
        self.inner.tau_free(k)
    }

    /// T_two at wavenumber k.
    fn transmission(&self, k: f64) -> PyResult<f64> {
        Ok(core::compose_two_barrier(&self.inner, k).map_err(py_err)?.t_two)
    }

    /// Outgoing amplitudes (A_out, B_out) of the stationary state.
    fn amplitudes(&self, k: f64) -> PyResult<(Complex64, Complex64)> {
        let f = core::total_field(&self.inner, k).map_err(py_err)?;
        Ok((f.a_out, f.b_out))
    }

    /// Ψ_tot, ψ_tr and ψ_ref at each x.
    fn fields(&self, k: f64, xs: Vec<f64>) -> PyResult<Vec<(Complex64, Complex64, Complex64)>> {
        let s = core::SwfState::new(&self.inner, k).map_err(py_err)?;
        Ok(xs
            .iter()
            .map(|&x| (s.eval(core::Which::Tot, x), s.eval(core::Which::Tr, x), s.eval(core::Which::Ref, x)))
            .collect())
    }

    /// Every stationary time at k as a dict.
    fn times<'py>(&self, py: Python<'py>, k: f64) -> PyResult<Bound<'py, PyAny>> {
        record(py, &TimeReport::new(&self.inner, k).map_err(py_err)?)
    }

    /// Wavenumbers in [k_lo, k_hi] where T_two = 1.
    fn resonances(&self, k_lo: f64, k_hi: f64) -> PyResult<Vec<f64>> {
        core::find_resonances(&self.inner, k_lo, k_hi).map_err(py_err)
    }

    /// Gaussian packet run over `n` times in [t_lo, t_hi].
    #[pyo3(signature = (l0, kbar, t_lo, t_hi, n, min_l0_kbar = None))]
    fn packet_run<'py>(
        &self,
        py: Python<'py>,
        l0: f64,
        kbar: f64,
        t_lo: f64,
        t_hi: f64,
        n: usize,
        min_l0_kbar: Option<f64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let sys = self.inner;
        let mut cfg = PacketConfig::new(l0, kbar, t_lo, t_hi);
        if let Some(m) = min_l0_kbar {
            cfg.min_l0_kbar = m;
        }
        let (traj, spectral, fit) = py
            .detach(|| -> Result<_, Error> {
                let engine = PacketEngine::new(&sys, &cfg)?;
                let traj = cm_track(&engine, &TimeGrid::new(t_lo, t_hi, n)?)?;
                let delta_x = 10.0 * l0;
                let spectral = asymptotic_group_times_packet(&engine.spec, &sys, delta_x).ok();
                let fit = fit_asymptotic_times(&traj, &engine, delta_x, 3.0).ok();
                Ok((traj, spectral, fit))
            })
            .map_err(py_err)?;
        let out = PyDict::new(py);
        out.set_item("t", &traj.times)?;
        out.set_item("xbar_tr", traj.xbar(core::Which::Tr))?;
        out.set_item("xbar_tot", traj.xbar(core::Which::Tot))?;
        out.set_item("xbar_ref", traj.xbar(core::Which::Ref))?;
        out.set_item("xbar_free", &traj.xbar_free)?;
        out.set_item("norm_T", traj.norm_t())?;
        out.set_item("norm_R", traj.norm_r())?;
        out.set_item("events", record(py, &traj.events)?)?;
        out.set_item("spectral", record(py, &spectral)?)?;
        out.set_item("fit", record(py, &fit)?)?;
        Ok(out.into_any())
    }

    fn __repr__(&self) -> String {
        let s = &self.inner;
        format!("BarrierSystem(v0={}, d={}, gap={}, a1={}, mass={}, hbar={})", s.v0, s.d, s.gap, s.a1, s.mass, s.hbar)
    }
}

/// Current audit of the naive split for the transfer matrix (q, p).
#[pyfunction]
#[pyo3(signature = (q, p, velocity = 1.0))]
fn superposition_audit<'py>(py: Python<'py>, q: Complex64, p: Complex64, velocity: f64) -> PyResult<Bound<'py, PyAny>> {
    let a = core::current_audit(&core::naive_split(q, p, velocity).map_err(py_err)?);
    let d = record(py, &a)?;
    d.set_item("summary", a.summary())?;
    Ok(d)
}

/// Same audit for a two-barrier system at wavenumber k.
#[pyfunction]
fn superposition_audit_system<'py>(py: Python<'py>, system: &PyBarrierSystem, k: f64) -> PyResult<Bound<'py, PyAny>> {
    let split = core::superposition::naive_split_two_barrier(&system.inner, k).map_err(py_err)?;
    let a = core::current_audit(&split);
    let d = record(py, &a)?;
    d.set_item("summary", a.summary())?;
    Ok(d)
}

#[pymodule]
fn twobarrier(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBarrierSystem>()?;
    m.add_function(wrap_pyfunction!(superposition_audit, m)?)?;
    m.add_function(wrap_pyfunction!(superposition_audit_system, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
