//! Python module `chirped_bragg_py`: mirror and splitter runs, config files, dressed
//! spectra and the lab unit sheet.

use chirped_bragg::config::{load_config, parse_config, SimConfig};
use chirped_bragg::scenarios::{
    run_mirror as mirror, run_splitter as splitter, MirrorParams, RunOutcome, SplitterParams,
};
use chirped_bragg::spectrum::{dressed_energies as energies, locate_crossings};
use chirped_bragg::units::{convert_units, critical_spread as spread, LabUnits, RecoilParams};
use chirped_bragg::{Error, Frame, IntegratorSpec};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Serialise through JSON so nested results arrive as plain dicts and lists.
fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn frame(name: &str) -> PyResult<Frame> {
    match name {
        "rotating" => Ok(Frame::Rotating),
        "bare" => Ok(Frame::Bare),
        other => Err(PyValueError::new_err(format!(
            "unknown frame {other:?}, expected \"rotating\" or \"bare\""
        ))),
    }
}

fn integrator(dt: Option<f64>) -> IntegratorSpec {
    dt.map_or_else(IntegratorSpec::default, IntegratorSpec::rk4)
}

/// Finished run: recorded trajectory, summary metrics and diagnostics.
#[pyclass(frozen, module = "chirped_bragg_py")]
struct RunResult(RunOutcome);

#[pymethods]
impl RunResult {
    /// Summed final population of the target level(s).
    #[getter]
    fn fidelity(&self) -> f64 {
        self.0.metrics.fidelity
    }

    #[getter]
    fn dominant_level(&self) -> i64 {
        self.0.metrics.dominant_level
    }

    /// Level labels `-N..=N`, matching the population columns.
    #[getter]
    fn labels(&self) -> Vec<i64> {
        self.0.trajectory.labels().collect()
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.0.trajectory.times.clone()
    }

    /// One row of populations per recorded time.
    #[getter]
    fn populations(&self) -> Vec<Vec<f64>> {
        self.0.trajectory.populations.clone()
    }

    #[getter]
    fn mean_velocity(&self) -> Vec<f64> {
        self.0.trajectory.mean_velocity.clone()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.0.warnings.clone()
    }

    fn final_population(&self, n: i64) -> f64 {
        self.0.metrics.final_population(n)
    }

    fn metrics(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0.metrics)
    }

    fn adiabaticity(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0.adiabaticity)
    }

    fn __repr__(&self) -> String {
        let m = &self.0.metrics;
        format!(
            "RunResult(targets={:?}, fidelity={:.6}, steps={})",
            m.targets, m.fidelity, self.0.trajectory.steps
        )
    }
}

/// Parsed `key = value` simulation config.
#[pyclass(frozen, module = "chirped_bragg_py")]
struct Config(SimConfig);

#[pymethods]
impl Config {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_config(text).map(Config).map_err(py_err)
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        load_config(&path).map(Config).map_err(py_err)
    }

    /// Canonical text form; parses back to an equal config.
    fn emit(&self) -> String {
        self.0.emit()
    }

    fn snapshot(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0.snapshot())
    }

    /// Copy with one numeric key replaced.
    fn with_value(&self, key: &str, value: f64) -> PyResult<Self> {
        self.0.with_value(key, value).map(Config).map_err(py_err)
    }

    fn run(&self, py: Python<'_>) -> PyResult<RunResult> {
        let cfg = self.0.clone();
        py.detach(|| chirped_bragg::cli::run_config(&cfg))
            .map(RunResult)
            .map_err(py_err)
    }

    /// Sorted dressed energies at time `t`.
    fn dressed_energies(&self, t: f64) -> PyResult<Vec<f64>> {
        let exp = self.0.experiment().map_err(py_err)?;
        Ok(energies(&exp.ladder, t))
    }

    /// Avoided crossings inside `[t_start, t_end]`, defaulting to the pulse support.
    #[pyo3(signature = (t_start=None, t_end=None))]
    fn crossings(&self, py: Python<'_>, t_start: Option<f64>, t_end: Option<f64>) -> PyResult<Py<PyAny>> {
        let exp = self.0.experiment().map_err(py_err)?;
        let (a, b) = exp.ladder.pulse_support();
        let recs = locate_crossings(&exp.ladder, (t_start.unwrap_or(a), t_end.unwrap_or(b))).map_err(py_err)?;
        to_py(py, &recs)
    }

    fn __repr__(&self) -> String {
        format!("Config(mode={:?}, target={})", self.0.mode, self.0.target)
    }
}

/// Single-beam mirror climbing to `target`; unset arguments keep the reference values.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (target=25, omega0=None, alpha=None, t_c=None, q=0.0, frame="rotating", dt=None))]
fn run_mirror(
    py: Python<'_>,
    target: i64,
    omega0: Option<f64>,
    alpha: Option<f64>,
    t_c: Option<f64>,
    q: f64,
    frame: &str,
    dt: Option<f64>,
) -> PyResult<RunResult> {
    let mut p = MirrorParams {
        target,
        q,
        frame: self::frame(frame)?,
        integrator: integrator(dt),
        ..MirrorParams::default()
    };
    if let Some(w) = omega0 {
        p.pulse.omega0 = w;
    }
    p.alpha = alpha.unwrap_or(p.alpha);
    p.t_c = t_c.unwrap_or(p.t_c);
    py.detach(|| mirror(&p)).map(RunResult).map_err(py_err)
}

/// Symmetric beam splitter sending the ground state to `±target`.
#[pyfunction]
#[pyo3(signature = (target=25, omega0=None, q=0.0, dt=None))]
fn run_splitter(py: Python<'_>, target: i64, omega0: Option<f64>, q: f64, dt: Option<f64>) -> PyResult<RunResult> {
    let mut p = SplitterParams {
        target,
        q,
        integrator: integrator(dt),
        ..SplitterParams::default()
    };
    if let Some(w) = omega0 {
        p.pulse.omega0 = w;
    }
    py.detach(|| splitter(&p)).map(RunResult).map_err(py_err)
}

/// Lab-unit sheet for recoil frequency `omega_k_hz` (ω_k/2π in Hz).
#[pyfunction]
#[pyo3(signature = (omega_k_hz, n, alpha, duration=None))]
fn unit_sheet(py: Python<'_>, omega_k_hz: f64, n: u32, alpha: f64, duration: Option<f64>) -> PyResult<Py<PyAny>> {
    let lab = LabUnits::new(omega_k_hz).map_err(py_err)?;
    let sheet = convert_units(&lab, &RecoilParams { n, alpha, duration }).map_err(py_err)?;
    to_py(py, &sheet)
}

/// Momentum spread (units of ħk) resolvable after reaching rung `n` in time `duration`.
#[pyfunction]
fn critical_spread(n: u32, duration: f64) -> PyResult<f64> {
    spread(n, duration).map_err(py_err)
}

#[pymodule]
fn chirped_bragg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Config>()?;
    m.add_class::<RunResult>()?;
    m.add_function(wrap_pyfunction!(run_mirror, m)?)?;
    m.add_function(wrap_pyfunction!(run_splitter, m)?)?;
    m.add_function(wrap_pyfunction!(unit_sheet, m)?)?;
    m.add_function(wrap_pyfunction!(critical_spread, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_round_trip() {
        Python::initialize();
        Python::attach(|py| {
            let r = run_mirror(py, 3, None, None, None, 0.0, "bare", Some(2e-3)).unwrap();
            assert_eq!(r.dominant_level(), 3);
            let m = r.metrics(py).unwrap();
            let f: f64 = m.bind(py).get_item("fidelity").unwrap().extract().unwrap();
            assert_eq!(f, r.fidelity());
            assert!(frame("sideways").is_err());
            let err = Config::parse("mode = mirror\n").err().unwrap();
            assert!(err.is_instance_of::<PyValueError>(py));
            assert!(Config::load("/nonexistent.cfg".into())
                .err()
                .unwrap()
                .is_instance_of::<PyOSError>(py));
        });
    }
}
