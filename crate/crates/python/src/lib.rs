//! Python bindings. Reports come back as plain dicts and lists.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;
use ttlab::herglotz::{self, RadialProfile};
use ttlab::{io, FiniteMetricSpace, MeasurementSet, SensorMatching, TruncationParams};

fn err(e: ttlab::Error) -> PyErr {
    match e {
        ttlab::Error::Io(e) => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_f64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (None, Some(f)) => f.into_pyobject(py)?.into_any(),
            _ => py.None().into_bound(py),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn report<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// A finite metric space, validated on construction.
#[pyclass(name = "MetricSpace", module = "ttlab_py", frozen)]
struct PyMetricSpace {
    inner: FiniteMetricSpace,
}

#[pymethods]
impl PyMetricSpace {
    #[new]
    #[pyo3(signature = (dist, labels=None))]
    fn new(dist: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> PyResult<Self> {
        let mut inner = FiniteMetricSpace::validate(&dist).map_err(err)?;
        if let Some(l) = labels {
            inner = inner.with_labels(l).map_err(err)?;
        }
        Ok(PyMetricSpace { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("MetricSpace(n={}, diam={})", self.inner.len(), self.inner.diam())
    }

    fn d(&self, i: usize, j: usize) -> PyResult<f64> {
        self.inner.check_index(i).map_err(err)?;
        self.inner.check_index(j).map_err(err)?;
        Ok(self.inner.d(i, j))
    }

    fn diam(&self) -> f64 {
        self.inner.diam()
    }

    fn labels(&self) -> Vec<String> {
        (0..self.inner.len()).map(|i| self.inner.label(i)).collect()
    }

    fn to_matrix(&self) -> Vec<Vec<f64>> {
        self.inner.to_matrix()
    }

    fn truncate(&self, eps: f64) -> PyResult<Self> {
        let params = TruncationParams::new(eps).map_err(err)?;
        Ok(PyMetricSpace { inner: ttlab::truncate(&self.inner, params) })
    }
}

fn measurement_set(space: &PyMetricSpace, indices: Vec<usize>) -> PyResult<MeasurementSet> {
    MeasurementSet::new(indices, &space.inner).map_err(err)
}

/// Reads a space file; returns `(space, sensors, provenance)`.
#[pyfunction]
fn read_space_file<'py>(py: Python<'py>, path: &str) -> PyResult<(PyMetricSpace, Vec<usize>, Bound<'py, PyAny>)> {
    let loaded = io::read_space_file(path).map_err(err)?;
    let s = loaded.sensors.map(|s| s.indices().to_vec()).unwrap_or_default();
    Ok((PyMetricSpace { inner: loaded.space }, s, to_py(py, &loaded.provenance)?))
}

#[pyfunction]
#[pyo3(signature = (space, sensors, path))]
fn write_space_file(space: &PyMetricSpace, sensors: Vec<usize>, path: &str) -> PyResult<()> {
    let s = if sensors.is_empty() { None } else { Some(MeasurementSet::new(sensors, &space.inner).map_err(err)?) };
    io::write_space_file(path, &io::SpaceFile::new(&space.inner, s.as_ref(), Value::Null)).map_err(err)
}

/// Metric tree from `(a, b, length)` edges; returns `(space, leaf sensors, step)`.
#[pyfunction]
#[pyo3(signature = (edges, extra=0))]
fn tree(edges: Vec<(usize, usize, f64)>, extra: usize) -> PyResult<(PyMetricSpace, Vec<usize>, f64)> {
    let s = ttlab::spaces::build_tree(&ttlab::spaces::TreeSpec::new(edges).map_err(err)?, extra).map_err(err)?;
    Ok((PyMetricSpace { inner: s.space }, s.sensors.indices().to_vec(), s.step))
}

#[pyfunction]
fn travel_time_data(space: &PyMetricSpace, sensors: Vec<usize>) -> PyResult<Vec<Vec<f64>>> {
    let data = ttlab::travel_time_data(&space.inner, &measurement_set(space, sensors)?).map_err(err)?;
    Ok(data.rows().map(<[f64]>::to_vec).collect())
}

#[pyfunction]
#[pyo3(signature = (space, sensors, eps, tol=0.0))]
fn check_flie<'py>(py: Python<'py>, space: &PyMetricSpace, sensors: Vec<usize>, eps: f64, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let s = measurement_set(space, sensors)?;
    let r = py.detach(|| ttlab::check_flie(&space.inner, &s, eps, tol)).map_err(err)?;
    report(py, &r)
}

#[pyfunction]
#[pyo3(signature = (space, sensors, eps, tol=0.0))]
fn check_blie<'py>(py: Python<'py>, space: &PyMetricSpace, sensors: Vec<usize>, eps: f64, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let s = measurement_set(space, sensors)?;
    let r = py.detach(|| ttlab::check_blie(&space.inner, &s, eps, tol)).map_err(err)?;
    report(py, &r)
}

#[pyfunction]
#[pyo3(signature = (space, sensors, eps, tol=0.0))]
fn midpoint_test<'py>(py: Python<'py>, space: &PyMetricSpace, sensors: Vec<usize>, eps: f64, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let data = ttlab::travel_time_data(&space.inner, &measurement_set(space, sensors)?).map_err(err)?;
    let r = ttlab::midpoint_test(&data, eps, tol).map_err(err)?;
    report(py, &r)
}

/// Hausdorff distance of the travel time data of two spaces, sensors
/// matched by position unless `phi` is given.
#[pyfunction]
#[pyo3(signature = (a, sensors_a, b, sensors_b, phi=None))]
fn data_hausdorff(
    a: &PyMetricSpace,
    sensors_a: Vec<usize>,
    b: &PyMetricSpace,
    sensors_b: Vec<usize>,
    phi: Option<Vec<usize>>,
) -> PyResult<f64> {
    let n = sensors_a.len();
    let da = ttlab::travel_time_data(&a.inner, &measurement_set(a, sensors_a)?).map_err(err)?;
    let db = ttlab::travel_time_data(&b.inner, &measurement_set(b, sensors_b)?).map_err(err)?;
    let phi = match phi {
        Some(m) => SensorMatching::new(m).map_err(err)?,
        None => SensorMatching::identity(n),
    };
    ttlab::data_hausdorff(&da, &db, &phi).map_err(err)
}

#[pyfunction]
fn hausdorff(space: &PyMetricSpace, a: Vec<usize>, b: Vec<usize>) -> PyResult<f64> {
    ttlab::hausdorff(&space.inner, &a, &b).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (x, y, cap=5))]
fn gh_exact_small(x: &PyMetricSpace, y: &PyMetricSpace, cap: usize) -> PyResult<f64> {
    ttlab::gh_exact_small(&x.inner, &y.inner, cap).map_err(err)
}

/// Lower/upper bounds, plus the exact value under the cap.
#[pyfunction]
#[pyo3(signature = (x, y, cap=5, eps=None))]
fn gh_estimate<'py>(py: Python<'py>, x: &PyMetricSpace, y: &PyMetricSpace, cap: usize, eps: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
    let est = match eps {
        Some(e) => ttlab::truncated_gh(&x.inner, &y.inner, e, cap),
        None => ttlab::gh_estimate(&x.inner, &y.inner, cap),
    }
    .map_err(err)?;
    report(py, &est)
}

fn profile(k: f64, sigma: f64) -> PyResult<RadialProfile> {
    RadialProfile::gaussian_dip(k, sigma).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (r, k=1.6, sigma=0.4))]
fn opening_angle(r: f64, k: f64, sigma: f64) -> PyResult<f64> {
    herglotz::opening_angle(&profile(k, sigma)?, r).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (r, k=1.6, sigma=0.4))]
fn half_length(r: f64, k: f64, sigma: f64) -> PyResult<f64> {
    herglotz::half_length(&profile(k, sigma)?, r).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (r0, k=1.6, sigma=0.4, bracket_grid=100))]
fn conjugate_radii(py: Python<'_>, r0: f64, k: f64, sigma: f64, bracket_grid: usize) -> PyResult<Vec<f64>> {
    let p = profile(k, sigma)?;
    py.detach(|| herglotz::conjugate_radii(&p, r0, bracket_grid)).map_err(err)
}

/// Minimality margin summary: `delta` (None when nothing fails), the
/// number of meetings examined and failing, and the certified FLIE bound.
#[pyfunction]
#[pyo3(signature = (grid=herglotz::DEFAULT_GRID, k=1.6, sigma=0.4))]
fn minimality_margin<'py>(py: Python<'py>, grid: usize, k: f64, sigma: f64) -> PyResult<Bound<'py, PyAny>> {
    let p = profile(k, sigma)?;
    let r = py
        .detach(|| herglotz::find_intersecting_pairs(&p, grid).and_then(|t| herglotz::minimality_margin(&p, &t)))
        .map_err(err)?;
    let bound = if r.delta > 0.0 { herglotz::flie_from_delta(r.delta).ok() } else { None };
    let dict = PyDict::new(py);
    dict.set_item("delta", r.delta.is_finite().then_some(r.delta))?;
    dict.set_item("examined", r.examined)?;
    dict.set_item("failing", r.failing_triples.len())?;
    dict.set_item("flie_bound", bound.filter(|b| b.is_finite()))?;
    Ok(dict.into_any())
}

#[pymodule]
fn ttlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMetricSpace>()?;
    m.add_function(wrap_pyfunction!(read_space_file, m)?)?;
    m.add_function(wrap_pyfunction!(write_space_file, m)?)?;
    m.add_function(wrap_pyfunction!(tree, m)?)?;
    m.add_function(wrap_pyfunction!(travel_time_data, m)?)?;
    m.add_function(wrap_pyfunction!(check_flie, m)?)?;
    m.add_function(wrap_pyfunction!(check_blie, m)?)?;
    m.add_function(wrap_pyfunction!(midpoint_test, m)?)?;
    m.add_function(wrap_pyfunction!(data_hausdorff, m)?)?;
    m.add_function(wrap_pyfunction!(hausdorff, m)?)?;
    m.add_function(wrap_pyfunction!(gh_exact_small, m)?)?;
    m.add_function(wrap_pyfunction!(gh_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(opening_angle, m)?)?;
    m.add_function(wrap_pyfunction!(half_length, m)?)?;
    m.add_function(wrap_pyfunction!(conjugate_radii, m)?)?;
    m.add_function(wrap_pyfunction!(minimality_margin, m)?)?;
    Ok(())
}
