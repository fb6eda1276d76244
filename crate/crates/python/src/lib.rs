//! Python bindings: tensor trains, TT-SVD, factored pseudoinverses and both
//! DMD engines. Arrays cross the boundary as flat lists in first-index-fastest
//! order together with their dimensions.

use pyo3::exceptions::{PyArithmeticError, PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ttdmd::dmd::{self as engine, SnapshotMatrices, TtSnapshotPair, Variant};
use ttdmd::pinv::{self, Cutoff};
use ttdmd::tt::{self, DenseTensor, Shape};
use ttdmd::{io, synth, Complex64, TtError};

fn to_py(e: TtError) -> PyErr {
    match e {
        TtError::Argument(_) | TtError::Index { .. } | TtError::Format { .. } => PyValueError::new_err(e.to_string()),
        TtError::Degenerate(_) | TtError::Numerical(_) => PyArithmeticError::new_err(e.to_string()),
        TtError::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn dense(data: Vec<f64>, dims: Vec<usize>) -> PyResult<DenseTensor> {
    DenseTensor::new(Shape::new(dims).map_err(to_py)?, data).map_err(to_py)
}

fn variant(name: &str) -> PyResult<Variant> {
    name.parse().map_err(to_py)
}

#[pyclass(name = "TensorTrain", module = "ttdmd", skip_from_py_object)]
#[derive(Clone)]
pub struct PyTensorTrain {
    inner: tt::TensorTrain,
}

#[pymethods]
impl PyTensorTrain {
    /// TT-SVD of a dense tensor given as flat data and dimensions.
    #[staticmethod]
    #[pyo3(signature = (data, dims, epsilon = 0.0))]
    fn from_dense(data: Vec<f64>, dims: Vec<usize>, epsilon: f64) -> PyResult<Self> {
        let x = dense(data, dims)?;
        Ok(PyTensorTrain {
            inner: tt::tt_svd(&x, epsilon).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyTensorTrain {
            inner: io::read_train(path).map_err(to_py)?,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        io::write_train(path, &self.inner).map_err(to_py)
    }

    #[getter]
    fn ranks(&self) -> Vec<usize> {
        self.inner.ranks()
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.shape().dims().to_vec()
    }

    #[getter]
    fn storage(&self) -> usize {
        self.inner.storage()
    }

    fn to_dense(&self) -> Vec<f64> {
        self.inner.to_dense().into_data()
    }

    fn norm(&self) -> f64 {
        tt::tt_norm(&self.inner)
    }

    fn dot(&self, other: &PyTensorTrain) -> PyResult<f64> {
        tt::tt_dot(&self.inner, &other.inner).map_err(to_py)
    }

    /// Dense pseudoinverse of the unfolding with `split` row axes, as rows.
    #[pyo3(signature = (split, relative_cutoff = None))]
    fn pinv(&self, split: usize, relative_cutoff: Option<f64>) -> PyResult<Vec<Vec<f64>>> {
        let cutoff = relative_cutoff.map_or(Cutoff::Roundoff, Cutoff::Relative);
        let p = pinv::tt_pinv(&self.inner, split, self.inner.ortho(), cutoff).map_err(to_py)?;
        let m = p.to_dense();
        Ok(m.row_iter().map(|r| r.iter().copied().collect()).collect())
    }

    fn __repr__(&self) -> String {
        format!("TensorTrain(dims={:?}, ranks={:?})", self.dims(), self.ranks())
    }
}

#[pyclass(name = "DmdResult", module = "ttdmd")]
pub struct PyDmdResult {
    inner: engine::DmdResult,
}

#[pymethods]
impl PyDmdResult {
    #[getter]
    fn variant(&self) -> String {
        self.inner.variant.to_string()
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<Complex64> {
        self.inner.eigenvalues.clone()
    }

    #[getter]
    fn frequencies(&self) -> Vec<Option<f64>> {
        self.inner.frequencies.clone()
    }

    #[getter]
    fn omitted(&self) -> Vec<Complex64> {
        self.inner.omitted.clone()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank
    }

    /// Modes as a list of columns, each normalized to max-modulus 1.
    fn modes(&self) -> PyResult<Vec<Vec<Complex64>>> {
        let m = self.inner.dense_modes().map_err(to_py)?;
        Ok(m.column_iter().map(|c| c.iter().copied().collect()).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "DmdResult(variant={}, rank={}, eigenvalues={})",
            self.inner.variant,
            self.inner.rank,
            self.inner.eigenvalues.len()
        )
    }
}

/// DMD on a series with the time axis last, using the TT engine.
#[pyfunction]
#[pyo3(signature = (data, dims, dt, variant = "standard", epsilon = 0.0))]
fn tt_dmd(data: Vec<f64>, dims: Vec<usize>, dt: f64, variant: &str, epsilon: f64) -> PyResult<PyDmdResult> {
    let v = self::variant(variant)?;
    let series = dense(data, dims)?;
    let (_, pair) = synth::build_xy(&series, dt, epsilon).map_err(to_py)?;
    run_tt(&pair, v)
}

fn run_tt(pair: &TtSnapshotPair, v: Variant) -> PyResult<PyDmdResult> {
    Ok(PyDmdResult {
        inner: engine::tt_dmd(pair, v, Cutoff::Roundoff).map_err(to_py)?,
    })
}

/// DMD on snapshot trains `x`, `y` (snapshot axis last).
#[pyfunction]
#[pyo3(signature = (x, y, dt, variant = "standard"))]
fn tt_dmd_trains(x: &PyTensorTrain, y: &PyTensorTrain, dt: f64, variant: &str) -> PyResult<PyDmdResult> {
    let pair = TtSnapshotPair::new(x.inner.clone(), y.inner.clone(), dt).map_err(to_py)?;
    run_tt(&pair, self::variant(variant)?)
}

/// DMD on a series with the time axis last, using dense matrices.
#[pyfunction]
#[pyo3(signature = (data, dims, dt, variant = "standard"))]
fn dense_dmd(data: Vec<f64>, dims: Vec<usize>, dt: f64, variant: &str) -> PyResult<PyDmdResult> {
    let v = self::variant(variant)?;
    let series = dense(data, dims)?;
    let (x, y) = synth::split_series(&series).map_err(to_py)?;
    let s = SnapshotMatrices::from_tensors(&x, &y, dt).map_err(to_py)?;
    let r = match v {
        Variant::Standard => engine::standard_dmd(&s, Cutoff::Roundoff),
        Variant::Exact => engine::exact_dmd(&s, Cutoff::Roundoff),
    };
    Ok(PyDmdResult { inner: r.map_err(to_py)? })
}

/// Two traveling waves (`omega dt` of 0.3 and 0.7). Returns `(data, dims)`.
#[pyfunction]
fn two_mode_series(dims: Vec<usize>, snapshots: usize, dt: f64) -> PyResult<(Vec<f64>, Vec<usize>)> {
    let spec = synth::two_mode(&dims, snapshots, dt).map_err(to_py)?;
    let s = synth::generate_series(&spec).map_err(to_py)?;
    let out_dims = s.shape().dims().to_vec();
    Ok((s.into_data(), out_dims))
}

/// Read a TTDN file as `(data, dims)`.
#[pyfunction]
fn read_dense(path: &str) -> PyResult<(Vec<f64>, Vec<usize>)> {
    let t = io::read_dense(path).map_err(to_py)?;
    let dims = t.shape().dims().to_vec();
    Ok((t.into_data(), dims))
}

#[pyfunction]
fn write_dense(path: &str, data: Vec<f64>, dims: Vec<usize>) -> PyResult<()> {
    io::write_dense(path, &dense(data, dims)?).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "ttdmd")]
pub fn ttdmd_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTensorTrain>()?;
    m.add_class::<PyDmdResult>()?;
    m.add_function(wrap_pyfunction!(tt_dmd, m)?)?;
    m.add_function(wrap_pyfunction!(tt_dmd_trains, m)?)?;
    m.add_function(wrap_pyfunction!(dense_dmd, m)?)?;
    m.add_function(wrap_pyfunction!(two_mode_series, m)?)?;
    m.add_function(wrap_pyfunction!(read_dense, m)?)?;
    m.add_function(wrap_pyfunction!(write_dense, m)?)?;
    Ok(())
}
