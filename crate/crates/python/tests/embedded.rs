use pyo3::prelude::*;
use ttdmd_py::ttdmd_module;

#[test]
fn module_imports_and_runs() {
    pyo3::append_to_inittab!(ttdmd_module);
    Python::initialize();
    Python::attach(|py| {
        py.run(
            cr#"
import cmath
import ttdmd

data, dims = ttdmd.two_mode_series([5, 4], 10, 0.1)
tt = ttdmd.TensorTrain.from_dense(data, dims)
assert tt.dims == [5, 4, 11]
res = ttdmd.tt_dmd(data, dims, 0.1, "exact")
assert len(res.eigenvalues) == 4
assert min(abs(cmath.exp(0.7j) - z) for z in res.eigenvalues) < 1e-6
assert all(f is not None for f in res.frequencies)
try:
    ttdmd.tt_dmd(data, dims, 0.1, "bogus")
except ValueError:
    pass
else:
    raise AssertionError("unknown variant accepted")
"#,
            None,
            None,
        )
        .unwrap();
    });
}
