use pyo3::prelude::*;

#[pymodule]
fn proxal_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
