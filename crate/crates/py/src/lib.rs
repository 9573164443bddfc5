use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use mulbasis::basis::Mode;
use mulbasis::pipeline::{self, RunReport};
use mulbasis::presentation::Presentation;
use mulbasis::verify::verify_document;
use mulbasis::witness::{default_context, family_report, FamilyKind};
use mulbasis::Field;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_field(name: Option<&str>) -> PyResult<Option<Field>> {
    let Some(s) = name else { return Ok(None) };
    if s == "Q" {
        return Ok(Some(Field::Rational));
    }
    let digits = s.trim_start_matches('F').trim_start_matches('p');
    let p: u64 = digits.parse().map_err(|_| value_error(format!("unknown field {s:?}")))?;
    Field::prime(p).map(Some).map_err(value_error)
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    match mode {
        "numeric" => Ok(Mode::Numeric),
        "symbolic" => Ok(Mode::Symbolic),
        _ => Err(value_error(format!("unknown mode {mode:?}"))),
    }
}

fn loads<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// A matrix presentation of a module over an aggregate.
#[pyclass(name = "Presentation", module = "mulbasis_py", frozen)]
struct PyPresentation {
    inner: Presentation,
}

#[pymethods]
impl PyPresentation {
    /// Parses a JSON document, optionally reading entries over another field ("Q", "F5").
    #[new]
    #[pyo3(signature = (text, field=None))]
    fn new(text: &str, field: Option<&str>) -> PyResult<Self> {
        let inner = pipeline::load_presentation(text, parse_field(field)?).map_err(value_error)?;
        Ok(PyPresentation { inner })
    }

    #[getter]
    fn field(&self) -> String {
        self.inner.field.to_string()
    }

    #[getter]
    fn objects(&self) -> Vec<(String, usize)> {
        self.inner.objects.iter().map(|o| (o.name.clone(), o.dim)).collect()
    }

    fn is_valid(&self) -> bool {
        self.inner.validate().is_valid()
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.inner.to_document()).expect("document serializes")
    }

    #[pyo3(signature = (mode="numeric"))]
    fn analyze<'py>(&self, py: Python<'py>, mode: &str) -> PyResult<Bound<'py, PyAny>> {
        let r = pipeline::analyze(&self.inner, parse_mode(mode)?).report;
        report(py, &r)
    }

    #[pyo3(signature = (mode="numeric"))]
    fn normalize<'py>(&self, py: Python<'py>, mode: &str) -> PyResult<Bound<'py, PyAny>> {
        report(py, &pipeline::normalize(&self.inner, parse_mode(mode)?))
    }

    #[pyo3(signature = (mode="numeric"))]
    fn certify<'py>(&self, py: Python<'py>, mode: &str) -> PyResult<Bound<'py, PyAny>> {
        report(py, &pipeline::certify(&self.inner, parse_mode(mode)?))
    }

    fn __repr__(&self) -> String {
        let objs: Vec<String> = self.inner.objects.iter().map(|o| format!("{}({})", o.name, o.dim)).collect();
        format!("Presentation({}, [{}])", self.inner.field, objs.join(", "))
    }
}

fn report<'py>(py: Python<'py>, r: &RunReport) -> PyResult<Bound<'py, PyAny>> {
    let d = loads(py, &r.to_json())?;
    d.set_item("exit_code", r.exit_code())?;
    Ok(d)
}

/// Witness family report as a dict; `separates` is true when distinct parameters are nonisomorphic.
#[pyfunction]
#[pyo3(signature = (family, params, field="Q", seed=0))]
fn witness<'py>(py: Python<'py>, family: &str, params: Vec<String>, field: &str, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let kind: FamilyKind = family.parse().map_err(value_error)?;
    let field = parse_field(Some(field))?.unwrap_or(Field::Rational);
    let params = params
        .iter()
        .map(|s| field.parse_entry(s).map_err(value_error))
        .collect::<PyResult<Vec<_>>>()?;
    let ctx = default_context(kind, field);
    let r = family_report(kind, &ctx, &params, seed).map_err(value_error)?;
    let d = loads(py, &serde_json::to_string(&r).expect("report serializes"))?;
    d.set_item("separates", r.separates())?;
    Ok(d)
}

/// Checks a basis document (or a normalize report) without synthesis.
#[pyfunction]
#[pyo3(signature = (text, field=None))]
fn verify<'py>(py: Python<'py>, text: &str, field: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    let (_, r) = verify_document(text, parse_field(field)?).map_err(value_error)?;
    loads(py, &serde_json::to_string(&r).expect("report serializes"))
}

#[pymodule]
fn mulbasis_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPresentation>()?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
