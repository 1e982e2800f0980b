//! Python bindings: canonical rational expressions in the jet variables,
//! classification by the four relative invariants, and construction of
//! linearizing point transformations. All values cross the boundary as
//! exact canonical strings; nothing is floating point.

use maxsym_core::{
    parse, synthesize, Hints, JetVar, Ode3, PointTransform, RationalExpr, SynthesisOptions,
    SynthesisResult, Verdict,
};
use pyo3::exceptions::{PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn parse_expr(text: &str) -> PyResult<RationalExpr> {
    parse(text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn jet_var(name: &str) -> PyResult<JetVar> {
    match name {
        "x" => Ok(JetVar::X),
        "u" => Ok(JetVar::U),
        "p" | "u'" => Ok(JetVar::P),
        "q" | "u''" => Ok(JetVar::Q),
        other => Err(PyValueError::new_err(format!(
            "unknown jet variable `{other}` (use x, u, p/u', q/u'')"
        ))),
    }
}

fn transform(phi: &str, psi: &str) -> PyResult<PointTransform> {
    let phi = parse_expr(phi)?;
    let psi = parse_expr(psi)?;
    PointTransform::new(phi, psi).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Exact rational expression in the jet variables x, u, p = u', q = u'',
/// kept in canonical form: equal values are structurally identical.
#[pyclass(frozen)]
#[derive(Clone)]
struct Expr {
    inner: RationalExpr,
}

#[pymethods]
impl Expr {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Expr {
            inner: parse_expr(text)?,
        })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expr({:?})", self.inner.to_string())
    }

    fn __eq__(&self, other: &Expr) -> bool {
        self.inner == other.inner
    }

    fn __add__(&self, other: &Expr) -> Expr {
        Expr {
            inner: &self.inner + &other.inner,
        }
    }

    fn __sub__(&self, other: &Expr) -> Expr {
        Expr {
            inner: &self.inner - &other.inner,
        }
    }

    fn __mul__(&self, other: &Expr) -> Expr {
        Expr {
            inner: &self.inner * &other.inner,
        }
    }

    fn __truediv__(&self, other: &Expr) -> PyResult<Expr> {
        self.inner
            .checked_div(&other.inner)
            .map(|inner| Expr { inner })
            .map_err(|e| PyZeroDivisionError::new_err(e.to_string()))
    }

    fn __neg__(&self) -> Expr {
        Expr {
            inner: -&self.inner,
        }
    }

    /// Exact partial derivative with respect to a jet variable.
    fn partial(&self, var: &str) -> PyResult<Expr> {
        Ok(Expr {
            inner: self.inner.partial(jet_var(var)?),
        })
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    /// Exact evaluation at rational coordinates given as strings or ints,
    /// e.g. eval("1/2", "0", "-1", "3"). Returns the exact rational string.
    fn eval(&self, x: &str, u: &str, p: &str, q: &str) -> PyResult<String> {
        let mut point = Vec::with_capacity(4);
        for text in [x, u, p, q] {
            let e = parse_expr(text)?;
            let c = e.constant_value().ok_or_else(|| {
                PyValueError::new_err(format!("`{text}` is not a rational constant"))
            })?;
            point.push(c);
        }
        self.inner
            .eval(&point)
            .map(|v| v.to_string())
            .map_err(|e| PyZeroDivisionError::new_err(e.to_string()))
    }
}

/// Parse and return the canonical printed form.
#[pyfunction]
fn canonical(text: &str) -> PyResult<String> {
    Ok(parse_expr(text)?.to_string())
}

/// Total derivative along solutions of u''' = f: g_x + p g_u + q g_p + f g_q.
#[pyfunction]
fn total_derivative(g: &str, f: &str) -> PyResult<String> {
    let g = parse_expr(g)?;
    let f = parse_expr(f)?;
    Ok(maxsym_core::total_derivative(&g, &f).to_string())
}

/// Classify u''' = f: returns a dict with the four relative invariants,
/// their vanishing flags, the verdict and the witness (first nonvanishing
/// invariant) when not maximally symmetric.
#[pyfunction]
fn classify<'py>(py: Python<'py>, f: &str) -> PyResult<Bound<'py, PyDict>> {
    let expr = parse_expr(f)?;
    let rep = Ode3::new(expr.clone()).invariants();
    let out = PyDict::new(py);
    out.set_item("input", expr.to_string())?;
    let inv = PyDict::new(py);
    inv.set_item("i1", rep.i1.to_string())?;
    inv.set_item("i2", rep.i2.to_string())?;
    inv.set_item("i3", rep.i3.to_string())?;
    inv.set_item("i4", rep.i4.to_string())?;
    out.set_item("invariants", inv)?;
    out.set_item("vanishing", rep.vanishing.to_vec())?;
    out.set_item(
        "verdict",
        match rep.verdict {
            Verdict::MaximallySymmetric => "MaximallySymmetric",
            Verdict::NotMaximallySymmetric => "NotMaximallySymmetric",
        },
    )?;
    out.set_item("witness", rep.witness.map(|k| format!("I{k}")))?;
    Ok(out)
}

/// Check that (phi, psi) maps every solution of u''' = f to a solution of
/// ubar''' = 0.
#[pyfunction]
fn verify(f: &str, phi: &str, psi: &str) -> PyResult<bool> {
    let ode = Ode3::new(parse_expr(f)?);
    Ok(transform(phi, psi)?.verify(&ode))
}

/// The ODE mapped onto ubar''' = target by (phi, psi), in canonical form.
#[pyfunction]
#[pyo3(signature = (phi, psi, target = "0"))]
fn pullback(phi: &str, psi: &str, target: &str) -> PyResult<String> {
    let target = parse_expr(target)?;
    Ok(transform(phi, psi)?.pullback(&target).rhs().to_string())
}

/// The auxiliary functions (a1, a2, a3) induced by (phi, psi) for u''' = f.
#[pyfunction]
fn aux_functions<'py>(
    py: Python<'py>,
    f: &str,
    phi: &str,
    psi: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let f = parse_expr(f)?;
    let aux = transform(phi, psi)?.aux_triple(&f);
    let out = PyDict::new(py);
    out.set_item("a1", aux.a1.to_string())?;
    out.set_item("a2", aux.a2.to_string())?;
    out.set_item("a3", aux.a3.to_string())?;
    Ok(out)
}

/// Construct a verified linearizing transformation for u''' = f.
///
/// Returns a dict with `status` one of "ok", "partial", "not-applicable";
/// on success `transformation`, `auxiliaries` and the stage `trace` are
/// present. Optional hints replace solver stages after validation.
#[pyfunction]
#[pyo3(signature = (f, max_degree = 6, riccati_degree = 4, a3 = None, a2 = None, f2 = None, phi = None, psi = None))]
#[allow(clippy::too_many_arguments)]
fn synthesize_transform<'py>(
    py: Python<'py>,
    f: &str,
    max_degree: u32,
    riccati_degree: u32,
    a3: Option<&str>,
    a2: Option<&str>,
    f2: Option<&str>,
    phi: Option<&str>,
    psi: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let expr = parse_expr(f)?;
    let mut hints = Hints::default();
    if let Some(t) = a3 {
        hints.a3 = Some(parse_expr(t)?);
    }
    if let Some(t) = a2 {
        hints.a2 = Some(parse_expr(t)?);
    }
    if let Some(t) = f2 {
        hints.f2 = Some(parse_expr(t)?);
    }
    if let Some(t) = phi {
        hints.phi = Some(parse_expr(t)?);
    }
    if let Some(t) = psi {
        hints.psi = Some(parse_expr(t)?);
    }
    let options = SynthesisOptions {
        max_degree,
        riccati_degree,
        hints,
    };
    let out = PyDict::new(py);
    out.set_item("input", expr.to_string())?;
    match synthesize(&Ode3::new(expr), &options) {
        SynthesisResult::Success {
            transform,
            aux,
            trace,
        } => {
            out.set_item("status", "ok")?;
            let t = PyDict::new(py);
            t.set_item("phi", transform.phi().to_string())?;
            t.set_item("psi", transform.psi().to_string())?;
            out.set_item("transformation", t)?;
            let a = PyDict::new(py);
            a.set_item("a1", aux.a1.to_string())?;
            a.set_item("a2", aux.a2.to_string())?;
            a.set_item("a3", aux.a3.to_string())?;
            out.set_item("auxiliaries", a)?;
            out.set_item("trace", trace_list(py, &trace.steps)?)?;
        }
        SynthesisResult::Partial {
            trace,
            blocking,
            error,
            ..
        } => {
            out.set_item("status", "partial")?;
            out.set_item("blocking_stage", blocking.to_string())?;
            out.set_item("error", error.to_string())?;
            out.set_item("trace", trace_list(py, &trace.steps)?)?;
        }
        SynthesisResult::NotApplicable { witness, .. } => {
            out.set_item("status", "not-applicable")?;
            out.set_item("witness", format!("I{witness}"))?;
        }
    }
    Ok(out)
}

fn trace_list<'py>(
    py: Python<'py>,
    steps: &[maxsym_core::synthesis::TraceStep],
) -> PyResult<Bound<'py, PyList>> {
    let list = PyList::empty(py);
    for step in steps {
        let d = PyDict::new(py);
        d.set_item("stage", step.stage.to_string())?;
        d.set_item("equation", &step.equation)?;
        d.set_item("ansatz", &step.ansatz)?;
        d.set_item("result", &step.result)?;
        d.set_item("residual-check", &step.residual_check)?;
        list.append(d)?;
    }
    Ok(list)
}

#[pymodule]
fn maxsym(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Expr>()?;
    m.add_function(wrap_pyfunction!(canonical, m)?)?;
    m.add_function(wrap_pyfunction!(total_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(pullback, m)?)?;
    m.add_function(wrap_pyfunction!(aux_functions, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize_transform, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
