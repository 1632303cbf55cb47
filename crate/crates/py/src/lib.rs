//! Python module `duts`.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use duts_core::certificate::{self, ConstructionCertificate};
use duts_core::construct::{construct as build, Caps, Problem};
use duts_core::poly::{CenteredPolynomial, DegreeWindow};
use duts_core::probe::{probe as run_probe, Schedule};
use duts_core::runge::Tolerances;
use duts_core::sequence::{self, SequenceSpec, Verdict};
use duts_core::sets::{sample, SampledSet, SetSpec};
use duts_core::solver::{self, FitGrid, FitTask, SolverOptions};
use duts_core::target::TargetFunction;
use duts_core::Error;

create_exception!(duts, RefusedError, PyValueError, "The index sequence has a bounded ratio.");
create_exception!(duts, ExhaustedError, PyRuntimeError, "A search cap was reached.");

fn err(e: Error) -> PyErr {
    match e {
        Error::BoundedRatio { .. } => RefusedError::new_err(e.to_string()),
        Error::CandidatesExhausted { .. }
        | Error::ApproximationFailure { .. }
        | Error::SubsequenceExhausted { .. } => ExhaustedError::new_err(e.to_string()),
        Error::Internal(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Polynomial in powers of `z - center`, ascending coefficients.
#[pyclass(name = "Polynomial", module = "duts", frozen)]
struct Polynomial(CenteredPolynomial);

#[pymethods]
impl Polynomial {
    #[new]
    fn new(center: Complex64, coeffs: Vec<Complex64>) -> PyResult<Self> {
        CenteredPolynomial::new(center, coeffs).map(Polynomial).map_err(err)
    }

    #[getter]
    fn center(&self) -> Complex64 {
        self.0.center()
    }

    #[getter]
    fn coeffs(&self) -> Vec<Complex64> {
        self.0.coeffs().to_vec()
    }

    fn degree(&self) -> i64 {
        self.0.degree()
    }

    fn __call__(&self, z: Complex64) -> Complex64 {
        self.0.evaluate(z)
    }

    fn evaluate(&self, z: Complex64) -> Complex64 {
        self.0.evaluate(z)
    }

    fn recenter(&self, center: Complex64) -> Self {
        Polynomial(self.0.recenter(center))
    }

    fn partial_sum(&self, n: usize) -> Self {
        Polynomial(self.0.partial_sum(n))
    }

    fn __add__(&self, other: &Polynomial) -> Self {
        Polynomial(self.0.add(&other.0))
    }

    fn to_text(&self) -> String {
        self.0.to_coefficient_text()
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        CenteredPolynomial::from_coefficient_text(text).map(Polynomial).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Polynomial(center={}, degree={})", self.0.center(), self.0.degree())
    }
}

/// Compact set description.
#[pyclass(name = "Set", module = "duts", frozen)]
struct Set(SetSpec);

#[pymethods]
impl Set {
    #[staticmethod]
    fn disk(center: Complex64, radius: f64) -> PyResult<Self> {
        Set::checked(SetSpec::disk(center, radius))
    }

    #[staticmethod]
    fn segment(a: Complex64, b: Complex64) -> PyResult<Self> {
        Set::checked(SetSpec::segment(a, b))
    }

    #[staticmethod]
    #[pyo3(signature = (vertices, filled = true))]
    fn polygon(vertices: Vec<Complex64>, filled: bool) -> PyResult<Self> {
        Set::checked(SetSpec::polygon(vertices, filled))
    }

    #[staticmethod]
    fn union(members: Vec<PyRef<'_, Set>>) -> PyResult<Self> {
        Set::checked(SetSpec::Union(members.iter().map(|m| m.0.clone()).collect()))
    }

    /// Boundary and interior grid points at the given density.
    fn sample(&self, density: f64) -> PyResult<Vec<Complex64>> {
        Ok(sample(&self.0, density).map_err(err)?.points().to_vec())
    }

    fn contains(&self, z: Complex64) -> bool {
        self.0.contains(z, 0.0)
    }

    fn __repr__(&self) -> String {
        format!("Set({})", self.0.to_tokens())
    }
}

impl Set {
    fn checked(spec: SetSpec) -> PyResult<Self> {
        spec.validate().map_err(err)?;
        Ok(Set(spec))
    }

    fn sampled(&self, density: f64) -> PyResult<SampledSet> {
        sample(&self.0, density).map_err(err)
    }
}

/// Function to approximate.
#[pyclass(name = "Target", module = "duts", frozen)]
struct Target(TargetFunction);

#[pymethods]
impl Target {
    #[staticmethod]
    fn zero() -> Self {
        Target(TargetFunction::zero())
    }

    #[staticmethod]
    fn constant(c: Complex64) -> Self {
        Target(TargetFunction::constant(c))
    }

    #[staticmethod]
    fn identity() -> Self {
        Target(TargetFunction::identity())
    }

    /// `1 / (z - a)`.
    #[staticmethod]
    fn pole(a: Complex64) -> PyResult<Self> {
        TargetFunction::simple_pole(a).map(Target).map_err(err)
    }

    #[staticmethod]
    fn polynomial(p: &Polynomial) -> Self {
        Target(TargetFunction::Polynomial(p.0.clone()))
    }

    #[staticmethod]
    fn rational(numerator: &Polynomial, denominator: &Polynomial) -> PyResult<Self> {
        TargetFunction::rational(numerator.0.clone(), denominator.0.clone())
            .map(Target)
            .map_err(err)
    }

    fn __call__(&self, z: Complex64) -> PyResult<Complex64> {
        self.0.evaluate(z).map_err(err)
    }
}

#[pyclass(name = "Certificate", module = "duts", frozen)]
struct Certificate(ConstructionCertificate);

#[pymethods]
impl Certificate {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        ConstructionCertificate::from_text(text).map(Certificate).map_err(err)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[getter]
    fn n0(&self) -> u64 {
        self.0.n0
    }

    #[getter]
    fn mu(&self) -> u64 {
        self.0.mu
    }

    #[getter]
    fn lambda_mu(&self) -> u64 {
        self.0.lambda_mu
    }

    #[getter]
    fn zeta0(&self) -> Complex64 {
        self.0.zeta0
    }

    /// `(L, K1, K2)` on the construction grids.
    #[getter]
    fn residuals(&self) -> (f64, f64, f64) {
        (self.0.residual_l, self.0.residual_k1, self.0.residual_k2)
    }

    #[getter]
    fn f(&self) -> Polynomial {
        Polynomial(self.0.f.clone())
    }

    #[getter]
    fn p(&self) -> Polynomial {
        Polynomial(self.0.p.clone())
    }

    #[pyo3(signature = (density_multiplier = 4.0))]
    fn verify<'py>(&self, py: Python<'py>, density_multiplier: f64) -> PyResult<Bound<'py, PyDict>> {
        let r = py.detach(|| certificate::verify(&self.0, density_multiplier));
        let d = PyDict::new(py);
        d.set_item("passed", r.passed())?;
        d.set_item("residuals", r.residuals.to_vec())?;
        d.set_item("limits", r.limits.to_vec())?;
        d.set_item("identities_hold", r.identities_hold)?;
        d.set_item("failures", r.failures)?;
        Ok(d)
    }
}

/// Minimax fit over the window `low..=high` in powers of `z - center`.
/// `grids` holds `(name, points, targets)`.
#[pyfunction]
#[pyo3(signature = (grids, low, high, center = Complex64::new(0.0, 0.0), method = "lawson", facets = solver::DEFAULT_FACETS))]
fn solve_window<'py>(
    py: Python<'py>,
    grids: Vec<(String, Vec<Complex64>, Vec<Complex64>)>,
    low: usize,
    high: usize,
    center: Complex64,
    method: &str,
    facets: usize,
) -> PyResult<(Polynomial, Bound<'py, PyDict>)> {
    let grids = grids
        .into_iter()
        .map(|(name, points, targets)| FitGrid::new(name, points, targets))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let task = FitTask::new(grids, DegreeWindow::new(low, high).map_err(err)?, center).map_err(err)?;
    let r = match method {
        "lawson" => py.detach(|| solver::solve_window(&task, &SolverOptions::default())),
        "lp" => py.detach(|| solver::lp_oracle(&task, facets)),
        _ => return Err(PyValueError::new_err("method must be \"lawson\" or \"lp\"")),
    }
    .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("objective", r.objective)?;
    d.set_item("lower_bound", r.lower_bound)?;
    d.set_item("errors", r.errors)?;
    d.set_item("iterations", r.iterations)?;
    d.set_item("converged", r.converged)?;
    Ok((Polynomial(r.polynomial), d))
}

/// Builds a certificate. `L`, `K1`, `K2` are `(Set, density)` pairs and
/// `sequence` is a formula in `n`.
#[pyfunction]
#[pyo3(signature = (zeta0, epsilon, s, sequence, L, K1, K2, g, f1, f2, omega = None))]
#[allow(non_snake_case, clippy::too_many_arguments)]
fn construct(
    py: Python<'_>,
    zeta0: Complex64,
    epsilon: f64,
    s: u64,
    sequence: &str,
    L: (PyRef<'_, Set>, f64),
    K1: (PyRef<'_, Set>, f64),
    K2: (PyRef<'_, Set>, f64),
    g: &Target,
    f1: &Target,
    f2: &Target,
    omega: Option<&Set>,
) -> PyResult<Certificate> {
    let problem = Problem {
        g: g.0.clone(),
        l: L.0.sampled(L.1)?,
        f1: f1.0.clone(),
        k1: K1.0.sampled(K1.1)?,
        f2: f2.0.clone(),
        k2: K2.0.sampled(K2.1)?,
        zeta0,
        sequence: SequenceSpec::formula(sequence).map_err(err)?,
        tol: Tolerances::new(epsilon, s).map_err(err)?,
        omega: omega.map(|o| o.0.clone()),
    };
    py.detach(|| build(&problem, &Caps::default()))
        .map(Certificate)
        .map_err(err)
}

/// Ratio scan of a formula sequence up to `horizon`.
#[pyfunction]
fn check_ratio<'py>(py: Python<'py>, sequence: &str, horizon: u64) -> PyResult<Bound<'py, PyDict>> {
    let seq = SequenceSpec::formula(sequence).map_err(err)?;
    let r = sequence::check_ratio(&seq, horizon).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("sup_ratio", r.sup_ratio)?;
    d.set_item("attained_at", r.attained_at)?;
    d.set_item("horizon", r.horizon)?;
    d.set_item("diverging", r.verdict == Verdict::Diverging)?;
    d.set_item("caveat", sequence::VERDICT_CAVEAT)?;
    Ok(d)
}

/// Discrete `d_{n,m}(f, K, L)` on grids of the given density.
#[pyfunction]
#[pyo3(signature = (f, K, L, n, m, density = 48.0))]
#[allow(non_snake_case)]
fn d_estimate(py: Python<'_>, f: &Target, K: &Set, L: &Set, n: usize, m: usize, density: f64) -> PyResult<f64> {
    let (k, l) = (K.sampled(density)?, L.sampled(density)?);
    let f_on_k = f.0.values_on(k.points()).map_err(err)?;
    py.detach(|| solver::d_estimate(&f_on_k, &k, &l, n, m, &SolverOptions::default()))
        .map(|d| d.value)
        .map_err(err)
}

/// Decay probe over `(tau, sigma)` pairs. Returns the CSV text.
#[pyfunction]
#[pyo3(signature = (f, K, L, pairs, density = 48.0))]
#[allow(non_snake_case)]
fn probe(py: Python<'_>, f: &Target, K: &Set, L: &Set, pairs: Vec<(usize, usize)>, density: f64) -> PyResult<String> {
    let (k, l) = (K.sampled(density)?, L.sampled(density)?);
    let sched = Schedule::new(pairs).map_err(err)?;
    py.detach(|| run_probe(&f.0, &k, &l, &sched, &SolverOptions::default()))
        .map(|r| r.to_csv())
        .map_err(err)
}

#[pymodule]
fn duts(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Polynomial>()?;
    m.add_class::<Set>()?;
    m.add_class::<Target>()?;
    m.add_class::<Certificate>()?;
    m.add_function(wrap_pyfunction!(solve_window, m)?)?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(check_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(d_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(probe, m)?)?;
    m.add("RefusedError", m.py().get_type::<RefusedError>())?;
    m.add("ExhaustedError", m.py().get_type::<ExhaustedError>())?;
    Ok(())
}
