//! Python bindings for `fbva_core`.

use fbva_core::exposure::{self, ExposureMatrix, Product, Side};
use fbva_core::ledger::{self, CashflowLedger};
use fbva_core::market::{self, DefaultOrder, DefaultScenario, HazardSource};
use fbva_core::scenario::{self, ReportFormat, RunOptions};
use fbva_core::xva::{self, AdjustmentKind, LoanMode};
use fbva_core::Error;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        Error::Config { .. } | Error::Domain(_) | Error::Json(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> OrPy<T> for fbva_core::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn parse_side(s: &str) -> PyResult<Side> {
    match s {
        "A" | "a" => Ok(Side::A),
        "B" | "b" => Ok(Side::B),
        _ => Err(PyValueError::new_err(format!("side must be 'A' or 'B', got {s:?}"))),
    }
}

fn side_str(s: Side) -> &'static str {
    match s {
        Side::A => "A",
        Side::B => "B",
    }
}

fn parse_source(s: &str) -> PyResult<HazardSource> {
    match s {
        "cds" => Ok(HazardSource::Cds),
        "asw" => Ok(HazardSource::Asw),
        _ => Err(PyValueError::new_err(format!("source must be 'cds' or 'asw', got {s:?}"))),
    }
}

fn parse_mode(s: &str) -> PyResult<LoanMode> {
    match s {
        "unilateral" => Ok(LoanMode::Unilateral),
        "bilateral" => Ok(LoanMode::Bilateral),
        _ => Err(PyValueError::new_err(format!("mode must be 'unilateral' or 'bilateral', got {s:?}"))),
    }
}

fn to_json<'py>(obj: &Bound<'py, PyAny>) -> PyResult<String> {
    obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()
}

#[pyclass(name = "TimeGrid", module = "fbva", frozen)]
struct PyTimeGrid(market::TimeGrid);

#[pymethods]
impl PyTimeGrid {
    #[new]
    fn new(dates: Vec<f64>) -> PyResult<Self> {
        market::TimeGrid::new(dates).py_err().map(Self)
    }

    #[staticmethod]
    fn uniform(end: f64, step: f64) -> PyResult<Self> {
        market::TimeGrid::uniform(end, step).py_err().map(Self)
    }

    #[getter]
    fn dates(&self) -> Vec<f64> {
        self.0.dates().to_vec()
    }

    /// Accrual fractions, one per period.
    #[getter]
    fn accruals(&self) -> Vec<f64> {
        self.0.accruals().to_vec()
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.0.horizon()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("TimeGrid({} dates to {})", self.0.len(), self.0.horizon())
    }
}

#[pyclass(name = "DiscountCurve", module = "fbva", frozen)]
struct PyDiscountCurve(market::DiscountCurve);

#[pymethods]
impl PyDiscountCurve {
    /// `pillars` is a list of `(time, zero_rate)` with continuously compounded rates.
    #[new]
    fn new(pillars: Vec<(f64, f64)>) -> PyResult<Self> {
        market::DiscountCurve::new(pillars).py_err().map(Self)
    }

    #[staticmethod]
    fn flat(rate: f64) -> Self {
        Self(market::DiscountCurve::flat(rate))
    }

    fn df(&self, t: f64) -> f64 {
        self.0.df(t)
    }

    fn discount_factor(&self, t1: f64, t2: f64) -> PyResult<f64> {
        self.0.discount_factor(t1, t2).py_err()
    }

    fn forward_accrual_rate(&self, grid: &PyTimeGrid, k: usize) -> PyResult<f64> {
        self.0.forward_accrual_rate(&grid.0, k).py_err()
    }
}

#[pyclass(name = "HazardCurve", module = "fbva", frozen)]
struct PyHazardCurve(market::HazardCurve);

#[pymethods]
impl PyHazardCurve {
    /// `pillars` is a list of `(start_time, intensity)`; the first start must be 0.
    #[new]
    fn new(pillars: Vec<(f64, f64)>) -> PyResult<Self> {
        market::HazardCurve::new(pillars).py_err().map(Self)
    }

    #[staticmethod]
    fn flat(intensity: f64) -> PyResult<Self> {
        market::HazardCurve::flat(intensity).py_err().map(Self)
    }

    #[staticmethod]
    fn from_spread(spread: f64, recovery: f64) -> PyResult<Self> {
        market::HazardCurve::from_spread(spread, recovery).py_err().map(Self)
    }

    fn intensity(&self, t: f64) -> f64 {
        self.0.intensity(t)
    }

    fn cumulative_hazard(&self, t: f64) -> f64 {
        self.0.cumulative_hazard(t)
    }

    fn survival(&self, t: f64) -> f64 {
        self.0.survival(t)
    }
}

#[pyclass(name = "CreditParty", module = "fbva", frozen)]
struct PyCreditParty(market::CreditParty);

#[pymethods]
impl PyCreditParty {
    #[new]
    fn new(name: String, recovery: f64, hazard_cds: &PyHazardCurve, hazard_asw: &PyHazardCurve) -> PyResult<Self> {
        market::CreditParty::new(name, recovery, hazard_cds.0.clone(), hazard_asw.0.clone())
            .py_err()
            .map(Self)
    }

    /// Flat hazards from flat CDS and asset swap spreads by the credit triangle.
    #[staticmethod]
    fn from_spreads(name: String, recovery: f64, cds_spread: f64, asw_spread: f64) -> PyResult<Self> {
        market::CreditParty::from_spreads(name, recovery, cds_spread, asw_spread)
            .py_err()
            .map(Self)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    #[getter]
    fn recovery(&self) -> f64 {
        self.0.recovery()
    }

    #[getter]
    fn lgd(&self) -> f64 {
        self.0.lgd()
    }

    fn hazard(&self, source: &str) -> PyResult<PyHazardCurve> {
        Ok(PyHazardCurve(self.0.hazard(parse_source(source)?).clone()))
    }
}

/// Simulated default-time pairs, one per path. Times past any horizon are `float max`.
#[pyclass(name = "DefaultTimes", module = "fbva", frozen)]
struct PyDefaultTimes(Vec<DefaultScenario>);

#[pymethods]
impl PyDefaultTimes {
    #[getter]
    fn tau_a(&self) -> Vec<f64> {
        self.0.iter().map(|s| s.tau_a).collect()
    }

    #[getter]
    fn tau_b(&self) -> Vec<f64> {
        self.0.iter().map(|s| s.tau_b).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyclass(name = "ExposureMatrix", module = "fbva", frozen)]
struct PyExposure(ExposureMatrix);

#[pymethods]
impl PyExposure {
    /// Exposure `V⁰_B` given row by row, one row per path.
    #[staticmethod]
    fn from_rows(grid: &PyTimeGrid, rows: Vec<Vec<f64>>) -> PyResult<Self> {
        ExposureMatrix::from_rows(grid.0.clone(), rows).py_err().map(Self)
    }

    #[getter]
    fn n_paths(&self) -> usize {
        self.0.n_paths()
    }

    fn row(&self, path: usize) -> PyResult<Vec<f64>> {
        if path >= self.0.n_paths() {
            return Err(PyValueError::new_err(format!("path {path} out of range")));
        }
        Ok(self.0.row(path).to_vec())
    }

    fn negated(&self) -> Self {
        Self(self.0.negated())
    }
}

#[pyclass(name = "AdjustmentResult", module = "fbva", frozen)]
struct PyAdjustment(xva::AdjustmentResult);

#[pymethods]
impl PyAdjustment {
    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind.label()
    }

    #[getter]
    fn value(&self) -> f64 {
        self.0.value
    }

    #[getter]
    fn std_error(&self) -> f64 {
        self.0.std_error
    }

    #[getter]
    fn n_paths(&self) -> usize {
        self.0.n_paths
    }

    fn samples(&self) -> Vec<f64> {
        self.0.samples().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("AdjustmentResult({} = {} ± {})", self.0.kind.label(), self.0.value, self.0.std_error)
    }
}

#[pyclass(name = "AnnuityResult", module = "fbva", frozen)]
struct PyAnnuity(xva::AnnuityResult);

#[pymethods]
impl PyAnnuity {
    #[getter]
    fn borrower(&self) -> &'static str {
        side_str(self.0.borrower)
    }

    #[getter]
    fn value(&self) -> f64 {
        self.0.value
    }

    #[getter]
    fn std_error(&self) -> f64 {
        self.0.std_error
    }
}

#[pyclass(name = "FairSpreadResult", module = "fbva", frozen, get_all)]
struct PyFairSpread {
    party: &'static str,
    spread: f64,
    std_error: f64,
    annuity: f64,
}

#[pyclass(name = "CashflowLedger", module = "fbva", frozen)]
struct PyLedger(CashflowLedger);

#[pymethods]
impl PyLedger {
    /// `(time, amount, tag)` tuples in booking order.
    #[getter]
    fn entries(&self) -> Vec<(f64, f64, &'static str)> {
        self.0.entries.iter().map(|e| (e.time, e.amount, e.tag.as_str())).collect()
    }

    fn pv(&self, curve: &PyDiscountCurve) -> f64 {
        ledger::ledger_pv(&self.0, &curve.0)
    }
}

#[pyfunction]
fn simulate_default_times(
    py: Python<'_>,
    party_a: &PyCreditParty,
    party_b: &PyCreditParty,
    source: &str,
    rho: f64,
    n_paths: usize,
    seed: u64,
) -> PyResult<PyDefaultTimes> {
    let source = parse_source(source)?;
    let (a, b) = (&party_a.0, &party_b.0);
    py.detach(|| market::simulate_default_times(a, b, source, rho, n_paths, seed))
        .py_err()
        .map(PyDefaultTimes)
}

/// `product` is a dict such as `{"type": "bullet_loan", "notional": 100, "maturity": 5}`.
#[pyfunction]
fn simulate_exposure(
    py: Python<'_>,
    product: &Bound<'_, PyDict>,
    curve: &PyDiscountCurve,
    grid: &PyTimeGrid,
    n_paths: usize,
    seed: u64,
) -> PyResult<PyExposure> {
    let product: Product = serde_json::from_str(&to_json(product.as_any())?)
        .map_err(|e| PyValueError::new_err(format!("product: {e}")))?;
    let (c, g) = (&curve.0, &grid.0);
    py.detach(|| exposure::simulate_exposure(&product, c, g, n_paths, seed))
        .py_err()
        .map(PyExposure)
}

type Estimator = fn(&ExposureMatrix, &[DefaultScenario], &market::DiscountCurve, f64) -> fbva_core::Result<xva::AdjustmentResult>;

fn estimate(py: Python<'_>, f: Estimator, e: &PyExposure, d: &PyDefaultTimes, c: &PyDiscountCurve, lgd: f64) -> PyResult<PyAdjustment> {
    py.detach(|| f(&e.0, &d.0, &c.0, lgd)).py_err().map(PyAdjustment)
}

#[pyfunction]
fn bcva(py: Python<'_>, exposure: &PyExposure, defaults: &PyDefaultTimes, curve: &PyDiscountCurve, lgd: f64) -> PyResult<PyAdjustment> {
    estimate(py, xva::bcva, exposure, defaults, curve, lgd)
}

#[pyfunction]
fn bdva(py: Python<'_>, exposure: &PyExposure, defaults: &PyDefaultTimes, curve: &PyDiscountCurve, lgd: f64) -> PyResult<PyAdjustment> {
    estimate(py, xva::bdva, exposure, defaults, curve, lgd)
}

#[pyfunction]
fn fcva(py: Python<'_>, exposure: &PyExposure, defaults: &PyDefaultTimes, curve: &PyDiscountCurve, lgd: f64) -> PyResult<PyAdjustment> {
    estimate(py, xva::fcva, exposure, defaults, curve, lgd)
}

#[pyfunction]
fn fbcva(py: Python<'_>, exposure: &PyExposure, defaults: &PyDefaultTimes, curve: &PyDiscountCurve, lgd: f64) -> PyResult<PyAdjustment> {
    estimate(py, xva::fbcva, exposure, defaults, curve, lgd)
}

#[pyfunction]
fn fbdva(py: Python<'_>, exposure: &PyExposure, defaults: &PyDefaultTimes, curve: &PyDiscountCurve, lgd: f64) -> PyResult<PyAdjustment> {
    estimate(py, xva::fbdva, exposure, defaults, curve, lgd)
}

/// Credit minus debit adjustment: BCVA/BDVA gives BVA, FBCVA/FBDVA gives FBVA.
#[pyfunction]
fn bva(credit: &PyAdjustment, debit: &PyAdjustment) -> PyResult<PyAdjustment> {
    xva::bva(&credit.0, &debit.0).py_err().map(PyAdjustment)
}

#[pyfunction]
#[pyo3(signature = (exposure, defaults, curve, borrower, mode = "bilateral"))]
fn funding_annuity(
    py: Python<'_>,
    exposure: &PyExposure,
    defaults: &PyDefaultTimes,
    curve: &PyDiscountCurve,
    borrower: &str,
    mode: &str,
) -> PyResult<PyAnnuity> {
    let (side, mode) = (parse_side(borrower)?, parse_mode(mode)?);
    py.detach(|| xva::funding_annuity(&exposure.0, &defaults.0, &curve.0, side, mode))
        .py_err()
        .map(PyAnnuity)
}

#[pyfunction]
fn fair_spread(adjustment: &PyAdjustment, annuity: &PyAnnuity) -> PyResult<PyFairSpread> {
    let f = xva::fair_spread(&adjustment.0, &annuity.0).py_err()?;
    Ok(PyFairSpread {
        party: side_str(f.party),
        spread: f.spread,
        std_error: f.std_error,
        annuity: f.annuity,
    })
}

#[pyfunction]
#[pyo3(signature = (party_a, party_b, source, rho, grid, k, first = "A"))]
fn default_partition_probability(
    party_a: &PyCreditParty,
    party_b: &PyCreditParty,
    source: &str,
    rho: f64,
    grid: &PyTimeGrid,
    k: usize,
    first: &str,
) -> PyResult<f64> {
    let first = match parse_side(first)? {
        Side::A => DefaultOrder::AFirst,
        Side::B => DefaultOrder::BFirst,
    };
    market::default_partition_probability(&party_a.0, &party_b.0, parse_source(source)?, rho, &grid.0, k, first).py_err()
}

/// Quadrature value of an adjustment for a deterministic exposure profile.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn deterministic_adjustment(
    kind: &str,
    profile: Vec<f64>,
    grid: &PyTimeGrid,
    curve: &PyDiscountCurve,
    party_a: &PyCreditParty,
    party_b: &PyCreditParty,
    source: &str,
    rho: f64,
) -> PyResult<f64> {
    let kind: AdjustmentKind = serde_json::from_value(serde_json::Value::String(kind.to_uppercase()))
        .map_err(|_| PyValueError::new_err(format!("unknown adjustment {kind:?}")))?;
    fbva_core::oracle::deterministic_adjustment(kind, &profile, &grid.0, &curve.0, &party_a.0, &party_b.0, parse_source(source)?, rho)
        .py_err()
}

/// Margin-loan ledger of one path; `row` is `V⁰_B` on the grid.
#[pyfunction]
#[pyo3(signature = (row, tau_a, tau_b, grid, curve, recovery_a, mode = "bilateral", path_id = 0))]
#[allow(clippy::too_many_arguments)]
fn build_ledger(
    row: Vec<f64>,
    tau_a: f64,
    tau_b: f64,
    grid: &PyTimeGrid,
    curve: &PyDiscountCurve,
    recovery_a: f64,
    mode: &str,
    path_id: u64,
) -> PyResult<PyLedger> {
    if row.len() != grid.0.len() {
        return Err(PyValueError::new_err(format!("row has {} values for {} dates", row.len(), grid.0.len())));
    }
    let s = DefaultScenario { tau_a, tau_b, path_id };
    let ledger = match parse_mode(mode)? {
        LoanMode::Unilateral => ledger::build_unilateral_ledger(&row, &s, &grid.0, &curve.0, recovery_a),
        LoanMode::Bilateral => ledger::build_bilateral_ledger(&row, &s, &grid.0, &curve.0, recovery_a),
    };
    Ok(PyLedger(ledger))
}

/// Returns `(holds, residual)` comparing a ledger PV with minus the path's realized loss.
#[pyfunction]
#[pyo3(signature = (ledger_pv, row, tau_a, tau_b, grid, curve, lgd, mode = "bilateral"))]
#[allow(clippy::too_many_arguments)]
fn verify_pathwise_identity(
    ledger_pv: f64,
    row: Vec<f64>,
    tau_a: f64,
    tau_b: f64,
    grid: &PyTimeGrid,
    curve: &PyDiscountCurve,
    lgd: f64,
    mode: &str,
) -> PyResult<(bool, f64)> {
    if row.len() != grid.0.len() {
        return Err(PyValueError::new_err(format!("row has {} values for {} dates", row.len(), grid.0.len())));
    }
    let s = DefaultScenario { tau_a, tau_b, path_id: 0 };
    let c = ledger::verify_pathwise_identity(ledger_pv, &s, &row, &grid.0, &curve.0, lgd, parse_mode(mode)?);
    Ok((c.holds, c.residual))
}

/// Run a scenario file. Returns the report as a dict, or as rendered text for
/// `format="text"`/`"csv"`/`"json"`.
#[pyfunction]
#[pyo3(signature = (path, n_paths = None, seed = None, oracle_check = false, format = None))]
fn run_scenario(
    py: Python<'_>,
    path: std::path::PathBuf,
    n_paths: Option<usize>,
    seed: Option<u64>,
    oracle_check: bool,
    format: Option<&str>,
) -> PyResult<Py<PyAny>> {
    let mut s = scenario::load_scenario(&path).py_err()?;
    if let Some(n) = n_paths {
        s.n_paths = n;
    }
    if let Some(seed) = seed {
        s.seed = seed;
    }
    let options = RunOptions {
        oracle_check,
        record_timing: false,
    };
    let report = py.detach(|| scenario::run(&s, options)).py_err()?;
    match format {
        Some(f) => {
            let f: ReportFormat = f.parse().py_err()?;
            let text = report.render(f).py_err()?;
            Ok(text.into_pyobject(py)?.into_any().unbind())
        }
        None => {
            let json = report.render(ReportFormat::Json).py_err()?;
            Ok(py.import("json")?.call_method1("loads", (json,))?.unbind())
        }
    }
}

#[pymodule]
fn fbva(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTimeGrid>()?;
    m.add_class::<PyDiscountCurve>()?;
    m.add_class::<PyHazardCurve>()?;
    m.add_class::<PyCreditParty>()?;
    m.add_class::<PyDefaultTimes>()?;
    m.add_class::<PyExposure>()?;
    m.add_class::<PyAdjustment>()?;
    m.add_class::<PyAnnuity>()?;
    m.add_class::<PyFairSpread>()?;
    m.add_class::<PyLedger>()?;
    m.add_function(wrap_pyfunction!(simulate_default_times, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_exposure, m)?)?;
    m.add_function(wrap_pyfunction!(bcva, m)?)?;
    m.add_function(wrap_pyfunction!(bdva, m)?)?;
    m.add_function(wrap_pyfunction!(fcva, m)?)?;
    m.add_function(wrap_pyfunction!(fbcva, m)?)?;
    m.add_function(wrap_pyfunction!(fbdva, m)?)?;
    m.add_function(wrap_pyfunction!(bva, m)?)?;
    m.add_function(wrap_pyfunction!(funding_annuity, m)?)?;
    m.add_function(wrap_pyfunction!(fair_spread, m)?)?;
    m.add_function(wrap_pyfunction!(default_partition_probability, m)?)?;
    m.add_function(wrap_pyfunction!(deterministic_adjustment, m)?)?;
    m.add_function(wrap_pyfunction!(build_ledger, m)?)?;
    m.add_function(wrap_pyfunction!(verify_pathwise_identity, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add("IDENTITY_TOLERANCE", ledger::IDENTITY_TOLERANCE)?;
    Ok(())
}
