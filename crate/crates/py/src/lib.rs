//! Python bindings. Rationals cross the boundary as `fractions.Fraction`;
//! inputs may be `Fraction`, `int` or strings like `"3/4"`.

use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyDict, PyList};

use moran_spectra::classifier::{self, Certificate, SpectralVerdict, ZSetStatus};
use moran_spectra::exactmath::parse_rational;
use moran_spectra::{hadamard, measure, oracle, spectra, tiling, Rational};

fn err(e: moran_spectra::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if let Ok(n) = obj.extract::<BigInt>() {
        return Ok(Rational::from_integer(n));
    }
    let text: String = obj.str()?.extract()?;
    parse_rational(&text).map_err(err)
}

fn to_fraction<'py>(py: Python<'py>, x: &Rational) -> PyResult<Bound<'py, PyAny>> {
    let fraction = py.import("fractions")?.getattr("Fraction")?;
    fraction.call1((x.numer().clone(), x.denom().clone()))
}

fn fraction_list<'py>(py: Python<'py>, xs: &[Rational]) -> PyResult<Bound<'py, PyList>> {
    let items = xs
        .iter()
        .map(|x| to_fraction(py, x))
        .collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

/// One letter of the alphabet: base `b`, digit count `p`, step `t`.
#[pyclass(
    frozen,
    skip_from_py_object,
    name = "StagePair",
    module = "moran_spectra"
)]
#[derive(Clone)]
struct PyStagePair(measure::StagePair);

#[pymethods]
impl PyStagePair {
    #[new]
    fn new(b: i64, p: u64, t: i64) -> PyResult<Self> {
        measure::StagePair::new(b, p, t).map(Self).map_err(err)
    }

    #[getter]
    fn b(&self) -> i64 {
        self.0.b()
    }

    #[getter]
    fn p(&self) -> u64 {
        self.0.p()
    }

    #[getter]
    fn t(&self) -> i64 {
        self.0.t()
    }

    fn digits(&self) -> Vec<i64> {
        self.0.digits()
    }

    fn is_admissible(&self) -> bool {
        hadamard::is_admissible(self.0.b(), self.0.p(), self.0.t())
    }

    fn canonical_l(&self) -> PyResult<Vec<i64>> {
        hadamard::canonical_l(self.0.b(), self.0.p(), self.0.t()).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("StagePair({}, {}, {})", self.0.b(), self.0.p(), self.0.t())
    }
}

/// An alphabet of stage pairs; letters are numbered from 1.
#[pyclass(frozen, skip_from_py_object, name = "Config", module = "moran_spectra")]
#[derive(Clone)]
struct PyConfig(measure::SystemConfig);

#[pymethods]
impl PyConfig {
    #[new]
    fn new(triples: Vec<(i64, u64, i64)>) -> PyResult<Self> {
        measure::SystemConfig::from_triples(&triples)
            .map(Self)
            .map_err(err)
    }

    /// Loads the TOML format understood by the command-line tool. Returns the
    /// config and the word, if the file has one.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<(Self, Option<PyWord>)> {
        let (config, word) = moran_spectra::cli::parse_config(text).map_err(err)?;
        Ok((Self(config), word.map(PyWord)))
    }

    fn pairs(&self) -> Vec<PyStagePair> {
        self.0.pairs().iter().copied().map(PyStagePair).collect()
    }

    /// Coprimality violations as strings; empty when the config is valid.
    fn violations(&self) -> Vec<String> {
        match classifier::validate_config(&self.0) {
            Ok(()) => Vec::new(),
            Err(v) => v.iter().map(ToString::to_string).collect(),
        }
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        let inner: Vec<String> = self
            .0
            .pairs()
            .iter()
            .map(|s| format!("({}, {}, {})", s.b(), s.p(), s.t()))
            .collect();
        format!("Config([{}])", inner.join(", "))
    }
}

/// An eventually periodic word `preperiod period^∞`.
#[pyclass(frozen, skip_from_py_object, name = "Word", module = "moran_spectra")]
#[derive(Clone)]
struct PyWord(measure::SymbolicWord);

#[pymethods]
impl PyWord {
    #[new]
    #[pyo3(signature = (preperiod, period))]
    fn new(preperiod: Vec<usize>, period: Vec<usize>) -> PyResult<Self> {
        measure::SymbolicWord::new(preperiod, period)
            .map(Self)
            .map_err(err)
    }

    /// Parses `"pre;period"`, e.g. `"1;2"` or `";1,2"`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        measure::SymbolicWord::parse(text).map(Self).map_err(err)
    }

    #[getter]
    fn preperiod(&self) -> Vec<usize> {
        self.0.preperiod().to_vec()
    }

    #[getter]
    fn period(&self) -> Vec<usize> {
        self.0.period().to_vec()
    }

    fn prefix(&self, k: usize) -> Vec<usize> {
        self.0.prefix(k)
    }

    fn shift(&self, n: usize) -> Self {
        Self(self.0.shift(n))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Word.parse(\"{}\")", self.0)
    }
}

/// A finitely supported probability measure with rational atoms.
#[pyclass(frozen, name = "Measure", module = "moran_spectra")]
struct PyMeasure(measure::DiscreteMeasure);

#[pymethods]
impl PyMeasure {
    /// `(position, weight)` pairs in increasing order of position.
    fn atoms<'py>(&self, py: Python<'py>) -> PyResult<Vec<(Bound<'py, PyAny>, Bound<'py, PyAny>)>> {
        self.0
            .atoms()
            .iter()
            .map(|(a, w)| Ok((to_fraction(py, a)?, to_fraction(py, w)?)))
            .collect()
    }

    fn fourier<'py>(&self, py: Python<'py>, x: f64) -> Bound<'py, PyComplex> {
        let v = self.0.fourier(x);
        PyComplex::from_doubles(py, v.re, v.im)
    }

    fn __eq__(&self, other: &Self) -> bool {
        measure::measures_equal(&self.0, &other.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyfunction]
#[pyo3(signature = (config, word, k, cap = None))]
fn truncate(config: &PyConfig, word: &PyWord, k: usize, cap: Option<u64>) -> PyResult<PyMeasure> {
    let cap = cap.unwrap_or(measure::DEFAULT_ATOM_CAP);
    measure::truncate_with_cap(&config.0, &word.0, k, cap)
        .map(PyMeasure)
        .map_err(err)
}

/// `(value, tail_bound)` for the transform of the infinite measure at `x`.
#[pyfunction]
#[pyo3(signature = (config, word, x, depth = 20))]
fn mu_hat<'py>(
    py: Python<'py>,
    config: &PyConfig,
    word: &PyWord,
    x: f64,
    depth: usize,
) -> PyResult<(Bound<'py, PyComplex>, f64)> {
    let s = measure::mu_hat_eval(&config.0, &word.0, x, depth).map_err(err)?;
    Ok((
        PyComplex::from_doubles(py, s.value.re, s.value.im),
        s.tail_bound,
    ))
}

#[pyfunction]
fn zero_set_contains(config: &PyConfig, word: &PyWord, x: &Bound<'_, PyAny>) -> PyResult<bool> {
    measure::zero_set_contains(&config.0, &word.0, &to_rational(x)?).map_err(err)
}

/// Lower and upper end of the convex hull of the support.
#[pyfunction]
fn support_hull<'py>(
    py: Python<'py>,
    config: &PyConfig,
    word: &PyWord,
) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    let (lo, hi) = measure::support_hull(&config.0, &word.0).map_err(err)?;
    Ok((to_fraction(py, &lo)?, to_fraction(py, &hi)?))
}

/// Sign-normalized config and the translation relating the two measures.
#[pyfunction]
fn normalize_signs<'py>(
    py: Python<'py>,
    config: &PyConfig,
    word: &PyWord,
) -> PyResult<(PyConfig, Bound<'py, PyAny>)> {
    let n = measure::normalize_signs(&config.0, &word.0).map_err(err)?;
    Ok((PyConfig(n.config), to_fraction(py, &n.gamma)?))
}

fn certificate_dict(d: &Bound<'_, PyDict>, c: &Certificate) -> PyResult<()> {
    d.set_item("clause", c.clause())?;
    match *c {
        Certificate::Divisibility {
            position,
            letter,
            b,
            p,
        } => {
            d.set_item("position", position)?;
            d.set_item("letter", letter)?;
            d.set_item("b", b)?;
            d.set_item("p", p)?;
        }
        Certificate::EventuallyConstantTail { l, last, j } => {
            d.set_item("l", l)?;
            d.set_item("i_l", last)?;
            d.set_item("j", j)?;
        }
        Certificate::StepNotDividing { t1, t2, residue } => {
            d.set_item("t1", t1)?;
            d.set_item("t2", t2)?;
            d.set_item("residue", residue)?;
        }
        Certificate::AlternatingProduct { k, b, t, p1 } => {
            d.set_item("k", k)?;
            d.set_item("b", b)?;
            d.set_item("t", t)?;
            d.set_item("p1", p1)?;
        }
    }
    Ok(())
}

fn verdict_dict<'py>(py: Python<'py>, v: &SpectralVerdict) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("kind", v.kind())?;
    d.set_item("spectral", v.is_spectral())?;
    match v {
        SpectralVerdict::Spectral => {}
        SpectralVerdict::NotSpectral(c) => certificate_dict(&d, c)?,
        SpectralVerdict::OutOfScope(vs) => {
            let text: Vec<String> = vs.iter().map(ToString::to_string).collect();
            d.set_item("violations", text)?;
        }
    }
    Ok(d)
}

/// Spectrality verdict for the word measure, as a dict with `kind`,
/// `spectral` and the certificate fields.
#[pyfunction]
fn classify<'py>(
    py: Python<'py>,
    config: &PyConfig,
    word: &PyWord,
) -> PyResult<Bound<'py, PyDict>> {
    let v = classifier::decide_spectrality(&config.0, &word.0).map_err(err)?;
    verdict_dict(py, &v)
}

/// The two-stage family `(b1, p1, t1)` then `(p2, p2, t2)^∞`.
#[pyfunction]
fn two_stage<'py>(
    py: Python<'py>,
    p1: u64,
    p2: u64,
    b1: i64,
    t1: i64,
    t2: i64,
) -> PyResult<Bound<'py, PyDict>> {
    let decision = classifier::two_stage_decide(p1, p2, b1, t1, t2).map_err(err)?;
    let d = verdict_dict(py, &classifier::two_stage_verdict(&decision, t1, t2))?;
    d.set_item("divides", decision.divides)?;
    d.set_item("tiles", decision.tiles)?;
    if let tiling::TileCertificate::Tiling {
        support,
        digits,
        period,
    } = &decision.tiling.certificate
    {
        d.set_item("support", support.to_string())?;
        d.set_item("translations", fraction_list(py, digits)?)?;
        d.set_item("period", to_fraction(py, period)?)?;
    }
    Ok(d)
}

/// `True` / `False` when a criterion settles emptiness of the integral
/// periodic zero set, `None` otherwise.
#[pyfunction]
fn zero_set_empty(config: &PyConfig, word: &PyWord) -> PyResult<Option<bool>> {
    let status = classifier::z_set_criteria(&config.0, &word.0).map_err(err)?;
    if let ZSetStatus::OutOfScope(v) = status {
        let text: Vec<String> = v.iter().map(ToString::to_string).collect();
        return Err(PyValueError::new_err(text.join("; ")));
    }
    Ok(status.as_option())
}

#[pyfunction]
fn tower_spectrum<'py>(
    py: Python<'py>,
    config: &PyConfig,
    word: &PyWord,
    k: usize,
) -> PyResult<Bound<'py, PyList>> {
    let lambda = spectra::build_tower_spectrum(&config.0, &word.0, k).map_err(err)?;
    fraction_list(py, lambda.points().unwrap_or_default())
}

/// Checks `points` (the tower spectrum when omitted) against the depth-`k`
/// truncation.
#[pyfunction]
#[pyo3(signature = (config, word, k, points = None))]
fn verify_spectrum<'py>(
    py: Python<'py>,
    config: &PyConfig,
    word: &PyWord,
    k: usize,
    points: Option<Vec<Bound<'py, PyAny>>>,
) -> PyResult<Bound<'py, PyDict>> {
    let candidate = match points {
        Some(ps) => {
            let xs = ps.iter().map(to_rational).collect::<PyResult<Vec<_>>>()?;
            spectra::SpectrumCandidate::finite(xs).map_err(err)?
        }
        None => spectra::build_tower_spectrum(&config.0, &word.0, k).map_err(err)?,
    };
    let mu = measure::truncate(&config.0, &word.0, k).map_err(err)?;
    let v = spectra::verify_spectrum_finite(&mu, &candidate, &config.0, &word.0, k).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("passed", v.passed())?;
    d.set_item("orthogonal", v.orthogonal)?;
    d.set_item("complete", v.complete)?;
    d.set_item("points", v.point_count)?;
    d.set_item("atoms", v.atom_count)?;
    d.set_item("unitarity_residual", v.unitarity_residual)?;
    if let Some((x, y)) = &v.offending_pair {
        d.set_item("offending_pair", (to_fraction(py, x)?, to_fraction(py, y)?))?;
    }
    Ok(d)
}

#[pyfunction]
fn is_compatible(b: i64, digits: Vec<i64>, l: Vec<i64>) -> PyResult<bool> {
    hadamard::is_compatible_pair(b, &digits, &l).map_err(err)
}

/// All compatible `L ⊂ [0, window)` containing 0 for the letter `(b, p, t)`.
#[pyfunction]
#[pyo3(signature = (b, p, t, window, limit = None))]
fn search_compatible_l(
    b: i64,
    p: u64,
    t: i64,
    window: u64,
    limit: Option<usize>,
) -> PyResult<Vec<Vec<i64>>> {
    oracle::search_compatible_l_limited(b, p, t, window, limit).map_err(err)
}

/// Exact evaluation of both sides of the row-constancy equivalence.
#[pyfunction]
fn row_constancy<'py>(
    py: Python<'py>,
    p: Vec<Vec<Bound<'py, PyAny>>>,
    x: Vec<Vec<Bound<'py, PyAny>>>,
) -> PyResult<Bound<'py, PyDict>> {
    let convert = |m: &[Vec<Bound<'py, PyAny>>]| -> PyResult<Vec<Vec<Rational>>> {
        m.iter()
            .map(|row| row.iter().map(to_rational).collect())
            .collect()
    };
    let r = oracle::row_constancy_verify(&convert(&p)?, &convert(&x)?).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("weighted_sum", to_fraction(py, &r.weighted_sum)?)?;
    d.set_item("left", r.left)?;
    d.set_item("right", r.right)?;
    d.set_item("equivalent", r.equivalent)?;
    Ok(d)
}

#[pymodule(name = "moran_spectra")]
fn moran_spectra_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStagePair>()?;
    m.add_class::<PyConfig>()?;
    m.add_class::<PyWord>()?;
    m.add_class::<PyMeasure>()?;
    m.add_function(wrap_pyfunction!(truncate, m)?)?;
    m.add_function(wrap_pyfunction!(mu_hat, m)?)?;
    m.add_function(wrap_pyfunction!(zero_set_contains, m)?)?;
    m.add_function(wrap_pyfunction!(support_hull, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_signs, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(two_stage, m)?)?;
    m.add_function(wrap_pyfunction!(zero_set_empty, m)?)?;
    m.add_function(wrap_pyfunction!(tower_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(verify_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(is_compatible, m)?)?;
    m.add_function(wrap_pyfunction!(search_compatible_l, m)?)?;
    m.add_function(wrap_pyfunction!(row_constancy, m)?)?;
    Ok(())
}
