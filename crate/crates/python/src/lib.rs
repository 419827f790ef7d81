//! Python bindings for `grigorchuk-core`.
//!
//! Words can be passed either as `Word` objects or as strings over
//! `a, b, c, d`. Certificates cross the boundary as JSON strings.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use grigorchuk_core::branch::{self, KMembership, TWord};
use grigorchuk_core::certificate::{self, Certificate, CertificateBody};
use grigorchuk_core::decision::{self, OrderResult};
use grigorchuk_core::engel::{self, Probe};
use grigorchuk_core::tree::{self, Vertex};
use grigorchuk_core::{words, Config, Error, ReducedWord};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Parse { .. } | Error::PreconditionViolated(_) | Error::Json(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// An element of the group, stored as a reduced word. `==` is equality in
/// the group, not of spellings.
#[pyclass(frozen, skip_from_py_object, name = "Word", module = "grigorchuk")]
#[derive(Clone)]
pub struct Word {
    inner: ReducedWord,
}

impl From<ReducedWord> for Word {
    fn from(inner: ReducedWord) -> Self {
        Word { inner }
    }
}

fn word(obj: &Bound<'_, PyAny>) -> PyResult<ReducedWord> {
    if let Ok(w) = obj.extract::<PyRef<'_, Word>>() {
        return Ok(w.inner.clone());
    }
    let s: String = obj.extract()?;
    ReducedWord::parse(&s).map_err(py_err)
}

fn tword(s: &str) -> PyResult<TWord> {
    s.parse().map_err(py_err)
}

fn config(seed: u64, budget: Option<usize>) -> Config {
    let defaults = Config::default();
    Config {
        seed,
        budget: budget.unwrap_or(defaults.budget),
        ..defaults
    }
}

#[pymethods]
impl Word {
    #[new]
    #[pyo3(signature = (literal = ""))]
    fn new(literal: &str) -> PyResult<Self> {
        ReducedWord::parse(literal).map(Word::from).map_err(py_err)
    }

    #[staticmethod]
    fn identity() -> Self {
        ReducedWord::identity().into()
    }

    fn __mul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Word> {
        Ok(self.inner.multiply(&word(other)?).into())
    }

    fn __rmul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Word> {
        Ok(word(other)?.multiply(&self.inner).into())
    }

    fn __pow__(&self, exponent: i64, _modulo: Option<i64>) -> Word {
        self.inner.pow(exponent).into()
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        word(other).is_ok_and(|o| decision::are_equal(&self.inner, &o))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Word('{}')", self.inner)
    }

    fn inverse(&self) -> Word {
        self.inner.invert().into()
    }

    /// `g^-1 * self * g`.
    fn conjugate(&self, g: &Bound<'_, PyAny>) -> PyResult<Word> {
        Ok(self.inner.conjugate(&word(g)?).into())
    }

    fn is_trivial(&self) -> bool {
        decision::is_trivial(&self.inner)
    }

    fn is_odd(&self) -> bool {
        self.inner.is_odd()
    }

    /// Exact order, or `None` if `self^(2^cap)` is still nontrivial.
    #[pyo3(signature = (cap = decision::DEFAULT_ORDER_CAP))]
    fn order(&self, cap: u32) -> Option<u64> {
        match decision::order(&self.inner, cap) {
            OrderResult::Exact(n) => Some(n),
            OrderResult::ExceededCap(_) => None,
        }
    }

    /// `(swaps_root, left_section, right_section)`.
    fn decompose(&self) -> (bool, Word, Word) {
        let d = tree::decompose(&self.inner);
        (d.active, d.left.into(), d.right.into())
    }

    /// Image of a vertex given as a binary string.
    fn act(&self, vertex: &str) -> PyResult<String> {
        let v: Vertex = vertex.parse().map_err(py_err)?;
        Ok(tree::act(&self.inner, &v).to_string())
    }

    fn in_level_stabilizer(&self, level: usize) -> bool {
        tree::in_level_stabilizer(&self.inner, level)
    }

    /// Least-depth, lexicographically least moved vertex.
    fn moved_vertex(&self) -> Option<String> {
        decision::moved_vertex(&self.inner).map(|v| v.to_string())
    }
}

#[pyfunction]
fn reduce(literal: &str) -> PyResult<String> {
    Ok(ReducedWord::parse(literal).map_err(py_err)?.to_string())
}

/// `x^-1 g^-1 x g`.
#[pyfunction]
fn commutator(x: &Bound<'_, PyAny>, g: &Bound<'_, PyAny>) -> PyResult<Word> {
    Ok(words::commutator(&word(x)?, &word(g)?).into())
}

/// `[x,_n g]`.
#[pyfunction]
fn iterated_commutator(x: &Bound<'_, PyAny>, g: &Bound<'_, PyAny>, n: usize) -> PyResult<Word> {
    Ok(engel::iterated_commutator(&word(x)?, &word(g)?, n).into())
}

#[pyfunction]
fn are_equal(g: &Bound<'_, PyAny>, h: &Bound<'_, PyAny>) -> PyResult<bool> {
    Ok(decision::are_equal(&word(g)?, &word(h)?))
}

/// `"inside"`, `"outside"` or `"unknown"`.
#[pyfunction]
fn membership_in_k(g: &Bound<'_, PyAny>) -> PyResult<&'static str> {
    Ok(match branch::membership_in_k(&word(g)?) {
        KMembership::Inside { .. } => "inside",
        KMembership::Outside { .. } => "outside",
        KMembership::Unknown { .. } => "unknown",
    })
}

/// Normal generators `(t, u, v)` of `K`.
#[pyfunction]
fn k_generators() -> (Word, Word, Word) {
    let (t, u, v) = branch::k_generators();
    (t.into(), u.into(), v.into())
}

/// Element of `K` whose first-level sections are the two products of
/// conjugates of `t`, given as literals like `"ab^+1;1^-1"`.
#[pyfunction]
fn emb_pair(first: &str, second: &str) -> PyResult<Word> {
    Ok(branch::emb_pair(&tword(first)?, &tword(second)?).into())
}

#[pyfunction]
fn flatten(k: &str) -> PyResult<Word> {
    Ok(tword(k)?.flatten().into())
}

/// Least `n <= bound` with `[x,_n g] = 1`, or `None`.
#[pyfunction]
fn left_engel_probe(g: &Bound<'_, PyAny>, x: &Bound<'_, PyAny>, bound: usize) -> PyResult<Option<usize>> {
    match engel::left_engel_probe(&word(g)?, &word(x)?, bound, &Config::default()).map_err(py_err)? {
        Probe::Sink(s) => Ok(Some(s.depth)),
        Probe::NoSinkUpTo(_) => Ok(None),
    }
}

#[pyfunction]
fn lemma1_check(k: &str, g: &Bound<'_, PyAny>, m: usize) -> PyResult<bool> {
    let r = engel::lemma1_check(&tword(k)?, &word(g)?, m, &Config::default()).map_err(py_err)?;
    Ok(r.holds)
}

#[pyfunction]
fn lemma2_check(x: &Bound<'_, PyAny>, y: &Bound<'_, PyAny>, m: usize) -> PyResult<bool> {
    let r = engel::lemma2_check(&word(x)?, &word(y)?, m, &Config::default()).map_err(py_err)?;
    Ok(r.holds)
}

/// Certificate (JSON) that the involution `x` is not left `bound`-Engel.
#[pyfunction]
#[pyo3(signature = (x, bound, seed = 0, budget = None))]
fn replay_bounded_left(py: Python<'_>, x: &Bound<'_, PyAny>, bound: usize, seed: u64, budget: Option<usize>) -> PyResult<String> {
    let x = word(x)?;
    let cfg = config(seed, budget);
    let r = py.detach(|| engel::replay_bounded_left(&x, bound, &cfg)).map_err(py_err)?;
    Ok(Certificate::new(CertificateBody::BoundedLeftRefutation(r)).to_json())
}

/// Certificate (JSON) that `x` has no right Engel sink at most `bound + 1`.
#[pyfunction]
#[pyo3(signature = (x, bound, seed = 0, budget = None))]
fn replay_right(py: Python<'_>, x: &Bound<'_, PyAny>, bound: usize, seed: u64, budget: Option<usize>) -> PyResult<String> {
    let x = word(x)?;
    let cfg = config(seed, budget);
    let r = py.detach(|| engel::replay_right(&x, bound, &cfg)).map_err(py_err)?;
    Ok(Certificate::new(CertificateBody::RightRefutation(r)).to_json())
}

/// `True` if the certificate re-checks, `False` if it is rejected. Malformed
/// JSON raises `ValueError`.
#[pyfunction]
fn verify_certificate(py: Python<'_>, json: &str) -> PyResult<bool> {
    let cert = Certificate::from_json(json).map_err(py_err)?;
    match py.detach(|| certificate::verify(&cert, &Config::default())) {
        Ok(()) => Ok(true),
        Err(Error::CertificateRejected(_)) => Ok(false),
        Err(e) => Err(py_err(e)),
    }
}

#[pymodule]
fn grigorchuk(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Word>()?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(commutator, m)?)?;
    m.add_function(wrap_pyfunction!(iterated_commutator, m)?)?;
    m.add_function(wrap_pyfunction!(are_equal, m)?)?;
    m.add_function(wrap_pyfunction!(membership_in_k, m)?)?;
    m.add_function(wrap_pyfunction!(k_generators, m)?)?;
    m.add_function(wrap_pyfunction!(emb_pair, m)?)?;
    m.add_function(wrap_pyfunction!(flatten, m)?)?;
    m.add_function(wrap_pyfunction!(left_engel_probe, m)?)?;
    m.add_function(wrap_pyfunction!(lemma1_check, m)?)?;
    m.add_function(wrap_pyfunction!(lemma2_check, m)?)?;
    m.add_function(wrap_pyfunction!(replay_bounded_left, m)?)?;
    m.add_function(wrap_pyfunction!(replay_right, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add("ENGINE_VERSION", certificate::ENGINE_VERSION)?;
    Ok(())
}
