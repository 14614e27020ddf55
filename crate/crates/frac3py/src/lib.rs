//! Python bindings for the `frac3` crate.
//!
//! Exposes the design and relation types plus the discrepancy, word-length
//! and sweep operations. Sweep and verification calls release the GIL while
//! they run.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: frac3::Error) -> PyErr {
    match e {
        frac3::Error::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_variant(s: &str) -> PyResult<frac3::FractionVariant> {
    match s {
        "centered" => Ok(frac3::FractionVariant::Centered),
        "uncentered" => Ok(frac3::FractionVariant::Uncentered),
        other => Err(PyValueError::new_err(format!(
            "unknown variant {other:?}, expected \"centered\" or \"uncentered\""
        ))),
    }
}

fn sweep_dict<'py>(py: Python<'py>, r: &frac3::SearchResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("min_phi", r.min_phi)?;
    d.set_item("ave_phi", r.ave_phi)?;
    d.set_item("max_phi", r.max_phi)?;
    d.set_item("sd_phi", r.sd_phi)?;
    d.set_item("argmin", r.argmin.clone())?;
    d.set_item("evaluations", r.evaluations)?;
    d.set_item("class_count", r.class_count)?;
    Ok(d)
}

/// A factorial design: a runs x factors matrix of levels 0..levels-1.
#[pyclass(frozen)]
struct Design {
    inner: frac3::DesignMatrix,
}

#[pymethods]
impl Design {
    /// Build a design from a list of rows.
    #[new]
    #[pyo3(signature = (rows, levels = 3))]
    fn new(rows: Vec<Vec<u8>>, levels: u8) -> PyResult<Self> {
        let inner = frac3::DesignMatrix::from_rows(&rows, levels).map_err(err)?;
        Ok(Design { inner })
    }

    /// Parse the plain-text design format.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Design {
            inner: frac3::parse_design(text).map_err(err)?,
        })
    }

    /// Read a design file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Design {
            inner: frac3::read_design(path).map_err(err)?,
        })
    }

    #[getter]
    fn runs(&self) -> usize {
        self.inner.runs()
    }

    #[getter]
    fn factors(&self) -> usize {
        self.inner.factors()
    }

    #[getter]
    fn levels(&self) -> u8 {
        self.inner.levels()
    }

    /// The design as a list of rows.
    fn rows(&self) -> Vec<Vec<u8>> {
        self.inner.rows().map(|r| r.to_vec()).collect()
    }

    /// Serialize to the plain-text design format.
    fn to_text(&self) -> String {
        frac3::design_to_string(&self.inner)
    }

    /// Write the design to a file.
    fn save(&self, path: &str) -> PyResult<()> {
        frac3::write_design(&self.inner, path).map_err(err)
    }

    /// Centered L2-discrepancy, any number of levels.
    fn cd(&self) -> f64 {
        frac3::centered_l2_discrepancy(&self.inner)
    }

    /// Centered L2-discrepancy via the 3-level pair-count kernel.
    fn cd_fast(&self) -> PyResult<f64> {
        frac3::cd_fast3(&self.inner).map_err(err)
    }

    /// Generalized word-length pattern (A_1 .. A_n).
    fn wlp(&self) -> PyResult<Vec<f64>> {
        Ok(frac3::wordlength_pattern(&self.inner)
            .map_err(err)?
            .values()
            .to_vec())
    }

    /// Pairwise Hamming distance counts, index 0..factors.
    fn distance_counts(&self) -> Vec<u64> {
        frac3::distance_distribution(&self.inner).counts().to_vec()
    }

    /// Beta word-length pattern (beta_0 .. beta_2n) of a 3-level design.
    #[pyo3(signature = (cap = None))]
    fn beta_wlp(&self, cap: Option<usize>) -> PyResult<Vec<f64>> {
        let cap = cap.unwrap_or(frac3::DEFAULT_BETA_CAP);
        Ok(frac3::beta_wordlength_pattern_capped(&self.inner, cap)
            .map_err(err)?
            .values()
            .to_vec())
    }

    /// Average discrepancy over all linear level permutations of this design,
    /// computed from its word-length pattern.
    fn average_cd(&self) -> PyResult<f64> {
        let wlp = frac3::wordlength_pattern(&self.inner).map_err(err)?;
        Ok(frac3::average_cd_from_wlp(&wlp))
    }

    /// Projection onto the given 1-based columns.
    fn project(&self, columns: Vec<usize>) -> PyResult<Design> {
        Ok(Design {
            inner: self.inner.project(&columns).map_err(err)?,
        })
    }

    /// Apply per-factor level shifts x -> x + offset mod 3.
    fn permute(&self, offsets: Vec<u8>) -> PyResult<Design> {
        let p = frac3::LevelPermutation::from_offsets(&offsets).map_err(err)?;
        Ok(Design {
            inner: self.inner.apply_level_permutation(&p).map_err(err)?,
        })
    }

    /// Apply arbitrary per-factor level maps, one [p0, p1, p2] per factor.
    fn permute_maps(&self, maps: Vec<[u8; 3]>) -> PyResult<Design> {
        let p = frac3::LevelPermutation::from_maps(maps).map_err(err)?;
        Ok(Design {
            inner: self.inner.apply_level_permutation(&p).map_err(err)?,
        })
    }

    /// The mirror image x -> levels - 1 - x.
    fn mirror(&self) -> Design {
        Design {
            inner: self.inner.mirror_image(),
        }
    }

    fn contains_run(&self, run: Vec<u8>) -> bool {
        self.inner.contains_run(&run)
    }

    fn __repr__(&self) -> String {
        format!(
            "Design({} runs, {} factors, {} levels)",
            self.inner.runs(),
            self.inner.factors(),
            self.inner.levels()
        )
    }
}

/// A defining relation for regular 3-level fractions: each dependent column
/// is a linear combination of the independent columns plus an offset, mod 3.
#[pyclass(frozen)]
struct Relation {
    inner: frac3::DefiningRelation,
}

#[pymethods]
impl Relation {
    /// Build a relation from coefficient rows (one per dependent column) and
    /// per-dependent offsets.
    #[new]
    fn new(independents: usize, coeffs: Vec<Vec<u8>>, offsets: Vec<u8>) -> PyResult<Self> {
        Ok(Relation {
            inner: frac3::DefiningRelation::new(independents, coeffs, offsets).map_err(err)?,
        })
    }

    /// Parse the plain-text relation format.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Relation {
            inner: frac3::parse_relation(text).map_err(err)?,
        })
    }

    /// Read a relation file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Relation {
            inner: frac3::read_relation(path).map_err(err)?,
        })
    }

    #[getter]
    fn independents(&self) -> usize {
        self.inner.independents()
    }

    #[getter]
    fn dependents(&self) -> usize {
        self.inner.dependents()
    }

    #[getter]
    fn factors(&self) -> usize {
        self.inner.factors()
    }

    #[getter]
    fn runs(&self) -> usize {
        self.inner.runs()
    }

    fn coeffs(&self) -> Vec<Vec<u8>> {
        self.inner.coeffs().to_vec()
    }

    fn offsets(&self) -> Vec<u8> {
        self.inner.offsets().to_vec()
    }

    /// The same relation with different dependent-column offsets.
    fn with_offsets(&self, offsets: Vec<u8>) -> PyResult<Relation> {
        Ok(Relation {
            inner: self.inner.with_offsets(offsets).map_err(err)?,
        })
    }

    /// Offsets whose design is the mirror image of this relation's design.
    fn mirror_offsets(&self) -> Vec<u8> {
        self.inner.mirror_partner_offsets()
    }

    /// Generate the full run matrix.
    fn design(&self) -> Design {
        Design {
            inner: frac3::generate_regular_design(&self.inner),
        }
    }

    /// Serialize to the plain-text relation format.
    fn to_text(&self) -> String {
        frac3::relation_to_string(&self.inner)
    }

    /// Write the relation to a file.
    fn save(&self, path: &str) -> PyResult<()> {
        std::fs::write(path, frac3::relation_to_string(&self.inner))
            .map_err(|e| PyIOError::new_err(format!("{path}: {e}")))
    }

    fn __repr__(&self) -> String {
        format!(
            "Relation({} independents, {} dependents, {} runs)",
            self.inner.independents(),
            self.inner.dependents(),
            self.inner.runs()
        )
    }
}

/// Sweep all offset assignments of a relation's dependent columns.
///
/// Returns a dict with min/ave/max/sd of the discrepancy, every argmin offset
/// vector, and the evaluation and class counts.
#[pyfunction]
#[pyo3(signature = (rel, max_k = None))]
fn search_regular<'py>(
    py: Python<'py>,
    rel: &Relation,
    max_k: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let inner = rel.inner.clone();
    let cap = max_k.unwrap_or(frac3::DEFAULT_REGULAR_CAP);
    let r = py
        .detach(move || frac3::search_regular_capped(&inner, cap))
        .map_err(err)?;
    sweep_dict(py, &r)
}

/// Sweep all per-factor level shifts of an arbitrary 3-level design.
#[pyfunction]
#[pyo3(signature = (design, max_n = None))]
fn search_general<'py>(
    py: Python<'py>,
    design: &Design,
    max_n: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let inner = design.inner.clone();
    let cap = max_n.unwrap_or(frac3::DEFAULT_GENERAL_CAP);
    let r = py
        .detach(move || frac3::search_general_capped(&inner, cap))
        .map_err(err)?;
    sweep_dict(py, &r)
}

/// The sweep minimizer of a relation: the best design and the sweep stats.
#[pyfunction]
fn uniform_minimum_aberration<'py>(
    py: Python<'py>,
    rel: &Relation,
) -> PyResult<(Design, Bound<'py, PyDict>)> {
    let inner = rel.inner.clone();
    let (d, r) = py
        .detach(move || frac3::uniform_minimum_aberration(&inner))
        .map_err(err)?;
    Ok((Design { inner: d }, sweep_dict(py, &r)?))
}

/// Mirror classes of a relation's offset space. Each dict holds the
/// representative, its partner and the class weight (1 or 2).
#[pyfunction]
fn representatives<'py>(py: Python<'py>, rel: &Relation) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let inner = rel.inner.clone();
    let classes = py
        .detach(move || frac3::geometric_representatives(&inner))
        .map_err(err)?;
    classes
        .iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("representative", c.representative.clone())?;
            d.set_item("partner", c.partner.clone())?;
            d.set_item("weight", c.weight)?;
            Ok(d)
        })
        .collect()
}

/// Group the arity-sized projections of an orthogonal array by word-length
/// pattern and sweep statistics. Column numbers are 1-based.
#[pyfunction]
fn classify<'py>(
    py: Python<'py>,
    design: &Design,
    arity: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let inner = design.inner.clone();
    let classes = py
        .detach(move || frac3::classify_projections(&inner, arity))
        .map_err(err)?;
    classes
        .iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("members", c.columns.clone())?;
            d.set_item("wlp", c.wlp.values().to_vec())?;
            d.set_item("sweep", sweep_dict(py, &c.result)?)?;
            Ok(d)
        })
        .collect()
}

/// The two geometrically distinct one-dependent-column fractions on n
/// factors: the centered variant (contains the all-one run) and the
/// uncentered one.
#[pyfunction]
fn variant_designs(n: usize) -> PyResult<(Design, Design)> {
    let (a, b) = frac3::variant_designs(n).map_err(err)?;
    Ok((Design { inner: a }, Design { inner: b }))
}

/// Catalog entries as dicts, optionally filtered by runs, factors or kind
/// ("ma" or "uniform"). Each entry carries its Relation and source note.
#[pyfunction]
#[pyo3(signature = (runs = None, factors = None, kind = None))]
fn catalog<'py>(
    py: Python<'py>,
    runs: Option<usize>,
    factors: Option<usize>,
    kind: Option<&str>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let kind = match kind {
        Some(s) => Some(frac3::CatalogKind::parse(s).map_err(err)?),
        None => None,
    };
    frac3::catalog_entries()
        .iter()
        .filter(|e| {
            runs.is_none_or(|r| e.runs() == r)
                && factors.is_none_or(|f| e.factors() == f)
                && kind.is_none_or(|k| e.kind() == k)
        })
        .map(|e| {
            let d = PyDict::new(py);
            d.set_item("runs", e.runs())?;
            d.set_item("factors", e.factors())?;
            d.set_item("kind", e.kind().as_str())?;
            d.set_item(
                "relation",
                Relation {
                    inner: e.relation().clone(),
                },
            )?;
            d.set_item("source", e.source())?;
            Ok(d)
        })
        .collect()
}

/// Generate the cataloged design with the given runs, factors and kind.
#[pyfunction]
fn catalog_design(runs: usize, factors: usize, kind: &str) -> PyResult<Design> {
    let kind = frac3::CatalogKind::parse(kind).map_err(err)?;
    let entry = frac3::catalog_lookup(runs, factors, kind).map_err(err)?;
    Ok(Design {
        inner: frac3::generate_regular_design(entry.relation()),
    })
}

/// The bundled 18-run orthogonal array with 7 three-level columns.
#[pyfunction]
fn oa18() -> Design {
    Design {
        inner: frac3::oa18().clone(),
    }
}

/// Closed-form discrepancy of the one-dependent-column fraction on n factors.
/// Variant is "centered" or "uncentered".
#[pyfunction]
fn fraction_cd(n: usize, variant: &str) -> PyResult<f64> {
    frac3::fraction_cd(n, parse_variant(variant)?).map_err(err)
}

/// Closed-form beta_n of the one-dependent-column fraction on n factors.
#[pyfunction]
fn fraction_beta(n: usize, variant: &str) -> PyResult<f64> {
    frac3::fraction_beta(n, parse_variant(variant)?).map_err(err)
}

/// Discrepancy of a one-dependent-column fraction from its beta_n value.
#[pyfunction]
fn cd_from_beta(n: usize, beta_n: f64) -> PyResult<f64> {
    frac3::cd_from_beta(n, beta_n).map_err(err)
}

/// Mean discrepancy over the three offset choices of the one-dependent-column
/// fraction on n factors.
#[pyfunction]
fn fraction_mean_cd(n: usize) -> PyResult<f64> {
    frac3::fraction_mean_cd(n).map_err(err)
}

/// Run the built-in identity checks up to n_max factors. Returns a dict with
/// "all_pass" and the per-check list.
#[pyfunction]
#[pyo3(signature = (n_max = 8, bruteforce = false))]
fn verify<'py>(py: Python<'py>, n_max: usize, bruteforce: bool) -> PyResult<Bound<'py, PyDict>> {
    let report = py
        .detach(move || frac3::verify_suite(n_max, bruteforce))
        .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("all_pass", report.all_pass())?;
    let checks: Vec<Bound<'py, PyDict>> = report
        .checks
        .iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("name", c.name.clone())?;
            d.set_item("delta", c.delta)?;
            d.set_item("tolerance", c.tolerance)?;
            d.set_item("pass", c.pass)?;
            Ok(d)
        })
        .collect::<PyResult<_>>()?;
    out.set_item("checks", checks)?;
    Ok(out)
}

#[pymodule]
fn frac3py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Design>()?;
    m.add_class::<Relation>()?;
    m.add_function(wrap_pyfunction!(search_regular, m)?)?;
    m.add_function(wrap_pyfunction!(search_general, m)?)?;
    m.add_function(wrap_pyfunction!(uniform_minimum_aberration, m)?)?;
    m.add_function(wrap_pyfunction!(representatives, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(variant_designs, m)?)?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_design, m)?)?;
    m.add_function(wrap_pyfunction!(oa18, m)?)?;
    m.add_function(wrap_pyfunction!(fraction_cd, m)?)?;
    m.add_function(wrap_pyfunction!(fraction_beta, m)?)?;
    m.add_function(wrap_pyfunction!(cd_from_beta, m)?)?;
    m.add_function(wrap_pyfunction!(fraction_mean_cd, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("DEFAULT_BETA_CAP", frac3::DEFAULT_BETA_CAP)?;
    m.add("DEFAULT_REGULAR_CAP", frac3::DEFAULT_REGULAR_CAP)?;
    m.add("DEFAULT_GENERAL_CAP", frac3::DEFAULT_GENERAL_CAP)?;
    Ok(())
}
