//! Python bindings. The module is imported as `stresslift`.

use std::collections::BTreeMap;

use nalgebra::Vector3;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use stresslift::arrangement::ChamberId;
use stresslift::export::{export_obj, export_svg};
use stresslift::framework::{is_self_stress, self_stress_basis, self_stress_defect};
use stresslift::grassmann::{self as gr, AffineFlat, GrassmannPath};
use stresslift::homotopy::{self, CrossingWord, PolygonalLoop};
use stresslift::io::{parse_complex, parse_framework, ComplexDoc, FrameworkDoc};
use stresslift::lifting2d::{self, DifferentialLifting2D};
use stresslift::polytopal::{self, ForceLoad, MFramework};
use stresslift::verify::{self, Status, VerifyOptions};
use stresslift::{Error, MForm, Vector, VertexId};

create_exception!(stresslift, StressliftError, PyValueError, "Raised when a computation rejects its input.");

fn err(e: Error) -> PyErr {
    StressliftError::new_err(e.to_string())
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for stresslift::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(err)
    }
}

fn tolerances(tol: Option<PyRef<'_, Tolerances>>) -> stresslift::Tolerances {
    tol.map(|t| t.0).unwrap_or_default()
}

fn point3(p: &[f64]) -> PyResult<Vector3<f64>> {
    match p {
        [x, y, z] => Ok(Vector3::new(*x, *y, *z)),
        _ => Err(PyValueError::new_err(format!("expected 3 coordinates, got {}", p.len()))),
    }
}

/// Numerical thresholds for geometric predicates, form comparison and rank.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
pub struct Tolerances(pub stresslift::Tolerances);

#[pymethods]
impl Tolerances {
    #[new]
    #[pyo3(signature = (eps_geom = 1e-9, eps_form = 1e-8, eps_rank = 1e-10))]
    fn new(eps_geom: f64, eps_form: f64, eps_rank: f64) -> PyResult<Self> {
        stresslift::Tolerances::new(eps_geom, eps_form, eps_rank)
            .map(Self)
            .ok_or_else(|| PyValueError::new_err("tolerances must be positive and finite"))
    }

    #[getter]
    fn eps_geom(&self) -> f64 {
        self.0.eps_geom
    }

    #[getter]
    fn eps_form(&self) -> f64 {
        self.0.eps_form
    }

    #[getter]
    fn eps_rank(&self) -> f64 {
        self.0.eps_rank
    }

    fn __repr__(&self) -> String {
        format!("Tolerances(eps_geom={:e}, eps_form={:e}, eps_rank={:e})", self.0.eps_geom, self.0.eps_form, self.0.eps_rank)
    }
}

/// Points with integer ids joined by straight edges.
#[pyclass(frozen)]
pub struct Framework(pub stresslift::Framework);

#[pymethods]
impl Framework {
    #[new]
    #[pyo3(signature = (dim, vertices, edges, tol = None))]
    fn new(dim: usize, vertices: Vec<(u32, Vec<f64>)>, edges: Vec<(u32, u32)>, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<Self> {
        let verts = vertices.into_iter().map(|(id, c)| (VertexId(id), Vector::from_vec(c)));
        let edges = edges.into_iter().map(|(i, j)| (VertexId(i), VertexId(j)));
        stresslift::Framework::new(dim, verts, edges, &tolerances(tol)).py().map(Self)
    }

    /// Parse a framework document. Returns the framework and its stress, or
    /// `None` when the document carries no stresses.
    #[staticmethod]
    #[pyo3(signature = (text, tol = None))]
    fn from_json(text: &str, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<(Self, Option<Stress>)> {
        let (fw, s) = parse_framework(text, &tolerances(tol)).py()?;
        Ok((Self(fw), s.map(Stress)))
    }

    #[pyo3(signature = (stress = None))]
    fn to_json(&self, stress: Option<PyRef<'_, Stress>>) -> String {
        FrameworkDoc::from_framework(&self.0, stress.as_deref().map(|s| &s.0)).to_json()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.0.num_vertices()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.0.num_edges()
    }

    fn vertices(&self) -> Vec<(u32, Vec<f64>)> {
        self.0.vertices().map(|(v, p)| (v.0, p.iter().copied().collect())).collect()
    }

    fn edges(&self) -> Vec<(u32, u32)> {
        self.0.edges().map(|e| (e.a().0, e.b().0)).collect()
    }

    /// Rows are vertex coordinates, columns are edges in `edges()` order.
    fn equilibrium_matrix(&self) -> Vec<Vec<f64>> {
        let m = self.0.equilibrium_matrix();
        m.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    /// Orthonormal basis of the self-stress space.
    #[pyo3(signature = (tol = None))]
    fn self_stress_basis(&self, tol: Option<PyRef<'_, Tolerances>>) -> Vec<Stress> {
        self_stress_basis(&self.0, &tolerances(tol)).into_iter().map(Stress).collect()
    }

    fn __repr__(&self) -> String {
        format!("Framework(dim={}, vertices={}, edges={})", self.0.dim(), self.0.num_vertices(), self.0.num_edges())
    }
}

/// Scalar per edge. Edges not listed carry zero.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct Stress(pub stresslift::Stress);

#[pymethods]
impl Stress {
    #[new]
    fn new(framework: PyRef<'_, Framework>, values: BTreeMap<(u32, u32), f64>) -> PyResult<Self> {
        let pairs: Vec<_> = values.into_iter().collect();
        stresslift::Stress::from_pairs(&framework.0, &pairs).py().map(Self)
    }

    fn get(&self, i: u32, j: u32) -> PyResult<f64> {
        Ok(self.0.get(&stresslift::Edge::new(i, j).py()?))
    }

    fn items(&self) -> Vec<((u32, u32), f64)> {
        self.0.iter().map(|(e, w)| ((e.a().0, e.b().0), w)).collect()
    }

    fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    #[pyo3(signature = (framework, tol = None))]
    fn is_self_stress(&self, framework: PyRef<'_, Framework>, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<bool> {
        is_self_stress(&framework.0, &self.0, &tolerances(tol)).py()
    }

    /// Largest equilibrium residual, absolute and relative to the stress scale.
    #[pyo3(signature = (framework, tol = None))]
    fn defect(&self, framework: PyRef<'_, Framework>, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<(f64, f64)> {
        self_stress_defect(&framework.0, &self.0, &tolerances(tol)).py()
    }

    fn __repr__(&self) -> String {
        let items: Vec<String> = self.0.iter().map(|(e, w)| format!("{e}: {w}")).collect();
        format!("Stress({{{}}})", items.join(", "))
    }
}

/// Constant exterior form.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct Form(pub MForm);

#[pymethods]
impl Form {
    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.0.degree()
    }

    /// `(indices, coefficient)` for every non-zero term, indices increasing.
    fn terms(&self) -> Vec<(Vec<usize>, f64)> {
        self.0.terms().map(|(k, v)| (k.to_vec(), v)).collect()
    }

    /// Coefficient vector of a 1-form, `None` for other degrees.
    fn to_list(&self) -> Option<Vec<f64>> {
        self.0.to_vector().map(|v| v.iter().copied().collect())
    }

    fn wedge(&self, other: PyRef<'_, Form>) -> PyResult<Self> {
        self.0.wedge(&other.0).py().map(Self)
    }

    fn hodge_star(&self) -> Self {
        Self(self.0.hodge_star())
    }

    #[pyo3(signature = (other, eps = 1e-8))]
    fn approx_eq(&self, other: PyRef<'_, Form>, eps: f64) -> bool {
        self.0.approx_eq(&other.0, eps)
    }

    fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    fn __add__(&self, other: PyRef<'_, Form>) -> PyResult<Self> {
        self.0.try_add(&other.0).py().map(Self)
    }

    fn __neg__(&self) -> Self {
        Self(self.0.scale(-1.0))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Form({})", self.0)
    }
}

/// One constant 1-form per chamber of a planar framework.
#[pyclass(frozen)]
pub struct DifferentialLifting(DifferentialLifting2D);

#[pymethods]
impl DifferentialLifting {
    /// `(id, bounded, form)` for every chamber.
    fn chambers(&self) -> Vec<(ChamberId, bool, Form)> {
        let cc = self.0.complex();
        cc.chambers().iter().map(|c| (c.id, c.bounded, Form(self.0.form(c.id).clone()))).collect()
    }

    fn form(&self, chamber: ChamberId) -> PyResult<Form> {
        if chamber >= self.0.complex().len() {
            return Err(PyValueError::new_err(format!("no chamber {chamber}")));
        }
        Ok(Form(self.0.form(chamber).clone()))
    }

    #[pyo3(signature = (x, y, tol = None))]
    fn form_at(&self, x: f64, y: f64, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<Form> {
        self.0.form_at(&Vector::from_vec(vec![x, y]), &tolerances(tol)).py().map(|f| Form(f.clone()))
    }

    #[getter]
    fn num_crossings(&self) -> usize {
        self.0.complex().num_crossings()
    }

    fn svg(&self) -> String {
        export_svg(self.0.complex(), Some(&self.0))
    }
}

/// Piecewise-linear Maxwell lifting of a crossing-free framework.
#[pyclass(frozen)]
pub struct PolyhedralLifting(lifting2d::PolyhedralLifting);

#[pymethods]
impl PolyhedralLifting {
    #[pyo3(signature = (x, y, tol = None))]
    fn value_at(&self, x: f64, y: f64, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<f64> {
        self.0.value_at(&Vector::from_vec(vec![x, y]), &tolerances(tol)).py()
    }

    fn gradient(&self, chamber: ChamberId) -> PyResult<Vec<f64>> {
        self.check(chamber)?;
        Ok(self.0.gradient(chamber).iter().copied().collect())
    }

    fn offset(&self, chamber: ChamberId) -> PyResult<f64> {
        self.check(chamber)?;
        Ok(self.0.offset(chamber))
    }

    fn normal(&self, chamber: ChamberId) -> PyResult<[f64; 3]> {
        self.check(chamber)?;
        let n = self.0.normal(chamber);
        Ok([n.x, n.y, n.z])
    }

    fn continuity_defect(&self) -> f64 {
        self.0.continuity_defect()
    }

    #[pyo3(signature = (tol = None))]
    fn to_obj(&self, tol: Option<PyRef<'_, Tolerances>>) -> String {
        export_obj(&self.0, &tolerances(tol))
    }
}

impl PolyhedralLifting {
    fn check(&self, chamber: ChamberId) -> PyResult<()> {
        if chamber < self.0.complex().len() {
            Ok(())
        } else {
            Err(PyValueError::new_err(format!("no chamber {chamber}")))
        }
    }
}

/// Polytopes of a fixed dimension in some ambient space, glued along facets.
#[pyclass(frozen)]
pub struct PolytopalComplex {
    complex: polytopal::PolytopalComplex,
    mf: MFramework,
}

/// Force-load on the polytopes of a complex.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct ForceLoadValues(ForceLoad);

#[pymethods]
impl ForceLoadValues {
    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("ForceLoad({:?})", self.0.values())
    }
}

fn build_path(samples: Vec<Vec<Vec<f64>>>, tol: &stresslift::Tolerances) -> PyResult<GrassmannPath> {
    let flats = samples
        .into_iter()
        .map(|pts| AffineFlat::new(pts.into_iter().map(Vector::from_vec).collect(), tol))
        .collect::<stresslift::Result<Vec<_>>>()
        .py()?;
    GrassmannPath::new(flats).py()
}

#[pymethods]
impl PolytopalComplex {
    /// Parse a complex document. Returns the complex and its force-load, if any.
    #[staticmethod]
    #[pyo3(signature = (text, tol = None))]
    fn from_json(text: &str, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<(Self, Option<ForceLoadValues>)> {
        let tol = tolerances(tol);
        let (complex, w) = parse_complex(text, &tol).py()?;
        let mf = complex.associated_mframework(&tol).py()?;
        Ok((Self { complex, mf }, w.map(ForceLoadValues)))
    }

    #[pyo3(signature = (forceload = None))]
    fn to_json(&self, forceload: Option<PyRef<'_, ForceLoadValues>>) -> String {
        ComplexDoc::from_complex(&self.complex, forceload.as_deref().map(|w| &w.0)).to_json()
    }

    #[getter]
    fn ambient_dim(&self) -> usize {
        self.complex.ambient_dim()
    }

    #[getter]
    fn face_dim(&self) -> usize {
        self.complex.face_dim()
    }

    #[getter]
    fn num_polytopes(&self) -> usize {
        self.complex.polytopes().len()
    }

    #[getter]
    fn num_facets(&self) -> usize {
        self.complex.facets().len()
    }

    fn forceload(&self, values: Vec<f64>) -> PyResult<ForceLoadValues> {
        ForceLoad::new(&self.mf, values).py().map(ForceLoadValues)
    }

    #[pyo3(signature = (tol = None))]
    fn forceload_basis(&self, tol: Option<PyRef<'_, Tolerances>>) -> Vec<ForceLoadValues> {
        polytopal::forceload_basis(&self.mf, &tolerances(tol)).into_iter().map(ForceLoadValues).collect()
    }

    /// Monodromy form around facet `facet`; zero for an equilibrium force-load.
    fn facet_monodromy(&self, forceload: PyRef<'_, ForceLoadValues>, facet: usize) -> PyResult<Form> {
        polytopal::facet_monodromy(&self.mf, &forceload.0, facet).py().map(Form)
    }

    /// `(polytope, t, sign)` for every crossing of a path of flats, each flat
    /// given by its spanning points.
    #[pyo3(signature = (path, tol = None))]
    fn path_crossings(&self, path: Vec<Vec<Vec<f64>>>, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<Vec<(usize, f64, i32)>> {
        let tol = tolerances(tol);
        let path = build_path(path, &tol)?;
        let events = gr::path_crossings(&path, &self.complex, &tol).py()?;
        Ok(events.into_iter().map(|e| (e.face, e.t, e.mu)).collect())
    }

    /// Lifting value at the final flat of a path that starts far away.
    #[pyo3(signature = (path, forceload, tol = None))]
    fn grassmann_lifting(&self, path: Vec<Vec<Vec<f64>>>, forceload: PyRef<'_, ForceLoadValues>, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<f64> {
        let tol = tolerances(tol);
        let path = build_path(path, &tol)?;
        gr::grassmann_lifting(&path, &self.complex, &forceload.0, &tol).py()
    }

    fn __repr__(&self) -> String {
        format!(
            "PolytopalComplex(ambient_dim={}, face_dim={}, polytopes={})",
            self.complex.ambient_dim(),
            self.complex.face_dim(),
            self.complex.polytopes().len()
        )
    }
}

/// Outcome of `verify`.
#[pyclass(frozen)]
pub struct VerifyReport(verify::VerifyReport);

#[pymethods]
impl VerifyReport {
    #[getter]
    fn exit_code(&self) -> i32 {
        self.0.exit_code
    }

    /// `(name, passed, max_residual)` per check.
    fn checks(&self) -> Vec<(String, bool, f64)> {
        self.0.checks.iter().map(|c| (c.name.clone(), c.status == Status::Pass, c.max_residual)).collect()
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }
}

#[pyfunction]
#[pyo3(signature = (framework, stress, tol = None))]
fn differential_lifting_2d(framework: PyRef<'_, Framework>, stress: PyRef<'_, Stress>, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<DifferentialLifting> {
    lifting2d::differential_lifting_2d(&framework.0, &stress.0, &tolerances(tol)).py().map(DifferentialLifting)
}

#[pyfunction]
#[pyo3(signature = (framework, stress, tol = None))]
fn polyhedral_lifting(framework: PyRef<'_, Framework>, stress: PyRef<'_, Stress>, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<PolyhedralLifting> {
    lifting2d::integrate_polyhedral_lifting(&framework.0, &stress.0, &tolerances(tol)).py().map(PolyhedralLifting)
}

/// Stress recovered from the jumps of a differential lifting.
#[pyfunction]
#[pyo3(signature = (framework, lifting, tol = None))]
fn recover_stress(framework: PyRef<'_, Framework>, lifting: PyRef<'_, DifferentialLifting>, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<Stress> {
    lifting2d::recover_stress(&framework.0, &lifting.0, &tolerances(tol)).py().map(Stress)
}

/// The `(d-2)`-form assigned to each edge `(i, j)` with `i < j`.
#[pyfunction]
fn elementary_forms(framework: PyRef<'_, Framework>, stress: PyRef<'_, Stress>) -> PyResult<BTreeMap<(u32, u32), Form>> {
    let forms = homotopy::elementary_forms(&framework.0, &stress.0).py()?;
    Ok(forms.into_iter().map(|(e, f)| ((e.a().0, e.b().0), Form(f))).collect())
}

/// Lifting value of a crossing word given as `(i, j, sign)` entries.
#[pyfunction]
#[pyo3(signature = (framework, stress, word, tol = None))]
fn lifting_of_word(framework: PyRef<'_, Framework>, stress: PyRef<'_, Stress>, word: Vec<(u32, u32, i32)>, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<Form> {
    let w = CrossingWord::new(&word);
    homotopy::lifting_of_word(&framework.0, &stress.0, &w, &tolerances(tol)).py().map(Form)
}

/// Lifting value of a closed polygonal loop in 3-space.
#[pyfunction]
#[pyo3(signature = (framework, stress, points, apex = [5.0, 5.0, 5.0], tol = None))]
fn lifting_of_loop(
    framework: PyRef<'_, Framework>,
    stress: PyRef<'_, Stress>,
    points: Vec<Vec<f64>>,
    apex: [f64; 3],
    tol: Option<PyRef<'_, Tolerances>>,
) -> PyResult<Form> {
    let pts = points.iter().map(|p| point3(p)).collect::<PyResult<Vec<_>>>()?;
    let lp = PolygonalLoop::new(pts).py()?;
    homotopy::lifting_of_loop(&framework.0, &stress.0, &lp, &Vector3::from(apex), &tolerances(tol)).py().map(Form)
}

#[pyfunction]
#[pyo3(signature = (a, b, tol = None))]
fn linking_number(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<i32> {
    let make = |pts: &[Vec<f64>]| -> PyResult<PolygonalLoop> {
        let pts = pts.iter().map(|p| point3(p)).collect::<PyResult<Vec<_>>>()?;
        PolygonalLoop::new(pts).py()
    };
    homotopy::linking_number(&make(&a)?, &make(&b)?, &tolerances(tol)).py()
}

/// Signed distance between two flats given by spanning points whose counts
/// add up to the ambient dimension plus one.
#[pyfunction]
#[pyo3(signature = (a, b, tol = None))]
fn flat_distance(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<f64> {
    let tol = tolerances(tol);
    let a = AffineFlat::new(a.into_iter().map(Vector::from_vec).collect(), &tol).py()?;
    let b = AffineFlat::new(b.into_iter().map(Vector::from_vec).collect(), &tol).py()?;
    gr::flat_distance(&a, &b).py()
}

#[pyfunction]
fn trivalent_monodromy_identity(alpha: f64, beta: f64, a: f64, b: f64, c: f64, d: f64, lam: f64) -> PyResult<f64> {
    gr::trivalent_monodromy_identity(alpha, beta, a, b, c, d, lam).py()
}

#[pyfunction]
#[pyo3(signature = (framework, stress = None, tol = None))]
fn svg(framework: PyRef<'_, Framework>, stress: Option<PyRef<'_, Stress>>, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<String> {
    let tol = tolerances(tol);
    match stress {
        Some(s) => {
            let dl = lifting2d::differential_lifting_2d(&framework.0, &s.0, &tol).py()?;
            Ok(export_svg(dl.complex(), Some(&dl)))
        }
        None => {
            let cc = stresslift::arrangement::build_chamber_complex(&framework.0, &tol).py()?;
            Ok(export_svg(&cc, None))
        }
    }
}

/// Run the invariant checks on `(name, json_text)` documents.
#[pyfunction(name = "verify")]
#[pyo3(signature = (docs, seed = 0, grassmann = false, tol = None))]
fn run_verify(docs: Vec<(String, String)>, seed: u64, grassmann: bool, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<VerifyReport> {
    let opts = VerifyOptions {
        seed,
        tol: tolerances(tol),
        grassmann,
        ..VerifyOptions::default()
    };
    verify::run_verify(&docs, &opts).py().map(VerifyReport)
}

#[pymodule]
#[pyo3(name = "stresslift")]
pub fn stresslift_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("StressliftError", m.py().get_type::<StressliftError>())?;
    m.add_class::<Tolerances>()?;
    m.add_class::<Framework>()?;
    m.add_class::<Stress>()?;
    m.add_class::<Form>()?;
    m.add_class::<DifferentialLifting>()?;
    m.add_class::<PolyhedralLifting>()?;
    m.add_class::<PolytopalComplex>()?;
    m.add_class::<ForceLoadValues>()?;
    m.add_class::<VerifyReport>()?;
    m.add_function(wrap_pyfunction!(differential_lifting_2d, m)?)?;
    m.add_function(wrap_pyfunction!(polyhedral_lifting, m)?)?;
    m.add_function(wrap_pyfunction!(recover_stress, m)?)?;
    m.add_function(wrap_pyfunction!(elementary_forms, m)?)?;
    m.add_function(wrap_pyfunction!(lifting_of_word, m)?)?;
    m.add_function(wrap_pyfunction!(lifting_of_loop, m)?)?;
    m.add_function(wrap_pyfunction!(linking_number, m)?)?;
    m.add_function(wrap_pyfunction!(flat_distance, m)?)?;
    m.add_function(wrap_pyfunction!(trivalent_monodromy_identity, m)?)?;
    m.add_function(wrap_pyfunction!(svg, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
