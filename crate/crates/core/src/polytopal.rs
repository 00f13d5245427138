//! m-frameworks, polytopal complexes, force-loads and their m-form liftings.
//!
//! An m-framework in ℝⁿ consists of (m-1)-planes ("edges"), m-planes
//! ("faces"), an incidence relation and, for every incidence, the unit
//! normal `n(e, f)` inside `f` orthogonal to `e`. A force-load `ω` on faces is
//! in equilibrium when `Σ_f ω(f) n(e, f) = 0` at every edge.
//!
//! A polytopal complex is a collection of convex m-polytopes glued along
//! facets; its associated m-framework uses facet spans as edges, polytope
//! spans as faces and inward pointing normals.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::MForm;
use crate::framework::{Framework, Stress, VertexId};
use crate::linalg::{nullspace, orthonormalize, reject_from, segment_distance, Vector};
use crate::tol::Tolerances;

/// Affine subspace stored as a base point and an orthonormal direction basis.
/// The order of the basis vectors fixes the orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct Flat {
    base: Vector,
    basis: Vec<Vector>,
}

impl Flat {
    /// Orthonormalise `directions` in order; they must be independent.
    pub fn new(base: Vector, directions: &[Vector], eps: f64) -> Result<Self> {
        if let Some(d) = directions.iter().find(|d| d.len() != base.len()) {
            return Err(Error::DimensionMismatch {
                expected: base.len(),
                found: d.len(),
            });
        }
        let basis = orthonormalize(directions, eps);
        if basis.len() != directions.len() {
            return Err(Error::DegenerateFlat);
        }
        Ok(Self { base, basis })
    }

    /// Flat through `points[0]` spanned by `points[k] - points[0]`.
    pub fn through(points: &[Vector], eps: f64) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput("flat points"))?;
        let dirs: Vec<Vector> = points[1..].iter().map(|p| p - first).collect();
        Self::new(first.clone(), &dirs, eps)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &Vector {
        &self.base
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn distance_to(&self, p: &Vector) -> f64 {
        reject_from(&(p - &self.base), &self.basis).norm()
    }

    pub fn contains_flat(&self, other: &Flat, eps: f64) -> bool {
        self.distance_to(&other.base) <= eps
            && other
                .basis
                .iter()
                .all(|b| reject_from(b, &self.basis).norm() <= eps)
    }

    /// Same point set, ignoring orientation.
    pub fn same_as(&self, other: &Flat, eps: f64) -> bool {
        self.dim() == other.dim() && self.contains_flat(other, eps)
    }

    /// `de₁ ∧ … ∧ de_m` for the stored basis; the constant 1 for a point.
    pub fn form(&self) -> MForm {
        self.basis
            .iter()
            .fold(MForm::scalar(self.ambient_dim(), 1.0), |acc, b| {
                acc.wedge(&MForm::covector(b)).expect("degree stays within the ambient dimension")
            })
    }
}

/// Face form `de₁ ∧ … ∧ de_m` of an oriented orthonormal basis.
pub fn face_form(basis: &[Vector], tol: &Tolerances) -> Result<MForm> {
    let first = basis.first().ok_or(Error::EmptyInput("face basis"))?;
    let n = first.len();
    for (i, a) in basis.iter().enumerate() {
        if a.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.len(),
            });
        }
        for (j, b) in basis.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            if (a.dot(b) - want).abs() > tol.eps_geom {
                return Err(Error::NotOrthonormal);
            }
        }
    }
    basis.iter().try_fold(MForm::scalar(n, 1.0), |acc, b| acc.wedge(&MForm::covector(b)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Incidence {
    pub edge: usize,
    pub face: usize,
    pub normal: Vector,
}

#[derive(Debug, Clone)]
pub struct MFramework {
    ambient_dim: usize,
    face_dim: usize,
    edges: Vec<Flat>,
    faces: Vec<Flat>,
    incidences: Vec<Incidence>,
}

impl MFramework {
    pub fn new(
        ambient_dim: usize,
        face_dim: usize,
        edges: Vec<Flat>,
        faces: Vec<Flat>,
        incidences: Vec<Incidence>,
        tol: &Tolerances,
    ) -> Result<Self> {
        if face_dim == 0 || face_dim >= ambient_dim {
            return Err(Error::InvalidComplex(format!(
                "face dimension {face_dim} must lie in 1..{ambient_dim}"
            )));
        }
        for (k, f) in edges.iter().chain(&faces).enumerate() {
            let want = if k < edges.len() { face_dim - 1 } else { face_dim };
            if f.ambient_dim() != ambient_dim || f.dim() != want {
                return Err(Error::DimensionMismatch {
                    expected: want,
                    found: f.dim(),
                });
            }
        }
        for inc in &incidences {
            let e = edges.get(inc.edge).ok_or(Error::UnknownFace(inc.edge))?;
            let f = faces.get(inc.face).ok_or(Error::UnknownFace(inc.face))?;
            let n = &inc.normal;
            let ok = n.len() == ambient_dim
                && (n.norm() - 1.0).abs() <= tol.eps_geom
                && reject_from(n, f.basis()).norm() <= tol.eps_geom
                && e.basis().iter().all(|b| b.dot(n).abs() <= tol.eps_geom)
                && f.contains_flat(e, tol.eps_geom * 1f64.max(e.base().norm()));
            if !ok {
                return Err(Error::InvalidComplex(format!(
                    "bad normal or incidence between edge {} and face {}",
                    inc.edge, inc.face
                )));
            }
        }
        Ok(Self {
            ambient_dim,
            face_dim,
            edges,
            faces,
            incidences,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn face_dim(&self) -> usize {
        self.face_dim
    }

    pub fn edges(&self) -> &[Flat] {
        &self.edges
    }

    pub fn faces(&self) -> &[Flat] {
        &self.faces
    }

    pub fn incidences(&self) -> &[Incidence] {
        &self.incidences
    }

    pub fn incidences_of(&self, edge: usize) -> impl Iterator<Item = &Incidence> {
        self.incidences.iter().filter(move |i| i.edge == edge)
    }

    /// `(n·|E|) × |F|` matrix with block `n(e, f)` at edge row block `e`,
    /// face column `f`.
    pub fn equilibrium_matrix(&self) -> DMatrix<f64> {
        let n = self.ambient_dim;
        let mut m = DMatrix::zeros(n * self.edges.len(), self.faces.len());
        for inc in &self.incidences {
            for k in 0..n {
                m[(inc.edge * n + k, inc.face)] += inc.normal[k];
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceLoad {
    values: Vec<f64>,
}

impl ForceLoad {
    pub fn new(mf: &MFramework, values: Vec<f64>) -> Result<Self> {
        if values.len() != mf.faces.len() {
            return Err(Error::WrongCount {
                expected: mf.faces.len(),
                found: values.len(),
            });
        }
        Ok(Self { values })
    }

    pub fn zero(mf: &MFramework) -> Self {
        Self {
            values: vec![0.0; mf.faces.len()],
        }
    }

    pub fn get(&self, face: usize) -> f64 {
        self.values[face]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `Σ_f ω(f) n(e, f)` for every edge.
pub fn forceload_residuals(mf: &MFramework, w: &ForceLoad) -> Result<Vec<Vector>> {
    if w.values.len() != mf.faces.len() {
        return Err(Error::WrongCount {
            expected: mf.faces.len(),
            found: w.values.len(),
        });
    }
    let mut out = vec![Vector::zeros(mf.ambient_dim); mf.edges.len()];
    for inc in &mf.incidences {
        out[inc.edge] += &inc.normal * w.values[inc.face];
    }
    Ok(out)
}

/// Largest residual and the threshold `eps_geom·max(1, max|ω|)` it is
/// compared to.
pub fn forceload_defect(mf: &MFramework, w: &ForceLoad, tol: &Tolerances) -> Result<(f64, f64)> {
    let max = forceload_residuals(mf, w)?
        .iter()
        .map(|r| r.norm())
        .fold(0.0, f64::max);
    Ok((max, tol.eps_geom * 1f64.max(w.max_abs())))
}

pub fn is_equilibrium(mf: &MFramework, w: &ForceLoad, tol: &Tolerances) -> Result<bool> {
    let (max, limit) = forceload_defect(mf, w, tol)?;
    Ok(max <= limit)
}

pub(crate) fn require_equilibrium(mf: &MFramework, w: &ForceLoad, tol: &Tolerances) -> Result<()> {
    let (max, limit) = forceload_defect(mf, w, tol)?;
    if max <= limit {
        Ok(())
    } else {
        Err(Error::NotEquilibrium(max))
    }
}

/// Orthonormal basis of the equilibrium force-loads.
pub fn forceload_basis(mf: &MFramework, tol: &Tolerances) -> Vec<ForceLoad> {
    nullspace(&mf.equilibrium_matrix(), tol.eps_rank)
        .into_iter()
        .map(|v| ForceLoad {
            values: v.iter().copied().collect(),
        })
        .collect()
}

/// `Σ sign · ω(f) · α_f` over a word of face crossings.
pub fn lifting_of_word_m(mf: &MFramework, w: &ForceLoad, word: &[(usize, i32)], tol: &Tolerances) -> Result<MForm> {
    require_equilibrium(mf, w, tol)?;
    let mut acc = MForm::zero(mf.ambient_dim, mf.face_dim);
    for &(f, sign) in word {
        let face = mf.faces.get(f).ok_or(Error::UnknownFace(f))?;
        acc = &acc + &((sign as f64 * w.values[f]) * &face.form());
    }
    Ok(acc)
}

/// `Σ_f ω(f) α_e ∧ d n(e, f)` around edge `e`; zero exactly when the
/// force-load balances at `e`.
pub fn facet_monodromy(mf: &MFramework, w: &ForceLoad, edge: usize) -> Result<MForm> {
    let e = mf.edges.get(edge).ok_or(Error::UnknownFace(edge))?;
    let alpha = e.form();
    let mut acc = MForm::zero(mf.ambient_dim, mf.face_dim);
    for inc in mf.incidences_of(edge) {
        let term = alpha.wedge(&MForm::covector(&inc.normal))?;
        acc = &acc + &(w.values[inc.face] * &term);
    }
    Ok(acc)
}

/// A convex polytope given by indices into the complex's point list. For
/// polygons `vertices` is the boundary loop; facets are vertex index sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    pub vertices: Vec<usize>,
    pub facets: Vec<Vec<usize>>,
}

impl Polytope {
    pub fn polygon(lp: &[usize]) -> Self {
        let n = lp.len();
        Self {
            vertices: lp.to_vec(),
            facets: (0..n).map(|k| vec![lp[k], lp[(k + 1) % n]]).collect(),
        }
    }

    pub fn segment(a: usize, b: usize) -> Self {
        Self {
            vertices: vec![a, b],
            facets: vec![vec![a], vec![b]],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    /// Sorted vertex indices.
    pub vertices: Vec<usize>,
    pub polytopes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct PolytopalComplex {
    ambient_dim: usize,
    face_dim: usize,
    points: Vec<Vector>,
    polytopes: Vec<Polytope>,
    facets: Vec<Facet>,
    polytope_facets: Vec<Vec<usize>>,
    caller_validated: bool,
}

impl PolytopalComplex {
    /// Build and validate a complex. The intersection rule is checked for
    /// segments in any dimension and for polygons in ℝ³; other shapes are
    /// accepted as given and flagged as caller-validated.
    pub fn new(ambient_dim: usize, face_dim: usize, points: Vec<Vector>, polytopes: Vec<Polytope>, tol: &Tolerances) -> Result<Self> {
        if face_dim == 0 || face_dim >= ambient_dim {
            return Err(Error::InvalidComplex(format!(
                "face dimension {face_dim} must lie in 1..{ambient_dim}"
            )));
        }
        if polytopes.is_empty() {
            return Err(Error::EmptyInput("polytopes"));
        }
        for p in &points {
            if p.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: p.len(),
                });
            }
            if !p.iter().all(|c| c.is_finite()) {
                return Err(Error::InvalidComplex("non-finite coordinate".into()));
            }
        }
        let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut facets: Vec<Facet> = Vec::new();
        let mut polytope_facets = Vec::new();
        for (k, p) in polytopes.iter().enumerate() {
            if let Some(&bad) = p.vertices.iter().find(|&&v| v >= points.len()) {
                return Err(Error::InvalidComplex(format!("polytope {k} uses unknown point {bad}")));
            }
            let mut ids = Vec::new();
            for f in &p.facets {
                let mut key = f.clone();
                key.sort_unstable();
                key.dedup();
                if key.len() != f.len() || key.len() < face_dim || !key.iter().all(|v| p.vertices.contains(v)) {
                    return Err(Error::InvalidComplex(format!("polytope {k} has a malformed facet {f:?}")));
                }
                let id = *index.entry(key.clone()).or_insert_with(|| {
                    facets.push(Facet {
                        vertices: key,
                        polytopes: Vec::new(),
                    });
                    facets.len() - 1
                });
                if facets[id].polytopes.contains(&k) {
                    return Err(Error::InvalidComplex(format!("polytope {k} repeats a facet")));
                }
                facets[id].polytopes.push(k);
                ids.push(id);
            }
            polytope_facets.push(ids);
        }
        let validated = face_dim == 1 || (face_dim == 2 && ambient_dim == 3);
        let cx = Self {
            ambient_dim,
            face_dim,
            points,
            polytopes,
            facets,
            polytope_facets,
            caller_validated: !validated,
        };
        cx.check_points(tol)?;
        for k in 0..cx.polytopes.len() {
            cx.polytope_flat(k, tol)?;
        }
        cx.check_facet_planes(tol)?;
        if face_dim == 1 {
            cx.check_segments(tol)?;
        } else if validated {
            cx.check_polygons(tol)?;
        }
        Ok(cx)
    }

    pub fn polygons(ambient_dim: usize, points: Vec<Vector>, loops: &[Vec<usize>], tol: &Tolerances) -> Result<Self> {
        let polys = loops.iter().map(|l| Polytope::polygon(l)).collect();
        Self::new(ambient_dim, 2, points, polys, tol)
    }

    pub fn segments(ambient_dim: usize, points: Vec<Vector>, segs: &[(usize, usize)], tol: &Tolerances) -> Result<Self> {
        let polys = segs.iter().map(|&(a, b)| Polytope::segment(a, b)).collect();
        Self::new(ambient_dim, 1, points, polys, tol)
    }

    /// The 1-complex of a crossing-free framework. Point `k` is the `k`-th
    /// vertex in id order and segment `k` the `k`-th edge `p_i p_j` (i < j),
    /// oriented so that its face form is `d(p_i - p_j)/‖p_i - p_j‖`.
    pub fn from_framework(fw: &Framework, tol: &Tolerances) -> Result<(Self, Vec<VertexId>)> {
        let ids: Vec<VertexId> = fw.vertex_ids().collect();
        let pos: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(k, v)| (*v, k)).collect();
        let points = fw.vertices().map(|(_, p)| p.clone()).collect();
        let segs: Vec<(usize, usize)> = fw.edges().map(|e| (pos[&e.b()], pos[&e.a()])).collect();
        Ok((Self::segments(fw.dim(), points, &segs, tol)?, ids))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn face_dim(&self) -> usize {
        self.face_dim
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn polytopes(&self) -> &[Polytope] {
        &self.polytopes
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Facet ids of polytope `k`, in the order its facets were given.
    pub fn facets_of(&self, k: usize) -> &[usize] {
        &self.polytope_facets[k]
    }

    /// True when the intersection rule was not checked by the constructor.
    pub fn caller_validated(&self) -> bool {
        self.caller_validated
    }

    fn scale(&self) -> f64 {
        self.points.iter().map(|p| p.amax()).fold(1.0, f64::max)
    }

    fn vertex_points(&self, idx: &[usize]) -> Vec<Vector> {
        idx.iter().map(|&i| self.points[i].clone()).collect()
    }

    fn centroid(&self, k: usize) -> Vector {
        let vs = &self.polytopes[k].vertices;
        vs.iter().fold(Vector::zeros(self.ambient_dim), |acc, &i| acc + &self.points[i]) / vs.len() as f64
    }

    /// Oriented span of polytope `k`. Segments run from their first to their
    /// second vertex, polygons follow their vertex loop, and in general the
    /// vertex order is orthonormalised.
    pub fn polytope_flat(&self, k: usize, tol: &Tolerances) -> Result<Flat> {
        let p = &self.polytopes[k];
        let pts = self.vertex_points(&p.vertices);
        let eps = tol.eps_geom * self.scale();
        let dirs: Vec<Vector> = pts[1..].iter().map(|q| q - &pts[0]).collect();
        let mut basis = orthonormalize(&dirs, eps);
        if basis.len() != self.face_dim {
            return Err(Error::DegeneratePolytope(k));
        }
        if pts.iter().any(|q| reject_from(&(q - &pts[0]), &basis).norm() > eps) {
            return Err(Error::DegeneratePolytope(k));
        }
        if self.face_dim == 2 && signed_area(&plane_coords(&pts, &pts[0], &basis)) < 0.0 {
            basis[1].neg_mut();
        }
        Ok(Flat {
            base: pts[0].clone(),
            basis,
        })
    }

    pub fn facet_flat(&self, f: usize, tol: &Tolerances) -> Result<Flat> {
        let pts = self.vertex_points(&self.facets[f].vertices);
        let dirs: Vec<Vector> = pts[1..].iter().map(|q| q - &pts[0]).collect();
        let basis = orthonormalize(&dirs, tol.eps_geom * self.scale());
        if basis.len() + 1 != self.face_dim {
            return Err(Error::InvalidComplex(format!("facet {f} is degenerate")));
        }
        Ok(Flat {
            base: pts[0].clone(),
            basis,
        })
    }

    /// m-dimensional volume of every polytope (lengths or areas).
    pub fn volumes(&self, tol: &Tolerances) -> Result<Vec<f64>> {
        (0..self.polytopes.len())
            .map(|k| {
                let pts = self.vertex_points(&self.polytopes[k].vertices);
                match self.face_dim {
                    1 => Ok((&pts[1] - &pts[0]).norm()),
                    2 => {
                        let flat = self.polytope_flat(k, tol)?;
                        Ok(signed_area(&plane_coords(&pts, flat.base(), flat.basis())).abs())
                    }
                    m => Err(Error::Unsupported(format!("volumes of {m}-polytopes"))),
                }
            })
            .collect()
    }

    fn check_points(&self, tol: &Tolerances) -> Result<()> {
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                if (&self.points[i] - &self.points[j]).norm() <= tol.eps_geom {
                    return Err(Error::InvalidComplex(format!("points {i} and {j} coincide")));
                }
            }
        }
        Ok(())
    }

    fn check_facet_planes(&self, tol: &Tolerances) -> Result<()> {
        if self.face_dim == 1 {
            // Facets are distinct points.
            return Ok(());
        }
        let flats: Vec<Flat> = (0..self.facets.len())
            .map(|f| self.facet_flat(f, tol))
            .collect::<Result<_>>()?;
        let eps = tol.eps_geom * self.scale();
        for i in 0..flats.len() {
            for j in i + 1..flats.len() {
                if flats[i].same_as(&flats[j], eps) {
                    return Err(Error::InvalidComplex(format!("facets {i} and {j} span the same plane")));
                }
            }
        }
        Ok(())
    }

    fn check_segments(&self, tol: &Tolerances) -> Result<()> {
        let eps = tol.eps_geom * self.scale();
        let seg = |k: usize| {
            let v = &self.polytopes[k].vertices;
            (v[0], v[1])
        };
        for i in 0..self.polytopes.len() {
            for j in i + 1..self.polytopes.len() {
                let (a, b) = seg(i);
                let (c, d) = seg(j);
                let shared: Vec<usize> = [a, b].into_iter().filter(|v| *v == c || *v == d).collect();
                let bad = match shared.len() {
                    0 => {
                        let p = &self.points;
                        segment_distance(&p[a], &p[b], &p[c], &p[d]) <= eps
                    }
                    1 => {
                        let s = shared[0];
                        let u = &self.points[if a == s { b } else { a }] - &self.points[s];
                        let w = &self.points[if c == s { d } else { c }] - &self.points[s];
                        u.normalize().dot(&w.normalize()) >= 1.0 - tol.eps_geom
                    }
                    _ => true,
                };
                if bad {
                    return Err(Error::InvalidComplex(format!("segments {i} and {j} overlap")));
                }
            }
        }
        Ok(())
    }

    fn check_polygons(&self, tol: &Tolerances) -> Result<()> {
        let eps = tol.eps_geom * self.scale();
        let polys: Vec<Poly3> = (0..self.polytopes.len())
            .map(|k| self.poly3(k, tol))
            .collect::<Result<_>>()?;
        for (k, p) in polys.iter().enumerate() {
            let pts2 = p.coords2();
            let n = pts2.len();
            for i in 0..n {
                let (a, b, c) = (pts2[i], pts2[(i + 1) % n], pts2[(i + 2) % n]);
                let turn = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
                if turn <= eps * self.scale() {
                    return Err(Error::InvalidComplex(format!("polygon {k} is not strictly convex")));
                }
            }
        }
        for i in 0..polys.len() {
            for j in i + 1..polys.len() {
                let shared: Vec<usize> = self.polytope_facets[i]
                    .iter()
                    .filter(|f| self.polytope_facets[j].contains(f))
                    .copied()
                    .collect();
                self.check_polygon_pair(&polys[i], &polys[j], &shared, eps)
                    .map_err(|why| Error::InvalidComplex(format!("polygons {i} and {j} {why}")))?;
            }
        }
        Ok(())
    }

    fn poly3(&self, k: usize, tol: &Tolerances) -> Result<Poly3> {
        let flat = self.polytope_flat(k, tol)?;
        let v3 = |v: &Vector| Vector3::new(v[0], v[1], v[2]);
        let e1 = v3(&flat.basis[0]);
        let e2 = v3(&flat.basis[1]);
        Ok(Poly3 {
            pts: self.polytopes[k].vertices.iter().map(|&i| v3(&self.points[i])).collect(),
            origin: v3(&flat.base),
            e1,
            e2,
            normal: e1.cross(&e2),
        })
    }

    fn check_polygon_pair(&self, p: &Poly3, q: &Poly3, shared: &[usize], eps: f64) -> std::result::Result<(), String> {
        let dir = p.normal.cross(&q.normal);
        if dir.norm() > 1e-9 {
            let dir = dir.normalize();
            let m = Matrix3::from_rows(&[p.normal.transpose(), q.normal.transpose(), dir.transpose()]);
            let rhs = Vector3::new(p.normal.dot(&p.origin), q.normal.dot(&q.origin), 0.0);
            let x0 = m.lu().solve(&rhs).ok_or("have an ill-conditioned intersection")?;
            let (Some(ip), Some(iq)) = (p.line_interval(&x0, &dir, eps), q.line_interval(&x0, &dir, eps)) else {
                return Ok(());
            };
            let (lo, hi) = (ip.0.max(iq.0), ip.1.min(iq.1));
            if hi - lo <= eps {
                return Ok(());
            }
            let matches = shared.iter().any(|&f| {
                let vs = &self.facets[f].vertices;
                let t: Vec<f64> = vs
                    .iter()
                    .map(|&v| (Vector3::new(self.points[v][0], self.points[v][1], self.points[v][2]) - x0).dot(&dir))
                    .collect();
                let (a, b) = (t[0].min(t[1]), t[0].max(t[1]));
                (a - lo).abs() <= eps && (b - hi).abs() <= eps
            });
            if matches {
                Ok(())
            } else {
                Err("meet along a segment that is not a shared facet".into())
            }
        } else {
            if p.normal.dot(&(q.origin - p.origin)).abs() > eps {
                return Ok(());
            }
            let a = p.coords2();
            let b: Vec<[f64; 2]> = q.pts.iter().map(|x| p.to2(x)).collect();
            let b = if signed_area(&b) < 0.0 { b.into_iter().rev().collect() } else { b };
            if signed_area(&clip_convex(&a, &b)) > eps * self.scale() {
                return Err("overlap in a common plane".into());
            }
            // Collinear boundary overlaps must be shared facets.
            let na = a.len();
            let nb = b.len();
            for i in 0..na {
                for j in 0..nb {
                    let (s0, s1) = (a[i], a[(i + 1) % na]);
                    let (t0, t1) = (b[j], b[(j + 1) % nb]);
                    if collinear_overlap(s0, s1, t0, t1, eps) {
                        let pa = [p.pts[i], p.pts[(i + 1) % na]];
                        let same = shared.iter().any(|&f| {
                            let vs = &self.facets[f].vertices;
                            let ends: Vec<Vector3<f64>> =
                                vs.iter().map(|&v| Vector3::new(self.points[v][0], self.points[v][1], self.points[v][2])).collect();
                            (pa[0] - ends[0]).norm() + (pa[1] - ends[1]).norm() <= 2.0 * eps
                                || (pa[0] - ends[1]).norm() + (pa[1] - ends[0]).norm() <= 2.0 * eps
                        });
                        if !same {
                            return Err("share a boundary segment that is not a common facet".into());
                        }
                    }
                }
            }
            Ok(())
        }
    }

    /// The associated m-framework: facet spans as edges, polytope spans as
    /// faces, inward unit normals. Edge `k` is facet `k`, face `k` is polytope
    /// `k`.
    pub fn associated_mframework(&self, tol: &Tolerances) -> Result<MFramework> {
        let faces: Vec<Flat> = (0..self.polytopes.len())
            .map(|k| self.polytope_flat(k, tol))
            .collect::<Result<_>>()?;
        let edges: Vec<Flat> = (0..self.facets.len())
            .map(|f| self.facet_flat(f, tol))
            .collect::<Result<_>>()?;
        let mut incidences = Vec::new();
        for (f, facet) in self.facets.iter().enumerate() {
            for &k in &facet.polytopes {
                let c = self.centroid(k);
                let w = reject_from(&(c - edges[f].base()), edges[f].basis());
                let norm = w.norm();
                if norm <= tol.eps_geom {
                    return Err(Error::DegeneratePolytope(k));
                }
                incidences.push(Incidence {
                    edge: f,
                    face: k,
                    normal: w / norm,
                });
            }
        }
        MFramework::new(self.ambient_dim, self.face_dim, edges, faces, incidences, tol)
    }
}

struct Poly3 {
    pts: Vec<Vector3<f64>>,
    origin: Vector3<f64>,
    e1: Vector3<f64>,
    e2: Vector3<f64>,
    normal: Vector3<f64>,
}

impl Poly3 {
    fn to2(&self, x: &Vector3<f64>) -> [f64; 2] {
        let d = x - self.origin;
        [d.dot(&self.e1), d.dot(&self.e2)]
    }

    fn coords2(&self) -> Vec<[f64; 2]> {
        self.pts.iter().map(|x| self.to2(x)).collect()
    }

    /// Parameter interval of the intersection of the polygon with the line
    /// `x0 + t dir`, which must lie in the polygon's plane.
    fn line_interval(&self, x0: &Vector3<f64>, dir: &Vector3<f64>, eps: f64) -> Option<(f64, f64)> {
        let m = self.normal.cross(dir);
        let s: Vec<f64> = self.pts.iter().map(|p| (p - x0).dot(&m)).collect();
        let t: Vec<f64> = self.pts.iter().map(|p| (p - x0).dot(dir)).collect();
        let n = self.pts.len();
        let mut ts = Vec::new();
        for k in 0..n {
            let l = (k + 1) % n;
            if s[k].abs() <= eps {
                ts.push(t[k]);
            } else if s[l].abs() > eps && s[k] * s[l] < 0.0 {
                ts.push(t[k] + (t[l] - t[k]) * s[k] / (s[k] - s[l]));
            }
        }
        let lo = ts.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo <= hi).then_some((lo, hi))
    }
}

fn plane_coords(pts: &[Vector], base: &Vector, basis: &[Vector]) -> Vec<[f64; 2]> {
    pts.iter()
        .map(|p| {
            let d = p - base;
            [d.dot(&basis[0]), d.dot(&basis[1])]
        })
        .collect()
}

fn signed_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|k| {
            let (a, b) = (poly[k], poly[(k + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        / 2.0
}

/// Sutherland–Hodgman clipping of `subject` by the counter-clockwise convex
/// polygon `clip`.
fn clip_convex(subject: &[[f64; 2]], clip: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let side = |a: [f64; 2], b: [f64; 2], p: [f64; 2]| (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    let mut out = subject.to_vec();
    let n = clip.len();
    for k in 0..n {
        if out.is_empty() {
            break;
        }
        let (a, b) = (clip[k], clip[(k + 1) % n]);
        let input = std::mem::take(&mut out);
        let m = input.len();
        for i in 0..m {
            let (p, q) = (input[i], input[(i + 1) % m]);
            let (sp, sq) = (side(a, b, p), side(a, b, q));
            if sp >= 0.0 {
                out.push(p);
            }
            if (sp >= 0.0) != (sq >= 0.0) {
                let t = sp / (sp - sq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
    }
    out
}

fn collinear_overlap(s0: [f64; 2], s1: [f64; 2], t0: [f64; 2], t1: [f64; 2], eps: f64) -> bool {
    let d = [s1[0] - s0[0], s1[1] - s0[1]];
    let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
    let off = |p: [f64; 2]| ((p[0] - s0[0]) * d[1] - (p[1] - s0[1]) * d[0]) / len;
    if off(t0).abs() > eps || off(t1).abs() > eps {
        return false;
    }
    let proj = |p: [f64; 2]| ((p[0] - s0[0]) * d[0] + (p[1] - s0[1]) * d[1]) / len;
    let (a, b) = (proj(t0).min(proj(t1)), proj(t0).max(proj(t1)));
    b.min(len) - a.max(0.0) > eps
}

/// Convert between stresses and force-loads: a force-load is a stress times
/// the m-volume of its face. `to_forceload = false` divides instead.
pub fn convert_stress_forceload(c: &PolytopalComplex, values: &[f64], to_forceload: bool, tol: &Tolerances) -> Result<Vec<f64>> {
    if values.len() != c.polytopes.len() {
        return Err(Error::WrongCount {
            expected: c.polytopes.len(),
            found: values.len(),
        });
    }
    let vols = c.volumes(tol)?;
    values
        .iter()
        .zip(&vols)
        .enumerate()
        .map(|(k, (v, vol))| {
            if to_forceload {
                Ok(v * vol)
            } else if *vol <= tol.eps_geom {
                Err(Error::ZeroVolume(k))
            } else {
                Ok(v / vol)
            }
        })
        .collect()
}

/// Force-load on the 1-complex of a framework built by
/// [`PolytopalComplex::from_framework`]: `ω(e)·‖p_i - p_j‖`.
pub fn stress_to_forceload(fw: &Framework, s: &Stress, c: &PolytopalComplex, tol: &Tolerances) -> Result<Vec<f64>> {
    let values: Vec<f64> = fw.edges().map(|e| s.get(&e)).collect();
    convert_stress_forceload(c, &values, true, tol)
}

/// Polygonal surface mesh in ℝ³ with planar faces given as vertex loops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonMesh {
    pub points: Vec<[f64; 3]>,
    pub faces: Vec<Vec<usize>>,
}

impl PolygonMesh {
    /// Axis-aligned cube with the given minimum corner and side length.
    pub fn cube(min: [f64; 3], side: f64) -> Self {
        let points = (0..8)
            .map(|k| {
                let bit = |b: usize| if k >> b & 1 == 1 { side } else { 0.0 };
                [min[0] + bit(0), min[1] + bit(1), min[2] + bit(2)]
            })
            .collect();
        let faces = vec![
            vec![0, 2, 3, 1],
            vec![4, 5, 7, 6],
            vec![0, 1, 5, 4],
            vec![2, 6, 7, 3],
            vec![0, 4, 6, 2],
            vec![1, 3, 7, 5],
        ];
        Self { points, faces }
    }

    /// Undirected edges in first-seen order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for f in &self.faces {
            for k in 0..f.len() {
                let (a, b) = (f[k], f[(k + 1) % f.len()]);
                if seen.insert((a.min(b), a.max(b))) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// The mesh, its homothetic copy `λ·mesh` about the origin, and one
/// trapezoid per mesh edge joining the edge to its copy.
///
/// Polytopes are ordered: mesh faces, scaled faces, then trapezoids in
/// [`PolygonMesh::edges`] order.
pub fn parallel_prism_complex(mesh: &PolygonMesh, lambda: f64, tol: &Tolerances) -> Result<PolytopalComplex> {
    if !lambda.is_finite() || lambda == 0.0 || (lambda - 1.0).abs() <= tol.eps_geom {
        return Err(Error::InvalidComplex(format!("scale {lambda} makes copies coincide")));
    }
    let n = mesh.points.len();
    let mut points: Vec<Vector> = mesh.points.iter().map(|p| Vector::from_column_slice(p)).collect();
    for (k, f) in mesh.faces.iter().enumerate() {
        let pts: Vec<Vector> = f.iter().map(|&i| points[i].clone()).collect();
        let flat = Flat::through(&pts, tol.eps_geom).or_else(|_| {
            Flat::new(pts[0].clone(), &[&pts[1] - &pts[0], &pts[2] - &pts[0]], tol.eps_geom)
        });
        let planar = flat.is_ok_and(|fl| fl.dim() == 2 && pts.iter().all(|p| fl.distance_to(p) <= tol.eps_geom));
        if !planar {
            return Err(Error::InvalidComplex(format!("mesh face {k} is not planar")));
        }
    }
    if mesh.points.iter().any(|p| p.iter().all(|c| c.abs() <= tol.eps_geom)) {
        return Err(Error::InvalidComplex("origin is a mesh vertex".into()));
    }
    points.extend(mesh.points.iter().map(|p| Vector::from_column_slice(p) * lambda));
    let mut loops: Vec<Vec<usize>> = mesh.faces.clone();
    loops.extend(mesh.faces.iter().map(|f| f.iter().map(|&i| i + n).collect()));
    loops.extend(mesh.edges().into_iter().map(|(a, b)| vec![a, b, b + n, a + n]));
    PolytopalComplex::polygons(3, points, &loops, tol)
}
