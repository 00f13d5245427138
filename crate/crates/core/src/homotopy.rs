//! Differential liftings of frameworks in higher dimensions.
//!
//! A lifting is a homomorphism on homotopy classes of loops in the complement
//! of the framework. Winding a loop once through the "wall" of edge `p_i p_j`
//! changes its value by `±ω_ij d(p_i - p_j)`, so the lifting of a class is
//! determined by a signed word of such elementary crossings.
//!
//! For concrete polygonal loops in ℝ³ the word is read off by coning the loop
//! to an apex and counting, for every edge, the signed intersections of the
//! cone with that edge.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, UnitQuaternion, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::form::MForm;
use crate::framework::{require_self_stress, Edge, Framework, Stress, VertexId};
use crate::linalg::{self, Vector};
use crate::tol::Tolerances;

/// Retries for a generic projection direction.
pub const PROJECTION_ATTEMPTS: usize = 32;
/// Retries with a perturbed cone apex.
pub const APEX_ATTEMPTS: usize = 16;

// Global orientation constants, fixed against the Hopf link oracle and the
// K5 reference values.
const PROJECTION_SIGN: i32 = 1;
const CONE_SIGN: i32 = -1;

/// One elementary crossing through the wall of the edge oriented `from → to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crossing {
    pub from: VertexId,
    pub to: VertexId,
    pub sign: i32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrossingWord {
    pub entries: Vec<Crossing>,
}

impl CrossingWord {
    pub fn new(entries: &[(u32, u32, i32)]) -> Self {
        Self {
            entries: entries
                .iter()
                .map(|&(from, to, sign)| Crossing {
                    from: VertexId(from),
                    to: VertexId(to),
                    sign,
                })
                .collect(),
        }
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Self { entries }
    }

    /// The word of the inverse class.
    pub fn inverse(&self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .rev()
                .map(|c| Crossing { sign: -c.sign, ..*c })
                .collect(),
        }
    }
}

/// `sign · ω_ij · d(p_i - p_j)` for the edge oriented `i → j`.
pub fn elementary_lifting_form(fw: &Framework, s: &Stress, i: VertexId, j: VertexId, sign: i32) -> Result<MForm> {
    let e = Edge::new(i, j)?;
    if !fw.has_edge(&e) {
        return Err(Error::UnknownEdge(e));
    }
    if sign.abs() != 1 {
        return Err(Error::InvalidLoop(format!("crossing sign must be ±1, got {sign}")));
    }
    let d = fw.difference(i, j)?;
    Ok((sign as f64 * s.get(&e)) * &MForm::covector(&d))
}

pub fn lifting_of_word(fw: &Framework, s: &Stress, w: &CrossingWord, tol: &Tolerances) -> Result<MForm> {
    require_self_stress(fw, s, tol)?;
    let mut acc = MForm::zero(fw.dim(), 1);
    for c in &w.entries {
        acc = &acc + &elementary_lifting_form(fw, s, c.from, c.to, c.sign)?;
    }
    Ok(acc)
}

/// `Σ_j ω_ij d(p_i - p_j)` over the edges at `i`; zero exactly when the
/// stress is in equilibrium at `i`.
pub fn vertex_monodromy(fw: &Framework, s: &Stress, i: VertexId) -> Result<MForm> {
    fw.point(i)?;
    let mut acc = MForm::zero(fw.dim(), 1);
    for e in fw.incident_edges(i) {
        let j = e.other(i).expect("incident edge");
        acc = &acc + &(s.get(&e) * &MForm::covector(&fw.difference(i, j)?));
    }
    Ok(acc)
}

/// Elementary forms of all edges, oriented from the smaller id.
pub fn elementary_forms(fw: &Framework, s: &Stress) -> Result<BTreeMap<Edge, MForm>> {
    fw.edges()
        .map(|e| Ok((e, elementary_lifting_form(fw, s, e.a(), e.b(), 1)?)))
        .collect()
}

/// Invert [`elementary_lifting_form`]: read `ω_ij` off each form. Edges
/// without a form get stress zero.
pub fn recover_stress_nd(fw: &Framework, values: &BTreeMap<(VertexId, VertexId), MForm>, tol: &Tolerances) -> Result<Stress> {
    let mut out = BTreeMap::new();
    for (&(i, j), form) in values {
        let e = Edge::new(i, j)?;
        if !fw.has_edge(&e) {
            return Err(Error::UnknownEdge(e));
        }
        let d = fw.difference(i, j)?;
        let v = form.to_vector().ok_or(Error::DegreeOverflow {
            degree: form.degree(),
            dim: fw.dim(),
        })?;
        if v.len() != d.len() {
            return Err(Error::DimensionMismatch {
                expected: d.len(),
                found: v.len(),
            });
        }
        let omega = v.dot(&d) / d.norm_squared();
        let residual = (&v - &d * omega).amax();
        if residual > tol.eps_form * 1f64.max(v.amax()) {
            return Err(Error::NotParallel { edge: e, residual });
        }
        out.insert(e, omega);
    }
    Stress::new(fw, out)
}

/// Closed polyline in ℝ³.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonalLoop {
    points: Vec<Vector3<f64>>,
}

impl PolygonalLoop {
    pub fn new(points: Vec<Vector3<f64>>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidLoop(format!("{} points, need at least 3", points.len())));
        }
        let n = points.len();
        for k in 0..n {
            if !points[k].iter().all(|c| c.is_finite()) {
                return Err(Error::InvalidLoop(format!("point {k} is not finite")));
            }
            if points[k] == points[(k + 1) % n] {
                return Err(Error::InvalidLoop(format!("points {k} and {} coincide", (k + 1) % n)));
            }
        }
        Ok(Self { points })
    }

    pub fn from_coords(coords: &[[f64; 3]]) -> Result<Self> {
        Self::new(coords.iter().map(|c| Vector3::new(c[0], c[1], c[2])).collect())
    }

    /// Regular polygon approximating the circle `center + r(cos t u + sin t v)`.
    pub fn circle(center: Vector3<f64>, u: Vector3<f64>, v: Vector3<f64>, r: f64, sides: usize) -> Result<Self> {
        Self::new(
            (0..sides)
                .map(|k| {
                    let t = std::f64::consts::TAU * k as f64 / sides as f64;
                    center + (u * t.cos() + v * t.sin()) * r
                })
                .collect(),
        )
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn segments(&self) -> impl Iterator<Item = (Vector3<f64>, Vector3<f64>)> + '_ {
        let n = self.points.len();
        (0..n).map(move |k| (self.points[k], self.points[(k + 1) % n]))
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self { points }
    }

    /// Same loop with the midpoint of every segment inserted.
    pub fn refined(&self) -> Self {
        let points = self
            .segments()
            .flat_map(|(a, b)| [a, (a + b) / 2.0])
            .collect();
        Self { points }
    }

    pub fn min_distance(&self, other: &Self) -> f64 {
        self.segments()
            .flat_map(|(a, b)| other.segments().map(move |(c, d)| segment_distance(a, b, c, d)))
            .fold(f64::INFINITY, f64::min)
    }
}

fn segment_distance(a: Vector3<f64>, b: Vector3<f64>, c: Vector3<f64>, d: Vector3<f64>) -> f64 {
    let v = |p: Vector3<f64>| Vector::from_column_slice(p.as_slice());
    linalg::segment_distance(&v(a), &v(b), &v(c), &v(d))
}

fn random_rotation(rng: &mut ChaCha8Rng) -> UnitQuaternion<f64> {
    loop {
        let q = Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let n = q.norm();
        if n > 0.1 && n <= 1.0 {
            return UnitQuaternion::from_quaternion(nalgebra::Quaternion::from(q / n));
        }
    }
}

/// Linking number of two disjoint closed polylines from the signed crossings
/// of a generic projection.
pub fn linking_number(a: &PolygonalLoop, b: &PolygonalLoop, tol: &Tolerances) -> Result<i32> {
    if a.min_distance(b) <= tol.eps_geom {
        return Err(Error::LoopsIntersect);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..PROJECTION_ATTEMPTS {
        let rot = random_rotation(&mut rng);
        if let Some(total) = projected_crossings(a, b, &rot) {
            // Every crossing between the two curves is seen once from each
            // side, so the signed total is twice the linking number.
            return Ok(PROJECTION_SIGN * total / 2);
        }
    }
    Err(Error::DegenerateProjection(PROJECTION_ATTEMPTS))
}

fn projected_crossings(a: &PolygonalLoop, b: &PolygonalLoop, rot: &UnitQuaternion<f64>) -> Option<i32> {
    const MARGIN: f64 = 1e-7;
    let pa: Vec<Vector3<f64>> = a.points.iter().map(|p| rot * p).collect();
    let pb: Vec<Vector3<f64>> = b.points.iter().map(|p| rot * p).collect();
    let cross2 = |u: Vector3<f64>, v: Vector3<f64>| u.x * v.y - u.y * v.x;
    let mut total = 0;
    for k in 0..pa.len() {
        let (p, p2) = (pa[k], pa[(k + 1) % pa.len()]);
        for l in 0..pb.len() {
            let (q, q2) = (pb[l], pb[(l + 1) % pb.len()]);
            let (r, s) = (p2 - p, q2 - q);
            let denom = cross2(r, s);
            let scale = r.xy().norm() * s.xy().norm();
            let qp = q - p;
            if denom.abs() <= MARGIN * scale {
                // Parallel in projection: harmless unless they overlap.
                if cross2(qp, r).abs() <= MARGIN * r.xy().norm() * (1.0 + qp.xy().norm()) {
                    return None;
                }
                continue;
            }
            let t = cross2(qp, s) / denom;
            let u = cross2(qp, r) / denom;
            if t < -MARGIN || t > 1.0 + MARGIN || u < -MARGIN || u > 1.0 + MARGIN {
                continue;
            }
            if t < MARGIN || t > 1.0 - MARGIN || u < MARGIN || u > 1.0 - MARGIN {
                return None;
            }
            let za = p.z + t * r.z;
            let zb = q.z + u * s.z;
            if (za - zb).abs() <= MARGIN {
                return None;
            }
            let over = if za > zb { 1 } else { -1 };
            total += over * denom.signum() as i32;
        }
    }
    Some(total)
}

/// Signed number of intersections of the cone over `lp` with apex `apex` and
/// the open segment `q1 q2`.
pub fn cone_crossings(lp: &PolygonalLoop, apex: &Vector3<f64>, q1: &Vector3<f64>, q2: &Vector3<f64>, tol: &Tolerances) -> Result<i32> {
    const MARGIN: f64 = 1e-9;
    let dir = q2 - q1;
    let edge = Edge::new(0u32, 1u32).expect("distinct ids");
    let mut count = 0;
    for (x, y) in lp.segments() {
        let (u, v) = (x - apex, y - apex);
        // apex + s u + t v = q1 + w dir
        let m = Matrix3::from_columns(&[u, v, -dir]);
        let det = m.determinant();
        let scale = u.norm() * v.norm() * dir.norm();
        if det.abs() <= MARGIN * scale {
            let normal = u.cross(&v);
            if normal.norm() <= MARGIN * u.norm() * v.norm() {
                // Degenerate triangle: apex on the line through the segment.
                return Err(Error::NonTransversal(edge));
            }
            let h = normal.normalize();
            if (q1 - apex).dot(&h).abs() <= tol.eps_geom {
                return Err(Error::NonTransversal(edge));
            }
            continue;
        }
        let Some(sol) = m.lu().solve(&(q1 - apex)) else {
            return Err(Error::NonTransversal(edge));
        };
        let (s, t, w) = (sol.x, sol.y, sol.z);
        let inside = s > -MARGIN && t > -MARGIN && s + t < 1.0 + MARGIN && w > -MARGIN && w < 1.0 + MARGIN;
        if !inside {
            continue;
        }
        let strictly = s > MARGIN && t > MARGIN && s + t < 1.0 - MARGIN && w > MARGIN && w < 1.0 - MARGIN;
        if !strictly {
            return Err(Error::NonTransversal(edge));
        }
        count += CONE_SIGN * det.signum() as i32;
    }
    Ok(count)
}

fn point3(p: &Vector) -> Vector3<f64> {
    Vector3::new(p[0], p[1], p[2])
}

/// Crossing word of a concrete loop, read off from the cone with the given
/// apex. The apex is perturbed deterministically when the cone is not
/// transversal to some edge.
pub fn loop_word(fw: &Framework, lp: &PolygonalLoop, apex: &Vector3<f64>, tol: &Tolerances) -> Result<CrossingWord> {
    if fw.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: fw.dim(),
        });
    }
    for e in fw.edges() {
        let (p, q) = (point3(fw.point(e.a())?), point3(fw.point(e.b())?));
        if lp.segments().any(|(x, y)| segment_distance(x, y, p, q) <= tol.eps_geom) {
            return Err(Error::InvalidLoop(format!("loop touches edge {e}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xa9e7);
    let scale = fw.scale().max(1.0);
    let mut last = None;
    for attempt in 0..APEX_ATTEMPTS {
        let apex = if attempt == 0 {
            *apex
        } else {
            apex + Vector3::from_fn(|_, _| rng.gen_range(-1e-3..1e-3)) * scale
        };
        match word_for_apex(fw, lp, &apex, tol) {
            Ok(w) => return Ok(w),
            Err(Error::NonTransversal(e)) => last = Some(e),
            Err(other) => return Err(other),
        }
    }
    Err(Error::NonTransversal(last.expect("at least one attempt")))
}

fn word_for_apex(fw: &Framework, lp: &PolygonalLoop, apex: &Vector3<f64>, tol: &Tolerances) -> Result<CrossingWord> {
    let mut entries = Vec::new();
    for e in fw.edges() {
        let (p, q) = (point3(fw.point(e.a())?), point3(fw.point(e.b())?));
        let c = cone_crossings(lp, apex, &p, &q, tol).map_err(|err| match err {
            Error::NonTransversal(_) => Error::NonTransversal(e),
            other => other,
        })?;
        let sign = c.signum();
        for _ in 0..c.abs() {
            entries.push(Crossing {
                from: e.a(),
                to: e.b(),
                sign,
            });
        }
    }
    Ok(CrossingWord { entries })
}

/// Lifting of the homotopy class of a concrete loop in the complement of a
/// framework in ℝ³.
pub fn lifting_of_loop(fw: &Framework, s: &Stress, lp: &PolygonalLoop, apex: &Vector3<f64>, tol: &Tolerances) -> Result<MForm> {
    require_self_stress(fw, s, tol)?;
    let w = loop_word(fw, lp, apex, tol)?;
    lifting_of_word(fw, s, &w, tol)
}
