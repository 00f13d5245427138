//! Liftings over paths in the affine Grassmannian.
//!
//! For a polytopal m-complex in ℝⁿ with an equilibrium force-load, move an
//! affine (n-m-1)-flat from far away to a target flat `ℓ`, recording every
//! transversal crossing with a face `f` and its sign `μ`. The value
//! `Σ μ ω(f) dist(ℓ, f)` depends only on `ℓ`.
//!
//! `dist` is the signed volume spanned by the two flats, normalised by their
//! own volumes:
//!
//! ```text
//! dist(p, q) = det(q₂-q₁, …, q_m-q₁, p₁-q₁, …, p_k-q₁) / (vol(q) · vol(p))
//! ```

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{gram_volume, least_squares, signed_det, Vector};
use crate::polytopal::{require_equilibrium, Flat, ForceLoad, PolytopalComplex};
use crate::tol::Tolerances;

/// Default number of samples per path segment.
pub const SCAN_SAMPLES: usize = 1024;
/// Extra doublings allowed around a suspected double root (1024 · 2⁶ = 2¹⁶).
pub const MAX_DOUBLINGS: u32 = 6;

/// Affine flat given by spanning points; its dimension is `len - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFlat {
    points: Vec<Vector>,
}

impl AffineFlat {
    pub fn new(points: Vec<Vector>, tol: &Tolerances) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput("flat points"))?;
        let n = first.len();
        if let Some(p) = points.iter().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.len(),
            });
        }
        if points.len() > n + 1 || spanned_volume(&points)? <= tol.eps_geom {
            return Err(Error::DegenerateFlat);
        }
        Ok(Self { points })
    }

    pub fn from_coords(points: &[&[f64]], tol: &Tolerances) -> Result<Self> {
        Self::new(points.iter().map(|p| Vector::from_column_slice(p)).collect(), tol)
    }

    /// Spanning tuple `(b, b + e₁, …, b + e_m)` of an oriented flat.
    pub fn from_flat(flat: &Flat) -> Self {
        let mut points = vec![flat.base().clone()];
        points.extend(flat.basis().iter().map(|e| flat.base() + e));
        Self { points }
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.points.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn translated(&self, v: &Vector) -> Self {
        Self {
            points: self.points.iter().map(|p| p + v).collect(),
        }
    }

    /// Distance from `x` to the flat.
    pub fn distance_to(&self, x: &Vector) -> f64 {
        let dirs: Vec<Vector> = self.points[1..].iter().map(|p| p - &self.points[0]).collect();
        let basis = crate::linalg::orthonormalize(&dirs, 0.0);
        crate::linalg::reject_from(&(x - &self.points[0]), &basis).norm()
    }
}

fn spanned_volume(points: &[Vector]) -> Result<f64> {
    if points.len() == 1 {
        return Ok(1.0);
    }
    let diffs: Vec<Vector> = points[1..].iter().map(|p| p - &points[0]).collect();
    gram_volume(&diffs)
}

fn numerator(a: &[Vector], b: &[Vector]) -> Result<f64> {
    let q1 = &b[0];
    let cols: Vec<Vector> = b[1..].iter().chain(a.iter()).map(|x| x - q1).collect();
    signed_det(&cols)
}

/// Signed distance of the flat `a` (the moving flat) from the flat `b`
/// (a face).
pub fn flat_distance(a: &AffineFlat, b: &AffineFlat) -> Result<f64> {
    let n = a.ambient_dim();
    if b.ambient_dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.ambient_dim(),
        });
    }
    if a.points.len() + b.points.len() != n + 1 {
        return Err(Error::WrongCount {
            expected: n + 1,
            found: a.points.len() + b.points.len(),
        });
    }
    let va = spanned_volume(&a.points)?;
    let vb = spanned_volume(&b.points)?;
    if va == 0.0 || vb == 0.0 {
        return Err(Error::DegenerateFlat);
    }
    Ok(numerator(&a.points, &b.points)? / (va * vb))
}

/// Piecewise-linear motion of spanning points through the given samples.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannPath {
    samples: Vec<AffineFlat>,
}

impl GrassmannPath {
    pub fn new(samples: Vec<AffineFlat>) -> Result<Self> {
        let first = samples.first().ok_or(Error::EmptyInput("path samples"))?;
        if samples.len() < 2 {
            return Err(Error::NonSimplePath("a path needs at least two flats".into()));
        }
        for (k, s) in samples.iter().enumerate() {
            if s.points.len() != first.points.len() || s.ambient_dim() != first.ambient_dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: s.dim(),
                });
            }
            if k > 0 && *s == samples[k - 1] {
                return Err(Error::NonSimplePath(format!("samples {} and {k} coincide", k - 1)));
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[AffineFlat] {
        &self.samples
    }

    pub fn start(&self) -> &AffineFlat {
        &self.samples[0]
    }

    pub fn end(&self) -> &AffineFlat {
        self.samples.last().expect("non-empty path")
    }

    pub fn reversed(&self) -> Self {
        let mut samples = self.samples.clone();
        samples.reverse();
        Self { samples }
    }

    pub fn segments(&self) -> usize {
        self.samples.len() - 1
    }

    /// Spanning points at global parameter `t ∈ [0, 1]`.
    pub fn points_at(&self, t: f64) -> Vec<Vector> {
        let s = self.segments() as f64;
        let k = ((t * s).floor() as usize).min(self.segments() - 1);
        self.interpolate(k, t * s - k as f64)
    }

    fn interpolate(&self, k: usize, tau: f64) -> Vec<Vector> {
        let (a, b) = (&self.samples[k].points, &self.samples[k + 1].points);
        a.iter().zip(b).map(|(p, q)| p * (1.0 - tau) + q * tau).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingEvent {
    pub face: usize,
    /// Global path parameter in `[0, 1]`.
    pub t: f64,
    pub mu: i32,
}

/// Closest approach of the flat spanned by `pts` to the plane of `face`;
/// the meeting point when they meet.
fn meeting_point(pts: &[Vector], face: &Flat) -> Vector {
    let mut cols: Vec<Vector> = pts[1..].iter().map(|p| p - &pts[0]).collect();
    cols.extend(face.basis().iter().map(|e| -e));
    let rhs = face.base() - &pts[0];
    if cols.is_empty() {
        return pts[0].clone();
    }
    let m = DMatrix::from_columns(&cols);
    let (x, _) = least_squares(&m, &rhs);
    (0..pts.len() - 1).fold(pts[0].clone(), |p, i| p + &cols[i] * x[i])
}

enum Location {
    Inside,
    Outside,
    Boundary,
}

fn locate_in_polytope(c: &PolytopalComplex, k: usize, face: &Flat, x: &Vector, margin: f64) -> Result<Location> {
    let verts = &c.polytopes()[k].vertices;
    let pts = c.points();
    match c.face_dim() {
        1 => {
            let (a, b) = (&pts[verts[0]], &pts[verts[1]]);
            let d = b - a;
            let r = (x - a).dot(&d) / d.norm_squared();
            let along = r * d.norm();
            Ok(if along < -margin || along > d.norm() + margin {
                Location::Outside
            } else if along <= margin || along >= d.norm() - margin {
                Location::Boundary
            } else {
                Location::Inside
            })
        }
        2 => {
            let to2 = |p: &Vector| {
                let d = p - face.base();
                [d.dot(&face.basis()[0]), d.dot(&face.basis()[1])]
            };
            let poly: Vec<[f64; 2]> = verts.iter().map(|&i| to2(&pts[i])).collect();
            let q = to2(x);
            let n = poly.len();
            let mut worst = f64::INFINITY;
            for i in 0..n {
                let (a, b) = (poly[i], poly[(i + 1) % n]);
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let len = (dx * dx + dy * dy).sqrt();
                // The face basis follows the vertex loop, so the interior is
                // on the left of every edge.
                let side = (dx * (q[1] - a[1]) - dy * (q[0] - a[0])) / len;
                worst = worst.min(side);
            }
            Ok(if worst < -margin {
                Location::Outside
            } else if worst <= margin {
                Location::Boundary
            } else {
                Location::Inside
            })
        }
        m => Err(Error::Unsupported(format!("path crossings for {m}-polytopes"))),
    }
}

struct Scan {
    brackets: Vec<(f64, f64)>,
    suspects: Vec<f64>,
}

fn scan(g: &dyn Fn(f64) -> f64, lo: f64, hi: f64, cells: usize, depth: u32, tiny: f64, out: &mut Scan) {
    let ts: Vec<f64> = (0..=cells).map(|k| lo + (hi - lo) * k as f64 / cells as f64).collect();
    let vs: Vec<f64> = ts.iter().map(|&t| g(t)).collect();
    for k in 0..cells {
        if (vs[k] > 0.0) != (vs[k + 1] > 0.0) {
            out.brackets.push((ts[k], ts[k + 1]));
        }
    }
    for k in 1..cells {
        let same = (vs[k - 1] > 0.0) == (vs[k] > 0.0) && (vs[k] > 0.0) == (vs[k + 1] > 0.0);
        let dip = vs[k].abs() < vs[k - 1].abs() && vs[k].abs() < vs[k + 1].abs();
        if same && dip {
            if depth < MAX_DOUBLINGS {
                scan(g, ts[k - 1], ts[k + 1], 4, depth + 1, tiny, out);
            } else if vs[k].abs() <= tiny {
                out.suspects.push(ts[k]);
            }
        }
    }
}

fn bisect(g: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let positive_at_lo = g(lo) > 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) == positive_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn check_start(path: &GrassmannPath, c: &PolytopalComplex) -> Result<()> {
    let pts = c.points();
    let centre = pts.iter().fold(Vector::zeros(c.ambient_dim()), |acc, p| acc + p) / pts.len() as f64;
    let radius = pts.iter().map(|p| (p - &centre).norm()).fold(0.0, f64::max);
    if path.start().distance_to(&centre) <= radius {
        return Err(Error::NonSimplePath(
            "start flat is not clear of the bounding ball of the complex".into(),
        ));
    }
    Ok(())
}

/// Transversal crossings of the path with the faces of the complex, ordered
/// by parameter.
pub fn path_crossings(path: &GrassmannPath, c: &PolytopalComplex, tol: &Tolerances) -> Result<Vec<CrossingEvent>> {
    let n = c.ambient_dim();
    let want = n - c.face_dim();
    if path.start().points.len() != want || path.start().ambient_dim() != n {
        return Err(Error::DimensionMismatch {
            expected: want - 1,
            found: path.start().dim(),
        });
    }
    check_start(path, c)?;
    let mf = c.associated_mframework(tol)?;
    let scale = c.points().iter().map(|p| p.amax()).fold(1.0, f64::max);
    let margin = 1e3 * tol.eps_geom * scale;
    let mut events = Vec::new();
    for (k, face) in mf.faces().iter().enumerate() {
        let fq = AffineFlat::from_flat(face);
        for seg in 0..path.segments() {
            let g = |tau: f64| numerator(&path.interpolate(seg, tau), &fq.points).unwrap_or(f64::NAN);
            let mut found = Scan {
                brackets: Vec::new(),
                suspects: Vec::new(),
            };
            let size = path.interpolate(seg, 0.0).iter().map(|p| p.amax()).fold(scale, f64::max);
            let tiny = tol.eps_geom * size.powi(n as i32);
            scan(&g, 0.0, 1.0, SCAN_SAMPLES, 0, tiny, &mut found);
            if seg > 0 && g(0.0).abs() <= tiny {
                found.suspects.push(0.0);
            }
            for tau in found.suspects {
                let x = meeting_point(&path.interpolate(seg, tau), face);
                if !matches!(locate_in_polytope(c, k, face, &x, margin)?, Location::Outside) {
                    return Err(Error::NonSimplePath(format!("path touches face {k} without crossing it")));
                }
            }
            for (lo, hi) in found.brackets {
                let tau = bisect(&g, lo, hi);
                let t = (seg as f64 + tau) / path.segments() as f64;
                let last = seg + 1 == path.segments() && tau >= 1.0 - 1e-9;
                let first = seg == 0 && tau <= 1e-9;
                if last || first {
                    continue;
                }
                let pts = path.interpolate(seg, tau);
                if spanned_volume(&pts)? <= tol.eps_geom {
                    return Err(Error::NonSimplePath(format!("the moving flat degenerates at t = {t}")));
                }
                let x = meeting_point(&pts, face);
                match locate_in_polytope(c, k, face, &x, margin)? {
                    Location::Outside => {}
                    Location::Boundary => {
                        return Err(Error::NonSimplePath(format!("crossing at a facet of face {k} (t = {t})")));
                    }
                    Location::Inside => {
                        let mu = if g(hi) > g(lo) { 1 } else { -1 };
                        events.push(CrossingEvent { face: k, t, mu });
                    }
                }
            }
        }
    }
    events.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.face.cmp(&b.face)));
    Ok(events)
}

/// `Σ μ ω(f) dist(ℓ, f)` over crossing events, with `ℓ` the final flat.
/// No equilibrium check: for unbalanced loads the value depends on the path.
pub fn crossing_sum(path: &GrassmannPath, c: &PolytopalComplex, w: &ForceLoad, events: &[CrossingEvent], tol: &Tolerances) -> Result<f64> {
    let mf = c.associated_mframework(tol)?;
    let end = path.end();
    let mut total = 0.0;
    for ev in events {
        let face = AffineFlat::from_flat(&mf.faces()[ev.face]);
        total += ev.mu as f64 * w.get(ev.face) * flat_distance(end, &face)?;
    }
    Ok(total)
}

/// Grassmannian lifting of the final flat of `path`.
pub fn grassmann_lifting(path: &GrassmannPath, c: &PolytopalComplex, w: &ForceLoad, tol: &Tolerances) -> Result<f64> {
    let mf = c.associated_mframework(tol)?;
    require_equilibrium(&mf, w, tol)?;
    let events = path_crossings(path, c, tol)?;
    crossing_sum(path, c, w, &events, tol)
}

/// The three-term sum at a trivalent vertex: the edges `p₁p₂`, `p₁p₃`,
/// `p₁p₄` leave the origin at angles 0, α, β in the xy-plane and carry loads
/// `λ sin(α-β)`, `λ sin β`, `-λ sin α`; the line runs through `(a, b, 0)`
/// and `(c, d, 1)`. The result vanishes identically.
pub fn trivalent_monodromy_identity(alpha: f64, beta: f64, a: f64, b: f64, c: f64, d: f64, lambda: f64) -> Result<f64> {
    use std::f64::consts::PI;
    let ok = |x: f64| x > 0.0 && x < 2.0 * PI && (x - PI).abs() > 0.0;
    if !ok(alpha) || !ok(beta) || alpha == beta || ![a, b, c, d, lambda].iter().all(|x| x.is_finite()) {
        return Err(Error::Domain);
    }
    let v = |x: f64, y: f64, z: f64| Vector::from_column_slice(&[x, y, z]);
    let line = AffineFlat {
        points: vec![v(a, b, 0.0), v(c, d, 1.0)],
    };
    let edge = |theta: f64| AffineFlat {
        points: vec![v(0.0, 0.0, 0.0), v(theta.cos(), theta.sin(), 0.0)],
    };
    Ok(lambda * (alpha - beta).sin() * flat_distance(&line, &edge(0.0))?
        + lambda * beta.sin() * flat_distance(&line, &edge(alpha))?
        - lambda * alpha.sin() * flat_distance(&line, &edge(beta))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::vector;
    use crate::polytopal::{parallel_prism_complex, stress_to_forceload, PolygonMesh};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn line(p: [f64; 3], q: [f64; 3]) -> AffineFlat {
        AffineFlat::from_coords(&[&p, &q], &tol()).unwrap()
    }

    #[test]
    fn distance_examples() {
        let edge = line([0.0; 3], [1.0, 0.0, 0.0]);
        let (a, b, c, d) = (0.3, 0.7, -0.2, 0.4);
        let l = line([a, b, 0.0], [c, d, 1.0]);
        let dist = flat_distance(&l, &edge).unwrap();
        let want = b / ((c - a) * (c - a) + (d - b) * (d - b) + 1.0f64).sqrt();
        assert!((dist.abs() - want).abs() < 1e-12);
        // Intersecting flats.
        let through = line([0.5, 0.0, -1.0], [0.5, 0.0, 1.0]);
        assert!(flat_distance(&through, &edge).unwrap().abs() < 1e-15);
        // Swapping spanning points flips the sign.
        let swapped = line([c, d, 1.0], [a, b, 0.0]);
        assert!((flat_distance(&swapped, &edge).unwrap() + dist).abs() < 1e-12);
        // Count mismatch.
        let plane = AffineFlat::from_coords(&[&[0.0; 3], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]], &tol()).unwrap();
        assert!(matches!(flat_distance(&l, &plane), Err(Error::WrongCount { .. })));
        assert_eq!(
            AffineFlat::from_coords(&[&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]], &tol()),
            Err(Error::DegenerateFlat)
        );
    }

    #[test]
    fn distance_is_translation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let mut r = || [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let (a, b, e, f) = (r(), r(), r(), r());
            let shift = vector(&r());
            let (l, m) = (line(a, b), line(e, f));
            let d0 = flat_distance(&l, &m).unwrap();
            let d1 = flat_distance(&l.translated(&shift), &m.translated(&shift)).unwrap();
            assert!((d0 - d1).abs() < 1e-9 * (1.0 + d0.abs()));
        }
    }

    #[test]
    fn identity_examples() {
        let v = trivalent_monodromy_identity(2.0 * PI / 3.0, 4.0 * PI / 3.0, 0.3, 0.7, -0.2, 0.4, 1.0).unwrap();
        assert!(v.abs() < 1e-12);
        assert_eq!(trivalent_monodromy_identity(1.0, 2.0, 0.3, 0.7, -0.2, 0.4, 0.0).unwrap(), 0.0);
        assert_eq!(trivalent_monodromy_identity(1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0), Err(Error::Domain));
        assert_eq!(trivalent_monodromy_identity(PI, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0), Err(Error::Domain));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let v = trivalent_monodromy_identity(
                rng.gen_range(0.01..3.1),
                rng.gen_range(3.2..6.2),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            )
            .unwrap();
            assert!(v.abs() < 1e-9);
        }
    }

    fn single_edge() -> PolytopalComplex {
        PolytopalComplex::segments(3, vec![vector(&[0.0, 0.0, 0.0]), vector(&[1.0, 0.0, 0.0])], &[(0, 1)], &tol()).unwrap()
    }

    fn vertical(x: f64, y: f64) -> AffineFlat {
        line([x, y, 0.0], [x, y, 1.0])
    }

    #[test]
    fn sweeping_a_vertical_line_over_an_edge() {
        let c = single_edge();
        let path = GrassmannPath::new(vec![vertical(0.5, -3.0), vertical(0.5, 3.0)]).unwrap();
        let ev = path_crossings(&path, &c, &tol()).unwrap();
        assert_eq!(ev.len(), 1);
        assert!((ev[0].t - 0.5).abs() < 1e-9);
        let g = |y: f64| flat_distance(&vertical(0.5, y), &AffineFlat::from_flat(&c.associated_mframework(&tol()).unwrap().faces()[0])).unwrap();
        assert_eq!(ev[0].mu, if g(0.1) > g(-0.1) { 1 } else { -1 });

        let back = path_crossings(&path.reversed(), &c, &tol()).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].mu, -ev[0].mu);

        let there_and_back = GrassmannPath::new(vec![vertical(0.5, -3.0), vertical(0.5, 3.0), vertical(0.7, -3.0)]).unwrap();
        let ev = path_crossings(&there_and_back, &c, &tol()).unwrap();
        assert_eq!(ev.len(), 2);
        assert_eq!(ev[0].mu, -ev[1].mu);

        let outside = GrassmannPath::new(vec![vertical(3.0, -3.0), vertical(3.0, 3.0)]).unwrap();
        assert!(path_crossings(&outside, &c, &tol()).unwrap().is_empty());

        let through_end = GrassmannPath::new(vec![vertical(1.0, -3.0), vertical(1.0, 3.0)]).unwrap();
        assert!(matches!(path_crossings(&through_end, &c, &tol()), Err(Error::NonSimplePath(_))));

        let start_inside = GrassmannPath::new(vec![vertical(0.5, 0.3), vertical(0.5, 3.0)]).unwrap();
        assert!(matches!(path_crossings(&start_inside, &c, &tol()), Err(Error::NonSimplePath(_))));
    }

    #[test]
    fn tangent_paths_are_rejected() {
        // The line dips down to touch the edge and goes back up.
        let c = single_edge();
        let path = GrassmannPath::new(vec![vertical(0.5, -3.0), vertical(0.5, 0.0), vertical(0.6, -3.0)]).unwrap();
        assert!(matches!(path_crossings(&path, &c, &tol()), Err(Error::NonSimplePath(_))));
        // Inside a segment: the signed volume is s², touching zero at s = 0
        // where the line lies in the plane z = 0 through (0.5, 0, 0).
        let at = |s: f64, dz: f64| line([0.5, s, dz], [0.6, 1.0, s + dz]);
        let path = GrassmannPath::new(vec![at(-1.0, -5.0), at(-1.0, 0.0), at(0.9, 0.0)]).unwrap();
        assert!(matches!(path_crossings(&path, &c, &tol()), Err(Error::NonSimplePath(_))));
        // The same motion stopping short of the touch is fine.
        let path = GrassmannPath::new(vec![at(-1.0, -5.0), at(-1.0, 0.0), at(-0.2, 0.0)]).unwrap();
        assert!(path_crossings(&path, &c, &tol()).unwrap().is_empty());
    }

    fn star(alpha: f64, beta: f64) -> (PolytopalComplex, Vec<f64>) {
        let pts = vec![
            vector(&[0.0, 0.0, 0.0]),
            vector(&[1.0, 0.0, 0.0]),
            vector(&[alpha.cos(), alpha.sin(), 0.0]),
            vector(&[beta.cos(), beta.sin(), 0.0]),
        ];
        let c = PolytopalComplex::segments(3, pts, &[(0, 1), (0, 2), (0, 3)], &tol()).unwrap();
        (c, vec![(alpha - beta).sin(), beta.sin(), -alpha.sin()])
    }

    #[test]
    fn closed_path_around_a_trivalent_vertex() {
        let (alpha, beta) = (2.0 * PI / 3.0, 4.0 * PI / 3.0);
        let (c, loads) = star(alpha, beta);
        let mf = c.associated_mframework(&tol()).unwrap();
        let w = ForceLoad::new(&mf, loads).unwrap();
        // Vertical lines: in from far away, once around the centre, back out.
        let phi0 = 0.3f64;
        let mut samples = vec![vertical(5.0 * phi0.cos(), 5.0 * phi0.sin())];
        for k in 0..=24 {
            let phi = phi0 + 2.0 * PI * k as f64 / 24.0;
            samples.push(vertical(0.5 * phi.cos(), 0.5 * phi.sin()));
        }
        samples.push(vertical(5.0 * phi0.cos(), 5.0 * phi0.sin()));
        let path = GrassmannPath::new(samples).unwrap();
        let events = path_crossings(&path, &c, &tol()).unwrap();
        assert_eq!(events.len(), 3);
        assert!(events.iter().all(|e| e.mu == events[0].mu));
        let value = crossing_sum(&path, &c, &w, &events, &tol()).unwrap();
        assert!(value.abs() < 1e-8);
        // The leaves are unbalanced, so the checked lifting refuses.
        assert!(matches!(grassmann_lifting(&path, &c, &w, &tol()), Err(Error::NotEquilibrium(_))));
    }

    /// K4 drawn in the plane z = 0 of ℝ³, as a 1-complex with its load.
    fn k4_in_space() -> (PolytopalComplex, ForceLoad) {
        let (fw2, s2) = catalog::k4_planar();
        let fw = crate::framework::Framework::new(
            3,
            fw2.vertices().map(|(id, p)| (id, vector(&[p[0], p[1], 0.0]))),
            fw2.edges().map(|e| (e.a(), e.b())),
            &tol(),
        )
        .unwrap();
        let s = crate::framework::Stress::new(&fw, s2.iter()).unwrap();
        let (c, _) = PolytopalComplex::from_framework(&fw, &tol()).unwrap();
        let mf = c.associated_mframework(&tol()).unwrap();
        let w = ForceLoad::new(&mf, stress_to_forceload(&fw, &s, &c, &tol()).unwrap()).unwrap();
        (c, w)
    }

    fn random_line(rng: &mut ChaCha8Rng, radius: f64) -> AffineFlat {
        loop {
            let p: Vec<f64> = (0..3).map(|_| rng.gen_range(-radius..radius)).collect();
            let q: Vec<f64> = (0..3).map(|_| rng.gen_range(-radius..radius)).collect();
            if let Ok(l) = AffineFlat::from_coords(&[&p, &q], &tol()) {
                return l;
            }
        }
    }

    fn far_line(rng: &mut ChaCha8Rng) -> AffineFlat {
        let shift = vector(&[rng.gen_range(8.0..12.0), rng.gen_range(-12.0..12.0), rng.gen_range(8.0..12.0)]);
        random_line(rng, 1.0).translated(&shift)
    }

    fn random_value(rng: &mut ChaCha8Rng, c: &PolytopalComplex, w: &ForceLoad, target: &AffineFlat) -> f64 {
        loop {
            let mut samples = vec![far_line(rng)];
            for _ in 0..rng.gen_range(1..4) {
                samples.push(random_line(rng, 1.5));
            }
            samples.push(target.clone());
            let path = GrassmannPath::new(samples).unwrap();
            match grassmann_lifting(&path, c, w, &tol()) {
                Ok(v) => return v,
                Err(Error::NonSimplePath(_)) => continue,
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn path_independence_on_planar_k4() {
        let (c, w) = k4_in_space();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let target = random_line(&mut rng, 1.0);
            let a = random_value(&mut rng, &c, &w, &target);
            let b = random_value(&mut rng, &c, &w, &target);
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn path_independence_on_k5() {
        let (fw, s) = catalog::k5();
        let (c, _) = PolytopalComplex::from_framework(&fw, &tol()).unwrap();
        let mf = c.associated_mframework(&tol()).unwrap();
        let w = ForceLoad::new(&mf, stress_to_forceload(&fw, &s, &c, &tol()).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut nonzero = 0;
        for _ in 0..10 {
            let target = random_line(&mut rng, 1.0);
            let a = random_value(&mut rng, &c, &w, &target);
            let b = random_value(&mut rng, &c, &w, &target);
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
            if a.abs() > 1e-6 {
                nonzero += 1;
            }
        }
        assert!(nonzero > 0);
    }

    #[test]
    fn path_independence_on_cube_pair() {
        let mesh = PolygonMesh::cube([-0.3, -0.4, -0.45], 1.0);
        let c = parallel_prism_complex(&mesh, 2.0, &tol()).unwrap();
        let mf = c.associated_mframework(&tol()).unwrap();
        let w = crate::polytopal::forceload_basis(&mf, &tol()).remove(0);
        let point = |rng: &mut ChaCha8Rng, r: f64| {
            let p: Vec<f64> = (0..3).map(|_| rng.gen_range(-r..r)).collect();
            AffineFlat::from_coords(&[&p], &tol()).unwrap()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..5 {
            let target = point(&mut rng, 2.0);
            let mut values = Vec::new();
            while values.len() < 2 {
                let far = point(&mut rng, 1.0).translated(&vector(&[9.0, 9.0, 9.0]));
                let mut samples = vec![far];
                for _ in 0..rng.gen_range(1..3) {
                    samples.push(point(&mut rng, 2.5));
                }
                samples.push(target.clone());
                match grassmann_lifting(&GrassmannPath::new(samples).unwrap(), &c, &w, &tol()) {
                    Ok(v) => values.push(v),
                    Err(Error::NonSimplePath(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
            assert!((values[0] - values[1]).abs() < 1e-8, "{values:?}");
        }
    }

    #[test]
    fn empty_crossing_path_gives_zero() {
        let (c, w) = k4_in_space();
        let path = GrassmannPath::new(vec![line([9.0, 9.0, 9.0], [9.0, 10.0, 9.0]), line([9.0, -9.0, 9.0], [9.0, -8.0, 9.0])]).unwrap();
        assert_eq!(grassmann_lifting(&path, &c, &w, &tol()).unwrap(), 0.0);
    }
}
