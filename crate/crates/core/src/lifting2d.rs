//! Differential liftings of planar frameworks and the classical liftings
//! they integrate to.
//!
//! A differential lifting assigns a constant 1-form to every chamber. Across
//! a sub-segment of edge `p_i p_j` separating chambers `C1` and `C2` it jumps by
//!
//! ```text
//! α2 - α1 = sign(det(n12, p_i - p_j)) · ω_ij · d(p_i - p_j)
//! ```
//!
//! where `n12` is the unit normal pointing from `C1` into `C2`. The jump does
//! not depend on which endpoint is called `i`.
//!
//! Integrating `⋆α_C` gives the gradient of an affine function on every
//! chamber. We fix the sign so that for an edge traversed from `p_i` to `p_j`
//! with `f1` on its left, `ν_f2 - ν_f1 = ω_ij (p_j - p_i)^⊥`, where
//! `ν_f = (∇L_f, -1)` and `⊥` is the counter-clockwise quarter turn.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nalgebra::Vector3;

use crate::arrangement::{build_chamber_complex, Adjacency, ChamberComplex, ChamberId};
use crate::error::{Error, Result};
use crate::form::MForm;
use crate::framework::{require_self_stress, Edge, Framework, Stress, VertexId};
use crate::linalg::{det2, Vector};
use crate::tol::Tolerances;

/// Jump `α_b - α_a` prescribed by the neighbouring condition on `adj`.
pub fn jump_form(fw: &Framework, adj: &Adjacency, omega: f64) -> Result<MForm> {
    let d = fw.difference(adj.edge.a(), adj.edge.b())?;
    let sign = det2(&adj.normal, &d).signum();
    Ok((sign * omega) * &MForm::covector(&d))
}

fn edge_scale(fw: &Framework, e: &Edge, omega: f64) -> Result<f64> {
    Ok(1f64.max(omega.abs() * fw.difference(e.a(), e.b())?.norm()))
}

#[derive(Debug, Clone)]
pub struct DifferentialLifting2D {
    complex: ChamberComplex,
    forms: Vec<MForm>,
}

impl DifferentialLifting2D {
    pub fn complex(&self) -> &ChamberComplex {
        &self.complex
    }

    pub fn form(&self, c: ChamberId) -> &MForm {
        &self.forms[c]
    }

    pub fn forms(&self) -> impl Iterator<Item = (ChamberId, &MForm)> {
        self.forms.iter().enumerate()
    }

    /// Form on the chamber containing `point`.
    pub fn form_at(&self, point: &Vector, tol: &Tolerances) -> Result<&MForm> {
        Ok(&self.forms[self.complex.locate_chamber(point, tol)?])
    }

    /// Build a lifting from explicit chamber forms, e.g. to recover a stress.
    pub fn from_forms(complex: ChamberComplex, forms: Vec<MForm>) -> Result<Self> {
        if forms.len() != complex.len() {
            return Err(Error::WrongCount {
                expected: complex.len(),
                found: forms.len(),
            });
        }
        if let Some(f) = forms.iter().find(|f| f.dim() != 2 || f.degree() != 1) {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: f.dim(),
            });
        }
        Ok(Self { complex, forms })
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.forms
            .iter()
            .zip(&other.forms)
            .map(|(a, b)| (a - b).max_abs())
            .fold(0.0, f64::max)
    }
}

/// The unique differential lifting of a planar self-stress, normalised to
/// vanish on the unbounded chamber.
pub fn differential_lifting_2d(fw: &Framework, s: &Stress, tol: &Tolerances) -> Result<DifferentialLifting2D> {
    if fw.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: fw.dim(),
        });
    }
    require_self_stress(fw, s, tol)?;
    let complex = build_chamber_complex(fw, tol)?;
    lift_over(fw, s, complex, tol)
}

fn lift_over(fw: &Framework, s: &Stress, complex: ChamberComplex, tol: &Tolerances) -> Result<DifferentialLifting2D> {
    let n = complex.len();
    let mut neighbours: Vec<Vec<Adjacency>> = vec![Vec::new(); n];
    for adj in complex.adjacencies() {
        neighbours[adj.a].push(adj.clone());
        neighbours[adj.b].push(adj.reversed());
    }
    let mut forms: Vec<Option<MForm>> = vec![None; n];
    forms[complex.unbounded_id()] = Some(MForm::zero(2, 1));
    let mut queue = VecDeque::from([complex.unbounded_id()]);
    while let Some(c) = queue.pop_front() {
        let here = forms[c].clone().expect("queued chambers carry a form");
        for adj in &neighbours[c] {
            if forms[adj.b].is_none() {
                let jump = jump_form(fw, adj, s.get(&adj.edge))?;
                forms[adj.b] = Some(&here + &jump);
                queue.push_back(adj.b);
            }
        }
    }
    // Every chamber is reachable: each one borders at least one edge piece.
    let forms: Vec<MForm> = forms
        .into_iter()
        .map(|f| f.unwrap_or_else(|| MForm::zero(2, 1)))
        .collect();
    for adj in complex.adjacencies() {
        let omega = s.get(&adj.edge);
        let expected = jump_form(fw, adj, omega)?;
        let residual = (&(&forms[adj.b] - &forms[adj.a]) - &expected).max_abs();
        if residual > tol.eps_form * edge_scale(fw, &adj.edge, omega)? {
            return Err(Error::Consistency {
                edge: adj.edge,
                residual,
            });
        }
    }
    Ok(DifferentialLifting2D { complex, forms })
}

/// Read the stress back from the jumps of a differential lifting.
///
/// Edges that never separate two distinct chambers get stress zero.
pub fn recover_stress(fw: &Framework, dl: &DifferentialLifting2D, tol: &Tolerances) -> Result<Stress> {
    let mut readings: BTreeMap<Edge, f64> = BTreeMap::new();
    for adj in dl.complex.adjacencies() {
        let d = fw.difference(adj.edge.a(), adj.edge.b())?;
        let sign = det2(&adj.normal, &d).signum();
        let jump = (dl.form(adj.b) - dl.form(adj.a)).to_vector().expect("1-forms");
        let omega = sign * jump.dot(&d) / d.norm_squared();
        // The jump must be a multiple of d(p_i - p_j), and all pieces of the
        // same edge must agree.
        let along = &d * (sign * omega);
        let mut residual = (&jump - &along).amax();
        if let Some(prev) = readings.get(&adj.edge) {
            residual = residual.max((prev - omega).abs() * d.norm());
        }
        if residual > tol.eps_form * 1f64.max(jump.amax()) {
            return Err(Error::Consistency {
                edge: adj.edge,
                residual,
            });
        }
        readings.entry(adj.edge).or_insert(omega);
    }
    Stress::new(fw, fw.edges().map(|e| (e, readings.get(&e).copied().unwrap_or(0.0))))
}

/// Continuous piecewise-affine function `L(x) = <g_C, x> + c_C` on chambers.
#[derive(Debug, Clone)]
pub struct PolyhedralLifting {
    complex: ChamberComplex,
    gradients: Vec<Vector>,
    offsets: Vec<f64>,
}

impl PolyhedralLifting {
    pub fn complex(&self) -> &ChamberComplex {
        &self.complex
    }

    pub fn gradient(&self, c: ChamberId) -> &Vector {
        &self.gradients[c]
    }

    pub fn offset(&self, c: ChamberId) -> f64 {
        self.offsets[c]
    }

    /// Value of the affine piece of chamber `c` at `x`.
    pub fn value_on(&self, c: ChamberId, x: &Vector) -> f64 {
        self.gradients[c].dot(x) + self.offsets[c]
    }

    pub fn value_at(&self, x: &Vector, tol: &Tolerances) -> Result<f64> {
        Ok(self.value_on(self.complex.locate_chamber(x, tol)?, x))
    }

    /// Normal `(∇L_C, -1)` of the lifted face over chamber `c`.
    pub fn normal(&self, c: ChamberId) -> Vector3<f64> {
        Vector3::new(self.gradients[c][0], self.gradients[c][1], -1.0)
    }

    pub fn is_trivial(&self, eps: f64) -> bool {
        self.gradients.iter().all(|g| g.amax() <= eps)
    }

    /// Largest value mismatch of neighbouring pieces at the points 1/3 and
    /// 2/3 along every shared segment.
    pub fn continuity_defect(&self) -> f64 {
        self.complex
            .adjacencies()
            .iter()
            .flat_map(|adj| {
                [1.0 / 3.0, 2.0 / 3.0].map(|t| {
                    let x = adj.point_at(t);
                    (self.value_on(adj.a, &x) - self.value_on(adj.b, &x)).abs()
                })
            })
            .fold(0.0, f64::max)
    }

    /// Largest violation of `ν_f2 - ν_f1 = ω_ij (p_j - p_i)^⊥` over all
    /// adjacencies, with `f1` on the left of `p_i → p_j`.
    pub fn normal_relation_defect(&self, fw: &Framework, s: &Stress) -> Result<f64> {
        let mut worst = 0.0f64;
        for adj in self.complex.adjacencies() {
            let (i, j) = (adj.edge.a(), adj.edge.b());
            let d = fw.difference(j, i)?;
            let perp = Vector3::new(-d[1], d[0], 0.0) * s.get(&adj.edge);
            let a_is_left = det2(&adj.normal, &fw.difference(i, j)?) < 0.0;
            let (f1, f2) = if a_is_left { (adj.a, adj.b) } else { (adj.b, adj.a) };
            worst = worst.max((self.normal(f2) - self.normal(f1) - perp).amax());
        }
        Ok(worst)
    }
}

/// Integrate the differential lifting of a crossing-free framework to a
/// continuous lifting vanishing on the unbounded chamber.
pub fn integrate_polyhedral_lifting(fw: &Framework, s: &Stress, tol: &Tolerances) -> Result<PolyhedralLifting> {
    if fw.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: fw.dim(),
        });
    }
    require_self_stress(fw, s, tol)?;
    let complex = build_chamber_complex(fw, tol)?;
    if !complex.is_crossing_free() {
        return Err(Error::NotPlanar);
    }
    let dl = lift_over(fw, s, complex, tol)?;
    integrate(fw, &dl, tol)
}

/// Integrate an existing differential lifting; the framework must be
/// crossing-free.
pub fn integrate(fw: &Framework, dl: &DifferentialLifting2D, tol: &Tolerances) -> Result<PolyhedralLifting> {
    let complex = dl.complex.clone();
    if !complex.is_crossing_free() {
        return Err(Error::NotPlanar);
    }
    let gradients: Vec<Vector> = dl
        .forms
        .iter()
        .map(|f| f.hodge_star().to_vector().expect("1-forms"))
        .collect();
    let n = complex.len();
    let mut offsets: Vec<Option<f64>> = vec![None; n];
    offsets[complex.unbounded_id()] = Some(0.0);
    let mut queue = VecDeque::from([complex.unbounded_id()]);
    while let Some(c) = queue.pop_front() {
        for adj in complex.adjacencies() {
            let (from, to) = match (adj.a == c, adj.b == c) {
                (true, _) => (adj.a, adj.b),
                (_, true) => (adj.b, adj.a),
                _ => continue,
            };
            if offsets[to].is_none() {
                let m = adj.point_at(0.5);
                let value = gradients[from].dot(&m) + offsets[from].unwrap();
                offsets[to] = Some(value - gradients[to].dot(&m));
                queue.push_back(to);
            }
        }
    }
    let pl = PolyhedralLifting {
        complex,
        gradients,
        offsets: offsets.into_iter().map(|o| o.unwrap_or(0.0)).collect(),
    };
    for adj in pl.complex.adjacencies() {
        let mismatch = [1.0 / 3.0, 2.0 / 3.0]
            .map(|t| {
                let x = adj.point_at(t);
                (pl.value_on(adj.a, &x) - pl.value_on(adj.b, &x)).abs()
            })
            .into_iter()
            .fold(0.0, f64::max);
        let scale = 1f64.max(pl.gradients[adj.a].amax()).max(pl.gradients[adj.b].amax()) * fw.scale().max(1.0);
        if mismatch > tol.eps_form * scale {
            return Err(Error::Continuity {
                edge: adj.edge,
                mismatch,
            });
        }
    }
    Ok(pl)
}

/// Maxwell reciprocal diagram: one vertex per chamber, one edge per framework
/// edge joining the chambers on its two sides.
///
/// The dual vertex of `C` sits at the coefficients of `α_C` (parallel mode) or
/// of `⋆α_C` (perpendicular mode). Dual edges then have length
/// `|ω_ij|·‖p_i - p_j‖` and are parallel, respectively orthogonal, to their
/// primal edge. Vertex ids are chamber ids.
pub fn reciprocal_diagram(fw: &Framework, s: &Stress, perpendicular: bool, tol: &Tolerances) -> Result<Framework> {
    let dl = differential_lifting_2d(fw, s, tol)?;
    let cc = dl.complex();
    if !cc.is_crossing_free() {
        return Err(Error::NotPlanar);
    }
    let mut pairs: BTreeMap<Edge, (ChamberId, ChamberId)> = BTreeMap::new();
    for adj in cc.adjacencies() {
        pairs.insert(adj.edge, (adj.a, adj.b));
    }
    let mut dual_edges = BTreeSet::new();
    for e in fw.edges() {
        match pairs.get(&e) {
            Some(&(a, b)) => {
                let de = Edge::new(a as u32, b as u32)?;
                if !dual_edges.insert(de) {
                    return Err(Error::DegenerateDual(format!(
                        "chambers {a} and {b} share more than one edge"
                    )));
                }
            }
            None if s.get(&e).abs() > tol.eps_form => return Err(Error::BridgeWithStress(e)),
            None => {}
        }
    }
    let vertices = dl.forms().map(|(c, f)| {
        let f = if perpendicular { f.hodge_star() } else { f.clone() };
        (VertexId(c as u32), f.to_vector().expect("1-forms"))
    });
    Framework::new(2, vertices, dual_edges.iter().map(|e| (e.a(), e.b())), tol).map_err(|e| match e {
        Error::NonInjective(a, b) => Error::DegenerateDual(format!("dual vertices {a} and {b} coincide")),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::framework::self_stress_basis;
    use crate::linalg::vector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const S3: f64 = 1.732_050_807_568_877_2;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn form(a: f64, b: f64) -> MForm {
        MForm::covector(&vector(&[a, b]))
    }

    fn check(dl: &DifferentialLifting2D, at: [f64; 2], want: MForm) {
        let got = dl.form_at(&vector(&at), &tol()).unwrap();
        assert!(got.approx_eq(&want, 1e-9), "at {at:?}: got {got}, want {want}");
    }

    #[test]
    fn k4_planar_chamber_forms() {
        let (fw, s) = catalog::k4_planar();
        let dl = differential_lifting_2d(&fw, &s, &tol()).unwrap();
        check(&dl, [10.0, 10.0], MForm::zero(2, 1));
        // p1 p2 p3, p1 p3 p4, p1 p2 p4
        check(&dl, [0.2, 0.2], form(-1.5, S3 / 2.0));
        check(&dl, [-0.2, 0.0], form(0.0, -S3));
        check(&dl, [0.2, -0.2], form(1.5, S3 / 2.0));
    }

    #[test]
    fn k4_nonplanar_chamber_forms() {
        let (fw, s) = catalog::k4_nonplanar();
        let dl = differential_lifting_2d(&fw, &s, &tol()).unwrap();
        check(&dl, [0.2, 0.2], form(-1.0, 1.0));
        check(&dl, [-0.2, 0.2], form(-1.0, -1.0));
        check(&dl, [-0.2, -0.2], form(1.0, -1.0));
        check(&dl, [0.2, -0.2], form(1.0, 1.0));
    }

    #[test]
    fn prism_chamber_forms() {
        let (fw, s) = catalog::prism();
        let dl = differential_lifting_2d(&fw, &s, &tol()).unwrap();
        check(&dl, [1.0, -0.5], form(4.0, 0.0));
        check(&dl, [2.5, 0.0], form(0.0, 4.0));
        check(&dl, [1.0, 0.5], form(-4.0, 0.0));
        check(&dl, [-0.5, 0.0], form(0.0, -4.0));
    }

    #[test]
    fn rejects_non_self_stress() {
        let (fw, s) = catalog::k4_planar();
        let bad = s.add(&Stress::from_pairs(&fw, &[((1, 2), 0.5)]).unwrap());
        assert!(matches!(
            differential_lifting_2d(&fw, &bad, &tol()),
            Err(Error::NotSelfStress(_))
        ));
        // With the precheck relaxed the propagation itself detects it.
        let loose = Tolerances::new(1.0, 1e-8, 1e-10).unwrap();
        assert!(matches!(
            differential_lifting_2d(&fw, &bad, &loose),
            Err(Error::Consistency { .. })
        ));
    }

    #[test]
    fn round_trips() {
        for (fw, s) in [catalog::k4_planar(), catalog::k4_nonplanar(), catalog::prism()] {
            let dl = differential_lifting_2d(&fw, &s, &tol()).unwrap();
            let back = recover_stress(&fw, &dl, &tol()).unwrap();
            assert!(back.max_diff(&s) < 1e-9);
        }
        let (fw, _) = catalog::k4_planar();
        let zero = differential_lifting_2d(&fw, &Stress::zero(), &tol()).unwrap();
        assert!(recover_stress(&fw, &zero, &tol()).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn recover_rejects_inconsistent_forms() {
        let (fw, s) = catalog::k4_planar();
        let dl = differential_lifting_2d(&fw, &s, &tol()).unwrap();
        let mut forms: Vec<MForm> = dl.forms().map(|(_, f)| f.clone()).collect();
        forms[1] = &forms[1] + &form(0.3, 0.7);
        let bad = DifferentialLifting2D::from_forms(dl.complex().clone(), forms).unwrap();
        assert!(matches!(recover_stress(&fw, &bad, &tol()), Err(Error::Consistency { .. })));
    }

    fn random_framework(rng: &mut ChaCha8Rng) -> Framework {
        loop {
            let n = rng.gen_range(4..8u32);
            let pts: Vec<(u32, Vec<f64>)> = (0..n)
                .map(|i| (i, vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]))
                .collect();
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(0.7) {
                        edges.push((i, j));
                    }
                }
            }
            let verts: Vec<(u32, &[f64])> = pts.iter().map(|(i, p)| (*i, p.as_slice())).collect();
            if let Ok(fw) = Framework::from_slices(2, &verts, &edges) {
                if build_chamber_complex(&fw, &tol()).is_ok() {
                    return fw;
                }
            }
        }
    }

    #[test]
    fn bijection_and_linearity_on_random_frameworks() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 50 {
            let fw = random_framework(&mut rng);
            let basis = self_stress_basis(&fw, &tol());
            if basis.is_empty() {
                continue;
            }
            checked += 1;
            let mut lifts = Vec::new();
            for s in &basis {
                let dl = differential_lifting_2d(&fw, s, &tol()).unwrap();
                let back = recover_stress(&fw, &dl, &tol()).unwrap();
                assert!(back.max_diff(s) < 1e-8, "round trip off by {}", back.max_diff(s));
                lifts.push(dl);
            }
            let (a, b) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let k = rng.gen_range(0..basis.len());
            let combo = basis[0].scale(a).add(&basis[k].scale(b));
            let dl = differential_lifting_2d(&fw, &combo, &tol()).unwrap();
            for (c, f) in dl.forms() {
                let want = &(a * lifts[0].form(c)) + &(b * lifts[k].form(c));
                assert!(f.approx_eq(&want, 1e-8));
            }
        }
    }

    #[test]
    fn polyhedral_lifting_of_reference_frameworks() {
        for (fw, s) in [catalog::k4_planar(), catalog::prism()] {
            let pl = integrate_polyhedral_lifting(&fw, &s, &tol()).unwrap();
            assert!(pl.continuity_defect() < 1e-9);
            assert!(pl.normal_relation_defect(&fw, &s).unwrap() < 1e-9);
            assert!(!pl.is_trivial(1e-9));
            let u = pl.complex().unbounded_id();
            assert_eq!(pl.gradient(u).amax(), 0.0);
            assert_eq!(pl.offset(u), 0.0);
            // Gradient is the Hodge dual of the chamber form.
            let dl = differential_lifting_2d(&fw, &s, &tol()).unwrap();
            for (c, f) in dl.forms() {
                let star = f.hodge_star().to_vector().unwrap();
                let nu = pl.normal(c);
                assert!((star[0] - nu[0]).abs() < 1e-12 && (star[1] - nu[1]).abs() < 1e-12);
            }
        }
        // Prism top chamber: L = 4 - 4y.
        let (fw, s) = catalog::prism();
        let pl = integrate_polyhedral_lifting(&fw, &s, &tol()).unwrap();
        let v = pl.value_at(&vector(&[1.0, 0.5]), &tol()).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn polyhedral_lifting_edge_cases() {
        let (fw, _) = catalog::k4_planar();
        let pl = integrate_polyhedral_lifting(&fw, &Stress::zero(), &tol()).unwrap();
        assert!(pl.is_trivial(0.0));
        let (q, s) = catalog::k4_nonplanar();
        assert_eq!(integrate_polyhedral_lifting(&q, &s, &tol()).unwrap_err(), Error::NotPlanar);
    }

    #[test]
    fn reciprocal_diagrams() {
        let (fw, s) = catalog::k4_planar();
        let dual = reciprocal_diagram(&fw, &s, false, &tol()).unwrap();
        assert_eq!(dual.num_vertices(), 4);
        assert_eq!(dual.num_edges(), 6);
        let want = [[0.0, 0.0], [-1.5, S3 / 2.0], [0.0, -S3], [1.5, S3 / 2.0]];
        for w in want {
            assert!(dual.vertices().any(|(_, p)| (p - vector(&w)).amax() < 1e-9));
        }

        for (fw, s) in [catalog::k4_planar(), catalog::prism()] {
            let dl = differential_lifting_2d(&fw, &s, &tol()).unwrap();
            let dual = reciprocal_diagram(&fw, &s, true, &tol()).unwrap();
            assert_eq!(dual.num_edges(), fw.num_edges());
            for adj in dl.complex().adjacencies() {
                let primal = fw.difference(adj.edge.a(), adj.edge.b()).unwrap();
                let d = dual
                    .difference(VertexId(adj.a as u32), VertexId(adj.b as u32))
                    .unwrap();
                assert!(d.dot(&primal).abs() < 1e-9);
                let len = s.get(&adj.edge).abs() * primal.norm();
                assert!((d.norm() - len).abs() < 1e-9);
            }
        }

        let (fw, s) = catalog::prism();
        let dual = reciprocal_diagram(&fw, &s, false, &tol()).unwrap();
        for w in [[0.0, 0.0], [-4.0, 0.0], [0.0, 4.0], [4.0, 0.0], [0.0, -4.0]] {
            assert!(dual.vertices().any(|(_, p)| (p - vector(&w)).amax() < 1e-9));
        }

        assert!(matches!(
            reciprocal_diagram(&fw, &Stress::zero(), false, &tol()),
            Err(Error::DegenerateDual(_))
        ));
    }
}
