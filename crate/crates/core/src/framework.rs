//! Graph frameworks in ℝⁿ and their stresses.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{nullspace, Vector};
use crate::planar;
use crate::tol::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

/// Unordered vertex pair; stored with the smaller id first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge(VertexId, VertexId);

impl Edge {
    pub fn new(i: impl Into<VertexId>, j: impl Into<VertexId>) -> Result<Self> {
        let (i, j) = (i.into(), j.into());
        match i.cmp(&j) {
            std::cmp::Ordering::Less => Ok(Edge(i, j)),
            std::cmp::Ordering::Greater => Ok(Edge(j, i)),
            std::cmp::Ordering::Equal => Err(Error::LoopEdge(i)),
        }
    }

    pub fn a(&self) -> VertexId {
        self.0
    }

    pub fn b(&self) -> VertexId {
        self.1
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0 == v || self.1 == v
    }

    pub fn other(&self, v: VertexId) -> Option<VertexId> {
        if v == self.0 {
            Some(self.1)
        } else if v == self.1 {
            Some(self.0)
        } else {
            None
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// A graph with an injective placement of its vertices in ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct Framework {
    dim: usize,
    vertices: BTreeMap<VertexId, Vector>,
    edges: BTreeSet<Edge>,
}

impl Framework {
    pub fn new<V, E>(dim: usize, vertices: V, edges: E, tol: &Tolerances) -> Result<Self>
    where
        V: IntoIterator<Item = (VertexId, Vector)>,
        E: IntoIterator<Item = (VertexId, VertexId)>,
    {
        if dim < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: dim,
            });
        }
        let mut map = BTreeMap::new();
        for (id, p) in vertices {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite(id));
            }
            if map.insert(id, p).is_some() {
                return Err(Error::DuplicateVertex(id));
            }
        }
        let pts: Vec<(&VertexId, &Vector)> = map.iter().collect();
        for (k, (a, pa)) in pts.iter().enumerate() {
            for (b, pb) in &pts[k + 1..] {
                if (*pa - *pb).norm() <= tol.eps_geom {
                    return Err(Error::NonInjective(**a, **b));
                }
            }
        }
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            let e = Edge::new(i, j)?;
            for v in [i, j] {
                if !map.contains_key(&v) {
                    return Err(Error::UnknownVertex(v));
                }
            }
            if !set.insert(e) {
                return Err(Error::DuplicateEdge(e));
            }
        }
        Ok(Self {
            dim,
            vertices: map,
            edges: set,
        })
    }

    /// Convenience constructor from plain slices.
    pub fn from_slices(dim: usize, vertices: &[(u32, &[f64])], edges: &[(u32, u32)]) -> Result<Self> {
        Self::new(
            dim,
            vertices
                .iter()
                .map(|(id, c)| (VertexId(*id), Vector::from_column_slice(c))),
            edges.iter().map(|(i, j)| (VertexId(*i), VertexId(*j))),
            &Tolerances::default(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, &Vector)> {
        self.vertices.iter().map(|(k, v)| (*k, v))
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.keys().copied()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    pub fn point(&self, v: VertexId) -> Result<&Vector> {
        self.vertices.get(&v).ok_or(Error::UnknownVertex(v))
    }

    /// `p_i - p_j` for an edge given with explicit orientation `(i, j)`.
    pub fn difference(&self, i: VertexId, j: VertexId) -> Result<Vector> {
        Ok(self.point(i)? - self.point(j)?)
    }

    pub fn incident_edges(&self, v: VertexId) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied().filter(move |e| e.contains(v))
    }

    pub fn max_id(&self) -> Option<VertexId> {
        self.vertices.keys().next_back().copied()
    }

    /// Largest distance of a vertex from the origin; at least 1.
    pub fn scale(&self) -> f64 {
        self.vertices
            .values()
            .map(|p| p.norm())
            .fold(1.0, f64::max)
    }

    /// Equilibrium matrix: one column per edge (in `edges()` order), one
    /// `dim`-block of rows per vertex (in `vertex_ids()` order), with
    /// `p_i - p_j` in block `i` and `p_j - p_i` in block `j`.
    pub fn equilibrium_matrix(&self) -> DMatrix<f64> {
        let n = self.dim;
        let row_of: BTreeMap<VertexId, usize> = self
            .vertices
            .keys()
            .enumerate()
            .map(|(k, v)| (*v, k * n))
            .collect();
        let mut m = DMatrix::zeros(n * self.vertices.len(), self.edges.len());
        for (col, e) in self.edges.iter().enumerate() {
            let d = &self.vertices[&e.a()] - &self.vertices[&e.b()];
            let (ra, rb) = (row_of[&e.a()], row_of[&e.b()]);
            for k in 0..n {
                m[(ra + k, col)] = d[k];
                m[(rb + k, col)] = -d[k];
            }
        }
        m
    }
}

/// Edge scalars ω_ij = ω_ji. Missing edges carry zero stress.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Stress {
    values: BTreeMap<Edge, f64>,
}

impl Stress {
    pub fn new<I>(fw: &Framework, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Edge, f64)>,
    {
        let mut map = BTreeMap::new();
        for (e, w) in values {
            if !fw.has_edge(&e) {
                return Err(Error::UnknownEdge(e));
            }
            map.insert(e, w);
        }
        Ok(Self { values: map })
    }

    pub fn from_pairs(fw: &Framework, values: &[((u32, u32), f64)]) -> Result<Self> {
        let items = values
            .iter()
            .map(|((i, j), w)| Edge::new(*i, *j).map(|e| (e, *w)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(fw, items)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Stress from a coefficient vector in `fw.edges()` order.
    pub fn from_vector(fw: &Framework, v: &Vector) -> Self {
        Self {
            values: fw.edges().zip(v.iter().copied()).collect(),
        }
    }

    pub fn to_vector(&self, fw: &Framework) -> Vector {
        Vector::from_iterator(fw.num_edges(), fw.edges().map(|e| self.get(&e)))
    }

    pub fn get(&self, e: &Edge) -> f64 {
        self.values.get(e).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Edge, f64)> + '_ {
        self.values.iter().map(|(e, w)| (*e, *w))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            values: self.values.iter().map(|(e, w)| (*e, s * w)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut values = self.values.clone();
        for (e, w) in &other.values {
            *values.entry(*e).or_insert(0.0) += w;
        }
        Self { values }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.values().fold(0.0, |m, w| m.max(w.abs()))
    }

    /// Largest coefficient difference over the union of both supports.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.values
            .keys()
            .chain(other.values.keys())
            .map(|e| (self.get(e) - other.get(e)).abs())
            .fold(0.0, f64::max)
    }
}

/// Residual `Σ_j ω_ij (p_i - p_j)` at every vertex.
pub fn equilibrium_residuals(fw: &Framework, s: &Stress) -> Result<BTreeMap<VertexId, Vector>> {
    let mut out: BTreeMap<VertexId, Vector> = fw
        .vertex_ids()
        .map(|v| (v, Vector::zeros(fw.dim())))
        .collect();
    for (e, w) in s.iter() {
        if !fw.has_edge(&e) {
            return Err(Error::UnknownEdge(e));
        }
        let d = fw.difference(e.a(), e.b())? * w;
        *out.get_mut(&e.a()).unwrap() += &d;
        *out.get_mut(&e.b()).unwrap() -= &d;
    }
    Ok(out)
}

/// Largest residual norm and the self-stress threshold it is compared to.
/// The threshold is `eps_geom` times the largest single edge force (at least 1).
pub fn self_stress_defect(fw: &Framework, s: &Stress, tol: &Tolerances) -> Result<(f64, f64)> {
    let res = equilibrium_residuals(fw, s)?;
    let max = res.values().map(|r| r.norm()).fold(0.0, f64::max);
    let mut scale = 1.0f64;
    for (e, w) in s.iter() {
        scale = scale.max(w.abs() * fw.difference(e.a(), e.b())?.norm());
    }
    Ok((max, tol.eps_geom * scale))
}

pub fn is_self_stress(fw: &Framework, s: &Stress, tol: &Tolerances) -> Result<bool> {
    let (max, limit) = self_stress_defect(fw, s, tol)?;
    Ok(max <= limit)
}

pub(crate) fn require_self_stress(fw: &Framework, s: &Stress, tol: &Tolerances) -> Result<()> {
    let (max, limit) = self_stress_defect(fw, s, tol)?;
    if max <= limit {
        Ok(())
    } else {
        Err(Error::NotSelfStress(max))
    }
}

/// Orthonormal basis of the space of self-stresses.
pub fn self_stress_basis(fw: &Framework, tol: &Tolerances) -> Vec<Stress> {
    nullspace(&fw.equilibrium_matrix(), tol.eps_rank)
        .iter()
        .map(|v| Stress::from_vector(fw, v))
        .collect()
}

/// Insert every interior edge crossing of a planar framework as a new vertex.
///
/// A sub-edge of `p_i p_j` with length `λ‖p_i - p_j‖` receives stress
/// `ω_ij / λ`, which keeps the stress in equilibrium at old and new vertices.
/// New vertices get ids above the current maximum, in order of discovery.
pub fn subdivide_crossings(fw: &Framework, s: &Stress, tol: &Tolerances) -> Result<(Framework, Stress)> {
    if fw.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: fw.dim(),
        });
    }
    require_self_stress(fw, s, tol)?;
    let refined = planar::refine(fw, tol)?;
    if let Some((vertex, edge)) = refined.vertex_on_edge {
        return Err(Error::VertexOnEdge { vertex, edge });
    }
    if refined.num_crossings == 0 {
        return Ok((fw.clone(), s.clone()));
    }
    let mut next = fw.max_id().map_or(0, |v| v.0 + 1);
    let ids: Vec<VertexId> = refined
        .node_vertex
        .iter()
        .map(|v| {
            v.unwrap_or_else(|| {
                next += 1;
                VertexId(next - 1)
            })
        })
        .collect();
    let vertices = refined
        .nodes
        .iter()
        .zip(&ids)
        .map(|(p, id)| (*id, Vector::from_column_slice(p)));
    let pieces: Vec<(VertexId, VertexId)> = refined
        .pieces
        .iter()
        .map(|p| (ids[p.a], ids[p.b]))
        .collect();
    let sub = Framework::new(2, vertices, pieces.iter().copied(), tol)?;
    let mut stress = BTreeMap::new();
    for (piece, (a, b)) in refined.pieces.iter().zip(&pieces) {
        let full = fw.difference(piece.edge.a(), piece.edge.b())?.norm();
        let part = sub.difference(*a, *b)?.norm();
        stress.insert(Edge::new(*a, *b)?, s.get(&piece.edge) * full / part);
    }
    let stress = Stress::new(&sub, stress)?;
    Ok((sub, stress))
}
