//! Chamber decomposition of the plane induced by a 2D framework.
//!
//! The segment set is refined at all crossings, half-edges are ordered by
//! angle around every node, and faces are traced keeping the face on the left.
//! Each connected component contributes one outer boundary walk (clockwise);
//! it becomes a hole of the smallest bounded face containing it, or of the
//! unbounded chamber.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::framework::{Edge, Framework};
use crate::linalg::Vector;
use crate::planar::{self, cross, dist, point_segment, sub, P2};
use crate::tol::Tolerances;

pub type ChamberId = usize;

#[derive(Debug, Clone, Serialize)]
pub struct Chamber {
    pub id: ChamberId,
    /// For bounded chambers the outer cycle (counter-clockwise) comes first,
    /// followed by hole cycles. The unbounded chamber only has hole cycles.
    pub boundaries: Vec<Vec<P2>>,
    pub bounded: bool,
}

/// Two chambers separated by a sub-segment of the original edge `edge`.
/// `normal` is the unit normal of the segment pointing from `a` to `b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Adjacency {
    pub a: ChamberId,
    pub b: ChamberId,
    pub edge: Edge,
    pub normal: Vector,
    pub segment: (Vector, Vector),
}

impl Adjacency {
    pub fn reversed(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            edge: self.edge,
            normal: -&self.normal,
            segment: (self.segment.1.clone(), self.segment.0.clone()),
        }
    }

    pub fn point_at(&self, t: f64) -> Vector {
        &self.segment.0 + (&self.segment.1 - &self.segment.0) * t
    }
}

#[derive(Debug, Clone)]
pub struct ChamberComplex {
    chambers: Vec<Chamber>,
    unbounded_id: ChamberId,
    adjacencies: Vec<Adjacency>,
    nodes: Vec<P2>,
    segments: Vec<(usize, usize, Edge)>,
    num_components: usize,
    num_crossings: usize,
    has_vertex_on_edge: bool,
}

impl ChamberComplex {
    pub fn chambers(&self) -> &[Chamber] {
        &self.chambers
    }

    pub fn chamber(&self, id: ChamberId) -> &Chamber {
        &self.chambers[id]
    }

    pub fn len(&self) -> usize {
        self.chambers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chambers.is_empty()
    }

    pub fn unbounded_id(&self) -> ChamberId {
        self.unbounded_id
    }

    pub fn adjacencies(&self) -> &[Adjacency] {
        &self.adjacencies
    }

    /// Whether the framework is a plane straight-line embedding: no edge
    /// crossings and no vertex lying on another edge.
    pub fn is_crossing_free(&self) -> bool {
        self.num_crossings == 0 && !self.has_vertex_on_edge
    }

    pub fn num_crossings(&self) -> usize {
        self.num_crossings
    }

    pub fn num_components(&self) -> usize {
        self.num_components
    }

    /// Refined node positions (framework vertices first).
    pub fn nodes(&self) -> &[P2] {
        &self.nodes
    }

    /// Refined sub-segments as node index pairs with their original edge.
    pub fn segments(&self) -> &[(usize, usize, Edge)] {
        &self.segments
    }

    /// `(V, E, F)` of the refined subdivision, counting the unbounded face.
    /// For a connected arrangement `V - E + F = 2`; in general
    /// `V - E + F = 1 + components`.
    pub fn euler_counts(&self) -> (usize, usize, usize) {
        (self.nodes.len(), self.segments.len(), self.chambers.len())
    }

    pub fn on_framework(&self, p: P2, tol: &Tolerances) -> bool {
        self.nodes.iter().any(|n| dist(*n, p) <= tol.eps_geom)
            || self
                .segments
                .iter()
                .any(|(a, b, _)| point_segment(p, self.nodes[*a], self.nodes[*b]).0 <= tol.eps_geom)
    }

    /// Chamber containing `point`, which must stay clear of the framework.
    pub fn locate_chamber(&self, point: &Vector, tol: &Tolerances) -> Result<ChamberId> {
        if point.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: point.len(),
            });
        }
        let p = [point[0], point[1]];
        if self.on_framework(p, tol) {
            return Err(Error::PointOnFramework);
        }
        let mut best: Option<(f64, ChamberId)> = None;
        for c in self.chambers.iter().filter(|c| c.bounded) {
            let outer = &c.boundaries[0];
            if !point_in_polygon(p, outer) || c.boundaries[1..].iter().any(|h| point_in_polygon(p, h)) {
                continue;
            }
            let area = signed_area(outer);
            if best.is_none_or(|(a, _)| area < a) {
                best = Some((area, c.id));
            }
        }
        Ok(best.map_or(self.unbounded_id, |(_, id)| id))
    }

    /// A point strictly inside the chamber, usable for labels and tests.
    pub fn interior_point(&self, id: ChamberId) -> Vector {
        let c = &self.chambers[id];
        if !c.bounded {
            let (mut xmax, mut ymax) = (f64::MIN, f64::MIN);
            for n in &self.nodes {
                xmax = xmax.max(n[0]);
                ymax = ymax.max(n[1]);
            }
            return Vector::from_column_slice(&[xmax + 1.0, ymax + 1.0]);
        }
        let tris = triangulate(&c.boundaries);
        let best = tris
            .iter()
            .max_by(|x, y| tri_area(x).total_cmp(&tri_area(y)))
            .expect("bounded chambers have positive area");
        let cx = (best[0][0] + best[1][0] + best[2][0]) / 3.0;
        let cy = (best[0][1] + best[1][1] + best[2][1]) / 3.0;
        Vector::from_column_slice(&[cx, cy])
    }

    /// Whether every chamber is reachable from the unbounded one through
    /// adjacencies.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.chambers.len()];
        let mut stack = vec![self.unbounded_id];
        seen[self.unbounded_id] = true;
        while let Some(c) = stack.pop() {
            for adj in &self.adjacencies {
                for (x, y) in [(adj.a, adj.b), (adj.b, adj.a)] {
                    if x == c && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.iter().all(|s| *s)
    }
}

pub(crate) fn signed_area(poly: &[P2]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|k| cross(poly[k], poly[(k + 1) % n]))
        .sum::<f64>()
        / 2.0
}

fn tri_area(t: &[P2; 3]) -> f64 {
    cross(sub(t[1], t[0]), sub(t[2], t[0])).abs() / 2.0
}

pub(crate) fn point_in_polygon(p: P2, poly: &[P2]) -> bool {
    let mut inside = false;
    let n = poly.len();
    for k in 0..n {
        let (a, b) = (poly[k], poly[(k + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Triangulate a polygon with holes; the first ring is the outer boundary.
pub(crate) fn triangulate(rings: &[Vec<P2>]) -> Vec<[P2; 3]> {
    let mut flat = Vec::new();
    let mut holes = Vec::new();
    for (k, ring) in rings.iter().enumerate() {
        if k > 0 {
            holes.push(flat.len() / 2);
        }
        for p in ring {
            flat.extend_from_slice(p);
        }
    }
    let idx = earcutr::earcut(&flat, &holes, 2).unwrap_or_default();
    let pt = |i: usize| [flat[2 * i], flat[2 * i + 1]];
    idx.chunks(3)
        .map(|t| [pt(t[0]), pt(t[1]), pt(t[2])])
        .collect()
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut c = x;
    while parent[c] != r {
        let next = parent[c];
        parent[c] = r;
        c = next;
    }
    r
}

/// Build the chamber complex of a planar framework.
pub fn build_chamber_complex(fw: &Framework, tol: &Tolerances) -> Result<ChamberComplex> {
    if fw.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: fw.dim(),
        });
    }
    let refined = planar::refine(fw, tol)?;
    let nodes = refined.nodes.clone();
    let pieces = &refined.pieces;

    // Half-edge 2k runs a -> b along piece k, 2k+1 runs back.
    let origin = |h: usize| if h.is_multiple_of(2) { pieces[h / 2].a } else { pieces[h / 2].b };
    let head = |h: usize| origin(h ^ 1);
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for h in 0..2 * pieces.len() {
        outgoing[origin(h)].push(h);
    }
    let angle = |h: usize| {
        let d = sub(nodes[head(h)], nodes[origin(h)]);
        d[1].atan2(d[0])
    };
    let mut pos = vec![0; 2 * pieces.len()];
    for list in &mut outgoing {
        list.sort_by(|x, y| angle(*x).total_cmp(&angle(*y)));
        for (k, h) in list.iter().enumerate() {
            pos[*h] = k;
        }
    }
    let next = |h: usize| {
        let twin = h ^ 1;
        let list = &outgoing[head(h)];
        list[(pos[twin] + list.len() - 1) % list.len()]
    };

    let mut cycle_of = vec![usize::MAX; 2 * pieces.len()];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for start in 0..2 * pieces.len() {
        if cycle_of[start] != usize::MAX {
            continue;
        }
        let mut cyc = Vec::new();
        let mut h = start;
        while cycle_of[h] == usize::MAX {
            cycle_of[h] = cycles.len();
            cyc.push(h);
            h = next(h);
        }
        cycles.push(cyc);
    }
    let ring = |c: &Vec<usize>| -> Vec<P2> { c.iter().map(|h| nodes[origin(*h)]).collect() };
    let areas: Vec<f64> = cycles.iter().map(|c| signed_area(&ring(c))).collect();

    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    for p in pieces {
        let (ra, rb) = (find(&mut parent, p.a), find(&mut parent, p.b));
        parent[ra] = rb;
    }
    let comp_of_cycle: Vec<usize> = cycles
        .iter()
        .map(|c| find(&mut parent, origin(c[0])))
        .collect();

    // The outer walk of each component is its cycle of least signed area.
    let mut outer_of_comp: std::collections::BTreeMap<usize, usize> = Default::default();
    for (k, comp) in comp_of_cycle.iter().enumerate() {
        let e = outer_of_comp.entry(*comp).or_insert(k);
        if areas[k] < areas[*e] {
            *e = k;
        }
    }
    let is_outer = |k: usize| outer_of_comp.get(&comp_of_cycle[k]) == Some(&k);

    let unbounded_id = 0;
    let mut chamber_of_cycle = vec![usize::MAX; cycles.len()];
    let mut chambers = vec![Chamber {
        id: unbounded_id,
        boundaries: Vec::new(),
        bounded: false,
    }];
    for k in 0..cycles.len() {
        if !is_outer(k) {
            chamber_of_cycle[k] = chambers.len();
            chambers.push(Chamber {
                id: chambers.len(),
                boundaries: vec![ring(&cycles[k])],
                bounded: true,
            });
        }
    }
    for &k in outer_of_comp.values() {
        let probe = nodes[origin(cycles[k][0])];
        let host = (0..cycles.len())
            .filter(|&f| !is_outer(f) && comp_of_cycle[f] != comp_of_cycle[k])
            .filter(|&f| point_in_polygon(probe, &chambers[chamber_of_cycle[f]].boundaries[0]))
            .min_by(|x, y| areas[*x].total_cmp(&areas[*y]));
        let id = host.map_or(unbounded_id, |f| chamber_of_cycle[f]);
        chamber_of_cycle[k] = id;
        chambers[id].boundaries.push(ring(&cycles[k]));
    }

    let mut adjacencies = Vec::new();
    let mut segments = Vec::new();
    for (k, p) in pieces.iter().enumerate() {
        segments.push((p.a, p.b, p.edge));
        let left = chamber_of_cycle[cycle_of[2 * k]];
        let right = chamber_of_cycle[cycle_of[2 * k + 1]];
        if left == right {
            continue;
        }
        let (pa, pb) = (nodes[p.a], nodes[p.b]);
        let d = sub(pb, pa);
        let len = dist(pa, pb);
        adjacencies.push(Adjacency {
            a: left,
            b: right,
            edge: p.edge,
            normal: Vector::from_column_slice(&[d[1] / len, -d[0] / len]),
            segment: (Vector::from_column_slice(&pa), Vector::from_column_slice(&pb)),
        });
    }

    Ok(ChamberComplex {
        chambers,
        unbounded_id,
        adjacencies,
        nodes,
        segments,
        num_components: outer_of_comp.len(),
        num_crossings: refined.num_crossings,
        has_vertex_on_edge: refined.vertex_on_edge.is_some(),
    })
}
