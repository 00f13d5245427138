//! Segment refinement shared by crossing subdivision and the chamber complex.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::framework::{Edge, Framework, VertexId};
use crate::tol::Tolerances;

pub(crate) type P2 = [f64; 2];

/// A sub-segment of an original edge, oriented from `edge.a()` towards `edge.b()`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Piece {
    pub a: usize,
    pub b: usize,
    pub edge: Edge,
}

#[derive(Debug, Clone)]
pub(crate) struct Refinement {
    pub nodes: Vec<P2>,
    pub node_vertex: Vec<Option<VertexId>>,
    pub pieces: Vec<Piece>,
    pub num_crossings: usize,
    /// First vertex found in the relative interior of a non-incident edge.
    pub vertex_on_edge: Option<(VertexId, Edge)>,
}

pub(crate) fn cross(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub(crate) fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn dot(a: P2, b: P2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn dist(a: P2, b: P2) -> f64 {
    let d = sub(a, b);
    dot(d, d).sqrt()
}

pub(crate) fn lerp(a: P2, b: P2, t: f64) -> P2 {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Distance from `p` to segment `ab` and the parameter of the closest point.
pub(crate) fn point_segment(p: P2, a: P2, b: P2) -> (f64, f64) {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    let t = (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0);
    (dist(p, lerp(a, b, t)), t)
}

struct NodeIndex {
    cell: f64,
    grid: HashMap<(i64, i64), Vec<usize>>,
}

impl NodeIndex {
    fn key(&self, p: P2) -> (i64, i64) {
        ((p[0] / self.cell).floor() as i64, (p[1] / self.cell).floor() as i64)
    }

    fn find(&self, nodes: &[P2], p: P2, radius: f64) -> Option<usize> {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = self.grid.get(&(kx + dx, ky + dy)) {
                    if let Some(&n) = list.iter().find(|&&n| dist(nodes[n], p) <= radius) {
                        return Some(n);
                    }
                }
            }
        }
        None
    }

    fn insert(&mut self, p: P2, n: usize) {
        let k = self.key(p);
        self.grid.entry(k).or_default().push(n);
    }
}

/// Split every edge of a planar framework at crossings and at vertices lying
/// on its interior. Intersection points closer than `eps_geom` are merged.
pub(crate) fn refine(fw: &Framework, tol: &Tolerances) -> Result<Refinement> {
    let eps = tol.eps_geom;
    let mut nodes: Vec<P2> = Vec::new();
    let mut node_vertex = Vec::new();
    let mut node_of: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (id, p) in fw.vertices() {
        node_of.insert(id, nodes.len());
        nodes.push([p[0], p[1]]);
        node_vertex.push(Some(id));
    }
    let edges: Vec<Edge> = fw.edges().collect();
    let seg = |e: &Edge| (nodes[node_of[&e.a()]], nodes[node_of[&e.b()]]);
    let segs: Vec<(P2, P2)> = edges.iter().map(seg).collect();

    let mut splits: Vec<Vec<(f64, usize)>> = vec![Vec::new(); edges.len()];
    let mut vertex_on_edge = None;

    for (k, e) in edges.iter().enumerate() {
        let (a, b) = segs[k];
        for (id, _) in fw.vertices() {
            if e.contains(id) {
                continue;
            }
            let n = node_of[&id];
            let (d, t) = point_segment(nodes[n], a, b);
            if d <= eps && dist(nodes[n], a) > eps && dist(nodes[n], b) > eps {
                splits[k].push((t, n));
                vertex_on_edge.get_or_insert((id, *e));
            }
        }
    }

    let mut index = NodeIndex {
        cell: eps.max(f64::MIN_POSITIVE) * 4.0,
        grid: HashMap::new(),
    };
    let mut num_crossings = 0;
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let (p, p2) = segs[i];
            let (q, q2) = segs[j];
            let r = sub(p2, p);
            let s = sub(q2, q);
            let (lr, ls) = (dot(r, r).sqrt(), dot(s, s).sqrt());
            let denom = cross(r, s);
            let qp = sub(q, p);
            if denom.abs() <= eps * lr * ls {
                // Parallel: only collinear overlaps matter.
                if (cross(qp, r) / lr).abs() > eps {
                    continue;
                }
                let t0 = dot(qp, r) / (lr * lr);
                let t1 = dot(sub(q2, p), r) / (lr * lr);
                let lo = t0.min(t1).max(0.0);
                let hi = t0.max(t1).min(1.0);
                if (hi - lo) * lr > eps {
                    return Err(Error::OverlappingEdges(edges[i], edges[j]));
                }
                continue;
            }
            let t = cross(qp, s) / denom;
            let u = cross(qp, r) / denom;
            if !(-1e-12..=1.0 + 1e-12).contains(&t) || !(-1e-12..=1.0 + 1e-12).contains(&u) {
                continue;
            }
            let x = lerp(p, p2, t);
            if [p, p2, q, q2].iter().any(|&v| dist(v, x) <= eps) {
                // Shared endpoint or a vertex on an edge: handled above.
                continue;
            }
            let n = match index.find(&nodes, x, eps) {
                Some(n) => n,
                None => {
                    let n = nodes.len();
                    nodes.push(x);
                    node_vertex.push(None);
                    index.insert(x, n);
                    num_crossings += 1;
                    n
                }
            };
            splits[i].push((t, n));
            splits[j].push((u, n));
        }
    }

    let mut pieces = Vec::new();
    for (k, e) in edges.iter().enumerate() {
        let mut pts = std::mem::take(&mut splits[k]);
        pts.push((0.0, node_of[&e.a()]));
        pts.push((1.0, node_of[&e.b()]));
        pts.sort_by(|x, y| x.0.total_cmp(&y.0));
        pts.dedup_by_key(|x| x.1);
        for w in pts.windows(2) {
            pieces.push(Piece {
                a: w[0].1,
                b: w[1].1,
                edge: *e,
            });
        }
    }

    Ok(Refinement {
        nodes,
        node_vertex,
        pieces,
        num_crossings,
        vertex_on_edge,
    })
}
