//! JSON documents for frameworks, polytopal complexes and Grassmann paths.
//!
//! Framework document:
//!
//! ```json
//! {
//!   "dim": 2,
//!   "vertices": [{"id": 1, "coords": [0.0, 0.0]}, ...],
//!   "edges": [{"i": 1, "j": 2, "stress": 3.0}, ...],
//!   "metadata": {"name": "k4"}
//! }
//! ```
//!
//! Stresses are optional but must be given on every edge or on none.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::framework::{Framework, Stress, VertexId};
use crate::grassmann::{AffineFlat, GrassmannPath};
use crate::linalg::Vector;
use crate::polytopal::{ForceLoad, Polytope, PolytopalComplex};
use crate::tol::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub id: u32,
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub i: u32,
    pub j: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stress: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameworkDoc {
    pub dim: usize,
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub metadata: Map<String, Value>,
}

impl FrameworkDoc {
    pub fn from_framework(fw: &Framework, s: Option<&Stress>) -> Self {
        Self {
            dim: fw.dim(),
            vertices: fw
                .vertices()
                .map(|(id, p)| VertexDoc {
                    id: id.0,
                    coords: p.iter().copied().collect(),
                })
                .collect(),
            edges: fw
                .edges()
                .map(|e| EdgeDoc {
                    i: e.a().0,
                    j: e.b().0,
                    stress: s.map(|s| s.get(&e)),
                })
                .collect(),
            metadata: Map::new(),
        }
    }

    pub fn to_framework(&self, tol: &Tolerances) -> Result<(Framework, Option<Stress>)> {
        if self.vertices.is_empty() {
            return Err(Error::Parse("framework has no vertices".into()));
        }
        let fw = Framework::new(
            self.dim,
            self.vertices.iter().map(|v| (VertexId(v.id), Vector::from_column_slice(&v.coords))),
            self.edges.iter().map(|e| (VertexId(e.i), VertexId(e.j))),
            tol,
        )?;
        let given = self.edges.iter().filter(|e| e.stress.is_some()).count();
        let stress = match given {
            0 => None,
            n if n == self.edges.len() => Some(Stress::new(
                &fw,
                self.edges.iter().map(|e| {
                    let edge = crate::framework::Edge::new(e.i, e.j).expect("validated edge");
                    (edge, e.stress.unwrap_or_default())
                }),
            )?),
            _ => return Err(Error::Parse("stress given on some edges but not all".into())),
        };
        Ok((fw, stress))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }
}

/// Index of the element of the top-level array `key` that starts at each
/// 1-based line, found by a shallow scan of the raw text.
fn element_lines(text: &str, key: &str) -> Vec<usize> {
    let needle = format!("\"{key}\"");
    let Some(start) = text.find(&needle) else {
        return Vec::new();
    };
    let bytes = text.as_bytes();
    let mut k = start + needle.len();
    while k < bytes.len() && bytes[k] != b'[' {
        k += 1;
    }
    let (mut depth, mut in_str, mut escaped) = (0i32, false, false);
    let mut lines = Vec::new();
    let mut line = 1 + text[..k].matches('\n').count();
    for &b in &bytes[k..] {
        if b == b'\n' {
            line += 1;
        }
        if in_str {
            match (escaped, b) {
                (true, _) => escaped = false,
                (false, b'\\') => escaped = true,
                (false, b'"') => in_str = false,
                _ => {}
            }
            continue;
        }
        match b {
            b'"' => in_str = true,
            b'[' | b'{' => {
                if depth == 1 {
                    lines.push(line);
                }
                depth += 1;
            }
            b']' | b'}' => {
                depth -= 1;
                if depth == 0 {
                    break;
                }
            }
            _ => {}
        }
    }
    lines
}

fn at_line(text: &str, key: &str, idx: Option<usize>, msg: String) -> Error {
    match idx.and_then(|i| element_lines(text, key).get(i).copied()) {
        Some(line) => Error::Parse(format!("line {line}: {msg}")),
        None => Error::Parse(msg),
    }
}

/// Parse and validate a framework document. Structural problems report the
/// line of the offending vertex or edge.
pub fn parse_framework(text: &str, tol: &Tolerances) -> Result<(Framework, Option<Stress>)> {
    let doc: FrameworkDoc = serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {}: {e}", e.line())))?;
    let edge_index = |pred: &dyn Fn(&EdgeDoc) -> bool| doc.edges.iter().position(pred);
    let vertex_index = |id: VertexId| doc.vertices.iter().position(|v| v.id == id.0);
    doc.to_framework(tol).map_err(|e| match &e {
        Error::LoopEdge(v) => at_line(text, "edges", edge_index(&|d| d.i == v.0 && d.j == v.0), e.to_string()),
        Error::DuplicateEdge(edge) => {
            let same = |d: &EdgeDoc| (d.i.min(d.j), d.i.max(d.j)) == (edge.a().0, edge.b().0);
            let idx = doc.edges.iter().enumerate().filter(|(_, d)| same(d)).nth(1).map(|(k, _)| k);
            at_line(text, "edges", idx, e.to_string())
        }
        Error::UnknownVertex(v) => at_line(text, "edges", edge_index(&|d| d.i == v.0 || d.j == v.0), e.to_string()),
        Error::DuplicateVertex(v) => {
            let idx = doc.vertices.iter().enumerate().filter(|(_, d)| d.id == v.0).nth(1).map(|(k, _)| k);
            at_line(text, "vertices", idx, e.to_string())
        }
        Error::NonInjective(_, b) | Error::NonFinite(b) => at_line(text, "vertices", vertex_index(*b), e.to_string()),
        Error::Parse(_) => e.clone(),
        _ => Error::Parse(e.to_string()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub ambient_dim: usize,
    pub face_dim: usize,
    pub points: Vec<Vec<f64>>,
    /// Vertex loops for polygons, endpoint pairs for segments.
    pub polytopes: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forceload: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub metadata: Map<String, Value>,
}

impl ComplexDoc {
    pub fn from_complex(c: &PolytopalComplex, w: Option<&ForceLoad>) -> Self {
        Self {
            ambient_dim: c.ambient_dim(),
            face_dim: c.face_dim(),
            points: c.points().iter().map(|p| p.iter().copied().collect()).collect(),
            polytopes: c.polytopes().iter().map(|p| p.vertices.clone()).collect(),
            forceload: w.map(|w| w.values().to_vec()),
            metadata: Map::new(),
        }
    }

    pub fn to_complex(&self, tol: &Tolerances) -> Result<(PolytopalComplex, Option<ForceLoad>)> {
        let points = self.points.iter().map(|p| Vector::from_column_slice(p)).collect();
        let polys: Vec<Polytope> = match self.face_dim {
            1 => self
                .polytopes
                .iter()
                .map(|p| match p[..] {
                    [a, b] => Ok(Polytope::segment(a, b)),
                    _ => Err(Error::Parse(format!("segment needs two points, got {}", p.len()))),
                })
                .collect::<Result<_>>()?,
            2 => self.polytopes.iter().map(|p| Polytope::polygon(p)).collect(),
            m => return Err(Error::Unsupported(format!("documents for {m}-polytopes"))),
        };
        let c = PolytopalComplex::new(self.ambient_dim, self.face_dim, points, polys, tol)?;
        let w = match &self.forceload {
            Some(v) => Some(ForceLoad::new(&c.associated_mframework(tol)?, v.clone())?),
            None => None,
        };
        Ok((c, w))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }
}

pub fn parse_complex(text: &str, tol: &Tolerances) -> Result<(PolytopalComplex, Option<ForceLoad>)> {
    let doc: ComplexDoc = serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {}: {e}", e.line())))?;
    doc.to_complex(tol)
}

/// A path of flats, each given by its spanning points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathDoc {
    pub samples: Vec<Vec<Vec<f64>>>,
}

impl PathDoc {
    pub fn from_path(path: &GrassmannPath) -> Self {
        Self {
            samples: path
                .samples()
                .iter()
                .map(|f| f.points().iter().map(|p| p.iter().copied().collect()).collect())
                .collect(),
        }
    }

    pub fn to_path(&self, tol: &Tolerances) -> Result<GrassmannPath> {
        let flats = self
            .samples
            .iter()
            .map(|s| AffineFlat::new(s.iter().map(|p| Vector::from_column_slice(p)).collect(), tol))
            .collect::<Result<Vec<_>>>()?;
        GrassmannPath::new(flats)
    }
}

pub fn parse_path(text: &str, tol: &Tolerances) -> Result<GrassmannPath> {
    let doc: PathDoc = serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {}: {e}", e.line())))?;
    doc.to_path(tol)
}
