use thiserror::Error;

use crate::framework::{Edge, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("form degree {degree} exceeds ambient dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("expected {expected} vectors, found {found}")]
    WrongCount { expected: usize, found: usize },

    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(Edge),
    #[error("loop edge at vertex {0}")]
    LoopEdge(VertexId),
    #[error("duplicate edge {0}")]
    DuplicateEdge(Edge),
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("vertices {0} and {1} are placed at the same point")]
    NonInjective(VertexId, VertexId),
    #[error("non-finite coordinate at vertex {0}")]
    NonFinite(VertexId),

    #[error("edges {0} and {1} overlap along a collinear segment")]
    OverlappingEdges(Edge, Edge),
    #[error("vertex {vertex} lies in the interior of edge {edge}")]
    VertexOnEdge { vertex: VertexId, edge: Edge },
    #[error("framework is not crossing-free")]
    NotPlanar,
    #[error("point lies on the framework")]
    PointOnFramework,

    #[error("stress is not a self-stress (max residual {0:.3e})")]
    NotSelfStress(f64),
    #[error("neighbouring condition violated on edge {edge} (residual {residual:.3e})")]
    Consistency { edge: Edge, residual: f64 },
    #[error("lifting is discontinuous across edge {edge} (mismatch {mismatch:.3e})")]
    Continuity { edge: Edge, mismatch: f64 },
    #[error("edge {0} is a bridge with non-zero stress")]
    BridgeWithStress(Edge),
    #[error("reciprocal diagram is degenerate: {0}")]
    DegenerateDual(String),

    #[error("loops intersect or touch")]
    LoopsIntersect,
    #[error("no generic projection found after {0} attempts")]
    DegenerateProjection(usize),
    #[error("cone is not transversal to edge {0}")]
    NonTransversal(Edge),
    #[error("invalid loop: {0}")]
    InvalidLoop(String),
    #[error("form on edge {edge} is not parallel to its edge covector (residual {residual:.3e})")]
    NotParallel { edge: Edge, residual: f64 },

    #[error("degenerate polytope {0}")]
    DegeneratePolytope(usize),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("unknown face {0}")]
    UnknownFace(usize),
    #[error("basis is not orthonormal")]
    NotOrthonormal,
    #[error("face {0} has zero volume")]
    ZeroVolume(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("degenerate affine flat")]
    DegenerateFlat,
    #[error("path is not simple: {0}")]
    NonSimplePath(String),
    #[error("force-load is not in equilibrium (max residual {0:.3e})")]
    NotEquilibrium(f64),
    #[error("angle parameters out of domain")]
    Domain,

    #[error("parse error: {0}")]
    Parse(String),
}
