//! Self-stressed frameworks, polytopal complexes and their liftings.
//!
//! The crate is organised bottom-up:
//!
//! - [`form`], [`linalg`], [`tol`]: constant exterior forms, determinant and
//!   Gram-volume predicates, and the tolerance policy.
//! - [`framework`]: graph frameworks, equilibrium residuals, the self-stress
//!   nullspace and crossing subdivision.
//! - [`arrangement`]: the chamber decomposition of the plane cut out by a
//!   planar framework.
//! - [`lifting2d`]: differential liftings over chambers, integrated Maxwell
//!   liftings and reciprocal diagrams.
//! - [`homotopy`]: differential liftings in higher dimensions, evaluated on
//!   crossing words and on concrete polygonal loops, plus linking numbers.
//! - [`polytopal`]: m-frameworks, polytopal complexes, force-loads and
//!   m-form liftings.
//! - [`grassmann`]: flat distances and liftings over paths of affine flats.
//! - [`io`], [`export`], [`verify`]: JSON documents, OBJ/SVG output and the
//!   verification report driven by the command line tool.

pub mod arrangement;
pub mod catalog;
pub mod export;
pub mod error;
pub mod framework;
pub mod grassmann;
pub mod form;
pub mod homotopy;
pub mod io;
pub mod lifting2d;
pub mod linalg;
pub mod polytopal;
pub mod tol;
pub mod verify;

mod planar;


pub use error::{Error, Result};
pub use form::MForm;
pub use framework::{Edge, Framework, Stress, VertexId};
pub use linalg::Vector;
pub use tol::Tolerances;
