//! Exact symbolic tensor calculus for torsionfree holomorphic affine
//! connections and their projective classes.
//!
//! Connections are Christoffel tables of polynomials over ℚ(i). From them the
//! crate computes curvature, Ricci, the trace tensor `TrR` and the
//! three-dimensional Weyl projective tensor, decides projective equivalence
//! and projective flatness, and checks equivariance of the Kuga–Shimura
//! families under the `Γ ⋉ Λ` action. A small numeric integrator
//! cross-checks projective equivalence through unparametrized geodesics.

pub mod algebra;
pub mod connection;
pub mod families;
pub mod geodesic;
pub mod projective;
pub mod specfile;
pub mod tensor;

pub use algebra::{
    parse_constant, parse_expr, AlgebraError, Bindings, DiffPoly, GaussianRational, Monomial, ParseError, Point,
    Symbol, SymbolKind, SymbolTable,
};
pub use connection::{bianchi_check, Connection, ConnectionError, VectorFieldPoly};
pub use families::{ActionMap, FamilyError, GroupElement, PointSample, Weight, WeightedCoefficient};
pub use geodesic::{GeodesicError, GeodesicPath, NumericConnection};
pub use projective::{OneForm, ThetaField};
pub use specfile::{ConnectionSpec, SpecError};
pub use tensor::{Slot, SymmetryMode, Tensor, TensorError, Variance};
