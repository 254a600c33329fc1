//! Coefficient field ℚ(i), symbols, canonical polynomials and the
//! expression parser.

mod gaussian;
mod parse;
mod poly;
mod symbol;

use thiserror::Error;

pub use gaussian::GaussianRational;
pub use parse::{is_identifier, parse_constant, parse_expr, ParseError, SymbolTable};
pub use poly::{Bindings, DiffPoly, Monomial, Point};
pub use symbol::{Symbol, SymbolKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("`{0}` is not a coordinate")]
    NotACoordinate(String),
    #[error("derivative `{0}` bound without its base function")]
    DerivativeWithoutBase(String),
    #[error("symbol `{0}` is unbound")]
    Unbound(String),
    #[error("identifier `{0}` declared twice")]
    Duplicate(String),
    #[error("`{0}` is not a valid identifier")]
    BadIdentifier(String),
}
