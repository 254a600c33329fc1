//! Symbols: parameters, coordinates, and formal functions with derivative
//! multi-indices.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    Parameter,
    Coordinate,
    Function,
}

/// A scalar indeterminate.
///
/// Function symbols carry the coordinates they depend on and a derivative
/// multi-index aligned with that list. `A(tau)` differentiated twice in
/// `tau` is the symbol `A` with `deriv == [2]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    kind: SymbolKind,
    name: Arc<str>,
    depends_on: Arc<[Arc<str>]>,
    deriv: Box<[u32]>,
}

impl Symbol {
    pub fn parameter(name: &str) -> Self {
        Self::plain(SymbolKind::Parameter, name)
    }

    pub fn coordinate(name: &str) -> Self {
        Self::plain(SymbolKind::Coordinate, name)
    }

    /// An underived formal function of the listed coordinates.
    pub fn function(name: &str, depends_on: &[&str]) -> Self {
        Self {
            kind: SymbolKind::Function,
            name: name.into(),
            depends_on: depends_on.iter().map(|c| Arc::from(*c)).collect(),
            deriv: vec![0; depends_on.len()].into_boxed_slice(),
        }
    }

    fn plain(kind: SymbolKind, name: &str) -> Self {
        Self { kind, name: name.into(), depends_on: Arc::from(Vec::new()), deriv: Box::new([]) }
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn depends_on(&self) -> impl Iterator<Item = &str> {
        self.depends_on.iter().map(|s| &**s)
    }

    pub fn deriv(&self) -> &[u32] {
        &self.deriv
    }

    pub fn is_coordinate(&self) -> bool {
        self.kind == SymbolKind::Coordinate
    }

    pub fn is_function(&self) -> bool {
        self.kind == SymbolKind::Function
    }

    /// Total derivative order; zero for everything but derived functions.
    pub fn deriv_order(&self) -> u32 {
        self.deriv.iter().sum()
    }

    pub fn is_derived(&self) -> bool {
        self.deriv_order() > 0
    }

    /// The underived function this symbol is a derivative of (or itself).
    pub fn base(&self) -> Symbol {
        let mut b = self.clone();
        b.deriv = vec![0; b.deriv.len()].into_boxed_slice();
        b
    }

    /// The symbol for `∂/∂coord` of this function symbol, or `None` if the
    /// symbol does not depend on `coord` (the derivative is then zero).
    pub fn differentiated(&self, coord: &str) -> Option<Symbol> {
        if self.kind != SymbolKind::Function {
            return None;
        }
        let pos = self.depends_on.iter().position(|c| &**c == coord)?;
        let mut d = self.clone();
        d.deriv[pos] += 1;
        Some(d)
    }

    /// The multi-index expanded into a coordinate list, e.g. `[tau, tau, z1]`.
    pub fn deriv_coords(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for (c, &k) in self.depends_on.iter().zip(self.deriv.iter()) {
            for _ in 0..k {
                out.push(&**c);
            }
        }
        out
    }

    /// Builds the derivative along a coordinate sequence starting from this
    /// symbol. Fails with the offending coordinate when the function does not
    /// depend on it.
    pub fn differentiated_along<'a>(&self, coords: impl IntoIterator<Item = &'a str>) -> Result<Symbol, &'a str> {
        let mut s = self.clone();
        for c in coords {
            s = s.differentiated(c).ok_or(c)?;
        }
        Ok(s)
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.kind
            .cmp(&other.kind)
            .then_with(|| self.name.cmp(&other.name))
            .then_with(|| self.deriv.cmp(&other.deriv))
            .then_with(|| self.depends_on.cmp(&other.depends_on))
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Symbol {
    /// `A`, `d(A, tau)`, `d2(A, tau, tau)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order = self.deriv_order();
        if order == 0 {
            return f.write_str(&self.name);
        }
        if order == 1 {
            f.write_str("d(")?;
        } else {
            write!(f, "d{order}(")?;
        }
        f.write_str(&self.name)?;
        for c in self.deriv_coords() {
            write!(f, ", {c}")?;
        }
        f.write_str(")")
    }
}
