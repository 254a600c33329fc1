//! Torsionfree affine connections given by Christoffel tables.
//!
//! Index conventions: `Γ^k_{ij}` is stored with the upper index first, and
//! curvature is the (1,3) tensor with `R(∂_i, ∂_j)∂_k = R^l_{ijk} ∂_l`,
//!
//! ```text
//! R^l_{ijk} = ∂_i Γ^l_{jk} − ∂_j Γ^l_{ik} + Σ_m (Γ^l_{im} Γ^m_{jk} − Γ^l_{jm} Γ^m_{ik})
//! ```
//!
//! which expands `∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z` on coordinate fields.
//! Ricci traces the output slot against `X`: `Ricci_{jk} = Σ_i R^i_{ijk}`,
//! and `TrR_{ij} = Σ_k R^k_{ijk}` is the trace of the endomorphism
//! `Z ↦ R(∂_i, ∂_j)Z`. These satisfy `TrR(X,Y) = Ricci(Y,X) − Ricci(X,Y)`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::algebra::{AlgebraError, Bindings, DiffPoly, GaussianRational, Symbol, SymbolKind};
use crate::tensor::{SymmetryMode, Tensor, TensorError, Variance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnectionError {
    #[error("conflicting entries for Γ^{k}_{{{i}{j}}} and Γ^{k}_{{{j}{i}}}")]
    Conflict { k: usize, i: usize, j: usize },
    #[error("index ({k}, {i}, {j}) out of range for dimension {dim}")]
    IndexOutOfRange { k: usize, i: usize, j: usize, dim: usize },
    #[error("operation needs dimension {expected}, connection has {found}")]
    Dimension { expected: usize, found: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("symbol `{0}` refers to an undeclared coordinate")]
    UndeclaredCoordinate(String),
    #[error("duplicate or empty coordinate list")]
    BadCoordinates,
    #[error("subspace is not totally geodesic: {0}")]
    NotTotallyGeodesic(String),
    #[error("Weyl tensor forms disagree at {0:?}")]
    WeylFormsDisagree(Vec<usize>),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Vector field with polynomial components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorFieldPoly {
    pub components: Vec<DiffPoly>,
}

impl VectorFieldPoly {
    pub fn new(components: Vec<DiffPoly>) -> Self {
        Self { components }
    }

    /// The coordinate field `∂_k` in dimension `dim`.
    pub fn coordinate(dim: usize, k: usize) -> Self {
        let mut components = vec![DiffPoly::zero(); dim];
        components[k] = DiffPoly::one();
        Self { components }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Connection {
    coords: Vec<Symbol>,
    gamma: Vec<DiffPoly>,
}

impl Connection {
    /// The standard flat connection `∇₀` (all symbols zero).
    pub fn flat(coords: &[&str]) -> Result<Self, ConnectionError> {
        Self::from_table(coords, std::iter::empty())
    }

    /// Builds a table from `([k, i, j], Γ^k_{ij})` entries. Missing entries
    /// are zero and each entry fills its `(j, i)` mirror.
    pub fn from_table(
        coords: &[&str],
        entries: impl IntoIterator<Item = ([usize; 3], DiffPoly)>,
    ) -> Result<Self, ConnectionError> {
        let n = coords.len();
        let unique: BTreeSet<&str> = coords.iter().copied().collect();
        if n == 0 || unique.len() != n {
            return Err(ConnectionError::BadCoordinates);
        }
        let mut given: Vec<Option<DiffPoly>> = vec![None; n * n * n];
        for ([k, i, j], p) in entries {
            if k >= n || i >= n || j >= n {
                return Err(ConnectionError::IndexOutOfRange { k, i, j, dim: n });
            }
            for slot in [(k * n + i) * n + j, (k * n + j) * n + i] {
                match &given[slot] {
                    Some(q) if *q != p => return Err(ConnectionError::Conflict { k, i, j }),
                    _ => given[slot] = Some(p.clone()),
                }
            }
        }
        let c = Self {
            coords: coords.iter().map(|c| Symbol::coordinate(c)).collect(),
            gamma: given.into_iter().map(Option::unwrap_or_default).collect(),
        };
        c.check_symbols()?;
        Ok(c)
    }

    /// Internal constructor for an already symmetric table.
    pub(crate) fn from_parts(coords: Vec<Symbol>, gamma: Vec<DiffPoly>) -> Self {
        debug_assert_eq!(gamma.len(), coords.len().pow(3));
        Self { coords, gamma }
    }

    fn check_symbols(&self) -> Result<(), ConnectionError> {
        let names: BTreeSet<&str> = self.coords.iter().map(Symbol::name).collect();
        for p in &self.gamma {
            for s in p.symbols() {
                let ok = match s.kind() {
                    SymbolKind::Parameter => true,
                    SymbolKind::Coordinate => names.contains(s.name()),
                    SymbolKind::Function => s.depends_on().all(|d| names.contains(d)),
                };
                if !ok {
                    return Err(ConnectionError::UndeclaredCoordinate(s.to_string()));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Symbol] {
        &self.coords
    }

    pub fn coord_names(&self) -> Vec<String> {
        self.coords.iter().map(|c| c.name().to_string()).collect()
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c.name() == name)
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &DiffPoly {
        let n = self.dim();
        &self.gamma[(k * n + i) * n + j]
    }

    pub(crate) fn table(&self) -> &[DiffPoly] {
        &self.gamma
    }

    /// Γ as a (1,2) tensor.
    pub fn christoffel_tensor(&self) -> Tensor {
        Tensor::from_fn(self.dim(), Variance::mixed(2), |i| self.gamma(i[0], i[1], i[2]).clone())
    }

    pub fn is_flat_table(&self) -> bool {
        self.gamma.iter().all(DiffPoly::is_zero)
    }

    pub fn subst(&self, bindings: &Bindings) -> Result<Connection, ConnectionError> {
        let gamma = self.gamma.iter().map(|p| p.subst(bindings)).collect::<Result<_, _>>()?;
        let c = Connection { coords: self.coords.clone(), gamma };
        c.check_symbols()?;
        Ok(c)
    }

    /// `∂_x Γ^l_{jk}` for every coordinate, laid out as `[x][l][j][k]`.
    fn gamma_derivatives(&self) -> Result<Vec<DiffPoly>, ConnectionError> {
        let mut out = Vec::with_capacity(self.dim() * self.gamma.len());
        for x in &self.coords {
            for p in &self.gamma {
                out.push(p.diff(x)?);
            }
        }
        Ok(out)
    }

    pub fn curvature(&self) -> Result<Tensor, ConnectionError> {
        let n = self.dim();
        let dg = self.gamma_derivatives()?;
        let d = |x: usize, l: usize, j: usize, k: usize| &dg[((x * n + l) * n + j) * n + k];
        let mut r = Tensor::zeros(n, Variance::mixed(3));
        for l in 0..n {
            for i in 0..n {
                for j in (i + 1)..n {
                    for k in 0..n {
                        let mut v = d(i, l, j, k) - d(j, l, i, k);
                        for m in 0..n {
                            v = &v + &(self.gamma(l, i, m) * self.gamma(m, j, k));
                            v = &v - &(self.gamma(l, j, m) * self.gamma(m, i, k));
                        }
                        r.set(&[l, j, i, k], -&v);
                        r.set(&[l, i, j, k], v);
                    }
                }
            }
        }
        Ok(r)
    }

    pub fn ricci(&self) -> Result<Tensor, ConnectionError> {
        Ok(ricci_of(&self.curvature()?))
    }

    pub fn trace_r(&self) -> Result<Tensor, ConnectionError> {
        Ok(trace_r_of(&self.curvature()?))
    }

    /// Weyl projective tensor in dimension three.
    pub fn weyl3(&self) -> Result<Tensor, ConnectionError> {
        if self.dim() != 3 {
            return Err(ConnectionError::Dimension { expected: 3, found: self.dim() });
        }
        weyl3_of(&self.curvature()?)
    }

    /// Ricci symmetric, equivalently `TrR ≡ 0`.
    pub fn is_equiaffine(&self) -> Result<bool, ConnectionError> {
        Ok(self.ricci()?.symmetry_check(0, 1, SymmetryMode::Symmetric)?)
    }

    /// Lie derivative of the connection along `x`, a (1,2) tensor symmetric
    /// in its lower slots. It vanishes exactly for affine Killing fields.
    ///
    /// Uses the standard coordinate formula
    /// `(L_X Γ)^k_{ij} = ∂_i∂_j X^k + X^m ∂_m Γ^k_{ij} + Γ^k_{mj} ∂_i X^m
    /// + Γ^k_{im} ∂_j X^m − Γ^m_{ij} ∂_m X^k`.
    pub fn lie_derivative(&self, x: &VectorFieldPoly) -> Result<Tensor, ConnectionError> {
        let n = self.dim();
        if x.components.len() != n {
            return Err(ConnectionError::Shape(format!(
                "vector field has {} components, connection dimension {n}",
                x.components.len()
            )));
        }
        // dx[m][a] = ∂_a X^m
        let mut dx = Vec::with_capacity(n * n);
        for comp in &x.components {
            for c in &self.coords {
                dx.push(comp.diff(c)?);
            }
        }
        let dx = |m: usize, a: usize| &dx[m * n + a];
        let dg = self.gamma_derivatives()?;
        let dg = |m: usize, k: usize, i: usize, j: usize| &dg[((m * n + k) * n + i) * n + j];
        let mut out = Tensor::zeros(n, Variance::mixed(2));
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut v = dx(k, i).diff(&self.coords[j])?;
                    for m in 0..n {
                        v = &v + &(&x.components[m] * dg(m, k, i, j));
                        v = &v + &(self.gamma(k, m, j) * dx(m, i));
                        v = &v + &(self.gamma(k, i, m) * dx(m, j));
                        v = &v - &(self.gamma(m, i, j) * dx(k, m));
                    }
                    out.set(&[k, j, i], v.clone());
                    out.set(&[k, i, j], v);
                }
            }
        }
        Ok(out)
    }

    pub fn is_affine_killing(&self, x: &VectorFieldPoly) -> Result<bool, ConnectionError> {
        Ok(self.lie_derivative(x)?.is_zero())
    }

    /// Induced connection on the coordinate subspace spanned by `keep`
    /// (in that order), with the other coordinates set to zero.
    ///
    /// Requires `Γ^k_{ij} = 0` for tangential `i, j` and normal `k`, and
    /// kept entries that do not involve the dropped coordinates.
    pub fn totally_geodesic_restrict(&self, keep: &[usize]) -> Result<Connection, ConnectionError> {
        let n = self.dim();
        let set: BTreeSet<usize> = keep.iter().copied().collect();
        if keep.is_empty() || set.len() != keep.len() || keep.iter().any(|&k| k >= n) {
            return Err(ConnectionError::BadCoordinates);
        }
        let dropped: BTreeSet<&str> = (0..n).filter(|c| !set.contains(c)).map(|c| self.coords[c].name()).collect();
        for &i in keep {
            for &j in keep {
                for k in (0..n).filter(|k| !set.contains(k)) {
                    if !self.gamma(k, i, j).is_zero() {
                        return Err(ConnectionError::NotTotallyGeodesic(format!(
                            "Γ^{}_{{{} {}}} = {}",
                            self.coords[k].name(),
                            self.coords[i].name(),
                            self.coords[j].name(),
                            self.gamma(k, i, j)
                        )));
                    }
                }
            }
        }
        let m = keep.len();
        let mut gamma = Vec::with_capacity(m * m * m);
        for &k in keep {
            for &i in keep {
                for &j in keep {
                    let p = self.gamma(k, i, j);
                    let uses_dropped = p.mentions(|s| match s.kind() {
                        SymbolKind::Coordinate => dropped.contains(s.name()),
                        SymbolKind::Function => s.depends_on().any(|d| dropped.contains(d)),
                        SymbolKind::Parameter => false,
                    });
                    if uses_dropped {
                        return Err(ConnectionError::NotTotallyGeodesic(format!(
                            "kept entry {p} depends on a dropped coordinate"
                        )));
                    }
                    gamma.push(p.clone());
                }
            }
        }
        Ok(Connection { coords: keep.iter().map(|&k| self.coords[k].clone()).collect(), gamma })
    }

    /// Restriction by coordinate names.
    pub fn restrict_to(&self, keep: &[&str]) -> Result<Connection, ConnectionError> {
        let idx = keep
            .iter()
            .map(|k| self.coord_index(k).ok_or_else(|| ConnectionError::UndeclaredCoordinate((*k).to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        self.totally_geodesic_restrict(&idx)
    }
}

/// `Ricci_{jk} = Σ_i R^i_{ijk}`.
pub fn ricci_of(r: &Tensor) -> Tensor {
    r.contract(0, 1).expect("curvature has shape (1,3)")
}

/// `TrR_{ij} = Σ_k R^k_{ijk}`.
pub fn trace_r_of(r: &Tensor) -> Tensor {
    r.contract(0, 3).expect("curvature has shape (1,3)")
}

fn delta(a: usize, b: usize) -> bool {
    a == b
}

/// Dimension-three Weyl projective tensor from a curvature tensor.
///
/// Evaluates both the `TrR` form and the Ricci-only form and fails if they
/// differ anywhere.
pub fn weyl3_of(r: &Tensor) -> Result<Tensor, ConnectionError> {
    if r.dim() != 3 {
        return Err(ConnectionError::Dimension { expected: 3, found: r.dim() });
    }
    let ric = ricci_of(r);
    let tr = trace_r_of(r);
    let q = |n: i64, d: i64| GaussianRational::ratio(n, d);
    let with_trace = Tensor::from_fn(3, Variance::mixed(3), |x| {
        let (l, i, j, k) = (x[0], x[1], x[2], x[3]);
        let mut v = r.get(x).clone();
        if delta(l, k) {
            v = &v - &tr.get(&[i, j]).scale(&q(1, 4));
        }
        if delta(l, i) {
            v = &v - &ric.get(&[j, k]).scale(&q(1, 2));
            v = &v - &tr.get(&[j, k]).scale(&q(1, 8));
        }
        if delta(l, j) {
            v = &v + &ric.get(&[i, k]).scale(&q(1, 2));
            v = &v + &tr.get(&[i, k]).scale(&q(1, 8));
        }
        v
    });
    let ricci_only = Tensor::from_fn(3, Variance::mixed(3), |x| {
        let (l, i, j, k) = (x[0], x[1], x[2], x[3]);
        let mut v = r.get(x).clone();
        if delta(l, k) {
            v = &v + &(ric.get(&[i, j]) - ric.get(&[j, i])).scale(&q(1, 4));
        }
        if delta(l, j) {
            v = &v + &(&ric.get(&[i, k]).scale(&q(3, 1)) + ric.get(&[k, i])).scale(&q(1, 8));
        }
        if delta(l, i) {
            v = &v - &(&ric.get(&[j, k]).scale(&q(3, 1)) + ric.get(&[k, j])).scale(&q(1, 8));
        }
        v
    });
    if let Some((idx, _)) =
        with_trace.indexed().zip(ricci_only.entries()).find(|((_, a), b)| a != b).map(|((idx, a), _)| (idx, a.clone()))
    {
        return Err(ConnectionError::WeylFormsDisagree(idx));
    }
    Ok(with_trace)
}

/// First Bianchi identity: the cyclic sum over the three lower slots of a
/// (1,3) tensor vanishes.
pub fn bianchi_check(t: &Tensor) -> Result<bool, TensorError> {
    if t.arity() != 4 {
        return Err(TensorError::Shape(format!("expected a (1,3) tensor, got arity {}", t.arity())));
    }
    let n = t.dim();
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let s = &(t.get(&[l, i, j, k]) + t.get(&[l, j, k, i])) + t.get(&[l, k, i, j]);
                    if !s.is_zero() {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}
