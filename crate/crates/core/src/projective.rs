//! Projective classes of torsionfree connections.
//!
//! Differences of connections are symmetric (1,2) tensors [`ThetaField`].
//! `div` traces the upper index against the first lower one, `𝒥` sends a
//! one-form `θ` to `θ_i δ^k_j + θ_j δ^k_i`, and `𝔽 = Id − 𝒥∘div/(n+1)` is
//! the projection onto the trace-free part. Two connections are
//! projectively equivalent exactly when their difference lies in `Im 𝒥`.

use std::collections::BTreeSet;

use serde_json::{json, Map, Value};

use crate::algebra::{DiffPoly, GaussianRational};
use crate::connection::{weyl3_of, Connection, ConnectionError};
use crate::tensor::{Tensor, Variance};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OneForm {
    pub components: Vec<DiffPoly>,
}

impl OneForm {
    pub fn new(components: Vec<DiffPoly>) -> Self {
        Self { components }
    }

    pub fn zero(dim: usize) -> Self {
        Self { components: vec![DiffPoly::zero(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(DiffPoly::is_zero)
    }

    pub fn scale(&self, c: &GaussianRational) -> OneForm {
        OneForm::new(self.components.iter().map(|p| p.scale(c)).collect())
    }

    pub fn checked_add(&self, other: &OneForm) -> Option<OneForm> {
        (self.dim() == other.dim())
            .then(|| OneForm::new(self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect()))
    }

    pub fn checked_sub(&self, other: &OneForm) -> Option<OneForm> {
        self.checked_add(&-other)
    }

    /// `{"dtau": "1/2*E", ...}` with zero components omitted.
    pub fn to_json(&self, coords: &[String]) -> Value {
        let mut m = Map::new();
        for (c, p) in coords.iter().zip(&self.components) {
            if !p.is_zero() {
                m.insert(format!("d{c}"), json!(p.to_string()));
            }
        }
        Value::Object(m)
    }
}

impl std::ops::Neg for &OneForm {
    type Output = OneForm;
    fn neg(self) -> OneForm {
        OneForm::new(self.components.iter().map(|p| -p).collect())
    }
}

/// Section of `S²T* ⊗ T`, stored as `Θ^k_{ij}` with `k` outermost.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThetaField {
    dim: usize,
    components: Vec<DiffPoly>,
}

impl ThetaField {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, components: vec![DiffPoly::zero(); dim * dim * dim] }
    }

    /// Symmetrizes nothing: `f` must already be symmetric in `(i, j)`.
    /// Only the `i <= j` half is queried.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> DiffPoly) -> Self {
        let mut t = Self::zeros(dim);
        for k in 0..dim {
            for i in 0..dim {
                for j in i..dim {
                    let v = f(k, i, j);
                    t.components[(k * dim + j) * dim + i] = v.clone();
                    t.components[(k * dim + i) * dim + j] = v;
                }
            }
        }
        t
    }

    /// `Θ = c − ∇₀`, the Christoffel table itself.
    pub fn of_connection(c: &Connection) -> Self {
        Self { dim: c.dim(), components: c.table().to_vec() }
    }

    /// `c1 − c2`.
    pub fn difference(c1: &Connection, c2: &Connection) -> Result<Self, ConnectionError> {
        same_chart(c1, c2)?;
        Ok(Self { dim: c1.dim(), components: c1.table().iter().zip(c2.table()).map(|(a, b)| a - b).collect() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> &DiffPoly {
        &self.components[(k * self.dim + i) * self.dim + j]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(DiffPoly::is_zero)
    }

    pub fn scale(&self, c: &GaussianRational) -> ThetaField {
        Self { dim: self.dim, components: self.components.iter().map(|p| p.scale(c)).collect() }
    }

    pub fn checked_add(&self, other: &ThetaField) -> Option<ThetaField> {
        (self.dim == other.dim).then(|| Self {
            dim: self.dim,
            components: self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn checked_sub(&self, other: &ThetaField) -> Option<ThetaField> {
        self.checked_add(&other.scale(&GaussianRational::from(-1)))
    }

    pub fn to_tensor(&self) -> Tensor {
        Tensor::from_fn(self.dim, Variance::mixed(2), |x| self.get(x[0], x[1], x[2]).clone())
    }

    /// The connection `c + Θ`.
    pub fn add_to(&self, c: &Connection) -> Result<Connection, ConnectionError> {
        if c.dim() != self.dim {
            return Err(ConnectionError::Dimension { expected: c.dim(), found: self.dim });
        }
        let gamma = c.table().iter().zip(&self.components).map(|(a, b)| a + b).collect();
        Ok(Connection::from_parts(c.coords().to_vec(), gamma))
    }
}

fn same_chart(c1: &Connection, c2: &Connection) -> Result<(), ConnectionError> {
    if c1.dim() != c2.dim() {
        return Err(ConnectionError::Dimension { expected: c1.dim(), found: c2.dim() });
    }
    if c1.coords() != c2.coords() {
        return Err(ConnectionError::Shape(format!(
            "coordinates differ: {:?} vs {:?}",
            c1.coord_names(),
            c2.coord_names()
        )));
    }
    Ok(())
}

/// `(div Θ)_j = Σ_k Θ^k_{kj}`.
pub fn divergence(t: &ThetaField) -> OneForm {
    let n = t.dim();
    OneForm::new((0..n).map(|j| (0..n).map(|k| t.get(k, k, j).clone()).sum()).collect())
}

/// `𝒥(θ)^k_{ij} = θ_i δ^k_j + θ_j δ^k_i`.
pub fn inject_j(f: &OneForm) -> ThetaField {
    ThetaField::from_fn(f.dim(), |k, i, j| {
        let mut v = DiffPoly::zero();
        if k == j {
            v = &v + &f.components[i];
        }
        if k == i {
            v = &v + &f.components[j];
        }
        v
    })
}

fn one_over_n_plus_one(n: usize) -> GaussianRational {
    GaussianRational::ratio(1, n as i64 + 1)
}

/// `𝔽(Θ) = Θ − 𝒥(div Θ)/(n+1)`.
pub fn trace_free_project(t: &ThetaField) -> ThetaField {
    let shift = inject_j(&divergence(t)).scale(&one_over_n_plus_one(t.dim()));
    t.checked_sub(&shift).expect("same dimension")
}

/// Witness `θ` with `c1 = c2 + 𝒥(θ)`, or `None` when the difference has a
/// nonzero trace-free part.
pub fn projective_equiv(c1: &Connection, c2: &Connection) -> Result<Option<OneForm>, ConnectionError> {
    let diff = ThetaField::difference(c1, c2)?;
    let theta = divergence(&diff).scale(&one_over_n_plus_one(diff.dim()));
    Ok((inject_j(&theta) == diff).then_some(theta))
}

/// The projectively equivalent connection with `Σ_k Γ^k_{ik} = 0`, for
/// which `dz_1 ∧ … ∧ dz_n` is parallel.
pub fn volume_normalize(c: &Connection) -> Connection {
    let t = trace_free_project(&ThetaField::of_connection(c));
    Connection::from_parts(c.coords().to_vec(), t.components)
}

/// `weyl3(c) ≡ 0`.
pub fn is_projectively_flat3(c: &Connection) -> Result<bool, ConnectionError> {
    Ok(c.weyl3()?.is_zero())
}

/// Distinct nonzero Weyl components of a dimension-three table, each made
/// monic so that scalar multiples collapse. Ordered by degree, then text.
pub fn flatness_conditions(c: &Connection) -> Result<Vec<DiffPoly>, ConnectionError> {
    if c.dim() != 3 {
        return Err(ConnectionError::Dimension { expected: 3, found: c.dim() });
    }
    let w = weyl3_of(&c.curvature()?)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for p in w.entries().iter().filter(|p| !p.is_zero()) {
        let m = p.monic();
        if seen.insert(m.to_string()) {
            out.push(m);
        }
    }
    out.sort_by_cached_key(|p| (p.total_degree(), p.to_string()));
    Ok(out)
}
