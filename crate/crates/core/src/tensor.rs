//! Dense multi-index arrays of polynomials with a variance signature.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::algebra::{parse_expr, DiffPoly, GaussianRational, ParseError, SymbolTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Up,
    Down,
}

/// Slot signature, e.g. `[Up, Down, Down, Down]` for curvature.
///
/// Empty only for the scalars produced by a full contraction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Variance(pub Vec<Slot>);

impl Variance {
    /// One `Up` slot followed by `down` covariant slots.
    pub fn mixed(down: usize) -> Self {
        let mut v = vec![Slot::Up];
        v.extend(std::iter::repeat_n(Slot::Down, down));
        Variance(v)
    }

    pub fn covariant(down: usize) -> Self {
        Variance(vec![Slot::Down; down])
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryMode {
    Symmetric,
    Antisymmetric,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error("slot {slot} out of range for arity {arity}")]
    SlotOutOfRange { slot: usize, arity: usize },
    #[error("slot {slot} is {found:?}, expected {expected:?}")]
    VarianceMismatch { slot: usize, expected: Slot, found: Slot },
    #[error("cannot pair a slot with itself")]
    SameSlot,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("tensor JSON: {0}")]
    Json(String),
    #[error("entry `{key}`: {source}")]
    Entry { key: String, source: ParseError },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tensor {
    dim: usize,
    variance: Variance,
    entries: Vec<DiffPoly>,
}

/// All index tuples of `{0..dim}^arity` in row-major order.
pub fn multi_indices(dim: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = dim.pow(arity as u32);
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; arity];
        for slot in (0..arity).rev() {
            idx[slot] = flat % dim;
            flat /= dim;
        }
        idx
    })
}

impl Tensor {
    pub fn zeros(dim: usize, variance: Variance) -> Self {
        let n = dim.pow(variance.arity() as u32);
        Self { dim, variance, entries: vec![DiffPoly::zero(); n] }
    }

    pub fn from_fn(dim: usize, variance: Variance, mut f: impl FnMut(&[usize]) -> DiffPoly) -> Self {
        let entries = multi_indices(dim, variance.arity()).map(|i| f(&i)).collect();
        Self { dim, variance, entries }
    }

    /// The (1,1) identity `δ^i_j`.
    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, Variance(vec![Slot::Up, Slot::Down]), |i| {
            if i[0] == i[1] {
                DiffPoly::one()
            } else {
                DiffPoly::zero()
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.variance.arity()
    }

    pub fn variance(&self) -> &Variance {
        &self.variance
    }

    pub fn entries(&self) -> &[DiffPoly] {
        &self.entries
    }

    fn flat(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.arity(), "index arity");
        idx.iter().fold(0, |acc, &i| {
            assert!(i < self.dim, "index {i} out of range for dim {}", self.dim);
            acc * self.dim + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> &DiffPoly {
        &self.entries[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: DiffPoly) {
        let f = self.flat(idx);
        self.entries[f] = value;
    }

    pub fn indexed(&self) -> impl Iterator<Item = (Vec<usize>, &DiffPoly)> {
        multi_indices(self.dim, self.arity()).zip(self.entries.iter())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(DiffPoly::is_zero)
    }

    fn check_slot(&self, slot: usize) -> Result<Slot, TensorError> {
        self.variance.0.get(slot).copied().ok_or(TensorError::SlotOutOfRange { slot, arity: self.arity() })
    }

    fn same_shape(&self, other: &Tensor) -> Result<(), TensorError> {
        if self.dim != other.dim || self.variance != other.variance {
            return Err(TensorError::Shape(format!(
                "dim {} {:?} vs dim {} {:?}",
                self.dim, self.variance.0, other.dim, other.variance.0
            )));
        }
        Ok(())
    }

    /// Trace over a contravariant and a covariant slot.
    pub fn contract(&self, up: usize, down: usize) -> Result<Tensor, TensorError> {
        if up == down {
            return Err(TensorError::SameSlot);
        }
        let su = self.check_slot(up)?;
        let sd = self.check_slot(down)?;
        if su != Slot::Up {
            return Err(TensorError::VarianceMismatch { slot: up, expected: Slot::Up, found: su });
        }
        if sd != Slot::Down {
            return Err(TensorError::VarianceMismatch { slot: down, expected: Slot::Down, found: sd });
        }
        let kept: Vec<usize> = (0..self.arity()).filter(|&s| s != up && s != down).collect();
        let variance = Variance(kept.iter().map(|&s| self.variance.0[s]).collect());
        let mut full = vec![0; self.arity()];
        Ok(Tensor::from_fn(self.dim, variance, |idx| {
            for (pos, &s) in kept.iter().enumerate() {
                full[s] = idx[pos];
            }
            (0..self.dim)
                .map(|k| {
                    full[up] = k;
                    full[down] = k;
                    self.get(&full).clone()
                })
                .sum()
        }))
    }

    /// The tensor with the index positions `a` and `b` exchanged.
    pub fn swap_slots(&self, a: usize, b: usize) -> Result<Tensor, TensorError> {
        let sa = self.check_slot(a)?;
        let sb = self.check_slot(b)?;
        if sa != sb {
            return Err(TensorError::VarianceMismatch { slot: b, expected: sa, found: sb });
        }
        let mut src = vec![0; self.arity()];
        Ok(Tensor::from_fn(self.dim, self.variance.clone(), |idx| {
            src.copy_from_slice(idx);
            src.swap(a, b);
            self.get(&src).clone()
        }))
    }

    pub fn symmetry_check(&self, a: usize, b: usize, mode: SymmetryMode) -> Result<bool, TensorError> {
        if a == b {
            return Err(TensorError::SameSlot);
        }
        let swapped = self.swap_slots(a, b)?;
        Ok(match mode {
            SymmetryMode::Symmetric => swapped == *self,
            SymmetryMode::Antisymmetric => swapped == -self,
        })
    }

    pub fn map(&self, f: impl FnMut(&DiffPoly) -> DiffPoly) -> Tensor {
        Tensor { dim: self.dim, variance: self.variance.clone(), entries: self.entries.iter().map(f).collect() }
    }

    pub fn try_map<E>(&self, f: impl FnMut(&DiffPoly) -> Result<DiffPoly, E>) -> Result<Tensor, E> {
        Ok(Tensor {
            dim: self.dim,
            variance: self.variance.clone(),
            entries: self.entries.iter().map(f).collect::<Result<_, E>>()?,
        })
    }

    pub fn scale(&self, c: &GaussianRational) -> Tensor {
        self.map(|p| p.scale(c))
    }

    pub fn checked_add(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        self.same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        self.same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Tensor, f: impl Fn(&DiffPoly, &DiffPoly) -> DiffPoly) -> Tensor {
        Tensor {
            dim: self.dim,
            variance: self.variance.clone(),
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// `{"variance": [...], "entries": {"k.i.j": "poly"}}` with coordinate
    /// names as index labels; zero entries are omitted.
    pub fn to_json(&self, coords: &[String]) -> Value {
        assert_eq!(coords.len(), self.dim, "coordinate labels");
        let mut entries = Map::new();
        for (idx, p) in self.indexed() {
            if !p.is_zero() {
                let key: Vec<&str> = idx.iter().map(|&i| coords[i].as_str()).collect();
                entries.insert(key.join("."), Value::String(p.to_string()));
            }
        }
        json!({ "variance": self.variance.0, "entries": entries })
    }

    pub fn from_json(value: &Value, table: &SymbolTable) -> Result<Tensor, TensorError> {
        let coords = table.coordinate_names();
        let variance: Vec<Slot> = serde_json::from_value(
            value.get("variance").cloned().ok_or_else(|| TensorError::Json("missing `variance`".into()))?,
        )
        .map_err(|e| TensorError::Json(e.to_string()))?;
        let mut t = Tensor::zeros(coords.len(), Variance(variance));
        let entries = value
            .get("entries")
            .and_then(Value::as_object)
            .ok_or_else(|| TensorError::Json("missing `entries` object".into()))?;
        for (key, text) in entries {
            let idx = key
                .split('.')
                .map(|c| coords.iter().position(|n| n == c))
                .collect::<Option<Vec<usize>>>()
                .filter(|i| i.len() == t.arity())
                .ok_or_else(|| TensorError::Json(format!("bad index key `{key}`")))?;
            let text = text.as_str().ok_or_else(|| TensorError::Json(format!("entry `{key}` is not a string")))?;
            let p = parse_expr(text, table).map_err(|source| TensorError::Entry { key: key.clone(), source })?;
            t.set(&idx, p);
        }
        Ok(t)
    }
}

impl std::ops::Neg for &Tensor {
    type Output = Tensor;
    fn neg(self) -> Tensor {
        self.map(|p| -p)
    }
}
