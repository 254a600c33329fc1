//! Named connection families and the `Γ ⋉ Λ` equivariance checker.
//!
//! The torus family has constant symbols on `(τ, z₁, z₂)`:
//!
//! | symbol | value |
//! |---|---|
//! | `Γ^{z₁}_{ττ}`, `Γ^{z₂}_{ττ}` | `A`, `B` |
//! | `Γ^{z₁}_{z₁z₁}`, `Γ^τ_{τz₁}`, `Γ^{z₁}_{z₁z₂}` | `C`, `C/2`, `C/2` |
//! | `Γ^{z₂}_{z₂z₂}`, `Γ^τ_{τz₂}`, `Γ^{z₂}_{z₁z₂}` | `D`, `D/2`, `D/2` |
//! | `Γ^τ_{ττ}`, `Γ^{z₁}_{z₁τ}`, `Γ^{z₂}_{z₂τ}` | `E`, `E/2`, `E/2` |
//!
//! The Kuga–Shimura family replaces the constants by functions `A(τ)`,
//! `B(τ)` and optionally `C(τ)` in the `A`, `B` and `E` slots.
//!
//! An element `(γ, λ)` with `γ = (a b; c d)` and `λ = (m, n, k, l)` acts by
//! `(τ, z₁, z₂) ↦ ((aτ+b)/(cτ+d), (z₁+mτ+n)/(cτ+d), (z₂+kτ+l)/(cτ+d))`.
//! A coefficient of weight `w` transports as
//! `f(γτ) = (cτ+d)^{2w} f(τ)`; `A`, `B` have weight 3/2 and `C` weight 1.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{AlgebraError, DiffPoly, GaussianRational, Point, Symbol, SymbolKind};
use crate::connection::{Connection, ConnectionError};
use crate::projective::ThetaField;

pub const TORUS_COORDS: [&str; 3] = ["tau", "z1", "z2"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("torus_n needs n >= 4, got {0}")]
    Range(usize),
    #[error("ad - bc = {0}, expected 1")]
    Determinant(String),
    #[error("pole: c*tau + d = 0 at tau = {0}")]
    Pole(String),
    #[error("coefficient values break the weight rule: {0}")]
    Consistency(String),
    #[error("no value supplied for `{0}`")]
    MissingValue(String),
    #[error("field has dimension {0}, expected 3")]
    Dimension(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
}

type GR = GaussianRational;

fn half(p: &DiffPoly) -> DiffPoly {
    p.scale(&GR::ratio(1, 2))
}

/// Torus table entries `[k, i, j]` given the positions of `τ, z₁, z₂`.
fn torus_entries([t, z1, z2]: [usize; 3], [a, b, c, d, e]: [&DiffPoly; 5]) -> Vec<([usize; 3], DiffPoly)> {
    vec![
        ([z1, t, t], a.clone()),
        ([z2, t, t], b.clone()),
        ([z1, z1, z1], c.clone()),
        ([t, t, z1], half(c)),
        ([z1, z1, z2], half(c)),
        ([z2, z2, z2], d.clone()),
        ([t, t, z2], half(d)),
        ([z2, z1, z2], half(d)),
        ([t, t, t], e.clone()),
        ([z1, z1, t], half(e)),
        ([z2, z2, t], half(e)),
    ]
}

/// Translation-invariant family `∇^{A,B,C,D,E}` on coordinates `(τ, z₁, z₂)`.
pub fn torus3(a: &DiffPoly, b: &DiffPoly, c: &DiffPoly, d: &DiffPoly, e: &DiffPoly) -> Connection {
    Connection::from_table(&TORUS_COORDS, torus_entries([0, 1, 2], [a, b, c, d, e])).expect("torus table is consistent")
}

fn torus_params() -> [DiffPoly; 5] {
    ["A", "B", "C", "D", "E"].map(DiffPoly::param)
}

/// `torus3` with parameter symbols `A … E`.
pub fn torus3_symbolic() -> Connection {
    let [a, b, c, d, e] = torus_params();
    torus3(&a, &b, &c, &d, &e)
}

/// `torus3` at rational values.
pub fn torus3_at(values: [i64; 5]) -> Connection {
    let [a, b, c, d, e] = values.map(DiffPoly::integer);
    torus3(&a, &b, &c, &d, &e)
}

/// Coordinates of the `n`-dimensional extension: `z1, z2, tau, z4, …, zn`.
pub fn torus_n_coords(n: usize) -> Vec<String> {
    let mut v: Vec<String> = vec!["z1".into(), "z2".into(), "tau".into()];
    v.extend((4..=n).map(|i| format!("z{i}")));
    v
}

/// `∇_n^{A,B,C,D,E}`: the torus table on `(z₁, z₂, τ)` with every symbol
/// involving `z₄ … zₙ` zero.
pub fn torus_n(
    n: usize,
    a: &DiffPoly,
    b: &DiffPoly,
    c: &DiffPoly,
    d: &DiffPoly,
    e: &DiffPoly,
) -> Result<Connection, FamilyError> {
    if n < 4 {
        return Err(FamilyError::Range(n));
    }
    let names = torus_n_coords(n);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Ok(Connection::from_table(&refs, torus_entries([2, 0, 1], [a, b, c, d, e]))?)
}

pub fn torus_n_symbolic(n: usize) -> Result<Connection, FamilyError> {
    let [a, b, c, d, e] = torus_params();
    torus_n(n, &a, &b, &c, &d, &e)
}

/// Kuga–Shimura family `∇⁰ + Θ_{A,B,C}` on `(τ, z₁, z₂)` with `A(τ)`,
/// `B(τ)` and, when `with_trace`, `C(τ)`.
pub fn kuga_shimura(with_trace: bool) -> Connection {
    let f = |name: &str| DiffPoly::var(Symbol::function(name, &["tau"]));
    let mut entries = vec![([1, 0, 0], f("A")), ([2, 0, 0], f("B"))];
    if with_trace {
        let c = f("C");
        entries.extend([([0, 0, 0], c.clone()), ([1, 1, 0], half(&c)), ([2, 2, 0], half(&c))]);
    }
    Connection::from_table(&TORUS_COORDS, entries).expect("family table is consistent")
}

/// `Θ_{A,B,C}` (or `Θ_{A,B,0}`).
pub fn kuga_shimura_theta(with_trace: bool) -> ThetaField {
    ThetaField::of_connection(&kuga_shimura(with_trace))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Weight {
    Half,
    One,
    ThreeHalves,
}

impl Weight {
    /// `2w`, the exponent of the automorphy factor.
    pub fn doubled(self) -> u32 {
        match self {
            Weight::Half => 1,
            Weight::One => 2,
            Weight::ThreeHalves => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedCoefficient {
    symbol: Symbol,
    weight: Weight,
}

impl WeightedCoefficient {
    /// `symbol` must be an underived function of `tau` alone.
    pub fn new(symbol: Symbol, weight: Weight) -> Option<Self> {
        let deps: Vec<&str> = symbol.depends_on().collect();
        (symbol.is_function() && !symbol.is_derived() && deps == ["tau"]).then_some(Self { symbol, weight })
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn name(&self) -> &str {
        self.symbol.name()
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    /// Value at `γτ` given the value at `τ` and `s = cτ + d`.
    pub fn transport(&self, value: &GR, s: &GR) -> GR {
        value * &s.pow(self.weight.doubled())
    }
}

/// Weighted coefficients of the Kuga–Shimura family.
pub fn kuga_shimura_weights(with_trace: bool) -> Vec<WeightedCoefficient> {
    let mut v = vec![("A", Weight::ThreeHalves), ("B", Weight::ThreeHalves)];
    if with_trace {
        v.push(("C", Weight::One));
    }
    v.into_iter()
        .map(|(n, w)| WeightedCoefficient::new(Symbol::function(n, &["tau"]), w).expect("function of tau"))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    gamma: [GR; 4],
    lambda: [GR; 4],
}

impl GroupElement {
    pub fn new(gamma: [GR; 4], lambda: [GR; 4]) -> Result<Self, FamilyError> {
        let [a, b, c, d] = &gamma;
        let det = &(a * d) - &(b * c);
        if det != GR::from(1) {
            return Err(FamilyError::Determinant(det.to_string()));
        }
        Ok(Self { gamma, lambda })
    }

    pub fn identity() -> Self {
        Self::lambda_only([0, 0, 0, 0].map(GR::from))
    }

    /// `(1, λ)`.
    pub fn lambda_only(lambda: [GR; 4]) -> Self {
        Self { gamma: [1, 0, 0, 1].map(GR::from), lambda }
    }

    pub fn gamma(&self) -> &[GR; 4] {
        &self.gamma
    }

    pub fn lambda(&self) -> &[GR; 4] {
        &self.lambda
    }

    /// `cτ + d`.
    pub fn automorphy(&self, tau: &GR) -> GR {
        &(&self.gamma[2] * tau) + &self.gamma[3]
    }
}

/// The biholomorphism of `ℋ × ℂ²` defined by a group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionMap {
    g: GroupElement,
}

pub fn action_map(g: &GroupElement) -> ActionMap {
    ActionMap { g: g.clone() }
}

impl ActionMap {
    pub fn element(&self) -> &GroupElement {
        &self.g
    }

    fn factor(&self, tau: &GR) -> Result<GR, FamilyError> {
        let s = self.g.automorphy(tau);
        if s.is_zero() {
            return Err(FamilyError::Pole(tau.to_string()));
        }
        Ok(s)
    }

    pub fn apply(&self, x: &[GR; 3]) -> Result<[GR; 3], FamilyError> {
        let s = self.factor(&x[0])?;
        let [a, b, _, _] = &self.g.gamma;
        let [m, n, k, l] = &self.g.lambda;
        let tau = &x[0];
        Ok([&(&(a * tau) + b) / &s, &(&(&x[1] + &(m * tau)) + n) / &s, &(&(&x[2] + &(k * tau)) + l) / &s])
    }

    /// `J^a_i = ∂φ^a/∂x^i`.
    pub fn jacobian(&self, x: &[GR; 3]) -> Result<[[GR; 3]; 3], FamilyError> {
        let s = self.factor(&x[0])?;
        let s2 = &s * &s;
        let [_, _, c, d] = &self.g.gamma;
        let [m, n, k, l] = &self.g.lambda;
        // ∂_τ of (z + pτ + q)/s is (p d − c z − q c)/s².
        let fiber = |z: &GR, p: &GR, q: &GR| &(&(&(p * d) - &(c * z)) - &(q * c)) / &s2;
        let zero = GR::zero();
        let inv_s = s.inv().expect("nonzero");
        Ok([
            [s2.inv().expect("nonzero"), zero.clone(), zero.clone()],
            [fiber(&x[1], m, n), inv_s.clone(), zero.clone()],
            [fiber(&x[2], k, l), zero, inv_s],
        ])
    }
}

fn inverse3(m: &[[GR; 3]; 3]) -> Option<[[GR; 3]; 3]> {
    let minor = |r0: usize, r1: usize, c0: usize, c1: usize| &(&m[r0][c0] * &m[r1][c1]) - &(&m[r0][c1] * &m[r1][c0]);
    let cof = |i: usize, j: usize| {
        let (r0, r1) = match i {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let (c0, c1) = match j {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let v = minor(r0, r1, c0, c1);
        if (i + j) % 2 == 1 {
            -v
        } else {
            v
        }
    };
    let det = (0..3).fold(GR::zero(), |acc, j| &acc + &(&m[0][j] * &cof(0, j)));
    let inv_det = det.inv()?;
    let mut out: [[GR; 3]; 3] = Default::default();
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = &cof(j, i) * &inv_det;
        }
    }
    Some(out)
}

/// One evaluation point with the coefficient values at `τ` and at `γτ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSample {
    pub point: [GR; 3],
    pub at_source: BTreeMap<String, GR>,
    pub at_image: BTreeMap<String, GR>,
}

impl PointSample {
    /// Fills `at_image` from `at_source` by the weight rule.
    pub fn transported(
        point: [GR; 3],
        at_source: BTreeMap<String, GR>,
        coeffs: &[WeightedCoefficient],
        g: &GroupElement,
    ) -> Result<Self, FamilyError> {
        let s = g.automorphy(&point[0]);
        if s.is_zero() {
            return Err(FamilyError::Pole(point[0].to_string()));
        }
        let mut at_image = BTreeMap::new();
        for w in coeffs {
            let v = at_source.get(w.name()).ok_or_else(|| FamilyError::MissingValue(w.name().to_string()))?;
            at_image.insert(w.name().to_string(), w.transport(v, &s));
        }
        Ok(Self { point, at_source, at_image })
    }
}

fn eval_field(field: &ThetaField, x: &[GR; 3], values: &BTreeMap<String, GR>) -> Result<Vec<GR>, FamilyError> {
    let mut point = Point::new();
    for (name, v) in TORUS_COORDS.iter().zip(x) {
        point.insert(Symbol::coordinate(name), v.clone());
    }
    let n = field.dim();
    let mut out = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let p = field.get(k, i, j);
                for s in p.symbols() {
                    if s.kind() == SymbolKind::Function && !point.contains_key(&s) {
                        let v = values.get(s.name()).filter(|_| !s.is_derived());
                        let v = v.ok_or_else(|| FamilyError::MissingValue(s.to_string()))?;
                        point.insert(s, v.clone());
                    }
                }
                out.push(p.eval(&point)?);
            }
        }
    }
    Ok(out)
}

/// Whether `(γ, λ)^*Θ = Θ` at every sample, comparing exact values.
///
/// The pullback is `(φ^*Θ)^k_{ij}(x) = (J⁻¹)^k_l Θ^l_{ab}(φ(x)) J^a_i J^b_j`.
/// `Θ(x)` uses the source values and `Θ(φ(x))` the image values, which must
/// follow the weight rule for every listed coefficient.
pub fn invariance_check(
    field: &ThetaField,
    coeffs: &[WeightedCoefficient],
    g: &GroupElement,
    samples: &[PointSample],
) -> Result<bool, FamilyError> {
    if field.dim() != 3 {
        return Err(FamilyError::Dimension(field.dim()));
    }
    let map = action_map(g);
    for sample in samples {
        let x = &sample.point;
        let s = map.factor(&x[0])?;
        for w in coeffs {
            let missing = || FamilyError::MissingValue(w.name().to_string());
            let src = sample.at_source.get(w.name()).ok_or_else(missing)?;
            let img = sample.at_image.get(w.name()).ok_or_else(missing)?;
            if w.transport(src, &s) != *img {
                return Err(FamilyError::Consistency(format!(
                    "{}: value {} at tau = {} requires {} at the image, got {}",
                    w.name(),
                    src,
                    x[0],
                    w.transport(src, &s),
                    img
                )));
            }
        }
        let y = map.apply(x)?;
        let j = map.jacobian(x)?;
        let jinv = inverse3(&j).expect("Jacobian is invertible away from poles");
        let here = eval_field(field, x, &sample.at_source)?;
        let there = eval_field(field, &y, &sample.at_image)?;
        let at = |v: &[GR], k: usize, i: usize, j: usize| v[(k * 3 + i) * 3 + j].clone();
        for (k, jinv_k) in jinv.iter().enumerate() {
            for i in 0..3 {
                for jj in i..3 {
                    let mut acc = GR::zero();
                    for (l, jkl) in jinv_k.iter().enumerate() {
                        if jkl.is_zero() {
                            continue;
                        }
                        for a in 0..3 {
                            for b in 0..3 {
                                let t = at(&there, l, a, b);
                                if t.is_zero() {
                                    continue;
                                }
                                acc += &(&(jkl * &t) * &(&j[a][i] * &j[b][jj]));
                            }
                        }
                    }
                    if acc != at(&here, k, i, jj) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// The three trace-free conditions `Σ_k Θ^k_{ik} = 0`, one per `i`.
pub fn trace_free_conditions(field: &ThetaField) -> Vec<DiffPoly> {
    crate::projective::divergence(field).components
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gr(re: i64, im: i64) -> GR {
        GR::from_ints(re, im)
    }

    #[test]
    fn torus_zero_is_flat_table() {
        assert!(torus3_at([0; 5]).is_flat_table());
    }

    #[test]
    fn torus_half_entries() {
        let c = torus3_symbolic();
        assert_eq!(c.gamma(0, 0, 1), &DiffPoly::param("C").scale(&GR::ratio(1, 2)));
        assert_eq!(c.gamma(0, 1, 0), c.gamma(0, 0, 1));
        let nonzero = (0..27).filter(|&x| !c.gamma(x / 9, (x / 3) % 3, x % 3).is_zero()).count();
        assert_eq!(nonzero, 17);
    }

    #[test]
    fn torus_n_range() {
        assert_eq!(torus_n_symbolic(3), Err(FamilyError::Range(3)));
        let c = torus_n_symbolic(4).unwrap();
        assert_eq!(c.restrict_to(&TORUS_COORDS).unwrap(), torus3_symbolic());
    }

    #[test]
    fn determinant_enforced() {
        assert!(GroupElement::new([1, 1, 0, 1].map(GR::from), [0; 4].map(GR::from)).is_ok());
        assert!(matches!(
            GroupElement::new([2, 0, 0, 1].map(GR::from), [0; 4].map(GR::from)),
            Err(FamilyError::Determinant(_))
        ));
    }

    #[test]
    fn identity_action() {
        let m = action_map(&GroupElement::identity());
        let x = [gr(1, 2), gr(3, 0), gr(0, -1)];
        assert_eq!(m.apply(&x).unwrap(), x);
        let j = m.jacobian(&x).unwrap();
        for (r, row) in j.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                assert_eq!(*v, GR::from((r == c) as i64));
            }
        }
    }

    #[test]
    fn unipotent_shift() {
        let g = GroupElement::new([1, 1, 0, 1].map(GR::from), [0; 4].map(GR::from)).unwrap();
        let m = action_map(&g);
        let x = [GR::i(), GR::zero(), GR::zero()];
        assert_eq!(m.apply(&x).unwrap(), [gr(1, 1), GR::zero(), GR::zero()]);
        assert_eq!(m.jacobian(&x).unwrap()[0][0], GR::from(1));
    }

    #[test]
    fn order_four_element() {
        let g = GroupElement::new([0, -1, 1, 0].map(GR::from), [0; 4].map(GR::from)).unwrap();
        let m = action_map(&g);
        let x = [GR::i(), GR::zero(), GR::zero()];
        assert_eq!(m.apply(&x).unwrap()[0], GR::i());
        assert_eq!(m.jacobian(&x).unwrap()[0][0], GR::from(-1));
        assert!(matches!(m.apply(&[GR::zero(), GR::zero(), GR::zero()]), Err(FamilyError::Pole(_))));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = [[gr(2, 0), gr(1, 1), gr(0, 0)], [gr(0, 3), gr(1, 0), gr(5, 0)], [gr(1, 0), gr(0, 0), gr(2, -1)]];
        let inv = inverse3(&m).unwrap();
        for (i, row) in m.iter().enumerate() {
            for j in 0..3 {
                let v = row.iter().zip(&inv).fold(GR::zero(), |acc, (a, r)| &acc + &(a * &r[j]));
                assert_eq!(v, GR::from((i == j) as i64));
            }
        }
    }

    #[test]
    fn inconsistent_values_rejected() {
        let g = GroupElement::new([0, -1, 1, 0].map(GR::from), [0; 4].map(GR::from)).unwrap();
        let coeffs = kuga_shimura_weights(false);
        let vals: BTreeMap<String, GR> = [("A".to_string(), GR::from(1)), ("B".to_string(), GR::from(2))].into();
        let sample = PointSample { point: [gr(0, 2), GR::zero(), GR::zero()], at_source: vals.clone(), at_image: vals };
        let r = invariance_check(&kuga_shimura_theta(false), &coeffs, &g, &[sample]);
        assert!(matches!(r, Err(FamilyError::Consistency(_))));
    }

    #[test]
    fn trace_free_conditions_match_variant() {
        assert!(trace_free_conditions(&kuga_shimura_theta(false)).iter().all(DiffPoly::is_zero));
        assert!(!trace_free_conditions(&kuga_shimura_theta(true)).iter().all(DiffPoly::is_zero));
    }
}
