//! Sparse polynomials over ℚ(i) in parameters, coordinates and formal
//! function symbols, kept in a canonical form.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{AlgebraError, GaussianRational, Symbol, SymbolKind};

/// A power product of symbols. Factors are sorted by symbol and carry
/// positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(s: Symbol) -> Self {
        Self(vec![(s, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent_of(&self, s: &Symbol) -> u32 {
        self.0.iter().find(|(t, _)| t == s).map_or(0, |(_, e)| *e)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Drops one power of the factor at `pos`.
    fn lowered(&self, pos: usize) -> Monomial {
        let mut v = self.0.clone();
        if v[pos].1 == 1 {
            v.remove(pos);
        } else {
            v[pos].1 -= 1;
        }
        Monomial(v)
    }
}

/// Lexicographic on factors; at equal symbols the larger exponent comes
/// first, and a proper prefix sorts after its extensions so constants end up
/// last in printed output.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        for ((sa, ea), (sb, eb)) in self.0.iter().zip(other.0.iter()) {
            match sa.cmp(sb) {
                Ordering::Equal => match eb.cmp(ea) {
                    Ordering::Equal => continue,
                    o => return o,
                },
                o => return o,
            }
        }
        other.0.len().cmp(&self.0.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (n, (s, e)) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Canonical sparse polynomial. No zero coefficients are stored, so two
/// polynomials are equal exactly when their term maps are.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, GaussianRational>,
}

pub type Bindings = BTreeMap<Symbol, DiffPoly>;
pub type Point = BTreeMap<Symbol, GaussianRational>;

impl DiffPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Self { terms }
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(GaussianRational::from(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::constant(GaussianRational::ratio(num, den))
    }

    pub fn var(s: Symbol) -> Self {
        Self::term(GaussianRational::one(), Monomial::var(s))
    }

    pub fn term(c: GaussianRational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn param(name: &str) -> Self {
        Self::var(Symbol::parameter(name))
    }

    pub fn coord(name: &str) -> Self {
        Self::var(Symbol::coordinate(name))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    /// The value if this polynomial has no symbols.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|(s, _)| s.clone())).collect()
    }

    pub fn mentions(&self, pred: impl Fn(&Symbol) -> bool) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|(s, _)| pred(s)))
    }

    /// Coefficient of the first term in canonical order.
    pub fn leading_coefficient(&self) -> Option<&GaussianRational> {
        self.terms.values().next()
    }

    /// Scaled so that the leading coefficient is one; zero stays zero.
    pub fn monic(&self) -> DiffPoly {
        match self.leading_coefficient().and_then(GaussianRational::inv) {
            Some(inv) => self.scale(&inv),
            None => self.clone(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn pow(&self, exp: u32) -> DiffPoly {
        let mut acc = DiffPoly::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    fn add_term(&mut self, m: Monomial, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Partial derivative with respect to a coordinate.
    ///
    /// Parameters and other coordinates are constants; a function symbol
    /// picks up one more derivative in `x` when it depends on `x`.
    pub fn diff(&self, x: &Symbol) -> Result<DiffPoly, AlgebraError> {
        if x.kind() != SymbolKind::Coordinate {
            return Err(AlgebraError::NotACoordinate(x.to_string()));
        }
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for (pos, (s, e)) in m.0.iter().enumerate() {
                let ds = match s.kind() {
                    SymbolKind::Parameter => continue,
                    SymbolKind::Coordinate if s == x => None,
                    SymbolKind::Coordinate => continue,
                    SymbolKind::Function => match s.differentiated(x.name()) {
                        Some(d) => Some(d),
                        None => continue,
                    },
                };
                let rest = m.lowered(pos);
                let mono = match ds {
                    None => rest,
                    Some(d) => rest.mul(&Monomial::var(d)),
                };
                out.add_term(mono, c * &GaussianRational::from(*e as i64));
            }
        }
        Ok(out)
    }

    /// Simultaneous substitution.
    ///
    /// A bound function symbol also rewrites its derivatives as derivatives
    /// of the replacement, unless the derivative is bound explicitly.
    pub fn subst(&self, bindings: &Bindings) -> Result<DiffPoly, AlgebraError> {
        for s in bindings.keys() {
            if s.is_derived() && !bindings.contains_key(&s.base()) {
                return Err(AlgebraError::DerivativeWithoutBase(s.to_string()));
            }
        }
        let mut cache: HashMap<Symbol, Option<DiffPoly>> = HashMap::new();
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let mut acc = DiffPoly::constant(c.clone());
            let mut kept = Monomial::one();
            for (s, e) in &m.0 {
                let repl = match cache.get(s) {
                    Some(r) => r.clone(),
                    None => {
                        let r = replacement(s, bindings)?;
                        cache.insert(s.clone(), r.clone());
                        r
                    }
                };
                match repl {
                    Some(p) => acc = &acc * &p.pow(*e),
                    None => kept = kept.mul(&Monomial(vec![(s.clone(), *e)])),
                }
            }
            if !kept.is_one() {
                acc = &acc * &DiffPoly::term(GaussianRational::one(), kept);
            }
            out = &out + &acc;
        }
        Ok(out)
    }

    /// Exact evaluation; every symbol (derivatives included) must be bound.
    pub fn eval(&self, point: &Point) -> Result<GaussianRational, AlgebraError> {
        let mut total = GaussianRational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (s, e) in &m.0 {
                let x = point.get(s).ok_or_else(|| AlgebraError::Unbound(s.to_string()))?;
                v *= &x.pow(*e);
            }
            total += &v;
        }
        Ok(total)
    }
}

fn replacement(s: &Symbol, bindings: &Bindings) -> Result<Option<DiffPoly>, AlgebraError> {
    if let Some(p) = bindings.get(s) {
        return Ok(Some(p.clone()));
    }
    if s.is_derived() {
        if let Some(p) = bindings.get(&s.base()) {
            let mut d = p.clone();
            for c in s.deriv_coords() {
                d = d.diff(&Symbol::coordinate(c))?;
            }
            return Ok(Some(d));
        }
    }
    Ok(None)
}

impl From<GaussianRational> for DiffPoly {
    fn from(c: GaussianRational) -> Self {
        Self::constant(c)
    }
}

impl From<Symbol> for DiffPoly {
    fn from(s: Symbol) -> Self {
        Self::var(s)
    }
}

impl<'a> Add<&'a DiffPoly> for &'a DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let (big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a DiffPoly> for &'a DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a DiffPoly> for &'a DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for DiffPoly {
            type Output = DiffPoly;
            fn $m(self, rhs: DiffPoly) -> DiffPoly {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl std::iter::Sum for DiffPoly {
    fn sum<I: Iterator<Item = DiffPoly>>(iter: I) -> DiffPoly {
        iter.fold(DiffPoly::zero(), |a, b| &a + &b)
    }
}

impl fmt::Display for DiffPoly {
    /// Output is accepted by the expression parser and parses back to the
    /// same polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            let (negative, body) = term_body(m, c);
            match (n, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            f.write_str(&body)?;
        }
        Ok(())
    }
}

fn term_body(m: &Monomial, c: &GaussianRational) -> (bool, String) {
    // Real or purely imaginary coefficients get their sign pulled out.
    let (negative, magnitude, imaginary) = if c.is_real() {
        (c.is_negative_real(), GaussianRational::real(num_traits::Signed::abs(c.re())), false)
    } else if num_traits::Zero::is_zero(c.re()) {
        (num_traits::Signed::is_negative(c.im()), GaussianRational::real(num_traits::Signed::abs(c.im())), true)
    } else {
        let body = if m.is_one() { c.to_string() } else { format!("({c})*{m}") };
        return (false, body);
    };
    let mut parts: Vec<String> = Vec::new();
    if !magnitude.is_one() || (m.is_one() && !imaginary) {
        parts.push(magnitude.to_string());
    }
    if imaginary {
        parts.push("i".into());
    }
    if !m.is_one() {
        parts.push(m.to_string());
    }
    (negative, parts.join("*"))
}
