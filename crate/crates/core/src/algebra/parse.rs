//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | factor
//! factor := atom ('^' uint)? ('/' posint)*
//! atom   := uint | 'i' | ident | dN '(' ident (',' coord)+ ')' | '(' expr ')'
//! ```
//!
//! `d(A, tau)` is the first derivative of the declared function `A` in
//! `tau`; the optional order suffix (`d2(A, tau, tau)`) must match the
//! number of coordinates listed.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{AlgebraError, DiffPoly, GaussianRational, Symbol, SymbolKind};

const MAX_EXPONENT: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("undeclared identifier `{name}` at byte {offset}")]
    Undeclared { name: String, offset: usize },
    #[error("invalid derivative at byte {offset}: {message}")]
    Derivative { offset: usize, message: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::Undeclared { offset, .. }
            | ParseError::Derivative { offset, .. } => *offset,
        }
    }

    fn syntax(offset: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax { offset, message: message.into() }
    }
}

/// Declared identifiers of one expression context.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    by_name: BTreeMap<String, Symbol>,
    coords: Vec<String>,
    params: Vec<String>,
    functions: Vec<String>,
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_')
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn declare(&mut self, name: &str, sym: Symbol) -> Result<(), AlgebraError> {
        if !is_identifier(name) || name == "i" {
            return Err(AlgebraError::BadIdentifier(name.to_string()));
        }
        if self.by_name.contains_key(name) {
            return Err(AlgebraError::Duplicate(name.to_string()));
        }
        self.by_name.insert(name.to_string(), sym);
        Ok(())
    }

    pub fn add_parameter(&mut self, name: &str) -> Result<Symbol, AlgebraError> {
        let s = Symbol::parameter(name);
        self.declare(name, s.clone())?;
        self.params.push(name.to_string());
        Ok(s)
    }

    pub fn add_coordinate(&mut self, name: &str) -> Result<Symbol, AlgebraError> {
        let s = Symbol::coordinate(name);
        self.declare(name, s.clone())?;
        self.coords.push(name.to_string());
        Ok(s)
    }

    /// Declares a function; its dependencies must be declared coordinates.
    pub fn add_function(&mut self, name: &str, depends_on: &[&str]) -> Result<Symbol, AlgebraError> {
        for d in depends_on {
            if !self.coords.iter().any(|c| c == d) {
                return Err(AlgebraError::NotACoordinate((*d).to_string()));
            }
        }
        let s = Symbol::function(name, depends_on);
        self.declare(name, s.clone())?;
        self.functions.push(name.to_string());
        Ok(s)
    }

    pub fn lookup(&self, name: &str) -> Option<&Symbol> {
        self.by_name.get(name)
    }

    pub fn coordinates(&self) -> Vec<Symbol> {
        self.coords.iter().map(|c| Symbol::coordinate(c)).collect()
    }

    pub fn coordinate_names(&self) -> &[String] {
        &self.coords
    }

    pub fn parameter_names(&self) -> &[String] {
        &self.params
    }

    pub fn function_symbols(&self) -> Vec<Symbol> {
        self.functions.iter().map(|f| self.by_name[f].clone()).collect()
    }

    /// Resolves any symbol printed by `Display for Symbol`, including
    /// derivatives such as `d(A, tau)`.
    pub fn resolve(&self, text: &str) -> Result<Symbol, ParseError> {
        let p = parse_expr(text, self)?;
        let mut terms = p.terms();
        match (terms.next(), terms.next()) {
            (Some((m, c)), None) if c.is_one() && m.factors().len() == 1 && m.factors()[0].1 == 1 => {
                Ok(m.factors()[0].0.clone())
            }
            _ => Err(ParseError::syntax(0, format!("`{text}` is not a single symbol"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(pos, ch)) = it.peek() {
        if ch.is_whitespace() {
            it.next();
        } else if ch.is_ascii_digit() {
            let mut end = pos;
            while let Some(&(p, c)) = it.peek() {
                if c.is_ascii_digit() {
                    end = p + c.len_utf8();
                    it.next();
                } else {
                    break;
                }
            }
            let n: BigInt = text[pos..end].parse().expect("digit run");
            out.push((pos, Tok::Num(n)));
        } else if ch.is_alphabetic() || ch == '_' {
            let mut end = pos;
            while let Some(&(p, c)) = it.peek() {
                if c.is_alphanumeric() || c == '_' {
                    end = p + c.len_utf8();
                    it.next();
                } else {
                    break;
                }
            }
            out.push((pos, Tok::Ident(text[pos..end].to_string())));
        } else if "+-*/^(),".contains(ch) {
            out.push((pos, Tok::Op(ch)));
            it.next();
        } else {
            return Err(ParseError::syntax(pos, format!("unexpected character `{ch}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    table: &'a SymbolTable,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, op: char) -> Result<(), ParseError> {
        if self.eat_op(op) {
            Ok(())
        } else {
            Err(ParseError::syntax(self.offset(), format!("expected `{op}`")))
        }
    }

    fn expr(&mut self) -> Result<DiffPoly, ParseError> {
        let negate = if self.eat_op('-') {
            true
        } else {
            self.eat_op('+');
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = -acc;
        }
        loop {
            if self.eat_op('+') {
                acc = &acc + &self.term()?;
            } else if self.eat_op('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<DiffPoly, ParseError> {
        let mut acc = self.unary()?;
        while self.eat_op('*') {
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<DiffPoly, ParseError> {
        if self.eat_op('-') {
            return Ok(-self.unary()?);
        }
        self.factor()
    }

    fn uint(&mut self, what: &str) -> Result<(usize, BigInt), ParseError> {
        let off = self.offset();
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok((off, n))
            }
            _ => Err(ParseError::syntax(off, format!("expected {what}"))),
        }
    }

    fn factor(&mut self) -> Result<DiffPoly, ParseError> {
        let mut base = self.atom()?;
        if self.eat_op('^') {
            let (off, e) = self.uint("a non-negative integer exponent")?;
            let e = u32::try_from(&e)
                .ok()
                .filter(|e| *e <= MAX_EXPONENT)
                .ok_or_else(|| ParseError::syntax(off, format!("exponent exceeds {MAX_EXPONENT}")))?;
            base = base.pow(e);
        }
        while self.eat_op('/') {
            let (off, d) = self.uint("a positive integer divisor")?;
            if d.is_zero() {
                return Err(ParseError::syntax(off, "division by zero"));
            }
            let inv = GaussianRational::real(BigRational::new(BigInt::one(), d));
            base = base.scale(&inv);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<DiffPoly, ParseError> {
        let off = self.offset();
        let tok = self.peek().cloned().ok_or_else(|| ParseError::syntax(off, "unexpected end of input"))?;
        self.pos += 1;
        match tok {
            Tok::Num(n) => Ok(DiffPoly::constant(GaussianRational::real(BigRational::from_integer(n)))),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Tok::Op(c) => Err(ParseError::syntax(off, format!("unexpected `{c}`"))),
            Tok::Ident(name) => {
                if name == "i" {
                    return Ok(DiffPoly::constant(GaussianRational::i()));
                }
                if let Some(order) = derivative_marker(&name) {
                    if self.peek() == Some(&Tok::Op('(')) {
                        return self.derivative(off, order);
                    }
                }
                match self.table.lookup(&name) {
                    Some(s) => Ok(DiffPoly::var(s.clone())),
                    None => Err(ParseError::Undeclared { name, offset: off }),
                }
            }
        }
    }

    fn ident(&mut self) -> Result<(usize, String), ParseError> {
        let off = self.offset();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok((off, s))
            }
            _ => Err(ParseError::syntax(off, "expected identifier")),
        }
    }

    fn derivative(&mut self, off: usize, order: Option<u32>) -> Result<DiffPoly, ParseError> {
        self.expect_op('(')?;
        let (foff, fname) = self.ident()?;
        let f =
            self.table.lookup(&fname).ok_or_else(|| ParseError::Undeclared { name: fname.clone(), offset: foff })?;
        if f.kind() != SymbolKind::Function {
            return Err(ParseError::Derivative {
                offset: foff,
                message: format!("`{fname}` is not a function symbol"),
            });
        }
        let mut sym = f.clone();
        let mut count = 0u32;
        while self.eat_op(',') {
            let (coff, cname) = self.ident()?;
            match self.table.lookup(&cname) {
                Some(c) if c.kind() == SymbolKind::Coordinate => {}
                Some(_) => {
                    return Err(ParseError::Derivative {
                        offset: coff,
                        message: format!("`{cname}` is not a coordinate"),
                    })
                }
                None => return Err(ParseError::Undeclared { name: cname, offset: coff }),
            }
            // A function not depending on the coordinate has zero derivative.
            match sym.differentiated(&cname) {
                Some(d) => sym = d,
                None => {
                    self.finish_derivative(off, order, count + 1)?;
                    return Ok(DiffPoly::zero());
                }
            }
            count += 1;
        }
        self.finish_derivative(off, order, count)?;
        Ok(DiffPoly::var(sym))
    }

    fn finish_derivative(&mut self, off: usize, order: Option<u32>, seen: u32) -> Result<(), ParseError> {
        // Skip any remaining coordinates after an early zero.
        while self.eat_op(',') {
            self.ident()?;
        }
        self.expect_op(')')?;
        if seen == 0 {
            return Err(ParseError::Derivative { offset: off, message: "no coordinates given".into() });
        }
        match order {
            Some(k) if k != seen => Err(ParseError::Derivative {
                offset: off,
                message: format!("order {k} does not match {seen} listed coordinates"),
            }),
            _ => Ok(()),
        }
    }
}

/// `d` -> Some(None), `d3` -> Some(Some(3)), anything else -> None.
fn derivative_marker(name: &str) -> Option<Option<u32>> {
    let rest = name.strip_prefix('d')?;
    if rest.is_empty() {
        return Some(None);
    }
    if rest.chars().all(|c| c.is_ascii_digit()) {
        return rest.parse().ok().map(Some);
    }
    None
}

/// Parses `text` against the declared identifiers of `table`.
pub fn parse_expr(text: &str, table: &SymbolTable) -> Result<DiffPoly, ParseError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(ParseError::syntax(0, "empty expression"));
    }
    let mut p = Parser { toks, pos: 0, end: text.len(), table };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(ParseError::syntax(p.offset(), "unexpected trailing input"));
    }
    Ok(e)
}

/// Parses a symbol-free constant such as `3/4 - 2*i`.
pub fn parse_constant(text: &str) -> Result<GaussianRational, ParseError> {
    let p = parse_expr(text, &SymbolTable::new())?;
    Ok(p.as_constant().expect("no symbols are declared"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> SymbolTable {
        let mut t = SymbolTable::new();
        for c in ["tau", "z1", "z2"] {
            t.add_coordinate(c).unwrap();
        }
        for p in ["C", "D"] {
            t.add_parameter(p).unwrap();
        }
        t.add_function("A", &["tau"]).unwrap();
        t
    }

    #[test]
    fn expands_square_over_eight() {
        let t = table();
        let p = parse_expr("(C - D)^2 / 8", &t).unwrap();
        assert_eq!(p.to_string(), "1/8*C^2 - 1/4*C*D + 1/8*D^2");
    }

    #[test]
    fn derivative_marker_parses() {
        let t = table();
        let p = parse_expr("d(A, tau) * z1", &t).unwrap();
        let a1 = Symbol::function("A", &["tau"]).differentiated("tau").unwrap();
        assert_eq!(p, &DiffPoly::var(a1) * &DiffPoly::coord("z1"));
        let p2 = parse_expr("d2(A, tau, tau)", &t).unwrap();
        assert_eq!(p2.to_string(), "d2(A, tau, tau)");
        // A depends on tau only.
        assert!(parse_expr("d(A, z1)", &t).unwrap().is_zero());
    }

    #[test]
    fn gaussian_constant() {
        let t = table();
        let p = parse_expr("3/4 + 1/4*i", &t).unwrap();
        let expect = &GaussianRational::ratio(3, 4) + &(&GaussianRational::ratio(1, 4) * &GaussianRational::i());
        assert_eq!(p.as_constant().unwrap(), expect);
    }

    #[test]
    fn errors_carry_offsets() {
        let t = table();
        assert_eq!(parse_expr("C + Q", &t).unwrap_err(), ParseError::Undeclared { name: "Q".into(), offset: 4 });
        assert_eq!(parse_expr("C + ", &t).unwrap_err().offset(), 4);
        assert_eq!(parse_expr("C $ D", &t).unwrap_err().offset(), 2);
        assert!(matches!(parse_expr("C / 0", &t), Err(ParseError::Syntax { offset: 4, .. })));
        assert!(matches!(parse_expr("C / D", &t), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_expr("d(C, tau)", &t), Err(ParseError::Derivative { .. })));
        assert!(matches!(parse_expr("d2(A, tau)", &t), Err(ParseError::Derivative { .. })));
        assert!(matches!(parse_expr("(C", &t), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_expr("", &t), Err(ParseError::Syntax { offset: 0, .. })));
    }

    #[test]
    fn unary_minus_and_precedence() {
        let t = table();
        assert_eq!(parse_expr("-C*D + 2*-C", &t).unwrap().to_string(), "-C*D - 2*C");
        assert_eq!(parse_expr("2^3/4", &t).unwrap(), DiffPoly::integer(2));
    }

    #[test]
    fn table_rejects_bad_declarations() {
        let mut t = table();
        assert!(matches!(t.add_parameter("C"), Err(AlgebraError::Duplicate(_))));
        assert!(matches!(t.add_parameter("i"), Err(AlgebraError::BadIdentifier(_))));
        assert!(matches!(t.add_function("F", &["w"]), Err(AlgebraError::NotACoordinate(_))));
    }

    #[test]
    fn resolve_symbols() {
        let t = table();
        let s = t.resolve("d(A, tau)").unwrap();
        assert_eq!(s.deriv_order(), 1);
        assert!(t.resolve("C + D").is_err());
    }
}
