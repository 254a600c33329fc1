//! Line-oriented connection files.
//!
//! ```text
//! # comment
//! title = torus family
//! tag = torus3
//! dim = 3
//! coords = tau, z1, z2
//! params = A, B, C, D, E
//! functions = F(tau)
//! [gamma]
//! z1.tau.tau = A
//! tau.tau.z1 = C/2
//! ```
//!
//! Header keys may appear in any order before `[gamma]`; `dim` is optional
//! and must match the coordinate count when given. Each gamma key names
//! `k.i.j` for `Γ^k_{ij}`; the mirror `k.j.i` is implied.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::algebra::{is_identifier, parse_expr, DiffPoly, ParseError, SymbolKind, SymbolTable};
use crate::connection::{Connection, ConnectionError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: {source}")]
    Expr { line: usize, column: usize, source: ParseError },
    #[error("line {line}: `{key}` conflicts with line {previous}")]
    Conflict { line: usize, key: String, previous: usize },
    #[error(transparent)]
    Connection(#[from] ConnectionError),
}

impl SpecError {
    pub fn line(&self) -> Option<usize> {
        match self {
            SpecError::Syntax { line, .. } | SpecError::Expr { line, .. } | SpecError::Conflict { line, .. } => {
                Some(*line)
            }
            SpecError::Connection(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaEntry {
    pub index: [usize; 3],
    pub poly: DiffPoly,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ConnectionSpec {
    pub title: Option<String>,
    pub tag: Option<String>,
    pub coords: Vec<String>,
    pub params: Vec<String>,
    pub functions: Vec<(String, Vec<String>)>,
    pub gamma: Vec<GammaEntry>,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> SpecError {
    SpecError::Syntax { line, column, message: message.into() }
}

fn column_of(raw: &str, part: &str) -> usize {
    part.as_ptr() as usize - raw.as_ptr() as usize + 1
}

/// Splits `a, b, c` into trimmed, non-empty names with their columns.
fn names<'a>(raw: &'a str, list: &'a str, line: usize) -> Result<Vec<(&'a str, usize)>, SpecError> {
    if list.trim().is_empty() {
        return Ok(Vec::new());
    }
    list.split(',')
        .map(|piece| {
            let name = piece.trim();
            let col = column_of(raw, piece) + (piece.len() - piece.trim_start().len());
            if is_identifier(name) {
                Ok((name, col))
            } else {
                Err(syntax(line, col, format!("`{name}` is not an identifier")))
            }
        })
        .collect()
}

/// Splits `F(tau), G(tau, z1)` at top-level commas.
fn function_decls(raw: &str, list: &str, line: usize) -> Result<Vec<(String, Vec<String>)>, SpecError> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let bytes = list.as_bytes();
    let mut pieces = Vec::new();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth = depth.saturating_sub(1),
            b',' if depth == 0 => {
                pieces.push(&list[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    pieces.push(&list[start..]);
    for piece in pieces.into_iter().filter(|p| !p.trim().is_empty() || list.trim().is_empty()) {
        let text = piece.trim();
        if text.is_empty() {
            continue;
        }
        let col = column_of(raw, piece);
        let (name, rest) = text
            .split_once('(')
            .ok_or_else(|| syntax(line, col, format!("expected `name(coords)`, found `{text}`")))?;
        let deps = rest.strip_suffix(')').ok_or_else(|| syntax(line, col, format!("missing `)` in `{text}`")))?;
        let name = name.trim();
        if !is_identifier(name) {
            return Err(syntax(line, col, format!("`{name}` is not an identifier")));
        }
        let deps = names(raw, deps, line)?.into_iter().map(|(d, _)| d.to_string()).collect();
        out.push((name.to_string(), deps));
    }
    Ok(out)
}

impl ConnectionSpec {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let mut spec = ConnectionSpec::default();
        let mut dim: Option<(usize, usize)> = None;
        let mut table: Option<SymbolTable> = None;
        let mut seen_keys: BTreeMap<String, usize> = BTreeMap::new();
        let mut by_slot: BTreeMap<[usize; 3], (DiffPoly, usize)> = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            if content.trim() == "[gamma]" {
                if table.is_some() {
                    return Err(syntax(line, 1, "duplicate [gamma] section"));
                }
                if spec.coords.is_empty() {
                    return Err(syntax(line, 1, "`coords` must be declared before [gamma]"));
                }
                if let Some((d, dline)) = dim {
                    if d != spec.coords.len() {
                        return Err(syntax(
                            dline,
                            1,
                            format!("dim = {d} but {} coordinates are declared", spec.coords.len()),
                        ));
                    }
                }
                table = Some(spec.symbol_table(line)?);
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                let col = column_of(raw, content.trim_start());
                return Err(syntax(line, col, "expected `key = value`"));
            };
            let key_trim = key.trim();
            let key_col = column_of(raw, key) + (key.len() - key.trim_start().len());
            match &table {
                None => {
                    let value_trim = value.trim();
                    match key_trim {
                        "title" => spec.title = Some(value_trim.to_string()),
                        "tag" => spec.tag = Some(value_trim.to_string()),
                        "dim" => {
                            let d = value_trim
                                .parse::<usize>()
                                .map_err(|_| syntax(line, column_of(raw, value), "dim must be a positive integer"))?;
                            dim = Some((d, line));
                        }
                        "coords" => {
                            spec.coords = names(raw, value, line)?.into_iter().map(|(s, _)| s.to_string()).collect()
                        }
                        "params" => {
                            spec.params = names(raw, value, line)?.into_iter().map(|(s, _)| s.to_string()).collect()
                        }
                        "functions" => spec.functions = function_decls(raw, value, line)?,
                        other => return Err(syntax(line, key_col, format!("unknown header key `{other}`"))),
                    }
                }
                Some(table) => {
                    let parts: Vec<&str> = key_trim.split('.').map(str::trim).collect();
                    if parts.len() != 3 {
                        return Err(syntax(line, key_col, format!("gamma key `{key_trim}` must have the form k.i.j")));
                    }
                    let mut index = [0usize; 3];
                    for (slot, part) in index.iter_mut().zip(&parts) {
                        *slot = spec.coords.iter().position(|c| c == part).ok_or_else(|| {
                            syntax(line, key_col, format!("`{part}` in `{key_trim}` is not a declared coordinate"))
                        })?;
                    }
                    if let Some(prev) = seen_keys.insert(key_trim.to_string(), line) {
                        return Err(SpecError::Conflict { line, key: key_trim.to_string(), previous: prev });
                    }
                    let value_col = column_of(raw, value);
                    let poly = parse_expr(value, table).map_err(|source| SpecError::Expr {
                        line,
                        column: value_col + source.offset(),
                        source,
                    })?;
                    let [k, i, j] = index;
                    let canon = [k, i.min(j), i.max(j)];
                    if let Some((other, prev)) = by_slot.get(&canon) {
                        if *other != poly {
                            return Err(SpecError::Conflict { line, key: key_trim.to_string(), previous: *prev });
                        }
                    }
                    by_slot.insert(canon, (poly.clone(), line));
                    spec.gamma.push(GammaEntry { index, poly, line });
                }
            }
        }
        if table.is_none() {
            if spec.coords.is_empty() {
                return Err(syntax(text.lines().count().max(1), 1, "missing `coords`"));
            }
            // A header-only file describes the flat connection.
            spec.symbol_table(text.lines().count().max(1))?;
        }
        Ok(spec)
    }

    fn symbol_table(&self, line: usize) -> Result<SymbolTable, SpecError> {
        let mut t = SymbolTable::new();
        let err = |e: crate::algebra::AlgebraError| syntax(line, 1, e.to_string());
        for c in &self.coords {
            t.add_coordinate(c).map_err(err)?;
        }
        for p in &self.params {
            t.add_parameter(p).map_err(err)?;
        }
        for (f, deps) in &self.functions {
            let deps: Vec<&str> = deps.iter().map(String::as_str).collect();
            t.add_function(f, &deps).map_err(err)?;
        }
        Ok(t)
    }

    pub fn to_connection(&self) -> Result<Connection, SpecError> {
        let coords: Vec<&str> = self.coords.iter().map(String::as_str).collect();
        Ok(Connection::from_table(&coords, self.gamma.iter().map(|e| (e.index, e.poly.clone())))?)
    }

    /// Describes `c` with one gamma line per nonzero `Γ^k_{ij}`, `i <= j`.
    pub fn from_connection(c: &Connection, title: Option<&str>, tag: Option<&str>) -> Self {
        let n = c.dim();
        let mut params = Vec::new();
        let mut functions: Vec<(String, Vec<String>)> = Vec::new();
        let mut gamma = Vec::new();
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let p = c.gamma(k, i, j);
                    if p.is_zero() {
                        continue;
                    }
                    for s in p.symbols() {
                        match s.kind() {
                            SymbolKind::Parameter if !params.iter().any(|x| x == s.name()) => {
                                params.push(s.name().to_string())
                            }
                            SymbolKind::Function if !functions.iter().any(|(f, _)| f == s.name()) => {
                                functions.push((s.name().to_string(), s.depends_on().map(str::to_string).collect()))
                            }
                            _ => {}
                        }
                    }
                    gamma.push(GammaEntry { index: [k, i, j], poly: p.clone(), line: 0 });
                }
            }
        }
        params.sort();
        functions.sort();
        ConnectionSpec {
            title: title.map(str::to_string),
            tag: tag.map(str::to_string),
            coords: c.coord_names(),
            params,
            functions,
            gamma,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(t) = &self.title {
            let _ = writeln!(out, "title = {t}");
        }
        if let Some(t) = &self.tag {
            let _ = writeln!(out, "tag = {t}");
        }
        let _ = writeln!(out, "dim = {}", self.dim());
        let _ = writeln!(out, "coords = {}", self.coords.join(", "));
        if !self.params.is_empty() {
            let _ = writeln!(out, "params = {}", self.params.join(", "));
        }
        if !self.functions.is_empty() {
            let fs: Vec<String> = self.functions.iter().map(|(f, d)| format!("{f}({})", d.join(", "))).collect();
            let _ = writeln!(out, "functions = {}", fs.join(", "));
        }
        out.push_str("[gamma]\n");
        for e in &self.gamma {
            let [k, i, j] = e.index;
            let _ = writeln!(out, "{}.{}.{} = {}", self.coords[k], self.coords[i], self.coords[j], e.poly);
        }
        out
    }
}
