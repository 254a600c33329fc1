use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use projconn_core::families::{kuga_shimura, torus3_symbolic, torus_n_symbolic};
use projconn_core::{
    parse_constant, Bindings, Connection, ConnectionSpec, DiffPoly, GaussianRational, Symbol, SymbolKind,
};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Torus3,
    #[value(name = "torus_n", alias = "torus-n")]
    TorusN,
    #[value(name = "kuga-shimura", alias = "kuga_shimura")]
    KugaShimura,
}

#[derive(Args, Debug, Clone)]
pub struct FamilyOpts {
    /// Dimension for torus_n.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Include the C(tau) trace part in the Kuga-Shimura family.
    #[arg(long)]
    pub with_trace: bool,
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Connection file.
    #[arg(value_name = "FILE", required_unless_present = "family")]
    pub spec: Option<PathBuf>,
    /// Use a built-in family instead of a file.
    #[arg(long, value_enum, conflicts_with = "spec")]
    pub family: Option<FamilyName>,
    #[command(flatten)]
    pub family_opts: FamilyOpts,
    /// Parameter values, e.g. `A=1,B=1/2,C=2*i`.
    #[arg(long)]
    pub set: Option<String>,
}

/// A resolved connection and the bytes that identify it.
pub struct Loaded {
    pub connection: Connection,
    pub digest_input: Vec<u8>,
}

pub fn build_family(name: FamilyName, opts: &FamilyOpts) -> Result<Connection, CliError> {
    match name {
        FamilyName::Torus3 => Ok(torus3_symbolic()),
        FamilyName::TorusN => torus_n_symbolic(opts.n).map_err(CliError::from_display),
        FamilyName::KugaShimura => Ok(kuga_shimura(opts.with_trace)),
    }
}

pub fn family_label(name: FamilyName, opts: &FamilyOpts) -> String {
    match name {
        FamilyName::Torus3 => "family torus3".into(),
        FamilyName::TorusN => format!("family torus_n n={}", opts.n),
        FamilyName::KugaShimura => format!("family kuga-shimura with_trace={}", opts.with_trace),
    }
}

pub fn read_spec(path: &Path) -> Result<(Connection, Vec<u8>), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::new(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::new(format!("{}: not UTF-8: {e}", path.display())))?;
    let spec = ConnectionSpec::parse(text).map_err(|e| CliError::new(format!("{}: {e}", path.display())))?;
    let c = spec.to_connection().map_err(|e| CliError::new(format!("{}: {e}", path.display())))?;
    Ok((c, bytes))
}

/// Parses `NAME=value` pairs separated by commas.
pub fn parse_assignments(text: &str) -> Result<Vec<(String, GaussianRational)>, CliError> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (name, value) = pair
                .split_once('=')
                .ok_or_else(|| CliError::new(format!("expected NAME=value, found `{}`", pair.trim())))?;
            let v =
                parse_constant(value.trim()).map_err(|e| CliError::new(format!("value `{}`: {e}", value.trim())))?;
            Ok((name.trim().to_string(), v))
        })
        .collect()
}

/// Binds each name to whichever parameter or function of `c` carries it.
pub fn bindings_for(c: &Connection, assignments: &[(String, GaussianRational)]) -> Result<Bindings, CliError> {
    let n = c.dim();
    let mut symbols = std::collections::BTreeSet::new();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                symbols.extend(c.gamma(k, i, j).symbols().into_iter().map(|s| s.base()));
            }
        }
    }
    let mut out = Bindings::new();
    for (name, v) in assignments {
        let sym: Symbol = symbols
            .iter()
            .find(|s| s.name() == name && s.kind() != SymbolKind::Coordinate)
            .cloned()
            .ok_or_else(|| CliError::new(format!("`{name}` is not a parameter or function of this connection")))?;
        out.insert(sym, DiffPoly::constant(v.clone()));
    }
    Ok(out)
}

pub fn apply_set(c: &Connection, set: Option<&str>) -> Result<Connection, CliError> {
    match set {
        None => Ok(c.clone()),
        Some(text) => {
            let b = bindings_for(c, &parse_assignments(text)?)?;
            c.subst(&b).map_err(CliError::from_display)
        }
    }
}

impl Input {
    pub fn load(&self) -> Result<Loaded, CliError> {
        let (base, mut digest_input) = match (&self.spec, self.family) {
            (Some(path), _) => read_spec(path)?,
            (None, Some(name)) => {
                (build_family(name, &self.family_opts)?, family_label(name, &self.family_opts).into_bytes())
            }
            (None, None) => return Err(CliError::new("no connection given")),
        };
        if let Some(set) = &self.set {
            digest_input.extend_from_slice(b"\0set ");
            digest_input.extend_from_slice(set.as_bytes());
        }
        Ok(Loaded { connection: apply_set(&base, self.set.as_deref())?, digest_input })
    }
}
