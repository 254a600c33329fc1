//! `projconn` command dispatch.
//!
//! [`run`] parses arguments, executes one subcommand and returns the exit
//! code with the text for stdout and stderr. Input problems exit with 2;
//! negative verdicts exit with 1 only under `--strict`.

mod input;

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use projconn_core::families::{invariance_check, kuga_shimura_theta, kuga_shimura_weights, PointSample};
use projconn_core::geodesic::{integrate, unparametrized_match};
use projconn_core::projective::{flatness_conditions, projective_equiv, volume_normalize};
use projconn_core::{
    parse_constant, Connection, ConnectionSpec, DiffPoly, GaussianRational, GroupElement, NumericConnection, OneForm,
    Point, Tensor,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use input::{apply_set, build_family, family_label, parse_assignments, read_spec, FamilyName, FamilyOpts, Input};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub struct CliError {
    message: String,
}

impl CliError {
    pub fn new(message: impl Into<String>) -> Self {
        Self { message: message.into() }
    }

    pub fn from_display(e: impl Display) -> Self {
        Self::new(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Settings {
    pub color: bool,
}

impl Settings {
    /// ANSI colour unless `PROJCONN_COLOR=0` or stdout is not a terminal.
    pub fn from_env() -> Self {
        use std::io::IsTerminal;
        let disabled = std::env::var("PROJCONN_COLOR").is_ok_and(|v| v == "0");
        Self { color: !disabled && std::io::stdout().is_terminal() }
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "projconn", version, about = "Exact curvature and projective-structure calculator")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Exit with code 1 when the verdict is negative.
    #[arg(long, global = true)]
    strict: bool,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Curvature tensor R^l_{ijk}.
    Curvature(Input),
    /// Ricci tensor and the trace tensor TrR.
    Ricci(Input),
    /// Weyl projective tensor (dimension 3).
    Weyl(Input),
    /// Whether the Weyl projective tensor vanishes.
    Flat(Input),
    /// Projective equivalence of two connection files.
    Equiv {
        first: PathBuf,
        second: PathBuf,
        /// Parameter values applied to both connections.
        #[arg(long)]
        set: Option<String>,
    },
    /// Projectively equivalent connection with parallel coordinate volume.
    Normalize(Input),
    /// Polynomial conditions for projective flatness.
    Conditions {
        #[command(flatten)]
        input: Input,
        /// Assignments to test, e.g. `C=1,D=1;C=1,D=2`.
        #[arg(long)]
        sweep: Option<String>,
    },
    /// Print a built-in family as a connection file.
    Family {
        #[arg(value_enum)]
        name: FamilyName,
        #[command(flatten)]
        opts: FamilyOpts,
        #[arg(long)]
        set: Option<String>,
    },
    /// Check invariance of the Kuga-Shimura field under one group element.
    PullbackCheck {
        /// a,b,c,d with ad - bc = 1.
        #[arg(long)]
        gamma: String,
        /// m,n,k,l.
        #[arg(long, default_value = "0,0,0,0")]
        lambda: String,
        #[arg(long)]
        with_trace: bool,
        /// Coefficient values at tau, e.g. `A=1,B=2,C=1/2`; random when absent.
        #[arg(long)]
        values: Option<String>,
        /// Points `tau,z1,z2;...`; random when absent.
        #[arg(long)]
        points: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random points.
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Integrate a geodesic of a constant-coefficient connection.
    Geodesic {
        #[command(flatten)]
        input: Input,
        /// Initial position, comma separated; zero when absent.
        #[arg(long)]
        x0: Option<String>,
        /// Initial velocity, comma separated.
        #[arg(long)]
        v0: String,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 300)]
        count: usize,
        /// Second connection file whose trace is compared.
        #[arg(long)]
        against: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write the sampled path as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

struct Report {
    digest_input: Vec<u8>,
    result: Map<String, Value>,
    lines: Vec<String>,
    negative: bool,
}

impl Report {
    fn new(digest_input: Vec<u8>) -> Self {
        Self { digest_input, result: Map::new(), lines: Vec::new(), negative: false }
    }

    fn put(&mut self, key: &str, value: Value) {
        self.result.insert(key.to_string(), value);
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }
}

fn verdict(b: bool, settings: &Settings) -> String {
    match (settings.color, b) {
        (false, _) => b.to_string(),
        (true, true) => "\x1b[32mtrue\x1b[0m".into(),
        (true, false) => "\x1b[31mfalse\x1b[0m".into(),
    }
}

fn tensor_lines(report: &mut Report, label: &str, t: &Tensor, coords: &[String]) {
    let nonzero: Vec<_> = t.indexed().filter(|(_, p)| !p.is_zero()).collect();
    if nonzero.is_empty() {
        report.line(format!("{label}: zero tensor"));
        return;
    }
    report.line(format!("{label}: {} nonzero components", nonzero.len()));
    for (idx, p) in nonzero {
        let key: Vec<&str> = idx.iter().map(|&i| coords[i].as_str()).collect();
        report.line(format!("  {} = {p}", key.join(".")));
    }
}

fn one_form_lines(report: &mut Report, label: &str, f: &OneForm, coords: &[String]) {
    if f.is_zero() {
        report.line(format!("{label}: 0"));
        return;
    }
    report.line(format!("{label}:"));
    for (c, p) in coords.iter().zip(&f.components) {
        if !p.is_zero() {
            report.line(format!("  theta_{c} = {p}"));
        }
    }
}

fn err(e: impl Display) -> CliError {
    CliError::from_display(e)
}

fn parse_constants(text: &str, what: &str) -> Result<Vec<GaussianRational>, CliError> {
    text.split(',')
        .map(|s| parse_constant(s.trim()).map_err(|e| CliError::new(format!("{what} entry `{}`: {e}", s.trim()))))
        .collect()
}

fn parse_four(text: &str, what: &str) -> Result<[GaussianRational; 4], CliError> {
    let v = parse_constants(text, what)?;
    v.try_into().map_err(|v: Vec<_>| CliError::new(format!("{what} needs 4 entries, got {}", v.len())))
}

fn parse_vector(text: &str, dim: usize, what: &str) -> Result<Vec<Complex64>, CliError> {
    let out: Vec<Complex64> = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            if let Ok(x) = s.parse::<f64>() {
                return Ok(Complex64::new(x, 0.0));
            }
            let (re, im) =
                parse_constant(s).map_err(|e| CliError::new(format!("{what} entry `{s}`: {e}")))?.to_f64_pair();
            Ok(Complex64::new(re, im))
        })
        .collect::<Result<_, CliError>>()?;
    if out.len() != dim {
        return Err(CliError::new(format!("{what} has {} entries, dimension is {dim}", out.len())));
    }
    Ok(out)
}

fn execute(command: &Command, settings: &Settings) -> Result<Report, CliError> {
    match command {
        Command::Curvature(input) => {
            let l = input.load()?;
            let coords = l.connection.coord_names();
            let r = l.connection.curvature().map_err(err)?;
            let mut rep = Report::new(l.digest_input);
            tensor_lines(&mut rep, "curvature R^l_{ijk} (l.i.j.k)", &r, &coords);
            rep.put("zero", json!(r.is_zero()));
            rep.put("curvature", r.to_json(&coords));
            Ok(rep)
        }
        Command::Ricci(input) => {
            let l = input.load()?;
            let coords = l.connection.coord_names();
            let ric = l.connection.ricci().map_err(err)?;
            let tr = l.connection.trace_r().map_err(err)?;
            let mut rep = Report::new(l.digest_input);
            tensor_lines(&mut rep, "ricci (j.k)", &ric, &coords);
            tensor_lines(&mut rep, "trace TrR (i.j)", &tr, &coords);
            rep.line(format!("equiaffine: {}", verdict(tr.is_zero(), settings)));
            rep.put("ricci", ric.to_json(&coords));
            rep.put("trace_r", tr.to_json(&coords));
            rep.put("equiaffine", json!(tr.is_zero()));
            rep.negative = !tr.is_zero();
            Ok(rep)
        }
        Command::Weyl(input) => {
            let l = input.load()?;
            let coords = l.connection.coord_names();
            let w = l.connection.weyl3().map_err(err)?;
            let mut rep = Report::new(l.digest_input);
            tensor_lines(&mut rep, "weyl W^l_{ijk} (l.i.j.k)", &w, &coords);
            rep.put("zero", json!(w.is_zero()));
            rep.put("weyl", w.to_json(&coords));
            Ok(rep)
        }
        Command::Flat(input) => {
            let l = input.load()?;
            let flat = l.connection.weyl3().map_err(err)?.is_zero();
            let mut rep = Report::new(l.digest_input);
            rep.line(format!("projectively flat: {}", verdict(flat, settings)));
            rep.put("projectively_flat", json!(flat));
            rep.negative = !flat;
            Ok(rep)
        }
        Command::Equiv { first, second, set } => {
            let (a, mut bytes) = read_spec(first)?;
            let (b, more) = read_spec(second)?;
            bytes.push(0);
            bytes.extend(more);
            if let Some(s) = set {
                bytes.extend_from_slice(b"\0set ");
                bytes.extend_from_slice(s.as_bytes());
            }
            let a = apply_set(&a, set.as_deref())?;
            let b = apply_set(&b, set.as_deref())?;
            let coords = a.coord_names();
            let witness = projective_equiv(&a, &b).map_err(err)?;
            let mut rep = Report::new(bytes);
            rep.line(format!("projectively equivalent: {}", verdict(witness.is_some(), settings)));
            rep.put("equivalent", json!(witness.is_some()));
            match &witness {
                Some(w) => {
                    one_form_lines(&mut rep, "witness (first = second + J(theta))", w, &coords);
                    rep.put("witness", w.to_json(&coords));
                }
                None => rep.put("witness", Value::Null),
            }
            rep.negative = witness.is_none();
            Ok(rep)
        }
        Command::Normalize(input) => {
            let l = input.load()?;
            let coords = l.connection.coord_names();
            let n = volume_normalize(&l.connection);
            let w = projective_equiv(&l.connection, &n).map_err(err)?.expect("normalization is equivalent");
            let spec = ConnectionSpec::from_connection(&n, Some("volume normalized"), None).to_text();
            let mut rep = Report::new(l.digest_input);
            for (c, p) in coords.iter().zip(&w.components) {
                if !p.is_zero() {
                    rep.line(format!("# witness theta_{c} = {p}"));
                }
            }
            rep.line(spec.trim_end());
            rep.put("witness", w.to_json(&coords));
            rep.put("spec", json!(spec));
            Ok(rep)
        }
        Command::Conditions { input, sweep } => {
            let l = input.load()?;
            let conds = flatness_conditions(&l.connection).map_err(err)?;
            let mut rep = Report::new(l.digest_input.clone());
            rep.line(format!("{} flatness conditions", conds.len()));
            for p in &conds {
                rep.line(format!("  {p} = 0"));
            }
            rep.put("conditions", json!(conds.iter().map(|p| p.to_string()).collect::<Vec<_>>()));
            rep.negative = !conds.is_empty();
            if let Some(sweep) = sweep {
                rep.digest_input.extend_from_slice(b"\0sweep ");
                rep.digest_input.extend_from_slice(sweep.as_bytes());
                let points: Vec<&str> = sweep.split(';').map(str::trim).filter(|s| !s.is_empty()).collect();
                let results: Vec<Result<(String, Vec<DiffPoly>), CliError>> = points
                    .par_iter()
                    .map(|pt| {
                        let b = input::bindings_for(&l.connection, &parse_assignments(pt)?)?;
                        let left = conds
                            .iter()
                            .map(|p| p.subst(&b).map_err(err))
                            .filter(|p| !matches!(p, Ok(q) if q.is_zero()))
                            .collect::<Result<Vec<_>, _>>()?;
                        Ok((pt.to_string(), left))
                    })
                    .collect();
                let mut rows = Vec::new();
                rep.negative = false;
                for r in results {
                    let (pt, left) = r?;
                    let flat = left.is_empty();
                    rep.negative |= !flat;
                    rep.line(format!("{pt}: projectively flat: {} ({} open)", verdict(flat, settings), left.len()));
                    rows.push(json!({
                        "assignment": pt,
                        "projectively_flat": flat,
                        "remaining": left.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                    }));
                }
                rep.put("sweep", Value::Array(rows));
            }
            Ok(rep)
        }
        Command::Family { name, opts, set } => {
            let c = apply_set(&build_family(*name, opts)?, set.as_deref())?;
            let label = family_label(*name, opts);
            let mut bytes = label.clone().into_bytes();
            if let Some(s) = set {
                bytes.extend_from_slice(b"\0set ");
                bytes.extend_from_slice(s.as_bytes());
            }
            let tag = label.trim_start_matches("family ");
            let spec = ConnectionSpec::from_connection(&c, Some(&label), Some(tag)).to_text();
            let mut rep = Report::new(bytes);
            rep.line(spec.trim_end());
            rep.put("spec", json!(spec));
            Ok(rep)
        }
        Command::PullbackCheck { gamma, lambda, with_trace, values, points, seed, count } => {
            let g = GroupElement::new(parse_four(gamma, "--gamma")?, parse_four(lambda, "--lambda")?).map_err(err)?;
            let coeffs = kuga_shimura_weights(*with_trace);
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let small = |rng: &mut ChaCha8Rng| {
                let q = |rng: &mut ChaCha8Rng| GaussianRational::ratio(rng.gen_range(-6..=6), rng.gen_range(1..=4));
                &q(rng) + &(&GaussianRational::i() * &q(rng))
            };
            let fixed: Option<BTreeMap<String, GaussianRational>> =
                values.as_deref().map(parse_assignments).transpose()?.map(|v| v.into_iter().collect());
            let locations: Vec<[GaussianRational; 3]> = match points {
                Some(text) => text
                    .split(';')
                    .filter(|s| !s.trim().is_empty())
                    .map(|p| {
                        let v = parse_constants(p, "--points")?;
                        v.try_into().map_err(|_| CliError::new(format!("point `{}` needs 3 entries", p.trim())))
                    })
                    .collect::<Result<_, _>>()?,
                None => (0..*count)
                    .map(|_| {
                        let im = GaussianRational::ratio(rng.gen_range(1..=8), rng.gen_range(1..=3));
                        let tau = &GaussianRational::ratio(rng.gen_range(-6..=6), 3) + &(&GaussianRational::i() * &im);
                        [tau, small(&mut rng), small(&mut rng)]
                    })
                    .collect(),
            };
            let mut samples = Vec::new();
            for x in locations {
                let vals = match &fixed {
                    Some(v) => v.clone(),
                    None => coeffs.iter().map(|c| (c.name().to_string(), small(&mut rng))).collect(),
                };
                samples.push(PointSample::transported(x, vals, &coeffs, &g).map_err(err)?);
            }
            let ok = invariance_check(&kuga_shimura_theta(*with_trace), &coeffs, &g, &samples).map_err(err)?;
            let digest = format!("pullback gamma={gamma} lambda={lambda} trace={with_trace} values={values:?} points={points:?} seed={seed} count={count}");
            let mut rep = Report::new(digest.into_bytes());
            rep.line(format!("points: {}", samples.len()));
            rep.line(format!("invariant: {}", verdict(ok, settings)));
            rep.put("points", json!(samples.len()));
            rep.put("invariant", json!(ok));
            rep.negative = !ok;
            Ok(rep)
        }
        Command::Geodesic { input, x0, v0, step, count, against, tol, csv } => {
            let l = input.load()?;
            let n = l.connection.dim();
            let numeric = |c: &Connection| NumericConnection::from_connection(c, &Point::new()).map_err(err);
            let nc = numeric(&l.connection)?;
            let x0 = match x0 {
                Some(t) => parse_vector(t, n, "--x0")?,
                None => vec![Complex64::new(0.0, 0.0); n],
            };
            let v0 = parse_vector(v0, n, "--v0")?;
            let path = integrate(&nc, &x0, &v0, *step, *count).map_err(err)?;
            let mut rep = Report::new(l.digest_input);
            let end = path.last().expect("at least one sample");
            let fmt = |v: &[Complex64]| v.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect::<Vec<_>>().join(", ");
            rep.line(format!("samples: {}", path.len()));
            rep.line(format!("end t = {}: x = ({})", end.t, fmt(&end.position)));
            rep.put("samples", json!(path.len()));
            rep.put("end_time", json!(end.t));
            rep.put("end_position", json!(end.position.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()));
            if let Some(other) = against {
                let (c2, bytes) = read_spec(other)?;
                rep.digest_input.push(0);
                rep.digest_input.extend(bytes);
                let c2 = apply_set(&c2, input.set.as_deref())?;
                let q = integrate(&numeric(&c2)?, &x0, &v0, *step, *count).map_err(err)?;
                let d =
                    unparametrized_match(&path, &q).map_err(err)?.max(unparametrized_match(&q, &path).map_err(err)?);
                let same = d < *tol;
                rep.line(format!("trace deviation: {d:e}"));
                rep.line(format!("same unparametrized trace: {}", verdict(same, settings)));
                rep.put("deviation", json!(d));
                rep.put("same_trace", json!(same));
                rep.negative = !same;
            }
            if let Some(file) = csv {
                std::fs::write(file, path.to_csv(&l.connection.coord_names()))
                    .map_err(|e| CliError::new(format!("{}: {e}", file.display())))?;
            }
            Ok(rep)
        }
    }
}

fn render(cli: &Cli, argv: &[String], rep: &Report, elapsed_ms: Option<f64>) -> String {
    match cli.format {
        Format::Text => {
            let mut out = rep.lines.join("\n");
            out.push('\n');
            if let Some(ms) = elapsed_ms {
                out.push_str(&format!("elapsed: {ms:.3} ms\n"));
            }
            out
        }
        Format::Json => {
            let mut top = Map::new();
            top.insert("schema".into(), json!(SCHEMA_VERSION));
            top.insert("command".into(), json!(argv.get(1..).unwrap_or(&[])));
            top.insert("input_digest".into(), json!(hex::encode(Sha256::digest(&rep.digest_input))));
            top.insert("result".into(), Value::Object(rep.result.clone()));
            if let Some(ms) = elapsed_ms {
                top.insert("elapsed_ms".into(), json!(ms));
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("serializable");
            s.push('\n');
            s
        }
    }
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, T>(argv: I, settings: &Settings) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.exit_code() {
                0 => Outcome { code: 0, stdout: text, stderr: String::new() },
                _ => Outcome { code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    let start = Instant::now();
    match execute(&cli.command, settings) {
        Ok(rep) => {
            let elapsed = cli.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
            let code = if cli.strict && rep.negative { 1 } else { 0 };
            Outcome { code, stdout: render(&cli, &argv, &rep, elapsed), stderr: String::new() }
        }
        Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {}\n", e.message) },
    }
}
