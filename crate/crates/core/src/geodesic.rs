//! Fixed-step RK4 integration of `ẍ^k + Γ^k_{ij} ẋ^i ẋ^j = 0` along a real
//! time ray, for constant complex Christoffel symbols.

use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{AlgebraError, Point};
use crate::connection::Connection;

/// Longest allowed horizon `step · count`.
pub const MAX_HORIZON: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeodesicError {
    #[error("step must be finite and positive, got {0}")]
    Step(f64),
    #[error("horizon {0} exceeds {MAX_HORIZON}")]
    Horizon(f64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite Christoffel symbol at index {0}")]
    NonFinite(usize),
    #[error("table is not symmetric at ({k}, {i}, {j})")]
    NotSymmetric { k: usize, i: usize, j: usize },
    #[error("integration diverged after t = {last_time}")]
    Divergence { last_time: f64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericConnection {
    dim: usize,
    gamma: Vec<Complex64>,
}

impl NumericConnection {
    /// Table `Γ^k_{ij}` in `[k][i][j]` order.
    pub fn new(dim: usize, gamma: Vec<Complex64>) -> Result<Self, GeodesicError> {
        if gamma.len() != dim * dim * dim || dim == 0 {
            return Err(GeodesicError::Shape(format!("{} entries for dimension {dim}", gamma.len())));
        }
        if let Some(bad) = gamma.iter().position(|z| !z.is_finite()) {
            return Err(GeodesicError::NonFinite(bad));
        }
        for k in 0..dim {
            for i in 0..dim {
                for j in (i + 1)..dim {
                    if gamma[(k * dim + i) * dim + j] != gamma[(k * dim + j) * dim + i] {
                        return Err(GeodesicError::NotSymmetric { k, i, j });
                    }
                }
            }
        }
        Ok(Self { dim, gamma })
    }

    /// Evaluates every symbol at `point`, which must bind all parameters,
    /// functions and coordinates that occur.
    pub fn from_connection(c: &Connection, point: &Point) -> Result<Self, GeodesicError> {
        let n = c.dim();
        let mut gamma = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let (re, im) = c.gamma(k, i, j).eval(point)?.to_f64_pair();
                    gamma.push(Complex64::new(re, im));
                }
            }
        }
        Self::new(n, gamma)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> Complex64 {
        self.gamma[(k * self.dim + i) * self.dim + j]
    }

    /// `−Γ^k_{ij} v^i v^j`.
    fn acceleration(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        (0..n)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        acc += self.gamma(k, i, j) * v[i] * v[j];
                    }
                }
                -acc
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub position: Vec<Complex64>,
    pub velocity: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicPath {
    pub samples: Vec<Sample>,
}

impl GeodesicPath {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// Euclidean length of the position polyline in `ℂⁿ = ℝ²ⁿ`.
    pub fn arclength(&self) -> f64 {
        self.samples.windows(2).map(|w| dist(&w[0].position, &w[1].position)).sum()
    }

    /// Columns `t`, then `re_x{k}, im_x{k}` and `re_v{k}, im_v{k}`.
    pub fn to_csv(&self, names: &[String]) -> String {
        let mut out = String::from("t");
        for prefix in ["x", "v"] {
            for name in names {
                let _ = write!(out, ",re_{prefix}_{name},im_{prefix}_{name}");
            }
        }
        out.push('\n');
        for s in &self.samples {
            let _ = write!(out, "{:e}", s.t);
            for z in s.position.iter().chain(&s.velocity) {
                let _ = write!(out, ",{:e},{:e}", z.re, z.im);
            }
            out.push('\n');
        }
        out
    }
}

fn axpy(a: f64, x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    y.iter().zip(x).map(|(y, x)| y + x * a).collect()
}

pub fn integrate(
    c: &NumericConnection,
    x0: &[Complex64],
    v0: &[Complex64],
    step: f64,
    count: usize,
) -> Result<GeodesicPath, GeodesicError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(GeodesicError::Step(step));
    }
    let horizon = step * count as f64;
    if horizon > MAX_HORIZON * (1.0 + 1e-12) {
        return Err(GeodesicError::Horizon(horizon));
    }
    if x0.len() != c.dim() || v0.len() != c.dim() {
        return Err(GeodesicError::Shape(format!(
            "initial data has lengths {} and {}, dimension is {}",
            x0.len(),
            v0.len(),
            c.dim()
        )));
    }
    if x0.iter().chain(v0).any(|z| !z.is_finite()) {
        return Err(GeodesicError::Divergence { last_time: 0.0 });
    }
    let mut samples = Vec::with_capacity(count + 1);
    let (mut x, mut v) = (x0.to_vec(), v0.to_vec());
    samples.push(Sample { t: 0.0, position: x.clone(), velocity: v.clone() });
    for n in 1..=count {
        let h = step;
        let k1x = v.clone();
        let k1v = c.acceleration(&v);
        let v2 = axpy(h / 2.0, &k1v, &v);
        let k2x = v2.clone();
        let k2v = c.acceleration(&v2);
        let v3 = axpy(h / 2.0, &k2v, &v);
        let k3x = v3.clone();
        let k3v = c.acceleration(&v3);
        let v4 = axpy(h, &k3v, &v);
        let k4x = v4.clone();
        let k4v = c.acceleration(&v4);
        for k in 0..c.dim() {
            x[k] += (k1x[k] + k2x[k] * 2.0 + k3x[k] * 2.0 + k4x[k]) * (h / 6.0);
            v[k] += (k1v[k] + k2v[k] * 2.0 + k3v[k] * 2.0 + k4v[k]) * (h / 6.0);
        }
        if x.iter().chain(&v).any(|z| !z.is_finite()) {
            return Err(GeodesicError::Divergence { last_time: step * (n - 1) as f64 });
        }
        samples.push(Sample { t: step * n as f64, position: x.clone(), velocity: v.clone() });
    }
    Ok(GeodesicPath { samples })
}

fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Distance from `p` to the segment `[a, b]` in `ℝ²ⁿ`.
fn segment_distance(p: &[Complex64], a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut dot = 0.0;
    let mut len2 = 0.0;
    for k in 0..p.len() {
        let d = b[k] - a[k];
        let w = p[k] - a[k];
        dot += d.re * w.re + d.im * w.im;
        len2 += d.norm_sqr();
    }
    let s = if len2 > 0.0 { (dot / len2).clamp(0.0, 1.0) } else { 0.0 };
    p.iter().zip(a.iter().zip(b)).map(|(p, (a, b))| (p - (a + (b - a) * s)).norm_sqr()).sum::<f64>().sqrt()
}

/// Largest distance from a sample of `p` to the polyline of `q`.
///
/// Only samples of `p` within the arclength of `q` are compared, so two
/// parametrizations of one curve that cover different lengths still agree.
pub fn unparametrized_match(p: &GeodesicPath, q: &GeodesicPath) -> Result<f64, GeodesicError> {
    let (Some(first_p), Some(first_q)) = (p.samples.first(), q.samples.first()) else {
        return Err(GeodesicError::Shape("empty path".into()));
    };
    if first_p.position.len() != first_q.position.len() {
        return Err(GeodesicError::Shape("paths have different dimensions".into()));
    }
    let budget = q.arclength() * (1.0 + 1e-12);
    let mut walked = 0.0;
    let mut worst: f64 = 0.0;
    for (idx, s) in p.samples.iter().enumerate() {
        if idx > 0 {
            walked += dist(&p.samples[idx - 1].position, &s.position);
            if walked > budget {
                break;
            }
        }
        let d = if q.samples.len() == 1 {
            dist(&s.position, &first_q.position)
        } else {
            q.samples
                .windows(2)
                .map(|w| segment_distance(&s.position, &w[0].position, &w[1].position))
                .fold(f64::INFINITY, f64::min)
        };
        worst = worst.max(d);
    }
    Ok(worst)
}
