//! Curvature by plain index loops on exact values.

use projconn_core::{Connection, GaussianRational, Point, Symbol, Tensor};

use super::COORDS;

type GR = GaussianRational;

pub fn gamma_at(c: &Connection, base: &Point, x: &[GR; 3]) -> Vec<GR> {
    let mut point = base.clone();
    for (name, v) in COORDS.iter().zip(x) {
        point.insert(Symbol::coordinate(name), v.clone());
    }
    let mut out = Vec::with_capacity(27);
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                out.push(c.gamma(k, i, j).eval(&point).unwrap());
            }
        }
    }
    out
}

/// `R^l_{ijk}` with derivatives from central differences of unit step,
/// which are exact for entries of degree at most two in the coordinates.
pub fn naive_curvature(c: &Connection, base: &Point, x: &[GR; 3]) -> Vec<GR> {
    let g = gamma_at(c, base, x);
    let g = |k: usize, i: usize, j: usize| g[k * 9 + i * 3 + j].clone();
    let half = GR::ratio(1, 2);
    let mut dg = Vec::new();
    for a in 0..3 {
        let mut plus = x.clone();
        let mut minus = x.clone();
        plus[a] = &plus[a] + &GR::from(1);
        minus[a] = &minus[a] - &GR::from(1);
        let gp = gamma_at(c, base, &plus);
        let gm = gamma_at(c, base, &minus);
        dg.push(gp.iter().zip(&gm).map(|(p, m)| &(p - m) * &half).collect::<Vec<_>>());
    }
    let d = |a: usize, k: usize, i: usize, j: usize| dg[a][k * 9 + i * 3 + j].clone();
    let mut r = Vec::with_capacity(81);
    for l in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let mut v = &d(i, l, j, k) - &d(j, l, i, k);
                    for m in 0..3 {
                        v = &v + &(&g(l, i, m) * &g(m, j, k));
                        v = &v - &(&g(l, j, m) * &g(m, i, k));
                    }
                    r.push(v);
                }
            }
        }
    }
    r
}

pub fn symbolic_then_eval(r: &Tensor, base: &Point, x: &[GR; 3]) -> Vec<GR> {
    let mut point = base.clone();
    for (name, v) in COORDS.iter().zip(x) {
        point.insert(Symbol::coordinate(name), v.clone());
    }
    r.entries().iter().map(|p| p.eval(&point).unwrap()).collect()
}
