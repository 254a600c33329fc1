#![allow(dead_code)]

pub mod oracle;

use projconn_core::{parse_expr, DiffPoly, SymbolTable, Tensor};

pub const TAU: usize = 0;
pub const Z1: usize = 1;
pub const Z2: usize = 2;

pub fn torus_table() -> SymbolTable {
    let mut t = SymbolTable::new();
    for c in ["tau", "z1", "z2"] {
        t.add_coordinate(c).unwrap();
    }
    for p in ["A", "B", "C", "D", "E"] {
        t.add_parameter(p).unwrap();
    }
    t
}

pub fn expr(text: &str) -> DiffPoly {
    parse_expr(text, &torus_table()).unwrap_or_else(|e| panic!("{text}: {e}"))
}

/// `R(∂a, ∂b)∂c` as its three components.
pub fn endo(r: &Tensor, a: usize, b: usize, c: usize) -> [DiffPoly; 3] {
    [0, 1, 2].map(|l| r.get(&[l, a, b, c]).clone())
}

pub fn vector(parts: [&str; 3]) -> [DiffPoly; 3] {
    parts.map(expr)
}

use projconn_core::{Connection, GaussianRational, OneForm, Symbol};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const COORDS: [&str; 3] = ["tau", "z1", "z2"];

pub fn small_rational(rng: &mut ChaCha8Rng) -> GaussianRational {
    GaussianRational::ratio(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

pub fn small_gaussian(rng: &mut ChaCha8Rng) -> GaussianRational {
    &small_rational(rng) + &(&GaussianRational::i() * &small_rational(rng))
}

/// Random polynomial of total degree `<= max_deg` in the coordinates, with
/// occasional parameter factors `A`, `B`.
pub fn random_poly(rng: &mut ChaCha8Rng, max_deg: u32) -> DiffPoly {
    let mut p = DiffPoly::zero();
    for _ in 0..rng.gen_range(0..=3) {
        let mut t = DiffPoly::constant(small_gaussian(rng));
        let deg = rng.gen_range(0..=max_deg);
        for _ in 0..deg {
            t = &t * &DiffPoly::coord(COORDS[rng.gen_range(0..3)]);
        }
        if rng.gen_bool(0.3) {
            t = &t * &DiffPoly::param(["A", "B"][rng.gen_range(0..2)]);
        }
        p = &p + &t;
    }
    p
}

pub fn random_connection(rng: &mut ChaCha8Rng, max_deg: u32) -> Connection {
    let mut entries = Vec::new();
    for k in 0..3 {
        for i in 0..3 {
            for j in i..3 {
                if rng.gen_bool(0.6) {
                    entries.push(([k, i, j], random_poly(rng, max_deg)));
                }
            }
        }
    }
    Connection::from_table(&COORDS, entries).unwrap()
}

pub fn random_one_form(rng: &mut ChaCha8Rng, dim: usize, max_deg: u32) -> OneForm {
    OneForm::new((0..dim).map(|_| random_poly(rng, max_deg)).collect())
}

pub fn param(name: &str) -> Symbol {
    Symbol::parameter(name)
}
