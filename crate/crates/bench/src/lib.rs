//! Fixtures shared by the benchmarks.

use projconn_core::{Connection, DiffPoly};

/// Dimension-three table whose 18 independent symbols are parameters `g0 … g17`.
pub fn generic_constant_table() -> Connection {
    let mut entries = Vec::new();
    let mut next = 0;
    for k in 0..3 {
        for i in 0..3 {
            for j in i..3 {
                entries.push(([k, i, j], DiffPoly::param(&format!("g{next}"))));
                next += 1;
            }
        }
    }
    Connection::from_table(&["x", "y", "z"], entries).expect("generic table is consistent")
}

/// Dimension-`n` table with `Γ^k_{ij} = x_i x_j + k` style polynomial entries.
pub fn polynomial_table(n: usize) -> Connection {
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut entries = Vec::new();
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let p = &(&DiffPoly::coord(&names[i]) * &DiffPoly::coord(&names[j])) + &DiffPoly::integer(k as i64 + 1);
                entries.push(([k, i, j], p));
            }
        }
    }
    Connection::from_table(&refs, entries).expect("table is consistent")
}
