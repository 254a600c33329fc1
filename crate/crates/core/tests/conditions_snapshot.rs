//! Frozen record of the flatness conditions of the generic constant table.
//! Regenerate with `UPDATE_GOLDEN=1 cargo test --test conditions_snapshot`.

use projconn_core::projective::flatness_conditions;
use projconn_core::{Connection, DiffPoly};

const SNAPSHOT: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/generic_conditions.txt");

fn generic_table() -> Connection {
    let mut entries = Vec::new();
    for k in 0..3 {
        for i in 0..3 {
            for j in i..3 {
                entries.push(([k, i, j], DiffPoly::param(&format!("g{k}_{i}{j}"))));
            }
        }
    }
    Connection::from_table(&["x", "y", "z"], entries).unwrap()
}

fn render() -> String {
    let conds = flatness_conditions(&generic_table()).unwrap();
    let degrees: Vec<String> = conds.iter().map(|p| p.total_degree().to_string()).collect();
    let mut out = format!("count: {}\ndegrees: {}\n", conds.len(), degrees.join(" "));
    for p in &conds {
        out.push_str(&p.to_string());
        out.push('\n');
    }
    out
}

#[test]
fn generic_conditions_match_snapshot() {
    let current = render();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(SNAPSHOT, &current).unwrap();
    }
    let frozen = std::fs::read_to_string(SNAPSHOT).expect("snapshot file");
    assert_eq!(current, frozen);
}

#[test]
fn generic_conditions_are_quadratic() {
    let conds = flatness_conditions(&generic_table()).unwrap();
    assert!(conds.iter().all(|p| p.total_degree() == 2));
}
