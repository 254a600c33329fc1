use num_complex::Complex64;
use projconn_core::families::{torus3_at, TORUS_COORDS};
use projconn_core::geodesic::{integrate, unparametrized_match};
use projconn_core::projective::{inject_j, projective_equiv};
use projconn_core::{Connection, DiffPoly, GaussianRational, NumericConnection, OneForm, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn re(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

fn numeric(c: &Connection) -> NumericConnection {
    NumericConnection::from_connection(c, &Point::new()).unwrap()
}

fn deviation(a: &Connection, b: &Connection, v0: &[f64]) -> f64 {
    let x0 = re(&[0.0; 3]);
    let p = integrate(&numeric(a), &x0, &re(v0), 1e-3, 300).unwrap();
    let q = integrate(&numeric(b), &x0, &re(v0), 1e-3, 300).unwrap();
    unparametrized_match(&p, &q).unwrap().max(unparametrized_match(&q, &p).unwrap())
}

#[test]
fn e_pair_shares_traces() {
    let d = deviation(&torus3_at([1, 2, 3, -1, 2]), &torus3_at([1, 2, 3, -1, 0]), &[1.0, 1.0, 1.0]);
    assert!(d < 1e-6, "{d}");
}

#[test]
fn inequivalent_pair_diverges() {
    let a = torus3_at([0, 0, 1, 0, 0]);
    let flat = Connection::flat(&TORUS_COORDS).unwrap();
    assert_eq!(projective_equiv(&a, &flat).unwrap(), None);
    let d = deviation(&a, &flat, &[0.3, 1.7, -0.9]);
    assert!(d > 1e-2, "{d}");
}

/// Entries in [−1/2, 1/2]; larger tables blow up before t = 0.3 and the
/// polyline chord error then dominates the comparison.
fn small(rng: &mut ChaCha8Rng) -> DiffPoly {
    DiffPoly::constant(GaussianRational::ratio(rng.gen_range(-4..=4), 8))
}

#[test]
fn random_equivalent_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let mut entries = Vec::new();
        for k in 0..3 {
            for i in 0..3 {
                for j in i..3 {
                    entries.push(([k, i, j], small(&mut rng)));
                }
            }
        }
        let c = Connection::from_table(&TORUS_COORDS, entries).unwrap();
        let theta = OneForm::new((0..3).map(|_| small(&mut rng)).collect());
        let d = inject_j(&theta).add_to(&c).unwrap();
        let v0: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dev = deviation(&c, &d, &v0);
        worst = worst.max(dev);
    }
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn reversed_velocity_retraces() {
    let c = numeric(&torus3_at([1, -1, 2, 1, 1]));
    let fwd = integrate(&c, &re(&[0.0; 3]), &re(&[0.5, 1.0, -0.5]), 1e-3, 300).unwrap();
    let end = fwd.last().unwrap();
    let back_v: Vec<Complex64> = end.velocity.iter().map(|v| -v).collect();
    let back = integrate(&c, &end.position, &back_v, 1e-3, 300).unwrap();
    let d = unparametrized_match(&back, &fwd).unwrap();
    assert!(d < 1e-6, "{d}");
    assert!(back.last().unwrap().position.iter().all(|z| z.norm() < 1e-9));
}

#[test]
fn straight_lines_for_zero_table() {
    let c = numeric(&Connection::flat(&TORUS_COORDS).unwrap());
    let v0 = re(&[0.25, -1.5, 2.0]);
    let p = integrate(&c, &re(&[1.0, 0.0, -1.0]), &v0, 1e-2, 100).unwrap();
    for s in &p.samples {
        let expect = [1.0 + 0.25 * s.t, -1.5 * s.t, -1.0 + 2.0 * s.t];
        for (z, e) in s.position.iter().zip(expect) {
            assert!((z.re - e).abs() < 1e-12 && z.im.abs() < 1e-12);
        }
    }
}

#[test]
fn fourth_order_convergence() {
    let c = NumericConnection::new(1, vec![Complex64::new(1.0, 0.0)]).unwrap();
    let max_err = |h: f64, n: usize| {
        let p = integrate(&c, &re(&[0.0]), &re(&[1.0]), h, n).unwrap();
        p.samples.iter().map(|s| (s.position[0].re - (1.0 + s.t).ln()).abs()).fold(0.0, f64::max)
    };
    let ratio = max_err(0.1, 5) / max_err(0.05, 10);
    assert!((12.0..20.0).contains(&ratio), "{ratio}");
    let x = integrate(&c, &re(&[0.0]), &re(&[1.0]), 1e-3, 500).unwrap();
    let exact = 1.5f64.ln();
    assert!(((x.last().unwrap().position[0].re - exact) / exact).abs() < 1e-8);
}

#[test]
fn symbolic_values_are_required() {
    let c = projconn_core::families::torus3_symbolic();
    assert!(NumericConnection::from_connection(&c, &Point::new()).is_err());
}
