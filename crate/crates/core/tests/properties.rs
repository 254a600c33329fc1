use proptest::prelude::*;

use projconn_core::projective::{divergence, inject_j, projective_equiv, trace_free_project, ThetaField};
use projconn_core::{
    parse_expr, Connection, DiffPoly, GaussianRational, OneForm, Point, Symbol, SymbolTable, SymmetryMode, Tensor,
    Variance,
};

type GR = GaussianRational;

fn table() -> SymbolTable {
    let mut t = SymbolTable::new();
    for c in ["x", "y", "z"] {
        t.add_coordinate(c).unwrap();
    }
    for p in ["A", "B"] {
        t.add_parameter(p).unwrap();
    }
    t.add_function("F", &["x", "y"]).unwrap();
    t
}

fn atoms() -> Vec<DiffPoly> {
    vec![
        DiffPoly::coord("x"),
        DiffPoly::coord("y"),
        DiffPoly::coord("z"),
        DiffPoly::param("A"),
        DiffPoly::param("B"),
        DiffPoly::var(Symbol::function("F", &["x", "y"])),
    ]
}

fn coeff() -> impl Strategy<Value = GR> {
    (-5i64..=5, 1i64..=4, -3i64..=3).prop_map(|(n, d, im)| &GR::ratio(n, d) + &(&GR::i() * &GR::ratio(im, d)))
}

prop_compose! {
    fn term()(c in coeff(), picks in prop::collection::vec(0usize..6, 0..=3)) -> DiffPoly {
        let atoms = atoms();
        picks.into_iter().fold(DiffPoly::constant(c), |acc, i| &acc * &atoms[i])
    }
}

fn poly() -> impl Strategy<Value = DiffPoly> {
    prop::collection::vec(term(), 0..=4).prop_map(|ts| ts.into_iter().sum())
}

/// Polynomials in the coordinates only, of degree at most two.
fn coord_poly(coords: &'static [&'static str]) -> impl Strategy<Value = DiffPoly> {
    prop::collection::vec((coeff(), prop::collection::vec(0..coords.len(), 0..=2)), 0..=2).prop_map(move |ts| {
        ts.into_iter()
            .map(|(c, picks)| {
                picks.into_iter().fold(DiffPoly::constant(c), |acc, i| &acc * &DiffPoly::coord(coords[i]))
            })
            .sum()
    })
}

const XYZ: &[&str] = &["x", "y", "z"];

fn connection3() -> impl Strategy<Value = Connection> {
    prop::collection::vec(coord_poly(XYZ), 18).prop_map(|ps| {
        let mut it = ps.into_iter();
        let mut entries = Vec::new();
        for k in 0..3 {
            for i in 0..3 {
                for j in i..3 {
                    entries.push(([k, i, j], it.next().unwrap()));
                }
            }
        }
        Connection::from_table(XYZ, entries).unwrap()
    })
}

fn one_form(coords: &'static [&'static str]) -> impl Strategy<Value = OneForm> {
    prop::collection::vec(coord_poly(coords), coords.len()).prop_map(OneForm::new)
}

const DIMS: [&[&str]; 4] = [&["x", "y"], &["x", "y", "z"], &["x", "y", "z", "w"], &["x", "y", "z", "w", "v"]];

fn theta_field(dim: usize) -> impl Strategy<Value = ThetaField> {
    prop::collection::vec(coord_poly(DIMS[dim - 2]), dim * dim * dim)
        .prop_map(move |ps| ThetaField::from_fn(dim, |k, i, j| ps[(k * dim + i) * dim + j].clone()))
}

fn point() -> impl Strategy<Value = Point> {
    prop::collection::vec(coeff(), 6).prop_map(|vs| {
        let syms = [
            Symbol::coordinate("x"),
            Symbol::coordinate("y"),
            Symbol::coordinate("z"),
            Symbol::parameter("A"),
            Symbol::parameter("B"),
            Symbol::function("F", &["x", "y"]),
        ];
        syms.into_iter().zip(vs).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &DiffPoly::one(), a.clone());
    }

    #[test]
    fn print_parse_roundtrip(a in poly()) {
        let text = a.to_string();
        prop_assert_eq!(parse_expr(&text, &table()).unwrap(), a);
    }

    #[test]
    fn derivatives_commute(a in poly()) {
        let (x, y) = (Symbol::coordinate("x"), Symbol::coordinate("y"));
        let xy = a.diff(&x).unwrap().diff(&y).unwrap();
        let yx = a.diff(&y).unwrap().diff(&x).unwrap();
        prop_assert_eq!(xy, yx);
    }

    #[test]
    fn leibniz(a in poly(), b in poly()) {
        let x = Symbol::coordinate("x");
        let lhs = (&a * &b).diff(&x).unwrap();
        let rhs = &(&a.diff(&x).unwrap() * &b) + &(&a * &b.diff(&x).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn eval_is_a_homomorphism(a in poly(), b in poly(), p in point()) {
        let (ea, eb) = (a.eval(&p).unwrap(), b.eval(&p).unwrap());
        prop_assert_eq!((&a + &b).eval(&p).unwrap(), &ea + &eb);
        prop_assert_eq!((&a * &b).eval(&p).unwrap(), &ea * &eb);
    }

    #[test]
    fn contraction_is_linear(s in theta_field(3), t in theta_field(3), c in coeff()) {
        let (s, t) = (s.to_tensor(), t.to_tensor());
        let lhs = s.scale(&c).checked_add(&t).unwrap().contract(0, 1).unwrap();
        let rhs = s.contract(0, 1).unwrap().scale(&c).checked_add(&t.contract(0, 1).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn swap_twice_is_identity(ps in prop::collection::vec(coord_poly(XYZ), 27)) {
        let t = Tensor::from_fn(3, Variance::covariant(3), |x| ps[x[0] * 9 + x[1] * 3 + x[2]].clone());
        prop_assert_eq!(t.swap_slots(0, 2).unwrap().swap_slots(0, 2).unwrap(), t.clone());
        let sym = t.checked_add(&t.swap_slots(1, 2).unwrap()).unwrap();
        prop_assert!(sym.symmetry_check(1, 2, SymmetryMode::Symmetric).unwrap());
    }

    #[test]
    fn div_after_inject(dim in 2usize..=5, seed in prop::collection::vec(coord_poly(&["x", "y"]), 5)) {
        let f = OneForm::new(seed[..dim].to_vec());
        prop_assert_eq!(divergence(&inject_j(&f)), f.scale(&GR::from(dim as i64 + 1)));
    }

    #[test]
    fn direct_sum_decomposition(t in (2usize..=5).prop_flat_map(theta_field)) {
        let n = t.dim() as i64;
        let image = inject_j(&divergence(&t)).scale(&GR::ratio(1, n + 1));
        let p = trace_free_project(&t);
        prop_assert_eq!(p.checked_add(&image).unwrap(), t.clone());
        prop_assert!(divergence(&p).is_zero());
        prop_assert_eq!(trace_free_project(&p), p);
    }

    #[test]
    fn equivalence_relation(c in connection3(), f in one_form(XYZ), g in one_form(XYZ)) {
        let d = inject_j(&f).add_to(&c).unwrap();
        let e = inject_j(&g).add_to(&d).unwrap();
        prop_assert!(projective_equiv(&c, &c).unwrap().unwrap().is_zero());
        prop_assert_eq!(projective_equiv(&d, &c).unwrap().unwrap(), f.clone());
        prop_assert_eq!(projective_equiv(&c, &d).unwrap().unwrap(), -&f);
        prop_assert_eq!(projective_equiv(&e, &c).unwrap().unwrap(), f.checked_add(&g).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weyl_is_projectively_invariant(c in connection3(), f in one_form(XYZ)) {
        let d = inject_j(&f).add_to(&c).unwrap();
        prop_assert_eq!(d.weyl3().unwrap(), c.weyl3().unwrap());
    }

    #[test]
    fn bianchi_and_trace_identity(c in connection3()) {
        let r = c.curvature().unwrap();
        prop_assert!(projconn_core::bianchi_check(&r).unwrap());
        let ric = c.ricci().unwrap();
        let expect = ric.swap_slots(0, 1).unwrap().checked_sub(&ric).unwrap();
        prop_assert_eq!(c.trace_r().unwrap(), expect);
    }

    #[test]
    fn normalize_is_idempotent(c in connection3()) {
        let n = projconn_core::projective::volume_normalize(&c);
        prop_assert_eq!(projconn_core::projective::volume_normalize(&n), n.clone());
        prop_assert!(projective_equiv(&c, &n).unwrap().is_some());
    }
}
