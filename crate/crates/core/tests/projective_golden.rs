mod common;

use common::expr;
use projconn_core::families::{
    kuga_shimura, kuga_shimura_theta, torus3, torus3_at, torus3_symbolic, torus_n, torus_n_symbolic, TORUS_COORDS,
};
use projconn_core::projective::{
    divergence, flatness_conditions, inject_j, is_projectively_flat3, projective_equiv, trace_free_project,
    volume_normalize, ThetaField,
};
use projconn_core::{Bindings, Connection, DiffPoly, OneForm, Symbol};

fn torus_e0() -> Connection {
    let [a, b, c, d] = ["A", "B", "C", "D"].map(DiffPoly::param);
    torus3(&a, &b, &c, &d, &DiffPoly::zero())
}

fn e_half() -> OneForm {
    OneForm::new(vec![expr("E/2"), DiffPoly::zero(), DiffPoly::zero()])
}

#[test]
fn e_elimination_witness() {
    let theta = projective_equiv(&torus3_symbolic(), &torus_e0()).unwrap().unwrap();
    assert_eq!(theta, e_half());
    let diff = ThetaField::difference(&torus3_symbolic(), &torus_e0()).unwrap();
    assert_eq!(inject_j(&e_half()), diff);
}

#[test]
fn equivalence_basics() {
    let c = torus3_symbolic();
    assert!(projective_equiv(&c, &c).unwrap().unwrap().is_zero());
    assert_eq!(projective_equiv(&torus3_at([0, 0, 1, 0, 0]), &torus3_at([0; 5])).unwrap(), None);
    let back = projective_equiv(&torus_e0(), &torus3_symbolic()).unwrap().unwrap();
    assert_eq!(back, -&e_half());
}

#[test]
fn volume_normalization() {
    let c = torus3_symbolic();
    let t = ThetaField::of_connection(&c);
    assert_eq!(divergence(&t).components[0], expr("2*E"));
    let n = volume_normalize(&c);
    assert!(divergence(&ThetaField::of_connection(&n)).is_zero());
    assert_eq!(volume_normalize(&n), n);
    assert_eq!(volume_normalize(&torus_e0()), n);
    let w_raw = projective_equiv(&c, &n).unwrap().unwrap();
    let w_e0 = projective_equiv(&torus_e0(), &n).unwrap().unwrap();
    assert_eq!(w_raw.checked_sub(&w_e0).unwrap(), e_half());
    assert_eq!(w_raw.components[0], e_half().components[0]);
    let flat = Connection::flat(&TORUS_COORDS).unwrap();
    assert_eq!(volume_normalize(&flat), flat);
}

#[test]
fn flatness_decisions() {
    assert!(is_projectively_flat3(&torus3_at([1, 2, 5, 5, 7])).unwrap());
    assert!(!is_projectively_flat3(&torus3_at([1, 2, 5, 6, 0])).unwrap());
    assert!(is_projectively_flat3(&Connection::flat(&TORUS_COORDS).unwrap()).unwrap());
    assert!(is_projectively_flat3(&Connection::flat(&["x", "y"]).unwrap()).is_err());
}

#[test]
fn torus_conditions() {
    let conds = flatness_conditions(&torus3_symbolic()).unwrap();
    assert!(!conds.is_empty());
    assert!(conds.contains(&expr("(C - D)^2")));
    let mut c_to_d = Bindings::new();
    c_to_d.insert(Symbol::parameter("C"), DiffPoly::param("D"));
    for p in &conds {
        assert!(p.subst(&c_to_d).unwrap().is_zero(), "{p}");
    }
    let at: projconn_core::Point = [("A", 1), ("B", 2), ("C", 5), ("D", 6), ("E", 0)]
        .into_iter()
        .map(|(n, v)| (Symbol::parameter(n), projconn_core::GaussianRational::from(v)))
        .collect();
    assert!(conds.iter().any(|p| !p.eval(&at).unwrap().is_zero()));
    assert!(flatness_conditions(&Connection::flat(&TORUS_COORDS).unwrap()).unwrap().is_empty());
}

#[test]
fn conditions_depend_on_difference_only() {
    let t = DiffPoly::param("T");
    let [a, b, c, d, e] = ["A", "B", "C", "D", "E"].map(DiffPoly::param);
    let shifted = torus3(&a, &b, &(&c + &t), &(&d + &t), &e);
    assert_eq!(flatness_conditions(&shifted).unwrap(), flatness_conditions(&torus3_symbolic()).unwrap());
}

#[test]
fn torus_n_extension() {
    let c4 = torus_n_symbolic(4).unwrap();
    assert_eq!(c4.restrict_to(&TORUS_COORDS).unwrap(), torus3_symbolic());
    let sample = torus_n(
        4,
        &DiffPoly::integer(1),
        &DiffPoly::integer(2),
        &DiffPoly::integer(5),
        &DiffPoly::integer(6),
        &DiffPoly::zero(),
    )
    .unwrap();
    assert!(!is_projectively_flat3(&sample.restrict_to(&TORUS_COORDS).unwrap()).unwrap());
    let zero = DiffPoly::zero();
    let c5 = torus_n(5, &zero, &zero, &zero, &zero, &zero).unwrap();
    assert!(c5.curvature().unwrap().is_zero());
}

#[test]
fn kuga_shimura_identities() {
    let theta = kuga_shimura_theta(true);
    let tau_c = DiffPoly::var(Symbol::function("C", &["tau"]));
    assert_eq!(divergence(&theta).components, vec![tau_c.scale(&2.into()), DiffPoly::zero(), DiffPoly::zero()]);
    assert_eq!(trace_free_project(&theta), kuga_shimura_theta(false));
    assert!(divergence(&ThetaField::zeros(3)).is_zero());

    let r = kuga_shimura(false).curvature().unwrap();
    assert!(r.is_zero());
    assert!(kuga_shimura(true).weyl3().unwrap().is_zero());

    let w = projective_equiv(&kuga_shimura(true), &kuga_shimura(false)).unwrap().unwrap();
    assert_eq!(
        w.components,
        vec![tau_c.scale(&projconn_core::GaussianRational::ratio(1, 2)), DiffPoly::zero(), DiffPoly::zero()]
    );
}
