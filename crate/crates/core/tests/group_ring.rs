use std::sync::Arc;

use blanchfield_core::builders::{circle_complex, lens_cells};
use blanchfield_core::group_ring::*;
use blanchfield_core::homology_engine::{homology, smith_normal_form};
use blanchfield_core::{Matrix, Ring, RingElement, RingOps};
use proptest::prelude::*;

fn p(s: &str) -> RingElement {
    RingElement::parse(s).unwrap()
}

fn ints(rows: &[&[i64]]) -> Matrix<RingElement> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| RingElement::int(x)).collect()).collect()).unwrap()
}

fn two_generator_rep() -> Representation {
    let s = Matrix::from_rows(vec![vec![p("1"), p("1")], vec![p("0"), p("1")]]).unwrap();
    let s_inv = Matrix::from_rows(vec![vec![p("1"), p("-1")], vec![p("0"), p("1")]]).unwrap();
    let t = Matrix::from_rows(vec![vec![p("1"), p("0")], vec![p("t"), p("1")]]).unwrap();
    let t_inv = Matrix::from_rows(vec![vec![p("1"), p("0")], vec![p("-t"), p("1")]]).unwrap();
    Representation {
        ring: Ring::Laurent,
        dim: 2,
        generators: vec![
            RepGenerator { name: "s".into(), matrix: s, inverse: s_inv },
            RepGenerator { name: "t".into(), matrix: t, inverse: t_inv },
        ],
        theta: Matrix::identity(2),
    }
}

#[test]
fn represent_examples() {
    let z = GroupRelations::infinite_cyclic();
    let taut = Representation::tautological();
    assert_eq!(represent(&GroupRingElement::int(&z, 1), &taut).unwrap(), Matrix::identity(1));
    let x = GroupRingElement::parse(&z, "3*t - 1").unwrap();
    assert_eq!(represent(&x, &taut).unwrap(), Matrix::scalar(1, &p("3*t - 1")));

    let z3 = GroupRelations::cyclic(3);
    let reg = Representation::regular_cyclic(3);
    let x = GroupRingElement::parse(&z3, "t + t^2").unwrap();
    assert_eq!(represent(&x, &reg).unwrap(), ints(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]));
    let cube = GroupRingElement::parse(&z3, "t^3").unwrap();
    assert_eq!(represent(&cube, &reg).unwrap(), Matrix::identity(3));
}

#[test]
fn unknown_generator_is_an_error() {
    let rel = GroupRelations::free(&["u"]);
    let x = GroupRingElement::parse(&rel, "u").unwrap();
    assert!(represent(&x, &Representation::tautological()).is_err());
}

#[test]
fn unitarity() {
    assert!(check_unitary(&Representation::regular_cyclic(3)).passed);
    assert!(check_unitary(&Representation::tautological()).passed);
    let mut bad = Representation::tautological();
    bad.generators[0].matrix = Matrix::scalar(1, &p("2*t"));
    bad.generators[0].inverse = Matrix::scalar(1, &p("1/2*t^-1"));
    let rep = check_unitary(&bad);
    assert!(!rep.passed);
    assert_eq!(rep.not_unitary, ["t"]);
    assert!(rep.bad_inverse.is_empty());
}

#[test]
fn dual_identification_is_invertible() {
    let one = dual_pairing_identify(&Representation::trivial(&["t"]), 1);
    assert_eq!(one, Matrix::identity(1));
    let two = dual_pairing_identify(&Representation::tautological(), 2);
    assert_eq!(two.shape(), (2, 2));
    assert!(Ring::Laurent.is_unit(&two.determinant()));
    let reg = dual_pairing_identify(&Representation::regular_cyclic(2), 1);
    assert_eq!(reg.shape(), (2, 2));
    assert!(Ring::Integers.is_unit(&reg.determinant()));
}

#[test]
fn change_of_coefficients() {
    let circle = circle_complex();
    let aug = tensor_with_v(&Representation::trivial(&["t"]), &circle.complex).unwrap();
    assert!(aug.boundary(1).is_zero());
    let lam = tensor_with_v(&Representation::tautological(), &circle.complex).unwrap();
    assert_eq!(lam.boundary(1), Matrix::scalar(1, &p("t - 1")));
    let reg = tensor_with_v(&Representation::regular_cyclic(3), &circle.complex).unwrap();
    let d = reg.boundary(1);
    let cyc = ints(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]);
    assert_eq!(d, cyc.sub(&Matrix::identity(3)));
    let snf = smith_normal_form(Ring::Integers, &d).unwrap();
    assert_eq!(snf.rank, 2);
    let h0 = homology(&reg, 0).unwrap();
    assert_eq!(h0.annihilators, vec![RingElement::zero()]);
}

#[test]
fn relations_are_checked_after_tensoring() {
    for lp in 2..=7 {
        let gc = lens_cells(lp, 1).unwrap();
        assert!(tensor_with_v(&Representation::regular_cyclic(lp as usize), &gc.complex).is_ok());
        // a (p+1)-cycle does not satisfy t^p = 1
        assert!(tensor_with_v(&Representation::regular_cyclic(lp as usize + 1), &gc.complex).is_err());
    }
}

fn word() -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((0usize..2, -2i64..=2), 0..5)
}

fn element(rel: &Arc<GroupRelations>, terms: Vec<(Vec<(usize, i64)>, i64)>) -> GroupRingElement {
    terms.into_iter().fold(GroupRingElement::zero_in(rel), |acc, (w, c)| {
        acc.add(&GroupRingElement::word(rel, GroupWord(w).normalize(rel), c))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn represent_is_multiplicative(a in word(), b in word(), ca in -3i64..=3, cb in -3i64..=3) {
        let rel = GroupRelations::free(&["s", "t"]);
        let rep = two_generator_rep();
        let x = element(&rel, vec![(a.clone(), ca), (vec![], 1)]);
        let y = element(&rel, vec![(b, cb), (a, 1)]);
        let xy = x.mul(&y);
        prop_assert_eq!(represent(&xy, &rep).unwrap(), represent(&x, &rep).unwrap().mul(&represent(&y, &rep).unwrap()));
        prop_assert_eq!(represent(&GroupRingElement::int(&rel, 1), &rep).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn involution_inverts_words(a in word(), c in -3i64..=3) {
        let rel = GroupRelations::free(&["s", "t"]);
        let x = element(&rel, vec![(a, c)]);
        prop_assert_eq!(x.conj().conj(), x.clone());
        let rep = two_generator_rep();
        let w = represent(&x.conj(), &rep).unwrap();
        let z = represent(&x, &rep).unwrap();
        if c != 0 && x.terms().count() == 1 {
            let scale = RingElement::int(c * c);
            prop_assert_eq!(w.mul(&z), Matrix::identity(2).scale(&scale));
        }
    }

    #[test]
    fn unitary_reps_preserve_theta(v in prop::collection::vec(-4i64..=4, 3), w in prop::collection::vec(-4i64..=4, 3)) {
        let rep = Representation::regular_cyclic(3);
        let g = &rep.generators[0].matrix;
        let col = |x: &Vec<i64>| Matrix::column(x.iter().map(|&e| RingElement::int(e)).collect());
        let (v, w) = (col(&v), col(&w));
        let form = |a: &Matrix<RingElement>, b: &Matrix<RingElement>| b.conj_transpose().mul(&rep.theta).mul(a);
        prop_assert_eq!(form(&g.mul(&v), &g.mul(&w)), form(&v, &w));
    }
}
