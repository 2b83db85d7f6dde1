use blanchfield_core::blanchfield::{Blanchfield, Side, Verdict};
use blanchfield_core::builders::{knot_triad, lens_complex, LensData, SeifertData};
use blanchfield_core::group_ring::Representation;
use blanchfield_core::{Ring, RingElement, SymmetricTriad};

fn knot(v: &SeifertData) -> Blanchfield {
    let t = knot_triad(v).unwrap().tensor_with(&Representation::tautological()).unwrap();
    Blanchfield::new(&t).unwrap()
}

fn lens(p: i64, q: i64, orientation: i64) -> Blanchfield {
    let sc = lens_complex(&LensData::new(p, q).unwrap(), orientation).unwrap();
    let z = sc.tensor_with(&Representation::trivial(&["t"])).unwrap();
    Blanchfield::new(&SymmetricTriad::closed(&z)).unwrap()
}

fn t() -> RingElement {
    RingElement::parse("t").unwrap()
}

#[test]
fn unknot_pairing_is_empty() {
    let bl = knot(&SeifertData::unknot());
    for side in [Side::Cohomology, Side::Homology] {
        assert!(bl.pairing_matrix(side).unwrap().is_empty());
    }
    assert_eq!(bl.check_nonsingular().unwrap().verdict, Verdict::Pass);
}

#[test]
fn trefoil_homology_value() {
    let pm = knot(&SeifertData::trefoil()).pairing_matrix(Side::Homology).unwrap();
    assert_eq!(pm.size(), (1, 1));
    assert_eq!(pm.entries[0][0].to_string(), "(t)/(t^2 - t + 1)");
    assert_eq!(pm.left_annihilators[0].to_string(), "t^2 - t + 1");
}

#[test]
fn figure_eight_module() {
    let pm = knot(&SeifertData::figure_eight()).pairing_matrix(Side::Homology).unwrap();
    assert_eq!(pm.size(), (1, 1));
    assert_eq!(pm.left_annihilators[0].to_string(), "t^2 - 3*t + 1");
    assert_eq!(pm.entries[0][0].fraction().den().to_string(), "t^2 - 3*t + 1");
}

#[test]
fn slots_scale_by_t_and_its_conjugate() {
    let bl = knot(&SeifertData::trefoil());
    let pm = bl.pairing_matrix(Side::Cohomology).unwrap();
    let (y, x) = (&pm.left_cochains[0], &pm.right_cochains[0]);
    let base = bl.pairing_value(y, x).unwrap();
    let ty: Vec<_> = y.iter().map(|e| &t() * e).collect();
    let tx: Vec<_> = x.iter().map(|e| &t() * e).collect();
    assert!(bl.pairing_value(&ty, x).unwrap().class_eq(&base.mul_ring(&t())));
    assert!(bl.pairing_value(y, &tx).unwrap().class_eq(&base.mul_ring(&t().involution())));
    assert!(!base.mul_ring(&t()).class_eq(&base));
}

#[test]
fn well_defined_and_sesquilinear_on_knots() {
    for v in [SeifertData::trefoil(), SeifertData::figure_eight()] {
        let bl = knot(&v);
        let w = bl.check_well_defined(15, 3).unwrap();
        assert!(w.passed && w.checked > 0, "{w:?}");
        let s = bl.check_sesquilinear(15, 4).unwrap();
        assert!(s.passed && s.checked > 0, "{s:?}");
    }
}

#[test]
fn annihilators_kill_entries() {
    for bl in [knot(&SeifertData::trefoil()), lens(5, 2, 1)] {
        let pm = bl.pairing_matrix(Side::Cohomology).unwrap();
        for (i, row) in pm.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                assert!(e.mul_ring(&pm.left_annihilators[i]).is_zero());
                assert!(e.mul_ring(&pm.right_annihilators[j].involution()).is_zero());
            }
        }
    }
}

#[test]
fn homology_side_is_cohomology_side_on_lifts() {
    let bl = knot(&SeifertData::figure_eight());
    let h = bl.pairing_matrix(Side::Homology).unwrap();
    let y = bl.lift_a(&h.left[0]).unwrap();
    let x = bl.lift_b(&h.right[0]).unwrap();
    assert!(bl.pairing_value(&y, &x).unwrap().class_eq(&h.entries[0][0]));
}

#[test]
fn hermitian_on_knots() {
    for v in [SeifertData::trefoil(), SeifertData::figure_eight()] {
        let rep = knot(&v).check_hermitian().unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.residual.is_empty());
        assert!(rep.checked_pairs > 0);
    }
}

#[test]
fn hermitian_on_lens_spaces() {
    for p in 2..=5 {
        let rep = lens(p, 1, 1).check_hermitian().unwrap();
        assert!(rep.passed && rep.residual.is_empty(), "p = {p}: {rep:?}");
        assert_eq!(rep.homotopy, "supplied");
    }
}

#[test]
fn asymmetric_structure_fails_hermitian() {
    let sc = lens_complex(&LensData::new(3, 1).unwrap(), 1).unwrap();
    let mut z = sc.tensor_with(&Representation::trivial(&["t"])).unwrap();
    z.phi.truncate(1);
    let block = z.phi[0].get_mut(&3).unwrap();
    let e = block.get(0, 0).clone();
    block.set(0, 0, &e + &RingElement::int(3));
    let triad = SymmetricTriad::closed(&z);
    assert!(Blanchfield::new(&triad).is_err());
    let rep = Blanchfield::unchecked(&triad).unwrap().check_hermitian().unwrap();
    assert!(!rep.passed);
    assert!(!rep.residual.is_empty());
}

#[test]
fn nonsingular_forms() {
    let mut cases = vec![knot(&SeifertData::trefoil()), knot(&SeifertData::figure_eight())];
    cases.extend((2..=7).map(|p| lens(p, 1, 1)));
    for bl in cases {
        let rep = bl.check_nonsingular().unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{rep:?}");
    }
}

#[test]
fn lens_forms_and_orientation() {
    let value = |p, q, o| lens(p, q, o).pairing_matrix(Side::Homology).unwrap().entries[0][0].to_string();
    assert_eq!(value(2, 1, 1), "1/2");
    assert_eq!(value(3, 1, 1), "1/3");
    assert_eq!(value(3, 1, -1), "2/3");
    assert_eq!(value(7, 3, 1), "3/7");
    let pm = lens(4, 1, 1).pairing_matrix(Side::Homology).unwrap();
    assert_eq!(pm.ring, Ring::Integers);
}
