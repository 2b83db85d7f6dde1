use blanchfield_core::builders::{circle_complex, closed_structure, lens_cells, top_cell, torus_complex};
use blanchfield_core::group_ring::Representation;
use blanchfield_core::symmetric_structure::diagonal::{check_diagonal, diagonal_approximation, Lift};
use blanchfield_core::symmetric_structure::{check_symmetric, is_poincare_closed};

#[test]
fn circle_diagonal_relations() {
    let gc = circle_complex();
    let d = diagonal_approximation(&gc.complex, &gc.rel, Lift::Canonical).unwrap();
    let rep = check_diagonal(&gc.complex, &d).unwrap();
    assert!(rep.passed, "{rep:?}");
}

#[test]
fn torus_and_lens_diagonals() {
    for gc in [torus_complex(), lens_cells(5, 2).unwrap(), lens_cells(3, 1).unwrap()] {
        for how in [Lift::Canonical, Lift::Perturbed(7)] {
            let d = diagonal_approximation(&gc.complex, &gc.rel, how).unwrap();
            let rep = check_diagonal(&gc.complex, &d).unwrap();
            assert!(rep.passed, "{rep:?}");
        }
    }
}

#[test]
fn closed_structures_pass() {
    let sc = closed_structure(&circle_complex(), &top_cell(1, 1), 1, Lift::Canonical).unwrap();
    let lam = sc.tensor_with(&Representation::tautological()).unwrap();
    assert!(check_symmetric(&lam).passed);
    assert!(is_poincare_closed(&lam).unwrap().passed);
    let tor = torus_complex();
    let chain = top_cell(2, 1);
    closed_structure(&tor, &chain, 2, Lift::Canonical).unwrap();
    for p in 2..=7 {
        let gc = lens_cells(p, 1).unwrap();
        let sc = closed_structure(&gc, &top_cell(3, 1), 3, Lift::Canonical).unwrap();
        let z = sc.tensor_with(&Representation::trivial(&["t"])).unwrap();
        assert!(check_symmetric(&z).passed);
        let r = is_poincare_closed(&z).unwrap(); assert!(r.passed, "p = {p} {r:?} {:?}", z.phi);
    }
}

#[test]
fn knot_triads_certify() {
    use blanchfield_core::builders::{knot_triad, SeifertData};
    for v in [SeifertData::unknot(), SeifertData::trefoil(), SeifertData::figure_eight()] {
        let t = knot_triad(&v).unwrap_or_else(|e| panic!("{e}"));
        assert!(t.sigma.as_ref().unwrap().homotopy.is_some());
    }
}

#[test]
fn knot_triads_are_poincare() {
    use blanchfield_core::builders::{knot_triad, SeifertData};
    use blanchfield_core::symmetric_structure::{check_triad, is_poincare};
    for v in [SeifertData::unknot(), SeifertData::trefoil(), SeifertData::figure_eight()] {
        let t = knot_triad(&v).unwrap();
        for rep in [Representation::tautological(), Representation::trivial(&["t"]), Representation::regular_cyclic(2), Representation::regular_cyclic(3)] {
            let x = t.tensor_with(&rep).unwrap();
            assert!(check_triad(&x).unwrap().passed);
            let p = is_poincare(&x).unwrap();
            assert!(p.passed, "{p:?}");
        }
    }
}

mod extra {
    use blanchfield_core::builders::{knot_triad, lens_cells, lens_complex, torus_complex, LensData, SeifertData};
    use blanchfield_core::chain_complex::tensor;
    use blanchfield_core::group_ring::{represent_matrix, Representation};
    use blanchfield_core::homology_engine::{is_null_homotopic, NullHomotopy};
    use blanchfield_core::symmetric_structure::diagonal::{delta0_chain_map, diagonal_approximation, Lift};
    use blanchfield_core::symmetric_structure::{check_pair, check_symmetric, is_poincare, union, Cobordism};
    use blanchfield_core::{ChainMap, Ring, RingElement};

    fn knot_pairs() -> Vec<blanchfield_core::SymmetricPair<RingElement>> {
        let t = knot_triad(&SeifertData::trefoil()).unwrap().tensor_with(&Representation::tautological()).unwrap();
        vec![t.pair_a(), t.pair_b()]
    }

    #[test]
    fn perturbed_structure_is_located() {
        let sc = lens_complex(&LensData::new(3, 1).unwrap(), 1).unwrap();
        let mut z = sc.tensor_with(&Representation::trivial(&["t"])).unwrap();
        assert!(check_symmetric(&z).passed);
        let block = z.phi[1].get_mut(&3).unwrap();
        let e = block.get(0, 0).clone();
        block.set(0, 0, &e + &RingElement::int(1));
        let rep = check_symmetric(&z);
        assert!(!rep.passed);
        // over Z the boundaries out of degrees 1 and 3 vanish, so only the T term sees it
        let at: Vec<_> = rep.failures.iter().map(|f| (f.s, f.r)).collect();
        assert_eq!(at, [(2, 1), (2, 3)]);
    }

    #[test]
    fn knot_pairs_pass() {
        for p in knot_pairs() {
            let rep = check_pair(&p);
            assert!(rep.passed && rep.checked > 0, "{rep:?}");
        }
    }

    #[test]
    fn union_along_zero_is_direct_sum() {
        let [pa, pb]: [_; 2] = knot_pairs().try_into().unwrap();
        let left = Cobordism::from_pair_incoming(&pa);
        let right = Cobordism::from_pair_outgoing(&pb);
        let glued = union(&left, &right).unwrap();
        assert_eq!(glued.d, left.d.direct_sum(&right.d));
        assert!(check_pair(&glued.as_pair()).passed);
    }

    #[test]
    fn union_with_negated_reverse() {
        let p = knot_pairs().remove(0);
        let out = Cobordism::from_pair_outgoing(&p);
        let closed = union(&out, &Cobordism::from_pair_incoming(&p.negated())).unwrap();
        assert!(closed.c.is_empty() && closed.c2.is_empty());
        assert!(check_pair(&closed.as_pair()).passed);
        // the shared structures must agree
        assert!(union(&out, &Cobordism::from_pair_incoming(&p)).is_err());
    }

    #[test]
    fn zero_duality_is_not_poincare() {
        let t = knot_triad(&SeifertData::figure_eight()).unwrap();
        let mut x = t.tensor_with(&Representation::tautological()).unwrap();
        assert!(is_poincare(&x).unwrap().passed);
        for m in x.big_phi[0].values_mut() {
            *m = blanchfield_core::Matrix::zeros(m.rows(), m.cols());
        }
        assert!(!is_poincare(&x).unwrap().passed);
    }

    #[test]
    fn diagonal_lifts_are_homotopic() {
        for (gc, names) in [(torus_complex(), vec!["s", "t"]), (lens_cells(5, 2).unwrap(), vec!["t"])] {
            let trivial = Representation::trivial(&names);
            let a = delta0_chain_map(&gc.complex, &diagonal_approximation(&gc.complex, &gc.rel, Lift::Canonical).unwrap()).unwrap();
            let b = delta0_chain_map(&gc.complex, &diagonal_approximation(&gc.complex, &gc.rel, Lift::Perturbed(7)).unwrap()).unwrap();
            let rep = |m: &blanchfield_core::Matrix<_>| represent_matrix(m, &trivial);
            let src = gc.complex.try_map_ring(Ring::Integers, 1, rep).unwrap();
            let tgt = tensor(&gc.complex, &gc.complex).unwrap().try_map_ring(Ring::Integers, 1, rep).unwrap();
            let maps = gc.complex.degrees().map(|r| (r, rep(&a.get(r).sub(&b.get(r))).unwrap())).collect();
            let diff = ChainMap::new(src, tgt, maps).unwrap();
            assert!(diff.is_chain_map());
            match is_null_homotopic(&diff).unwrap() {
                NullHomotopy::Found(k) => assert!(k.witnesses(&diff)),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn equivariant_homotopy_between_lifts() {
        use blanchfield_core::symmetric_structure::diagonal::{diagonal_homotopy, DiagonalHomotopy};
        for gc in [super::circle_complex(), torus_complex(), lens_cells(3, 1).unwrap()] {
            let a = diagonal_approximation(&gc.complex, &gc.rel, Lift::Canonical).unwrap();
            let b = diagonal_approximation(&gc.complex, &gc.rel, Lift::Perturbed(9)).unwrap();
            assert_ne!(a, b);
            let k = diagonal_homotopy(&gc.complex, &a, &b).unwrap();
            assert!(k.failures(&gc.complex, &a, &b).unwrap().is_empty());
            assert!(diagonal_homotopy(&gc.complex, &a, &a).unwrap().maps.is_empty());
            let zero = DiagonalHomotopy { rel: gc.rel.clone(), maps: Default::default() };
            assert!(!zero.failures(&gc.complex, &a, &b).unwrap().is_empty());
        }
    }
}
