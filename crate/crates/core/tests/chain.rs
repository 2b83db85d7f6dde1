use blanchfield_core::builders::lens_cells;
use blanchfield_core::chain_complex::*;
use blanchfield_core::homology_engine::{homology, is_acyclic, is_null_homotopic, NullHomotopy};
use blanchfield_core::ring_core::rat;
use blanchfield_core::{ChainMap, Complex, Matrix, Ring, RingElement};
use proptest::prelude::*;

fn p(s: &str) -> RingElement {
    RingElement::parse(s).unwrap()
}

fn scalar(s: &str) -> Matrix<RingElement> {
    Matrix::scalar(1, &p(s))
}

fn circle() -> Complex<RingElement> {
    Complex::new(Ring::Laurent, 0, vec![1, 1], vec![scalar("t - 1")]).unwrap()
}

#[test]
fn validate_examples() {
    assert!(circle().validate().passed);
    let bad = Complex::new(Ring::Integers, 0, vec![1, 1, 1], vec![scalar("1"), scalar("1")]).unwrap();
    let rep = bad.validate();
    assert!(!rep.passed);
    assert_eq!(rep.nonzero_square, vec![2]);
    for q in [1, 2] {
        assert!(lens_cells(5, q).unwrap().complex.validate().passed);
    }
}

#[test]
fn dual_examples() {
    let c = circle();
    let d = c.dual(3);
    assert_eq!((d.lo(), d.hi()), (2, 3));
    assert_eq!(d.boundary(3), scalar("-t^-1 + 1"));
    assert!(Complex::<RingElement>::zero(Ring::Laurent).dual(3).is_empty());
    let dd = double_dual_map(&c, 3);
    assert!(dd.is_chain_map());
    assert_eq!(dd.target, c.dual(3).dual(3));
}

#[test]
fn tensor_of_circles() {
    let c = circle();
    let t = tensor(&c, &c).unwrap();
    assert_eq!((t.rank(0), t.rank(1), t.rank(2)), (1, 2, 1));
    assert!(t.validate().passed);
    let point: Complex<RingElement> = Complex::new(Ring::Laurent, 0, vec![1], vec![]).unwrap();
    let tp = tensor(&point, &point).unwrap();
    assert_eq!((tp.lo(), tp.hi(), tp.rank(0)), (0, 0, 1));
    assert!(tensor(&c, &Complex::<RingElement>::zero(Ring::Laurent)).unwrap().is_empty());
}

#[test]
fn hom_examples() {
    let c = circle();
    let point: Complex<RingElement> = Complex::new(Ring::Laurent, 0, vec![1], vec![]).unwrap();
    assert_eq!(hom_complex(&point, &c).unwrap(), c);
    let to_point = hom_complex(&c, &point).unwrap();
    assert_eq!((to_point.lo(), to_point.hi()), (-1, 0));
    assert_eq!(to_point.boundary(0), c.boundary(1).transpose().signed(1));
    assert!(hom_complex(&c, &c).unwrap().validate().passed);
}

#[test]
fn transposition_signs() {
    let a = Matrix::from_rows(vec![vec![p("1"), p("t")]]).unwrap();
    assert_eq!(transpose_tensor(&a, 1, 1), a.conj_transpose().signed(-1));
    assert_eq!(transpose_tensor(&a, 0, 3), a.conj_transpose());
    let b = Matrix::from_rows(vec![vec![p("t"), p("2")]]).unwrap();
    let c = Complex::new(Ring::Laurent, 0, vec![1, 2], vec![Matrix::zeros(1, 2)]).unwrap();
    // psi_1: C^0 -> C_1 and psi_0: C^1 -> C_0
    let psi: Family<RingElement> = [(1, Matrix::column(vec![p("1"), p("t")])), (0, b.clone())].into();
    let t = transpose_t(&psi, &c, 1);
    assert_eq!(t[&1], b.conj_transpose());
    assert_eq!(t[&0], Matrix::from_rows(vec![vec![p("1"), p("t^-1")]]).unwrap());
    assert_eq!(transpose_t(&t, &c, 1), psi);
}

#[test]
fn cone_examples() {
    let c = circle();
    assert!(is_acyclic(&mapping_cone(&c.identity_map()).unwrap().cone).unwrap().is_empty());
    let z = Complex::zero(Ring::Laurent);
    let g = ChainMap::zero(&z, &c);
    assert_eq!(mapping_cone(&g).unwrap().cone, c);
    let point: Complex<RingElement> = Complex::new(Ring::Laurent, 0, vec![1], vec![]).unwrap();
    let f = ChainMap::new(point.clone(), point, [(0, scalar("t - 1"))].into()).unwrap();
    let cone = mapping_cone(&f).unwrap().cone;
    assert_eq!(homology(&cone, 0).unwrap().annihilators, vec![p("t - 1")]);
    assert!(homology(&cone, 1).unwrap().is_zero());
}

#[test]
fn null_homotopy_examples() {
    let c = circle();
    match is_null_homotopic(&ChainMap::zero(&c, &c)).unwrap() {
        NullHomotopy::Found(k) => assert!(k.maps.values().all(|m| m.is_zero())),
        other => panic!("{other:?}"),
    }
}

fn laurent() -> impl Strategy<Value = RingElement> {
    prop::collection::vec((-2i64..=2, -3i64..=3), 0..3)
        .prop_map(|terms| RingElement::from_terms(terms.into_iter().map(|(k, c)| (k, rat(c)))))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix<RingElement>> {
    prop::collection::vec(laurent(), rows * cols)
        .prop_map(move |v| Matrix::from_fn(rows, cols, |i, j| v[i * cols + j].clone()))
}

/// Three-term complexes d1 = [X 0], d2 = [0; Y], so d1 d2 = 0 by shape.
fn complex() -> impl Strategy<Value = Complex<RingElement>> {
    (1usize..=2, 0usize..=2, 1usize..=2, 0usize..=2)
        .prop_flat_map(|(a0, b1, c1, c2)| (Just((a0, b1, c1, c2)), matrix(a0, b1), matrix(c1, c2)))
        .prop_map(|((a0, b1, c1, c2), x, y)| {
            let d1 = x.hstack(&Matrix::zeros(a0, c1));
            let d2 = Matrix::zeros(b1, c2).vstack(&y);
            Complex::new(Ring::Laurent, 0, vec![a0, b1 + c1, c2], vec![d1, d2]).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tensor_and_hom_square_to_zero(c in complex(), d in complex()) {
        prop_assert!(tensor(&c, &d).unwrap().validate().passed);
        prop_assert!(hom_complex(&c, &d).unwrap().validate().passed);
    }

    #[test]
    fn double_dual_is_a_chain_isomorphism(c in complex(), m in -2i64..=4) {
        let dd = double_dual_map(&c, m);
        prop_assert!(dd.is_chain_map());
        prop_assert_eq!(c.dual(m).dual(m).validate().passed, true);
    }

    #[test]
    fn slant_intertwines_boundaries(c in complex()) {
        let tc = tensor(&c, &c).unwrap();
        let hc = hom_complex(&cochain_complex(&c), &c).unwrap();
        let s = slant_complex(&c);
        for n in tc.lo() + 1..=tc.hi() {
            let lhs = s[&(n - 1)].mul(&tc.boundary(n));
            let rhs = hc.boundary(n).mul(&s[&n]);
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn transposition_is_involutive(a in matrix(2, 3), p in 0i64..=3, q in 0i64..=3) {
        prop_assert_eq!(transpose_tensor(&transpose_tensor(&a, p, q), q, p), a);
    }

    #[test]
    fn constructed_homotopies_are_found(c in complex(), k1 in matrix(4, 2)) {
        // f = d k + k d for k: C_0 -> C_1
        let k0 = k1.submatrix(&(0..c.rank(1)).collect::<Vec<_>>(), &(0..c.rank(0)).collect::<Vec<_>>());
        let k = ChainHomotopy { maps: [(0, k0)].into() };
        let maps = c.degrees().map(|r| {
            let a = c.boundary(r + 1).mul(&k.get(r, &c, &c));
            let b = k.get(r - 1, &c, &c).mul(&c.boundary(r));
            (r, a.add(&b))
        }).collect();
        let f = ChainMap::new(c.clone(), c.clone(), maps).unwrap();
        match is_null_homotopic(&f).unwrap() {
            NullHomotopy::Found(h) => prop_assert!(h.witnesses(&f)),
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn identity_cone_is_acyclic(c in complex()) {
        let cone = mapping_cone(&c.identity_map()).unwrap().cone;
        prop_assert!(cone.validate().passed);
        prop_assert!(is_acyclic(&cone).unwrap().is_empty());
    }
}
