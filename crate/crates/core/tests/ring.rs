use blanchfield_core::ring_core::{euclidean_divmod, fraction_arith, involution, mod_ring, rat, FractionOp};
use blanchfield_core::{Fraction, Ring, RingElement, TorsionValue};
use proptest::prelude::*;

fn p(s: &str) -> RingElement {
    RingElement::parse(s).unwrap()
}

fn f(ring: Ring, s: &str) -> Fraction {
    Fraction::parse(ring, s).unwrap()
}

#[test]
fn involution_examples() {
    assert_eq!(involution(&p("2 + 3*t")), p("2 + 3*t^-1"));
    assert_eq!(involution(&p("5")), p("5"));
    let a = involution(&p("t^2 - t + 1"));
    assert_eq!(a, p("t^-2 - t^-1 + 1"));
    assert_eq!(&p("t") * &a, p("t^-1 - 1 + t"));
}

#[test]
fn divmod_examples() {
    let (q, r) = euclidean_divmod(Ring::Integers, &p("7"), &p("3")).unwrap();
    assert_eq!((q, r), (p("2"), p("1")));
    let (q, r) = euclidean_divmod(Ring::Laurent, &p("t^2 - 1"), &p("t - 1")).unwrap();
    assert_eq!((q, r), (p("t + 1"), RingElement::zero()));
    let (a, b) = (p("t^2 + 1"), p("t + 2"));
    let (q, r) = euclidean_divmod(Ring::Laurent, &a, &b).unwrap();
    assert!(r.is_constant());
    assert_eq!(&(&q * &b) + &r, a);
    // t^2 + 1 = (t - 2)(t + 2) + 5
    assert_eq!(r, p("5"));
    assert!(euclidean_divmod(Ring::Integers, &p("1"), &RingElement::zero()).is_err());
}

#[test]
fn mod_ring_examples() {
    assert!(mod_ring(&f(Ring::Laurent, "(t^2 + 1)/(t)")).is_zero());
    let x = mod_ring(&f(Ring::Laurent, "1/(t - 1)"));
    assert!(!x.is_zero());
    assert_eq!(x.fraction().den(), &p("t - 1"));
    let h = mod_ring(&f(Ring::Integers, "3/2"));
    assert_eq!(h.to_string(), "1/2");
}

#[test]
fn fraction_arith_examples() {
    let a = f(Ring::Laurent, "1/(t - 1)");
    let b = f(Ring::Laurent, "-1/(t - 1)");
    assert!(fraction_arith(FractionOp::Add(&a, &b)).is_zero());
    let c = fraction_arith(FractionOp::Conj(&a));
    assert!(c.cross_equal(&f(Ring::Laurent, "(-t)/(t - 1)")));
    assert_eq!(c.den(), &p("t - 1"));
    let prod = fraction_arith(FractionOp::Mul(&f(Ring::Integers, "1/2"), &f(Ring::Integers, "2/3")));
    assert_eq!(prod.to_string(), "1/3");
}

#[test]
fn laurent_canonical_denominator() {
    let x = Fraction::new(Ring::Laurent, p("1"), p("-2*t^-1 + 4")).unwrap();
    // -2 t^-1 + 4 = (2 t^-1)(2t - 1): monic with nonzero constant term
    assert_eq!(x.den(), &p("t - 1/2"));
    assert!(x.cross_equal(&Fraction::new(Ring::Laurent, p("t"), p("4*t - 2")).unwrap()));
}

#[test]
fn printer_round_trips() {
    for s in ["0", "5", "3/2", "2*t^-1 + 1 - t^3", "t^2 - t + 1", "-1/3*t^-4 + t^7"] {
        let a = p(s);
        assert_eq!(p(&a.to_string()), a);
    }
    let v = TorsionValue::parse(Ring::Laurent, "(t)/(t^2 - t + 1)").unwrap();
    assert_eq!(v.to_string(), "(t)/(t^2 - t + 1)");
}

#[test]
fn content_units() {
    let xs = [p("1/2*t^-1 + 3/4"), p("-3/2*t^2")];
    let u = Ring::Laurent.content_unit(&xs).unwrap();
    assert_eq!(u, p("4*t"));
    assert_eq!(&u * &xs[0], p("2 + 3*t"));
    assert_eq!(Ring::Rationals.content_unit(&[p("2/3"), p("4")]).unwrap(), p("3/2"));
    assert!(Ring::Integers.content_unit(&[p("2")]).is_none());
    assert!(Ring::Laurent.content_unit(&[RingElement::zero()]).is_none());
}

fn laurent() -> impl Strategy<Value = RingElement> {
    prop::collection::vec((-3i64..=3, -4i64..=4), 0..4)
        .prop_map(|terms| RingElement::from_terms(terms.into_iter().map(|(k, c)| (k, rat(c)))))
}

fn nonzero_poly() -> impl Strategy<Value = RingElement> {
    laurent().prop_filter("nonzero", |a| !a.is_zero())
}

fn integer() -> impl Strategy<Value = RingElement> {
    (-50i64..=50).prop_map(RingElement::int)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn involution_is_anti_automorphism(a in laurent(), b in laurent()) {
        prop_assert_eq!((&a * &b).involution(), &b.involution() * &a.involution());
        prop_assert_eq!(a.involution().involution(), a.clone());
        prop_assert_eq!((&a + &b).involution(), &a.involution() + &b.involution());
    }

    #[test]
    fn divmod_round_trip(a in laurent(), b in nonzero_poly()) {
        let ring = Ring::Laurent;
        let (q, r) = euclidean_divmod(ring, &a, &b).unwrap();
        prop_assert_eq!(&(&q * &b) + &r, a);
        if !r.is_zero() {
            prop_assert!(ring.norm(&r).unwrap() < ring.norm(&b).unwrap());
        }
    }

    #[test]
    fn integer_divmod_round_trip(a in integer(), b in integer().prop_filter("nonzero", |b| !b.is_zero())) {
        let ring = Ring::Integers;
        let (q, r) = euclidean_divmod(ring, &a, &b).unwrap();
        prop_assert_eq!(&(&q * &b) + &r, a);
        if !r.is_zero() {
            prop_assert!(ring.norm(&r).unwrap() < ring.norm(&b).unwrap());
        }
    }

    #[test]
    fn mod_ring_is_linear(n1 in laurent(), d1 in nonzero_poly(), n2 in laurent(), d2 in nonzero_poly(), r in laurent()) {
        let x = Fraction::new(Ring::Laurent, n1, d1).unwrap();
        let y = Fraction::new(Ring::Laurent, n2, d2).unwrap();
        prop_assert!(mod_ring(&x.add(&y)).class_eq(&mod_ring(&x).add(&mod_ring(&y))));
        prop_assert!(mod_ring(&x.mul_ring(&r)).class_eq(&mod_ring(&x).mul_ring(&r)));
        prop_assert_eq!(mod_ring(&x).is_zero(), x.in_ring());
    }

    #[test]
    fn canonical_form_is_stable(n in laurent(), d in nonzero_poly(), m in nonzero_poly()) {
        let x = Fraction::new(Ring::Laurent, n.clone(), d.clone()).unwrap();
        let again = Fraction::new(Ring::Laurent, x.num().clone(), x.den().clone()).unwrap();
        prop_assert_eq!(&again, &x);
        let scaled = Fraction::new(Ring::Laurent, &n * &m, &d * &m).unwrap();
        prop_assert_eq!(&scaled, &x);
        prop_assert!(scaled.cross_equal(&x));
        let t = mod_ring(&x);
        prop_assert_eq!(mod_ring(t.fraction()), t);
    }

    #[test]
    fn equality_agrees_with_cross_multiplication(n1 in laurent(), d1 in nonzero_poly(), n2 in laurent(), d2 in nonzero_poly()) {
        let x = Fraction::new(Ring::Laurent, n1, d1).unwrap();
        let y = Fraction::new(Ring::Laurent, n2, d2).unwrap();
        prop_assert_eq!(x == y, x.cross_equal(&y));
    }

    #[test]
    fn fraction_conj_is_involutive(n in laurent(), d in nonzero_poly()) {
        let x = Fraction::new(Ring::Laurent, n, d).unwrap();
        prop_assert_eq!(x.conj().conj(), x.clone());
        let c = x.conj();
        prop_assert!(c.cross_equal(&Fraction::new(Ring::Laurent, x.num().involution(), x.den().involution()).unwrap()));
    }

    #[test]
    fn parse_round_trip(a in laurent()) {
        prop_assert_eq!(RingElement::parse(&a.to_string()).unwrap(), a);
    }
}
