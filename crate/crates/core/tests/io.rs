use std::collections::BTreeMap;

use blanchfield_core::blanchfield::{Blanchfield, Side};
use blanchfield_core::builders::{knot_triad, lens_complex, LensData, SeifertData};
use blanchfield_core::io::*;
use blanchfield_core::symmetric_structure::{check_pair, check_triad, Cobordism};
use blanchfield_core::{Complex, Representation, Ring, RingElement, SymmetricTriad};
use serde_json::json;

fn round_trip(file: &TriadFile) -> TriadFile {
    let text = to_string(&file.to_json());
    let back = TriadFile::read(&parse(&text).unwrap()).unwrap();
    assert_eq!(to_string(&back.to_json()), text);
    back
}

#[test]
fn complex_example() {
    let v = json!({ "ring": "Q[t,t^-1]", "degrees": { "0": 1, "1": 1 }, "boundaries": { "1": [["t - 1"]] } });
    let coef = Coefficients::Ring(Ring::Laurent);
    let c: Complex<RingElement> = complex_from_json(&v, &coef).unwrap();
    assert_eq!((c.lo(), c.hi()), (0, 1));
    assert_eq!(c.boundary(1).get(0, 0), &RingElement::parse("t - 1").unwrap());
    assert_eq!(complex_to_json(&c, &coef), v);

    let shifted = json!({ "ring": "Z", "degrees": { "-1": 2, "1": 1 } });
    let c: Complex<RingElement> = complex_from_json(&shifted, &Coefficients::Ring(Ring::Integers)).unwrap();
    assert_eq!((c.lo(), c.hi(), c.rank(0)), (-1, 1, 0));
}

#[test]
fn malformed_inputs() {
    assert!(parse("{\"ring\": \"Z\", \"degrees\"").is_err());
    let coef = Coefficients::Ring(Ring::Integers);
    let bad_shape = json!({ "ring": "Z", "degrees": { "0": 1, "1": 2 }, "boundaries": { "1": [["1"]] } });
    assert!(complex_from_json::<RingElement>(&bad_shape, &coef).is_err());
    let not_square = json!({ "ring": "Z", "degrees": { "0": 1, "1": 1, "2": 1 }, "boundaries": { "1": [["1"]], "2": [["1"]] } });
    // read fine, rejected by validation
    assert!(!complex_from_json::<RingElement>(&not_square, &coef).unwrap().validate().passed);
    let fraction = json!({ "ring": "Z", "degrees": { "0": 1, "1": 1 }, "boundaries": { "1": [["1/2"]] } });
    assert!(complex_from_json::<RingElement>(&fraction, &coef).is_err());
    let ragged = json!({ "ring": "Z", "degrees": { "0": 2, "1": 2 }, "boundaries": { "1": [["1", "0"], ["1"]] } });
    assert!(complex_from_json::<RingElement>(&ragged, &coef).is_err());
    assert!(TriadFile::read(&json!({ "ring": "R", "dimension": 3, "complexes": {} })).is_err());
    assert!(TriadFile::read(&json!({ "ring": "Z[pi]", "dimension": 3, "complexes": {} })).is_err());
}

#[test]
fn knot_triad_round_trip() {
    let t = knot_triad(&SeifertData::trefoil()).unwrap();
    let rel = blanchfield_core::builders::solid_torus().cells.rel;
    let back = round_trip(&TriadFile::Group(rel, t.clone()));
    let TriadFile::Group(_, u) = back else { panic!("coefficients changed") };
    assert!(check_triad(&u).unwrap().passed);
    let taut = Representation::tautological();
    let before = Blanchfield::new(&t.tensor_with(&taut).unwrap()).unwrap().pairing_matrix(Side::Homology).unwrap();
    let after = Blanchfield::new(&u.tensor_with(&taut).unwrap()).unwrap().pairing_matrix(Side::Homology).unwrap();
    assert!(before.values_eq(&after));
}

#[test]
fn ring_triad_round_trip() {
    let sc = lens_complex(&LensData::new(5, 2).unwrap(), 1).unwrap();
    let z = SymmetricTriad::closed(&sc.tensor_with(&Representation::trivial(&["t"])).unwrap());
    let back = round_trip(&TriadFile::Ring(z.clone()));
    let TriadFile::Ring(u) = back else { panic!("coefficients changed") };
    assert_eq!(u.c, z.c);
    assert!(u.sigma.as_ref().unwrap().homotopy.is_some());
    let pm = Blanchfield::new(&u).unwrap().pairing_matrix(Side::Homology).unwrap();
    assert_eq!(pm.entries[0][0].to_string(), "2/5");
}

#[test]
fn cobordism_round_trip() {
    let t = knot_triad(&SeifertData::figure_eight()).unwrap().tensor_with(&Representation::tautological()).unwrap();
    let cb = Cobordism::from_pair_outgoing(&t.pair_a());
    let file = CobordismFile::Ring(cb);
    let text = to_string(&file.to_json());
    let CobordismFile::Ring(back) = CobordismFile::read(&parse(&text).unwrap()).unwrap() else { panic!() };
    assert_eq!(to_string(&CobordismFile::Ring(back.clone()).to_json()), text);
    assert!(check_pair(&back.as_pair()).passed);
}

#[test]
fn representation_round_trip() {
    for rep in [Representation::tautological(), Representation::regular_cyclic(3), Representation::trivial(&["s", "t"])] {
        let v = representation_to_json(&rep);
        assert_eq!(representation_from_json(&v).unwrap(), rep);
    }
    let v = json!({ "ring": "Z", "dim": 1, "generators": [{ "name": "t", "matrix": [["-1"]], "inverse": [["-1"]] }] });
    let rep = representation_from_json(&v).unwrap();
    assert_eq!(rep.theta, blanchfield_core::Matrix::identity(1));
    let wrong = json!({ "ring": "Z", "dim": 2, "generators": [{ "name": "t", "matrix": [["1"]], "inverse": [["1"]] }] });
    assert!(representation_from_json(&wrong).is_err());
}

#[test]
fn pairing_output_shape() {
    let sc = lens_complex(&LensData::new(2, 1).unwrap(), 1).unwrap();
    let z = SymmetricTriad::closed(&sc.tensor_with(&Representation::trivial(&["t"])).unwrap());
    let pm = Blanchfield::new(&z).unwrap().pairing_matrix(Side::Homology).unwrap();
    let checks = BTreeMap::from([("hermitian".to_string(), true)]);
    let v = pairing_to_json(&pm, &checks);
    assert_eq!(v["matrix"], json!([["1/2"]]));
    assert_eq!(v["annihilators"], json!(["2"]));
    assert_eq!(v["side"], json!("homology"));
    assert_eq!(v["checks"], json!({ "hermitian": true }));
    for key in ["generators_A", "generators_B"] {
        assert_eq!(v[key].as_array().unwrap().len(), 1);
    }
}

#[test]
fn schemas_cover_every_file_kind() {
    let s = schemas();
    let kinds: Vec<_> = s.as_object().unwrap().keys().cloned().collect();
    assert_eq!(kinds, ["cobordism", "complex", "pairing", "representation", "triad"]);
    assert!(s["triad"]["properties"]["dimension"].is_object());
    assert_eq!(to_string(&s), to_string(&schemas()));
}
