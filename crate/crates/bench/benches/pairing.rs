use blanchfield_core::blanchfield::{Blanchfield, Side};
use blanchfield_core::builders::{branched_cover_form, knot_triad, lens_complex, LensData, SeifertData};
use blanchfield_core::homology_engine::smith_normal_form;
use blanchfield_core::{Matrix, Representation, Ring, RingElement, SymmetricTriad};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn genus_two() -> SeifertData {
    SeifertData::new(vec![vec![-2, 1, -2, 0], vec![0, -1, -2, 2], vec![-2, -2, 1, 1], vec![0, 2, 0, 2]]).unwrap()
}

fn smith(c: &mut Criterion) {
    let rows = [
        ["-2*t + t^-1", "2*t^-1", "0", "-2*t", "0", "t^2 - t"],
        ["-2*t^-1", "-2*t^-1", "-2", "-2", "-2*t", "t^2 - 1"],
        ["0", "2", "-t^-1", "t", "0", "-2*t^2 - 2"],
        ["-t", "-2*t^-1", "0", "-t^-1", "2*t^-1", "0"],
        ["t^2 - t^-1", "-t", "1 + t^-1", "-1", "t^2 + t^-1", "-2*t"],
        ["0", "-2*t^2", "-1", "t^2", "0", "t^2"],
    ];
    let a = Matrix::from_fn(6, 6, |i, j| RingElement::parse(rows[i][j]).unwrap());
    c.bench_function("smith form 6x6 laurent", |b| b.iter(|| smith_normal_form(Ring::Laurent, black_box(&a)).unwrap()));
}

fn knots(c: &mut Criterion) {
    let mut g = c.benchmark_group("knot");
    g.sample_size(20);
    for (name, v) in [("trefoil", SeifertData::trefoil()), ("genus two", genus_two())] {
        g.bench_function(format!("build {name}"), |b| b.iter(|| knot_triad(black_box(&v)).unwrap()));
        let t = knot_triad(&v).unwrap().tensor_with(&Representation::tautological()).unwrap();
        g.bench_function(format!("pairing {name}"), |b| {
            b.iter(|| Blanchfield::new(black_box(&t)).unwrap().pairing_matrix(Side::Homology).unwrap())
        });
    }
    g.bench_function("double branched cover trefoil", |b| b.iter(|| branched_cover_form(&SeifertData::trefoil(), 2).unwrap()));
    g.finish();
}

fn lens(c: &mut Criterion) {
    let sc = lens_complex(&LensData::new(7, 2).unwrap(), 1).unwrap();
    let t = SymmetricTriad::closed(&sc.tensor_with(&Representation::trivial(&["t"])).unwrap());
    c.bench_function("pairing L(7,2)", |b| b.iter(|| Blanchfield::new(black_box(&t)).unwrap().pairing_matrix(Side::Homology).unwrap()));
}

criterion_group!(benches, smith, knots, lens);
criterion_main!(benches);
