//! Generators of validated symmetric structures and independent oracles.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use crate::blanchfield::{Blanchfield, PairingMatrix, Side};
use crate::chain_complex::{ChainHomotopy, ChainMap, Complex, Family};
use crate::error::{Error, Result};
use crate::group_ring::{laurent_to_group, represent_matrix, GroupRelations, GroupRingElement, Representation};
use crate::homology_engine::{homology, is_null_homotopic, torsion_part, NullHomotopy};
use crate::matrix::Matrix;
use crate::ring_core::{as_i64, mod_ring, rat, Fraction, Ring, RingElement, RingOps, TorsionValue};
use crate::symmetric_structure::diagonal::{
    augmented_boundary, diagonal_approximation, symmetric_from_fundamental, FundamentalChain, Lift,
};
use crate::symmetric_structure::{
    check_symmetric, check_triad, is_poincare, Sigma, SplitInjection, SymmetricComplex, SymmetricTriad,
};

type G = GroupRingElement;

/// A complex over Z[pi] together with its group.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupComplex {
    pub rel: Arc<GroupRelations>,
    pub complex: Complex<G>,
}

fn gm(rel: &Arc<GroupRelations>, rows: Vec<Vec<&str>>) -> Result<Matrix<G>> {
    let rows = rows
        .into_iter()
        .map(|r| r.into_iter().map(|s| G::parse(rel, s)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows)
}

/// The circle: one vertex and one edge with boundary t - 1.
pub fn circle_complex() -> GroupComplex {
    let rel = GroupRelations::infinite_cyclic();
    let b1 = gm(&rel, vec![vec!["t - 1"]]).expect("circle boundary");
    let complex = Complex::new(Ring::Integers, 0, vec![1, 1], vec![b1]).expect("circle complex");
    GroupComplex { rel, complex }
}

/// The torus as a product of two circles over Z[Z^2] with generators s, t.
pub fn torus_complex() -> GroupComplex {
    let rel = GroupRelations::free_abelian(&["s", "t"]);
    let b1 = gm(&rel, vec![vec!["s - 1", "t - 1"]]).expect("torus d1");
    let b2 = gm(&rel, vec![vec!["1 - t"], vec!["s - 1"]]).expect("torus d2");
    let complex = Complex::new(Ring::Integers, 0, vec![1, 2, 1], vec![b1, b2]).expect("torus complex");
    GroupComplex { rel, complex }
}

/// Inverse of q modulo p in [1, p).
pub fn inverse_mod(q: i64, p: i64) -> Result<i64> {
    let (mut a, mut b, mut x0, mut x1) = (q.rem_euclid(p), p, 1i64, 0i64);
    while b != 0 {
        let k = a / b;
        (a, b) = (b, a - k * b);
        (x0, x1) = (x1, x0 - k * x1);
    }
    if a != 1 {
        return Err(Error::Invalid(format!("gcd({q}, {p}) != 1")));
    }
    Ok(x0.rem_euclid(p))
}

/// The universal cover of L(p, q) with one cell per degree:
/// d1 = t - 1, d2 = 1 + t + ... + t^{p-1}, d3 = t^{q'} - 1 with q q' = 1 mod p.
pub fn lens_cells(p: i64, q: i64) -> Result<GroupComplex> {
    if p < 2 {
        return Err(Error::Invalid(format!("p = {p}: the one-cell-per-degree structure needs p >= 2")));
    }
    let qi = inverse_mod(q, p)?;
    let rel = GroupRelations::cyclic(p as u32);
    let t = |e: i64| G::gen_pow(&rel, 0, e);
    let one = G::int(&rel, 1);
    let norm = (0..p).fold(G::zero_in(&rel), |acc, k| RingOps::add(&acc, &t(k)));
    let d1 = Matrix::scalar(1, &RingOps::sub(&t(1), &one));
    let d2 = Matrix::scalar(1, &norm);
    let d3 = Matrix::scalar(1, &RingOps::sub(&t(qi), &one));
    let complex = Complex::new(Ring::Integers, 0, vec![1, 1, 1, 1], vec![d1, d2, d3])?;
    complex.check()?;
    Ok(GroupComplex { rel, complex })
}

/// The symmetric structure slant(Delta_s[M]) of a closed complex from a
/// fundamental cycle, certified by the residual check.
pub fn closed_structure(gc: &GroupComplex, chain: &FundamentalChain, n: i64, how: Lift) -> Result<SymmetricComplex<G>> {
    if !augmented_boundary(&gc.complex, chain)?.is_empty() {
        return Err(Error::Invalid("fundamental chain is not a cycle".into()));
    }
    let diag = diagonal_approximation(&gc.complex, &gc.rel, how)?;
    let phi = symmetric_from_fundamental(&gc.complex, &diag, chain, n)?;
    let sc = SymmetricComplex { complex: gc.complex.clone(), n, phi };
    let rep = check_symmetric(&sc);
    if !rep.passed {
        return Err(Error::Invalid(format!("structure residuals are nonzero: {:?}", rep.failures)));
    }
    Ok(sc)
}

/// The fundamental chain `sign * top cell` of a one-cell-per-degree complex.
pub fn top_cell(n: i64, orientation: i64) -> FundamentalChain {
    BTreeMap::from([((n, 0), orientation)])
}

// ---------------------------------------------------------------------------
// Knots from Seifert matrices

/// A 2g x 2g integer Seifert matrix with V - V^T unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeifertData {
    v: Vec<Vec<i64>>,
}

impl SeifertData {
    pub fn new(v: Vec<Vec<i64>>) -> Result<Self> {
        let n = v.len();
        if !n.is_multiple_of(2) || v.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid(format!("a Seifert matrix must be square of even size, got {n} rows")));
        }
        let d = Matrix::from_fn(n, n, |i, j| RingElement::int(v[i][j] - v[j][i])).determinant();
        let c = d.constant_term();
        if !d.is_constant() || (c != rat(1) && c != rat(-1)) {
            return Err(Error::Invalid(format!("V - V^T has determinant {d}, not +-1")));
        }
        Ok(SeifertData { v })
    }

    pub fn unknot() -> Self {
        SeifertData { v: Vec::new() }
    }

    pub fn trefoil() -> Self {
        SeifertData { v: vec![vec![-1, 1], vec![0, -1]] }
    }

    pub fn figure_eight() -> Self {
        SeifertData { v: vec![vec![1, 1], vec![0, -1]] }
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.v
    }

    pub fn size(&self) -> usize {
        self.v.len()
    }

    pub fn matrix(&self) -> Matrix<RingElement> {
        let n = self.size();
        Matrix::from_fn(n, n, |i, j| RingElement::int(self.v[i][j]))
    }

    /// Phi_0 on the algebraic piece in degrees 2 and 1:
    /// (1 - t^-1) J^-1 V J^-1 V^T and (1 - t) V J^-1 V^T J^-1 with J = V - V^T.
    /// This is the structure (t^-1 - 1, t - 1) pushed forward along the chain
    /// map (-J^-1 V, -V J^-1), which acts as (t - 1)^-1 on the Alexander module.
    fn duality_blocks(&self, rel: &Arc<GroupRelations>) -> Result<(Matrix<G>, Matrix<G>)> {
        let v = self.matrix();
        let vt = v.transpose();
        let j = v.sub(&vt);
        let ji = adjugate(&j).scale(&j.determinant());
        let two = ji.mul(&v).mul(&ji).mul(&vt).scale(&RingElement::parse("1 - t^-1")?);
        let one = v.mul(&ji).mul(&vt).mul(&ji).scale(&RingElement::parse("1 - t")?);
        Ok((laurent_to_group(rel, &two)?, laurent_to_group(rel, &one)?))
    }

    /// tV - V^T over Q[t, t^-1].
    pub fn alexander_matrix(&self) -> Matrix<RingElement> {
        let v = self.matrix();
        v.scale(&RingElement::t_pow(1)).sub(&v.transpose())
    }
}

/// S^1 x D^2 over Z[Z]: products of the circle cells o, c with the disk
/// cells a, b (vertices), alpha, beta (edges from a to b) and F (the face
/// with boundary alpha - beta).
#[derive(Clone, Debug, PartialEq)]
pub struct SolidTorus {
    pub cells: GroupComplex,
    /// Cell names per degree, in basis order.
    pub names: BTreeMap<i64, Vec<&'static str>>,
}

impl SolidTorus {
    pub fn index_of(&self, name: &str) -> (i64, usize) {
        for (r, list) in &self.names {
            if let Some(i) = list.iter().position(|x| *x == name) {
                return (*r, i);
            }
        }
        panic!("unknown cell {name}");
    }

    /// Basis positions of the named cells, per degree.
    pub fn positions(&self, names: &[&str]) -> BTreeMap<i64, Vec<usize>> {
        let mut out: BTreeMap<i64, Vec<usize>> = (0..=3).map(|r| (r, Vec::new())).collect();
        for (r, list) in &self.names {
            for (i, x) in list.iter().enumerate() {
                if names.contains(x) {
                    out.get_mut(r).unwrap().push(i);
                }
            }
        }
        out
    }

    pub fn chain(&self, terms: &[(&str, i64)]) -> FundamentalChain {
        terms.iter().map(|(n, c)| (self.index_of(n), *c)).collect()
    }
}

pub fn solid_torus() -> SolidTorus {
    let rel = GroupRelations::infinite_cyclic();
    let names: BTreeMap<i64, Vec<&'static str>> = BTreeMap::from([
        (0, vec!["oa", "ob"]),
        (1, vec!["ca", "cb", "oA", "oB"]),
        (2, vec!["cA", "cB", "oF"]),
        (3, vec!["cF"]),
    ]);
    let d1 = gm(&rel, vec![vec!["t - 1", "0", "-1", "-1"], vec!["0", "t - 1", "1", "1"]]).expect("d1");
    let d2 = gm(
        &rel,
        vec![
            vec!["1", "1", "0"],
            vec!["-1", "-1", "0"],
            vec!["t - 1", "0", "1"],
            vec!["0", "t - 1", "-1"],
        ],
    )
    .expect("d2");
    let d3 = gm(&rel, vec![vec!["-1"], vec!["1"], vec!["t - 1"]]).expect("d3");
    let complex = Complex::new(Ring::Integers, 0, vec![2, 4, 3, 1], vec![d1, d2, d3]).expect("solid torus");
    SolidTorus { cells: GroupComplex { rel, complex }, names }
}

fn sub_complex(c: &Complex<G>, idx: &BTreeMap<i64, Vec<usize>>) -> Result<Complex<G>> {
    let get = |r: i64| idx.get(&r).cloned().unwrap_or_default();
    let lo = idx.iter().find(|(_, v)| !v.is_empty()).map_or(0, |x| *x.0);
    let hi = idx.iter().rev().find(|(_, v)| !v.is_empty()).map_or(-1, |x| *x.0);
    Complex::from_fn(c.ring, lo, hi, |r| get(r).len(), |r| c.boundary(r).submatrix(&get(r - 1), &get(r)))
}

fn restrict_family(fam: &Family<G>, idx: &BTreeMap<i64, Vec<usize>>, m: i64) -> Family<G> {
    let get = |r: i64| idx.get(&r).cloned().unwrap_or_default();
    fam.iter()
        .filter(|(r, _)| !get(**r).is_empty() && !get(m - **r).is_empty())
        .map(|(r, x)| (*r, x.submatrix(&get(*r), &get(m - r))))
        .collect()
}

/// Coordinate injection of `sub` into `sup` (both position lists in a
/// common ambient basis), shifted by `offset(r)` in the target.
fn coordinate_injection(
    sub: &BTreeMap<i64, Vec<usize>>,
    sup: &BTreeMap<i64, Vec<usize>>,
    target_rank: impl Fn(i64) -> usize,
    offset: impl Fn(i64) -> usize,
) -> SplitInjection<G> {
    let rel = GroupRelations::infinite_cyclic();
    let mut map = BTreeMap::new();
    let mut splitting = BTreeMap::new();
    for (r, list) in sub {
        if list.is_empty() {
            continue;
        }
        let rows: Vec<usize> = list.iter().map(|x| offset(*r) + sup[r].iter().position(|y| y == x).unwrap()).collect();
        let m = Matrix::from_fn(target_rank(*r), list.len(), |i, j| G::int(&rel, if rows[j] == i { 1 } else { 0 }));
        splitting.insert(*r, m.transpose());
        map.insert(*r, m);
    }
    SplitInjection { map, splitting }
}

/// The symmetric Poincare triad of a knot exterior with boundary torus
/// split into two annuli, over Z[Z].
///
/// C is the direct sum of a closed algebraic piece E (Z[Z]^{2g} in degrees
/// 2 and 1 with boundary tV - V^T and Phi_0 given by (t^-1 - 1) and (t - 1)),
/// which carries the Alexander module, and the cellular chains of a solid
/// torus S^1 x D^2 with its boundary split as A = S^1 x alpha and
/// B = S^1 x beta along D = S^1 x {a, b}. The solid torus structures come
/// from its diagonal approximation and fundamental chains, sigma from the
/// half-turn of D^2 exchanging alpha and beta. Every piece is certified
/// before the triad is returned.
pub fn knot_triad(v: &SeifertData) -> Result<SymmetricTriad<G>> {
    let st = solid_torus();
    let rel = st.cells.rel.clone();
    let geo = &st.cells.complex;
    let diag = diagonal_approximation(geo, &rel, Lift::Canonical)?;

    let d_idx = st.positions(&["oa", "ob", "ca", "cb"]);
    let a_idx = st.positions(&["oa", "ob", "ca", "cb", "oA", "cA"]);
    let b_idx = st.positions(&["oa", "ob", "ca", "cb", "oB", "cB"]);
    let all: BTreeMap<i64, Vec<usize>> = (0..=3).map(|r| (r, (0..geo.rank(r)).collect())).collect();

    let fam = |chain: &[(&str, i64)], m: i64| symmetric_from_fundamental(geo, &diag, &st.chain(chain), m);
    let chi_full = fam(&[("ca", 1), ("cb", -1)], 1)?;
    let phi_a_full = fam(&[("cA", 1)], 2)?;
    let phi_b_full = fam(&[("cB", 1)], 2)?;
    let phi_geo = fam(&[("cF", 1)], 3)?;

    let d = sub_complex(geo, &d_idx)?;
    let a = sub_complex(geo, &a_idx)?;
    let b = sub_complex(geo, &b_idx)?;
    let restrict = |list: &[Family<G>], idx: &BTreeMap<i64, Vec<usize>>, n: i64| -> Vec<Family<G>> {
        list.iter().enumerate().map(|(s, f)| restrict_family(f, idx, n + s as i64)).collect()
    };
    let chi = restrict(&chi_full, &d_idx, 1);
    let phi_a = restrict(&phi_a_full, &a_idx, 2);
    let phi_b = restrict(&phi_b_full, &b_idx, 2);

    // the algebraic piece
    let g2 = v.size();
    let p = laurent_to_group(&rel, &v.alexander_matrix())?;
    let e = if g2 == 0 {
        Complex::zero(Ring::Integers)
    } else {
        Complex::new(Ring::Integers, 1, vec![g2, g2], vec![p])?
    };
    let c = e.direct_sum(geo);
    let er = |r: i64| e.rank(r);
    let (theta2, theta1) = if g2 == 0 {
        (Matrix::zeros(0, 0), Matrix::zeros(0, 0))
    } else {
        v.duality_blocks(&rel)?
    };
    let mut big_phi = Vec::new();
    for (s, f) in phi_geo.iter().enumerate() {
        let m = 3 + s as i64;
        let mut out = Family::new();
        for r in c.degrees() {
            let (rows, cols) = (c.rank(r), c.rank(m - r));
            if rows == 0 || cols == 0 {
                continue;
            }
            let theta = match (s, r) {
                (0, 2) => theta2.clone(),
                (0, 1) => theta1.clone(),
                _ => Matrix::from_fn(er(r), er(m - r), |_, _| G::zero_in(&rel)),
            };
            let gpart = f.get(&r).cloned().unwrap_or_else(|| Matrix::from_fn(geo.rank(r), geo.rank(m - r), |_, _| G::zero_in(&rel)));
            out.insert(r, theta.direct_sum(&gpart));
        }
        big_phi.push(out);
    }

    let j_a = coordinate_injection(&d_idx, &a_idx, |r| a.rank(r), |_| 0);
    let j_b = coordinate_injection(&d_idx, &b_idx, |r| b.rank(r), |_| 0);
    let i_a = coordinate_injection(&a_idx, &all, |r| c.rank(r), er);
    let i_b = coordinate_injection(&b_idx, &all, |r| c.rank(r), er);

    let mut triad = SymmetricTriad {
        dim: 3,
        d,
        a,
        b,
        c,
        j_a,
        j_b,
        i_a,
        i_b,
        chi,
        phi_a,
        phi_b,
        big_phi,
        sigma: None,
    };
    let rotation = half_turn(&st, &e)?;
    let fixed = (0..=3).map(|r| (r, er(r))).collect();
    triad.sigma = Some(sigma_with_fixed_summand(&triad, &rotation, &fixed)?);
    certify_triad(&triad)?;
    Ok(triad)
}


/// The half-turn of the disk (a <-> b, alpha -> -beta, beta -> -alpha,
/// F -> F) times the identity of S^1, extended by the identity on E.
fn half_turn(st: &SolidTorus, e: &Complex<G>) -> Result<BTreeMap<i64, Matrix<G>>> {
    let rel = &st.cells.rel;
    let images: [(&str, &str, i64); 10] = [
        ("oa", "ob", 1),
        ("ob", "oa", 1),
        ("ca", "cb", 1),
        ("cb", "ca", 1),
        ("oA", "oB", -1),
        ("oB", "oA", -1),
        ("cA", "cB", -1),
        ("cB", "cA", -1),
        ("oF", "oF", 1),
        ("cF", "cF", 1),
    ];
    let mut out = BTreeMap::new();
    for r in 0..=3 {
        let n = st.cells.complex.rank(r);
        let mut m = Matrix::from_fn(n, n, |_, _| G::zero_in(rel));
        for (src, dst, sg) in images {
            let (rs, i) = st.index_of(src);
            if rs != r {
                continue;
            }
            let (_, j) = st.index_of(dst);
            m.set(j, i, G::int(rel, sg));
        }
        let id = Matrix::from_fn(e.rank(r), e.rank(r), |i, j| G::int(rel, if i == j { 1 } else { 0 }));
        out.insert(r, id.direct_sum(&m));
    }
    Ok(out)
}

fn g_identity(rel: &Arc<GroupRelations>, n: usize) -> Matrix<G> {
    Matrix::from_fn(n, n, |i, j| G::int(rel, if i == j { 1 } else { 0 }))
}

/// Complement coordinates of a coordinate injection, per degree.
fn complement_rows(inj: &SplitInjection<G>, target: &Complex<G>) -> BTreeMap<i64, Vec<usize>> {
    target
        .degrees()
        .map(|r| {
            let hit: Vec<usize> = match inj.map.get(&r) {
                Some(m) => (0..m.cols()).map(|j| (0..m.rows()).find(|&i| !m.get(i, j).is_zero()).unwrap()).collect(),
                None => Vec::new(),
            };
            (r, (0..target.rank(r)).filter(|i| !hit.contains(i)).collect())
        })
        .collect()
}

/// sigma = q_A rho s_B for a chain automorphism rho of C carrying B onto A,
/// in the coordinate quotient bases, with a witness of sigma q_B ~ q_A found
/// over Q[t, t^-1] and checked to be integral.
pub fn annulus_sigma(t: &SymmetricTriad<G>, rho: &BTreeMap<i64, Matrix<G>>) -> Result<Sigma<G>> {
    sigma_with_fixed_summand(t, rho, &BTreeMap::new())
}

/// As [`annulus_sigma`], where the first `fixed[r]` coordinates of C_r span a
/// summand away from A and B on which rho is the identity. The witness is
/// solved on the complement and extended by zero.
fn sigma_with_fixed_summand(
    t: &SymmetricTriad<G>,
    rho: &BTreeMap<i64, Matrix<G>>,
    fixed: &BTreeMap<i64, usize>,
) -> Result<Sigma<G>> {
    let c = &t.c;
    let rel = crate::symmetric_structure::diagonal::relations_of(c)
        .ok_or_else(|| Error::Invalid("complex has no group data".into()))?;
    if rel.generators.len() != 1 || rel.orders[0] != 0 {
        return Err(Error::UnsupportedRing("the homotopy witness is computed over Z[Z] only".into()));
    }
    let rho_map = ChainMap { source: c.clone(), target: c.clone(), maps: rho.clone() };
    if !rho_map.is_chain_map() {
        return Err(Error::Invalid(format!("rotation is not a chain map in degrees {:?}", rho_map.failures())));
    }
    let rest_a = complement_rows(&t.i_a, c);
    let rest_b = complement_rows(&t.i_b, c);
    let mut map = BTreeMap::new();
    for r in c.degrees() {
        let id = g_identity(&rel, c.rank(r));
        let q_a = id.select_rows(&rest_a[&r]);
        let s_b = id.select_cols(&rest_b[&r]);
        // rho must carry B into A: q_A rho i_B = 0
        let ib = t.i_b.get(r, &t.b, c);
        if !q_a.mul(&rho[&r]).mul(&ib).is_zero() {
            return Err(Error::Invalid(format!("rotation does not carry B into A in degree {r}")));
        }
        map.insert(r, q_a.mul(&rho[&r]).mul(&s_b));
    }
    // witness over the tautological representation
    let taut = Representation::tautological();
    let lam = |m: &Matrix<G>| represent_matrix(m, &taut);
    let cl = c.try_map_ring(Ring::Laurent, 1, lam)?;
    let qa_c = sub_quotient(&cl, &rest_a)?;
    let mut diff = BTreeMap::new();
    for r in c.degrees() {
        let id = Matrix::<RingElement>::identity(c.rank(r));
        let q_a = id.select_rows(&rest_a[&r]);
        let q_b = id.select_rows(&rest_b[&r]);
        diff.insert(r, lam(&map[&r])?.mul(&q_b).sub(&q_a));
    }
    let f = ChainMap { source: cl, target: qa_c, maps: diff };
    if !f.is_chain_map() {
        return Err(Error::Invalid("sigma q_B - q_A is not a chain map".into()));
    }
    let homotopy = match null_homotopy_off_summand(&f, fixed)? {
        NullHomotopy::Found(k) => {
            let mut out = BTreeMap::new();
            for (r, m) in k.maps {
                match laurent_to_group(&rel, &m) {
                    Ok(x) => {
                        out.insert(r, x);
                    }
                    Err(_) => return Err(Error::NoSolution("the homotopy witness is not integral".into())),
                }
            }
            Some(out)
        }
        NullHomotopy::Obstructed(r) => {
            return Err(Error::NoSolution(format!("sigma q_B is not homotopic to q_A (degree {r})")))
        }
    };
    Ok(Sigma { map, homotopy })
}

/// Null homotopy of f that vanishes on the leading `fixed[r]` coordinates of
/// source and target, found on the complementary summands.
fn null_homotopy_off_summand(f: &ChainMap<RingElement>, fixed: &BTreeMap<i64, usize>) -> Result<NullHomotopy> {
    if fixed.values().all(|&k| k == 0) {
        return is_null_homotopic(f);
    }
    let lead = |r: i64| fixed.get(&r).copied().unwrap_or(0);
    let rest = |c: &Complex<RingElement>| -> BTreeMap<i64, Vec<usize>> { c.degrees().map(|r| (r, (lead(r)..c.rank(r)).collect())).collect() };
    let keep = |c: &Complex<RingElement>| -> BTreeMap<i64, Vec<usize>> { c.degrees().map(|r| (r, (0..lead(r).min(c.rank(r))).collect())).collect() };
    let (src_rest, tgt_rest) = (rest(&f.source), rest(&f.target));
    let (src_keep, tgt_keep) = (keep(&f.source), keep(&f.target));
    let get = |m: &BTreeMap<i64, Vec<usize>>, r: i64| m.get(&r).cloned().unwrap_or_default();
    for (c, keep, rest) in [(&f.source, &src_keep, &src_rest), (&f.target, &tgt_keep, &tgt_rest)] {
        for r in c.degrees() {
            let d = c.boundary(r);
            if !d.submatrix(&get(keep, r - 1), &get(rest, r)).is_zero() || !d.submatrix(&get(rest, r - 1), &get(keep, r)).is_zero() {
                return Err(Error::Invalid(format!("fixed coordinates are not a summand in degree {r}")));
            }
        }
    }
    for r in f.source.degrees() {
        let m = f.get(r);
        if !m.submatrix(&get(&tgt_keep, r), &(0..m.cols()).collect::<Vec<_>>()).is_zero()
            || !m.submatrix(&(0..m.rows()).collect::<Vec<_>>(), &get(&src_keep, r)).is_zero()
        {
            return Err(Error::Invalid(format!("the map does not vanish on the fixed summand in degree {r}")));
        }
    }
    let source = sub_quotient(&f.source, &src_rest)?;
    let target = sub_quotient(&f.target, &tgt_rest)?;
    let maps = f.source.degrees().map(|r| (r, f.get(r).submatrix(&get(&tgt_rest, r), &get(&src_rest, r)))).collect();
    let part = ChainMap { source, target, maps };
    let k = match is_null_homotopic(&part)? {
        NullHomotopy::Found(k) => k,
        other => return Ok(other),
    };
    let mut full = ChainHomotopy { maps: BTreeMap::new() };
    for (r, m) in &k.maps {
        let (rows, cols) = (f.target.rank(r + 1), f.source.rank(*r));
        let (r0, c0) = (rows - m.rows(), cols - m.cols());
        full.maps.insert(*r, Matrix::from_fn(rows, cols, |i, j| if i >= r0 && j >= c0 { m.get(i - r0, j - c0).clone() } else { RingElement::zero() }));
    }
    if !full.witnesses(f) {
        return Err(Error::Invalid("extended witness does not solve the homotopy equation".into()));
    }
    Ok(NullHomotopy::Found(full))
}

fn sub_quotient(c: &Complex<RingElement>, rest: &BTreeMap<i64, Vec<usize>>) -> Result<Complex<RingElement>> {
    let get = |r: i64| rest.get(&r).cloned().unwrap_or_default();
    Complex::from_fn(c.ring, c.lo(), c.hi(), |r| get(r).len(), |r| c.boundary(r).submatrix(&get(r - 1), &get(r)))
}

/// Residual check of a built triad; builders refuse to return failures.
pub fn certify_triad(t: &SymmetricTriad<G>) -> Result<()> {
    let rep = check_triad(t)?;
    if !rep.passed {
        return Err(Error::Invalid(format!(
            "built triad fails its structure checks: {:?} {:?}",
            rep.errors, rep.failures
        )));
    }
    let poincare = is_poincare(&t.tensor_with(&Representation::tautological())?)?;
    if !poincare.passed {
        let bad: Vec<&String> = poincare.parts.iter().filter(|p| !p.1.passed).map(|p| &p.0).collect();
        return Err(Error::Invalid(format!("built triad is not Poincare: {bad:?} {:?}", poincare.not_chain_maps)));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Oracles and derived forms

/// Global unit (sign, power of t) in the Seifert formula, chosen so that the
/// formula agrees with the chain-level pairing of [`knot_triad`].
pub const SEIFERT_UNIT: (i64, i64) = (1, 0);

fn adjugate(p: &Matrix<RingElement>) -> Matrix<RingElement> {
    let n = p.rows();
    if n == 1 {
        return Matrix::identity(1);
    }
    Matrix::from_fn(n, n, |i, j| {
        let rows: Vec<usize> = (0..n).filter(|&x| x != j).collect();
        let cols: Vec<usize> = (0..n).filter(|&x| x != i).collect();
        let minor = p.submatrix(&rows, &cols).determinant();
        if (i + j) % 2 == 0 {
            minor
        } else {
            minor.neg()
        }
    })
}

/// Bl(y, x) = u conj(x)^T (t - 1)(tV - V^T)^{-1} y mod Q[t, t^-1], with the
/// inverse taken as adj/det so that no linear solver is involved.
pub fn seifert_value(v: &SeifertData, y: &[RingElement], x: &[RingElement]) -> Result<TorsionValue> {
    let n = v.size();
    if y.len() != n || x.len() != n {
        return Err(Error::Invalid(format!("expected vectors of length {n}")));
    }
    if n == 0 {
        return Ok(TorsionValue::zero(Ring::Laurent));
    }
    let p = v.alexander_matrix();
    let adj = adjugate(&p);
    let ay = adj.mul_vec(y);
    let mut num = RingElement::zero();
    for (xi, ai) in x.iter().zip(&ay) {
        num = num.add(&xi.involution().mul(ai));
    }
    let (sign, power) = SEIFERT_UNIT;
    let unit = RingElement::monomial(rat(sign), power);
    let num = num.mul(&RingElement::from_coeffs(0, &[-1, 1])).mul(&unit);
    Ok(mod_ring(&Fraction::new(Ring::Laurent, num, p.determinant())?))
}

/// The Seifert-formula pairing on the torsion generators of coker(tV - V^T).
pub fn seifert_oracle(v: &SeifertData) -> Result<PairingMatrix> {
    let n = v.size();
    let e = if n == 0 {
        Complex::zero(Ring::Laurent)
    } else {
        Complex::new(Ring::Laurent, 1, vec![n, n], vec![v.alexander_matrix()])?
    };
    let h = torsion_part(&homology(&e, 1)?);
    let entries = h
        .generators
        .iter()
        .map(|y| h.generators.iter().map(|x| seifert_value(v, y, x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(PairingMatrix {
        side: Side::Homology,
        ring: Ring::Laurent,
        left: h.generators.clone(),
        left_annihilators: h.annihilators.clone(),
        right: h.generators.clone(),
        right_annihilators: h.annihilators,
        left_cochains: Vec::new(),
        right_cochains: Vec::new(),
        entries,
    })
}

/// Comparison of the chain-level homology pairing of a knot triad with the
/// Seifert formula, on the triad's own generators.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleAgreement {
    pub chain_level: PairingMatrix,
    pub oracle: Vec<Vec<TorsionValue>>,
    pub exact: bool,
}

/// The E-coordinates of a cycle of C/A or C/B are its first 2g entries, so
/// the triad's generators are read as elements of coker(tV - V^T).
pub fn seifert_agreement(v: &SeifertData) -> Result<OracleAgreement> {
    let t = knot_triad(v)?.tensor_with(&Representation::tautological())?;
    let chain_level = Blanchfield::new(&t)?.pairing_matrix(Side::Homology)?;
    let n = v.size();
    let oracle = chain_level
        .left
        .iter()
        .map(|y| chain_level.right.iter().map(|x| seifert_value(v, &y[..n], &x[..n])).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let exact = chain_level.entries.len() == oracle.len()
        && chain_level.entries.iter().zip(&oracle).all(|(a, b)| a.len() == b.len() && a.iter().zip(b).all(|(p, q)| p.class_eq(q)));
    Ok(OracleAgreement { chain_level, oracle, exact })
}

/// A random genus-g Seifert matrix S + J^+ with S symmetric, entries of S in
/// [-bound, bound] and J^+ the upper half of the standard symplectic form,
/// so that V - V^T = J is unimodular.
pub fn random_seifert(genus: usize, bound: i64, rng: &mut impl Rng) -> SeifertData {
    let n = 2 * genus;
    let mut v = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i..n {
            let x = rng.gen_range(-bound..=bound);
            v[i][j] = x;
            v[j][i] = x;
        }
    }
    for k in 0..genus {
        v[2 * k][2 * k + 1] += 1;
    }
    SeifertData { v }
}

/// Lens space parameters, gcd(p, q) = 1 and p >= 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LensData {
    pub p: i64,
    pub q: i64,
}

impl LensData {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p <= 0 {
            return Err(Error::Invalid(format!("p = {p} must be positive")));
        }
        inverse_mod(q, p)?;
        Ok(LensData { p, q })
    }
}

/// The symmetric structure of L(p, q) over Z[Z_p] with fundamental class
/// `orientation` times the top cell.
pub fn lens_complex(l: &LensData, orientation: i64) -> Result<SymmetricComplex<G>> {
    if orientation != 1 && orientation != -1 {
        return Err(Error::Invalid(format!("orientation must be +-1, got {orientation}")));
    }
    closed_structure(&lens_cells(l.p, l.q)?, &top_cell(3, orientation), 3, Lift::Canonical)
}

/// The Q/Z linking form of L(p, q) on H_1, with its orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct LensForm {
    pub data: LensData,
    pub orientation: i64,
    pub form: PairingMatrix,
}

pub fn lens_form(l: &LensData, orientation: i64) -> Result<LensForm> {
    let sc = lens_complex(l, orientation)?;
    let t = SymmetricTriad::closed(&sc).tensor_with(&Representation::trivial(&["t"]))?;
    let form = Blanchfield::new(&t)?.pairing_matrix(Side::Homology)?;
    Ok(LensForm { data: *l, orientation, form })
}

/// The Q/Z-valued form on H_1 of the k-fold branched cover, from the knot
/// triad with the regular representation of Z_k.
pub fn branched_cover_form(v: &SeifertData, k: usize) -> Result<PairingMatrix> {
    if k < 2 {
        return Err(Error::Invalid(format!("k = {k} must be at least 2")));
    }
    let t = knot_triad(v)?.tensor_with(&Representation::regular_cyclic(k))?;
    let bl = Blanchfield::new(&t)?;
    let h = homology(bl.c_mod_a(), 1)?;
    if h.annihilators.iter().any(|a| a.is_zero()) {
        return Err(Error::Invalid(format!("H_1 of the {k}-fold cover is not torsion")));
    }
    bl.pairing_matrix(Side::Homology)
}

/// For two forms on cyclic groups Z/p with values a/p and b/p, a unit u and
/// sign e with a = e u^2 b mod p, if any.
pub fn cyclic_isometry(a: &PairingMatrix, b: &PairingMatrix) -> Result<Option<(i64, i64)>> {
    let value = |m: &PairingMatrix| -> Result<(i64, i64)> {
        if m.size() != (1, 1) {
            return Err(Error::Invalid(format!("expected a form on a cyclic group, got size {:?}", m.size())));
        }
        let f = m.entries[0][0].fraction();
        let (num, den) = (as_i64(f.num()), as_i64(f.den()));
        match (num, den) {
            (Some(n), Some(d)) => {
                let p = as_i64(&m.left_annihilators[0]).map(i64::abs).unwrap_or(0);
                if p == 0 || p % d != 0 {
                    return Err(Error::Invalid("value does not have the annihilator as denominator".into()));
                }
                Ok((n * (p / d), p))
            }
            _ => Err(Error::Invalid("not a Q/Z-valued form".into())),
        }
    };
    let (x, p) = value(a)?;
    let (y, q) = value(b)?;
    if p != q {
        return Ok(None);
    }
    for e in [1, -1] {
        for u in 1..p {
            if inverse_mod(u, p).is_ok() && (x - e * u * u * y).rem_euclid(p) == 0 {
                return Ok(Some((u, e)));
            }
        }
    }
    Ok(None)
}
