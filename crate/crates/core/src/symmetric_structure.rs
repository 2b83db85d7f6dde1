//! Symmetric complexes, pairs and triads, the exact residual checks of their
//! structure equations, the union of cobordisms and quotient complexes.
//!
//! Families follow the conventions of [`crate::chain_complex`]: `phi[s]` has
//! total degree `n + s` and entry `r` maps `C^{n+s-r}` to `C_r`.

pub mod diagonal;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::chain_complex::{
    family_add, family_get, family_push, family_scale, hom_boundary, sign, transpose_t, ChainMap, Complex, Family,
};
use crate::error::{Error, Result};
use crate::group_ring::{represent_matrix, GroupRingElement, Representation};
use crate::homology_engine::{is_quasi_iso, smith_normal_form, solve_matrix, QuasiIsoReport};
use crate::matrix::Matrix;
use crate::ring_core::{RingElement, RingOps};

type M = Matrix<RingElement>;

/// One nonzero residual matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Residual {
    pub part: String,
    pub s: usize,
    pub r: i64,
    pub nonzero_entries: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ResidualReport {
    pub passed: bool,
    /// Number of (part, s, r) residual matrices examined.
    pub checked: usize,
    pub failures: Vec<Residual>,
    /// Structural problems found before any residual could be formed.
    pub errors: Vec<String>,
}

impl ResidualReport {
    fn new() -> Self {
        ResidualReport { passed: true, ..Default::default() }
    }

    fn record<E: RingOps>(&mut self, part: &str, s: usize, fam: &Family<E>) {
        for (r, m) in fam {
            self.checked += 1;
            let nz = m.entries().iter().filter(|x| !x.is_zero()).count();
            if nz > 0 {
                self.passed = false;
                self.failures.push(Residual { part: part.to_string(), s, r: *r, nonzero_entries: nz });
            }
        }
    }

    fn error(&mut self, msg: String) {
        self.passed = false;
        self.errors.push(msg);
    }

    fn absorb(&mut self, prefix: &str, o: ResidualReport) {
        self.passed &= o.passed;
        self.checked += o.checked;
        for mut f in o.failures {
            f.part = format!("{prefix}{}", f.part);
            self.failures.push(f);
        }
        self.errors.extend(o.errors.into_iter().map(|e| format!("{prefix}{e}")));
    }
}

pub(crate) fn at<E: RingOps>(phi: &[Family<E>], s: usize) -> Family<E> {
    phi.get(s).cloned().unwrap_or_default()
}

/// Shape errors of a family list of base total degree n on c.
fn family_shape_errors<E: RingOps>(c: &Complex<E>, n: i64, phi: &[Family<E>], label: &str) -> Vec<String> {
    let mut out = Vec::new();
    for (s, fam) in phi.iter().enumerate() {
        let m = n + s as i64;
        for (r, mat) in fam {
            let want = (c.rank(*r), c.rank(m - r));
            if mat.shape() != want {
                out.push(format!("{label}[{s}] in degree {r} is {:?}, expected {:?}", mat.shape(), want));
            }
        }
    }
    out
}

/// d phi_s + (-1)^r phi_s delta + (-1)^{n+s-1}(phi_{s-1} + (-1)^s T phi_{s-1}).
pub fn symmetric_residual<E: RingOps>(c: &Complex<E>, n: i64, phi: &[Family<E>], s: usize) -> Family<E> {
    let m = n + s as i64;
    let mut res = hom_boundary(&at(phi, s), c, m);
    if s > 0 {
        let prev = at(phi, s - 1);
        let t = transpose_t(&prev, c, m - 1);
        let inner = family_add(&prev, &family_scale(&t, sign(s as i64)));
        res = family_add(&res, &family_scale(&inner, sign(m - 1)));
    }
    res
}

/// Residual of the first pair equation for f: C -> D of dimension n + 1.
pub fn pair_residual<E: RingOps>(
    f: &ChainMap<E>,
    n: i64,
    delta_phi: &[Family<E>],
    phi: &[Family<E>],
    s: usize,
) -> Family<E> {
    let d = &f.target;
    let m = n + 1 + s as i64;
    let mut res = hom_boundary(&at(delta_phi, s), d, m);
    if s > 0 {
        let prev = at(delta_phi, s - 1);
        let t = transpose_t(&prev, d, m - 1);
        let inner = family_add(&prev, &family_scale(&t, sign(s as i64)));
        res = family_add(&res, &family_scale(&inner, sign(n + s as i64)));
    }
    let push = family_push(&at(phi, s), &f.source, n + s as i64, f, f);
    family_add(&res, &family_scale(&push, sign(n)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricComplex<E: RingOps> {
    pub complex: Complex<E>,
    pub n: i64,
    pub phi: Vec<Family<E>>,
}

impl<E: RingOps> SymmetricComplex<E> {
    pub fn s_max(&self) -> usize {
        (self.phi.len().max(1) - 1).max(self.n.max(0) as usize)
    }

    pub fn negated(&self) -> Self {
        SymmetricComplex { phi: self.phi.iter().map(|f| family_scale(f, -1)).collect(), ..self.clone() }
    }

    /// phi_0 as a chain map C^{n-*} -> C.
    pub fn phi0_map(&self) -> ChainMap<E> {
        duality_map(&at(&self.phi, 0), &self.complex, &self.complex, self.n, None)
    }
}

pub fn check_symmetric<E: RingOps>(sc: &SymmetricComplex<E>) -> ResidualReport {
    let mut rep = ResidualReport::new();
    for e in family_shape_errors(&sc.complex, sc.n, &sc.phi, "phi") {
        rep.error(e);
    }
    if !rep.errors.is_empty() {
        return rep;
    }
    for s in 0..=sc.s_max() {
        rep.record("symmetric", s, &symmetric_residual(&sc.complex, sc.n, &sc.phi, s));
    }
    rep
}

/// (f: C -> D, (delta_phi, phi)) of dimension n + 1; phi lives on C with
/// dimension n.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricPair<E: RingOps> {
    pub map: ChainMap<E>,
    pub n: i64,
    pub delta_phi: Vec<Family<E>>,
    pub phi: Vec<Family<E>>,
}

impl<E: RingOps> SymmetricPair<E> {
    pub fn negated(&self) -> Self {
        SymmetricPair {
            map: self.map.clone(),
            n: self.n,
            delta_phi: self.delta_phi.iter().map(|f| family_scale(f, -1)).collect(),
            phi: self.phi.iter().map(|f| family_scale(f, -1)).collect(),
        }
    }

    pub fn boundary(&self) -> SymmetricComplex<E> {
        SymmetricComplex { complex: self.map.source.clone(), n: self.n, phi: self.phi.clone() }
    }
}

pub fn check_pair<E: RingOps>(sp: &SymmetricPair<E>) -> ResidualReport {
    let mut rep = ResidualReport::new();
    let f = &sp.map;
    for e in family_shape_errors(&f.target, sp.n + 1, &sp.delta_phi, "delta_phi") {
        rep.error(e);
    }
    for e in family_shape_errors(&f.source, sp.n, &sp.phi, "phi") {
        rep.error(e);
    }
    for r in f.failures() {
        rep.error(format!("pair map is not a chain map in degree {r}"));
    }
    if !rep.errors.is_empty() {
        return rep;
    }
    let top = (sp.n + 1).max(0) as usize;
    let s_max = top.max(sp.delta_phi.len().max(sp.phi.len()).max(1) - 1);
    for s in 0..=s_max {
        rep.record("pair", s, &pair_residual(f, sp.n, &sp.delta_phi, &sp.phi, s));
        rep.record("boundary", s, &symmetric_residual(&f.source, sp.n, &sp.phi, s));
    }
    rep
}

/// The chain map X^{m-*} -> Y given degreewise by `psi_r` (optionally
/// precomposed with the dual of `pre`: `psi_r * pre_{m-r}^*`).
pub fn duality_map<E: RingOps>(
    psi: &Family<E>,
    x: &Complex<E>,
    y: &Complex<E>,
    m: i64,
    pre: Option<(&BTreeMap<i64, Matrix<E>>, &Complex<E>)>,
) -> ChainMap<E> {
    let (src, base) = match pre {
        Some((_, q)) => (q.dual(m), q),
        None => (x.dual(m), x),
    };
    let maps = y
        .degrees()
        .filter(|&r| y.rank(r) > 0 && base.rank(m - r) > 0)
        .map(|r| {
            let core = family_get(psi, x, m, r);
            let mat = match pre {
                Some((q, qc)) => {
                    let qm = q.get(&(m - r)).cloned().unwrap_or_else(|| Matrix::zeros(qc.rank(m - r), x.rank(m - r)));
                    core.mul(&qm.conj_transpose())
                }
                None => core,
            };
            (r, mat)
        })
        .collect();
    ChainMap { source: src, target: y.clone(), maps }
}

// ---------------------------------------------------------------------------
// Cobordisms and union

/// A cobordism (D; C, C'): the pair ((f_C, f_C'): C + C' -> D, (delta_phi,
/// phi + -phi')).
#[derive(Clone, Debug, PartialEq)]
pub struct Cobordism<E: RingOps> {
    pub n: i64,
    pub d: Complex<E>,
    pub c: Complex<E>,
    pub c2: Complex<E>,
    pub f_c: BTreeMap<i64, Matrix<E>>,
    pub f_c2: BTreeMap<i64, Matrix<E>>,
    pub delta_phi: Vec<Family<E>>,
    pub phi: Vec<Family<E>>,
    pub phi2: Vec<Family<E>>,
}

pub(crate) fn get_map<E: RingOps>(maps: &BTreeMap<i64, Matrix<E>>, r: i64, rows: usize, cols: usize) -> Matrix<E> {
    maps.get(&r).cloned().unwrap_or_else(|| Matrix::zeros(rows, cols))
}

fn families_direct_sum<E: RingOps>(
    a: &Family<E>,
    ca: &Complex<E>,
    b: &Family<E>,
    cb: &Complex<E>,
    m: i64,
    sum: &Complex<E>,
) -> Family<E> {
    sum.degrees()
        .filter(|&r| sum.rank(r) > 0 && sum.rank(m - r) > 0)
        .map(|r| (r, family_get(a, ca, m, r).direct_sum(&family_get(b, cb, m, r))))
        .collect()
}

impl<E: RingOps> Cobordism<E> {
    /// The pair (f: C -> D, (delta_phi, phi)) as a cobordism from C to 0.
    pub fn from_pair_incoming(p: &SymmetricPair<E>) -> Self {
        let ring = p.map.target.ring;
        Cobordism {
            n: p.n,
            d: p.map.target.clone(),
            c: p.map.source.clone(),
            c2: Complex::zero(ring),
            f_c: p.map.maps.clone(),
            f_c2: BTreeMap::new(),
            delta_phi: p.delta_phi.clone(),
            phi: p.phi.clone(),
            phi2: Vec::new(),
        }
    }

    /// The pair as a cobordism from 0 to C, so that phi' = -phi.
    pub fn from_pair_outgoing(p: &SymmetricPair<E>) -> Self {
        let ring = p.map.target.ring;
        Cobordism {
            n: p.n,
            d: p.map.target.clone(),
            c: Complex::zero(ring),
            c2: p.map.source.clone(),
            f_c: BTreeMap::new(),
            f_c2: p.map.maps.clone(),
            delta_phi: p.delta_phi.clone(),
            phi: Vec::new(),
            phi2: p.phi.iter().map(|f| family_scale(f, -1)).collect(),
        }
    }

    pub fn as_pair(&self) -> SymmetricPair<E> {
        let src = self.c.direct_sum(&self.c2);
        let lo = src.lo().min(self.d.lo());
        let hi = src.hi().max(self.d.hi());
        let maps = (lo..=hi)
            .filter(|&r| self.d.rank(r) > 0 && src.rank(r) > 0)
            .map(|r| {
                let a = get_map(&self.f_c, r, self.d.rank(r), self.c.rank(r));
                let b = get_map(&self.f_c2, r, self.d.rank(r), self.c2.rank(r));
                (r, a.hstack(&b))
            })
            .collect();
        let len = self.phi.len().max(self.phi2.len());
        let phi = (0..len)
            .map(|s| {
                let m = self.n + s as i64;
                let neg = family_scale(&at(&self.phi2, s), -1);
                families_direct_sum(&at(&self.phi, s), &self.c, &neg, &self.c2, m, &src)
            })
            .collect();
        SymmetricPair {
            map: ChainMap { source: src, target: self.d.clone(), maps },
            n: self.n,
            delta_phi: self.delta_phi.clone(),
            phi,
        }
    }
}

/// Glue c: (D; C, C') and c2: (D'; C', C'') along C'. The output is the
/// cobordism (D''; C, C'') with D''_r = D_r + C'_{r-1} + D'_r.
pub fn union<E: RingOps>(c: &Cobordism<E>, c2: &Cobordism<E>) -> Result<Cobordism<E>> {
    if c.n != c2.n {
        return Err(Error::Invalid(format!("dimensions {} and {} differ", c.n, c2.n)));
    }
    if c.c2 != c2.c {
        return Err(Error::Invalid("shared boundary complexes differ".into()));
    }
    let len = c.phi2.len().max(c2.phi.len());
    let n = c.n;
    let shared = &c.c2;
    for s in 0..len {
        let (a, b) = (at(&c.phi2, s), at(&c2.phi, s));
        let m = n + s as i64;
        if shared.degrees().any(|r| family_get(&a, shared, m, r) != family_get(&b, shared, m, r)) {
            return Err(Error::Invalid(format!("shared boundary structures differ at s = {s}")));
        }
    }
    let (d, dp, cp) = (&c.d, &c2.d, shared);
    let ring = d.ring;
    let lo = d.lo().min(dp.lo()).min(cp.lo() + 1);
    let hi = d.hi().max(dp.hi()).max(cp.hi() + 1);
    let sizes = |r: i64| [d.rank(r), cp.rank(r - 1), dp.rank(r)];
    let f_cp = |r: i64| get_map(&c.f_c2, r, d.rank(r), cp.rank(r));
    let fp_cp = |r: i64| get_map(&c2.f_c, r, dp.rank(r), cp.rank(r));
    let dd = Complex::from_fn(
        ring,
        lo,
        hi,
        |r| sizes(r).iter().sum(),
        |r| {
            let sg = sign(r - 1);
            Matrix::block(
                &sizes(r - 1),
                &sizes(r),
                &[
                    (0, 0, d.boundary(r)),
                    (0, 1, f_cp(r - 1).signed(sg)),
                    (1, 1, cp.boundary(r - 1)),
                    (2, 1, fp_cp(r - 1).signed(sg)),
                    (2, 2, dp.boundary(r)),
                ],
            )
        },
    )?;
    dd.check()?;

    let fc = |r: i64| {
        let m = get_map(&c.f_c, r, d.rank(r), c.c.rank(r));
        Matrix::block(&sizes(r), &[c.c.rank(r)], &[(0, 0, m)])
    };
    let fcc = |r: i64| {
        let m = get_map(&c2.f_c2, r, dp.rank(r), c2.c2.rank(r));
        Matrix::block(&sizes(r), &[c2.c2.rank(r)], &[(2, 0, m)])
    };
    let f_c = (lo..=hi).filter(|&r| c.c.rank(r) > 0).map(|r| (r, fc(r))).collect();
    let f_c2 = (lo..=hi).filter(|&r| c2.c2.rank(r) > 0).map(|r| (r, fcc(r))).collect();

    let slen = c.delta_phi.len().max(c2.delta_phi.len()).max(len);
    let mut delta_phi = Vec::with_capacity(slen);
    for s in 0..slen {
        let m = n + 1 + s as i64;
        let si = s as i64;
        let (dphi, dphi2) = (at(&c.delta_phi, s), at(&c2.delta_phi, s));
        let phi_s = at(&c.phi2, s);
        let t_prev = if s > 0 { transpose_t(&at(&c.phi2, s - 1), cp, m - 2) } else { Family::new() };
        let mut fam = Family::new();
        for r in lo..=hi {
            let k = m - r;
            let (rs, cs) = (sizes(r), sizes(k));
            if rs.iter().sum::<usize>() == 0 || cs.iter().sum::<usize>() == 0 {
                continue;
            }
            let e21 = family_get(&phi_s, cp, m - 1, r - 1).mul(&f_cp(k).conj_transpose()).signed(sign(n - r));
            let e22 = family_get(&t_prev, cp, m - 2, r - 1).signed(sign(n - r + si));
            let e32 = fp_cp(r).mul(&family_get(&phi_s, cp, m - 1, r)).signed(sign(si));
            let blk = Matrix::block(
                &rs,
                &cs,
                &[
                    (0, 0, family_get(&dphi, d, m, r)),
                    (1, 0, e21),
                    (1, 1, e22),
                    (2, 1, e32),
                    (2, 2, family_get(&dphi2, dp, m, r)),
                ],
            );
            fam.insert(r, blk);
        }
        delta_phi.push(fam);
    }
    Ok(Cobordism {
        n,
        d: dd,
        c: c.c.clone(),
        c2: c2.c2.clone(),
        f_c,
        f_c2,
        delta_phi,
        phi: c.phi.clone(),
        phi2: c2.phi2.clone(),
    })
}

// ---------------------------------------------------------------------------
// Triads

/// A split injection given degreewise, with `splitting * map = id`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitInjection<E: RingOps> {
    pub map: BTreeMap<i64, Matrix<E>>,
    pub splitting: BTreeMap<i64, Matrix<E>>,
}

impl<E: RingOps> SplitInjection<E> {
    pub fn chain_map(&self, source: &Complex<E>, target: &Complex<E>) -> ChainMap<E> {
        ChainMap { source: source.clone(), target: target.clone(), maps: self.map.clone() }
    }

    pub fn get(&self, r: i64, source: &Complex<E>, target: &Complex<E>) -> Matrix<E> {
        get_map(&self.map, r, target.rank(r), source.rank(r))
    }

    pub fn splitting_at(&self, r: i64, source: &Complex<E>, target: &Complex<E>) -> Matrix<E> {
        get_map(&self.splitting, r, source.rank(r), target.rank(r))
    }

    /// Degrees where the splitting fails to be a left inverse.
    pub fn splitting_failures(&self, source: &Complex<E>, target: &Complex<E>) -> Vec<i64> {
        source
            .degrees()
            .filter(|&r| {
                let p = self.splitting_at(r, source, target).mul(&self.get(r, source, target));
                p != Matrix::identity(source.rank(r))
            })
            .collect()
    }

    /// The inclusion of the first rank(source) coordinates of each degree.
    pub fn coordinate(source: &Complex<E>, target: &Complex<E>, rows: impl Fn(i64) -> Vec<usize>) -> Self {
        let mut map = BTreeMap::new();
        let mut splitting = BTreeMap::new();
        for r in source.degrees() {
            let idx = rows(r);
            let m = Matrix::from_fn(target.rank(r), source.rank(r), |i, j| if idx[j] == i { E::one() } else { E::zero() });
            splitting.insert(r, m.transpose());
            map.insert(r, m);
        }
        SplitInjection { map, splitting }
    }

    fn try_map_ring<F: RingOps>(&self, f: &impl Fn(&Matrix<E>) -> Result<Matrix<F>>) -> Result<SplitInjection<F>> {
        Ok(SplitInjection { map: map_degrees(&self.map, f)?, splitting: map_degrees(&self.splitting, f)? })
    }
}

fn map_degrees<E: RingOps, F: RingOps>(
    m: &BTreeMap<i64, Matrix<E>>,
    f: &impl Fn(&Matrix<E>) -> Result<Matrix<F>>,
) -> Result<BTreeMap<i64, Matrix<F>>> {
    m.iter().map(|(r, x)| Ok((*r, f(x)?))).collect()
}

/// sigma: C/B -> C/A in the quotient bases of [`quotient_by_split`], with an
/// optional witness k: C_r -> (C/A)_{r+1} of sigma q_B ~ q_A.
#[derive(Clone, Debug, PartialEq)]
pub struct Sigma<E: RingOps> {
    pub map: BTreeMap<i64, Matrix<E>>,
    pub homotopy: Option<BTreeMap<i64, Matrix<E>>>,
}

/// An (n+2)-dimensional symmetric triad with split inclusions
/// D -> A -> C and D -> B -> C.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricTriad<E: RingOps> {
    /// The triad dimension n + 2.
    pub dim: i64,
    pub d: Complex<E>,
    pub a: Complex<E>,
    pub b: Complex<E>,
    pub c: Complex<E>,
    pub j_a: SplitInjection<E>,
    pub j_b: SplitInjection<E>,
    pub i_a: SplitInjection<E>,
    pub i_b: SplitInjection<E>,
    pub chi: Vec<Family<E>>,
    pub phi_a: Vec<Family<E>>,
    pub phi_b: Vec<Family<E>>,
    pub big_phi: Vec<Family<E>>,
    pub sigma: Option<Sigma<E>>,
}

impl<E: RingOps> SymmetricTriad<E> {
    /// A closed symmetric complex as a triad with A = B = D = 0, sigma = id.
    pub fn closed(sc: &SymmetricComplex<E>) -> Self {
        let ring = sc.complex.ring;
        let z = Complex::zero(ring);
        let empty = SplitInjection { map: BTreeMap::new(), splitting: BTreeMap::new() };
        let id = sc.complex.degrees().map(|r| (r, Matrix::identity(sc.complex.rank(r)))).collect();
        SymmetricTriad {
            dim: sc.n,
            d: z.clone(),
            a: z.clone(),
            b: z.clone(),
            c: sc.complex.clone(),
            j_a: empty.clone(),
            j_b: empty.clone(),
            i_a: empty.clone(),
            i_b: empty,
            chi: Vec::new(),
            phi_a: Vec::new(),
            phi_b: Vec::new(),
            big_phi: sc.phi.clone(),
            sigma: Some(Sigma { map: id, homotopy: Some(BTreeMap::new()) }),
        }
    }

    pub fn n(&self) -> i64 {
        self.dim - 2
    }

    pub fn is_closed(&self) -> bool {
        self.a.is_empty() && self.b.is_empty() && self.d.is_empty()
    }

    pub fn j_a_map(&self) -> ChainMap<E> {
        self.j_a.chain_map(&self.d, &self.a)
    }
    pub fn j_b_map(&self) -> ChainMap<E> {
        self.j_b.chain_map(&self.d, &self.b)
    }
    pub fn i_a_map(&self) -> ChainMap<E> {
        self.i_a.chain_map(&self.a, &self.c)
    }
    pub fn i_b_map(&self) -> ChainMap<E> {
        self.i_b.chain_map(&self.b, &self.c)
    }

    pub fn boundary_complex(&self) -> SymmetricComplex<E> {
        SymmetricComplex { complex: self.d.clone(), n: self.n(), phi: self.chi.clone() }
    }

    pub fn pair_a(&self) -> SymmetricPair<E> {
        SymmetricPair { map: self.j_a_map(), n: self.n(), delta_phi: self.phi_a.clone(), phi: self.chi.clone() }
    }

    pub fn pair_b(&self) -> SymmetricPair<E> {
        SymmetricPair { map: self.j_b_map(), n: self.n(), delta_phi: self.phi_b.clone(), phi: self.chi.clone() }
    }

    /// (A u_D B, phi^A u_chi -phi^B) as a cobordism from 0 to 0.
    pub fn glued_boundary(&self) -> Result<Cobordism<E>> {
        let neg_chi: Vec<Family<E>> = self.chi.iter().map(|f| family_scale(f, -1)).collect();
        let ring = self.c.ring;
        let left = Cobordism {
            n: self.n(),
            d: self.a.clone(),
            c: Complex::zero(ring),
            c2: self.d.clone(),
            f_c: BTreeMap::new(),
            f_c2: self.j_a.map.clone(),
            delta_phi: self.phi_a.clone(),
            phi: Vec::new(),
            phi2: neg_chi.clone(),
        };
        let right = Cobordism {
            n: self.n(),
            d: self.b.clone(),
            c: self.d.clone(),
            c2: Complex::zero(ring),
            f_c: self.j_b.map.clone(),
            f_c2: BTreeMap::new(),
            delta_phi: self.phi_b.iter().map(|f| family_scale(f, -1)).collect(),
            phi: neg_chi,
            phi2: Vec::new(),
        };
        union(&left, &right)
    }

    /// The pair (e: A u_D B -> C, (Phi, dPhi)) with e = (i_A, 0, -i_B).
    pub fn glued_pair(&self) -> Result<SymmetricPair<E>> {
        let u = self.glued_boundary()?;
        let dd = &u.d;
        let maps = dd
            .degrees()
            .filter(|&r| dd.rank(r) > 0 && self.c.rank(r) > 0)
            .map(|r| {
                let ia = self.i_a.get(r, &self.a, &self.c);
                let ib = self.i_b.get(r, &self.b, &self.c).neg();
                let mid = Matrix::zeros(self.c.rank(r), self.d.rank(r - 1));
                (r, ia.hstack(&mid).hstack(&ib))
            })
            .collect();
        Ok(SymmetricPair {
            map: ChainMap { source: dd.clone(), target: self.c.clone(), maps },
            n: self.n() + 1,
            delta_phi: self.big_phi.clone(),
            phi: u.delta_phi,
        })
    }

    /// Up-front validation: i_A j_A = i_B j_B, splittings, chain maps.
    pub fn structural_errors(&self) -> Vec<String> {
        let mut out = Vec::new();
        let checks = [
            ("j_A", &self.j_a, &self.d, &self.a),
            ("j_B", &self.j_b, &self.d, &self.b),
            ("i_A", &self.i_a, &self.a, &self.c),
            ("i_B", &self.i_b, &self.b, &self.c),
        ];
        for (name, inj, s, t) in checks {
            for (r, m) in &inj.map {
                if m.shape() != (t.rank(*r), s.rank(*r)) {
                    out.push(format!("{name} in degree {r} has shape {:?}", m.shape()));
                }
            }
            for (r, m) in &inj.splitting {
                if m.shape() != (s.rank(*r), t.rank(*r)) {
                    out.push(format!("splitting of {name} in degree {r} has shape {:?}", m.shape()));
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (name, inj, s, t) in checks {
            for r in inj.chain_map(s, t).failures() {
                out.push(format!("{name} is not a chain map in degree {r}"));
            }
            for r in inj.splitting_failures(s, t) {
                out.push(format!("splitting of {name} fails in degree {r}"));
            }
        }
        for r in self.d.degrees() {
            let x = self.i_a.get(r, &self.a, &self.c).mul(&self.j_a.get(r, &self.d, &self.a));
            let y = self.i_b.get(r, &self.b, &self.c).mul(&self.j_b.get(r, &self.d, &self.b));
            if x != y {
                out.push(format!("i_A j_A != i_B j_B in degree {r}"));
            }
        }
        out
    }

    /// Apply an entrywise ring change to every piece. `cochain` is applied
    /// to families after `f`, as a right factor on the cochain side.
    pub fn try_map_ring<F: RingOps>(
        &self,
        ring: crate::ring_core::Ring,
        scale: usize,
        f: impl Fn(&Matrix<E>) -> Result<Matrix<F>>,
        cochain: impl Fn(usize) -> Option<Matrix<F>>,
    ) -> Result<SymmetricTriad<F>> {
        let cx = |c: &Complex<E>| c.try_map_ring(ring, scale, &f);
        let (d, a, b, c) = (cx(&self.d)?, cx(&self.a)?, cx(&self.b)?, cx(&self.c)?);
        let fams = |list: &[Family<E>]| -> Result<Vec<Family<F>>> {
            list.iter()
                .map(|fam| {
                    fam.iter()
                        .map(|(r, m)| {
                            let x = f(m)?;
                            let x = match cochain(x.cols()) {
                                Some(t) => x.mul(&t),
                                None => x,
                            };
                            Ok((*r, x))
                        })
                        .collect()
                })
                .collect()
        };
        let sigma = match &self.sigma {
            Some(sg) => Some(Sigma {
                map: map_degrees(&sg.map, &f)?,
                homotopy: match &sg.homotopy {
                    Some(h) => Some(map_degrees(h, &f)?),
                    None => None,
                },
            }),
            None => None,
        };
        Ok(SymmetricTriad {
            dim: self.dim,
            d,
            a,
            b,
            c,
            j_a: self.j_a.try_map_ring(&f)?,
            j_b: self.j_b.try_map_ring(&f)?,
            i_a: self.i_a.try_map_ring(&f)?,
            i_b: self.i_b.try_map_ring(&f)?,
            chi: fams(&self.chi)?,
            phi_a: fams(&self.phi_a)?,
            phi_b: fams(&self.phi_b)?,
            big_phi: fams(&self.big_phi)?,
            sigma,
        })
    }
}

impl SymmetricTriad<GroupRingElement> {
    /// V (x)_{Z[pi]} of every piece. Families are composed with the inverse
    /// of the Theta identification of cochains.
    pub fn tensor_with(&self, rep: &Representation) -> Result<SymmetricTriad<RingElement>> {
        let theta_inv = if rep.theta == Matrix::identity(rep.dim) {
            None
        } else {
            Some(solve_matrix(rep.ring, &rep.theta, &Matrix::identity(rep.dim))?.ok_or_else(|| {
                Error::Invalid("the representation's inner product matrix is not invertible".into())
            })?)
        };
        let cochain = |cols: usize| {
            theta_inv.as_ref().map(|t| {
                let k = cols / rep.dim;
                let blocks: Vec<_> = (0..k).map(|i| (i, i, t.clone())).collect();
                Matrix::block(&vec![rep.dim; k], &vec![rep.dim; k], &blocks)
            })
        };
        let out = self.try_map_ring(rep.ring, rep.dim, |m| represent_matrix(m, rep), cochain)?;
        for c in [&out.d, &out.a, &out.b, &out.c] {
            c.check()?;
        }
        Ok(out)
    }
}

impl SymmetricComplex<GroupRingElement> {
    pub fn tensor_with(&self, rep: &Representation) -> Result<SymmetricComplex<RingElement>> {
        let t = SymmetricTriad::closed(self).tensor_with(rep)?;
        Ok(SymmetricComplex { complex: t.c, n: self.n, phi: t.big_phi })
    }
}

/// Run every structure check of the triad.
pub fn check_triad<E: RingOps>(t: &SymmetricTriad<E>) -> Result<ResidualReport> {
    let errs = t.structural_errors();
    if errs.iter().any(|e| e.contains("i_A j_A") || e.contains("splitting")) {
        return Err(Error::Invalid(errs.join("; ")));
    }
    let mut rep = ResidualReport::new();
    for e in errs {
        rep.error(e);
    }
    if !rep.errors.is_empty() {
        return Ok(rep);
    }
    rep.absorb("D: ", check_symmetric(&t.boundary_complex()));
    rep.absorb("A: ", check_pair(&t.pair_a()));
    rep.absorb("B: ", check_pair(&t.pair_b()));
    match t.glued_pair() {
        Ok(p) => rep.absorb("C: ", check_pair(&p)),
        Err(e) => rep.error(format!("gluing the boundary failed: {e}")),
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Quotients over the shipped rings

/// A quotient complex with the projection q and a degreewise section s
/// (q s = id).
#[derive(Clone, Debug, PartialEq)]
pub struct Quotient {
    pub complex: Complex<RingElement>,
    pub q: BTreeMap<i64, M>,
    pub s: BTreeMap<i64, M>,
}

impl Quotient {
    pub fn q_at(&self, r: i64, ambient: &Complex<RingElement>) -> M {
        get_map(&self.q, r, self.complex.rank(r), ambient.rank(r))
    }

    pub fn s_at(&self, r: i64, ambient: &Complex<RingElement>) -> M {
        get_map(&self.s, r, ambient.rank(r), self.complex.rank(r))
    }

    pub fn projection(&self, ambient: &Complex<RingElement>) -> ChainMap<RingElement> {
        ChainMap { source: ambient.clone(), target: self.complex.clone(), maps: self.q.clone() }
    }
}

/// Rows hit by a matrix whose columns are distinct standard basis vectors.
fn coordinate_rows(m: &M) -> Option<Vec<usize>> {
    let mut rows = Vec::with_capacity(m.cols());
    for j in 0..m.cols() {
        let hits: Vec<usize> = (0..m.rows()).filter(|&i| !m.get(i, j).is_zero()).collect();
        if hits.len() != 1 || !m.get(hits[0], j).is_one() || rows.contains(&hits[0]) {
            return None;
        }
        rows.push(hits[0]);
    }
    Some(rows)
}

fn assemble_quotient(c: &Complex<RingElement>, q: BTreeMap<i64, M>, s: BTreeMap<i64, M>) -> Result<Quotient> {
    let rank = |r: i64| q.get(&r).map_or(0, |m| m.rows());
    let complex = Complex::from_fn(c.ring, c.lo(), c.hi(), rank, |r| {
        let qr = get_map(&q, r - 1, rank(r - 1), c.rank(r - 1));
        let sr = get_map(&s, r, c.rank(r), rank(r));
        qr.mul(&c.boundary(r)).mul(&sr)
    })?;
    complex.check()?;
    let out = Quotient { complex, q, s };
    if !out.projection(c).is_chain_map() {
        return Err(Error::Invalid("image is not a subcomplex".into()));
    }
    Ok(out)
}

/// Cokernel of the columns of `cols[r]` in each degree of c, which must span
/// a direct summand.
pub fn quotient_by_image(c: &Complex<RingElement>, cols: &BTreeMap<i64, M>) -> Result<Quotient> {
    let mut q = BTreeMap::new();
    let mut s = BTreeMap::new();
    for r in c.degrees() {
        let n = c.rank(r);
        let m = cols.get(&r).cloned().unwrap_or_else(|| Matrix::zeros(n, 0));
        if let Some(rows) = coordinate_rows(&m) {
            let rest: Vec<usize> = (0..n).filter(|i| !rows.contains(i)).collect();
            let id = Matrix::identity(n);
            q.insert(r, id.select_rows(&rest));
            s.insert(r, id.select_cols(&rest));
            continue;
        }
        let snf = smith_normal_form(c.ring, &m)?;
        if snf.diagonal().iter().any(|x| !c.ring.is_unit(x)) {
            return Err(Error::Invalid(format!("image in degree {r} is not a direct summand")));
        }
        let k = snf.rank;
        let rest: Vec<usize> = (k..n).collect();
        q.insert(r, snf.u_inv.select_rows(&rest));
        s.insert(r, snf.u.select_cols(&rest));
    }
    assemble_quotient(c, q, s)
}

/// C/A for a split injection i: A -> C with splitting r. Coordinate
/// inclusions drop the hit coordinates; otherwise the quotient is read off
/// the Smith form of the idempotent I - i r.
pub fn quotient_by_split(
    a: &Complex<RingElement>,
    c: &Complex<RingElement>,
    inj: &SplitInjection<RingElement>,
) -> Result<Quotient> {
    let fails = inj.splitting_failures(a, c);
    if !fails.is_empty() {
        return Err(Error::Invalid(format!("splitting fails in degrees {fails:?}")));
    }
    let mut q = BTreeMap::new();
    let mut s = BTreeMap::new();
    for r in c.degrees() {
        let n = c.rank(r);
        let i = inj.get(r, a, c);
        if let Some(rows) = coordinate_rows(&i) {
            let rest: Vec<usize> = (0..n).filter(|x| !rows.contains(x)).collect();
            let id = Matrix::identity(n);
            q.insert(r, id.select_rows(&rest));
            s.insert(r, id.select_cols(&rest));
            continue;
        }
        let p = Matrix::identity(n).sub(&i.mul(&inj.splitting_at(r, a, c)));
        let snf = smith_normal_form(c.ring, &p)?;
        let k = snf.rank;
        let top: Vec<usize> = (0..k).collect();
        q.insert(r, snf.d.mul(&snf.v).select_rows(&top));
        s.insert(r, snf.u.select_cols(&top));
    }
    assemble_quotient(c, q, s)
}

/// The quotients used by the pairing and the Poincare checks.
#[derive(Clone, Debug, PartialEq)]
pub struct TriadQuotients {
    pub c_mod_a: Quotient,
    pub c_mod_b: Quotient,
    pub b_mod_d: Quotient,
    pub c_mod_ab: Quotient,
}

pub fn triad_quotients(t: &SymmetricTriad<RingElement>) -> Result<TriadQuotients> {
    let c_mod_a = quotient_by_split(&t.a, &t.c, &t.i_a)?;
    let c_mod_b = quotient_by_split(&t.b, &t.c, &t.i_b)?;
    let b_mod_d = quotient_by_split(&t.d, &t.b, &t.j_b)?;
    let cols = t
        .c
        .degrees()
        .map(|r| (r, t.i_a.get(r, &t.a, &t.c).hstack(&t.i_b.get(r, &t.b, &t.c))))
        .collect();
    let c_mod_ab = quotient_by_image(&t.c, &cols)?;
    Ok(TriadQuotients { c_mod_a, c_mod_b, b_mod_d, c_mod_ab })
}

/// q_B Phi_0 q_A^* as a chain map (C/A)^{n+2-*} -> C/B.
pub fn relative_duality(t: &SymmetricTriad<RingElement>, qs: &TriadQuotients) -> ChainMap<RingElement> {
    let m = t.dim;
    let phi0 = at(&t.big_phi, 0);
    let (qa, qb) = (&qs.c_mod_a, &qs.c_mod_b);
    let src = qa.complex.dual(m);
    let target = qb.complex.clone();
    let maps = target
        .degrees()
        .filter(|&r| target.rank(r) > 0 && qa.complex.rank(m - r) > 0)
        .map(|r| {
            let x = qb.q_at(r, &t.c).mul(&family_get(&phi0, &t.c, m, r)).mul(&qa.q_at(m - r, &t.c).conj_transpose());
            (r, x)
        })
        .collect();
    ChainMap { source: src, target, maps }
}

/// Quasi-isomorphism verdicts of the duality maps of a triad.
#[derive(Clone, Debug, PartialEq)]
pub struct PoincareReport {
    pub passed: bool,
    pub parts: Vec<(String, QuasiIsoReport)>,
    pub not_chain_maps: Vec<String>,
}

pub fn is_poincare(t: &SymmetricTriad<RingElement>) -> Result<PoincareReport> {
    let qs = triad_quotients(t)?;
    let n = t.n();
    let mut maps: Vec<(String, ChainMap<RingElement>)> = Vec::new();
    if !t.d.is_empty() {
        maps.push(("chi_0 on D".into(), duality_map(&at(&t.chi, 0), &t.d, &t.d, n, None)));
    }
    if !t.b.is_empty() {
        maps.push((
            "phi^B_0 p_B^* on B/D".into(),
            duality_map(&at(&t.phi_b, 0), &t.b, &t.b, n + 1, Some((&qs.b_mod_d.q, &qs.b_mod_d.complex))),
        ));
    }
    if !t.is_closed() {
        maps.push((
            "Phi_0 p_C^* on C/(A u B)".into(),
            duality_map(&at(&t.big_phi, 0), &t.c, &t.c, t.dim, Some((&qs.c_mod_ab.q, &qs.c_mod_ab.complex))),
        ));
    }
    maps.push(("q_B Phi_0 q_A^*".into(), relative_duality(t, &qs)));
    let mut parts = Vec::new();
    let mut not_chain_maps = Vec::new();
    let mut passed = true;
    for (name, f) in maps {
        if !f.is_chain_map() {
            passed = false;
            not_chain_maps.push(name);
            continue;
        }
        let r = is_quasi_iso(&f)?;
        passed &= r.passed;
        parts.push((name, r));
    }
    Ok(PoincareReport { passed, parts, not_chain_maps })
}

pub fn is_poincare_closed(sc: &SymmetricComplex<RingElement>) -> Result<QuasiIsoReport> {
    let f = sc.phi0_map();
    if !f.is_chain_map() {
        return Err(Error::Invalid("phi_0 is not a chain map".into()));
    }
    is_quasi_iso(&f)
}
