//! Finitely generated free chain complexes with explicit degree ranges, chain
//! maps, homotopies and the signed constructions built from them.
//!
//! Conventions:
//! * matrices act on column vectors, `boundary(r)` maps degree r to r - 1;
//! * a cochain `f` on a free module with basis `e_i` is stored as the vector
//!   `w_i = conj(f(e_i))`, which makes the coboundary the conjugate transpose
//!   of the boundary;
//! * a family `psi` of total degree `m` is a map `psi_r: C^{m-r} -> C_r` for
//!   each r, stored as a `rank(r) x rank(m-r)` matrix.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ring_core::{Ring, RingOps};

pub fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Complex<E: RingOps> {
    pub ring: Ring,
    lo: i64,
    ranks: Vec<usize>,
    /// `bd[i]` is the boundary out of degree `lo + i`; `bd[0]` has no rows.
    bd: Vec<Matrix<E>>,
}

/// Outcome of [`Complex::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexReport {
    pub passed: bool,
    pub shape_errors: Vec<String>,
    /// Degrees r with boundary(r-1) * boundary(r) != 0.
    pub nonzero_square: Vec<i64>,
}

impl<E: RingOps> Complex<E> {
    pub fn zero(ring: Ring) -> Self {
        Complex { ring, lo: 0, ranks: Vec::new(), bd: Vec::new() }
    }

    /// `boundaries[i]` is the boundary out of degree `lo + 1 + i`.
    pub fn new(ring: Ring, lo: i64, ranks: Vec<usize>, boundaries: Vec<Matrix<E>>) -> Result<Self> {
        if ranks.is_empty() {
            return Ok(Self::zero(ring));
        }
        if boundaries.len() + 1 != ranks.len() {
            return Err(Error::Shape(format!("{} ranks need {} boundaries", ranks.len(), ranks.len() - 1)));
        }
        let mut bd = vec![Matrix::zeros(0, ranks[0])];
        for (i, m) in boundaries.into_iter().enumerate() {
            if m.shape() != (ranks[i], ranks[i + 1]) {
                return Err(Error::Shape(format!(
                    "boundary out of degree {} is {:?}, expected {:?}",
                    lo + 1 + i as i64,
                    m.shape(),
                    (ranks[i], ranks[i + 1])
                )));
            }
            bd.push(m);
        }
        Ok(Complex { ring, lo, ranks, bd })
    }

    /// Build from a rank function and a boundary function over `[lo, hi]`.
    pub fn from_fn(
        ring: Ring,
        lo: i64,
        hi: i64,
        rank: impl Fn(i64) -> usize,
        boundary: impl Fn(i64) -> Matrix<E>,
    ) -> Result<Self> {
        if hi < lo {
            return Ok(Self::zero(ring));
        }
        let ranks = (lo..=hi).map(&rank).collect();
        let bds = (lo + 1..=hi).map(boundary).collect();
        Self::new(ring, lo, ranks, bds)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.iter().all(|&r| r == 0)
    }

    pub fn rank(&self, r: i64) -> usize {
        if r < self.lo || r > self.hi() {
            0
        } else {
            self.ranks[(r - self.lo) as usize]
        }
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    /// Boundary out of degree r, a `rank(r-1) x rank(r)` matrix.
    pub fn boundary(&self, r: i64) -> Matrix<E> {
        if r > self.lo && r <= self.hi() {
            self.bd[(r - self.lo) as usize].clone()
        } else {
            Matrix::zeros(self.rank(r - 1), self.rank(r))
        }
    }

    /// Coboundary C^{r-1} -> C^r in the conjugate-vector convention.
    pub fn coboundary(&self, r: i64) -> Matrix<E> {
        self.boundary(r).conj_transpose()
    }

    pub fn validate(&self) -> ComplexReport {
        let mut shape_errors = Vec::new();
        for r in self.lo + 1..=self.hi() {
            let m = &self.bd[(r - self.lo) as usize];
            if m.shape() != (self.rank(r - 1), self.rank(r)) {
                shape_errors.push(format!("degree {r}: {:?}", m.shape()));
            }
        }
        let mut nonzero_square = Vec::new();
        if shape_errors.is_empty() {
            for r in self.lo + 2..=self.hi() {
                if !self.boundary(r - 1).mul(&self.boundary(r)).is_zero() {
                    nonzero_square.push(r);
                }
            }
        }
        ComplexReport { passed: shape_errors.is_empty() && nonzero_square.is_empty(), shape_errors, nonzero_square }
    }

    pub fn check(&self) -> Result<()> {
        let rep = self.validate();
        if let Some(e) = rep.shape_errors.first() {
            return Err(Error::Shape(e.clone()));
        }
        match rep.nonzero_square.first() {
            Some(&r) => Err(Error::NotAComplex(r)),
            None => Ok(()),
        }
    }

    /// Apply `f` to every boundary; ranks are multiplied by `factor`.
    pub fn try_map_ring<F: RingOps>(
        &self,
        ring: Ring,
        factor: usize,
        f: impl Fn(&Matrix<E>) -> Result<Matrix<F>>,
    ) -> Result<Complex<F>> {
        let ranks: Vec<usize> = self.ranks.iter().map(|r| r * factor).collect();
        let bds = (self.lo + 1..=self.hi()).map(|r| f(&self.boundary(r))).collect::<Result<Vec<_>>>()?;
        Complex::new(ring, self.lo, ranks, bds)
    }

    /// C^{m-*}: degree r is C^{m-r}, boundary from r+1 to r is
    /// (-1)^{r+1} conj-transpose of the boundary out of C_{m-r}.
    pub fn dual(&self, m: i64) -> Self {
        if self.ranks.is_empty() {
            return self.clone();
        }
        Self::from_fn(
            self.ring,
            m - self.hi(),
            m - self.lo,
            |r| self.rank(m - r),
            |r| self.boundary(m - r + 1).conj_transpose().signed(sign(r)),
        )
        .expect("dual shapes")
    }

    /// Same modules and boundaries with degrees raised by k.
    pub fn shift(&self, k: i64) -> Self {
        Complex { ring: self.ring, lo: self.lo + k, ranks: self.ranks.clone(), bd: self.bd.clone() }
    }

    pub fn direct_sum(&self, o: &Self) -> Self {
        let lo = self.lo.min(o.lo);
        let hi = self.hi().max(o.hi());
        if self.ranks.is_empty() {
            return o.clone();
        }
        if o.ranks.is_empty() {
            return self.clone();
        }
        Self::from_fn(self.ring, lo, hi, |r| self.rank(r) + o.rank(r), |r| self.boundary(r).direct_sum(&o.boundary(r)))
            .expect("sum shapes")
    }

    /// Identity chain map.
    pub fn identity_map(&self) -> ChainMap<E> {
        let maps = self.degrees().map(|r| (r, Matrix::identity(self.rank(r)))).collect();
        ChainMap { source: self.clone(), target: self.clone(), maps }
    }
}

/// Degree-preserving chain map given degreewise.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainMap<E: RingOps> {
    pub source: Complex<E>,
    pub target: Complex<E>,
    pub maps: BTreeMap<i64, Matrix<E>>,
}

impl<E: RingOps> ChainMap<E> {
    pub fn new(source: Complex<E>, target: Complex<E>, maps: BTreeMap<i64, Matrix<E>>) -> Result<Self> {
        for (r, m) in &maps {
            if m.shape() != (target.rank(*r), source.rank(*r)) {
                return Err(Error::Shape(format!("chain map in degree {r} is {:?}", m.shape())));
            }
        }
        Ok(ChainMap { source, target, maps })
    }

    pub fn zero(source: &Complex<E>, target: &Complex<E>) -> Self {
        ChainMap { source: source.clone(), target: target.clone(), maps: BTreeMap::new() }
    }

    pub fn get(&self, r: i64) -> Matrix<E> {
        self.maps.get(&r).cloned().unwrap_or_else(|| Matrix::zeros(self.target.rank(r), self.source.rank(r)))
    }

    pub(crate) fn degree_span(&self) -> std::ops::RangeInclusive<i64> {
        let lo = self.source.lo().min(self.target.lo());
        let hi = self.source.hi().max(self.target.hi());
        lo..=hi
    }

    /// Degrees r where boundary * f_r != f_{r-1} * boundary.
    pub fn failures(&self) -> Vec<i64> {
        self.degree_span()
            .filter(|&r| self.target.boundary(r).mul(&self.get(r)) != self.get(r - 1).mul(&self.source.boundary(r)))
            .collect()
    }

    pub fn is_chain_map(&self) -> bool {
        self.failures().is_empty()
    }

    /// self after `first`.
    pub fn compose(&self, first: &ChainMap<E>) -> ChainMap<E> {
        let maps = first.degree_span().map(|r| (r, self.get(r).mul(&first.get(r)))).collect();
        ChainMap { source: first.source.clone(), target: self.target.clone(), maps }
    }

    pub fn sub(&self, o: &ChainMap<E>) -> ChainMap<E> {
        let maps = self.degree_span().map(|r| (r, self.get(r).sub(&o.get(r)))).collect();
        ChainMap { source: self.source.clone(), target: self.target.clone(), maps }
    }
}

/// Maps `k_r: C_r -> D_{r+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainHomotopy<E: RingOps> {
    pub maps: BTreeMap<i64, Matrix<E>>,
}

impl<E: RingOps> ChainHomotopy<E> {
    pub fn get(&self, r: i64, source: &Complex<E>, target: &Complex<E>) -> Matrix<E> {
        self.maps.get(&r).cloned().unwrap_or_else(|| Matrix::zeros(target.rank(r + 1), source.rank(r)))
    }

    /// True when f = boundary * k + k * boundary in every degree.
    pub fn witnesses(&self, f: &ChainMap<E>) -> bool {
        f.degree_span().all(|r| {
            let lhs = f.target.boundary(r + 1).mul(&self.get(r, &f.source, &f.target));
            let rhs = self.get(r - 1, &f.source, &f.target).mul(&f.source.boundary(r));
            f.get(r) == lhs.add(&rhs)
        })
    }
}

/// Mapping cone of g: C -> D with boundary [[d_D, (-1)^{r-1} g], [0, d_C]]
/// on D_r + C_{r-1}, plus the inclusion of D and the projection onto C_{*-1}.
pub struct MappingCone<E: RingOps> {
    pub cone: Complex<E>,
    pub inclusion: ChainMap<E>,
    /// Degree r of the cone onto C_{r-1}.
    pub projection: BTreeMap<i64, Matrix<E>>,
}

pub fn mapping_cone<E: RingOps>(g: &ChainMap<E>) -> Result<MappingCone<E>> {
    let (c, d) = (&g.source, &g.target);
    let lo = d.lo().min(c.lo() + 1);
    let hi = d.hi().max(c.hi() + 1);
    let cone = Complex::from_fn(
        d.ring,
        lo,
        hi,
        |r| d.rank(r) + c.rank(r - 1),
        |r| {
            Matrix::block(
                &[d.rank(r - 1), c.rank(r - 2)],
                &[d.rank(r), c.rank(r - 1)],
                &[(0, 0, d.boundary(r)), (0, 1, g.get(r - 1).signed(sign(r - 1))), (1, 1, c.boundary(r - 1))],
            )
        },
    )?;
    cone.check()?;
    let inclusion = ChainMap {
        source: d.clone(),
        target: cone.clone(),
        maps: (lo..=hi)
            .map(|r| (r, Matrix::identity(d.rank(r)).vstack(&Matrix::zeros(c.rank(r - 1), d.rank(r)))))
            .collect(),
    };
    let projection = (lo..=hi)
        .map(|r| (r, Matrix::zeros(c.rank(r - 1), d.rank(r)).hstack(&Matrix::identity(c.rank(r - 1)))))
        .collect();
    Ok(MappingCone { cone, inclusion, projection })
}

/// Signs of the chain isomorphism C -> (C^{m-*})^{m-*}, x -> (f -> conj f(x)).
/// In the conjugate-vector convention it is diagonal with these signs.
pub fn double_dual_map<E: RingOps>(c: &Complex<E>, m: i64) -> ChainMap<E> {
    let dd = c.dual(m).dual(m);
    let maps = c
        .degrees()
        .map(|r| {
            let s = if m.rem_euclid(2) == 1 { 1 } else { sign(r) };
            (r, Matrix::identity(c.rank(r)).signed(s))
        })
        .collect();
    ChainMap { source: c.clone(), target: dd, maps }
}

// ---------------------------------------------------------------------------
// Tensor and Hom complexes

/// Index of the block `(p, q)` inside a graded sum, in increasing p.
fn offsets(parts: &[(i64, usize)]) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    let mut acc = 0;
    for &(p, size) in parts {
        out.insert(p, acc);
        acc += size;
    }
    out
}

/// C^t (x) D with d(x (x) y) = x (x) dy + (-1)^q dx (x) y. Basis of the
/// degree-n group: blocks p ascending, inside a block e_i (x) f_j at
/// `i * rank_q(D) + j`. Entries of d_C are conjugated (the C^t convention).
pub fn tensor<E: RingOps>(c: &Complex<E>, d: &Complex<E>) -> Result<Complex<E>> {
    if c.is_empty() || d.is_empty() {
        return Ok(Complex::zero(c.ring));
    }
    let lo = c.lo() + d.lo();
    let hi = c.hi() + d.hi();
    let parts = |n: i64| -> Vec<(i64, usize)> { c.degrees().map(|p| (p, c.rank(p) * d.rank(n - p))).collect() };
    let rank = |n: i64| parts(n).iter().map(|x| x.1).sum();
    let out = Complex::from_fn(c.ring, lo, hi, rank, |n| {
        let src = offsets(&parts(n));
        let dst = offsets(&parts(n - 1));
        let mut m = Matrix::<E>::zeros(rank(n - 1), rank(n));
        for p in c.degrees() {
            let q = n - p;
            let (cp, dq) = (c.rank(p), d.rank(q));
            if cp * dq == 0 {
                continue;
            }
            let bd = d.boundary(q);
            let bc = c.boundary(p).map(|x| x.conj()).signed(sign(q));
            for i in 0..cp {
                for j in 0..dq {
                    let col = src[&p] + i * dq + j;
                    for j2 in 0..d.rank(q - 1) {
                        let v = bd.get(j2, j);
                        if !v.is_zero() {
                            let row = dst[&p] + i * d.rank(q - 1) + j2;
                            m.set(row, col, m.get(row, col).add(v));
                        }
                    }
                    for i2 in 0..c.rank(p - 1) {
                        let v = bc.get(i2, i);
                        if !v.is_zero() {
                            let row = dst[&(p - 1)] + i2 * dq + j;
                            m.set(row, col, m.get(row, col).add(v));
                        }
                    }
                }
            }
        }
        m
    })?;
    out.check()?;
    Ok(out)
}

/// Hom(C, D) with degree n = sum over q - p = n of Hom(C_p, D_q) and
/// d(g) = d_D g + (-1)^q g d_C. A homomorphism g: C_p -> D_q is flattened
/// row-major (`i * rank_p(C) + j` for the entry g[i][j]); blocks are ordered
/// by increasing p.
pub fn hom_complex<E: RingOps>(c: &Complex<E>, d: &Complex<E>) -> Result<Complex<E>> {
    if c.is_empty() || d.is_empty() {
        return Ok(Complex::zero(c.ring));
    }
    let lo = d.lo() - c.hi();
    let hi = d.hi() - c.lo();
    let parts = |n: i64| -> Vec<(i64, usize)> { c.degrees().map(|p| (p, c.rank(p) * d.rank(n + p))).collect() };
    let rank = |n: i64| parts(n).iter().map(|x| x.1).sum();
    let out = Complex::from_fn(c.ring, lo, hi, rank, |n| {
        let src = offsets(&parts(n));
        let dst = offsets(&parts(n - 1));
        let mut m = Matrix::<E>::zeros(rank(n - 1), rank(n));
        for p in c.degrees() {
            let q = n + p;
            let (cp, dq) = (c.rank(p), d.rank(q));
            if cp * dq == 0 {
                continue;
            }
            let bd = d.boundary(q);
            // g d_C lands in Hom(C_{p+1}, D_q)
            let bc = c.boundary(p + 1).signed(sign(q));
            for i in 0..dq {
                for j in 0..cp {
                    let col = src[&p] + i * cp + j;
                    // (d_D g)[i2][j] += bd[i2][i] g[i][j]
                    for i2 in 0..d.rank(q - 1) {
                        let v = bd.get(i2, i);
                        if !v.is_zero() {
                            let row = dst[&p] + i2 * cp + j;
                            m.set(row, col, m.get(row, col).add(v));
                        }
                    }
                    // (g d_C)[i][j2] += g[i][j] bc[j][j2]
                    let cp1 = c.rank(p + 1);
                    for j2 in 0..cp1 {
                        let v = bc.get(j, j2);
                        if !v.is_zero() {
                            let row = dst[&(p + 1)] + i * cp1 + j2;
                            m.set(row, col, m.get(row, col).add(v));
                        }
                    }
                }
            }
        }
        m
    })?;
    out.check()?;
    Ok(out)
}

/// C^{-*}: degree r is C^{-r} with boundary the coboundary.
pub fn cochain_complex<E: RingOps>(c: &Complex<E>) -> Complex<E> {
    if c.is_empty() {
        return c.clone();
    }
    Complex::from_fn(c.ring, -c.hi(), -c.lo(), |r| c.rank(-r), |r| c.coboundary(-r + 1)).expect("cochain shapes")
}

/// Degreewise matrices of the slant isomorphism C^t (x) C -> Hom(C^{-*}, C),
/// x (x) y -> (g -> conj(g(x)) y). Degree n of the source uses the
/// [`tensor`] basis, the target the [`hom_complex`] basis of
/// Hom(C^{-*}, C).
pub fn slant_complex<E: RingOps>(c: &Complex<E>) -> BTreeMap<i64, Matrix<E>> {
    let mut out = BTreeMap::new();
    if c.is_empty() {
        return out;
    }
    let cs = cochain_complex(c);
    for n in 2 * c.lo()..=2 * c.hi() {
        let tparts: Vec<(i64, usize)> = c.degrees().map(|p| (p, c.rank(p) * c.rank(n - p))).collect();
        // Hom block indexed by source degree p' = -p of C^{-*}
        let hparts: Vec<(i64, usize)> = cs.degrees().map(|pp| (pp, cs.rank(pp) * c.rank(n + pp))).collect();
        let toff = offsets(&tparts);
        let hoff = offsets(&hparts);
        let tr: usize = tparts.iter().map(|x| x.1).sum();
        let hr: usize = hparts.iter().map(|x| x.1).sum();
        let mut m = Matrix::zeros(hr, tr);
        for p in c.degrees() {
            let q = n - p;
            let (cp, cq) = (c.rank(p), c.rank(q));
            for i in 0..cp {
                for j in 0..cq {
                    // e_i (x) e_j -> the map C^p -> C_q with matrix unit E[j][i]
                    m.set(hoff[&(-p)] + j * cp + i, toff[&p] + i * cq + j, E::one());
                }
            }
        }
        out.insert(n, m);
    }
    out
}

/// Family `psi_r: C^{m-r} -> C_r` of total degree m.
pub type Family<E> = BTreeMap<i64, Matrix<E>>;

pub fn family_get<E: RingOps>(psi: &Family<E>, c: &Complex<E>, m: i64, r: i64) -> Matrix<E> {
    psi.get(&r).cloned().unwrap_or_else(|| Matrix::zeros(c.rank(r), c.rank(m - r)))
}

/// T on homomorphisms: (T psi)_r = (-1)^{r(m-r)} (psi_{m-r})^*.
pub fn transpose_t<E: RingOps>(psi: &Family<E>, c: &Complex<E>, m: i64) -> Family<E> {
    c.degrees()
        .filter(|&r| c.rank(m - r) > 0 && c.rank(r) > 0)
        .map(|r| (r, family_get(psi, c, m, m - r).conj_transpose().signed(sign(r * (m - r)))))
        .collect()
}

/// T on an element of C_p^t (x) C_q given as a `rank p x rank q` coefficient
/// array `a[i][j]` on e_i (x) e_j: returns the coefficients on C_q^t (x) C_p.
pub fn transpose_tensor<E: RingOps>(a: &Matrix<E>, p: i64, q: i64) -> Matrix<E> {
    a.map(|x| x.conj()).transpose().signed(sign(p * q))
}

/// d_Hom of a family of total degree m: the family of total degree m-1
/// r -> d psi_{r+1} + (-1)^r psi_r delta.
pub fn hom_boundary<E: RingOps>(psi: &Family<E>, c: &Complex<E>, m: i64) -> Family<E> {
    c.degrees()
        .filter(|&r| c.rank(r) > 0 && c.rank(m - 1 - r) > 0)
        .map(|r| {
            let a = c.boundary(r + 1).mul(&family_get(psi, c, m, r + 1));
            let b = family_get(psi, c, m, r).mul(&c.coboundary(m - r)).signed(sign(r));
            (r, a.add(&b))
        })
        .collect()
}

pub fn family_is_zero<E: RingOps>(psi: &Family<E>) -> bool {
    psi.values().all(|m| m.is_zero())
}

pub fn family_add<E: RingOps>(a: &Family<E>, b: &Family<E>) -> Family<E> {
    let mut out = a.clone();
    for (r, m) in b {
        let cur = match out.get(r) {
            Some(x) => x.add(m),
            None => m.clone(),
        };
        out.insert(*r, cur);
    }
    out
}

pub fn family_scale<E: RingOps>(a: &Family<E>, s: i64) -> Family<E> {
    a.iter().map(|(r, m)| (*r, m.signed(s))).collect()
}

/// f psi g^*: for psi on C of total degree m, f: C -> D and g: C -> D.
pub fn family_push<E: RingOps>(psi: &Family<E>, c: &Complex<E>, m: i64, f: &ChainMap<E>, g: &ChainMap<E>) -> Family<E> {
    let d = &f.target;
    d.degrees()
        .filter(|&r| d.rank(r) > 0 && d.rank(m - r) > 0)
        .map(|r| (r, f.get(r).mul(&family_get(psi, c, m, r)).mul(&g.get(m - r).conj_transpose())))
        .collect()
}
