//! Smith normal form over the shipped Euclidean domains, homology
//! presentations, exact linear solving and chain-level equivalence tests.

use std::collections::BTreeMap;
use std::fmt;

use crate::chain_complex::{family_get, hom_boundary, mapping_cone, ChainHomotopy, ChainMap, Complex, Family};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ring_core::{Ring, RingElement, RingOps};

type M = Matrix<RingElement>;

/// A = U * D * V with U, V invertible and D diagonal with d_1 | d_2 | ...
#[derive(Clone, Debug, PartialEq)]
pub struct SmithForm {
    pub ring: Ring,
    pub u: M,
    pub u_inv: M,
    pub d: M,
    pub v: M,
    pub v_inv: M,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<RingElement> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }
}

struct Work {
    ring: Ring,
    d: M,
    l: M,
    l_inv: M,
    r: M,
    r_inv: M,
}

impl Work {
    fn add_row(&mut self, i: usize, j: usize, c: &RingElement) {
        if c.is_zero() {
            return;
        }
        for m in [&mut self.d, &mut self.l] {
            for k in 0..m.cols() {
                let v = m.get(j, k);
                if !v.is_zero() {
                    let nv = m.get(i, k) + &(c * v);
                    m.set(i, k, nv);
                }
            }
        }
        let m = &mut self.l_inv;
        for k in 0..m.rows() {
            let v = m.get(k, i);
            if !v.is_zero() {
                let nv = m.get(k, j) - &(c * v);
                m.set(k, j, nv);
            }
        }
    }

    fn add_col(&mut self, i: usize, j: usize, c: &RingElement) {
        if c.is_zero() {
            return;
        }
        for m in [&mut self.d, &mut self.r] {
            for k in 0..m.rows() {
                let v = m.get(k, j);
                if !v.is_zero() {
                    let nv = m.get(k, i) + &(c * v);
                    m.set(k, i, nv);
                }
            }
        }
        let m = &mut self.r_inv;
        for k in 0..m.cols() {
            let v = m.get(i, k);
            if !v.is_zero() {
                let nv = m.get(j, k) - &(c * v);
                m.set(j, k, nv);
            }
        }
    }

    /// Rows (t, i) <- [[a, b], [c, e]] (rows t, i) for a matrix of
    /// determinant one.
    fn combine_rows(&mut self, t: usize, i: usize, [a, b, c, e]: [&RingElement; 4]) {
        for m in [&mut self.d, &mut self.l] {
            for k in 0..m.cols() {
                let (x, y) = (m.get(t, k).clone(), m.get(i, k).clone());
                if x.is_zero() && y.is_zero() {
                    continue;
                }
                m.set(t, k, &(a * &x) + &(b * &y));
                m.set(i, k, &(c * &x) + &(e * &y));
            }
        }
        // columns (t, i) of the inverse times [[e, -b], [-c, a]]
        let m = &mut self.l_inv;
        for k in 0..m.rows() {
            let (x, y) = (m.get(k, t).clone(), m.get(k, i).clone());
            if x.is_zero() && y.is_zero() {
                continue;
            }
            m.set(k, t, &(&x * e) - &(&y * c));
            m.set(k, i, &(&y * a) - &(&x * b));
        }
    }

    /// Columns (t, j) <- (columns t, j) [[a, c], [b, e]], the transpose of
    /// [`Work::combine_rows`].
    fn combine_cols(&mut self, t: usize, j: usize, [a, b, c, e]: [&RingElement; 4]) {
        for m in [&mut self.d, &mut self.r] {
            for k in 0..m.rows() {
                let (x, y) = (m.get(k, t).clone(), m.get(k, j).clone());
                if x.is_zero() && y.is_zero() {
                    continue;
                }
                m.set(k, t, &(&x * a) + &(&y * b));
                m.set(k, j, &(&x * c) + &(&y * e));
            }
        }
        let m = &mut self.r_inv;
        for k in 0..m.cols() {
            let (x, y) = (m.get(t, k).clone(), m.get(j, k).clone());
            if x.is_zero() && y.is_zero() {
                continue;
            }
            m.set(t, k, &(e * &x) - &(c * &y));
            m.set(j, k, &(a * &y) - &(b * &x));
        }
    }

    /// Clear d[i][t] against the pivot d[t][t]: by a multiple of row t when
    /// the pivot divides it, otherwise by the Bezout transform that puts the
    /// gcd in the pivot.
    fn clear_below(&mut self, t: usize, i: usize) -> Result<()> {
        let (p, x) = (self.d.get(t, t).clone(), self.d.get(i, t).clone());
        if self.ring.divides(&p, &x) {
            let q = self.ring.div_exact(&x, &p)?;
            self.add_row(i, t, &-q);
        } else {
            let (g, u, v) = self.ring.xgcd(&p, &x)?;
            let (pg, xg) = (self.ring.div_exact(&p, &g)?, self.ring.div_exact(&x, &g)?);
            self.combine_rows(t, i, [&u, &v, &-xg, &pg]);
            self.tidy_row(t);
        }
        self.tidy_row(i);
        Ok(())
    }

    fn clear_right(&mut self, t: usize, j: usize) -> Result<()> {
        let (p, x) = (self.d.get(t, t).clone(), self.d.get(t, j).clone());
        if self.ring.divides(&p, &x) {
            let q = self.ring.div_exact(&x, &p)?;
            self.add_col(j, t, &-q);
        } else {
            let (g, u, v) = self.ring.xgcd(&p, &x)?;
            let (pg, xg) = (self.ring.div_exact(&p, &g)?, self.ring.div_exact(&x, &g)?);
            self.combine_cols(t, j, [&u, &v, &-xg, &pg]);
            self.tidy_col(t);
        }
        self.tidy_col(j);
        Ok(())
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for m in [&mut self.d, &mut self.l] {
            for k in 0..m.cols() {
                let a = m.get(i, k).clone();
                let b = m.get(j, k).clone();
                m.set(i, k, b);
                m.set(j, k, a);
            }
        }
        let m = &mut self.l_inv;
        for k in 0..m.rows() {
            let a = m.get(k, i).clone();
            let b = m.get(k, j).clone();
            m.set(k, i, b);
            m.set(k, j, a);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for m in [&mut self.d, &mut self.r] {
            for k in 0..m.rows() {
                let a = m.get(k, i).clone();
                let b = m.get(k, j).clone();
                m.set(k, i, b);
                m.set(k, j, a);
            }
        }
        let m = &mut self.r_inv;
        for k in 0..m.cols() {
            let a = m.get(i, k).clone();
            let b = m.get(j, k).clone();
            m.set(i, k, b);
            m.set(j, k, a);
        }
    }

    fn scale_row(&mut self, i: usize, u: &RingElement, u_inv: &RingElement) {
        for m in [&mut self.d, &mut self.l] {
            for k in 0..m.cols() {
                let v = m.get(i, k);
                if !v.is_zero() {
                    let nv = u * v;
                    m.set(i, k, nv);
                }
            }
        }
        let m = &mut self.l_inv;
        for k in 0..m.rows() {
            let v = m.get(k, i);
            if !v.is_zero() {
                let nv = v * u_inv;
                m.set(k, i, nv);
            }
        }
    }

    fn scale_col(&mut self, j: usize, u: &RingElement, u_inv: &RingElement) {
        for m in [&mut self.d, &mut self.r] {
            for k in 0..m.rows() {
                let v = m.get(k, j);
                if !v.is_zero() {
                    let nv = v * u;
                    m.set(k, j, nv);
                }
            }
        }
        let m = &mut self.r_inv;
        for k in 0..m.cols() {
            let v = m.get(j, k);
            if !v.is_zero() {
                let nv = u_inv * v;
                m.set(j, k, nv);
            }
        }
    }

    /// Rescale row i of d by a unit to primitive integer coefficients.
    fn tidy_row(&mut self, i: usize) {
        let row: Vec<RingElement> = (0..self.d.cols()).map(|k| self.d.get(i, k).clone()).collect();
        if let Some(u) = self.ring.content_unit(&row) {
            if !u.is_one() {
                let ui = self.ring.inverse_unit(&u).expect("content unit");
                self.scale_row(i, &u, &ui);
            }
        }
    }

    fn tidy_col(&mut self, j: usize) {
        let col: Vec<RingElement> = (0..self.d.rows()).map(|k| self.d.get(k, j).clone()).collect();
        if let Some(u) = self.ring.content_unit(&col) {
            if !u.is_one() {
                let ui = self.ring.inverse_unit(&u).expect("content unit");
                self.scale_col(j, &u, &ui);
            }
        }
    }

    fn norm_key(&self, i: usize, j: usize) -> Option<num_bigint::BigInt> {
        self.ring.norm(self.d.get(i, j))
    }
}

fn check_ring(ring: Ring, a: &M) -> Result<()> {
    if let Some(x) = a.entries().iter().find(|x| !ring.contains(x)) {
        return Err(Error::NotInRing(x.to_string(), ring.tag()));
    }
    Ok(())
}

/// Smith normal form with minimal-norm pivoting (ties by lowest row, then
/// column) and Bezout elimination against the pivot.
pub fn smith_normal_form(ring: Ring, a: &M) -> Result<SmithForm> {
    check_ring(ring, a)?;
    let (n, m) = a.shape();
    let mut w = Work {
        ring,
        d: a.clone(),
        l: Matrix::identity(n),
        l_inv: Matrix::identity(n),
        r: Matrix::identity(m),
        r_inv: Matrix::identity(m),
    };
    let mut t = 0;
    while t < n.min(m) {
        // pivot search
        let mut best: Option<(num_bigint::BigInt, usize, usize)> = None;
        for i in t..n {
            for j in t..m {
                if let Some(k) = w.norm_key(i, j) {
                    if best.as_ref().is_none_or(|b| k < b.0) {
                        best = Some((k, i, j));
                    }
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            for i in t + 1..n {
                if !w.d.get(i, t).is_zero() {
                    w.clear_below(t, i)?;
                }
            }
            for j in t + 1..m {
                if !w.d.get(t, j).is_zero() {
                    w.clear_right(t, j)?;
                }
            }
            // column operations can refill column t
            if (t + 1..n).any(|i| !w.d.get(i, t).is_zero()) {
                continue;
            }
            // divisibility of the remaining block
            let p = w.d.get(t, t).clone();
            let mut bad = None;
            'outer: for i in t + 1..n {
                for j in t + 1..m {
                    if !ring.divides(&p, w.d.get(i, j)) {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => w.add_row(t, i, &RingElement::one()),
                None => break,
            }
        }
        let p = w.d.get(t, t).clone();
        let u = ring.normalizing_unit(&p);
        if !u.is_one() {
            let ui = ring.inverse_unit(&u)?;
            w.scale_row(t, &u, &ui);
        }
        t += 1;
    }
    let rank = t;
    Ok(SmithForm { ring, u: w.l_inv, u_inv: w.l, d: w.d, v: w.r_inv, v_inv: w.r, rank })
}

// ---------------------------------------------------------------------------
// Module presentations

/// A finitely generated module given as a direct sum of cyclic summands
/// R/(a_i) (a_i = 0 for free summands), each with a representative in an
/// ambient free module.
#[derive(Clone, Debug, PartialEq)]
pub struct ModulePresentation {
    pub ring: Ring,
    pub ambient_rank: usize,
    /// Relation matrix whose cokernel is the module (before splitting).
    pub relations: M,
    /// Annihilator of each summand; zero for free summands. Torsion first.
    pub annihilators: Vec<RingElement>,
    /// Ambient representative of each summand.
    pub generators: Vec<Vec<RingElement>>,
    /// Row i reads off the coefficient of summand i of an ambient element
    /// lying in the submodule being presented.
    pub coordinates: M,
}

impl ModulePresentation {
    pub fn is_zero(&self) -> bool {
        self.annihilators.is_empty()
    }

    pub fn free_rank(&self) -> usize {
        self.annihilators.iter().filter(|a| a.is_zero()).count()
    }

    pub fn torsion_count(&self) -> usize {
        self.annihilators.len() - self.free_rank()
    }

    /// Coefficients of x in the summands, reduced modulo the annihilators.
    pub fn coords_of(&self, x: &[RingElement]) -> Result<Vec<RingElement>> {
        let c = self.coordinates.mul_vec(x);
        c.iter()
            .zip(&self.annihilators)
            .map(|(ci, a)| if a.is_zero() { Ok(ci.clone()) } else { Ok(self.ring.divmod(ci, a)?.1) })
            .collect()
    }

    /// Whether x represents zero in the module.
    pub fn is_trivial_class(&self, x: &[RingElement]) -> Result<bool> {
        Ok(self.coords_of(x)?.iter().all(|c| c.is_zero()))
    }
}

fn ring_symbol(ring: Ring) -> &'static str {
    match ring {
        Ring::Integers => "Z",
        Ring::Rationals => "Q",
        Ring::Laurent => "Λ",
    }
}

impl fmt::Display for ModulePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let sym = ring_symbol(self.ring);
        let mut parts: Vec<String> = self
            .annihilators
            .iter()
            .filter(|a| !a.is_zero())
            .map(|a| {
                let s = a.to_string();
                if a.is_constant() {
                    format!("{sym}/{s}")
                } else {
                    format!("{sym}/({s})")
                }
            })
            .collect();
        match self.free_rank() {
            0 => {}
            1 => parts.push(sym.to_string()),
            k => parts.push(format!("{sym}^{k}")),
        }
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// Present coker(rel) where rel is n x m, embedded in an ambient module by
/// `basis` (ambient x n) with left inverse `left_inv` (n x ambient).
pub fn present(ring: Ring, rel: &M, basis: &M, left_inv: &M) -> Result<ModulePresentation> {
    let snf = smith_normal_form(ring, rel)?;
    let n = rel.rows();
    let mut annihilators = Vec::new();
    let mut rows = Vec::new();
    for i in 0..n {
        let a = if i < snf.rank { snf.d.get(i, i).clone() } else { RingElement::zero() };
        if i < snf.rank && ring.is_unit(&a) {
            continue;
        }
        annihilators.push(a);
        rows.push(i);
    }
    let gens_local = snf.u.select_cols(&rows);
    let generators_m = basis.mul(&gens_local);
    let generators = (0..rows.len()).map(|j| generators_m.col(j)).collect();
    let coordinates = snf.u_inv.select_rows(&rows).mul(left_inv);
    Ok(ModulePresentation { ring, ambient_rank: basis.rows(), relations: rel.clone(), annihilators, generators, coordinates })
}

/// Presentation of ker(boundary_r) / im(boundary_{r+1}) with cycle lifts.
pub fn homology(c: &Complex<RingElement>, r: i64) -> Result<ModulePresentation> {
    let ring = c.ring;
    let n = c.rank(r);
    let d = c.boundary(r);
    let snf = smith_normal_form(ring, &d)?;
    let k = snf.rank;
    let keep: Vec<usize> = (k..n).collect();
    let basis = snf.v_inv.select_cols(&keep);
    let left_inv = snf.v.select_rows(&keep);
    let rel = left_inv.mul(&c.boundary(r + 1));
    present(ring, &rel, &basis, &left_inv)
}

/// Cohomology of C in degree r, computed as homology of C^{-*}.
pub fn cohomology(c: &Complex<RingElement>, r: i64) -> Result<ModulePresentation> {
    homology(&crate::chain_complex::cochain_complex(c), -r)
}

/// Keep only the torsion summands.
pub fn torsion_part(m: &ModulePresentation) -> ModulePresentation {
    let keep: Vec<usize> = (0..m.annihilators.len()).filter(|&i| !m.annihilators[i].is_zero()).collect();
    ModulePresentation {
        ring: m.ring,
        ambient_rank: m.ambient_rank,
        relations: m.relations.clone(),
        annihilators: keep.iter().map(|&i| m.annihilators[i].clone()).collect(),
        generators: keep.iter().map(|&i| m.generators[i].clone()).collect(),
        coordinates: m.coordinates.select_rows(&keep),
    }
}

// ---------------------------------------------------------------------------
// Linear solving

/// Proof that A x = b has no solution: `functional * A` has every entry
/// divisible by `divisor` (zero meaning the product vanishes), while
/// `functional * b` is not.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveCertificate {
    pub index: usize,
    pub functional: Vec<RingElement>,
    pub divisor: RingElement,
}

impl SolveCertificate {
    pub fn verify(&self, ring: Ring, a: &M, b: &[RingElement]) -> bool {
        let row = Matrix::from_fn(1, a.rows(), |_, j| self.functional[j].clone());
        let fa = row.mul(a);
        let fb = row.mul_vec(b)[0].clone();
        fa.entries().iter().all(|x| ring.divides(&self.divisor, x)) && !ring.divides(&self.divisor, &fb)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    Solved(Vec<RingElement>),
    Obstructed(SolveCertificate),
}

impl SolveOutcome {
    pub fn solution(self) -> Option<Vec<RingElement>> {
        match self {
            SolveOutcome::Solved(x) => Some(x),
            SolveOutcome::Obstructed(_) => None,
        }
    }
}

/// Solve A x = b exactly over the ring.
pub fn solve_linear(ring: Ring, a: &M, b: &[RingElement]) -> Result<SolveOutcome> {
    if b.len() != a.rows() {
        return Err(Error::Shape(format!("rhs of length {} for {:?}", b.len(), a.shape())));
    }
    let snf = smith_normal_form(ring, a)?;
    solve_with(&snf, b)
}

/// Solve with a precomputed Smith form of A.
pub fn solve_with(snf: &SmithForm, b: &[RingElement]) -> Result<SolveOutcome> {
    let ring = snf.ring;
    let c = snf.u_inv.mul_vec(b);
    let mut y = vec![RingElement::zero(); snf.v.rows()];
    for (i, ci) in c.iter().enumerate() {
        let di = if i < snf.rank { snf.d.get(i, i).clone() } else { RingElement::zero() };
        let ok = if di.is_zero() { ci.is_zero() } else { ring.divides(&di, ci) };
        if !ok {
            return Ok(SolveOutcome::Obstructed(SolveCertificate { index: i, functional: snf.u_inv.row(i), divisor: di }));
        }
        if !di.is_zero() {
            y[i] = ring.div_exact(ci, &di)?;
        }
    }
    Ok(SolveOutcome::Solved(snf.v_inv.mul_vec(&y)))
}

/// Solve A X = B column by column; None if some column has no solution.
pub fn solve_matrix(ring: Ring, a: &M, b: &M) -> Result<Option<M>> {
    let snf = smith_normal_form(ring, a)?;
    let mut cols = Vec::new();
    for j in 0..b.cols() {
        match solve_with(&snf, &b.col(j))? {
            SolveOutcome::Solved(x) => cols.push(x),
            SolveOutcome::Obstructed(_) => return Ok(None),
        }
    }
    Ok(Some(Matrix::from_fn(a.cols(), b.cols(), |i, j| cols[j][i].clone())))
}

// ---------------------------------------------------------------------------
// Chain-level tests

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiIsoReport {
    pub passed: bool,
    /// Degrees where the mapping cone has nonzero homology, with the module.
    pub failures: Vec<(i64, String)>,
}

pub fn is_acyclic(c: &Complex<RingElement>) -> Result<Vec<(i64, String)>> {
    let mut out = Vec::new();
    for r in c.degrees() {
        let h = homology(c, r)?;
        if !h.is_zero() {
            out.push((r, h.to_string()));
        }
    }
    Ok(out)
}

/// Passes iff the mapping cone of f is acyclic.
pub fn is_quasi_iso(f: &ChainMap<RingElement>) -> Result<QuasiIsoReport> {
    let cone = mapping_cone(f)?;
    let failures = is_acyclic(&cone.cone)?;
    Ok(QuasiIsoReport { passed: failures.is_empty(), failures })
}

/// Outcome of [`is_null_homotopic`].
#[derive(Clone, Debug, PartialEq)]
pub enum NullHomotopy {
    Found(ChainHomotopy<RingElement>),
    /// Lowest degree r such that the equations in degrees <= r are already
    /// unsolvable.
    Obstructed(i64),
}

/// Index bookkeeping for the unknown entries of k_r: C_r -> D_{r+1}.
struct KLayout {
    offset: BTreeMap<i64, usize>,
    total: usize,
}

fn k_layout(f: &ChainMap<RingElement>, degrees: &[i64]) -> KLayout {
    let mut offset = BTreeMap::new();
    let mut total = 0;
    for &r in degrees {
        offset.insert(r, total);
        total += f.target.rank(r + 1) * f.source.rank(r);
    }
    KLayout { offset, total }
}

/// Rows of the linear system f_r = d k_r + k_{r-1} d for one degree r.
fn homotopy_rows(f: &ChainMap<RingElement>, lay: &KLayout, r: i64) -> (Vec<Vec<(usize, RingElement)>>, Vec<RingElement>) {
    let (c, d) = (&f.source, &f.target);
    let (nd, nc) = (d.rank(r), c.rank(r));
    let bd = d.boundary(r + 1);
    let bc = c.boundary(r);
    let fr = f.get(r);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..nd {
        for j in 0..nc {
            let mut row = Vec::new();
            // (d k_r)[i][j] = sum_a bd[i][a] k_r[a][j]
            if let Some(&off) = lay.offset.get(&r) {
                for a in 0..d.rank(r + 1) {
                    let v = bd.get(i, a);
                    if !v.is_zero() {
                        row.push((off + a * nc + j, v.clone()));
                    }
                }
            }
            // (k_{r-1} d)[i][j] = sum_b k_{r-1}[i][b] bc[b][j]
            if let Some(&off) = lay.offset.get(&(r - 1)) {
                let cols = c.rank(r - 1);
                for b in 0..cols {
                    let v = bc.get(b, j);
                    if !v.is_zero() {
                        row.push((off + i * cols + b, v.clone()));
                    }
                }
            }
            rows.push(row);
            rhs.push(fr.get(i, j).clone());
        }
    }
    (rows, rhs)
}

fn assemble(rows: &[Vec<(usize, RingElement)>], cols: usize) -> M {
    let mut m = Matrix::zeros(rows.len(), cols);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row {
            let cur = m.get(i, *j) + v;
            m.set(i, *j, cur);
        }
    }
    m
}

/// Find k with f = d k + k d by one global exact linear solve.
pub fn is_null_homotopic(f: &ChainMap<RingElement>) -> Result<NullHomotopy> {
    let ring = f.target.ring;
    let lo = f.source.lo().min(f.target.lo() - 1);
    let hi = f.source.hi().max(f.target.hi());
    let degrees: Vec<i64> = (lo..=hi).filter(|&r| f.target.rank(r + 1) * f.source.rank(r) > 0).collect();
    let lay = k_layout(f, &degrees);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut ends = Vec::new();
    for r in lo..=hi + 1 {
        let (a, b) = homotopy_rows(f, &lay, r);
        rows.extend(a);
        rhs.extend(b);
        ends.push((r, rows.len()));
    }
    if rows.is_empty() {
        return Ok(NullHomotopy::Found(ChainHomotopy { maps: BTreeMap::new() }));
    }
    let a = assemble(&rows, lay.total);
    match solve_linear(ring, &a, &rhs)? {
        SolveOutcome::Solved(x) => {
            let mut maps = BTreeMap::new();
            for &r in &degrees {
                let off = lay.offset[&r];
                let (nr, nc) = (f.target.rank(r + 1), f.source.rank(r));
                maps.insert(r, Matrix::from_fn(nr, nc, |i, j| x[off + i * nc + j].clone()));
            }
            Ok(NullHomotopy::Found(ChainHomotopy { maps }))
        }
        SolveOutcome::Obstructed(_) => {
            for &(r, end) in &ends {
                let sub = assemble(&rows[..end], lay.total);
                if let SolveOutcome::Obstructed(_) = solve_linear(ring, &sub, &rhs[..end])? {
                    return Ok(NullHomotopy::Obstructed(r));
                }
            }
            Ok(NullHomotopy::Obstructed(hi + 1))
        }
    }
}

/// Solve d_Hom N = target for a family N of total degree p + 1 on `c`,
/// where target has total degree p. Columns of the system are the
/// boundaries of the elementary families.
pub fn solve_family_boundary(c: &Complex<RingElement>, p: i64, target: &Family<RingElement>) -> Result<Option<Family<RingElement>>> {
    let degrees: Vec<i64> = c.degrees().filter(|&r| c.rank(r) * c.rank(p + 1 - r) > 0).collect();
    let rows_at: Vec<i64> = c.degrees().filter(|&r| c.rank(r) * c.rank(p - r) > 0).collect();
    let mut unknowns = Vec::new();
    for &r in &degrees {
        for i in 0..c.rank(r) {
            for j in 0..c.rank(p + 1 - r) {
                unknowns.push((r, i, j));
            }
        }
    }
    let mut row_index = BTreeMap::new();
    let mut rhs = Vec::new();
    for &r in &rows_at {
        let t = family_get(target, c, p, r);
        for i in 0..c.rank(r) {
            for j in 0..c.rank(p - r) {
                row_index.insert((r, i, j), rhs.len());
                rhs.push(t.get(i, j).clone());
            }
        }
    }
    let mut a = Matrix::zeros(rhs.len(), unknowns.len());
    for (col, &(r, i, j)) in unknowns.iter().enumerate() {
        let mut e = Matrix::zeros(c.rank(r), c.rank(p + 1 - r));
        e.set(i, j, RingElement::one());
        let unit: Family<RingElement> = [(r, e)].into_iter().collect();
        for (s, m) in hom_boundary(&unit, c, p + 1) {
            for x in 0..m.rows() {
                for y in 0..m.cols() {
                    if !m.get(x, y).is_zero() {
                        a.set(row_index[&(s, x, y)], col, m.get(x, y).clone());
                    }
                }
            }
        }
    }
    if unknowns.is_empty() || rhs.is_empty() {
        return Ok(if rhs.iter().all(|x| x.is_zero()) { Some(Family::new()) } else { None });
    }
    Ok(solve_linear(c.ring, &a, &rhs)?.solution().map(|x| {
        let mut out = Family::new();
        for &r in &degrees {
            let (nr, nc) = (c.rank(r), c.rank(p + 1 - r));
            let base = unknowns.iter().position(|u| u.0 == r).unwrap_or(0);
            out.insert(r, Matrix::from_fn(nr, nc, |i, j| x[base + i * nc + j].clone()));
        }
        out
    }))
}

/// gcd of all k x k minors, the product d_1 ... d_k of the Smith form.
pub fn minors_gcd(ring: Ring, a: &M, k: usize) -> Result<RingElement> {
    let rows = combinations(a.rows(), k);
    let cols = combinations(a.cols(), k);
    let mut g = RingElement::zero();
    for r in &rows {
        for c in &cols {
            let det = a.submatrix(r, c).determinant();
            g = ring.gcd(&g, &det)?;
        }
    }
    Ok(ring.canonical(&g))
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
