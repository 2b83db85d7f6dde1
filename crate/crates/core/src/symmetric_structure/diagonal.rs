//! Equivariant diagonal approximations Delta_0, ..., Delta_n of a free
//! Z[pi]-complex viewed as the cellular chains of a universal cover.
//!
//! A cell of the cover is `g * e` for a group element g and a basis element
//! e of C. The cover's boundary is read off the boundary matrices, and each
//! Delta_i(e) is found inside the subcomplex spanned by the closure of e
//! (tensored with itself) by one exact integer solve. Equivariance
//! Delta_i(g e) = g Delta_i(e) extends the values to every cell.
//!
//! On the tensor product of the cover with itself
//! d(x (x) y) = x (x) dy + (-1)^{|y|} dx (x) y and T(x (x) y) =
//! (-1)^{|x||y|} y (x) x; the relations enforced are
//! d Delta_i - (-1)^i Delta_i d = Delta_{i-1} + (-1)^i T Delta_{i-1}.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain_complex::{sign, tensor, ChainMap, Complex, Family};
use crate::error::{Error, Result};
use crate::group_ring::{GroupRelations, GroupRingElement, GroupWord};
use crate::homology_engine::{is_acyclic, solve_linear, SolveOutcome};
use crate::matrix::Matrix;
use crate::ring_core::{Ring, RingElement, RingOps};

/// `g * e` with e the basis element `index` of degree `dim`.
pub type Cell = (GroupWord, i64, usize);
pub type CellChain = BTreeMap<Cell, i64>;
pub type TensorChain = BTreeMap<(Cell, Cell), i64>;

/// How each lift is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lift {
    /// The solution returned by the exact solver.
    Canonical,
    /// The canonical solution plus the boundary of a seeded random chain.
    Perturbed(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagonal {
    pub rel: Arc<GroupRelations>,
    /// `maps[i][(dim, index)]` is Delta_i of the basis cell.
    pub maps: Vec<BTreeMap<(i64, usize), TensorChain>>,
}

struct Cover<'a> {
    c: &'a Complex<GroupRingElement>,
    rel: &'a Arc<GroupRelations>,
}

fn add_to<K: Ord + Clone>(acc: &mut BTreeMap<K, i64>, k: K, v: i64) {
    if v == 0 {
        return;
    }
    let e = acc.entry(k.clone()).or_insert(0);
    *e += v;
    if *e == 0 {
        acc.remove(&k);
    }
}

fn small(c: &num_bigint::BigInt) -> Result<i64> {
    c.to_i64().ok_or_else(|| Error::Invalid("coefficient too large".into()))
}

impl Cover<'_> {
    fn mul(&self, g: &GroupWord, h: &GroupWord) -> GroupWord {
        g.mul(h, self.rel)
    }

    fn cell_boundary(&self, cell: &Cell) -> Result<CellChain> {
        let (g, k, idx) = cell;
        let mut out = CellChain::new();
        let bd = self.c.boundary(*k);
        for j in 0..bd.rows() {
            for (w, n) in bd.get(j, *idx).terms() {
                add_to(&mut out, (self.mul(g, w), k - 1, j), small(n)?);
            }
        }
        Ok(out)
    }

    fn chain_boundary(&self, x: &CellChain) -> Result<CellChain> {
        let mut out = CellChain::new();
        for (cell, n) in x {
            for (c2, m) in self.cell_boundary(cell)? {
                add_to(&mut out, c2, n * m);
            }
        }
        Ok(out)
    }

    fn tensor_boundary(&self, x: &TensorChain) -> Result<TensorChain> {
        let mut out = TensorChain::new();
        for ((a, b), n) in x {
            for (b2, m) in self.cell_boundary(b)? {
                add_to(&mut out, (a.clone(), b2), n * m);
            }
            let s = sign(b.1);
            for (a2, m) in self.cell_boundary(a)? {
                add_to(&mut out, (a2, b.clone()), s * n * m);
            }
        }
        Ok(out)
    }

    fn closure(&self, cell: &Cell) -> Result<BTreeSet<Cell>> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![cell.clone()];
        while let Some(x) = stack.pop() {
            if seen.insert(x.clone()) {
                stack.extend(self.cell_boundary(&x)?.into_keys());
            }
        }
        Ok(seen)
    }
}

pub fn transpose(x: &TensorChain) -> TensorChain {
    let mut out = TensorChain::new();
    for ((a, b), n) in x {
        add_to(&mut out, (b.clone(), a.clone()), sign(a.1 * b.1) * n);
    }
    out
}

fn add_scaled(acc: &mut TensorChain, x: &TensorChain, s: i64) {
    for (k, v) in x {
        add_to(acc, k.clone(), s * v);
    }
}

fn translate(rel: &Arc<GroupRelations>, values: &BTreeMap<(i64, usize), TensorChain>, x: &CellChain) -> TensorChain {
    let mut out = TensorChain::new();
    for ((g, k, idx), n) in x {
        if let Some(v) = values.get(&(*k, *idx)) {
            for ((a, b), m) in v {
                let a2 = (g.mul(&a.0, rel), a.1, a.2);
                let b2 = (g.mul(&b.0, rel), b.1, b.2);
                add_to(&mut out, (a2, b2), n * m);
            }
        }
    }
    out
}

impl Diagonal {
    pub fn top(&self) -> usize {
        self.maps.len().saturating_sub(1)
    }

    pub fn get(&self, i: usize, dim: i64, index: usize) -> TensorChain {
        self.maps.get(i).and_then(|m| m.get(&(dim, index))).cloned().unwrap_or_default()
    }

    /// Delta_i of a chain of the cover, by equivariance.
    pub fn apply(&self, i: usize, x: &CellChain) -> TensorChain {
        match self.maps.get(i) {
            Some(m) => translate(&self.rel, m, x),
            None => TensorChain::new(),
        }
    }
}

fn cell_seed(seed: u64, k: i64, idx: usize, i: usize) -> u64 {
    seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (idx as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f) ^ ((i as u64) << 48)
}

fn pairs_of_degree(cells: &BTreeSet<Cell>, deg: i64) -> Vec<(Cell, Cell)> {
    let mut out = Vec::new();
    for a in cells {
        for b in cells {
            if a.1 + b.1 == deg {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

/// The closure as a complex over Z augmented to Z in degree -1; it must be
/// acyclic for the lifts to exist.
fn closure_is_acyclic(cover: &Cover<'_>, cells: &BTreeSet<Cell>) -> Result<bool> {
    let top = cells.iter().map(|c| c.1).max().unwrap_or(0);
    let by_dim: Vec<Vec<&Cell>> = (0..=top).map(|k| cells.iter().filter(|c| c.1 == k).collect()).collect();
    let mut bds = vec![Matrix::from_fn(1, by_dim[0].len(), |_, _| RingElement::one())];
    for k in 1..=top as usize {
        let mut m = Matrix::zeros(by_dim[k - 1].len(), by_dim[k].len());
        for (j, c) in by_dim[k].iter().enumerate() {
            for (face, n) in cover.cell_boundary(c)? {
                let i = by_dim[k - 1].iter().position(|x| **x == face).expect("closed under faces");
                m.set(i, j, RingElement::int(n));
            }
        }
        bds.push(m);
    }
    let mut ranks = vec![1];
    ranks.extend(by_dim.iter().map(|v| v.len()));
    let aug = Complex::new(Ring::Integers, -1, ranks, bds)?;
    Ok(is_acyclic(&aug)?.is_empty())
}

/// Solve d a = b inside closure (x) closure in degree `deg`.
fn lift(cover: &Cover<'_>, cells: &BTreeSet<Cell>, deg: i64, b: &TensorChain, how: Lift, seed: u64) -> Result<TensorChain> {
    let hi = pairs_of_degree(cells, deg);
    let lo = pairs_of_degree(cells, deg - 1);
    let lo_idx: HashMap<&(Cell, Cell), usize> = lo.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut rhs = vec![RingElement::zero(); lo.len()];
    for (k, v) in b {
        let i = lo_idx
            .get(k)
            .ok_or_else(|| Error::Invalid("defect leaves the closure of its cell".into()))?;
        rhs[*i] = RingElement::int(*v);
    }
    let mut a = Matrix::zeros(lo.len(), hi.len());
    for (j, p) in hi.iter().enumerate() {
        let single: TensorChain = [(p.clone(), 1)].into_iter().collect();
        for (k, v) in cover.tensor_boundary(&single)? {
            let i = lo_idx[&k];
            a.set(i, j, RingElement::int(v));
        }
    }
    let x = match solve_linear(Ring::Integers, &a, &rhs)? {
        SolveOutcome::Solved(x) => x,
        SolveOutcome::Obstructed(_) => {
            return Err(Error::Invalid("defect is not a boundary: the cell closures are not acyclic".into()))
        }
    };
    let mut out = TensorChain::new();
    for (p, v) in hi.iter().zip(&x) {
        let n = v.constant_term();
        if !n.is_integer() {
            return Err(Error::Invalid("non-integral lift".into()));
        }
        add_to(&mut out, p.clone(), n.to_integer().to_i64().ok_or_else(|| Error::Invalid("lift too large".into()))?);
    }
    if let Lift::Perturbed(_) = how {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let up = pairs_of_degree(cells, deg + 1);
        let mut w = TensorChain::new();
        for p in up {
            add_to(&mut w, p, rng.gen_range(-2..=2));
        }
        add_scaled(&mut out, &cover.tensor_boundary(&w)?, 1);
    }
    Ok(out)
}

/// The group of a complex over Z[pi], read from its entries.
pub fn relations_of(c: &Complex<GroupRingElement>) -> Option<Arc<GroupRelations>> {
    for r in c.degrees() {
        let b = c.boundary(r);
        if let Some(rel) = b.entries().iter().find_map(|x| x.relations().cloned()) {
            return Some(rel);
        }
    }
    None
}

/// Build Delta_0, ..., Delta_top for a complex concentrated in degrees
/// [0, top] whose cell closures in the cover are acyclic.
pub fn diagonal_approximation(
    c: &Complex<GroupRingElement>,
    rel: &Arc<GroupRelations>,
    how: Lift,
) -> Result<Diagonal> {
    if c.is_empty() {
        return Ok(Diagonal { rel: rel.clone(), maps: vec![BTreeMap::new()] });
    }
    if c.lo() < 0 {
        return Err(Error::Invalid("complex has negative degrees".into()));
    }
    let cover = Cover { c, rel };
    let top = c.hi().max(0) as usize;
    let mut diag = Diagonal { rel: rel.clone(), maps: vec![BTreeMap::new(); top + 1] };
    let seed = match how {
        Lift::Canonical => 0,
        Lift::Perturbed(s) => s,
    };
    for k in c.lo()..=c.hi() {
        for idx in 0..c.rank(k) {
            let e: Cell = (GroupWord::identity(), k, idx);
            let cells = cover.closure(&e)?;
            if !closure_is_acyclic(&cover, &cells)? {
                return Err(Error::Invalid(format!("the closure of cell {idx} in degree {k} is not acyclic")));
            }
            let de = cover.chain_boundary(&[(e.clone(), 1)].into_iter().collect())?;
            for i in 0..=top {
                let value = if k == 0 && i == 0 {
                    [((e.clone(), e.clone()), 1)].into_iter().collect()
                } else {
                    let mut b = diag.apply(i, &de);
                    if i > 0 {
                        b = b.into_iter().map(|(key, v)| (key, sign(i as i64) * v)).collect();
                        let prev = diag.get(i - 1, k, idx);
                        add_scaled(&mut b, &prev, 1);
                        add_scaled(&mut b, &transpose(&prev), sign(i as i64));
                    }
                    lift(&cover, &cells, k + i as i64, &b, how, cell_seed(seed, k, idx, i))?
                };
                if !value.is_empty() {
                    diag.maps[i].insert((k, idx), value);
                }
            }
        }
    }
    Ok(diag)
}

/// Result of [`check_diagonal`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalReport {
    pub passed: bool,
    pub checked: usize,
    /// (i, dim, index) where the defining relation fails.
    pub relation_failures: Vec<(usize, i64, usize)>,
    /// Cells where (augmentation (x) 1) Delta_0 is not the identity.
    pub augmentation_failures: Vec<(i64, usize)>,
}

/// Recheck every defining relation, including the vanishing of the one past
/// the top, and the augmentation condition.
pub fn check_diagonal(c: &Complex<GroupRingElement>, diag: &Diagonal) -> Result<DiagonalReport> {
    let cover = Cover { c, rel: &diag.rel };
    let mut rep = DiagonalReport { passed: true, checked: 0, relation_failures: Vec::new(), augmentation_failures: Vec::new() };
    for k in c.degrees() {
        for idx in 0..c.rank(k) {
            let e: Cell = (GroupWord::identity(), k, idx);
            let de = cover.chain_boundary(&[(e.clone(), 1)].into_iter().collect())?;
            for i in 0..=diag.top() + 1 {
                let s = sign(i as i64);
                let mut res = cover.tensor_boundary(&diag.get(i, k, idx))?;
                add_scaled(&mut res, &diag.apply(i, &de), -s);
                if i > 0 {
                    let prev = diag.get(i - 1, k, idx);
                    add_scaled(&mut res, &prev, -1);
                    add_scaled(&mut res, &transpose(&prev), -s);
                }
                rep.checked += 1;
                if !res.is_empty() {
                    rep.passed = false;
                    rep.relation_failures.push((i, k, idx));
                }
            }
            let mut aug = CellChain::new();
            for ((a, b), n) in diag.get(0, k, idx) {
                if a.1 == 0 {
                    add_to(&mut aug, b, n);
                }
            }
            rep.checked += 1;
            if aug != [(e, 1)].into_iter().collect() {
                rep.passed = false;
                rep.augmentation_failures.push((k, idx));
            }
        }
    }
    Ok(rep)
}

fn word_element(rel: &Arc<GroupRelations>, a: &Cell, b: &Cell, n: i64) -> GroupRingElement {
    let w = a.0.inverse(rel).mul(&b.0, rel);
    GroupRingElement::word(rel, w, n)
}

/// Delta_i as degreewise matrices C_k -> (C^t (x) C)_{k+i} in the basis of
/// [`tensor`]: (g x) (x) (h y) contributes g^-1 h on x (x) y.
pub fn as_tensor_maps(c: &Complex<GroupRingElement>, diag: &Diagonal, i: usize) -> Result<BTreeMap<i64, Matrix<GroupRingElement>>> {
    let rel = &diag.rel;
    let tc = tensor(c, c)?;
    let mut out = BTreeMap::new();
    for k in c.degrees() {
        let n = k + i as i64;
        let mut offs = BTreeMap::new();
        let mut acc = 0;
        for p in c.degrees() {
            offs.insert(p, acc);
            acc += c.rank(p) * c.rank(n - p);
        }
        let mut m = Matrix::from_fn(tc.rank(n), c.rank(k), |_, _| GroupRingElement::zero_in(rel));
        for idx in 0..c.rank(k) {
            for ((a, b), v) in diag.get(i, k, idx) {
                let row = offs[&a.1] + a.2 * c.rank(b.1) + b.2;
                let cur = m.get(row, idx).add(&word_element(rel, &a, &b, v));
                m.set(row, idx, cur);
            }
        }
        out.insert(k, m);
    }
    Ok(out)
}

/// Delta_0 as a chain map C -> C^t (x) C.
pub fn delta0_chain_map(c: &Complex<GroupRingElement>, diag: &Diagonal) -> Result<ChainMap<GroupRingElement>> {
    let tc = tensor(c, c)?;
    Ok(ChainMap { source: c.clone(), target: tc, maps: as_tensor_maps(c, diag, 0)? })
}

/// A chain of C(M) = Z (x)_{Z[pi]} C as integer coefficients on basis cells.
pub type FundamentalChain = BTreeMap<(i64, usize), i64>;

/// The boundary of a fundamental chain in Z (x)_{Z[pi]} C.
pub fn augmented_boundary(c: &Complex<GroupRingElement>, x: &FundamentalChain) -> Result<FundamentalChain> {
    let mut out = FundamentalChain::new();
    for ((k, idx), n) in x {
        let bd = c.boundary(*k);
        for j in 0..bd.rows() {
            let a = small(&bd.get(j, *idx).augmentation())?;
            add_to(&mut out, (k - 1, j), a * n);
        }
    }
    Ok(out)
}

/// The sign normalising slant(Delta_s[M]) in dimension m:
/// the product of (-1)^{m+j} for j = 1..s.
pub fn structure_sign(m: i64, s: usize) -> i64 {
    (1..=s as i64).map(|j| sign(m + j)).product()
}

/// phi_s = structure_sign(m, s) * slant(Delta_s([M])) for s = 0..=top, as
/// families on C of total degree m + s.
pub fn symmetric_from_fundamental(
    c: &Complex<GroupRingElement>,
    diag: &Diagonal,
    chain: &FundamentalChain,
    m: i64,
) -> Result<Vec<Family<GroupRingElement>>> {
    if let Some(((k, _), _)) = chain.iter().find(|((k, _), _)| *k != m) {
        return Err(Error::Invalid(format!("fundamental chain has a cell of degree {k}, expected {m}")));
    }
    let rel = &diag.rel;
    let mut out = Vec::new();
    for s in 0..=diag.top() {
        let total = m + s as i64;
        let mut fam: Family<GroupRingElement> = Family::new();
        let mut sum = TensorChain::new();
        for ((k, idx), n) in chain {
            add_scaled(&mut sum, &diag.get(s, *k, *idx), *n);
        }
        let sg = structure_sign(m, s);
        for ((a, b), v) in sum {
            // a in C_p, b in C_q: entry of phi_q: C^p -> C_q at [b][a]
            let q = b.1;
            let entry = fam
                .entry(q)
                .or_insert_with(|| Matrix::from_fn(c.rank(q), c.rank(total - q), |_, _| GroupRingElement::zero_in(rel)));
            let cur = entry.get(b.2, a.2).add(&word_element(rel, &a, &b, sg * v));
            entry.set(b.2, a.2, cur);
        }
        out.push(fam);
    }
    Ok(out)
}

/// An equivariant K: C -> C (x)_Z C of degree one on the cover, given on
/// basis cells, with Delta_0 - Delta_0' = d K + K d.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalHomotopy {
    pub rel: Arc<GroupRelations>,
    pub maps: BTreeMap<(i64, usize), TensorChain>,
}

impl DiagonalHomotopy {
    pub fn apply(&self, x: &CellChain) -> TensorChain {
        translate(&self.rel, &self.maps, x)
    }

    /// Cells where d K(e) + K(d e) differs from Delta_0(e) - Delta_0'(e).
    pub fn failures(&self, c: &Complex<GroupRingElement>, a: &Diagonal, b: &Diagonal) -> Result<Vec<(i64, usize)>> {
        let cover = Cover { c, rel: &self.rel };
        let mut out = Vec::new();
        for k in c.degrees() {
            for idx in 0..c.rank(k) {
                let e: Cell = (GroupWord::identity(), k, idx);
                let de = cover.chain_boundary(&[(e, 1)].into_iter().collect())?;
                let mut res = a.get(0, k, idx);
                add_scaled(&mut res, &b.get(0, k, idx), -1);
                add_scaled(&mut res, &cover.tensor_boundary(&self.maps.get(&(k, idx)).cloned().unwrap_or_default())?, -1);
                add_scaled(&mut res, &self.apply(&de), -1);
                if !res.is_empty() {
                    out.push((k, idx));
                }
            }
        }
        Ok(out)
    }
}

/// An equivariant chain homotopy between the Delta_0 of two diagonal
/// approximations of the same complex, built cell by cell inside the
/// acyclic closures. The two agree after augmentation, so every defect is a
/// boundary there.
pub fn diagonal_homotopy(c: &Complex<GroupRingElement>, a: &Diagonal, b: &Diagonal) -> Result<DiagonalHomotopy> {
    let rel = &a.rel;
    let cover = Cover { c, rel };
    let mut k_maps = DiagonalHomotopy { rel: rel.clone(), maps: BTreeMap::new() };
    for k in c.degrees() {
        for idx in 0..c.rank(k) {
            let e: Cell = (GroupWord::identity(), k, idx);
            let cells = cover.closure(&e)?;
            let de = cover.chain_boundary(&[(e, 1)].into_iter().collect())?;
            let mut defect = a.get(0, k, idx);
            add_scaled(&mut defect, &b.get(0, k, idx), -1);
            add_scaled(&mut defect, &k_maps.apply(&de), -1);
            if defect.is_empty() {
                continue;
            }
            let value = lift(&cover, &cells, k + 1, &defect, Lift::Canonical, 0)?;
            if !value.is_empty() {
                k_maps.maps.insert((k, idx), value);
            }
        }
    }
    let bad = k_maps.failures(c, a, b)?;
    if !bad.is_empty() {
        return Err(Error::Invalid(format!("homotopy fails on cells {bad:?}")));
    }
    Ok(k_maps)
}
