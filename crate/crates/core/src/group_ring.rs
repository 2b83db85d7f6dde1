//! Group words, the integral group ring Z[pi], unitary representations and the
//! coefficient change V (x)_{Z[pi]} -.
//!
//! Relations are carried as metadata on each element: a generator may have
//! finite order and the group may be declared abelian. Words are normalized
//! with respect to that metadata, which is enough for free groups, free abelian
//! groups and cyclic groups.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::chain_complex::Complex;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ring_core::{parse_terms, Rat, Ring, RingElement, RingOps};

/// Generator names plus the relations used to normalize words.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupRelations {
    pub generators: Vec<String>,
    /// 0 means infinite order.
    pub orders: Vec<u32>,
    pub abelian: bool,
}

impl GroupRelations {
    pub fn free(names: &[&str]) -> Arc<Self> {
        Arc::new(GroupRelations {
            generators: names.iter().map(|s| s.to_string()).collect(),
            orders: vec![0; names.len()],
            abelian: false,
        })
    }

    /// Z = <t>.
    pub fn infinite_cyclic() -> Arc<Self> {
        Arc::new(GroupRelations { generators: vec!["t".into()], orders: vec![0], abelian: true })
    }

    /// Z_p = <t | t^p>.
    pub fn cyclic(p: u32) -> Arc<Self> {
        Arc::new(GroupRelations { generators: vec!["t".into()], orders: vec![p], abelian: true })
    }

    /// Z^2 = <s, t | [s, t]>.
    pub fn free_abelian(names: &[&str]) -> Arc<Self> {
        Arc::new(GroupRelations {
            generators: names.iter().map(|s| s.to_string()).collect(),
            orders: vec![0; names.len()],
            abelian: true,
        })
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.generators
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    fn reduce_exp(&self, g: usize, e: i64) -> i64 {
        match self.orders.get(g).copied().unwrap_or(0) {
            0 => e,
            n => e.rem_euclid(n as i64),
        }
    }

    /// Every element of a finite group, or None if the group is infinite or
    /// not abelian.
    pub fn elements(&self) -> Option<Vec<GroupWord>> {
        if !self.abelian || self.orders.contains(&0) {
            return None;
        }
        let mut out = vec![GroupWord::identity()];
        for (g, &n) in self.orders.iter().enumerate() {
            let mut next = Vec::new();
            for w in &out {
                for e in 0..n as i64 {
                    next.push(w.mul(&GroupWord::gen(g, e), self));
                }
            }
            out = next;
        }
        Some(out)
    }
}

/// Word in the generators as (generator index, exponent) syllables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupWord(pub Vec<(usize, i64)>);

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord(Vec::new())
    }

    pub fn gen(g: usize, e: i64) -> Self {
        if e == 0 {
            Self::identity()
        } else {
            GroupWord(vec![(g, e)])
        }
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn normalize(&self, rel: &GroupRelations) -> Self {
        if rel.abelian {
            let mut exps: BTreeMap<usize, i64> = BTreeMap::new();
            for &(g, e) in &self.0 {
                *exps.entry(g).or_insert(0) += e;
            }
            return GroupWord(
                exps.into_iter()
                    .map(|(g, e)| (g, rel.reduce_exp(g, e)))
                    .filter(|&(_, e)| e != 0)
                    .collect(),
            );
        }
        let mut out: Vec<(usize, i64)> = Vec::new();
        for &(g, e) in &self.0 {
            if let Some(last) = out.last_mut() {
                if last.0 == g {
                    last.1 += e;
                    last.1 = rel.reduce_exp(g, last.1);
                    if last.1 == 0 {
                        out.pop();
                    }
                    continue;
                }
            }
            let e = rel.reduce_exp(g, e);
            if e != 0 {
                out.push((g, e));
            }
        }
        GroupWord(out)
    }

    pub fn mul(&self, o: &GroupWord, rel: &GroupRelations) -> GroupWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        GroupWord(v).normalize(rel)
    }

    pub fn inverse(&self, rel: &GroupRelations) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect()).normalize(rel)
    }

    /// Exponent of generator g (abelian groups).
    pub fn exponent(&self, g: usize) -> i64 {
        self.0.iter().filter(|s| s.0 == g).map(|s| s.1).sum()
    }

    fn fmt_with(&self, rel: Option<&GroupRelations>) -> String {
        self.0
            .iter()
            .map(|&(g, e)| {
                let name = rel.map(|r| r.generators[g].clone()).unwrap_or_else(|| format!("g{g}"));
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Element of Z[pi].
#[derive(Clone)]
pub struct GroupRingElement {
    terms: BTreeMap<GroupWord, BigInt>,
    rel: Option<Arc<GroupRelations>>,
}

impl PartialEq for GroupRingElement {
    fn eq(&self, o: &Self) -> bool {
        self.terms == o.terms
    }
}

impl GroupRingElement {
    pub fn zero_in(rel: &Arc<GroupRelations>) -> Self {
        GroupRingElement { terms: BTreeMap::new(), rel: Some(rel.clone()) }
    }

    pub fn word(rel: &Arc<GroupRelations>, w: GroupWord, c: i64) -> Self {
        let mut out = Self::zero_in(rel);
        out.add_term(w.normalize(rel), BigInt::from(c));
        out
    }

    pub fn int(rel: &Arc<GroupRelations>, c: i64) -> Self {
        Self::word(rel, GroupWord::identity(), c)
    }

    /// c * gen^e
    pub fn gen_pow(rel: &Arc<GroupRelations>, g: usize, e: i64) -> Self {
        Self::word(rel, GroupWord::gen(g, e), 1)
    }

    pub fn relations(&self) -> Option<&Arc<GroupRelations>> {
        self.rel.as_ref()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupWord, &BigInt)> {
        self.terms.iter()
    }

    fn add_term(&mut self, w: GroupWord, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(w.clone()).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&w);
        }
    }

    fn rel_with(&self, o: &Self) -> Option<Arc<GroupRelations>> {
        self.rel.clone().or_else(|| o.rel.clone())
    }

    /// Sum of coefficients (the augmentation).
    pub fn augmentation(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Element of the infinite cyclic group ring from an integral Laurent polynomial.
    pub fn from_laurent(rel: &Arc<GroupRelations>, a: &RingElement) -> Result<Self> {
        let mut out = Self::zero_in(rel);
        for (k, c) in a.terms() {
            if !c.is_integer() {
                return Err(Error::NotInRing(a.to_string(), "Z[pi]"));
            }
            out.add_term(GroupWord::gen(0, k).normalize(rel), c.to_integer());
        }
        Ok(out)
    }

    /// Inverse of [`Self::from_laurent`] for one-generator groups.
    pub fn to_laurent(&self) -> RingElement {
        RingElement::from_terms(self.terms.iter().map(|(w, c)| (w.exponent(0), Rat::from_integer(c.clone()))))
    }

    pub fn parse(rel: &Arc<GroupRelations>, s: &str) -> Result<Self> {
        let mut out = Self::zero_in(rel);
        for (c, factors) in parse_terms(s)? {
            if !c.is_integer() {
                return Err(Error::Parse(format!("group ring coefficients must be integers: '{s}'")));
            }
            let mut w = Vec::new();
            for (name, e) in factors {
                w.push((rel.index_of(&name)?, e));
            }
            out.add_term(GroupWord(w).normalize(rel), c.to_integer());
        }
        Ok(out)
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let rel = self.rel.as_deref();
        let mut first = true;
        for (w, c) in self.terms.iter().rev() {
            let mag = c.abs();
            let body = if w.is_identity() {
                mag.to_string()
            } else if mag.is_one() {
                w.fmt_with(rel)
            } else {
                format!("{mag}*{}", w.fmt_with(rel))
            };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
                write!(f, "{body}")?;
            } else {
                write!(f, " {} {body}", if c.is_negative() { "-" } else { "+" })?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl RingOps for GroupRingElement {
    fn zero() -> Self {
        GroupRingElement { terms: BTreeMap::new(), rel: None }
    }
    fn one() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(GroupWord::identity(), BigInt::one());
        GroupRingElement { terms, rel: None }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.rel = self.rel_with(o);
        for (w, c) in &o.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
    fn neg(&self) -> Self {
        GroupRingElement { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(), rel: self.rel.clone() }
    }
    fn mul(&self, o: &Self) -> Self {
        let rel = self.rel_with(o);
        let mut out = GroupRingElement { terms: BTreeMap::new(), rel: rel.clone() };
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let w = match &rel {
                    Some(r) => a.mul(b, r),
                    None => {
                        debug_assert!(a.is_identity() || b.is_identity());
                        if a.is_identity() {
                            b.clone()
                        } else {
                            a.clone()
                        }
                    }
                };
                out.add_term(w, x * y);
            }
        }
        out
    }
    fn conj(&self) -> Self {
        let mut out = GroupRingElement { terms: BTreeMap::new(), rel: self.rel.clone() };
        for (w, c) in &self.terms {
            let inv = match &self.rel {
                Some(r) => w.inverse(r),
                None => w.clone(),
            };
            out.add_term(inv, c.clone());
        }
        out
    }
    fn from_i64(n: i64) -> Self {
        let mut terms = BTreeMap::new();
        if n != 0 {
            terms.insert(GroupWord::identity(), BigInt::from(n));
        }
        GroupRingElement { terms, rel: None }
    }
}

// ---------------------------------------------------------------------------
// Representations

#[derive(Clone, Debug, PartialEq)]
pub struct RepGenerator {
    pub name: String,
    pub matrix: Matrix<RingElement>,
    pub inverse: Matrix<RingElement>,
}

/// alpha: pi -> Aut(R^d) together with the inner product matrix Theta.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    pub ring: Ring,
    pub dim: usize,
    pub generators: Vec<RepGenerator>,
    pub theta: Matrix<RingElement>,
}

/// Outcome of [`check_unitary`].
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryReport {
    pub passed: bool,
    pub bad_inverse: Vec<String>,
    pub not_unitary: Vec<String>,
}

impl Representation {
    /// t -> (t) over Q[t, t^-1].
    pub fn tautological() -> Self {
        Representation {
            ring: Ring::Laurent,
            dim: 1,
            generators: vec![RepGenerator {
                name: "t".into(),
                matrix: Matrix::scalar(1, &RingElement::t_pow(1)),
                inverse: Matrix::scalar(1, &RingElement::t_pow(-1)),
            }],
            theta: Matrix::identity(1),
        }
    }

    /// Every generator acts trivially on Z.
    pub fn trivial(names: &[&str]) -> Self {
        Representation {
            ring: Ring::Integers,
            dim: 1,
            generators: names
                .iter()
                .map(|n| RepGenerator { name: n.to_string(), matrix: Matrix::identity(1), inverse: Matrix::identity(1) })
                .collect(),
            theta: Matrix::identity(1),
        }
    }

    /// Z -> Z_k composed with the regular representation on Z^k.
    pub fn regular_cyclic(k: usize) -> Self {
        let p = Matrix::from_fn(k, k, |i, j| RingElement::int(if i == (j + 1) % k { 1 } else { 0 }));
        Representation {
            ring: Ring::Integers,
            dim: k,
            generators: vec![RepGenerator { name: "t".into(), inverse: p.transpose(), matrix: p }],
            theta: Matrix::identity(k),
        }
    }

    fn generator(&self, name: &str) -> Result<&RepGenerator> {
        self.generators
            .iter()
            .find(|g| g.name == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    fn word_matrix(&self, w: &GroupWord, rel: Option<&GroupRelations>) -> Result<Matrix<RingElement>> {
        let mut m = Matrix::identity(self.dim);
        for &(g, e) in &w.0 {
            let name = match rel {
                Some(r) => r.generators[g].clone(),
                None => return Err(Error::UnknownGenerator(format!("g{g}"))),
            };
            let gen = self.generator(&name)?;
            let base = if e > 0 { &gen.matrix } else { &gen.inverse };
            for _ in 0..e.unsigned_abs() {
                m = m.mul(base);
            }
        }
        Ok(m)
    }
}

/// Matrix of x under the representation.
pub fn represent(x: &GroupRingElement, rep: &Representation) -> Result<Matrix<RingElement>> {
    let mut out = Matrix::zeros(rep.dim, rep.dim);
    for (w, c) in x.terms() {
        let c = RingElement::constant(Rat::from_integer(c.clone()));
        out = out.add(&rep.word_matrix(w, x.relations().map(|r| r.as_ref()))?.scale(&c));
    }
    Ok(out)
}

/// Stored inverses and alpha(g^-1) = Theta^-1 conj(alpha(g))^T Theta, checked
/// in the form Theta alpha(g)^-1 = conj(alpha(g))^T Theta.
pub fn check_unitary(rep: &Representation) -> UnitaryReport {
    let id = Matrix::identity(rep.dim);
    let mut bad_inverse = Vec::new();
    let mut not_unitary = Vec::new();
    for g in &rep.generators {
        if g.matrix.mul(&g.inverse) != id || g.inverse.mul(&g.matrix) != id {
            bad_inverse.push(g.name.clone());
        }
        if rep.theta.mul(&g.inverse) != g.matrix.conj_transpose().mul(&rep.theta) {
            not_unitary.push(g.name.clone());
        }
    }
    UnitaryReport { passed: bad_inverse.is_empty() && not_unitary.is_empty(), bad_inverse, not_unitary }
}

/// Matrix of V* (x) W* -> (V (x) W)* composed with Theta (x) Id, in the
/// block basis where the V-index varies fastest within each generator of W.
pub fn dual_pairing_identify(rep: &Representation, n: usize) -> Matrix<RingElement> {
    let blocks: Vec<(usize, usize, Matrix<RingElement>)> = (0..n).map(|i| (i, i, rep.theta.clone())).collect();
    let sizes = vec![rep.dim; n];
    Matrix::block(&sizes, &sizes, &blocks)
}

/// Replace every group ring entry by its d x d representing block.
pub fn represent_matrix(m: &Matrix<GroupRingElement>, rep: &Representation) -> Result<Matrix<RingElement>> {
    m.expand_blocks(rep.dim, |x| represent(x, rep))
}

/// V (x)_{Z[pi]} C, re-verified to square to zero.
pub fn tensor_with_v(rep: &Representation, c: &Complex<GroupRingElement>) -> Result<Complex<RingElement>> {
    let out = c.try_map_ring(rep.ring, rep.dim, |m| represent_matrix(m, rep))?;
    out.check()?;
    Ok(out)
}

/// Coefficients of an integral Laurent element viewed in Z[Z].
pub fn laurent_to_group(rel: &Arc<GroupRelations>, m: &Matrix<RingElement>) -> Result<Matrix<GroupRingElement>> {
    m.try_map(|a| GroupRingElement::from_laurent(rel, a))
}

pub fn small_int(c: &BigInt) -> i64 {
    c.to_i64().expect("small coefficient")
}
