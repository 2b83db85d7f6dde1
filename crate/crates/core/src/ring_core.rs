//! Rings with involution: Z, Q and Q[t,t^-1], together with fractions and
//! elements of S^-1 R / R.
//!
//! Every element is stored as a sparse Laurent polynomial with exact rational
//! coefficients. The integer and rational rings are the constant elements; the
//! [`Ring`] tag decides which Euclidean structure applies.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Which ring a matrix, complex or fraction lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    Integers,
    Rationals,
    /// Q[t, t^-1] with t -> t^-1.
    Laurent,
}

impl Ring {
    pub fn tag(&self) -> &'static str {
        match self {
            Ring::Integers => "Z",
            Ring::Rationals => "Q",
            Ring::Laurent => "Q[t,t^-1]",
        }
    }

    pub fn from_tag(s: &str) -> Result<Ring> {
        match s.trim() {
            "Z" | "integers" => Ok(Ring::Integers),
            "Q" | "rationals" => Ok(Ring::Rationals),
            "Q[t,t^-1]" | "Z[t,t^-1]" | "laurent" | "Lambda" => Ok(Ring::Laurent),
            other => Err(Error::Parse(format!("unknown ring tag '{other}'"))),
        }
    }

    /// Whether `a` is an element of this ring (Z and Q are constants).
    pub fn contains(&self, a: &RingElement) -> bool {
        match self {
            Ring::Laurent => true,
            Ring::Rationals => a.is_constant(),
            Ring::Integers => a.is_constant() && a.constant_term().is_integer(),
        }
    }
}

/// Operations needed by the generic matrix and chain-complex code.
pub trait RingOps: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn conj(&self) -> Self;
    fn from_i64(n: i64) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

/// Element of Q[t, t^-1]; no zero coefficients are stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RingElement {
    terms: BTreeMap<i64, Rat>,
}

impl RingElement {
    pub fn zero() -> Self {
        RingElement { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, 0)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(rat(n))
    }

    pub fn monomial(c: Rat, k: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        RingElement { terms }
    }

    /// t^k
    pub fn t_pow(k: i64) -> Self {
        Self::monomial(Rat::one(), k)
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Rat)>>(it: I) -> Self {
        let mut out = Self::zero();
        for (k, c) in it {
            out.add_term(k, c);
        }
        out
    }

    /// Integer coefficients, lowest exponent first.
    pub fn from_coeffs(low: i64, coeffs: &[i64]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(i, &c)| (low + i as i64, rat(c))))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rat)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, k: i64) -> Rat {
        self.terms.get(&k).cloned().unwrap_or_else(Rat::zero)
    }

    fn add_term(&mut self, k: i64, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&k| k == 0)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(0)
    }

    pub fn low(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn high(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn leading(&self) -> Rat {
        self.terms.values().next_back().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn shift(&self, k: i64) -> Self {
        RingElement { terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RingElement { terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect() }
    }

    /// t^k -> t^-k, coefficients fixed.
    pub fn involution(&self) -> Self {
        RingElement { terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Evaluate at an integer value of t (t must be a unit if negative exponents occur).
    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for (k, c) in &self.terms {
            let p = if *k >= 0 {
                num_traits::pow(x.clone(), *k as usize)
            } else {
                num_traits::pow(x.recip(), (-k) as usize)
            };
            acc += c * p;
        }
        acc
    }

    /// Parse the textual syntax, e.g. `2*t^-1 + 1 - t^3` or `3/2`.
    pub fn parse(s: &str) -> Result<Self> {
        let terms = parse_terms(s)?;
        let mut out = Self::zero();
        for (c, factors) in terms {
            let mut k = 0i64;
            for (name, e) in factors {
                if name != "t" {
                    return Err(Error::Parse(format!("unknown variable '{name}' in '{s}'")));
                }
                k += e;
            }
            out.add_term(k, c);
        }
        Ok(out)
    }
}

/// Parsed term list: coefficient and a product of `name^exp` factors.
pub(crate) type ParsedTerm = (Rat, Vec<(String, i64)>);

pub(crate) fn parse_terms(s: &str) -> Result<Vec<ParsedTerm>> {
    let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if src.is_empty() {
        return Err(Error::Parse("empty ring element".into()));
    }
    let bad = |why: &str| Error::Parse(format!("cannot parse '{s}': {why}"));
    let chars: Vec<char> = src.chars().collect();
    // split at top-level signs that are not exponents
    let mut pieces: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for (i, &ch) in chars.iter().enumerate() {
        let is_sign = ch == '+' || ch == '-';
        let after_caret = i > 0 && chars[i - 1] == '^';
        if is_sign && !after_caret {
            if !cur.is_empty() {
                pieces.push((neg, std::mem::take(&mut cur)));
            } else if i > 0 {
                return Err(bad("doubled sign"));
            }
            neg = ch == '-';
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return Err(bad("trailing sign"));
    }
    pieces.push((neg, cur));

    let mut out = Vec::new();
    for (neg, body) in pieces {
        let mut coef = Rat::one();
        let mut factors = Vec::new();
        for (idx, f) in body.split('*').enumerate() {
            if f.is_empty() {
                return Err(bad("empty factor"));
            }
            let first = f.chars().next().unwrap();
            if first.is_ascii_digit() {
                if idx != 0 {
                    return Err(bad("coefficient must come first"));
                }
                coef = parse_rat(f).ok_or_else(|| bad("bad coefficient"))?;
            } else if first.is_alphabetic() {
                let (name, exp) = match f.split_once('^') {
                    Some((n, e)) => (n, e.parse::<i64>().map_err(|_| bad("bad exponent"))?),
                    None => (f, 1),
                };
                if !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                    return Err(bad("bad variable name"));
                }
                factors.push((name.to_string(), exp));
            } else {
                return Err(bad("unexpected character"));
            }
        }
        out.push((if neg { -coef } else { coef }, factors));
    }
    Ok(out)
}

pub(crate) fn parse_rat(s: &str) -> Option<Rat> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rat::new(n, d))
}

pub(crate) fn fmt_rat(c: &Rat) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms.iter().rev() {
            let mag = c.abs();
            let body = match (*k, mag.is_one()) {
                (0, _) => fmt_rat(&mag),
                (1, true) => "t".to_string(),
                (1, false) => format!("{}*t", fmt_rat(&mag)),
                (k, true) => format!("t^{k}"),
                (k, false) => format!("{}*t^{k}", fmt_rat(&mag)),
            };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                write!(f, "{body}")?;
                first = false;
            } else {
                write!(f, " {} {body}", if c.is_negative() { "-" } else { "+" })?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a RingElement> for &'a RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a RingElement> for &'a RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a RingElement> for &'a RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &RingElement) -> RingElement {
        let mut out = RingElement::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.add_term(a + b, x * y);
            }
        }
        out
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement { terms: self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect() }
    }
}

impl Neg for RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<RingElement> for RingElement {
            type Output = RingElement;
            fn $m(self, rhs: RingElement) -> RingElement {
                $tr::$m(&self, &rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl AddAssign<&RingElement> for RingElement {
    fn add_assign(&mut self, rhs: &RingElement) {
        for (k, c) in &rhs.terms {
            self.add_term(*k, c.clone());
        }
    }
}

impl SubAssign<&RingElement> for RingElement {
    fn sub_assign(&mut self, rhs: &RingElement) {
        for (k, c) in &rhs.terms {
            self.add_term(*k, -c.clone());
        }
    }
}

impl RingOps for RingElement {
    fn zero() -> Self {
        RingElement::zero()
    }
    fn one() -> Self {
        RingElement::one()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn conj(&self) -> Self {
        self.involution()
    }
    fn from_i64(n: i64) -> Self {
        RingElement::int(n)
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

/// Public involution entry point.
pub fn involution(a: &RingElement) -> RingElement {
    a.involution()
}

// ---------------------------------------------------------------------------
// Euclidean structure

fn int_value(a: &RingElement) -> Result<BigInt> {
    if !Ring::Integers.contains(a) {
        return Err(Error::NotInRing(a.to_string(), "Z"));
    }
    Ok(a.constant_term().to_integer())
}

/// Ordinary polynomial division over Q for polynomials with low() >= 0.
fn poly_divmod(a: &RingElement, b: &RingElement) -> (RingElement, RingElement) {
    let bh = b.high().expect("nonzero divisor");
    let bl = b.leading();
    let mut q = RingElement::zero();
    let mut r = a.clone();
    while let Some(rh) = r.high() {
        if rh < bh {
            break;
        }
        let c = r.leading() / &bl;
        let m = RingElement::monomial(c, rh - bh);
        r = &r - &(&m * b);
        q += &m;
    }
    (q, r)
}

impl Ring {
    /// Euclidean norm; None for zero.
    pub fn norm(&self, a: &RingElement) -> Option<BigInt> {
        if a.is_zero() {
            return None;
        }
        Some(match self {
            Ring::Integers => a.constant_term().to_integer().abs(),
            Ring::Rationals => BigInt::zero(),
            Ring::Laurent => BigInt::from(a.high().unwrap() - a.low().unwrap()),
        })
    }

    pub fn is_unit(&self, a: &RingElement) -> bool {
        match self.norm(a) {
            None => false,
            Some(n) => match self {
                Ring::Integers => n.is_one(),
                _ => n.is_zero(),
            },
        }
    }

    /// a = q*b + r with r = 0 or norm(r) < norm(b).
    pub fn divmod(&self, a: &RingElement, b: &RingElement) -> Result<(RingElement, RingElement)> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self {
            Ring::Integers => {
                let (x, y) = (int_value(a)?, int_value(b)?);
                // remainder taken in [0, |b|)
                let r = x.mod_floor(&y.abs());
                let q = (&x - &r) / &y;
                Ok((RingElement::constant(Rat::from_integer(q)), RingElement::constant(Rat::from_integer(r))))
            }
            Ring::Rationals => {
                if !a.is_constant() || !b.is_constant() {
                    return Err(Error::NotInRing(format!("{a} / {b}"), "Q"));
                }
                Ok((RingElement::constant(a.constant_term() / b.constant_term()), RingElement::zero()))
            }
            Ring::Laurent => {
                if a.is_zero() {
                    return Ok((RingElement::zero(), RingElement::zero()));
                }
                let (la, lb) = (a.low().unwrap(), b.low().unwrap());
                let (ah, bh) = (a.shift(-la), b.shift(-lb));
                let (q, r) = poly_divmod(&ah, &bh);
                Ok((q.shift(la - lb), r.shift(la)))
            }
        }
    }

    /// Exact quotient a / b; errors if b does not divide a.
    pub fn div_exact(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        let (q, r) = self.divmod(a, b)?;
        if !r.is_zero() {
            return Err(Error::NotDivisible(a.to_string(), b.to_string()));
        }
        Ok(q)
    }

    pub fn divides(&self, b: &RingElement, a: &RingElement) -> bool {
        if b.is_zero() {
            return a.is_zero();
        }
        matches!(self.divmod(a, b), Ok((_, r)) if r.is_zero())
    }

    /// Unit u with u*a the canonical associate: positive integer, 1, or a monic
    /// polynomial with nonzero constant term.
    pub fn normalizing_unit(&self, a: &RingElement) -> RingElement {
        if a.is_zero() {
            return RingElement::one();
        }
        match self {
            Ring::Integers => RingElement::int(if a.constant_term().is_negative() { -1 } else { 1 }),
            Ring::Rationals => RingElement::constant(a.constant_term().recip()),
            Ring::Laurent => RingElement::monomial(a.leading().recip(), -a.low().unwrap()),
        }
    }

    /// Unit u such that u times each of `xs` has coprime integer
    /// coefficients and, over the Laurent ring, lowest exponent zero among
    /// them. None over Z or when all are zero.
    pub fn content_unit<'a>(&self, xs: impl IntoIterator<Item = &'a RingElement>) -> Option<RingElement> {
        if *self == Ring::Integers {
            return None;
        }
        let (mut num, mut den) = (BigInt::zero(), BigInt::one());
        let mut low: Option<i64> = None;
        for x in xs {
            for (k, c) in x.terms() {
                num = num.gcd(c.numer());
                den = den.lcm(c.denom());
                low = Some(low.map_or(k, |l| l.min(k)));
            }
        }
        let low = low?;
        let shift = if *self == Ring::Laurent { -low } else { 0 };
        Some(RingElement::monomial(Rat::new(den, num), shift))
    }

    pub fn canonical(&self, a: &RingElement) -> RingElement {
        &self.normalizing_unit(a) * a
    }

    pub fn inverse_unit(&self, u: &RingElement) -> Result<RingElement> {
        if !self.is_unit(u) {
            return Err(Error::NotUnit(u.to_string()));
        }
        let (k, c) = u.terms().next().unwrap();
        Ok(RingElement::monomial(c.recip(), -k))
    }

    pub fn gcd(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = self.divmod(&x, &y)?;
            x = y;
            y = self.canonical(&r);
        }
        Ok(self.canonical(&x))
    }

    /// (g, u, v) with u*a + v*b = g canonical.
    pub fn xgcd(&self, a: &RingElement, b: &RingElement) -> Result<(RingElement, RingElement, RingElement)> {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (RingElement::one(), RingElement::zero());
        let (mut t0, mut t1) = (RingElement::zero(), RingElement::one());
        while !r1.is_zero() {
            let (q, r) = self.divmod(&r0, &r1)?;
            let u = self.normalizing_unit(&r);
            r0 = std::mem::replace(&mut r1, &u * &r);
            let s = &u * &(&s0 - &(&q * &s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = &u * &(&t0 - &(&q * &t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        let u = self.normalizing_unit(&r0);
        Ok((&u * &r0, &u * &s0, &u * &t0))
    }

    pub fn lcm(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        if a.is_zero() || b.is_zero() {
            return Ok(RingElement::zero());
        }
        let g = self.gcd(a, b)?;
        Ok(self.canonical(&(&self.div_exact(a, &g)? * b)))
    }
}

/// Free-function form of [`Ring::divmod`].
pub fn euclidean_divmod(ring: Ring, a: &RingElement, b: &RingElement) -> Result<(RingElement, RingElement)> {
    ring.divmod(a, b)
}

// ---------------------------------------------------------------------------
// Fractions

/// Element of S^-1 R with S = R \ {0}, kept in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Fraction {
    ring: Ring,
    num: RingElement,
    den: RingElement,
}

impl Fraction {
    pub fn new(ring: Ring, num: RingElement, den: RingElement) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if ring == Ring::Integers && !(Ring::Integers.contains(&num) && Ring::Integers.contains(&den)) {
            return Err(Error::NotInRing(format!("{num} / {den}"), "Z"));
        }
        if ring == Ring::Rationals && !(num.is_constant() && den.is_constant()) {
            return Err(Error::NotInRing(format!("{num} / {den}"), "Q"));
        }
        Ok(Self::canonicalize(ring, num, den))
    }

    pub fn from_ring(ring: Ring, a: RingElement) -> Self {
        Fraction { ring, num: a, den: RingElement::one() }
    }

    fn canonicalize(ring: Ring, num: RingElement, den: RingElement) -> Self {
        if num.is_zero() {
            return Fraction { ring, num, den: RingElement::one() };
        }
        match ring {
            Ring::Rationals => Fraction {
                ring,
                num: RingElement::constant(num.constant_term() / den.constant_term()),
                den: RingElement::one(),
            },
            _ => {
                let g = ring.gcd(&num, &den).expect("Euclidean ring");
                let n = ring.div_exact(&num, &g).expect("gcd divides");
                let d = ring.div_exact(&den, &g).expect("gcd divides");
                let u = ring.normalizing_unit(&d);
                Fraction { ring, num: &u * &n, den: &u * &d }
            }
        }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }
    pub fn num(&self) -> &RingElement {
        &self.num
    }
    pub fn den(&self) -> &RingElement {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Whether the fraction lies in R.
    pub fn in_ring(&self) -> bool {
        self.ring.is_unit(&self.den)
    }

    pub fn add(&self, o: &Fraction) -> Fraction {
        Self::canonicalize(self.ring, &(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }

    pub fn neg(&self) -> Fraction {
        Fraction { ring: self.ring, num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, o: &Fraction) -> Fraction {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Fraction) -> Fraction {
        Self::canonicalize(self.ring, &self.num * &o.num, &self.den * &o.den)
    }

    pub fn mul_ring(&self, a: &RingElement) -> Fraction {
        Self::canonicalize(self.ring, &self.num * a, self.den.clone())
    }

    pub fn conj(&self) -> Fraction {
        Self::canonicalize(self.ring, self.num.involution(), self.den.involution())
    }

    /// Cross-multiplication equality test.
    pub fn cross_equal(&self, o: &Fraction) -> bool {
        &self.num * &o.den == &o.num * &self.den
    }

    pub fn parse(ring: Ring, s: &str) -> Result<Self> {
        let s = s.trim();
        match split_fraction(s) {
            Some((n, d)) => Fraction::new(ring, RingElement::parse(n)?, RingElement::parse(d)?),
            None => {
                let a = RingElement::parse(s)?;
                if ring == Ring::Integers && a.is_constant() && !a.constant_term().is_integer() {
                    let c = a.constant_term();
                    return Fraction::new(
                        ring,
                        RingElement::constant(Rat::from_integer(c.numer().clone())),
                        RingElement::constant(Rat::from_integer(c.denom().clone())),
                    );
                }
                Fraction::new(ring, a, RingElement::one())
            }
        }
    }
}

/// Split `(num)/(den)` at the top-level slash between parenthesised groups.
fn split_fraction(s: &str) -> Option<(&str, &str)> {
    let s = s.trim();
    if !s.starts_with('(') {
        // plain `a/b` with polynomial denominator in parentheses
        if let Some(i) = s.find("/(") {
            let d = &s[i + 1..];
            return Some((&s[..i], d.strip_prefix('(')?.strip_suffix(')')?));
        }
        return None;
    }
    let mut depth = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    let num = &s[1..i];
                    let rest = s[i + 1..].trim_start();
                    let rest = rest.strip_prefix('/')?.trim();
                    let den = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(rest);
                    return Some((num, den));
                }
            }
            _ => {}
        }
    }
    None
}

fn needs_parens(a: &RingElement) -> bool {
    a.terms().count() > 1 || a.terms().any(|(k, _)| k != 0)
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if !needs_parens(&self.num) && !needs_parens(&self.den) && self.num.constant_term().is_integer() {
            return write!(f, "{}/{}", self.num, self.den);
        }
        let n = if needs_parens(&self.num) { format!("({})", self.num) } else { self.num.to_string() };
        let d = if needs_parens(&self.den) { format!("({})", self.den) } else { self.den.to_string() };
        write!(f, "{n}/{d}")
    }
}

impl fmt::Debug for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Add, multiply or conjugate fractions.
pub enum FractionOp<'a> {
    Add(&'a Fraction, &'a Fraction),
    Mul(&'a Fraction, &'a Fraction),
    Conj(&'a Fraction),
}

pub fn fraction_arith(op: FractionOp<'_>) -> Fraction {
    match op {
        FractionOp::Add(a, b) => a.add(b),
        FractionOp::Mul(a, b) => a.mul(b),
        FractionOp::Conj(a) => a.conj(),
    }
}

// ---------------------------------------------------------------------------
// S^-1 R / R

/// Class of a fraction modulo R. The stored representative has its numerator
/// reduced modulo the canonical denominator, so equality is class equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TorsionValue {
    rep: Fraction,
}

/// t^-1 modulo a polynomial d with d(0) != 0.
fn t_inverse_mod(d: &RingElement) -> RingElement {
    let d0 = d.constant_term();
    let tail = &(d - &RingElement::constant(d0.clone())).shift(-1);
    tail.scale(&(-d0.recip()))
}

fn reduce_mod(ring: Ring, num: &RingElement, den: &RingElement) -> RingElement {
    match ring {
        Ring::Rationals => RingElement::zero(),
        Ring::Integers => ring.divmod(num, den).expect("nonzero").1,
        Ring::Laurent => {
            if num.is_zero() {
                return RingElement::zero();
            }
            let low = num.low().unwrap();
            let body = num.shift(-low.min(0));
            let (_, mut r) = poly_divmod(&body, den);
            if low < 0 {
                let tinv = t_inverse_mod(den);
                for _ in 0..(-low) {
                    r = poly_divmod(&(&r * &tinv), den).1;
                }
            }
            r
        }
    }
}

impl TorsionValue {
    pub fn zero(ring: Ring) -> Self {
        TorsionValue { rep: Fraction::from_ring(ring, RingElement::zero()) }
    }

    pub fn ring(&self) -> Ring {
        self.rep.ring
    }

    pub fn fraction(&self) -> &Fraction {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }

    pub fn add(&self, o: &TorsionValue) -> TorsionValue {
        mod_ring(&self.rep.add(&o.rep))
    }

    pub fn neg(&self) -> TorsionValue {
        mod_ring(&self.rep.neg())
    }

    pub fn sub(&self, o: &TorsionValue) -> TorsionValue {
        self.add(&o.neg())
    }

    pub fn mul_ring(&self, a: &RingElement) -> TorsionValue {
        mod_ring(&self.rep.mul_ring(a))
    }

    pub fn conj(&self) -> TorsionValue {
        mod_ring(&self.rep.conj())
    }

    /// Equality via the cross-difference lying in R.
    pub fn class_eq(&self, o: &TorsionValue) -> bool {
        self.rep.sub(&o.rep).in_ring()
    }

    pub fn parse(ring: Ring, s: &str) -> Result<Self> {
        Ok(mod_ring(&Fraction::parse(ring, s)?))
    }
}

/// Canonical class of f in S^-1 R / R.
pub fn mod_ring(f: &Fraction) -> TorsionValue {
    let ring = f.ring;
    if f.in_ring() {
        return TorsionValue::zero(ring);
    }
    let r = reduce_mod(ring, &f.num, &f.den);
    TorsionValue { rep: Fraction::canonicalize(ring, r, f.den.clone()) }
}

impl fmt::Display for TorsionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

impl fmt::Debug for TorsionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.rep)
    }
}

/// Small integer view, used when printing invariant factors over Z.
pub fn as_i64(a: &RingElement) -> Option<i64> {
    if a.is_constant() && a.constant_term().is_integer() {
        a.constant_term().to_integer().to_i64()
    } else {
        None
    }
}
