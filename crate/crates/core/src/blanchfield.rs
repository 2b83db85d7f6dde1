//! The chain-level twisted Blanchfield pairing of a symmetric triad over one
//! of the shipped rings, with its well-definedness, sesquilinearity,
//! hermitian and nonsingularity checks.
//!
//! Cochains are columns w with w_i = conj(f(e_i)). After a change of
//! coefficients they are functionals on V (x) C: the Theta identification
//! was composed into the structure maps by the tensoring step, so a cochain
//! z is evaluated on a chain u directly as sum_i conj(z_i) u_i.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain_complex::{family_get, family_is_zero, hom_boundary, sign, transpose_t, ChainHomotopy, ChainMap, Complex, Family};
use crate::error::{Error, Result};
use crate::homology_engine::{
    cohomology, homology, is_null_homotopic, is_quasi_iso, smith_normal_form, solve_family_boundary, solve_linear,
    solve_with,
    torsion_part, ModulePresentation, NullHomotopy, SmithForm, SolveOutcome,
};
use crate::matrix::Matrix;
use crate::ring_core::{mod_ring, Fraction, Ring, RingElement, TorsionValue};
use crate::symmetric_structure::{
    at, check_triad, get_map, relative_duality, triad_quotients, SymmetricTriad, TriadQuotients,
};

type M = Matrix<RingElement>;
type V = Vec<RingElement>;

/// Which pair of modules the pairing is evaluated on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// TH^2(C/B) x TH^2(C/A).
    Cohomology,
    /// TH_1(C/A) x TH_1(C/B), through the inverse of the duality maps.
    Homology,
}

/// Pairing values on generators of the two torsion modules.
///
/// Entry (i, j) is Bl(left_i, right_j); it is linear in the left slot and
/// conjugate linear in the right one.
#[derive(Clone, Debug, PartialEq)]
pub struct PairingMatrix {
    pub side: Side,
    pub ring: Ring,
    pub left: Vec<V>,
    pub left_annihilators: V,
    pub right: Vec<V>,
    pub right_annihilators: V,
    /// The cocycles actually paired: the generators themselves on the
    /// cohomology side, their preimages under duality on the homology side.
    pub left_cochains: Vec<V>,
    pub right_cochains: Vec<V>,
    pub entries: Vec<Vec<TorsionValue>>,
}

impl PairingMatrix {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty() || self.right.is_empty()
    }

    pub fn size(&self) -> (usize, usize) {
        (self.left.len(), self.right.len())
    }

    /// Entrywise class equality.
    pub fn values_eq(&self, o: &PairingMatrix) -> bool {
        self.size() == o.size()
            && self.entries.iter().zip(&o.entries).all(|(a, b)| a.iter().zip(b).all(|(x, y)| x.class_eq(y)))
    }
}

/// Outcome of a randomized or exhaustive identity check.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub passed: bool,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl CheckReport {
    fn new() -> Self {
        CheckReport { passed: true, ..Default::default() }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.passed = false;
            self.failures.push(what());
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotChecked,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonsingularReport {
    pub verdict: Verdict,
    /// How the Ext^1 hypothesis was discharged.
    pub hypothesis: String,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HermitianReport {
    pub passed: bool,
    /// "supplied", "discovered" or "adapted".
    pub homotopy: String,
    /// Degrees where Psi - T Psi - d H is nonzero, with the entry count.
    pub residual: Vec<(i64, usize)>,
    /// Whether that residual is exactly the boundary correction Gamma.
    pub correction_matches: bool,
    /// Whether Gamma = d N was solved, so that H + N is an exact homotopy.
    pub completed: bool,
    /// Generator pairs (i, j) with Bl(x_i, x_j) != conj(Bl(x_j, x_i)).
    pub asymmetric: Vec<(usize, usize)>,
    /// Pairs where evaluating with Phi_0^* gives a different value.
    pub transpose_mismatch: Vec<(usize, usize)>,
    pub checked_pairs: usize,
}

/// The families entering the hermitian homotopy; see
/// [`Blanchfield::hermitian_families`].
#[derive(Clone, Debug)]
pub struct HermitianFamilies {
    pub psi: Family<RingElement>,
    pub h: Family<RingElement>,
    pub gamma: Family<RingElement>,
    /// "supplied", "discovered" or "adapted".
    pub homotopy: &'static str,
}

/// Precomputed data for evaluating the pairing of one triad.
#[derive(Clone, Debug)]
pub struct Blanchfield {
    pub triad: SymmetricTriad<RingElement>,
    pub quotients: TriadQuotients,
    /// q_B Phi_0 q_A^*: (C/A)^{m-*} -> C/B.
    pub duality: ChainMap<RingElement>,
    /// q_A Phi_0 q_B^*: (C/B)^{m-*} -> C/A.
    pub reverse_duality: ChainMap<RingElement>,
    ring: Ring,
    /// Cohomological degree of the paired classes.
    k: i64,
    cohom_b: ModulePresentation,
    cohom_a: ModulePresentation,
    cob_b: SmithForm,
    cob_a: SmithForm,
}

fn dot_conj(z: &[RingElement], u: &[RingElement]) -> RingElement {
    let mut acc = RingElement::zero();
    for (a, b) in z.iter().zip(u) {
        acc += &(a * &b.involution());
    }
    acc
}

fn scale_vec(a: &RingElement, v: &[RingElement]) -> V {
    v.iter().map(|x| a * x).collect()
}

fn add_vec(a: &[RingElement], b: &[RingElement]) -> V {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn combine(coeffs: &[RingElement], gens: &[V], len: usize) -> V {
    let mut out = vec![RingElement::zero(); len];
    for (c, g) in coeffs.iter().zip(gens) {
        out = add_vec(&out, &scale_vec(c, g));
    }
    out
}

/// A small random element of the ring, nonzero when asked.
pub fn random_element(ring: Ring, rng: &mut impl Rng, nonzero: bool) -> RingElement {
    loop {
        let x = match ring {
            Ring::Integers | Ring::Rationals => RingElement::int(rng.gen_range(-5..=5)),
            Ring::Laurent => {
                let terms = rng.gen_range(1..=3);
                let mut acc = RingElement::zero();
                for _ in 0..terms {
                    let c = rng.gen_range(-3..=3);
                    acc += &RingElement::monomial(crate::ring_core::rat(c), rng.gen_range(-2..=2));
                }
                acc
            }
        };
        if !nonzero || !x.is_zero() {
            return x;
        }
    }
}

/// Columns spanning the kernel of the matrix with Smith form `snf`.
fn kernel_basis(snf: &SmithForm) -> Vec<V> {
    (snf.rank..snf.v_inv.cols()).map(|j| snf.v_inv.col(j)).collect()
}

impl Blanchfield {
    /// Validate the triad and precompute quotients, duality maps and the
    /// cohomology presentations.
    pub fn new(t: &SymmetricTriad<RingElement>) -> Result<Self> {
        let rep = check_triad(t)?;
        if !rep.passed {
            return Err(Error::Invalid(format!(
                "triad fails its structure checks: {:?} {:?}",
                rep.errors, rep.failures
            )));
        }
        Self::unchecked(t)
    }

    /// Like [`Blanchfield::new`] but without the structure checks; only the
    /// duality maps are required to be chain maps. Used to probe corrupted
    /// structures.
    pub fn unchecked(t: &SymmetricTriad<RingElement>) -> Result<Self> {
        let ring = t.c.ring;
        let quotients = triad_quotients(t)?;
        let duality = relative_duality(t, &quotients);
        let reverse_duality = reverse_duality(t, &quotients);
        for (name, f) in [("q_B Phi_0 q_A^*", &duality), ("q_A Phi_0 q_B^*", &reverse_duality)] {
            if !f.is_chain_map() {
                return Err(Error::Invalid(format!("{name} is not a chain map in degrees {:?}", f.failures())));
            }
        }
        let k = t.dim - 1;
        let (qa, qb) = (&quotients.c_mod_a.complex, &quotients.c_mod_b.complex);
        let cohom_b = cohomology(qb, k)?;
        let cohom_a = cohomology(qa, k)?;
        let cob_b = smith_normal_form(ring, &qb.coboundary(k))?;
        let cob_a = smith_normal_form(ring, &qa.coboundary(k))?;
        Ok(Blanchfield {
            triad: t.clone(),
            quotients,
            duality,
            reverse_duality,
            ring,
            k,
            cohom_b,
            cohom_a,
            cob_b,
            cob_a,
        })
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    /// Degree of the paired cohomology classes.
    pub fn degree(&self) -> i64 {
        self.k
    }

    pub fn c_mod_a(&self) -> &Complex<RingElement> {
        &self.quotients.c_mod_a.complex
    }

    pub fn c_mod_b(&self) -> &Complex<RingElement> {
        &self.quotients.c_mod_b.complex
    }

    /// TH^k(C/B) with generator cocycles and annihilators.
    pub fn torsion_b(&self) -> ModulePresentation {
        torsion_part(&self.cohom_b)
    }

    /// TH^k(C/A) with generator cocycles and annihilators.
    pub fn torsion_a(&self) -> ModulePresentation {
        torsion_part(&self.cohom_a)
    }

    fn check_cocycle(&self, c: &Complex<RingElement>, x: &[RingElement], what: &str) -> Result<()> {
        if x.len() != c.rank(self.k) {
            return Err(Error::Shape(format!("{what} has length {}, expected {}", x.len(), c.rank(self.k))));
        }
        if c.coboundary(self.k + 1).mul_vec(x).iter().any(|e| !e.is_zero()) {
            return Err(Error::Invalid(format!("{what} is not a cocycle")));
        }
        Ok(())
    }

    /// The invariant factor annihilating the class of a cocycle: the lcm of
    /// the annihilators of its nonzero coordinates.
    fn annihilator_in(&self, p: &ModulePresentation, y: &[RingElement]) -> Result<RingElement> {
        let coords = p.coords_of(y)?;
        let mut s = RingElement::one();
        for (c, a) in coords.iter().zip(&p.annihilators) {
            if c.is_zero() {
                continue;
            }
            if a.is_zero() {
                return Err(Error::Invalid("the class is not torsion".into()));
            }
            s = self.ring.lcm(&s, a)?;
        }
        Ok(self.ring.canonical(&s))
    }

    pub fn annihilator_b(&self, y: &[RingElement]) -> Result<RingElement> {
        self.annihilator_in(&self.cohom_b, y)
    }

    pub fn annihilator_a(&self, x: &[RingElement]) -> Result<RingElement> {
        self.annihilator_in(&self.cohom_a, x)
    }

    /// Some z in (C/B)^{k-1} with coboundary s y.
    pub fn solve_b(&self, s: &RingElement, y: &[RingElement]) -> Result<V> {
        match solve_with(&self.cob_b, &scale_vec(s, y))? {
            SolveOutcome::Solved(z) => Ok(z),
            SolveOutcome::Obstructed(_) => Err(Error::NoSolution(format!("{s} y is not a coboundary"))),
        }
    }

    /// (1/s) conj(z(Phi_0(x))) for a supplied choice of (s, z), verified to
    /// satisfy the coboundary equation.
    pub fn value_with(&self, y: &[RingElement], x: &[RingElement], s: &RingElement, z: &[RingElement]) -> Result<TorsionValue> {
        let qb = self.c_mod_b();
        let lhs = qb.coboundary(self.k).mul_vec(z);
        if lhs != scale_vec(s, y) {
            return Err(Error::Invalid("the chosen z does not bound s y".into()));
        }
        let u = self.duality.get(self.triad.dim - self.k).mul_vec(x);
        let f = Fraction::new(self.ring, dot_conj(z, &u), s.clone())?;
        Ok(mod_ring(&f))
    }

    /// Bl~([y], [x]) for cocycles y in (C/B)^k and x in (C/A)^k.
    pub fn pairing_value(&self, y: &[RingElement], x: &[RingElement]) -> Result<TorsionValue> {
        self.check_cocycle(self.c_mod_b(), y, "y")?;
        self.check_cocycle(self.c_mod_a(), x, "x")?;
        let s = self.annihilator_b(y)?;
        let z = self.solve_b(&s, y)?;
        self.value_with(y, x, &s, &z)
    }

    /// A cocycle of (C/B)^k whose image under q_A Phi_0 q_B^* is homologous
    /// to the cycle u of C/A.
    pub fn lift_a(&self, u: &[RingElement]) -> Result<V> {
        lift_through(&self.reverse_duality, self.c_mod_b(), self.c_mod_a(), self.triad.dim - self.k, self.k, u)
    }

    /// A cocycle of (C/A)^k whose image under q_B Phi_0 q_A^* is homologous
    /// to the cycle v of C/B.
    pub fn lift_b(&self, v: &[RingElement]) -> Result<V> {
        lift_through(&self.duality, self.c_mod_a(), self.c_mod_b(), self.triad.dim - self.k, self.k, v)
    }

    /// Bl([u], [v]) = Bl~([Phi_0]^-1 u, [Phi_0]^-1 v) for cycles u of C/A
    /// and v of C/B.
    pub fn homology_value(&self, u: &[RingElement], v: &[RingElement]) -> Result<TorsionValue> {
        let y = self.lift_a(u)?;
        let x = self.lift_b(v)?;
        self.pairing_value(&y, &x)
    }

    /// The pairing on generators of the torsion modules.
    pub fn pairing_matrix(&self, side: Side) -> Result<PairingMatrix> {
        let (left, left_ann, right, right_ann, left_co, right_co) = match side {
            Side::Cohomology => {
                let (tb, ta) = (self.torsion_b(), self.torsion_a());
                (tb.generators.clone(), tb.annihilators, ta.generators.clone(), ta.annihilators, tb.generators, ta.generators)
            }
            Side::Homology => {
                let d = self.triad.dim - self.k;
                let ha = torsion_part(&homology(self.c_mod_a(), d)?);
                let hb = torsion_part(&homology(self.c_mod_b(), d)?);
                if !ha.generators.is_empty() || !hb.generators.is_empty() {
                    let rep = crate::symmetric_structure::is_poincare(&self.triad)?;
                    if !rep.passed {
                        return Err(Error::PoincareRequired("the homology pairing needs a Poincaré triad".into()));
                    }
                }
                let lc = ha.generators.iter().map(|u| self.lift_a(u)).collect::<Result<Vec<_>>>()?;
                let rc = hb.generators.iter().map(|v| self.lift_b(v)).collect::<Result<Vec<_>>>()?;
                (ha.generators, ha.annihilators, hb.generators, hb.annihilators, lc, rc)
            }
        };
        let entries = left_co
            .iter()
            .map(|y| right_co.iter().map(|x| self.pairing_value(y, x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(PairingMatrix {
            side,
            ring: self.ring,
            left,
            left_annihilators: left_ann,
            right,
            right_annihilators: right_ann,
            left_cochains: left_co,
            right_cochains: right_co,
            entries,
        })
    }

    fn random_class(&self, p: &ModulePresentation, rng: &mut ChaCha8Rng) -> V {
        let coeffs: V = p.generators.iter().map(|_| random_element(self.ring, rng, false)).collect();
        combine(&coeffs, &p.generators, p.ambient_rank)
    }

    /// Invariance under x -> x + d*u, y -> y + d*v and under other choices
    /// (s', z') with d*z' = s' y, on random torsion classes.
    pub fn check_well_defined(&self, trials: usize, seed: u64) -> Result<CheckReport> {
        let mut rep = CheckReport::new();
        let (tb, ta) = (self.torsion_b(), self.torsion_a());
        if tb.generators.is_empty() || ta.generators.is_empty() {
            return Ok(rep);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (qa, qb) = (self.c_mod_a(), self.c_mod_b());
        let kernel = kernel_basis(&self.cob_b);
        for trial in 0..trials {
            let y = self.random_class(&tb, &mut rng);
            let x = self.random_class(&ta, &mut rng);
            let base = self.pairing_value(&y, &x)?;
            let u: V = (0..qa.rank(self.k - 1)).map(|_| random_element(self.ring, &mut rng, false)).collect();
            let v: V = (0..qb.rank(self.k - 1)).map(|_| random_element(self.ring, &mut rng, false)).collect();
            let x2 = add_vec(&x, &qa.coboundary(self.k).mul_vec(&u));
            let y2 = add_vec(&y, &qb.coboundary(self.k).mul_vec(&v));
            let moved = self.pairing_value(&y2, &x2)?;
            rep.expect(moved.class_eq(&base), || format!("trial {trial}: representatives changed {base} to {moved}"));
            let s = self.annihilator_b(&y)?;
            let z = self.solve_b(&s, &y)?;
            let r = random_element(self.ring, &mut rng, true);
            let mut z2 = scale_vec(&r, &z);
            for kv in &kernel {
                z2 = add_vec(&z2, &scale_vec(&random_element(self.ring, &mut rng, false), kv));
            }
            let other = self.value_with(&y, &x, &(&r * &s), &z2)?;
            rep.expect(other.class_eq(&base), || format!("trial {trial}: another (s, z) changed {base} to {other}"));
        }
        Ok(rep)
    }

    /// Bl(q y, p x) = q Bl(y, x) conj(p) and additivity in each slot on
    /// random classes and random p, q.
    pub fn check_sesquilinear(&self, trials: usize, seed: u64) -> Result<CheckReport> {
        let mut rep = CheckReport::new();
        let (tb, ta) = (self.torsion_b(), self.torsion_a());
        if tb.generators.is_empty() || ta.generators.is_empty() {
            return Ok(rep);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for trial in 0..trials {
            let (y, y2) = (self.random_class(&tb, &mut rng), self.random_class(&tb, &mut rng));
            let (x, x2) = (self.random_class(&ta, &mut rng), self.random_class(&ta, &mut rng));
            let p = random_element(self.ring, &mut rng, false);
            let q = random_element(self.ring, &mut rng, false);
            let base = self.pairing_value(&y, &x)?;
            let lhs = self.pairing_value(&scale_vec(&q, &y), &scale_vec(&p, &x))?;
            let rhs = base.mul_ring(&q).mul_ring(&p.involution());
            rep.expect(lhs.class_eq(&rhs), || format!("trial {trial}: q = {q}, p = {p}: {lhs} vs {rhs}"));
            let left = self.pairing_value(&add_vec(&y, &y2), &x)?;
            let left_sum = base.add(&self.pairing_value(&y2, &x)?);
            rep.expect(left.class_eq(&left_sum), || format!("trial {trial}: not additive in the first slot"));
            let right = self.pairing_value(&y, &add_vec(&x, &x2))?;
            let right_sum = base.add(&self.pairing_value(&y, &x2)?);
            rep.expect(right.class_eq(&right_sum), || format!("trial {trial}: not additive in the second slot"));
        }
        Ok(rep)
    }

    /// The adjoint TH^k(C/A) -> Hom(TH^k(C/B), S^-1 R/R) is an isomorphism.
    ///
    /// Hom(R/(s), S^-1 R/R) is cyclic on the character 1 -> 1/s, so the
    /// adjoint is the matrix c_ij = s_i Bl(y_i, x_j) read modulo s_i; after
    /// conjugating the target it is R-linear, and it is an isomorphism iff it
    /// is onto and both modules have the same invariant factors.
    pub fn check_nonsingular(&self) -> Result<NonsingularReport> {
        let hypothesis = match self.ring {
            Ring::Integers => "Ext^1 vanishes: Q/Z is divisible over the PID Z".to_string(),
            Ring::Rationals => "S^-1 R/R = 0 over Q".to_string(),
            Ring::Laurent => "Ext^1 vanishes: Q(t)/Q[t, t^-1] is divisible over the PID Q[t, t^-1]".to_string(),
        };
        let pm = self.pairing_matrix(Side::Cohomology)?;
        let mut failures = Vec::new();
        let (n, n2) = pm.size();
        let ring = self.ring;
        let conj_ann: V = pm.left_annihilators.iter().map(|s| ring.canonical(&s.involution())).collect();
        let mut adj = Matrix::zeros(n, n2 + n);
        for i in 0..n {
            let s = &pm.left_annihilators[i];
            for j in 0..n2 {
                let f = pm.entries[i][j].fraction();
                let c = ring.div_exact(&(s * f.num()), f.den())?;
                adj.set(i, j, c.involution());
            }
            adj.set(i, n2 + i, conj_ann[i].clone());
        }
        if n > 0 {
            let snf = smith_normal_form(ring, &adj)?;
            if snf.rank < n || snf.diagonal().iter().any(|d| !ring.is_unit(d)) {
                failures.push("the adjoint is not onto".to_string());
            }
        }
        let factors = |list: &V| -> Result<V> {
            if list.is_empty() {
                return Ok(Vec::new());
            }
            let d = Matrix::from_fn(list.len(), list.len(), |i, j| if i == j { list[i].clone() } else { RingElement::zero() });
            let snf = smith_normal_form(ring, &d)?;
            Ok(snf.diagonal().iter().filter(|x| !ring.is_unit(x)).map(|x| ring.canonical(x)).collect())
        };
        let (fa, fb) = (factors(&pm.right_annihilators)?, factors(&conj_ann)?);
        if fa != fb {
            failures.push(format!("invariant factors differ: {fa:?} vs {fb:?}"));
        }
        let verdict = if failures.is_empty() { Verdict::Pass } else { Verdict::Fail };
        Ok(NonsingularReport { verdict, hypothesis, failures })
    }

    /// sigma: C/B -> C/A as a chain map, checked to be a chain equivalence.
    fn sigma_map(&self) -> Result<ChainMap<RingElement>> {
        let sg = self
            .triad
            .sigma
            .as_ref()
            .ok_or_else(|| Error::Invalid("the triad carries no sigma".into()))?;
        let (qa, qb) = (self.c_mod_a(), self.c_mod_b());
        let maps = qb.degrees().map(|r| (r, get_map(&sg.map, r, qa.rank(r), qb.rank(r)))).collect();
        let f = ChainMap { source: qb.clone(), target: qa.clone(), maps };
        if !f.is_chain_map() {
            return Err(Error::Invalid(format!("sigma is not a chain map in degrees {:?}", f.failures())));
        }
        if !is_quasi_iso(&f)?.passed {
            return Err(Error::Invalid("sigma is not a chain equivalence".into()));
        }
        Ok(f)
    }

    /// The homotopy k: sigma q_B ~ q_A, from the triad if it is a valid
    /// witness and otherwise found by an exact solve.
    fn sigma_homotopy(&self, sigma: &ChainMap<RingElement>) -> Result<(ChainHomotopy<RingElement>, &'static str)> {
        let c = &self.triad.c;
        let qa = self.quotients.c_mod_a.projection(c);
        let qb = self.quotients.c_mod_b.projection(c);
        let f = sigma.compose(&qb).sub(&qa);
        if let Some(Some(k)) = self.triad.sigma.as_ref().map(|s| s.homotopy.clone()) {
            let h = ChainHomotopy { maps: k };
            if h.witnesses(&f) {
                return Ok((h, "supplied"));
            }
        }
        match is_null_homotopic(&f)? {
            NullHomotopy::Found(h) => Ok((h, "discovered")),
            NullHomotopy::Obstructed(r) => Err(Error::NoSolution(format!("sigma q_B is not homotopic to q_A (degree {r})"))),
        }
    }

    /// Gamma(k)_r = k (dX)_{r-1} q_A^* + (-1)^{r+1} q_A (dX)_r k^* for X = T Phi_0.
    fn gamma(&self, k: &ChainHomotopy<RingElement>, dx: &Family<RingElement>) -> Family<RingElement> {
        let (m, c, qa) = (self.triad.dim, &self.triad.c, self.c_mod_a());
        let q_a = |r: i64| self.quotients.c_mod_a.q_at(r, c);
        let kk = |r: i64| k.get(r, c, qa);
        let mut out = Family::new();
        for r in qa.degrees() {
            if qa.rank(r) > 0 && qa.rank(m - r) > 0 {
                let g1 = kk(r - 1).mul(&family_get(dx, c, m - 1, r - 1)).mul(&q_a(m - r).conj_transpose());
                let g2 = q_a(r).mul(&family_get(dx, c, m - 1, r)).mul(&kk(m - 1 - r).conj_transpose());
                out.insert(r, g1.add(&g2.signed(sign(r + 1))));
            }
        }
        out
    }

    /// A witness k of sigma q_B ~ q_A with Gamma(k) = 0, by one exact solve
    /// of both linear conditions together.
    fn adapted_homotopy(&self, f: &ChainMap<RingElement>, dx: &Family<RingElement>) -> Result<Option<ChainHomotopy<RingElement>>> {
        let (c, qa) = (&self.triad.c, self.c_mod_a());
        let degrees: Vec<i64> = (c.lo() - 1..=c.hi()).filter(|&r| qa.rank(r + 1) * c.rank(r) > 0).collect();
        let mut unknowns = Vec::new();
        for &r in &degrees {
            for i in 0..qa.rank(r + 1) {
                for j in 0..c.rank(r) {
                    unknowns.push((r, i, j));
                }
            }
        }
        let flatten = |k: &ChainHomotopy<RingElement>| -> V {
            let mut v = Vec::new();
            for r in f.degree_span() {
                let lhs = qa.boundary(r + 1).mul(&k.get(r, c, qa)).add(&k.get(r - 1, c, qa).mul(&c.boundary(r)));
                v.extend(lhs.entries().iter().cloned());
            }
            for x in self.gamma(k, dx).values() {
                v.extend(x.entries().iter().cloned());
            }
            v
        };
        let mut rhs: V = Vec::new();
        for r in f.degree_span() {
            rhs.extend(f.get(r).entries().iter().cloned());
        }
        let zero = flatten(&ChainHomotopy { maps: BTreeMap::new() });
        rhs.extend(std::iter::repeat_n(RingElement::zero(), zero.len() - rhs.len()));
        if unknowns.is_empty() {
            return Ok(rhs.iter().all(|x| x.is_zero()).then(|| ChainHomotopy { maps: BTreeMap::new() }));
        }
        let mut a = Matrix::zeros(rhs.len(), unknowns.len());
        for (col, &(r, i, j)) in unknowns.iter().enumerate() {
            let mut e = Matrix::zeros(qa.rank(r + 1), c.rank(r));
            e.set(i, j, RingElement::one());
            let unit = ChainHomotopy { maps: [(r, e)].into_iter().collect() };
            for (row, x) in flatten(&unit).into_iter().enumerate() {
                if !x.is_zero() {
                    a.set(row, col, x);
                }
            }
        }
        Ok(solve_linear(c.ring, &a, &rhs)?.solution().map(|x| {
            let mut maps = BTreeMap::new();
            let mut it = x.into_iter();
            for &r in &degrees {
                let (nr, nc) = (qa.rank(r + 1), c.rank(r));
                let vals: V = it.by_ref().take(nr * nc).collect();
                maps.insert(r, Matrix::from_fn(nr, nc, |i, j| vals[i * nc + j].clone()));
            }
            ChainHomotopy { maps }
        }))
    }

    /// A witness of sigma q_B ~ q_A for which H = J - K + L is exact, if one
    /// exists.
    pub fn hermitian_witness(&self) -> Result<Option<ChainHomotopy<RingElement>>> {
        let sigma = self.sigma_map()?;
        let (k, _) = self.sigma_homotopy(&sigma)?;
        let (m, c) = (self.triad.dim, &self.triad.c);
        let dx = hom_boundary(&transpose_t(&at(&self.triad.big_phi, 0), c, m), c, m);
        if family_is_zero(&self.gamma(&k, &dx)) {
            return Ok(Some(k));
        }
        let f = sigma.compose(&self.quotients.c_mod_b.projection(c)).sub(&self.quotients.c_mod_a.projection(c));
        self.adapted_homotopy(&f, &dx)
    }

    /// Psi = sigma q_B Phi_0 q_A^*, H = J - K + L and the correction Gamma
    /// with Psi - T Psi = d H + Gamma, all as families on C/A. With X = T Phi_0:
    /// J_r = k X_{r-1} q_A^*, K_r = (-1)^r q_A X_r k^*, L = sigma q_B Phi_1 q_A^*.
    /// Gamma vanishes when Phi_0 is a chain map on C; otherwise k is replaced
    /// by a witness with Gamma(k) = 0 when one exists.
    pub fn hermitian_families(&self) -> Result<HermitianFamilies> {
        let sigma = self.sigma_map()?;
        let (mut k, mut source) = self.sigma_homotopy(&sigma)?;
        let t = &self.triad;
        let m = t.dim;
        let c = &t.c;
        let qa = self.c_mod_a();
        let q_a = |r: i64| self.quotients.c_mod_a.q_at(r, c);
        let q_b = |r: i64| self.quotients.c_mod_b.q_at(r, c);
        let phi0 = at(&t.big_phi, 0);
        let phi1 = at(&t.big_phi, 1);
        let x = transpose_t(&phi0, c, m);
        let dx = hom_boundary(&x, c, m);
        let mut gamma = self.gamma(&k, &dx);
        if !family_is_zero(&gamma) {
            let f = sigma.compose(&self.quotients.c_mod_b.projection(c)).sub(&self.quotients.c_mod_a.projection(c));
            if let Some(adapted) = self.adapted_homotopy(&f, &dx)? {
                k = adapted;
                source = "adapted";
                gamma = self.gamma(&k, &dx);
            }
        }
        let kk = |r: i64| k.get(r, c, qa);
        let mut out = HermitianFamilies { psi: Family::new(), h: Family::new(), gamma, homotopy: source };
        for r in qa.degrees() {
            if qa.rank(r) > 0 && qa.rank(m - r) > 0 {
                let cols = q_a(m - r).conj_transpose();
                out.psi.insert(r, sigma.get(r).mul(&q_b(r)).mul(&family_get(&phi0, c, m, r)).mul(&cols));
            }
            if qa.rank(r) > 0 && qa.rank(m + 1 - r) > 0 {
                let cols = q_a(m + 1 - r).conj_transpose();
                let j = kk(r - 1).mul(&family_get(&x, c, m, r - 1)).mul(&cols);
                let kpart = q_a(r).mul(&family_get(&x, c, m, r)).mul(&kk(m - r).conj_transpose());
                let l = sigma.get(r).mul(&q_b(r)).mul(&family_get(&phi1, c, m + 1, r)).mul(&cols);
                out.h.insert(r, j.sub(&kpart.signed(sign(r))).add(&l));
            }
        }
        Ok(out)
    }

    /// Verify the hermitian homotopy equation exactly and the conjugate
    /// symmetry of the pairing on TH^k(C/A) identified through sigma.
    pub fn check_hermitian(&self) -> Result<HermitianReport> {
        let HermitianFamilies { psi, h, gamma, homotopy } = self.hermitian_families()?;
        let m = self.triad.dim;
        let qa = self.c_mod_a();
        let t_psi = transpose_t(&psi, qa, m);
        let dh = hom_boundary(&h, qa, m + 1);
        let mut residual = Vec::new();
        let mut correction_matches = true;
        let mut rest = Family::new();
        for r in qa.degrees() {
            if qa.rank(r) == 0 || qa.rank(m - r) == 0 {
                continue;
            }
            let x = family_get(&psi, qa, m, r).sub(&family_get(&t_psi, qa, m, r)).sub(&family_get(&dh, qa, m, r));
            let nz = x.entries().iter().filter(|e| !e.is_zero()).count();
            if nz > 0 {
                residual.push((r, nz));
            }
            correction_matches &= x == family_get(&gamma, qa, m, r);
            rest.insert(r, x);
        }
        let completed = match solve_family_boundary(qa, m, &rest)? {
            Some(n) => {
                let full = hom_boundary(&n, qa, m + 1);
                rest.iter().all(|(r, x)| *x == family_get(&full, qa, m, *r))
            }
            None => false,
        };
        let ta = self.torsion_a();
        let d = m - self.k;
        let psi_d = family_get(&psi, qa, m, d);
        let t_psi_d = family_get(&t_psi, qa, m, d);
        let value = |xi: &V, xj: &V, map: &M| -> Result<TorsionValue> {
            let s = self.annihilator_a(xi)?;
            let z = match solve_with(&self.cob_a, &scale_vec(&s, xi))? {
                SolveOutcome::Solved(z) => z,
                SolveOutcome::Obstructed(_) => return Err(Error::NoSolution("s x is not a coboundary".into())),
            };
            Ok(mod_ring(&Fraction::new(self.ring, dot_conj(&z, &map.mul_vec(xj)), s)?))
        };
        let mut asymmetric = Vec::new();
        let mut transpose_mismatch = Vec::new();
        let mut checked_pairs = 0;
        for (i, xi) in ta.generators.iter().enumerate() {
            for (j, xj) in ta.generators.iter().enumerate() {
                checked_pairs += 1;
                let a = value(xi, xj, &psi_d)?;
                let b = value(xj, xi, &psi_d)?;
                if !a.class_eq(&b.conj()) {
                    asymmetric.push((i, j));
                }
                if !a.class_eq(&value(xi, xj, &t_psi_d)?) {
                    transpose_mismatch.push((i, j));
                }
            }
        }
        Ok(HermitianReport {
            passed: correction_matches && completed && asymmetric.is_empty() && transpose_mismatch.is_empty(),
            homotopy: homotopy.to_string(),
            residual,
            correction_matches,
            completed,
            asymmetric,
            transpose_mismatch,
            checked_pairs,
        })
    }
}

/// q_A Phi_0 q_B^* as a chain map (C/B)^{m-*} -> C/A.
fn reverse_duality(t: &SymmetricTriad<RingElement>, qs: &TriadQuotients) -> ChainMap<RingElement> {
    let swapped = TriadQuotients {
        c_mod_a: qs.c_mod_b.clone(),
        c_mod_b: qs.c_mod_a.clone(),
        b_mod_d: qs.b_mod_d.clone(),
        c_mod_ab: qs.c_mod_ab.clone(),
    };
    relative_duality(t, &swapped)
}

/// Solve f(x) + d w = u with x a cocycle of degree k of `src`, for the chain
/// map f: src^{m-*} -> target and a cycle u of degree r of target.
fn lift_through(
    f: &ChainMap<RingElement>,
    src: &Complex<RingElement>,
    target: &Complex<RingElement>,
    r: i64,
    k: i64,
    u: &[RingElement],
) -> Result<V> {
    let fr = f.get(r);
    let d = target.boundary(r + 1);
    let cob = src.coboundary(k + 1);
    let (nx, nw) = (src.rank(k), target.rank(r + 1));
    let (nu, nc) = (target.rank(r), src.rank(k + 1));
    let zero_w = Matrix::zeros(nc, nw);
    let a = Matrix::block(&[nu, nc], &[nx, nw], &[(0, 0, fr), (0, 1, d), (1, 0, cob), (1, 1, zero_w)]);
    let mut rhs = u.to_vec();
    rhs.extend(std::iter::repeat_n(RingElement::zero(), nc));
    match solve_linear(src.ring, &a, &rhs)? {
        SolveOutcome::Solved(sol) => Ok(sol[..nx].to_vec()),
        SolveOutcome::Obstructed(_) => Err(Error::NoSolution("the class is not in the image of the duality map".into())),
    }
}

/// Convenience wrapper: validate the triad and compute its pairing matrix.
pub fn pairing_matrix(t: &SymmetricTriad<RingElement>, side: Side) -> Result<PairingMatrix> {
    Blanchfield::new(t)?.pairing_matrix(side)
}

/// Convenience wrapper around [`Blanchfield::pairing_value`].
pub fn pairing_value(t: &SymmetricTriad<RingElement>, y: &[RingElement], x: &[RingElement]) -> Result<TorsionValue> {
    Blanchfield::new(t)?.pairing_value(y, x)
}
