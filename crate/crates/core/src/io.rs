//! JSON files for complexes, representations, triads, cobordisms and pairing
//! output.
//!
//! Every ring element is a string in the textual syntax of [`RingElement`]
//! (or of [`GroupRingElement`] over Z[pi]); matrices are row-major arrays of
//! rows. Matrices with no rows or no columns are omitted on output and read
//! back as zero blocks. Object keys are sorted, so output is byte-stable.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::blanchfield::PairingMatrix;
use crate::chain_complex::{Complex, Family};
use crate::error::{Error, Result};
use crate::group_ring::{GroupRelations, GroupRingElement, RepGenerator, Representation};
use crate::matrix::Matrix;
use crate::ring_core::{Ring, RingElement, RingOps};
use crate::symmetric_structure::{Cobordism, Sigma, SplitInjection, SymmetricTriad};

/// Ring tag used for complexes over an integral group ring.
pub const GROUP_RING_TAG: &str = "Z[pi]";

/// What the entries of a file live in.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficients {
    Ring(Ring),
    Group(Arc<GroupRelations>),
}

impl Coefficients {
    fn tag(&self) -> &'static str {
        match self {
            Coefficients::Ring(r) => r.tag(),
            Coefficients::Group(_) => GROUP_RING_TAG,
        }
    }

    fn base_ring(&self) -> Ring {
        match self {
            Coefficients::Ring(r) => *r,
            Coefficients::Group(_) => Ring::Integers,
        }
    }

    fn write(&self, obj: &mut Map<String, Value>) {
        obj.insert("ring".into(), json!(self.tag()));
        if let Coefficients::Group(rel) = self {
            obj.insert("group".into(), group_to_json(rel));
        }
    }

    fn read(obj: &Value) -> Result<Self> {
        let tag = str_field(obj, "ring")?;
        if tag == GROUP_RING_TAG {
            Ok(Coefficients::Group(group_from_json(field(obj, "group")?)?))
        } else {
            Ok(Coefficients::Ring(Ring::from_tag(tag)?))
        }
    }
}

/// Entry types that can be read back from their printed form.
pub trait Entry: RingOps + Display {
    fn read(coef: &Coefficients, s: &str) -> Result<Self>;
}

impl Entry for RingElement {
    fn read(coef: &Coefficients, s: &str) -> Result<Self> {
        let Coefficients::Ring(ring) = coef else {
            return Err(Error::Parse("expected a plain ring, found Z[pi]".into()));
        };
        let a = RingElement::parse(s)?;
        if !ring.contains(&a) {
            return Err(Error::NotInRing(s.to_string(), ring.tag()));
        }
        Ok(a)
    }
}

impl Entry for GroupRingElement {
    fn read(coef: &Coefficients, s: &str) -> Result<Self> {
        let Coefficients::Group(rel) = coef else {
            return Err(Error::Parse(format!("expected ring {GROUP_RING_TAG}")));
        };
        GroupRingElement::parse(rel, s)
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing field '{key}'")))
}

fn str_field<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    field(v, key)?.as_str().ok_or_else(|| Error::Parse(format!("field '{key}' must be a string")))
}

fn int_field(v: &Value, key: &str) -> Result<i64> {
    field(v, key)?.as_i64().ok_or_else(|| Error::Parse(format!("field '{key}' must be an integer")))
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::Parse(format!("{what} must be an object")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse(format!("{what} must be an array")))
}

fn degree_key(k: &str) -> Result<i64> {
    k.trim().parse().map_err(|_| Error::Parse(format!("'{k}' is not a degree")))
}

pub fn group_to_json(rel: &GroupRelations) -> Value {
    json!({ "generators": rel.generators, "orders": rel.orders, "abelian": rel.abelian })
}

pub fn group_from_json(v: &Value) -> Result<Arc<GroupRelations>> {
    let generators = array(field(v, "generators")?, "generators")?
        .iter()
        .map(|g| g.as_str().map(str::to_string).ok_or_else(|| Error::Parse("generator names must be strings".into())))
        .collect::<Result<Vec<_>>>()?;
    let orders = match v.get("orders") {
        None => vec![0; generators.len()],
        Some(o) => array(o, "orders")?
            .iter()
            .map(|x| x.as_u64().and_then(|n| u32::try_from(n).ok()).ok_or_else(|| Error::Parse("orders must be naturals".into())))
            .collect::<Result<Vec<_>>>()?,
    };
    if orders.len() != generators.len() {
        return Err(Error::Parse("one order per generator is required".into()));
    }
    let abelian = v.get("abelian").and_then(Value::as_bool).unwrap_or(generators.len() == 1);
    Ok(Arc::new(GroupRelations { generators, orders, abelian }))
}

pub fn matrix_to_json<E: RingOps + Display>(m: &Matrix<E>) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(|x| json!(x.to_string())).collect())).collect())
}

/// A matrix read from its rows. `shape` is checked when given; an empty
/// array stands for a matrix with no entries.
pub fn matrix_from_json<E: Entry>(v: &Value, coef: &Coefficients, shape: Option<(usize, usize)>) -> Result<Matrix<E>> {
    let rows = array(v, "matrix")?;
    let parsed = rows
        .iter()
        .map(|row| {
            array(row, "matrix row")?
                .iter()
                .map(|x| match x {
                    Value::String(s) => E::read(coef, s),
                    Value::Number(n) => E::read(coef, &n.to_string()),
                    _ => Err(Error::Parse("matrix entries must be strings".into())),
                })
                .collect::<Result<Vec<E>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let cols = parsed.first().map_or(0, Vec::len);
    if parsed.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("ragged matrix".into()));
    }
    let got = (parsed.len(), cols);
    match shape {
        Some(want) if got.0 * got.1 == 0 && want.0 * want.1 == 0 => Ok(Matrix::zeros(want.0, want.1)),
        Some(want) if want != got => Err(Error::Shape(format!("matrix is {got:?}, expected {want:?}"))),
        _ if got.0 * got.1 == 0 => Ok(Matrix::zeros(got.0, got.1)),
        _ => Matrix::from_rows(parsed),
    }
}

fn degreewise_to_json<E: RingOps + Display>(maps: &BTreeMap<i64, Matrix<E>>) -> Value {
    Value::Object(
        maps.iter()
            .filter(|(_, m)| m.rows() > 0 && m.cols() > 0)
            .map(|(r, m)| (r.to_string(), matrix_to_json(m)))
            .collect(),
    )
}

fn degreewise_from_json<E: Entry>(
    v: &Value,
    coef: &Coefficients,
    shape: impl Fn(i64) -> Option<(usize, usize)>,
) -> Result<BTreeMap<i64, Matrix<E>>> {
    let mut out = BTreeMap::new();
    for (k, m) in object(v, "degreewise maps")? {
        let r = degree_key(k)?;
        let m: Matrix<E> = matrix_from_json(m, coef, shape(r))?;
        if m.rows() > 0 && m.cols() > 0 {
            out.insert(r, m);
        }
    }
    Ok(out)
}

pub fn complex_to_json<E: Entry>(c: &Complex<E>, coef: &Coefficients) -> Value {
    let degrees: Map<String, Value> = c.degrees().map(|r| (r.to_string(), json!(c.rank(r)))).collect();
    let bds: BTreeMap<i64, Matrix<E>> = c.degrees().skip(1).map(|r| (r, c.boundary(r))).collect();
    json!({ "ring": coef.tag(), "degrees": degrees, "boundaries": degreewise_to_json(&bds) })
}

pub fn complex_from_json<E: Entry>(v: &Value, coef: &Coefficients) -> Result<Complex<E>> {
    if let Some(tag) = v.get("ring").and_then(Value::as_str) {
        if tag != coef.tag() && Ring::from_tag(tag).ok() != Some(coef.base_ring()) {
            return Err(Error::Parse(format!("complex ring '{tag}' does not match '{}'", coef.tag())));
        }
    }
    let mut ranks = BTreeMap::new();
    for (k, n) in object(field(v, "degrees")?, "degrees")? {
        let n = n.as_u64().ok_or_else(|| Error::Parse("ranks must be naturals".into()))?;
        ranks.insert(degree_key(k)?, n as usize);
    }
    let ring = coef.base_ring();
    let (Some(&lo), Some(&hi)) = (ranks.keys().next(), ranks.keys().next_back()) else {
        return Ok(Complex::zero(ring));
    };
    let rank = |r: i64| ranks.get(&r).copied().unwrap_or(0);
    let bds = match v.get("boundaries") {
        Some(b) => degreewise_from_json(b, coef, |r| Some((rank(r - 1), rank(r))))?,
        None => BTreeMap::new(),
    };
    if let Some(r) = bds.keys().find(|&&r| r <= lo || r > hi) {
        return Err(Error::Parse(format!("boundary out of degree {r} is outside the complex")));
    }
    let boundaries = (lo + 1..=hi)
        .map(|r| bds.get(&r).cloned().unwrap_or_else(|| Matrix::zeros(rank(r - 1), rank(r))))
        .collect();
    Complex::new(ring, lo, (lo..=hi).map(rank).collect(), boundaries)
}

fn families_to_json<E: RingOps + Display>(phi: &[Family<E>]) -> Value {
    Value::Array(phi.iter().map(degreewise_to_json).collect())
}

/// Families phi_s of total degree n + s on `c`.
fn families_from_json<E: Entry>(v: Option<&Value>, coef: &Coefficients, c: &Complex<E>, n: i64) -> Result<Vec<Family<E>>> {
    let Some(v) = v else { return Ok(Vec::new()) };
    array(v, "structure")?
        .iter()
        .enumerate()
        .map(|(s, f)| degreewise_from_json(f, coef, |r| Some((c.rank(r), c.rank(n + s as i64 - r)))))
        .collect()
}

fn injection_to_json<E: RingOps + Display>(j: &SplitInjection<E>) -> Value {
    json!({ "map": degreewise_to_json(&j.map), "splitting": degreewise_to_json(&j.splitting) })
}

fn injection_from_json<E: Entry>(v: &Value, coef: &Coefficients, src: &Complex<E>, tgt: &Complex<E>) -> Result<SplitInjection<E>> {
    let map = degreewise_from_json(field(v, "map")?, coef, |r| Some((tgt.rank(r), src.rank(r))))?;
    let splitting = degreewise_from_json(field(v, "splitting")?, coef, |r| Some((src.rank(r), tgt.rank(r))))?;
    Ok(SplitInjection { map, splitting })
}

pub fn triad_to_json<E: Entry>(t: &SymmetricTriad<E>, coef: &Coefficients) -> Value {
    let mut obj = Map::new();
    coef.write(&mut obj);
    obj.insert("dimension".into(), json!(t.dim));
    obj.insert(
        "complexes".into(),
        json!({
            "A": complex_to_json(&t.a, coef),
            "B": complex_to_json(&t.b, coef),
            "C": complex_to_json(&t.c, coef),
            "D": complex_to_json(&t.d, coef),
        }),
    );
    obj.insert(
        "maps".into(),
        json!({
            "jA": injection_to_json(&t.j_a),
            "jB": injection_to_json(&t.j_b),
            "iA": injection_to_json(&t.i_a),
            "iB": injection_to_json(&t.i_b),
        }),
    );
    obj.insert("chi".into(), families_to_json(&t.chi));
    obj.insert("phiA".into(), families_to_json(&t.phi_a));
    obj.insert("phiB".into(), families_to_json(&t.phi_b));
    obj.insert("Phi".into(), families_to_json(&t.big_phi));
    if let Some(sg) = &t.sigma {
        let mut s = Map::new();
        s.insert("map".into(), degreewise_to_json(&sg.map));
        if let Some(h) = &sg.homotopy {
            s.insert("homotopy".into(), degreewise_to_json(h));
        }
        obj.insert("sigma".into(), Value::Object(s));
    }
    Value::Object(obj)
}

pub fn triad_from_json<E: Entry>(v: &Value, coef: &Coefficients) -> Result<SymmetricTriad<E>> {
    let dim = int_field(v, "dimension")?;
    let cx = field(v, "complexes")?;
    let get = |k: &str| -> Result<Complex<E>> {
        match cx.get(k) {
            Some(c) => complex_from_json(c, coef),
            None => Ok(Complex::zero(coef.base_ring())),
        }
    };
    let (d, a, b, c) = (get("D")?, get("A")?, get("B")?, get("C")?);
    let empty = json!({ "map": {}, "splitting": {} });
    let maps = v.get("maps").cloned().unwrap_or(json!({}));
    let inj = |k: &str, s: &Complex<E>, t: &Complex<E>| injection_from_json(maps.get(k).unwrap_or(&empty), coef, s, t);
    let sigma = match v.get("sigma") {
        None => None,
        Some(s) => Some(Sigma {
            map: degreewise_from_json(field(s, "map")?, coef, |_| None)?,
            homotopy: s.get("homotopy").map(|h| degreewise_from_json(h, coef, |_| None)).transpose()?,
        }),
    };
    Ok(SymmetricTriad {
        dim,
        j_a: inj("jA", &d, &a)?,
        j_b: inj("jB", &d, &b)?,
        i_a: inj("iA", &a, &c)?,
        i_b: inj("iB", &b, &c)?,
        chi: families_from_json(v.get("chi"), coef, &d, dim - 2)?,
        phi_a: families_from_json(v.get("phiA"), coef, &a, dim - 1)?,
        phi_b: families_from_json(v.get("phiB"), coef, &b, dim - 1)?,
        big_phi: families_from_json(v.get("Phi"), coef, &c, dim)?,
        sigma,
        d,
        a,
        b,
        c,
    })
}

pub fn cobordism_to_json<E: Entry>(cb: &Cobordism<E>, coef: &Coefficients) -> Value {
    let mut obj = Map::new();
    coef.write(&mut obj);
    obj.insert("dimension".into(), json!(cb.n + 1));
    obj.insert(
        "complexes".into(),
        json!({
            "D": complex_to_json(&cb.d, coef),
            "C": complex_to_json(&cb.c, coef),
            "C'": complex_to_json(&cb.c2, coef),
        }),
    );
    obj.insert("maps".into(), json!({ "C": degreewise_to_json(&cb.f_c), "C'": degreewise_to_json(&cb.f_c2) }));
    obj.insert("deltaPhi".into(), families_to_json(&cb.delta_phi));
    obj.insert("phi".into(), families_to_json(&cb.phi));
    obj.insert("phi'".into(), families_to_json(&cb.phi2));
    Value::Object(obj)
}

pub fn cobordism_from_json<E: Entry>(v: &Value, coef: &Coefficients) -> Result<Cobordism<E>> {
    let n = int_field(v, "dimension")? - 1;
    let cx = field(v, "complexes")?;
    let get = |k: &str| -> Result<Complex<E>> {
        match cx.get(k) {
            Some(c) => complex_from_json(c, coef),
            None => Ok(Complex::zero(coef.base_ring())),
        }
    };
    let (d, c, c2) = (get("D")?, get("C")?, get("C'")?);
    let maps = v.get("maps").cloned().unwrap_or(json!({}));
    let map = |k: &str, src: &Complex<E>| match maps.get(k) {
        Some(m) => degreewise_from_json(m, coef, |r| Some((d.rank(r), src.rank(r)))),
        None => Ok(BTreeMap::new()),
    };
    Ok(Cobordism {
        n,
        f_c: map("C", &c)?,
        f_c2: map("C'", &c2)?,
        delta_phi: families_from_json(v.get("deltaPhi"), coef, &d, n + 1)?,
        phi: families_from_json(v.get("phi"), coef, &c, n)?,
        phi2: families_from_json(v.get("phi'"), coef, &c2, n)?,
        d,
        c,
        c2,
    })
}

pub fn representation_to_json(rep: &Representation) -> Value {
    let gens: Vec<Value> = rep
        .generators
        .iter()
        .map(|g| json!({ "name": g.name, "matrix": matrix_to_json(&g.matrix), "inverse": matrix_to_json(&g.inverse) }))
        .collect();
    json!({ "ring": rep.ring.tag(), "dim": rep.dim, "generators": gens, "theta": matrix_to_json(&rep.theta) })
}

pub fn representation_from_json(v: &Value) -> Result<Representation> {
    let ring = Ring::from_tag(str_field(v, "ring")?)?;
    let coef = Coefficients::Ring(ring);
    let dim = field(v, "dim")?.as_u64().ok_or_else(|| Error::Parse("'dim' must be a natural".into()))? as usize;
    let square = Some((dim, dim));
    let generators = array(field(v, "generators")?, "generators")?
        .iter()
        .map(|g| {
            Ok(RepGenerator {
                name: str_field(g, "name")?.to_string(),
                matrix: matrix_from_json(field(g, "matrix")?, &coef, square)?,
                inverse: matrix_from_json(field(g, "inverse")?, &coef, square)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let theta = match v.get("theta") {
        Some(t) => matrix_from_json(t, &coef, square)?,
        None => Matrix::identity(dim),
    };
    Ok(Representation { ring, dim, generators, theta })
}

fn vectors_to_json(vs: &[Vec<RingElement>]) -> Value {
    Value::Array(vs.iter().map(|v| Value::Array(v.iter().map(|x| json!(x.to_string())).collect())).collect())
}

fn strings(vs: &[RingElement]) -> Value {
    Value::Array(vs.iter().map(|x| json!(x.to_string())).collect())
}

/// The pairing output file. Rows of "matrix" are indexed by "generators_A"
/// (the left slot), columns by "generators_B".
pub fn pairing_to_json(pm: &PairingMatrix, checks: &BTreeMap<String, bool>) -> Value {
    let matrix: Vec<Value> =
        pm.entries.iter().map(|row| Value::Array(row.iter().map(|x| json!(x.to_string())).collect())).collect();
    json!({
        "side": pm.side,
        "ring": pm.ring.tag(),
        "generators_A": vectors_to_json(&pm.left),
        "generators_B": vectors_to_json(&pm.right),
        "annihilators": strings(&pm.left_annihilators),
        "annihilators_B": strings(&pm.right_annihilators),
        "matrix": matrix,
        "checks": checks,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("malformed JSON: {e}")))
}

/// A triad file over either coefficient kind.
#[derive(Clone, Debug)]
pub enum TriadFile {
    Group(Arc<GroupRelations>, SymmetricTriad<GroupRingElement>),
    Ring(SymmetricTriad<RingElement>),
}

impl TriadFile {
    pub fn read(v: &Value) -> Result<Self> {
        match Coefficients::read(v)? {
            Coefficients::Group(rel) => {
                let t = triad_from_json(v, &Coefficients::Group(rel.clone()))?;
                Ok(TriadFile::Group(rel, t))
            }
            coef => Ok(TriadFile::Ring(triad_from_json(v, &coef)?)),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            TriadFile::Group(rel, t) => triad_to_json(t, &Coefficients::Group(rel.clone())),
            TriadFile::Ring(t) => triad_to_json(t, &Coefficients::Ring(t.c.ring)),
        }
    }
}

/// A cobordism file over either coefficient kind.
#[derive(Clone, Debug)]
pub enum CobordismFile {
    Group(Arc<GroupRelations>, Cobordism<GroupRingElement>),
    Ring(Cobordism<RingElement>),
}

impl CobordismFile {
    pub fn read(v: &Value) -> Result<Self> {
        match Coefficients::read(v)? {
            Coefficients::Group(rel) => {
                let c = cobordism_from_json(v, &Coefficients::Group(rel.clone()))?;
                Ok(CobordismFile::Group(rel, c))
            }
            coef => Ok(CobordismFile::Ring(cobordism_from_json(v, &coef)?)),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CobordismFile::Group(rel, c) => cobordism_to_json(c, &Coefficients::Group(rel.clone())),
            CobordismFile::Ring(c) => cobordism_to_json(c, &Coefficients::Ring(c.d.ring)),
        }
    }
}

const ELEMENT: &str = "ring element in textual syntax, e.g. \"5\", \"3/2\", \"2*t^-1 + 1 - t^3\"; over Z[pi] a Z-combination of words in the group generators";

fn matrix_schema() -> Value {
    json!({
        "type": "array",
        "description": "row-major matrix; omitted or empty when it has no entries",
        "items": { "type": "array", "items": { "type": "string", "description": ELEMENT } }
    })
}

fn degreewise_schema(what: &str) -> Value {
    json!({
        "type": "object",
        "description": what,
        "patternProperties": { "^-?[0-9]+$": { "$ref": "#/$defs/matrix" } },
        "additionalProperties": false
    })
}

fn family_list_schema(what: &str) -> Value {
    json!({
        "type": "array",
        "description": format!("{what}; entry s maps degree r to a matrix C^(m-r) -> C_r with m = base degree + s"),
        "items": degreewise_schema("matrices keyed by degree r")
    })
}

fn ring_schema() -> Value {
    json!({ "enum": ["Z", "Q", "Q[t,t^-1]", GROUP_RING_TAG] })
}

fn group_schema() -> Value {
    json!({
        "type": "object",
        "description": "present when ring is Z[pi]",
        "required": ["generators"],
        "properties": {
            "generators": { "type": "array", "items": { "type": "string" } },
            "orders": { "type": "array", "items": { "type": "integer", "minimum": 0 }, "description": "0 means infinite order" },
            "abelian": { "type": "boolean" }
        }
    })
}

fn complex_schema() -> Value {
    json!({
        "type": "object",
        "required": ["degrees"],
        "properties": {
            "ring": ring_schema(),
            "degrees": {
                "type": "object",
                "description": "rank of the free module in each degree",
                "patternProperties": { "^-?[0-9]+$": { "type": "integer", "minimum": 0 } }
            },
            "boundaries": degreewise_schema("boundary out of degree r, a rank(r-1) x rank(r) matrix")
        }
    })
}

fn injection_schema() -> Value {
    json!({
        "type": "object",
        "required": ["map", "splitting"],
        "properties": {
            "map": degreewise_schema("the injection in each degree"),
            "splitting": degreewise_schema("a left inverse in each degree")
        }
    })
}

fn with_defs(mut schema: Value) -> Value {
    schema["$schema"] = json!("https://json-schema.org/draft/2020-12/schema");
    schema["$defs"] = json!({
        "matrix": matrix_schema(),
        "complex": complex_schema(),
        "injection": injection_schema(),
    });
    schema
}

/// JSON schemas of every file kind, keyed by kind.
pub fn schemas() -> Value {
    let complex = with_defs(complex_schema());
    let representation = with_defs(json!({
        "type": "object",
        "description": "a representation of pi on V = R^dim; V (x) C uses the basis in which the V index varies fastest within each chain generator",
        "required": ["ring", "dim", "generators"],
        "properties": {
            "ring": { "enum": ["Z", "Q", "Q[t,t^-1]"] },
            "dim": { "type": "integer", "minimum": 1 },
            "generators": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["name", "matrix", "inverse"],
                    "properties": {
                        "name": { "type": "string" },
                        "matrix": { "$ref": "#/$defs/matrix" },
                        "inverse": { "$ref": "#/$defs/matrix" }
                    }
                }
            },
            "theta": { "$ref": "#/$defs/matrix", "description": "inner product matrix; identity when omitted" }
        }
    }));
    let triad = with_defs(json!({
        "type": "object",
        "description": "symmetric triad with split injections D -> A -> C and D -> B -> C",
        "required": ["ring", "dimension", "complexes"],
        "properties": {
            "ring": ring_schema(),
            "group": group_schema(),
            "dimension": { "type": "integer", "description": "dimension of the triad; 3 for 3-manifolds" },
            "complexes": {
                "type": "object",
                "properties": {
                    "A": { "$ref": "#/$defs/complex" },
                    "B": { "$ref": "#/$defs/complex" },
                    "C": { "$ref": "#/$defs/complex" },
                    "D": { "$ref": "#/$defs/complex" }
                }
            },
            "maps": {
                "type": "object",
                "properties": {
                    "jA": { "$ref": "#/$defs/injection" },
                    "jB": { "$ref": "#/$defs/injection" },
                    "iA": { "$ref": "#/$defs/injection" },
                    "iB": { "$ref": "#/$defs/injection" }
                }
            },
            "chi": family_list_schema("structure on D, base degree dimension - 2"),
            "phiA": family_list_schema("structure on A, base degree dimension - 1"),
            "phiB": family_list_schema("structure on B, base degree dimension - 1"),
            "Phi": family_list_schema("structure on C, base degree dimension"),
            "sigma": {
                "type": "object",
                "description": "chain equivalence C/B -> C/A in the quotient bases, with an optional witness of sigma q_B ~ q_A",
                "required": ["map"],
                "properties": {
                    "map": degreewise_schema("sigma in each degree"),
                    "homotopy": degreewise_schema("k_r: C_r -> (C/A)_(r+1)")
                }
            }
        }
    }));
    let cobordism = with_defs(json!({
        "type": "object",
        "description": "symmetric cobordism (D; C, C') with structure (deltaPhi; phi, phi')",
        "required": ["ring", "dimension", "complexes"],
        "properties": {
            "ring": ring_schema(),
            "group": group_schema(),
            "dimension": { "type": "integer", "description": "dimension of D; the ends have one less" },
            "complexes": {
                "type": "object",
                "properties": {
                    "D": { "$ref": "#/$defs/complex" },
                    "C": { "$ref": "#/$defs/complex" },
                    "C'": { "$ref": "#/$defs/complex" }
                }
            },
            "maps": {
                "type": "object",
                "properties": {
                    "C": degreewise_schema("C -> D"),
                    "C'": degreewise_schema("C' -> D")
                }
            },
            "deltaPhi": family_list_schema("structure on D, base degree dimension"),
            "phi": family_list_schema("structure on C, base degree dimension - 1"),
            "phi'": family_list_schema("structure on C', base degree dimension - 1")
        }
    }));
    let pairing = json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["side", "ring", "generators_A", "generators_B", "annihilators", "matrix", "checks"],
        "properties": {
            "side": { "enum": ["homology", "cohomology"] },
            "ring": { "enum": ["Z", "Q", "Q[t,t^-1]"] },
            "generators_A": { "type": "array", "description": "left slot generators as coordinate vectors; index the rows", "items": { "type": "array", "items": { "type": "string" } } },
            "generators_B": { "type": "array", "description": "right slot generators; index the columns", "items": { "type": "array", "items": { "type": "string" } } },
            "annihilators": { "type": "array", "description": "annihilator of each left generator", "items": { "type": "string" } },
            "annihilators_B": { "type": "array", "description": "annihilator of each right generator", "items": { "type": "string" } },
            "matrix": { "type": "array", "items": { "type": "array", "items": { "type": "string", "description": "canonical representative \"(num)/(den)\" of a class in S^-1 R / R" } } },
            "checks": { "type": "object", "additionalProperties": { "type": "boolean" } }
        }
    });
    json!({
        "complex": complex,
        "representation": representation,
        "triad": triad,
        "cobordism": cobordism,
        "pairing": pairing,
    })
}
