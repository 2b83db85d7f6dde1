//! The `blanchfield` command line tool.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blanchfield_core::blanchfield::{Blanchfield, PairingMatrix, Side, Verdict};
use blanchfield_core::builders::{
    branched_cover_form, cyclic_isometry, knot_triad, lens_complex, lens_form, seifert_agreement, LensData, SeifertData,
    SEIFERT_UNIT,
};
use blanchfield_core::group_ring::GroupRelations;
use blanchfield_core::io::{self, CobordismFile, TriadFile};
use blanchfield_core::symmetric_structure::diagonal::relations_of;
use blanchfield_core::symmetric_structure::{check_pair, check_triad, is_poincare, union, Cobordism, ResidualReport};
use blanchfield_core::{Complex, Error, Representation, Ring, RingElement, SymmetricTriad};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "blanchfield", version, about = "Symmetric chain complexes and twisted Blanchfield pairings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Homology,
    Cohomology,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Homology => Side::Homology,
            SideArg::Cohomology => Side::Cohomology,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Piece {
    A,
    B,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Incoming,
    Outgoing,
}

#[derive(Args)]
struct PairingOpts {
    #[arg(long, value_enum, default_value_t = SideArg::Homology)]
    side: SideArg,
    /// all, none, or a comma separated list of well_defined, sesquilinear,
    /// hermitian, nonsingular.
    #[arg(long, default_value = "all")]
    checks: String,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structure equations of a triad, cobordism or complex file.
    Validate {
        file: PathBuf,
        /// Representation used for the Poincaré check of a Z[pi] triad.
        #[arg(long)]
        rep: Option<PathBuf>,
    },
    /// Compute the pairing of a triad file.
    Pairing {
        file: PathBuf,
        #[arg(long)]
        rep: Option<PathBuf>,
        #[command(flatten)]
        opts: PairingOpts,
    },
    /// The knot triad of a Seifert matrix with the tautological representation.
    Knot {
        /// unknot, trefoil, figure-eight, or a JSON file holding the matrix.
        #[arg(long)]
        seifert: String,
        /// Also evaluate the Seifert-matrix formula and compare.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        opts: PairingOpts,
        /// Write the triad over Z[pi] to this file.
        #[arg(long)]
        emit_triad: Option<PathBuf>,
        /// Write one half of the triad as a cobordism to this file.
        #[arg(long)]
        emit_cobordism: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Piece::A)]
        piece: Piece,
        #[arg(long, value_enum, default_value_t = Direction::Incoming)]
        direction: Direction,
        /// Negate the structure of the emitted cobordism.
        #[arg(long)]
        negate: bool,
    },
    /// The linking form of the lens space L(p, q).
    Lens {
        p: i64,
        q: i64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        orientation: i64,
        #[command(flatten)]
        opts: PairingOpts,
        #[arg(long)]
        emit_triad: Option<PathBuf>,
    },
    /// The linking form of the k-fold cyclic branched cover of a knot.
    Branched {
        #[arg(long)]
        seifert: String,
        #[arg(short = 'k', long)]
        k: usize,
        /// Compare with the linking form of L(P, Q).
        #[arg(long, num_args = 2, value_names = ["P", "Q"])]
        lens: Option<Vec<i64>>,
        #[arg(long, default_value = "all")]
        checks: String,
    },
    /// Glue two cobordism files along their shared end.
    Union {
        left: PathBuf,
        right: PathBuf,
        /// Write the glued cobordism to this file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Print the JSON schemas of the file formats.
    EmitSchema {
        /// complex, representation, triad, cobordism or pairing; all when omitted.
        kind: Option<String>,
    },
}

/// A rendered result: its JSON form, its text form, and whether every
/// requested check passed.
struct Outcome {
    json: Value,
    text: String,
    passed: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(out) => {
            let body = match cli.format {
                Format::Json => io::to_string(&out.json),
                Format::Text => out.text,
            };
            if let Err(e) = emit(cli.output.as_deref(), &body) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(path: Option<&Path>, body: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn read_json(path: &Path) -> Result<Value, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    io::parse(&text)
}

fn run(cmd: &Command) -> Result<Outcome, Error> {
    match cmd {
        Command::Validate { file, rep } => validate(&read_json(file)?, rep.as_deref()),
        Command::Pairing { file, rep, opts } => {
            let t = ring_triad(TriadFile::read(&read_json(file)?)?, rep.as_deref())?;
            let bl = Blanchfield::new(&t)?;
            pairing_outcome(&bl, opts.side.into(), &parse_checks(&opts.checks)?, Map::new())
        }
        Command::Knot { seifert, oracle, opts, emit_triad, emit_cobordism, piece, direction, negate } => {
            let v = seifert_data(seifert)?;
            let tg = knot_triad(&v)?;
            if let Some(path) = emit_triad {
                write_triad(path, &tg)?;
            }
            if let Some(path) = emit_cobordism {
                write_cobordism(path, &tg, *piece, *direction, *negate)?;
            }
            let t = tg.tensor_with(&Representation::tautological())?;
            let bl = Blanchfield::new(&t)?;
            let mut extra = Map::new();
            let mut agree = true;
            if *oracle {
                let ag = seifert_agreement(&v)?;
                agree = ag.exact;
                let m: Vec<Vec<String>> = ag.oracle.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
                extra.insert(
                    "oracle".into(),
                    json!({
                        "matrix": m,
                        "agreement": if ag.exact { "exact" } else { "mismatch" },
                        "unit": { "sign": SEIFERT_UNIT.0, "t_power": SEIFERT_UNIT.1 },
                    }),
                );
            }
            let mut out = pairing_outcome(&bl, opts.side.into(), &parse_checks(&opts.checks)?, extra)?;
            if *oracle {
                let _ = writeln!(out.text, "oracle agreement: {}", if agree { "exact" } else { "mismatch" });
            }
            out.passed &= agree;
            Ok(out)
        }
        Command::Lens { p, q, orientation, opts, emit_triad } => {
            let l = LensData::new(*p, *q)?;
            let sc = lens_complex(&l, *orientation)?;
            if let Some(path) = emit_triad {
                write_triad(path, &SymmetricTriad::closed(&sc))?;
            }
            let t = SymmetricTriad::closed(&sc.tensor_with(&Representation::trivial(&["t"]))?);
            let bl = Blanchfield::new(&t)?;
            let mut extra = Map::new();
            extra.insert("space".into(), json!(format!("L({p},{q})")));
            extra.insert("orientation".into(), json!(orientation));
            let mut out = pairing_outcome(&bl, opts.side.into(), &parse_checks(&opts.checks)?, extra)?;
            out.text = format!("L({p},{q}), orientation {orientation:+}\n{}", out.text);
            Ok(out)
        }
        Command::Branched { seifert, k, lens, checks } => {
            let v = seifert_data(seifert)?;
            let form = branched_cover_form(&v, *k)?;
            let t = knot_triad(&v)?.tensor_with(&Representation::regular_cyclic(*k))?;
            let bl = Blanchfield::new(&t)?;
            let mut extra = Map::new();
            extra.insert("k".into(), json!(k));
            let mut cross = None;
            if let Some(pq) = lens {
                let other = lens_form(&LensData::new(pq[0], pq[1])?, 1)?;
                let iso = cyclic_isometry(&form, &other.form)?;
                let name = format!("L({},{})", pq[0], pq[1]);
                let detail = match iso {
                    Some((u, e)) => json!({ "lens": name, "isometric": true, "unit": u, "sign": e }),
                    None => json!({ "lens": name, "isometric": false }),
                };
                extra.insert("cross_check".into(), detail);
                cross = Some((name, iso));
            }
            let mut out = pairing_outcome(&bl, Side::Homology, &parse_checks(checks)?, extra)?;
            out.text = format!("{k}-fold branched cover\n{}", out.text);
            if let Some((name, iso)) = cross {
                let _ = match iso {
                    Some((u, e)) => writeln!(out.text, "cross-check vs {name}: isometric (unit {u}, sign {e:+})"),
                    None => writeln!(out.text, "cross-check vs {name}: not isometric"),
                };
                out.passed &= iso.is_some();
            }
            Ok(out)
        }
        Command::Union { left, right, emit: glued_path } => {
            let (l, r) = (CobordismFile::read(&read_json(left)?)?, CobordismFile::read(&read_json(right)?)?);
            let glued = match (l, r) {
                (CobordismFile::Group(rel, a), CobordismFile::Group(_, b)) => CobordismFile::Group(rel, union(&a, &b)?),
                (CobordismFile::Ring(a), CobordismFile::Ring(b)) => CobordismFile::Ring(union(&a, &b)?),
                _ => return Err(Error::Invalid("the two cobordisms have different coefficients".into())),
            };
            if let Some(path) = glued_path {
                emit(Some(path), &io::to_string(&glued.to_json()))?;
            }
            let (rep, ranks) = match &glued {
                CobordismFile::Group(_, c) => (check_pair(&c.as_pair()), ranks(&c.d)),
                CobordismFile::Ring(c) => (check_pair(&c.as_pair()), ranks(&c.d)),
            };
            let mut text = format!("glued complex ranks: {ranks}\n");
            residual_text(&mut text, "pair", &rep);
            Ok(Outcome { json: json!({ "kind": "union", "passed": rep.passed, "pair": rep }), text, passed: rep.passed })
        }
        Command::EmitSchema { kind } => {
            let all = io::schemas();
            let json = match kind {
                None => all,
                Some(k) => all.get(k).cloned().ok_or_else(|| Error::Invalid(format!("unknown schema '{k}'")))?,
            };
            Ok(Outcome { text: io::to_string(&json), json, passed: true })
        }
    }
}

type Map = serde_json::Map<String, Value>;

fn ranks<E: blanchfield_core::RingOps>(c: &Complex<E>) -> String {
    c.degrees().map(|r| format!("{r}:{}", c.rank(r))).collect::<Vec<_>>().join(" ")
}

fn seifert_data(s: &str) -> Result<SeifertData, Error> {
    match s {
        "unknot" => return Ok(SeifertData::unknot()),
        "trefoil" => return Ok(SeifertData::trefoil()),
        "figure-eight" | "figure_eight" => return Ok(SeifertData::figure_eight()),
        _ => {}
    }
    let v = read_json(Path::new(s))?;
    let rows = v.get("seifert").unwrap_or(&v);
    let rows = rows.as_array().ok_or_else(|| Error::Parse("a Seifert matrix is an array of rows".into()))?;
    let entry = |x: &Value| -> Result<i64, Error> {
        match x {
            Value::Number(n) => n.as_i64(),
            Value::String(s) => s.trim().parse().ok(),
            _ => None,
        }
        .ok_or_else(|| Error::Parse(format!("Seifert entries must be integers, got {x}")))
    };
    let m = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Parse("a Seifert matrix row must be an array".into()))?
                .iter()
                .map(entry)
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    SeifertData::new(m)
}

fn group_of(t: &SymmetricTriad<blanchfield_core::GroupRingElement>) -> Result<std::sync::Arc<GroupRelations>, Error> {
    relations_of(&t.c).ok_or_else(|| Error::Invalid("the triad has no group data".into()))
}

fn write_triad(path: &Path, t: &SymmetricTriad<blanchfield_core::GroupRingElement>) -> Result<(), Error> {
    let file = TriadFile::Group(group_of(t)?, t.clone());
    emit(Some(path), &io::to_string(&file.to_json()))
}

fn write_cobordism(
    path: &Path,
    t: &SymmetricTriad<blanchfield_core::GroupRingElement>,
    piece: Piece,
    direction: Direction,
    negate: bool,
) -> Result<(), Error> {
    let mut pair = match piece {
        Piece::A => t.pair_a(),
        Piece::B => t.pair_b(),
    };
    if negate {
        pair = pair.negated();
    }
    let cb = match direction {
        Direction::Incoming => Cobordism::from_pair_incoming(&pair),
        Direction::Outgoing => Cobordism::from_pair_outgoing(&pair),
    };
    let file = CobordismFile::Group(group_of(t)?, cb);
    emit(Some(path), &io::to_string(&file.to_json()))
}

/// The default representation of a group: tautological for Z = <t>,
/// trivial otherwise.
fn default_rep(rel: &GroupRelations) -> Representation {
    if rel.generators == ["t"] && rel.orders == [0] {
        Representation::tautological()
    } else {
        let names: Vec<&str> = rel.generators.iter().map(String::as_str).collect();
        Representation::trivial(&names)
    }
}

fn ring_triad(file: TriadFile, rep: Option<&Path>) -> Result<SymmetricTriad<RingElement>, Error> {
    match file {
        TriadFile::Ring(t) => {
            if rep.is_some() {
                return Err(Error::Invalid("--rep applies only to triads over Z[pi]".into()));
            }
            Ok(t)
        }
        TriadFile::Group(rel, t) => {
            let rep = match rep {
                Some(p) => io::representation_from_json(&read_json(p)?)?,
                None => default_rep(&rel),
            };
            t.tensor_with(&rep)
        }
    }
}

const ALL_CHECKS: [&str; 4] = ["well_defined", "sesquilinear", "hermitian", "nonsingular"];

fn parse_checks(s: &str) -> Result<Vec<&'static str>, Error> {
    match s.trim() {
        "all" => Ok(ALL_CHECKS.to_vec()),
        "none" | "" => Ok(Vec::new()),
        list => list
            .split(',')
            .map(|c| {
                ALL_CHECKS
                    .iter()
                    .find(|k| **k == c.trim())
                    .copied()
                    .ok_or_else(|| Error::Invalid(format!("unknown check '{c}'")))
            })
            .collect(),
    }
}

fn run_check(bl: &Blanchfield, name: &str) -> (bool, String) {
    let r = match name {
        "well_defined" => bl.check_well_defined(20, 1).map(|r| (r.passed, format!("{} comparisons", r.checked))),
        "sesquilinear" => bl.check_sesquilinear(20, 2).map(|r| (r.passed, format!("{} comparisons", r.checked))),
        "hermitian" => bl.check_hermitian().map(|r| (r.passed, format!("homotopy {}", r.homotopy))),
        _ => bl.check_nonsingular().map(|r| (r.verdict == Verdict::Pass, r.hypothesis)),
    };
    r.unwrap_or_else(|e| (false, e.to_string()))
}

fn pairing_outcome(bl: &Blanchfield, side: Side, checks: &[&str], extra: Map) -> Result<Outcome, Error> {
    let pm = bl.pairing_matrix(side)?;
    let mut verdicts = BTreeMap::new();
    let mut text = pairing_text(&pm);
    for name in checks {
        let (ok, detail) = run_check(bl, name);
        verdicts.insert(name.to_string(), ok);
        let _ = writeln!(text, "{name}: {} ({detail})", if ok { "pass" } else { "FAIL" });
    }
    let mut json = io::pairing_to_json(&pm, &verdicts);
    if let Value::Object(o) = &mut json {
        o.extend(extra);
    }
    Ok(Outcome { json, text, passed: verdicts.values().all(|&v| v) })
}

fn pairing_text(pm: &PairingMatrix) -> String {
    let side = match pm.side {
        Side::Homology => "homology",
        Side::Cohomology => "cohomology",
    };
    let ann = |v: &[RingElement]| v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", ");
    let mut s = format!("{side} pairing over {}\n", pm.ring.tag());
    if pm.is_empty() {
        s.push_str("torsion module is zero\n");
        return s;
    }
    let _ = writeln!(s, "annihilators: {}", ann(&pm.left_annihilators));
    if pm.right_annihilators != pm.left_annihilators {
        let _ = writeln!(s, "right annihilators: {}", ann(&pm.right_annihilators));
    }
    for row in &pm.entries {
        let _ = writeln!(s, "  [{}]", row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "));
    }
    s
}

fn residual_text(out: &mut String, label: &str, rep: &ResidualReport) {
    let _ = writeln!(out, "{label}: {} ({} residuals checked)", if rep.passed { "pass" } else { "FAIL" }, rep.checked);
    for e in &rep.errors {
        let _ = writeln!(out, "  error: {e}");
    }
    for f in &rep.failures {
        let _ = writeln!(out, "  nonzero {} residual at s = {}, r = {} ({} entries)", f.part, f.s, f.r, f.nonzero_entries);
    }
}

fn validate(v: &Value, rep: Option<&Path>) -> Result<Outcome, Error> {
    if v.get("degrees").is_some() {
        let coef = io::Coefficients::Ring(Ring::from_tag(v.get("ring").and_then(Value::as_str).unwrap_or("Z"))?);
        let c: Complex<RingElement> = io::complex_from_json(v, &coef)?;
        let r = c.validate();
        let mut text = format!("complex with ranks {}\n", ranks(&c));
        let _ = writeln!(text, "d^2 = 0: {}", if r.passed { "pass" } else { "FAIL" });
        for d in &r.nonzero_square {
            let _ = writeln!(text, "  d d != 0 out of degree {d}");
        }
        let json = json!({ "kind": "complex", "passed": r.passed, "nonzero_square": r.nonzero_square });
        return Ok(Outcome { json, text, passed: r.passed });
    }
    if v.get("complexes").and_then(|c| c.get("C'")).is_some() {
        let rep = match CobordismFile::read(v)? {
            CobordismFile::Group(_, c) => check_pair(&c.as_pair()),
            CobordismFile::Ring(c) => check_pair(&c.as_pair()),
        };
        let mut text = String::new();
        residual_text(&mut text, "pair", &rep);
        return Ok(Outcome { json: json!({ "kind": "cobordism", "passed": rep.passed, "pair": rep }), text, passed: rep.passed });
    }
    let file = TriadFile::read(v)?;
    let structure = match &file {
        TriadFile::Group(_, t) => check_triad(t)?,
        TriadFile::Ring(t) => check_triad(t)?,
    };
    let mut text = String::new();
    residual_text(&mut text, "structure", &structure);
    let mut json = json!({ "kind": "triad", "structure": structure });
    let mut passed = structure.passed;
    if structure.errors.is_empty() {
        let t = ring_triad(file, rep)?;
        let p = is_poincare(&t)?;
        let parts: Vec<Value> = p
            .parts
            .iter()
            .map(|(name, q)| json!({ "map": name, "passed": q.passed, "failures": q.failures }))
            .collect();
        let _ = writeln!(text, "poincare: {}", if p.passed { "pass" } else { "FAIL" });
        for (name, q) in &p.parts {
            let _ = writeln!(text, "  {name}: {}", if q.passed { "equivalence" } else { "not an equivalence" });
        }
        for name in &p.not_chain_maps {
            let _ = writeln!(text, "  {name}: not a chain map");
        }
        json["poincare"] = json!({ "passed": p.passed, "parts": parts, "not_chain_maps": p.not_chain_maps });
        passed &= p.passed;
    }
    json["passed"] = json!(passed);
    Ok(Outcome { json, text, passed })
}
