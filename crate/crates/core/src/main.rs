use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use xlie::catalog::{self, CatalogValue, EntryKind};
use xlie::derivations;
use xlie::doc::{self, Status, VerdictDoc};
use xlie::isoclinism::{self, CommutatorPairing, IsoclinismSearch};
use xlie::lie::SeriesKind;
use xlie::search::SearchOptions;
use xlie::xmod::SubXMod;
use xlie::{CrossedModule, Error, FieldSpec, LieAlgebra, Verdict};

const SCHEMA_VERSION: u32 = 1;
const DEFAULT_MAX_DIM: usize = 12;

#[derive(Parser)]
#[command(
    name = "xlie",
    version,
    about = "Crossed modules of Lie algebras over Q and F_p"
)]
struct Cli {
    /// Also write the output to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record wall time in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the crossed-module (or Lie algebra) axioms.
    Validate { x: PathBuf },
    /// Center Z(L) = (L1^{L0}, St ∩ Z(L0)).
    Center { x: PathBuf },
    /// Commutator [L,L] = (D_{L0}(L1), [L0,L0]).
    Commutator { x: PathBuf },
    /// Lower central or derived series.
    Series {
        x: PathBuf,
        #[arg(long, value_enum)]
        kind: SeriesArg,
    },
    /// Derivation spaces.
    Der {
        x: PathBuf,
        #[arg(long, value_enum)]
        kind: DerArg,
    },
    /// Actor Act(L), or Act_C(L) with --class, or InnAct(L) inside Act(L) with --inner.
    Actor {
        x: PathBuf,
        #[arg(long, conflicts_with = "inner")]
        class: bool,
        #[arg(long)]
        inner: bool,
    },
    /// Quotient crossed module.
    Quotient {
        x: PathBuf,
        #[arg(long, value_enum)]
        by: QuotientBy,
    },
    /// Verify or search for isoclinisms.
    #[command(subcommand)]
    Isoclinic(IsoclinicCommand),
    /// Isoclinism invariants.
    Fingerprint { x: PathBuf },
    /// Built-in Lie algebras and crossed modules.
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Subcommand)]
enum IsoclinicCommand {
    /// Check a witness for x ~ y.
    Verify { x: PathBuf, y: PathBuf, w: PathBuf },
    /// Search for an isoclinism x ~ y (finite fields only).
    Search {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    List,
    /// Print the document of a catalog entry.
    Emit {
        name: String,
        #[arg(long, default_value = "Q")]
        field: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesArg {
    Lc,
    Derived,
}

#[derive(Clone, Copy, ValueEnum)]
enum DerArg {
    Whitehead,
    Xmod,
    WhiteheadClass,
    XmodClass,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuotientBy {
    Center,
}

/// What a command produced before it is wrapped into a report.
struct Outcome {
    code: u8,
    verdict: Option<VerdictDoc>,
    result: Value,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome {
            code: 0,
            verdict: None,
            result,
        }
    }

    fn verdict(status: Status, detail: impl Into<String>, result: Value) -> Self {
        let code = match status {
            Status::Verified => 0,
            Status::Violated | Status::NotIsoclinic => 1,
            Status::BudgetExhausted => 3,
        };
        Outcome {
            code,
            verdict: Some(VerdictDoc::new(status, detail)),
            result,
        }
    }
}

enum Failure {
    Usage(String),
    /// An input crossed module fails the axioms.
    Invalid(Outcome),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Run<T> = std::result::Result<T, Failure>;

struct Ctx {
    inputs: Vec<Value>,
    max_dim: usize,
}

impl Ctx {
    fn read(&mut self, role: &str, path: &Path) -> Run<String> {
        let bytes = if path.as_os_str() == "-" {
            let mut b = Vec::new();
            io::stdin()
                .read_to_end(&mut b)
                .map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
            b
        } else {
            fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        };
        let digest = Sha256::digest(&bytes);
        self.inputs.push(json!({
            "role": role,
            "path": path.display().to_string(),
            "sha256": format!("{digest:x}"),
        }));
        String::from_utf8(bytes)
            .map_err(|_| Failure::Usage(format!("{}: not UTF-8", path.display())))
    }

    fn check_dim(&self, what: &str, total: usize) -> Run<()> {
        if total > self.max_dim {
            return Err(Failure::Usage(format!(
                "{what}: total dimension {total} exceeds XLIE_MAX_DIM={}",
                self.max_dim
            )));
        }
        Ok(())
    }

    /// Loads a crossed module; one that fails the axioms becomes an exit-1 report.
    fn load_valid(&mut self, role: &str, path: &Path) -> Run<CrossedModule> {
        let text = self.read(role, path)?;
        self.load_valid_text(role, path, &text)
    }

    fn load_valid_text(&mut self, role: &str, path: &Path, text: &str) -> Run<CrossedModule> {
        let d = doc::parse_xmod_doc(text)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        self.check_dim(role, d.l1.dim + d.l0.dim)?;
        let x = doc::xmod_from_doc(&d)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let report = x.validate();
        if report.is_valid() {
            return Ok(x);
        }
        Err(Failure::Invalid(Outcome::verdict(
            Status::Violated,
            format!(
                "{} violation(s), first: {}",
                report.violations.len(),
                report.violations[0]
            ),
            json!({ "kind": "xmod", "dims": dims(x.dims()), "violations": violations_json(&report.violations) }),
        )))
    }
}

fn violations_json(v: &[xlie::xmod::XModViolation]) -> Value {
    v.iter()
        .map(|v| json!({ "axiom": v.axiom(), "detail": v.to_string() }))
        .collect()
}

fn dims(d: (usize, usize)) -> Value {
    json!([d.0, d.1])
}

fn sub_json(s: &SubXMod) -> Value {
    json!(doc::subxmod_to_doc(&s.s1, &s.s0))
}

fn module_json(x: &CrossedModule) -> Value {
    json!(doc::xmod_to_doc(x))
}

fn validate(ctx: &mut Ctx, path: &Path) -> Run<Outcome> {
    let text = ctx.read("x", path)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if value.get("L1").is_none() && value.get("brackets").is_some() {
        let d: doc::LieDoc = serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        ctx.check_dim("x", d.dim)?;
        let g = doc::lie_from_doc(&d, "")
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        return Ok(validate_lie(&g));
    }
    let x = ctx.load_valid_text("x", path, &text)?;
    let p = x.predicates()?;
    Ok(Outcome::verdict(
        Status::Verified,
        "all crossed-module axioms hold",
        json!({
            "kind": "xmod",
            "dims": dims(x.dims()),
            "violations": [],
            "predicates": {
                "aspherical": p.aspherical,
                "simply_connected": p.simply_connected,
                "abelian": p.abelian,
            },
        }),
    ))
}

fn validate_lie(g: &LieAlgebra) -> Outcome {
    let report = g.validate();
    let violations: Vec<Value> = report
        .violations
        .iter()
        .map(|v| json!({ "detail": v.to_string() }))
        .collect();
    let result = json!({ "kind": "lie", "dim": g.dim(), "violations": violations });
    match report.violations.first() {
        None => Outcome::verdict(Status::Verified, "all Lie algebra axioms hold", result),
        Some(v) => Outcome::verdict(
            Status::Violated,
            format!("{} violation(s), first: {v}", report.violations.len()),
            result,
        ),
    }
}

fn center(ctx: &mut Ctx, path: &Path) -> Run<Outcome> {
    let x = ctx.load_valid("x", path)?;
    let z = x.center()?;
    Ok(Outcome::ok(json!({
        "dims": dims(z.dims()),
        "subspaces": sub_json(&z),
        "module": module_json(&x.restrict(&z)?),
    })))
}

fn commutator(ctx: &mut Ctx, path: &Path) -> Run<Outcome> {
    let x = ctx.load_valid("x", path)?;
    let c = x.commutator()?;
    Ok(Outcome::ok(json!({
        "dims": dims(c.dims()),
        "subspaces": sub_json(&c),
        "module": module_json(&x.restrict(&c)?),
    })))
}

fn series(ctx: &mut Ctx, path: &Path, kind: SeriesArg) -> Run<Outcome> {
    let x = ctx.load_valid("x", path)?;
    let (kind, name, property) = match kind {
        SeriesArg::Lc => (SeriesKind::LowerCentral, "lower_central", "nilpotent"),
        SeriesArg::Derived => (SeriesKind::Derived, "derived", "solvable"),
    };
    let s = x.series(kind)?;
    let terms: Vec<Value> = s
        .terms
        .iter()
        .map(|t| json!({ "dims": dims(t.dims()), "subspaces": sub_json(t) }))
        .collect();
    Ok(Outcome::ok(json!({
        "kind": name,
        "terms": terms,
        property: s.index.is_some(),
        "index": s.index,
    })))
}

fn der(ctx: &mut Ctx, path: &Path, kind: DerArg) -> Run<Outcome> {
    let x = ctx.load_valid("x", path)?;
    let space = match kind {
        DerArg::Whitehead => derivations::whitehead_derivations(&x)?,
        DerArg::Xmod => derivations::xmod_derivations(&x)?,
        DerArg::WhiteheadClass => derivations::class_preserving_whitehead(&x)?,
        DerArg::XmodClass => derivations::class_preserving_xmod(&x)?,
    };
    Ok(Outcome::ok(json!(doc::derivation_space_to_doc(&space))))
}

fn actor(ctx: &mut Ctx, path: &Path, class: bool, inner: bool) -> Run<Outcome> {
    let x = ctx.load_valid("x", path)?;
    if inner {
        let ia = derivations::inner_actor(&x)?;
        return Ok(Outcome::ok(json!({
            "kind": "inner",
            "module": module_json(&ia.actor.module),
            "class": { "dims": dims(ia.class.dims()), "subspaces": sub_json(&ia.class) },
            "inner": { "dims": dims(ia.inner.dims()), "subspaces": sub_json(&ia.inner) },
            "inner_is_ideal_of_class": ia.inner.is_contained_in(&ia.class),
        })));
    }
    let (a, kind) = if class {
        (derivations::class_actor(&x)?, "class")
    } else {
        (derivations::actor(&x)?, "full")
    };
    Ok(Outcome::ok(json!({
        "kind": kind,
        "dims": dims(a.module.dims()),
        "module": module_json(&a.module),
        "whitehead": doc::derivation_space_to_doc(&a.whitehead),
        "xmod": doc::derivation_space_to_doc(&a.xmod),
    })))
}

fn quotient(ctx: &mut Ctx, path: &Path, by: QuotientBy) -> Run<Outcome> {
    let x = ctx.load_valid("x", path)?;
    let (q, by) = match by {
        QuotientBy::Center => (x.central_quotient()?, "center"),
    };
    Ok(Outcome::ok(json!({
        "by": by,
        "dims": dims(q.module.dims()),
        "module": module_json(&q.module),
        "projection": doc::morphism_to_value(&q.projection),
    })))
}

fn same_field(x: &CrossedModule, y: &CrossedModule) -> Run<()> {
    if x.field() != y.field() {
        return Err(Error::FieldMismatch(x.field(), y.field()).into());
    }
    Ok(())
}

fn isoclinic_verify(ctx: &mut Ctx, xp: &Path, yp: &Path, wp: &Path) -> Run<Outcome> {
    let x = ctx.load_valid("x", xp)?;
    let y = ctx.load_valid("y", yp)?;
    same_field(&x, &y)?;
    let text = ctx.read("w", wp)?;
    let wd = doc::parse_witness_doc(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", wp.display())))?;
    let px = CommutatorPairing::new(&x)?;
    let py = CommutatorPairing::new(&y)?;
    let w = doc::witness_from_doc(&wd, &px, &py)
        .map_err(|e| Failure::Usage(format!("{}: {e}", wp.display())))?;
    Ok(match isoclinism::verify_with(&px, &py, &w)? {
        Verdict::Verified(w) => Outcome::verdict(
            Status::Verified,
            "both maps are isomorphisms and commute with the commutator pairings",
            json!({ "witness": doc::witness_to_doc(&w, true) }),
        ),
        Verdict::Violated(v) => Outcome::verdict(
            Status::Violated,
            v.to_string(),
            json!({ "witness": doc::witness_to_doc(&w, false) }),
        ),
    })
}

fn isoclinic_search(ctx: &mut Ctx, xp: &Path, yp: &Path, budget: u64, jobs: usize) -> Run<Outcome> {
    let x = ctx.load_valid("x", xp)?;
    let y = ctx.load_valid("y", yp)?;
    same_field(&x, &y)?;
    let opts = SearchOptions {
        budget,
        jobs: jobs.max(1),
    };
    let report = isoclinism::isoclinism_search(&x, &y, &opts)?;
    let nodes = report.nodes;
    Ok(match report.outcome {
        IsoclinismSearch::Found(w) => Outcome::verdict(
            Status::Verified,
            "isoclinism found",
            json!({ "witness": doc::witness_to_doc(&w, true), "nodes": nodes }),
        ),
        IsoclinismSearch::FingerprintMismatch(d) => Outcome::verdict(
            Status::NotIsoclinic,
            format!("fingerprint: {d}"),
            json!({ "reason": "fingerprint", "nodes": nodes }),
        ),
        IsoclinismSearch::Exhausted => Outcome::verdict(
            Status::NotIsoclinic,
            "exhausted: no candidate satisfies the constraints",
            json!({ "reason": "exhausted", "nodes": nodes }),
        ),
        IsoclinismSearch::BudgetExhausted => Outcome::verdict(
            Status::BudgetExhausted,
            format!("budget of {budget} nodes exhausted"),
            json!({ "reason": "budget", "nodes": nodes }),
        ),
    })
}

fn fingerprint(ctx: &mut Ctx, path: &Path) -> Run<Outcome> {
    let x = ctx.load_valid("x", path)?;
    Ok(Outcome::ok(doc::fingerprint_to_value(
        &isoclinism::fingerprint(&x)?,
    )))
}

fn catalog_list() -> Outcome {
    let entries: Vec<Value> = catalog::ENTRIES
        .iter()
        .map(|e| {
            let kind = match e.kind {
                EntryKind::Lie => "lie",
                EntryKind::XMod => "xmod",
            };
            json!({ "name": e.name, "kind": kind, "description": e.description })
        })
        .collect();
    Outcome::ok(json!({ "entries": entries }))
}

fn catalog_emit(name: &str, field: &str) -> Run<Value> {
    let field: FieldSpec = field.parse()?;
    Ok(match catalog::build(name, field)? {
        CatalogValue::Lie(g) => json!(doc::lie_to_doc(&g)),
        CatalogValue::XMod(x) => json!(doc::xmod_to_doc(&x)),
    })
}

fn max_dim() -> Run<usize> {
    match std::env::var("XLIE_MAX_DIM") {
        Err(_) => Ok(DEFAULT_MAX_DIM),
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::Usage(format!(
                "XLIE_MAX_DIM must be a non-negative integer, got {v:?}"
            ))
        }),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Center { .. } => "center",
        Command::Commutator { .. } => "commutator",
        Command::Series { .. } => "series",
        Command::Der { .. } => "der",
        Command::Actor { .. } => "actor",
        Command::Quotient { .. } => "quotient",
        Command::Isoclinic(IsoclinicCommand::Verify { .. }) => "isoclinic verify",
        Command::Isoclinic(IsoclinicCommand::Search { .. }) => "isoclinic search",
        Command::Fingerprint { .. } => "fingerprint",
        Command::Catalog(CatalogCommand::List) => "catalog list",
        Command::Catalog(CatalogCommand::Emit { .. }) => "catalog emit",
    }
}

/// Runs the command; `Ok` carries the exit code and the JSON to print.
fn execute(cli: &Cli) -> Run<(u8, Value)> {
    let start = Instant::now();
    if let Command::Catalog(CatalogCommand::Emit { name, field }) = &cli.command {
        return Ok((0, catalog_emit(name, field)?));
    }
    let mut ctx = Ctx {
        inputs: Vec::new(),
        max_dim: max_dim()?,
    };
    let outcome = match &cli.command {
        Command::Validate { x } => validate(&mut ctx, x),
        Command::Center { x } => center(&mut ctx, x),
        Command::Commutator { x } => commutator(&mut ctx, x),
        Command::Series { x, kind } => series(&mut ctx, x, *kind),
        Command::Der { x, kind } => der(&mut ctx, x, *kind),
        Command::Actor { x, class, inner } => actor(&mut ctx, x, *class, *inner),
        Command::Quotient { x, by } => quotient(&mut ctx, x, *by),
        Command::Isoclinic(IsoclinicCommand::Verify { x, y, w }) => {
            isoclinic_verify(&mut ctx, x, y, w)
        }
        Command::Isoclinic(IsoclinicCommand::Search { x, y, budget, jobs }) => {
            isoclinic_search(&mut ctx, x, y, *budget, *jobs)
        }
        Command::Fingerprint { x } => fingerprint(&mut ctx, x),
        Command::Catalog(CatalogCommand::List) => Ok(catalog_list()),
        Command::Catalog(CatalogCommand::Emit { .. }) => unreachable!("handled above"),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(Failure::Invalid(o)) => o,
        Err(e) => return Err(e),
    };
    let mut report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command_name(&cli.command),
        "inputs": ctx.inputs,
    });
    if let Some(v) = &outcome.verdict {
        report["verdict"] = json!(v);
    }
    report["result"] = outcome.result;
    if cli.timing {
        report["wall_time_us"] = json!(start.elapsed().as_micros() as u64);
    }
    Ok((outcome.code, report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok((code, value)) => {
            let mut text = serde_json::to_string_pretty(&value).expect("reports serialize");
            text.push('\n');
            if let Some(out) = &cli.out {
                if let Err(e) = fs::write(out, &text) {
                    eprintln!("error: {}: {e}", out.display());
                    return ExitCode::from(2);
                }
            }
            let _ = io::stdout().write_all(text.as_bytes());
            ExitCode::from(code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invalid(_)) => unreachable!("invalid inputs become reports"),
    }
}
