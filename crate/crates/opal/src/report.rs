//! Command line entry point and the named check suite.
//!
//! Every command produces one or more [`Report`] values: a check name, the
//! parameters it ran with, a pass/fail/warning status, witness data, and the
//! wall time. Reports print as human-readable lines and, with `--json PATH`,
//! are written as a JSON document whose key order is canonical (alphabetical),
//! so serializing a parsed report reproduces the file byte for byte.
//!
//! Exit codes: 0 when every report passes, 1 when any report fails, 2 for
//! usage errors (bad flags, unreadable input, out-of-range parameters).

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::doldkan;
use crate::functorlab::{BaseCat, BaseKind};
use crate::mackey;
use crate::opcat::{self, DecoratedMap, Flavor};
use crate::operad::Operad;
use crate::passi::{self, MonoidSpec};
use crate::spans;
use crate::zmod::{bi, FgAbGroup, Int, ZHom};

/* # reports */

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Warning,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Warning => "WARNING",
        };
        f.write_str(s)
    }
}

/// Fields are declared in alphabetical order so the derived serialization
/// matches the canonical (BTreeMap) ordering of a re-serialized parse.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub parameters: Value,
    pub status: Status,
    pub wall_time_ms: u64,
    pub witnesses: Value,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Runs a check body, timing it and converting an error string into a
/// failing report instead of propagating it.
fn run_check<F>(name: &str, parameters: Value, body: F) -> Report
where
    F: FnOnce() -> Result<(Status, Value), String>,
{
    let started = Instant::now();
    let (status, witnesses) = match body() {
        Ok(pair) => pair,
        Err(msg) => (Status::Fail, json!({ "error": msg })),
    };
    Report {
        check: name.to_string(),
        parameters,
        status,
        wall_time_ms: started.elapsed().as_millis() as u64,
        witnesses,
    }
}

fn big(u: u128) -> Value {
    u64::try_from(u).map(Value::from).unwrap_or_else(|_| Value::String(u.to_string()))
}

fn int_value(x: &Int) -> Value {
    i64::try_from(x.clone()).map(Value::from).unwrap_or_else(|_| Value::String(x.to_string()))
}

fn group_value(g: &FgAbGroup) -> Value {
    json!({
        "rank": g.rank(),
        "torsion": g.torsion().iter().map(int_value).collect::<Vec<_>>(),
    })
}

fn print_report(r: &Report) {
    println!("{}: {} ({} ms)", r.check, r.status, r.wall_time_ms);
    if let Some(obj) = r.witnesses.as_object() {
        for (k, v) in obj {
            let s = serde_json::to_string(v).unwrap_or_default();
            if s.len() <= 500 {
                println!("  {k}: {s}");
            } else {
                println!("  {k}: [{} bytes of JSON]", s.len());
            }
        }
    }
}

/* # command line surface */

#[derive(Parser)]
#[command(
    name = "opal",
    version,
    about = "operad-decorated categories, span presentations and augmentation towers over exact integer arithmetic"
)]
struct Cli {
    /// Write the reports as a JSON document to this path.
    #[arg(long, value_name = "PATH", global = true)]
    json: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Operad construction and axiom sweeps.
    Operad {
        #[command(subcommand)]
        cmd: OperadCmd,
    },
    /// Decorated-map categories: composition and hom counting.
    Cat {
        #[command(subcommand)]
        cmd: CatCmd,
    },
    /// Span categories: composition laws and admissible subsets.
    Span {
        #[command(subcommand)]
        cmd: SpanCmd,
    },
    /// Collapse idempotents and the functor-category equivalence.
    Doldkan {
        #[command(subcommand)]
        cmd: DoldkanCmd,
    },
    /// Generator-relation presentations and their verification sweeps.
    Mackey {
        #[command(subcommand)]
        cmd: MackeyCmd,
    },
    /// Augmentation-power quotients of monoid, group and algebra rings.
    Passi {
        #[command(subcommand)]
        cmd: PassiCmd,
    },
    /// Aggregate suites over the named checks.
    Report {
        #[command(subcommand)]
        cmd: ReportCmd,
    },
}

#[derive(Subcommand)]
enum OperadCmd {
    /// Exhaustively check the operad axioms up to a total-arity bound.
    Validate {
        /// Builtin name (initial, com, as) or a path to a JSON table.
        #[arg(long)]
        operad: String,
        /// Total-arity bound for the sweep (default: min(max arity, 4)).
        #[arg(long)]
        bound: Option<usize>,
        /// Maximum arity to tabulate for builtin operads.
        #[arg(long, default_value_t = 4)]
        max_arity: usize,
    },
}

#[derive(Subcommand)]
enum CatCmd {
    /// Compose two decorated maps.
    Compose {
        /// "worked-example" runs the frozen composite and checks it byte for byte.
        #[arg(long)]
        preset: Option<String>,
        /// JSON file with {"outer": ..., "inner": ...} decorated maps.
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
        /// Operad for --input (builtin name or JSON table path).
        #[arg(long)]
        operad: Option<String>,
        #[arg(long, default_value_t = 4)]
        max_arity: usize,
    },
    /// Count decorated maps between two objects.
    Enum {
        /// s, gamma or omega.
        #[arg(long, default_value = "gamma")]
        flavor: String,
        #[arg(long)]
        operad: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        max_arity: usize,
    },
}

#[derive(Subcommand)]
enum SpanCmd {
    /// Compose spans, either from a file or as an associativity sweep.
    Compose {
        /// "associativity" checks unit and associativity laws on enumerated spans.
        #[arg(long)]
        preset: Option<String>,
        /// JSON file with {"outer": ..., "inner": ...} spans.
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
        #[arg(long, default_value = "com")]
        operad: String,
        /// Apex bound for the associativity enumeration.
        #[arg(long, default_value_t = 2)]
        bound: usize,
        /// Enumeration budget.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u128,
    },
    /// Count admissible subsets of a preset square.
    Adm {
        /// Only "presentation-square" is defined.
        #[arg(long)]
        preset: String,
        /// Size parameter of the square family.
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "com")]
        operad: String,
    },
}

#[derive(Subcommand)]
enum DoldkanCmd {
    /// Build the idempotent system on End([n]) and verify it.
    Idempotents {
        #[arg(long)]
        operad: String,
        #[arg(long)]
        n: usize,
    },
    /// Round-trip randomized functors through both composite equivalences.
    Roundtrip {
        #[arg(long)]
        operad: String,
        #[arg(long, default_value_t = 2)]
        bound: usize,
        /// Number of conjugated functors per operad.
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 17)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum MackeyCmd {
    /// Run every relation sweep on a presentation.
    Check {
        /// "tensor-square" loads the hand-built fixture.
        #[arg(long)]
        preset: Option<String>,
        /// JSON file holding a presentation.
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
        /// Operad for --input (builtin name or JSON table path).
        #[arg(long)]
        operad: Option<String>,
        #[arg(long, default_value_t = 4)]
        max_arity: usize,
        /// Hom budget for the exchange sweep.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u128,
    },
    /// Extract a presentation from a functor fixture and verify it.
    FromFunctor {
        /// span-linearization, tensor-square or monoid-points.
        #[arg(long)]
        preset: String,
        #[arg(long, default_value = "com")]
        operad: String,
        #[arg(long, default_value_t = 2)]
        bound: usize,
        /// Apex budget for the span category. Functor verification is
        /// quadratic in the hom-set sizes, which grow factorially with the
        /// apex over as; 3 keeps that affordable without losing generators.
        #[arg(long, default_value_t = 3)]
        apex: usize,
        /// Monoid for the monoid-points preset, e.g. cyclic:3 or trivial.
        #[arg(long)]
        monoid: Option<String>,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u128,
    },
    /// Specialize a presentation to its arity-two form and verify the laws.
    Quadratic {
        /// com (hand-built fixture) or as (extracted from a functor).
        #[arg(long, default_value = "com")]
        operad: String,
    },
}

#[derive(Subcommand)]
enum PassiCmd {
    /// Rank and torsion of an augmentation-power quotient.
    Rank {
        /// Monoid spec: free:R, gfree:R, cyclic:N, trivial, or a product with '*'.
        #[arg(long)]
        monoid: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        /// JSON file with {"monoid": ..., "n": ...}.
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
    },
    /// Compare the monoid-ring and group-ring hom objects.
    CompareMonGr {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        n: usize,
    },
    /// Compare the direct truncation with the ring-theoretic quotient.
    TnCheck {
        /// com or as.
        #[arg(long)]
        operad: String,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long)]
        n: usize,
        /// Word-length budget for the direct construction.
        #[arg(long, default_value_t = 3)]
        budget: usize,
    },
}

#[derive(Subcommand)]
enum ReportCmd {
    /// Run the named check suite (all checks by default).
    All {
        /// JSON file with {"checks": [names], "inject_fault": name}.
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
    },
}

/* # dispatch */

enum CliError {
    Usage(String),
}

fn usage<E: fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn cli_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let json_path = cli.json.clone();
    let reports = match dispatch(cli.cmd) {
        Ok(reports) => reports,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    for r in &reports {
        print_report(r);
    }
    let fails = reports.iter().filter(|r| r.status == Status::Fail).count();
    let warnings = reports.iter().filter(|r| r.status == Status::Warning).count();
    if reports.len() > 1 {
        println!(
            "{} checks: {} pass, {} fail, {} warning",
            reports.len(),
            reports.len() - fails - warnings,
            fails,
            warnings
        );
    }
    if let Some(path) = json_path {
        match write_reports(&path, &reports) {
            Ok(()) => println!("report written to {}", path.display()),
            Err(msg) => {
                eprintln!("error: {msg}");
                return 2;
            }
        }
    }
    if fails > 0 {
        1
    } else {
        0
    }
}

pub fn write_reports(path: &Path, reports: &[Report]) -> Result<(), String> {
    let doc = json!({ "format": "opal-report", "reports": reports });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?;
    fs::write(path, text + "\n").map_err(|e| format!("--json {}: {e}", path.display()))
}

fn dispatch(cmd: Cmd) -> Result<Vec<Report>, CliError> {
    match cmd {
        Cmd::Operad { cmd } => match cmd {
            OperadCmd::Validate { operad, bound, max_arity } => {
                cmd_operad_validate(&operad, bound, max_arity)
            }
        },
        Cmd::Cat { cmd } => match cmd {
            CatCmd::Compose { preset, input, operad, max_arity } => {
                cmd_cat_compose(preset.as_deref(), input.as_deref(), operad.as_deref(), max_arity)
            }
            CatCmd::Enum { flavor, operad, m, n, max_arity } => {
                cmd_cat_enum(&flavor, &operad, m, n, max_arity)
            }
        },
        Cmd::Span { cmd } => match cmd {
            SpanCmd::Compose { preset, input, operad, bound, budget } => {
                cmd_span_compose(preset.as_deref(), input.as_deref(), &operad, bound, budget)
            }
            SpanCmd::Adm { preset, k, operad } => cmd_span_adm(&preset, k, &operad),
        },
        Cmd::Doldkan { cmd } => match cmd {
            DoldkanCmd::Idempotents { operad, n } => cmd_doldkan_idempotents(&operad, n),
            DoldkanCmd::Roundtrip { operad, bound, count, seed } => {
                Ok(vec![check_roundtrips_for(&[&operad], bound, count, seed)])
            }
        },
        Cmd::Mackey { cmd } => match cmd {
            MackeyCmd::Check { preset, input, operad, max_arity, budget } => {
                cmd_mackey_check(preset.as_deref(), input.as_deref(), operad.as_deref(), max_arity, budget)
            }
            MackeyCmd::FromFunctor { preset, operad, bound, apex, monoid, budget } => {
                cmd_mackey_from_functor(&preset, &operad, bound, apex, monoid.as_deref(), budget)
            }
            MackeyCmd::Quadratic { operad } => cmd_mackey_quadratic(&operad),
        },
        Cmd::Passi { cmd } => match cmd {
            PassiCmd::Rank { monoid, n, input } => {
                cmd_passi_rank(monoid.as_deref(), n, input.as_deref())
            }
            PassiCmd::CompareMonGr { k, l, n } => cmd_passi_compare(k, l, n),
            PassiCmd::TnCheck { operad, m, l, n, budget } => {
                cmd_passi_tn(&operad, m, l, n, budget)
            }
        },
        Cmd::Report { cmd } => match cmd {
            ReportCmd::All { config } => cmd_report_all(config.as_deref()),
        },
    }
}

/* # shared input loading */

fn load_operad(spec: &str, max_arity: usize) -> Result<Operad, CliError> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("--operad {spec}: {e}")))?;
        Operad::from_json_str(&text).map_err(|e| CliError::Usage(format!("--operad {spec}: {e}")))
    } else {
        Operad::builtin(spec, max_arity)
            .map_err(|e| CliError::Usage(format!("--operad {spec}: {e}")))
    }
}

fn load_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("--input {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("--input {}: {e}", path.display())))
}

fn parse_flavor(text: &str) -> Result<Flavor, CliError> {
    match text {
        "s" => Ok(Flavor::S),
        "gamma" => Ok(Flavor::Gamma),
        "omega" => Ok(Flavor::Omega),
        other => Err(CliError::Usage(format!("--flavor {other}: expected s, gamma or omega"))),
    }
}

fn passi_degree_cap() -> Option<usize> {
    std::env::var("PASSI_MAX_DEGREE").ok().and_then(|s| s.parse().ok())
}

fn check_degree_cap(n: usize) -> Result<(), CliError> {
    if let Some(cap) = passi_degree_cap() {
        if n > cap {
            return Err(CliError::Usage(format!("--n {n} exceeds PASSI_MAX_DEGREE={cap}")));
        }
    }
    Ok(())
}

/* # operad commands */

fn cmd_operad_validate(
    spec: &str,
    bound: Option<usize>,
    max_arity: usize,
) -> Result<Vec<Report>, CliError> {
    let op = load_operad(spec, max_arity)?;
    let started = Instant::now();
    let rep = crate::operad::validate(&op, bound)
        .map_err(|e| CliError::Usage(format!("--bound: {e}")))?;
    let axioms: Vec<Value> = rep
        .checks
        .iter()
        .map(|c| json!({ "axiom": c.axiom, "ok": c.ok, "detail": c.detail }))
        .collect();
    let status = if rep.ok() { Status::Pass } else { Status::Fail };
    Ok(vec![Report {
        check: "operad-validate".into(),
        parameters: json!({ "operad": op.name(), "bound": bound, "max_arity": op.max_arity() }),
        status,
        wall_time_ms: started.elapsed().as_millis() as u64,
        witnesses: json!({ "axioms": axioms }),
    }])
}

/* # decorated-map commands */

fn cmd_cat_compose(
    preset: Option<&str>,
    input: Option<&Path>,
    operad: Option<&str>,
    max_arity: usize,
) -> Result<Vec<Report>, CliError> {
    match (preset, input) {
        (Some("worked-example"), None) => Ok(vec![check_worked_composition()]),
        (Some(other), None) => {
            Err(CliError::Usage(format!("--preset {other}: only worked-example is defined")))
        }
        (None, Some(path)) => {
            let spec = operad
                .ok_or_else(|| CliError::Usage("--input needs --operad".to_string()))?;
            let op = load_operad(spec, max_arity)?;
            let v = load_json(path)?;
            let outer = v
                .get("outer")
                .ok_or_else(|| CliError::Usage("--input: missing \"outer\"".to_string()))?;
            let inner = v
                .get("inner")
                .ok_or_else(|| CliError::Usage("--input: missing \"inner\"".to_string()))?;
            let outer = opcat::from_json(&op, outer).map_err(usage)?;
            let inner = opcat::from_json(&op, inner).map_err(usage)?;
            let started = Instant::now();
            let composite = opcat::compose(&op, &outer, &inner).map_err(usage)?;
            Ok(vec![Report {
                check: "cat-compose".into(),
                parameters: json!({ "operad": op.name(), "input": path.display().to_string() }),
                status: Status::Pass,
                wall_time_ms: started.elapsed().as_millis() as u64,
                witnesses: json!({ "composite": opcat::to_json(&op, &composite) }),
            }])
        }
        (None, None) => Err(CliError::Usage("cat compose needs --preset or --input".to_string())),
        (Some(_), Some(_)) => {
            Err(CliError::Usage("--preset and --input are mutually exclusive".to_string()))
        }
    }
}

fn cmd_cat_enum(
    flavor: &str,
    operad: &str,
    m: usize,
    n: usize,
    max_arity: usize,
) -> Result<Vec<Report>, CliError> {
    let fl = parse_flavor(flavor)?;
    let op = load_operad(operad, max_arity)?;
    let started = Instant::now();
    let count = opcat::count_hom(fl, &op, m, n).map_err(usage)?;
    let mut witnesses = json!({ "count": big(count) });
    let mut status = Status::Pass;
    if fl == Flavor::Gamma {
        let (gamma, sum) = doldkan::hom_count_identity(&op, m, n).map_err(usage)?;
        if gamma != sum {
            status = Status::Fail;
        }
        witnesses = json!({
            "count": big(count),
            "pointed_total": big(gamma),
            "surjection_sum": big(sum),
        });
    }
    Ok(vec![Report {
        check: "cat-enum".into(),
        parameters: json!({ "flavor": flavor, "operad": op.name(), "m": m, "n": n }),
        status,
        wall_time_ms: started.elapsed().as_millis() as u64,
        witnesses,
    }])
}

/* # span commands */

fn cmd_span_compose(
    preset: Option<&str>,
    input: Option<&Path>,
    operad: &str,
    bound: usize,
    budget: u128,
) -> Result<Vec<Report>, CliError> {
    let op = load_operad(operad, 4)?;
    match (preset, input) {
        (Some("associativity"), None) => {
            Ok(vec![span_associativity_check(&op, bound, budget)])
        }
        (Some(other), None) => {
            Err(CliError::Usage(format!("--preset {other}: only associativity is defined")))
        }
        (None, Some(path)) => {
            let v = load_json(path)?;
            let outer = v
                .get("outer")
                .ok_or_else(|| CliError::Usage("--input: missing \"outer\"".to_string()))?;
            let inner = v
                .get("inner")
                .ok_or_else(|| CliError::Usage("--input: missing \"inner\"".to_string()))?;
            let outer = spans::span_from_json(&op, outer).map_err(usage)?;
            let inner = spans::span_from_json(&op, inner).map_err(usage)?;
            let started = Instant::now();
            let composite = spans::compose_spans(&op, &outer, &inner).map_err(usage)?;
            Ok(vec![Report {
                check: "span-compose".into(),
                parameters: json!({ "operad": op.name(), "input": path.display().to_string() }),
                status: Status::Pass,
                wall_time_ms: started.elapsed().as_millis() as u64,
                witnesses: json!({ "composite": spans::span_to_json(&op, &composite) }),
            }])
        }
        (None, None) => Err(CliError::Usage("span compose needs --preset or --input".to_string())),
        (Some(_), Some(_)) => {
            Err(CliError::Usage("--preset and --input are mutually exclusive".to_string()))
        }
    }
}

fn span_associativity_check(op: &Operad, apex_bound: usize, budget: u128) -> Report {
    let params = json!({ "operad": op.name(), "apex_bound": apex_bound, "budget": big(budget) });
    let op = op.clone();
    run_check("span-associativity", params, move || {
        let all = spans::enumerate_spans(&op, 1, 1, apex_bound, budget).map_err(|e| e.to_string())?;
        let sample: Vec<_> = all.iter().take(6).collect();
        let id = spans::SpanMorphism::identity(&op, 1).map_err(|e| e.to_string())?;
        let mut units = 0usize;
        for s in &sample {
            let left = spans::compose_spans(&op, &id, s).map_err(|e| e.to_string())?;
            let right = spans::compose_spans(&op, s, &id).map_err(|e| e.to_string())?;
            if left.key() != s.key() || right.key() != s.key() {
                return Ok((Status::Fail, json!({ "unit_failure": s.key() })));
            }
            units += 1;
        }
        let mut triples = 0usize;
        for a in &sample {
            for b in &sample {
                for c in &sample {
                    let ab = spans::compose_spans(&op, a, b).map_err(|e| e.to_string())?;
                    let bc = spans::compose_spans(&op, b, c).map_err(|e| e.to_string())?;
                    let left = spans::compose_spans(&op, &ab, c).map_err(|e| e.to_string())?;
                    let right = spans::compose_spans(&op, a, &bc).map_err(|e| e.to_string())?;
                    if left.key() != right.key() {
                        return Ok((
                            Status::Fail,
                            json!({
                                "associativity_failure": [a.key(), b.key(), c.key()],
                            }),
                        ));
                    }
                    triples += 1;
                }
            }
        }
        Ok((
            Status::Pass,
            json!({ "spans": all.len(), "unit_checks": units, "triples": triples }),
        ))
    })
}

fn cmd_span_adm(preset: &str, k: usize, operad: &str) -> Result<Vec<Report>, CliError> {
    if preset != "presentation-square" {
        return Err(CliError::Usage(format!(
            "--preset {preset}: only presentation-square is defined"
        )));
    }
    let op = load_operad(operad, (k + 2).max(4))?;
    let params = json!({ "preset": preset, "k": k, "operad": op.name() });
    Ok(vec![run_check("span-adm", params, move || {
        let sq = spans::presentation_square(&op, k).map_err(|e| e.to_string())?;
        let subsets = spans::admissible_subsets(&sq).map_err(|e| e.to_string())?;
        let expected = 3usize.pow(k as u32 + 1) - 2;
        let status = if subsets.len() == expected { Status::Pass } else { Status::Fail };
        Ok((status, json!({ "count": subsets.len(), "expected": expected })))
    })])
}

/* # doldkan commands */

fn cmd_doldkan_idempotents(operad: &str, n: usize) -> Result<Vec<Report>, CliError> {
    let op = load_operad(operad, n.max(3) + 1)?;
    let params = json!({ "operad": op.name(), "n": n });
    Ok(vec![run_check("doldkan-idempotents", params, move || {
        let sys = doldkan::idempotents(&op, n).map_err(|e| e.to_string())?;
        let verified = doldkan::verify_idempotents(&op, &sys);
        let mut supports = serde_json::Map::new();
        for (subset, sum) in &sys.entries {
            let label = format!(
                "f_{{{}}}",
                subset.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            );
            let mut terms: Vec<(String, i64)> =
                sum.support().map(|(m, c)| (m.key(), c)).collect();
            terms.sort();
            supports.insert(
                label,
                Value::Array(terms.into_iter().map(|(k, c)| json!([k, c])).collect()),
            );
        }
        match verified {
            Ok(()) => Ok((Status::Pass, Value::Object(supports))),
            Err(e) => {
                supports.insert("failure".into(), Value::String(e.to_string()));
                Ok((Status::Fail, Value::Object(supports)))
            }
        }
    })])
}

/* # mackey commands */

fn sweep_presentation(
    p: &mackey::JanusPresentation,
    exchange_budget: u128,
) -> Result<mackey::PseudoMackeyCertificate, String> {
    let mut cert = p.check_horizontal_relations().map_err(|e| e.to_string())?;
    cert.merge(p.check_vertical_relations().map_err(|e| e.to_string())?);
    cert.merge(p.check_pseudo_mackey().map_err(|e| e.to_string())?);
    cert.merge(p.check_exchange(2, exchange_budget).map_err(|e| e.to_string())?);
    Ok(cert)
}

fn certificate_witnesses(cert: &mackey::PseudoMackeyCertificate) -> Value {
    let failures: Vec<&str> = cert.failures.iter().map(|f| f.name.as_str()).collect();
    json!({
        "verified": cert.verified.len(),
        "failures": failures,
    })
}

fn cmd_mackey_check(
    preset: Option<&str>,
    input: Option<&Path>,
    operad: Option<&str>,
    max_arity: usize,
    budget: u128,
) -> Result<Vec<Report>, CliError> {
    let (p, source) = match (preset, input) {
        (Some("tensor-square"), None) => {
            (mackey::tensor_square_presentation().map_err(usage)?, "tensor-square".to_string())
        }
        (Some(other), None) => {
            return Err(CliError::Usage(format!(
                "--preset {other}: only tensor-square is defined"
            )))
        }
        (None, Some(path)) => {
            let spec = operad
                .ok_or_else(|| CliError::Usage("--input needs --operad".to_string()))?;
            let op = load_operad(spec, max_arity)?;
            let v = load_json(path)?;
            let p = mackey::presentation_from_json(&op, &v).map_err(usage)?;
            (p, path.display().to_string())
        }
        (None, None) => {
            return Err(CliError::Usage("mackey check needs --preset or --input".to_string()))
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("--preset and --input are mutually exclusive".to_string()))
        }
    };
    let params = json!({ "source": source, "operad": p.op().name(), "bound": p.bound() });
    Ok(vec![run_check("mackey-check", params, move || {
        let cert = sweep_presentation(&p, budget)?;
        let status = if cert.holds() { Status::Pass } else { Status::Fail };
        Ok((status, certificate_witnesses(&cert)))
    })])
}

fn cyclic_table(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect()
}

fn cmd_mackey_from_functor(
    preset: &str,
    operad: &str,
    bound: usize,
    apex: usize,
    monoid: Option<&str>,
    budget: u128,
) -> Result<Vec<Report>, CliError> {
    let op = load_operad(operad, 4)?;
    let table = match preset {
        "monoid-points" => {
            let spec = monoid
                .ok_or_else(|| CliError::Usage("monoid-points needs --monoid".to_string()))?;
            match spec {
                "trivial" => Some(vec![vec![0]]),
                s => match s.strip_prefix("cyclic:").and_then(|t| t.parse::<usize>().ok()) {
                    Some(m) if m >= 1 => Some(cyclic_table(m)),
                    _ => {
                        return Err(CliError::Usage(format!(
                            "--monoid {s}: expected trivial or cyclic:N"
                        )))
                    }
                },
            }
        }
        "span-linearization" | "tensor-square" => None,
        other => {
            return Err(CliError::Usage(format!(
                "--preset {other}: expected span-linearization, tensor-square or monoid-points"
            )))
        }
    };
    let params = json!({ "preset": preset, "operad": op.name(), "bound": bound, "apex": apex });
    let preset = preset.to_string();
    Ok(vec![run_check("mackey-from-functor", params, move || {
        let cat =
            BaseCat::new(op, BaseKind::Span, bound, apex, budget).map_err(|e| e.to_string())?;
        let f = match preset.as_str() {
            "span-linearization" => mackey::span_linearization(&cat).map_err(|e| e.to_string())?,
            "tensor-square" => {
                let lin = mackey::span_linearization(&cat).map_err(|e| e.to_string())?;
                crate::functorlab::tensor_square(&lin).map_err(|e| e.to_string())?
            }
            _ => {
                let table = table.as_ref().expect("table was parsed with the preset");
                mackey::monoid_points_functor(&cat, table).map_err(|e| e.to_string())?
            }
        };
        let p = mackey::from_functor(&f).map_err(|e| e.to_string())?;
        let cert = sweep_presentation(&p, budget)?;
        let status = if cert.holds() { Status::Pass } else { Status::Fail };
        let mut w = certificate_witnesses(&cert);
        if let Some(obj) = w.as_object_mut() {
            obj.insert("presentation".into(), mackey::presentation_to_json(&p));
        }
        Ok((status, w))
    })])
}

fn cmd_mackey_quadratic(operad: &str) -> Result<Vec<Report>, CliError> {
    if operad != "com" && operad != "as" {
        return Err(CliError::Usage(format!("--operad {operad}: quadratic presets exist for com and as")));
    }
    let name = operad.to_string();
    let params = json!({ "operad": name });
    Ok(vec![run_check("mackey-quadratic", params, move || {
        let (q, hold) = quadratic_certificate(&name)?;
        let status = if hold { Status::Pass } else { Status::Fail };
        Ok((status, q))
    })])
}

/// Builds the arity-two specialization for com (hand-built fixture) or as
/// (extracted from the tensor square of the span linearization) and returns
/// its certificate summary along with whether every instance held.
fn quadratic_certificate(operad: &str) -> Result<(Value, bool), String> {
    let p = if operad == "com" {
        mackey::tensor_square_presentation().map_err(|e| e.to_string())?
    } else {
        // Apex 3: every generator span has apex at most 2, and functor
        // verification is quadratic in hom-set sizes, which grow factorially
        // with the apex over as.
        let op = Operad::builtin("as", 4).map_err(|e| e.to_string())?;
        let cat = BaseCat::new(op, BaseKind::Span, 2, 3, 1_000_000).map_err(|e| e.to_string())?;
        let lin = mackey::span_linearization(&cat).map_err(|e| e.to_string())?;
        let sq = crate::functorlab::tensor_square(&lin).map_err(|e| e.to_string())?;
        mackey::from_functor(&sq).map_err(|e| e.to_string())?
    };
    let q = p.quadratic_presentation().map_err(|e| e.to_string())?;
    let cert = &q.certificate;
    let php = cert.verified.iter().filter(|n| n.starts_with("quad-php")).count();
    let hph = cert.verified.iter().filter(|n| n.starts_with("quad-hph")).count();
    let failures: Vec<&str> = cert.failures.iter().map(|f| f.name.as_str()).collect();
    let hold = cert.holds() && php > 0 && hph > 0;
    let w = json!({
        "verified": cert.verified.len(),
        "php_instances": php,
        "hph_instances": hph,
        "failures": failures,
    });
    Ok((w, hold))
}

/* # passi commands */

fn monoid_from_value(v: &Value) -> Result<MonoidSpec, CliError> {
    if let Some(s) = v.as_str() {
        return MonoidSpec::parse(s).map_err(usage);
    }
    let kind = v
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| CliError::Usage("monoid object needs a \"kind\" field".to_string()))?;
    let rank = || {
        v.get("rank")
            .and_then(|r| r.as_u64())
            .map(|r| r as usize)
            .ok_or_else(|| CliError::Usage(format!("monoid kind {kind} needs a \"rank\" field")))
    };
    let table = || -> Result<Vec<Vec<usize>>, CliError> {
        v.get("table")
            .and_then(|t| t.as_array())
            .map(|rows| {
                rows.iter()
                    .map(|row| {
                        row.as_array()
                            .map(|xs| {
                                xs.iter()
                                    .map(|x| x.as_u64().map(|u| u as usize))
                                    .collect::<Option<Vec<_>>>()
                            })
                            .flatten()
                            .ok_or_else(|| {
                                CliError::Usage("table rows must be arrays of numbers".to_string())
                            })
                    })
                    .collect()
            })
            .unwrap_or_else(|| {
                Err(CliError::Usage(format!("monoid kind {kind} needs a \"table\" field")))
            })
    };
    match kind {
        "free" => Ok(MonoidSpec::free(rank()?)),
        "group_free" | "gfree" => Ok(MonoidSpec::group_free(rank()?)),
        "cyclic" => {
            let order = v
                .get("order")
                .and_then(|o| o.as_u64())
                .ok_or_else(|| CliError::Usage("cyclic needs an \"order\" field".to_string()))?;
            MonoidSpec::cyclic(order as usize).map_err(usage)
        }
        "finite" => MonoidSpec::finite(table()?).map_err(usage),
        "group_finite" => MonoidSpec::group_finite(table()?).map_err(usage),
        "product" => {
            let factors = v
                .get("factors")
                .and_then(|f| f.as_array())
                .ok_or_else(|| CliError::Usage("product needs a \"factors\" array".to_string()))?;
            let parsed: Result<Vec<_>, _> = factors.iter().map(monoid_from_value).collect();
            MonoidSpec::product(parsed?).map_err(usage)
        }
        other => Err(CliError::Usage(format!("unknown monoid kind {other}"))),
    }
}

fn cmd_passi_rank(
    monoid: Option<&str>,
    n: Option<usize>,
    input: Option<&Path>,
) -> Result<Vec<Report>, CliError> {
    let (spec, degree, source) = match (monoid, input) {
        (Some(text), None) => {
            let n = n.ok_or_else(|| CliError::Usage("passi rank needs --n".to_string()))?;
            (MonoidSpec::parse(text).map_err(usage)?, n, text.to_string())
        }
        (None, Some(path)) => {
            let v = load_json(path)?;
            let m = v
                .get("monoid")
                .ok_or_else(|| CliError::Usage("--input: missing \"monoid\"".to_string()))?;
            let spec = monoid_from_value(m)?;
            let degree = v
                .get("n")
                .and_then(|x| x.as_u64())
                .map(|x| x as usize)
                .or(n)
                .ok_or_else(|| CliError::Usage("--input: missing \"n\"".to_string()))?;
            (spec, degree, path.display().to_string())
        }
        (None, None) => {
            return Err(CliError::Usage("passi rank needs --monoid or --input".to_string()))
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("--monoid and --input are mutually exclusive".to_string()))
        }
    };
    check_degree_cap(degree)?;
    let started = Instant::now();
    let pg = passi::passi_group(&spec, degree).map_err(usage)?;
    Ok(vec![Report {
        check: "passi-rank".into(),
        parameters: json!({ "monoid": source, "n": degree }),
        status: Status::Pass,
        wall_time_ms: started.elapsed().as_millis() as u64,
        witnesses: group_value(pg.group()),
    }])
}

fn cmd_passi_compare(k: usize, l: usize, n: usize) -> Result<Vec<Report>, CliError> {
    check_degree_cap(n)?;
    let started = Instant::now();
    let rep = passi::compare_mon_gr(k, l, n).map_err(usage)?;
    let status = if rep.passed() { Status::Pass } else { Status::Fail };
    Ok(vec![Report {
        check: "passi-compare-mon-gr".into(),
        parameters: json!({ "k": k, "l": l, "n": n }),
        status,
        wall_time_ms: started.elapsed().as_millis() as u64,
        witnesses: json!({
            "dim": rep.matrix.rows,
            "unimodular": rep.unimodular,
            "composition_preserved": rep.composition_preserved,
            "signed_witness_ok": rep.signed_witness_ok,
            "identity_at_degree_one": rep.identity_at_degree_one,
        }),
    }])
}

fn cmd_passi_tn(
    operad: &str,
    m: usize,
    l: usize,
    n: usize,
    budget: usize,
) -> Result<Vec<Report>, CliError> {
    check_degree_cap(n)?;
    let started = Instant::now();
    match passi::tn_universal_check(operad, m, l, n, budget) {
        Ok(rep) => {
            let status = if rep.passed() { Status::Pass } else { Status::Fail };
            Ok(vec![Report {
                check: "passi-tn-check".into(),
                parameters: json!({ "operad": operad, "m": m, "l": l, "n": n, "budget": budget }),
                status,
                wall_time_ms: started.elapsed().as_millis() as u64,
                witnesses: json!({
                    "direct": group_value(&rep.direct),
                    "quotient": group_value(&rep.quotient),
                    "matches": rep.matches,
                }),
            }])
        }
        Err(passi::PassiError::NotStabilized { budget: used, next }) => Ok(vec![Report {
            check: "passi-tn-check".into(),
            parameters: json!({ "operad": operad, "m": m, "l": l, "n": n, "budget": budget }),
            status: Status::Fail,
            wall_time_ms: started.elapsed().as_millis() as u64,
            witnesses: json!({ "stabilized": false, "budget": used, "next_budget": next }),
        }]),
        Err(e) => Err(usage(e)),
    }
}

/* # the named check suite */

pub const CHECK_NAMES: [&str; 10] = [
    "worked-composition",
    "idempotent-systems",
    "hom-count-identity",
    "doldkan-roundtrips",
    "admissible-counts",
    "presentation-fixtures",
    "reduction-ranks",
    "mon-gr-comparison",
    "two-path-truncation",
    "quadratic-forms",
];

pub fn run_named_check(name: &str) -> Option<Report> {
    let r = match name {
        "worked-composition" => check_worked_composition(),
        "idempotent-systems" => check_idempotent_systems(),
        "hom-count-identity" => check_hom_count_identity(),
        "doldkan-roundtrips" => check_doldkan_roundtrips(),
        "admissible-counts" => check_admissible_counts(),
        "presentation-fixtures" => check_presentation_fixtures(),
        "reduction-ranks" => check_reduction_ranks(),
        "mon-gr-comparison" => check_mon_gr_comparison(),
        "two-path-truncation" => check_two_path_truncation(),
        "quadratic-forms" => check_quadratic_forms(),
        _ => return None,
    };
    Some(r)
}

#[derive(Deserialize)]
struct AllConfig {
    checks: Option<Vec<String>>,
    inject_fault: Option<String>,
}

fn cmd_report_all(config: Option<&Path>) -> Result<Vec<Report>, CliError> {
    let mut selected: Vec<String> = CHECK_NAMES.iter().map(|s| s.to_string()).collect();
    let mut fault: Option<String> = None;
    if let Some(path) = config {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
        let cfg: AllConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
        if let Some(checks) = cfg.checks {
            if checks.is_empty() {
                return Err(CliError::Usage(format!(
                    "--config {}: \"checks\" lists no checks",
                    path.display()
                )));
            }
            for c in &checks {
                if !CHECK_NAMES.contains(&c.as_str()) {
                    return Err(CliError::Usage(format!(
                        "--config {}: unknown check {c}",
                        path.display()
                    )));
                }
            }
            // Canonical ordering regardless of how the config lists them.
            selected = CHECK_NAMES
                .iter()
                .filter(|n| checks.iter().any(|c| c == *n))
                .map(|s| s.to_string())
                .collect();
        }
        fault = cfg.inject_fault;
    }
    let mut reports = Vec::new();
    for name in &selected {
        reports.push(run_named_check(name).expect("selection is validated"));
    }
    if let Some(name) = fault {
        reports.push(Report {
            check: name,
            parameters: json!({ "injected": true }),
            status: Status::Fail,
            wall_time_ms: 0,
            witnesses: json!({ "injected_fault": true }),
        });
    }
    Ok(reports)
}

/* # check bodies */

/// The frozen composition in the permutation-decorated category: composing a
/// six-point map over three points with a three-point map over two points,
/// with the block permutation and both output decorations pinned byte for
/// byte against hand-computed values.
pub fn check_worked_composition() -> Report {
    let params = json!({ "operad": "as" });
    run_check("worked-composition", params, || {
        let op = Operad::builtin("as", 6).map_err(|e| e.to_string())?;
        let dec = |arity: usize, label: &str| {
            op.parse_elem(arity, label).map_err(|e| e.to_string())
        };
        let outer = DecoratedMap::new(
            Flavor::S,
            &op,
            3,
            2,
            vec![2, 1, 2],
            vec![dec(1, "id_1")?, dec(2, "(12)")?],
        )
        .map_err(|e| e.to_string())?;
        let inner = DecoratedMap::new(
            Flavor::S,
            &op,
            6,
            3,
            vec![1, 2, 3, 3, 1, 3],
            vec![dec(2, "id_2")?, dec(1, "id_1")?, dec(3, "id_3")?],
        )
        .map_err(|e| e.to_string())?;
        let sigma = opcat::composition_block_perm(&outer, &inner, 2);
        let composite = opcat::compose(&op, &outer, &inner).map_err(|e| e.to_string())?;
        let got = opcat::to_json(&op, &composite).to_string();
        let expected = json!({
            "flavor": "s",
            "operad": "as",
            "map": [2, 1, 2, 2, 2, 2],
            "decoration": { "1": "id_1", "2": "(12354)" },
        })
        .to_string();
        let sigma_ok = sigma.word() == vec![1, 3, 4, 2, 5];
        let byte_exact = got == expected;
        let status = if sigma_ok && byte_exact { Status::Pass } else { Status::Fail };
        Ok((
            status,
            json!({
                "sigma": sigma.word(),
                "sigma_expected": [1, 3, 4, 2, 5],
                "composite": got,
                "expected": expected,
                "byte_exact": byte_exact,
            }),
        ))
    })
}

/// Orthogonality, completeness and the product formula for the collapse
/// idempotents over the initial, commutative and associative operads at
/// sizes up to three.
pub fn check_idempotent_systems() -> Report {
    let params = json!({ "operads": ["initial", "com", "as"], "n_max": 3 });
    run_check("idempotent-systems", params, || {
        let mut rows = Vec::new();
        let mut all_ok = true;
        for name in ["initial", "com", "as"] {
            let op = Operad::builtin(name, 4).map_err(|e| e.to_string())?;
            for n in 1..=3usize {
                let sys = doldkan::idempotents(&op, n).map_err(|e| e.to_string())?;
                let verified = doldkan::verify_idempotents(&op, &sys);
                let ok = verified.is_ok();
                all_ok &= ok;
                rows.push(json!({
                    "operad": name,
                    "n": n,
                    "entries": sys.entries.len(),
                    "ok": ok,
                    "detail": verified.err().map(|e| e.to_string()),
                }));
            }
        }
        let status = if all_ok { Status::Pass } else { Status::Fail };
        Ok((status, json!({ "instances": rows })))
    })
}

/// The pointed hom count equals the sum of surjective hom counts over all
/// pairs of pointed subsets, for both binary builtin operads at sizes up to
/// three.
pub fn check_hom_count_identity() -> Report {
    let params = json!({ "operads": ["com", "as"], "m_max": 3, "n_max": 3 });
    run_check("hom-count-identity", params, || {
        let mut rows = Vec::new();
        let mut all_ok = true;
        for name in ["com", "as"] {
            let op = Operad::builtin(name, 4).map_err(|e| e.to_string())?;
            for m in 0..=3usize {
                for n in 0..=3usize {
                    let (gamma, sum) =
                        doldkan::hom_count_identity(&op, m, n).map_err(|e| e.to_string())?;
                    let ok = gamma == sum;
                    all_ok &= ok;
                    rows.push(json!({
                        "operad": name,
                        "m": m,
                        "n": n,
                        "pointed_total": big(gamma),
                        "surjection_sum": big(sum),
                        "ok": ok,
                    }));
                }
            }
        }
        let status = if all_ok { Status::Pass } else { Status::Fail };
        Ok((status, json!({ "instances": rows })))
    })
}

/// Round-trips randomized functors through both composite equivalences,
/// requiring every natural-isomorphism component to be invertible with a
/// unimodular matrix.
pub fn check_doldkan_roundtrips() -> Report {
    check_roundtrips_for(&["com", "as"], 2, 10, 17)
}

fn check_roundtrips_for(operads: &[&str], bound: usize, count: usize, seed: u64) -> Report {
    let params = json!({ "operads": operads, "bound": bound, "count": count, "seed": seed });
    let operads: Vec<String> = operads.iter().map(|s| s.to_string()).collect();
    run_check("doldkan-roundtrips", params, move || {
        let mut rows = Vec::new();
        let mut all_ok = true;
        for name in &operads {
            let ocat = BaseCat::new(
                Operad::builtin(name, 4).map_err(|e| e.to_string())?,
                BaseKind::Omega,
                bound,
                0,
                10_000_000,
            )
            .map_err(|e| e.to_string())?;
            let gcat = BaseCat::new(
                Operad::builtin(name, 4).map_err(|e| e.to_string())?,
                BaseKind::Gamma,
                bound,
                0,
                10_000_000,
            )
            .map_err(|e| e.to_string())?;
            let rep1 = crate::functorlab::reduced_representable(&ocat, 1)
                .map_err(|e| e.to_string())?;
            let rep2 = crate::functorlab::reduced_representable(&ocat, 2)
                .map_err(|e| e.to_string())?;
            let lin = crate::functorlab::linear_functor(&gcat).map_err(|e| e.to_string())?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // `count` randomized functors per composite direction.
            for omega_side in [true, false] {
                let mut runs = 0usize;
                let mut unimodular = 0usize;
                for i in 0..count {
                    let (base, label) = if omega_side {
                        if i % 2 == 0 {
                            (&rep1, "representable-1")
                        } else {
                            (&rep2, "representable-2")
                        }
                    } else {
                        (&lin, "linear")
                    };
                    let (g, _) = crate::functorlab::conjugate_functor(base, &mut rng)
                        .map_err(|e| e.to_string())?;
                    let iso = if omega_side {
                        doldkan::roundtrip_omega(&g)
                    } else {
                        doldkan::roundtrip_gamma(&g)
                    }
                    .map_err(|e| format!("{name} {label} run {i}: {e}"))?;
                    let ok = iso
                        .components
                        .iter()
                        .all(|h: &ZHom| h.is_iso() && h.matrix().is_unimodular());
                    all_ok &= ok;
                    runs += 1;
                    if ok {
                        unimodular += 1;
                    }
                }
                let direction = if omega_side { "cr-after-extension" } else { "extension-after-cr" };
                rows.push(json!({
                    "operad": name,
                    "direction": direction,
                    "runs": runs,
                    "unimodular": unimodular,
                }));
            }
        }
        let status = if all_ok { Status::Pass } else { Status::Fail };
        Ok((status, json!({ "instances": rows })))
    })
}

/// Brute-force admissible-subset counts over the presentation-square family.
pub fn check_admissible_counts() -> Report {
    let params = json!({ "operad": "com", "k": [1, 2, 3] });
    run_check("admissible-counts", params, || {
        let op = Operad::builtin("com", 5).map_err(|e| e.to_string())?;
        let mut rows = Vec::new();
        let mut all_ok = true;
        for k in 1..=3usize {
            let sq = spans::presentation_square(&op, k).map_err(|e| e.to_string())?;
            let count = spans::admissible_subsets(&sq).map_err(|e| e.to_string())?.len();
            let expected = 3usize.pow(k as u32 + 1) - 2;
            let ok = count == expected;
            all_ok &= ok;
            rows.push(json!({ "k": k, "count": count, "expected": expected, "ok": ok }));
        }
        let status = if all_ok { Status::Pass } else { Status::Fail };
        Ok((status, json!({ "instances": rows })))
    })
}

/// Extracts presentations from six degree-bounded functor fixtures over the
/// two binary builtin operads and runs every relation sweep on each.
pub fn check_presentation_fixtures() -> Report {
    let params = json!({ "operads": ["com", "as"], "bound": 2, "fixtures": 6 });
    run_check("presentation-fixtures", params, || {
        let mut rows = Vec::new();
        let mut all_ok = true;
        for name in ["com", "as"] {
            let op = Operad::builtin(name, 4).map_err(|e| e.to_string())?;
            // Each fixture construction verifies functoriality over all
            // composable pairs, quadratic in hom-set sizes that grow fast
            // with the apex; apex 3 still holds every generator span.
            let cat = BaseCat::new(op, BaseKind::Span, 2, 3, 1_000_000)
                .map_err(|e| e.to_string())?;
            let lin = mackey::span_linearization(&cat).map_err(|e| e.to_string())?;
            let sq = crate::functorlab::tensor_square(&lin).map_err(|e| e.to_string())?;
            let tw = crate::functorlab::torsion_twist(&lin, 2).map_err(|e| e.to_string())?;
            for (label, f) in [
                ("span-linearization", &lin),
                ("tensor-square", &sq),
                ("torsion-twist-2", &tw),
            ] {
                let p = mackey::from_functor(f).map_err(|e| format!("{name} {label}: {e}"))?;
                let cert = sweep_presentation(&p, 1_000_000)
                    .map_err(|e| format!("{name} {label}: {e}"))?;
                let ok = cert.holds();
                all_ok &= ok;
                let failures: Vec<String> =
                    cert.failures.iter().map(|f| f.name.clone()).collect();
                rows.push(json!({
                    "operad": name,
                    "fixture": label,
                    "verified": cert.verified.len(),
                    "failures": failures,
                    "ok": ok,
                }));
            }
        }
        let status = if all_ok { Status::Pass } else { Status::Fail };
        Ok((status, json!({ "instances": rows })))
    })
}

/// Free-monoid quotient ranks, cyclic-group degree-one quotients with their
/// exact invariant factors, and the trivial cases.
pub fn check_reduction_ranks() -> Report {
    let params = json!({ "free": "r,n in 1..=3", "cyclic": "m in 1..=6 at n=1" });
    run_check("reduction-ranks", params, || {
        let mut rows = Vec::new();
        let mut all_ok = true;
        for r in 1..=3usize {
            for n in 1..=3usize {
                let pg = passi::passi_group(&MonoidSpec::free(r), n).map_err(|e| e.to_string())?;
                let expected: usize = (1..=n).map(|k| r.pow(k as u32)).sum();
                let ok = pg.group().rank() == expected && pg.group().torsion().is_empty();
                all_ok &= ok;
                rows.push(json!({
                    "monoid": format!("free:{r}"),
                    "n": n,
                    "rank": pg.group().rank(),
                    "expected": expected,
                    "ok": ok,
                }));
            }
        }
        for m in 1..=6usize {
            let spec = MonoidSpec::cyclic(m).map_err(|e| e.to_string())?;
            let pg = passi::passi_group(&spec, 1).map_err(|e| e.to_string())?;
            let (rank, torsion) = pg.group().invariant_factors();
            let ok = if m == 1 {
                rank == 0 && torsion.is_empty()
            } else {
                rank == 0 && torsion == vec![bi(m as i64)]
            };
            all_ok &= ok;
            rows.push(json!({
                "monoid": format!("cyclic:{m}"),
                "n": 1,
                "rank": rank,
                "torsion": torsion.iter().map(int_value).collect::<Vec<_>>(),
                "ok": ok,
            }));
        }
        let status = if all_ok { Status::Pass } else { Status::Fail };
        Ok((status, json!({ "instances": rows })))
    })
}

/// Groupification comparison matrices are unimodular with verified inverses,
/// and the monoid-ring to group-ring comparison preserves composition on the
/// pinned parameter set.
pub fn check_mon_gr_comparison() -> Report {
    let params = json!({
        "groupification": [[1, 1], [1, 2], [2, 2], [1, 3]],
        "compare": [[1, 1, 1], [1, 1, 2], [1, 2, 2], [2, 1, 2]],
    });
    run_check("mon-gr-comparison", params, || {
        let mut rows = Vec::new();
        let mut all_ok = true;
        for (rank, n) in [(1usize, 1usize), (1, 2), (2, 2), (1, 3)] {
            let rep = passi::groupification_iso_check(rank, n).map_err(|e| e.to_string())?;
            let ok = rep.passed();
            all_ok &= ok;
            rows.push(json!({
                "check": "groupification",
                "rank": rank,
                "n": n,
                "dim": rep.dim,
                "unimodular": rep.unimodular,
                "inverses_verified": rep.inverses_verified,
                "ok": ok,
            }));
        }
        for (k, l, n) in [(1usize, 1usize, 1usize), (1, 1, 2), (1, 2, 2), (2, 1, 2)] {
            let rep = passi::compare_mon_gr(k, l, n).map_err(|e| e.to_string())?;
            let ok = rep.passed();
            all_ok &= ok;
            rows.push(json!({
                "check": "compare-mon-gr",
                "k": k,
                "l": l,
                "n": n,
                "unimodular": rep.unimodular,
                "composition_preserved": rep.composition_preserved,
                "signed_witness_ok": rep.signed_witness_ok,
                "ok": ok,
            }));
        }
        let status = if all_ok { Status::Pass } else { Status::Fail };
        Ok((status, json!({ "instances": rows })))
    })
}

/// The direct truncation and the ring-theoretic quotient agree, with budget
/// stabilization, for both binary builtin operads at low degree.
pub fn check_two_path_truncation() -> Report {
    let params = json!({ "operads": ["com", "as"], "m": 1, "l": 1, "n_max": 2, "budget": 3 });
    run_check("two-path-truncation", params, || {
        let mut rows = Vec::new();
        let mut all_ok = true;
        for name in ["com", "as"] {
            for n in 0..=2usize {
                match passi::tn_universal_check(name, 1, 1, n, 3) {
                    Ok(rep) => {
                        let ok = rep.passed();
                        all_ok &= ok;
                        rows.push(json!({
                            "operad": name,
                            "n": n,
                            "direct": group_value(&rep.direct),
                            "quotient": group_value(&rep.quotient),
                            "ok": ok,
                        }));
                    }
                    Err(passi::PassiError::NotStabilized { budget, next }) => {
                        all_ok = false;
                        rows.push(json!({
                            "operad": name,
                            "n": n,
                            "stabilized": false,
                            "budget": budget,
                            "next_budget": next,
                            "ok": false,
                        }));
                    }
                    Err(e) => return Err(e.to_string()),
                }
            }
        }
        let status = if all_ok { Status::Pass } else { Status::Fail };
        Ok((status, json!({ "instances": rows })))
    })
}

/// The arity-two specialization over com (hand-built fixture) and as
/// (extracted): every instance of the composite laws holds and both reduced
/// law families are present.
pub fn check_quadratic_forms() -> Report {
    let params = json!({ "operads": ["com", "as"] });
    run_check("quadratic-forms", params, || {
        let mut rows = Vec::new();
        let mut all_ok = true;
        for name in ["com", "as"] {
            let (w, hold) = quadratic_certificate(name)?;
            all_ok &= hold;
            let mut row = json!({ "operad": name, "ok": hold });
            if let (Some(obj), Some(src)) = (row.as_object_mut(), w.as_object()) {
                for (k, v) in src {
                    obj.insert(k.clone(), v.clone());
                }
            }
            rows.push(row);
        }
        let status = if all_ok { Status::Pass } else { Status::Fail };
        Ok((status, json!({ "instances": rows })))
    })
}
