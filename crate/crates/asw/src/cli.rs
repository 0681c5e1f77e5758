//! Command-line front end: one JSON job file in, one deterministic report out.

use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::degen_tree::{realize_degen_with, to_dot, validate_degen_with, DegenTree, TreeOptions};
use crate::error::{Error, Result};
use crate::ffseries::{BiElement, PrimeChar, ResidueSeries};
use crate::genus::{germ_genus_with, GenusOptions, GermGenusQuery};
use crate::torsor_p::{default_budget, lift_p, normalize_p, RingKind};
use crate::torsor_p2::{classify_boundary_p2, lift_degen_data, normalize_germ_p2, DegenDataP2, LiftParams};

/// Exit code for a tree that parses but fails validation.
pub const EXIT_INVALID: i32 = 5;
/// Exit code for unreadable or malformed input.
pub const EXIT_SCHEMA: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "asw", version, about = "Artin-Schreier-Witt normalization and degeneration data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Residue characteristic; overrides the value in the job file.
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// π-adic precision for inputs that do not carry one.
    #[arg(long, global = true)]
    pub pi_prec: Option<i64>,
    /// Follow the printed formulas where they disagree with the consistent reading.
    #[arg(long, global = true)]
    pub strict_paper: bool,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Include the decomposition rounds and tie comparisons of the rank-p² engine.
    #[arg(long, global = true)]
    pub tie_report: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integral model and degeneration type of X^p − X = a.
    NormalizeP { input: PathBuf },
    /// Case analysis of a rank-p² equation over a germ (or its boundary type).
    NormalizeP2 { input: PathBuf },
    /// Degeneration type over a formal boundary, rank p or p².
    ClassifyBoundary { input: PathBuf },
    /// Genus of a germ from its boundary data.
    Genus { input: PathBuf },
    /// Check a degeneration-data tree.
    ValidateTree {
        input: PathBuf,
        /// Also write a Graphviz rendering of the tree.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Build local models for a tree and certify their compatibility.
    RealizeTree { input: PathBuf },
    /// Lift degeneration data to an equation over the germ.
    Lift { input: PathBuf },
}

type Terms = Vec<((i64, i64), i64)>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NormalizePJob {
    #[serde(default)]
    p: Option<u32>,
    ring: RingKind,
    #[serde(default)]
    pi_prec: Option<i64>,
    rhs: Terms,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NormalizeP2Job {
    #[serde(default)]
    p: Option<u32>,
    #[serde(default = "germ")]
    ring: RingKind,
    #[serde(default)]
    pi_prec: Option<i64>,
    a1: Terms,
    a2: Terms,
}

fn germ() -> RingKind {
    RingKind::Germ
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum JobRank {
    P,
    P2,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassifyJob {
    #[serde(default)]
    p: Option<u32>,
    rank: JobRank,
    #[serde(default)]
    pi_prec: Option<i64>,
    a1: Terms,
    #[serde(default)]
    a2: Option<Terms>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LiftJob {
    #[serde(default)]
    p: Option<u32>,
    rank: JobRank,
    /// Rank p: reduced function and level.
    #[serde(default)]
    abar: Option<Vec<(i64, i64)>>,
    #[serde(default)]
    n: Option<i64>,
    /// Rank p²: payload and lift parameters.
    #[serde(default)]
    data: Option<DegenDataP2>,
    #[serde(default)]
    params: Option<LiftParams>,
}

#[derive(Debug, Serialize)]
struct Report {
    command: String,
    result: Value,
    provenance: Value,
    warnings: Vec<String>,
}

/// Outcome of a job: exit status plus the rendered report.
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

fn schema(e: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("schema: {e}"))
}

fn read_input(path: &PathBuf) -> Result<String> {
    let mut s = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut s).map_err(schema)?;
    } else {
        s = std::fs::read_to_string(path).map_err(|e| schema(format!("{}: {e}", path.display())))?;
    }
    Ok(s)
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(schema)
}

fn prime(cli: &Cli, job: Option<u32>) -> Result<PrimeChar> {
    let p = cli.p.or(job).ok_or_else(|| schema("missing p"))?;
    PrimeChar::new(p)
}

fn element(p: PrimeChar, terms: &Terms, ring: RingKind, pi_prec: Option<i64>) -> Result<BiElement> {
    let t = terms.iter().map(|&((i, j), c)| (i, j, c));
    match ring {
        RingKind::Boundary => Ok(BiElement::boundary(p, t, pi_prec)),
        RingKind::Germ => BiElement::germ(p, t, pi_prec),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

fn run_job(cli: &Cli) -> Result<(Report, i32)> {
    let mut warnings = Vec::new();
    let mut code = 0;
    let (name, result, provenance) = match &cli.command {
        Command::NormalizeP { input } => {
            let job: NormalizePJob = parse(&read_input(input)?)?;
            let p = prime(cli, job.p)?;
            let a = element(p, &job.rhs, job.ring, job.pi_prec.or(cli.pi_prec))?;
            let cover = normalize_p(&a, job.ring, default_budget(&a))?;
            let result = json!({
                "deg_type": to_value(&cover.deg_type),
                "group": to_value(&cover.group),
                "delta": cover.delta(),
                "integral_equations": cover.equations()?.to_string(),
                "special_fibre_equation": cover.special_fibre_equation(),
                "cover": to_value(&cover),
            });
            let prov = json!({
                "deg_type": "torsor_p::normalize_p (p-power stripping to a prime-to-p leading term)",
                "delta": "n(p−1) from the degeneration type",
                "integral_equations": "witt::torsor_equations on the normalized right-hand side",
            });
            ("normalize-p", result, prov)
        }
        Command::NormalizeP2 { input } => {
            let job: NormalizeP2Job = parse(&read_input(input)?)?;
            let p = prime(cli, job.p)?;
            let prec = job.pi_prec.or(cli.pi_prec);
            let a1 = element(p, &job.a1, job.ring, prec)?;
            let a2 = element(p, &job.a2, job.ring, prec)?;
            match job.ring {
                RingKind::Boundary => {
                    let t = classify_boundary_p2(&a1, &a2)?;
                    (
                        "normalize-p2",
                        json!({ "deg_type": to_value(&t), "display": t.to_string() }),
                        json!({ "deg_type": "torsor_p2::classify_boundary_p2" }),
                    )
                }
                RingKind::Germ => {
                    let mut out = normalize_germ_p2(&a1, &a2)?;
                    if out.tie {
                        warnings.push("tie between the two leading contributions; see the comparison".into());
                    }
                    if !cli.tie_report {
                        out.rounds.clear();
                        out.comparison = None;
                    }
                    let result = json!({
                        "case": to_value(&out.case),
                        "delta1": out.delta1,
                        "delta2": out.delta2,
                        "delta": out.delta,
                        "special_fibre_equations": out.special_fibre_equations.clone(),
                        "normalized": to_value(&out),
                    });
                    let prov = json!({
                        "case": "torsor_p2::normalize_germ_p2 (first-level normalization, then the second-level loop)",
                        "delta": "δ1 + δ2 from the two levels",
                    });
                    ("normalize-p2", result, prov)
                }
            }
        }
        Command::ClassifyBoundary { input } => {
            let job: ClassifyJob = parse(&read_input(input)?)?;
            let p = prime(cli, job.p)?;
            let prec = job.pi_prec.or(cli.pi_prec);
            let a1 = element(p, &job.a1, RingKind::Boundary, prec)?;
            match job.rank {
                JobRank::P => {
                    let cover = normalize_p(&a1, RingKind::Boundary, default_budget(&a1))?;
                    (
                        "classify-boundary",
                        json!({ "deg_type": to_value(&cover.deg_type), "display": cover.deg_type.to_string() }),
                        json!({ "deg_type": "torsor_p::normalize_boundary_p" }),
                    )
                }
                JobRank::P2 => {
                    let a2 = job.a2.as_ref().ok_or_else(|| schema("rank p² needs a2"))?;
                    let a2 = element(p, a2, RingKind::Boundary, prec)?;
                    let t = classify_boundary_p2(&a1, &a2)?;
                    (
                        "classify-boundary",
                        json!({ "deg_type": to_value(&t), "display": t.to_string() }),
                        json!({ "deg_type": "torsor_p2::classify_boundary_p2" }),
                    )
                }
            }
        }
        Command::Genus { input } => {
            let mut q: GermGenusQuery = parse(&read_input(input)?)?;
            if let Some(p) = cli.p {
                q.p = p;
            }
            let rep = germ_genus_with(&q, GenusOptions { strict_paper: cli.strict_paper })?;
            warnings.extend(rep.notes.iter().cloned());
            let prov = json!({ "g_y": rep.formula.clone(), "verdict": "genus::germ_genus criteria on g_y, thickness and branches" });
            ("genus", to_value(&rep), prov)
        }
        Command::ValidateTree { input, dot } => {
            let mut tree: DegenTree = parse(&read_input(input)?)?;
            if let Some(p) = cli.p {
                tree.p = PrimeChar::new(p)?;
            }
            let rep = validate_degen_with(&tree, TreeOptions { strict_paper: cli.strict_paper });
            if let Some(path) = dot {
                std::fs::write(path, to_dot(&tree)).map_err(|e| schema(format!("{}: {e}", path.display())))?;
            }
            if !rep.valid {
                code = EXIT_INVALID;
            }
            warnings.extend(rep.notes.iter().cloned());
            let prov = json!({
                "violations": "degen_tree::validate_degen, labels name the violated condition",
                "tree_genus": "sum over étale components of −2 plus conductor terms, times (p−1)/2",
            });
            ("validate-tree", to_value(&rep), prov)
        }
        Command::RealizeTree { input } => {
            let mut tree: DegenTree = parse(&read_input(input)?)?;
            if let Some(p) = cli.p {
                tree.p = PrimeChar::new(p)?;
            }
            let real = realize_degen_with(&tree, TreeOptions { strict_paper: cli.strict_paper })?;
            warnings.extend(real.certificate.notes.iter().cloned());
            let prov = json!({
                "models": "vertex lifts and catalogue equations at marked and double points",
                "certificate": "types recomputed on each shared boundary",
            });
            ("realize-tree", to_value(&real), prov)
        }
        Command::Lift { input } => {
            let job: LiftJob = parse(&read_input(input)?)?;
            let p = prime(cli, job.p)?;
            match job.rank {
                JobRank::P => {
                    let abar = job.abar.ok_or_else(|| schema("rank p needs abar"))?;
                    let n = job.n.ok_or_else(|| schema("rank p needs n"))?;
                    let abar = ResidueSeries::new(p, abar, None);
                    let (group, a, a_k) = lift_p(&abar, n, RingKind::Germ)?;
                    let result = json!({
                        "group": to_value(&group),
                        "integral_rhs": a.to_string(),
                        "generic_rhs": a_k.to_string(),
                        "delta": n * (p.pi64() - 1),
                    });
                    ("lift", result, json!({ "generic_rhs": "torsor_p::lift_p, a·π^{−np}" }))
                }
                JobRank::P2 => {
                    let data = job.data.ok_or_else(|| schema("rank p² needs data"))?;
                    let params = job.params.ok_or_else(|| schema("rank p² needs params"))?;
                    let lifted = lift_degen_data(&data, params)?;
                    let result = json!({
                        "a1": lifted.a1.to_string(),
                        "a2": lifted.a2.to_string(),
                        "predicted_delta1": lifted.predicted_delta1,
                        "predicted_delta2": lifted.predicted_delta2,
                        "lifted": to_value(&lifted),
                    });
                    ("lift", result, json!({ "lifted": "torsor_p2::lift_degen_data" }))
                }
            }
        }
    };
    Ok((Report { command: name.into(), result, provenance, warnings }, code))
}

fn render_text(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                render_text(x, &key, out);
            }
        }
        Value::Array(items) if !items.is_empty() => {
            for (i, x) in items.iter().enumerate() {
                render_text(x, &format!("{prefix}[{i}]"), out);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix}: {s}\n")),
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}

fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("serializable report") + "\n",
        Format::Text => {
            let mut s = String::new();
            render_text(report, "", &mut s);
            s
        }
    }
}

/// Run a parsed command line and render its report.
pub fn run(cli: &Cli) -> Outcome {
    let (value, code) = match run_job(cli) {
        Ok((rep, code)) => (to_value(&rep), code),
        Err(e) => {
            let code = match &e {
                Error::InvalidInput(msg) if msg.starts_with("schema:") => EXIT_SCHEMA,
                other => other.exit_code(),
            };
            (json!({ "error": e.to_string(), "exit_code": code }), code)
        }
    };
    Outcome { code, report: render(&value, cli.format) }
}

/// Entry point used by the binary: parse arguments, run, write the report.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_SCHEMA } else { 0 };
        }
    };
    let outcome = run(&cli);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.report) {
                eprintln!("cannot write {}: {e}", path.display());
                return EXIT_SCHEMA;
            }
        }
        None => print!("{}", outcome.report),
    }
    outcome.code
}
