//! `quivermps`: Euler characteristics and Poincaré polynomials of quiver
//! moduli by four independent methods, plus identity checks and tables.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_integer::Integer;
use serde_json::{json, Value};

use quivermps::localization::{chi_trees, spanning_trees, stability_weight};
use quivermps::motive::{
    dual_mps_check, euler_char, hn_sst_class, motivic_mps_check, partition_form_check, poincare,
    satisfies_poincare_duality,
};
use quivermps::poly::{rat, rational_to_string, Poly};
use quivermps::quiver::{DimVector, Quiver, Refinement, Stability, VertexId};
use quivermps::report::{bipartite_report, int_json, quiver_report, rational_json, Method};
use quivermps::symfunc::{partitions, q_series_identity};
use quivermps::tropical::{
    mps_euler_terms, refinements, PieceCounting, TropicalCountKey, TropicalCounter,
};
use quivermps::vertex::{extract_n_trop, factorize, ks_operators, ks_operators_grouped};

#[derive(Parser)]
#[command(
    name = "quivermps",
    version,
    about = "Euler characteristics of quiver moduli, cross-checked by four methods"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Euler characteristic by the requested methods, with an agreement report.
    Chi(ChiArgs),
    /// Harder–Narasimhan invariants of an arbitrary quiver.
    Motive {
        #[command(subcommand)]
        what: MotiveCommand,
    },
    /// Batch identity checks; one pass/fail line per case.
    Verify {
        #[command(subcommand)]
        suite: VerifySuite,
    },
    /// Spanning-tree localization for one refinement.
    Localize {
        #[command(subcommand)]
        what: LocalizeCommand,
    },
    /// Ordered factorization in the tropical vertex group.
    Vertex {
        #[command(subcommand)]
        what: VertexCommand,
    },
    /// The `(2, 1^{2n+1})` family with per-refinement contributions.
    Table(TableArgs),
}

#[derive(Args)]
struct ChiArgs {
    #[arg(long, value_delimiter = ',')]
    p1: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    p2: Vec<u32>,
    /// `all` or a comma list of `hn`, `mps`, `tropical`, `vertex`.
    #[arg(long, default_value = "all")]
    method: String,
    /// Include wall-clock seconds per method.
    #[arg(long)]
    timings: bool,
    /// Quiver file; runs the Harder–Narasimhan method only.
    #[arg(long, requires = "dim", conflicts_with_all = ["p1", "p2"])]
    quiver: Option<PathBuf>,
    #[arg(long, requires = "quiver")]
    dim: Option<String>,
    #[arg(long, requires = "quiver")]
    theta: Option<String>,
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(Args)]
struct QuiverArgs {
    /// Quiver file `{"vertices":[{"id":..,"level":..}],"arrows":[[a,b]]}`.
    #[arg(long = "quiver")]
    file: PathBuf,
    /// Dimension vector as a comma list in vertex order or a JSON map.
    #[arg(long)]
    dim: String,
    /// Stability as a comma list or JSON map; defaults to 1 on vertices
    /// without incoming arrows and 0 elsewhere.
    #[arg(long)]
    theta: Option<String>,
}

impl QuiverArgs {
    fn load(&self) -> Result<(Quiver, Stability, DimVector)> {
        let text = fs::read_to_string(&self.file)
            .with_context(|| format!("reading {}", self.file.display()))?;
        let q = Quiver::from_json(&text)?;
        let d = DimVector::parse(&q, &self.dim)?;
        let s = match &self.theta {
            Some(t) => Stability::parse(&q, t, true)?,
            None => {
                let mut has_incoming = vec![false; q.vertex_count()];
                for &(_, b) in q.arrows() {
                    has_incoming[b] = true;
                }
                Stability::with_levels(has_incoming.iter().map(|&h| i64::from(!h)).collect())
            }
        };
        Ok((q, s, d))
    }
}

#[derive(Subcommand)]
enum MotiveCommand {
    /// Euler characteristic of the stable moduli.
    Chi(QuiverArgs),
    /// Poincaré polynomial in `t` (coefficient list) and the semistable class.
    Poincare(QuiverArgs),
}

#[derive(Subcommand)]
enum VerifySuite {
    /// The q-series identity behind the multiple-cover weights, for n ≤ max.
    #[command(alias = "q-series")]
    Lemma3 {
        #[arg(long, default_value_t = 8)]
        max_n: u32,
    },
    /// Motivic multiple-cover formula and its partition form at one vertex.
    Mps(VertexCheckArgs),
    /// Dual multiple-cover formula at one vertex.
    DualMps(VertexCheckArgs),
    /// Tropical counts equal stable spanning-tree counts on every refinement.
    Eulgw {
        #[arg(long, default_value_t = 9)]
        max_size: u32,
    },
    /// Repeated-piece normalization of the tropical recursion against the
    /// spanning-tree oracle, plus the unnormalized control case.
    TroprecConvention {
        #[arg(long, default_value_t = 9)]
        max_size: u32,
    },
}

#[derive(Args)]
struct VertexCheckArgs {
    #[command(flatten)]
    quiver: QuiverArgs,
    /// Vertex id, or `source` / `sink` for the unique such vertex.
    #[arg(long)]
    vertex: String,
}

#[derive(Args)]
struct RefinementArgs {
    #[arg(long, value_delimiter = ',')]
    p1: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    p2: Vec<u32>,
    /// Refinement such as `1+1;1,1,1`: parts split by `,`, weights by `+`.
    #[arg(long)]
    refinement: String,
}

impl RefinementArgs {
    fn parse(&self) -> Result<Refinement> {
        let r = Refinement::parse(&self.refinement)?;
        let (a, b) = r.parts();
        if !self.p1.is_empty() && !same_multiset(&a, &self.p1) {
            bail!("refinement {r} has side-1 parts {a:?}, not {:?}", self.p1);
        }
        if !self.p2.is_empty() && !same_multiset(&b, &self.p2) {
            bail!("refinement {r} has side-2 parts {b:?}, not {:?}", self.p2);
        }
        Ok(r)
    }
}

#[derive(Subcommand)]
enum LocalizeCommand {
    /// Number of stable spanning trees.
    Chi(RefinementArgs),
    /// Every spanning tree with its arrows and stability.
    Trees {
        #[command(flatten)]
        refinement: RefinementArgs,
        /// `json` for stdout, or a file path.
        #[arg(long)]
        emit: Option<String>,
    },
}

#[derive(Subcommand)]
enum VertexCommand {
    /// Slope-ordered walls of the product of the initial walls.
    Factorize {
        #[command(flatten)]
        refinement: RefinementArgs,
        /// One token per weight class instead of one per piece.
        #[arg(long)]
        grouped: bool,
        /// `json` for stdout, or a file path.
        #[arg(long)]
        emit: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, default_value_t = 3)]
    max_n: u32,
    /// Output file; format from `--format` or the extension.
    #[arg(long)]
    emit: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn same_multiset(a: &[u32], b: &[u32]) -> bool {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

fn parse_methods(text: &str) -> Result<Vec<Method>> {
    if text == "all" {
        return Ok(Method::ALL.to_vec());
    }
    text.split(',')
        .map(|m| m.trim().parse::<Method>().map_err(Into::into))
        .collect()
}

/// Prints a line to stdout; a closed pipe ends the process quietly.
fn say(text: impl std::fmt::Display) {
    let mut out = io::stdout().lock();
    if let Err(e) = writeln!(out, "{text}") {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("writing to stdout: {e}");
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

/// Writes to `target` (a path, or `json`/`-` for stdout).
fn emit(target: Option<&str>, text: &str) -> Result<()> {
    match target {
        None | Some("json") | Some("-") => say(text),
        Some(path) => {
            fs::write(path, format!("{text}\n")).with_context(|| format!("writing {path}"))?;
            eprintln!("wrote {path}");
        }
    }
    Ok(())
}

fn poly_json(p: &Poly) -> Value {
    Value::Array(p.coeffs().iter().map(rational_json).collect())
}

fn resolve_vertex(q: &Quiver, name: &str) -> Result<VertexId> {
    let role = match name {
        "source" => Some(true),
        "sink" => Some(false),
        _ => None,
    };
    let Some(want_source) = role else {
        let id = VertexId::named(name);
        q.index_of(&id)?;
        return Ok(id);
    };
    let n = q.vertex_count();
    let (mut incoming, mut outgoing) = (vec![false; n], vec![false; n]);
    for &(a, b) in q.arrows() {
        outgoing[a] = true;
        incoming[b] = true;
    }
    let found: Vec<usize> = (0..n)
        .filter(|&v| {
            if want_source {
                !incoming[v]
            } else {
                !outgoing[v]
            }
        })
        .collect();
    match found.as_slice() {
        [v] => Ok(q.id(*v).clone()),
        [] => bail!("quiver has no {name}"),
        _ => bail!(
            "quiver has {} vertices of kind {name}; name one explicitly",
            found.len()
        ),
    }
}

/// Prints one line per case and a summary; success iff every case passed.
struct Tally {
    passed: usize,
    total: usize,
}

impl Tally {
    fn new() -> Self {
        Self {
            passed: 0,
            total: 0,
        }
    }

    fn case(&mut self, ok: bool, label: impl std::fmt::Display) {
        self.total += 1;
        if ok {
            self.passed += 1;
        }
        say(format_args!("{} {label}", if ok { "pass" } else { "FAIL" }));
    }

    fn finish(self) -> ExitCode {
        say(format_args!(
            "{} of {} cases passed",
            self.passed, self.total
        ));
        if self.passed == self.total {
            ExitCode::SUCCESS
        } else {
            ExitCode::FAILURE
        }
    }
}

/// Coprime pairs of partitions with total size at most `max`.
fn coprime_partition_pairs(max: u32) -> Vec<(Vec<u32>, Vec<u32>)> {
    let mut out = Vec::new();
    for a in 1..max {
        for b in 1..=(max - a) {
            if a.gcd(&b) != 1 {
                continue;
            }
            for p1 in partitions(a) {
                for p2 in partitions(b) {
                    out.push((p1.parts().to_vec(), p2.parts().to_vec()));
                }
            }
        }
    }
    out
}

fn cmd_chi(args: &ChiArgs) -> Result<ExitCode> {
    let report = match &args.quiver {
        Some(file) => {
            let qa = QuiverArgs {
                file: file.clone(),
                dim: args.dim.clone().unwrap_or_default(),
                theta: args.theta.clone(),
            };
            let (q, s, d) = qa.load()?;
            quiver_report(&q, &s, &d)?
        }
        None => {
            if args.p1.is_empty() || args.p2.is_empty() {
                bail!("give --p1 and --p2, or --quiver with --dim");
            }
            bipartite_report(&args.p1, &args.p2, &parse_methods(&args.method)?)?
        }
    };
    let text = pretty(&report.to_json(args.timings));
    emit(args.emit.as_ref().and_then(|p| p.to_str()), &text)?;
    if report.agree() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("methods disagree");
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_motive(what: &MotiveCommand) -> Result<ExitCode> {
    let out = match what {
        MotiveCommand::Chi(qa) => {
            let (q, s, d) = qa.load()?;
            json!({ "dim": d.as_slice(), "theta": s.theta, "chi": int_json(&euler_char(&q, &s, &d)?) })
        }
        MotiveCommand::Poincare(qa) => {
            let (q, s, d) = qa.load()?;
            let p = poincare(&q, &s, &d)?;
            let class = hn_sst_class(&q, &s, &d)?;
            let f = class.as_rational_function();
            json!({
                "dim": d.as_slice(),
                "theta": s.theta,
                "poincare": p.coeffs().iter().map(int_json).collect::<Vec<_>>(),
                "duality": satisfies_poincare_duality(&q, &p, &d),
                "semistable_class": { "variable": "L", "numerator": poly_json(f.numer()), "denominator": poly_json(f.denom()) },
            })
        }
    };
    say(pretty(&out));
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(suite: &VerifySuite) -> Result<ExitCode> {
    let mut tally = Tally::new();
    match suite {
        VerifySuite::Lemma3 { max_n } => {
            for n in 1..=*max_n {
                let (l, r) = q_series_identity(n)?;
                tally.case(l == r, format!("q-series identity n={n}"));
            }
        }
        VerifySuite::Mps(args) => {
            let (q, s, d) = args.quiver.load()?;
            let i = resolve_vertex(&q, &args.vertex)?;
            tally.case(
                motivic_mps_check(&q, &s, &i, &d)?,
                format!("mps multiplicity form at {i}"),
            );
            tally.case(
                partition_form_check(&q, &s, &i, &d)?,
                format!("mps partition form at {i}"),
            );
        }
        VerifySuite::DualMps(args) => {
            let (q, s, d) = args.quiver.load()?;
            let i = resolve_vertex(&q, &args.vertex)?;
            tally.case(dual_mps_check(&q, &s, &i, &d)?, format!("dual-mps at {i}"));
        }
        VerifySuite::Eulgw { max_size } => {
            let mut trees: HashMap<TropicalCountKey, u64> = HashMap::new();
            let mut counter = TropicalCounter::new();
            for (p1, p2) in coprime_partition_pairs(*max_size) {
                let mut bad = Vec::new();
                let rs = refinements(&p1, &p2)?;
                for r in &rs {
                    let key = TropicalCountKey::of_refinement(r)?;
                    let t = match trees.get(&key) {
                        Some(&t) => t,
                        None => {
                            let t = chi_trees(r)?;
                            trees.insert(key.clone(), t);
                            t
                        }
                    };
                    let n = counter.count(&key);
                    if n != BigInt::from(t) {
                        bad.push(format!("{r}: tropical {n}, trees {t}"));
                    }
                }
                tally.case(
                    bad.is_empty(),
                    format!(
                        "eulgw {p1:?} {p2:?}: {} refinements{}",
                        rs.len(),
                        fmt_bad(&bad)
                    ),
                );
            }
        }
        VerifySuite::TroprecConvention { max_size } => {
            let mut seen: HashSet<TropicalCountKey> = HashSet::new();
            let mut counter = TropicalCounter::new();
            for (p1, p2) in coprime_partition_pairs(*max_size) {
                for r in refinements(&p1, &p2)? {
                    let key = TropicalCountKey::of_refinement(&r)?;
                    if !seen.insert(key.clone()) {
                        continue;
                    }
                    let terms = counter.breakdown(&key, PieceCounting::Normalized);
                    // Base cases have no decompositions.
                    let normalized: BigInt = if terms.is_empty() {
                        counter.count(&key)
                    } else {
                        terms.into_iter().map(|t| t.value).sum()
                    };
                    let t = chi_trees(&r)?;
                    let ok = normalized == BigInt::from(t) && counter.count(&key) == normalized;
                    tally.case(
                        ok,
                        format!("troprec {key}: normalized {normalized}, trees {t}"),
                    );
                }
            }
            let key = TropicalCountKey::of_refinement(&Refinement::parse("1+1;1,1,1")?)?;
            let mut sum = |mode| -> BigInt {
                counter
                    .breakdown(&key, mode)
                    .into_iter()
                    .map(|t| t.value)
                    .sum()
            };
            let (ordered, normalized) =
                (sum(PieceCounting::Ordered), sum(PieceCounting::Normalized));
            tally.case(
                ordered != normalized,
                format!("troprec control {key}: unnormalized {ordered} differs from normalized {normalized}"),
            );
        }
    }
    Ok(tally.finish())
}

fn fmt_bad(bad: &[String]) -> String {
    if bad.is_empty() {
        String::new()
    } else {
        format!(" ({})", bad.join("; "))
    }
}

fn cmd_localize(what: &LocalizeCommand) -> Result<ExitCode> {
    match what {
        LocalizeCommand::Chi(ra) => {
            let r = ra.parse()?;
            let total = spanning_trees(&r)?.len();
            let out = json!({ "refinement": r.to_string(), "trees": total, "chi": chi_trees(&r)? });
            say(pretty(&out));
        }
        LocalizeCommand::Trees {
            refinement,
            emit: target,
        } => {
            let r = refinement.parse()?;
            let trees = spanning_trees(&r)?;
            let listing: Vec<Value> = trees
                .iter()
                .map(|t| {
                    let arrows: Vec<Value> = t
                        .arrows
                        .iter()
                        .map(|&a| {
                            let (x, y) = t.support.quiver.arrows()[a];
                            json!([a, t.support.quiver.id(x).to_string(), t.support.quiver.id(y).to_string()])
                        })
                        .collect();
                    json!({ "arrows": arrows, "stable": t.datum().is_stable(), "weight": stability_weight(t) })
                })
                .collect();
            let stable = listing
                .iter()
                .filter(|v| v["stable"] == json!(true))
                .count();
            let out = json!({
                "refinement": r.to_string(),
                "quiver": trees.first().map(|t| t.support.quiver.to_json()),
                "count": trees.len(),
                "stable": stable,
                "trees": listing,
            });
            emit(target.as_deref(), &pretty(&out))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_vertex(what: &VertexCommand) -> Result<ExitCode> {
    let VertexCommand::Factorize {
        refinement,
        grouped,
        emit: target,
    } = what;
    let r = refinement.parse()?;
    let ops = if *grouped {
        ks_operators_grouped(&r)?
    } else {
        ks_operators(&r)?
    };
    let fact = factorize(&ops)?;
    let n = extract_n_trop(&fact, &r)?;
    let out = json!({
        "refinement": r.to_string(),
        "grouped": grouped,
        "n_trop": int_json(&n),
        "walls": fact.to_json(),
    });
    emit(target.as_deref(), &pretty(&out))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_table(args: &TableArgs) -> Result<ExitCode> {
    let mut rows = Vec::new();
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record([
        "n",
        "p1",
        "p2",
        "refinement",
        "count",
        "weight",
        "contribution",
    ])?;
    for n in 1..=args.max_n {
        let p1 = vec![2u32];
        let p2 = vec![1u32; 2 * n as usize + 1];
        let terms = mps_euler_terms(&p1, &p2)?;
        let mut total = rat(0, 1);
        let mut entries = Vec::new();
        for t in &terms {
            let c = t.contribution();
            total += &c;
            csv.write_record([
                n.to_string(),
                join(&p1),
                join(&p2),
                t.refinement.to_string(),
                t.count.to_string(),
                rational_to_string(&t.weight),
                rational_to_string(&c),
            ])?;
            entries.push(json!({
                "refinement": t.refinement.to_string(),
                "count": int_json(&t.count),
                "weight": rational_json(&t.weight),
                "contribution": rational_json(&c),
            }));
        }
        csv.write_record([
            n.to_string(),
            join(&p1),
            join(&p2),
            "total".into(),
            String::new(),
            String::new(),
            rational_to_string(&total),
        ])?;
        rows.push(
            json!({ "n": n, "p1": p1, "p2": p2, "total": rational_json(&total), "terms": entries }),
        );
    }
    let format = args
        .format
        .unwrap_or(match args.emit.as_deref().and_then(Path::extension) {
            Some(e) if e == "csv" => Format::Csv,
            _ => Format::Json,
        });
    let text = match format {
        Format::Json => pretty(&Value::Array(rows)),
        Format::Csv => String::from_utf8(csv.into_inner()?)?.trim_end().to_string(),
    };
    emit(args.emit.as_ref().and_then(|p| p.to_str()), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn join(p: &[u32]) -> String {
    p.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Chi(args) => cmd_chi(args),
        Command::Motive { what } => cmd_motive(what),
        Command::Verify { suite } => cmd_verify(suite),
        Command::Localize { what } => cmd_localize(what),
        Command::Vertex { what } => cmd_vertex(what),
        Command::Table(args) => cmd_table(args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
