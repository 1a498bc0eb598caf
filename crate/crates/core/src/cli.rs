//! Batch front end: runs problem documents and renders reports.

use std::ffi::OsString;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value as Json};

use crate::cmap::{self, CMapElement, WedgeMode};
use crate::courant::verify_courant;
use crate::deform::{self, DeformationSeries};
use crate::document::{build_context, Command, Context, Mode, ProblemDocument, Side, Value};
use crate::error::{Error, Result};
use crate::module::MetricModule;
use crate::rothstein::RothElement;
use crate::symbol_map::{self, Membership};

pub const REPORT_SCHEMA: &str = "courant-cas-report/1";

#[derive(Clone, Debug, Default)]
pub struct Options {
    /// Coefficient-degree cap and probe depth used when a command gives none.
    pub truncation: Option<u32>,
    pub seed: u64,
    /// Include wall-clock runtimes (makes reports non-reproducible).
    pub timings: bool,
}

/// A finished run: the machine-readable report and the exit code
/// (0 all verifications pass, 1 a verification failed, 2 input error).
#[derive(Clone, Debug)]
pub struct Report {
    pub json: Json,
    pub exit_code: i32,
}

impl Report {
    fn input_error(e: &Error) -> Self {
        Report { json: json!({"schema": REPORT_SCHEMA, "status": "input-error", "error": e.to_string()}), exit_code: 2 }
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(&self.json).expect("serializable")
    }

    pub fn render_human(&self) -> String {
        let mut out = String::new();
        if let Some(e) = self.json.get("error") {
            out.push_str(&format!("input error: {}\n", e.as_str().unwrap_or_default()));
            return out;
        }
        for c in self.json["commands"].as_array().into_iter().flatten() {
            let op = c["op"].as_str().unwrap_or_default();
            let status = c["status"].as_str().unwrap_or_default();
            out.push_str(&format!("[{status}] {op}\n"));
            if let Some(obj) = c.as_object() {
                for (k, v) in obj {
                    if k == "op" || k == "status" {
                        continue;
                    }
                    let text = match v {
                        Json::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    out.push_str(&format!("    {k}: {text}\n"));
                }
            }
        }
        out.push_str(&format!("status: {}\n", self.json["status"].as_str().unwrap_or_default()));
        out
    }
}

/// Parses, validates and runs a document.
pub fn run_text(text: &str, opts: &Options) -> Report {
    match ProblemDocument::parse(text) {
        Ok(doc) => run_document(&doc, opts),
        Err(e) => Report::input_error(&e),
    }
}

pub fn run_document(doc: &ProblemDocument, opts: &Options) -> Report {
    let mut ctx = match build_context(doc, opts.seed) {
        Ok(c) => c,
        Err(e) => return Report::input_error(&e),
    };
    let mut results = Vec::new();
    let mut exit_code = 0;
    for cmd in &doc.commands {
        let start = Instant::now();
        let mut rec = match execute(&mut ctx, cmd, opts) {
            Ok(r) => r,
            Err(Error::Inconclusive(cap)) => {
                let mut r = Map::new();
                r.insert("status".into(), json!("inconclusive"));
                r.insert("cap".into(), json!(cap));
                r
            }
            Err(e) => {
                let mut r = Map::new();
                r.insert("status".into(), json!("error"));
                r.insert("error".into(), json!(e.to_string()));
                r
            }
        };
        let status = rec.get("status").and_then(Json::as_str).unwrap_or("ok").to_string();
        exit_code = exit_code.max(match status.as_str() {
            "ok" => 0,
            "error" => 2,
            _ => 1,
        });
        let mut full = Map::new();
        full.insert("op".into(), json!(op_name(cmd)));
        full.insert("status".into(), json!(status));
        rec.remove("status");
        full.extend(rec);
        if opts.timings {
            full.insert("runtime_ms".into(), json!(start.elapsed().as_secs_f64() * 1e3));
        }
        results.push(Json::Object(full));
    }
    let status = match exit_code {
        0 => "ok",
        1 => "failed",
        _ => "error",
    };
    Report { json: json!({"schema": REPORT_SCHEMA, "status": status, "commands": results}), exit_code }
}

fn op_name(c: &Command) -> &'static str {
    match c {
        Command::VerifyCourant { .. } => "verify-courant",
        Command::CmapVerify { .. } => "cmap-verify",
        Command::Bracket { .. } => "bracket",
        Command::Wedge { .. } => "wedge",
        Command::SymbolTower { .. } => "symbol-tower",
        Command::JMap { .. } => "j-map",
        Command::JInvert { .. } => "j-invert",
        Command::ChatMembership { .. } => "chat-membership",
        Command::Cohomology { .. } => "cohomology",
        Command::McExtend { .. } => "mc-extend",
        Command::CounterexampleSder => "counterexample-sder",
    }
}

fn verdict(ok: bool) -> Json {
    json!(if ok { "ok" } else { "failed" })
}

/// Tower entries in the document's own input layout.
pub fn cmap_json(m: &MetricModule, c: &CMapElement) -> Json {
    let alg = m.algebra();
    let entries: Vec<Json> = c
        .entries()
        .map(|(k, v)| {
            json!({
                "gens": k.gens.iter().map(|&g| alg.names()[g].clone()).collect::<Vec<_>>(),
                "args": k.args.iter().map(|&a| m.names()[a].clone()).collect::<Vec<_>>(),
                "value": alg.fmt(v),
            })
        })
        .collect();
    json!({"cmap": {"degree": c.degree(), "entries": entries}})
}

fn roth_json(m: &MetricModule, phi: &RothElement) -> Json {
    json!({"roth": phi.fmt(m)})
}

fn execute(ctx: &mut Context, cmd: &Command, opts: &Options) -> Result<Map<String, Json>> {
    let m = ctx.module().clone();
    let mut r = Map::new();
    match cmd {
        Command::VerifyCourant { target, probe_degree } => {
            let c = ctx.cmap(target)?;
            let rep = verify_courant(&m, &c, probe_degree.or(opts.truncation))?;
            r.insert("status".into(), verdict(rep.ok));
            r.insert("verdict".into(), json!(rep.ok));
            r.insert("bracket_route".into(), json!(rep.bracket_route));
            r.insert("axiom_route".into(), json!(rep.axiom_route));
            r.insert("routes_agree".into(), json!(rep.routes_agree()));
            r.insert("probe_degree".into(), json!(rep.probe_degree));
            r.insert("cmap_depth".into(), json!(rep.cmap.depth));
            r.insert("axiom_checks".into(), json!(rep.axiom_checks));
            if let Some(v) = rep.violation {
                r.insert("violation".into(), json!(v));
            }
        }
        Command::CmapVerify { target, depth } => {
            let c = ctx.cmap(target)?;
            let rep = cmap::verify(&m, &c, depth.or(opts.truncation))?;
            r.insert("status".into(), verdict(rep.ok));
            r.insert("verdict".into(), json!(rep.ok));
            r.insert("depth".into(), json!(rep.depth));
            r.insert("basis_checks".into(), json!(rep.basis_checks));
            r.insert("probe_checks".into(), json!(rep.probe_checks));
            if let Some(v) = rep.violation {
                r.insert("violation".into(), json!(v));
            }
        }
        Command::Bracket { lhs, rhs, side, store } | Command::Wedge { lhs, rhs, side, store, .. } => {
            let is_bracket = matches!(cmd, Command::Bracket { .. });
            let value = match side {
                Side::Cmap => {
                    let (a, b) = (ctx.cmap(lhs)?, ctx.cmap(rhs)?);
                    let c = if is_bracket {
                        cmap::bracket(&m, &a, &b)?
                    } else {
                        let mode = match cmd {
                            Command::Wedge { mode: Mode::Shuffle, .. } => WedgeMode::Shuffle,
                            _ => WedgeMode::Recursive,
                        };
                        cmap::wedge(&m, &a, &b, mode)?
                    };
                    r.insert("degree".into(), json!(c.degree()));
                    r.insert("is_zero".into(), json!(c.is_zero()));
                    r.insert("value".into(), cmap_json(&m, &c));
                    Value::Cmap(c)
                }
                Side::Rothstein => {
                    let ((a, da), (b, db)) = (ctx.roth(lhs)?, ctx.roth(rhs)?);
                    let phi = if is_bracket { ctx.ra.bracket(&a, &b)? } else { a.wedge(&b) };
                    let deg = da.or(a.degree()).zip(db.or(b.degree())).map(|(x, y)| if is_bracket { (x + y).saturating_sub(2) } else { x + y });
                    r.insert("is_zero".into(), json!(phi.is_zero()));
                    r.insert("value".into(), roth_json(&m, &phi));
                    Value::Roth(phi, deg)
                }
            };
            if let Some(name) = store {
                ctx.values.insert(name.clone(), value);
            }
        }
        Command::SymbolTower { target } => {
            let c = ctx.cmap(target)?;
            let tower = cmap::symbol_tower(&m, &c)?;
            let levels: Vec<Json> = tower
                .levels
                .iter()
                .enumerate()
                .flat_map(|(p, lvl)| {
                    let m = &m;
                    lvl.iter().filter(|(_, e)| !e.is_zero()).map(move |(g, e)| {
                        json!({
                            "level": p,
                            "gens": g.iter().map(|&i| m.algebra().names()[i].clone()).collect::<Vec<_>>(),
                            "element": cmap_json(m, e),
                        })
                    })
                })
                .collect();
            r.insert("depth".into(), json!(cmap::default_depth(&c)));
            r.insert("levels".into(), json!(levels));
        }
        Command::JMap { target, store } => {
            let c = ctx.cmap(target)?;
            r.insert("degree".into(), json!(c.degree()));
            r.insert("value".into(), cmap_json(&m, &c));
            if let Some(name) = store {
                ctx.values.insert(name.clone(), Value::Cmap(c));
            }
        }
        Command::JInvert { target, degree, store } => {
            if *degree != 3 {
                return Err(Error::Degree(format!("inversion is implemented in degree 3, not {degree}")));
            }
            let c = ctx.cmap(target)?;
            let phi = symbol_map::invert_j_deg3(&ctx.ra, &c)?;
            let round_trip = symbol_map::apply_j(&ctx.ra, &phi, 3)? == c;
            r.insert("status".into(), verdict(round_trip));
            r.insert("round_trip".into(), json!(round_trip));
            r.insert("value".into(), roth_json(&m, &phi));
            if let Some(name) = store {
                ctx.values.insert(name.clone(), Value::Roth(phi, Some(3)));
            }
        }
        Command::ChatMembership { target, cap } => {
            let c = ctx.cmap(target)?;
            membership_json(ctx, &c, cap.or(opts.truncation), &mut r)?;
        }
        Command::Cohomology { structure, r: rr, d } => {
            let cs = ctx.structure(structure)?;
            let table = deform::cohomology_dims(&cs, rr[0]..=rr[1], d[0]..=d[1])?;
            let mut squares_zero = true;
            for dd in d[0]..=d[1] {
                let h = deform::theta_degree(&cs)?;
                let mut prev = deform::block(&cs, rr[0], dd)?;
                for k in rr[0] + 1..=rr[1] {
                    let next = deform::block(&cs, k, dd + h * (k - rr[0]) as i64)?;
                    squares_zero &= prev.composes_to_zero(&next);
                    prev = next;
                }
            }
            r.insert("status".into(), verdict(squares_zero));
            r.insert("delta_squared_zero".into(), json!(squares_zero));
            r.insert(
                "table".into(),
                json!(table
                    .iter()
                    .map(|t| json!({"r": t.r, "d": t.d, "dim": t.dim, "chain_dim": t.chain_dim, "rank_in": t.rank_in, "rank_out": t.rank_out}))
                    .collect::<Vec<_>>()),
            );
        }
        Command::McExtend { structure, series, candidate } => {
            let cs = ctx.structure(structure)?;
            let terms = series.iter().map(|s| ctx.roth(s).map(|x| x.0)).collect::<Result<Vec<_>>>()?;
            let s = DeformationSeries { terms };
            let (obs, cocycle) = deform::mc_obstruction(&cs, &s)?;
            let accepted = deform::mc_extend(&cs, &s, &ctx.roth(candidate)?.0)?;
            r.insert("status".into(), verdict(accepted && cocycle));
            r.insert("order".into(), json!(s.order()));
            r.insert("obstruction".into(), roth_json(&m, &obs));
            r.insert("obstruction_is_cocycle".into(), json!(cocycle));
            r.insert("accepted".into(), json!(accepted));
        }
        Command::CounterexampleSder => {
            let (ra, c) = symbol_map::counterexample_sder()?;
            let mm = ra.module().clone();
            let rep = cmap::verify(&mm, &c, None)?;
            let sub = Context { ra, values: Default::default(), structure: None, weights: None };
            let mut inner = Map::new();
            membership_json(&sub, &c, None, &mut inner)?;
            let member = inner.get("member").and_then(Json::as_bool).unwrap_or(true);
            r.insert("status".into(), verdict(rep.ok && !member));
            r.insert("element".into(), cmap_json(&mm, &c));
            r.insert("in_c4".into(), json!(rep.ok));
            r.insert("in_image".into(), json!(member));
            if let Some(cert) = inner.remove("certificate") {
                r.insert("certificate".into(), cert);
            }
        }
    }
    Ok(r)
}

fn membership_json(ctx: &Context, c: &CMapElement, cap: Option<u32>, r: &mut Map<String, Json>) -> Result<()> {
    let m = ctx.module();
    match symbol_map::chat_membership(&ctx.ra, c, cap)? {
        Membership::Member(pre) => {
            r.insert("member".into(), json!(true));
            r.insert("preimage".into(), roth_json(m, &pre));
        }
        Membership::NonMember(cert) => {
            let alg = m.algebra();
            let rows: Vec<Json> = cert
                .residual
                .iter()
                .map(|(coord, q)| {
                    json!({
                        "gens": coord.key.gens.iter().map(|&g| alg.names()[g].clone()).collect::<Vec<_>>(),
                        "args": coord.key.args.iter().map(|&a| m.names()[a].clone()).collect::<Vec<_>>(),
                        "monomial": alg.fmt(&crate::poly::Poly::monomial(m.kind(), coord.mono.clone(), crate::scalar::Rational::one())),
                        "coefficient": q.to_string(),
                    })
                })
                .collect();
            r.insert("member".into(), json!(false));
            r.insert("certificate".into(), json!({"cap": cert.cap, "residual": rows, "value": cert.value.to_string()}));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
pub enum Format {
    #[default]
    Human,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "courant-cas", version, about = "Exact computations with Courant algebroids over polynomial algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Coefficient-degree cap and probe depth when a command gives none.
    #[arg(long, global = true)]
    pub truncation: Option<u32>,
    /// Seed for random elements declared in the document.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Add per-command runtimes to the report.
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct DocArg {
    /// Problem document (JSON).
    pub document: std::path::PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Runs the commands listed in the document.
    Run(DocArg),
    VerifyCourant {
        #[command(flatten)]
        doc: DocArg,
        #[arg(long, default_value = "m")]
        target: String,
        #[arg(long)]
        probe_degree: Option<u32>,
    },
    Bracket {
        #[command(flatten)]
        doc: DocArg,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        #[arg(long)]
        rothstein: bool,
    },
    Wedge {
        #[command(flatten)]
        doc: DocArg,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        #[arg(long)]
        shuffle: bool,
        #[arg(long)]
        rothstein: bool,
    },
    SymbolTower {
        #[command(flatten)]
        doc: DocArg,
        #[arg(long)]
        target: String,
    },
    JMap {
        #[command(flatten)]
        doc: DocArg,
        #[arg(long)]
        target: String,
    },
    JInvert {
        #[command(flatten)]
        doc: DocArg,
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 3)]
        degree: usize,
    },
    ChatMembership {
        #[command(flatten)]
        doc: DocArg,
        #[arg(long)]
        target: String,
        #[arg(long)]
        cap: Option<u32>,
    },
    Cohomology {
        #[command(flatten)]
        doc: DocArg,
        #[arg(long, default_value = "m")]
        structure: String,
        #[arg(long, num_args = 2, default_values_t = [0, 5])]
        r: Vec<usize>,
        #[arg(long, num_args = 2, default_values_t = [-3, 3], allow_negative_numbers = true)]
        d: Vec<i64>,
    },
    McExtend {
        #[command(flatten)]
        doc: DocArg,
        #[arg(long, default_value = "m")]
        structure: String,
        #[arg(long, value_delimiter = ',')]
        series: Vec<String>,
        #[arg(long)]
        candidate: String,
    },
    /// Builds the dual-number counterexample and decides its membership.
    CounterexampleSder,
}

const EMPTY_DOC: &str = r#"{"schema": "courant-cas/1", "algebra": {"kind": "dual-num"}, "module": {"basis": ["e"], "gram": [[1]]}}"#;

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let opts = Options { truncation: cli.truncation, seed: cli.seed, timings: cli.timings };
    let (path, command) = match cli.command {
        CliCommand::Run(d) => (Some(d.document), None),
        CliCommand::VerifyCourant { doc, target, probe_degree } => (Some(doc.document), Some(Command::VerifyCourant { target, probe_degree })),
        CliCommand::Bracket { doc, lhs, rhs, rothstein } => {
            (Some(doc.document), Some(Command::Bracket { lhs, rhs, side: if rothstein { Side::Rothstein } else { Side::Cmap }, store: None }))
        }
        CliCommand::Wedge { doc, lhs, rhs, shuffle, rothstein } => (
            Some(doc.document),
            Some(Command::Wedge {
                lhs,
                rhs,
                mode: if shuffle { Mode::Shuffle } else { Mode::Recursive },
                side: if rothstein { Side::Rothstein } else { Side::Cmap },
                store: None,
            }),
        ),
        CliCommand::SymbolTower { doc, target } => (Some(doc.document), Some(Command::SymbolTower { target })),
        CliCommand::JMap { doc, target } => (Some(doc.document), Some(Command::JMap { target, store: None })),
        CliCommand::JInvert { doc, target, degree } => (Some(doc.document), Some(Command::JInvert { target, degree, store: None })),
        CliCommand::ChatMembership { doc, target, cap } => (Some(doc.document), Some(Command::ChatMembership { target, cap })),
        CliCommand::Cohomology { doc, structure, r, d } => (Some(doc.document), Some(Command::Cohomology { structure, r: [r[0], r[1]], d: [d[0], d[1]] })),
        CliCommand::McExtend { doc, structure, series, candidate } => (Some(doc.document), Some(Command::McExtend { structure, series, candidate })),
        CliCommand::CounterexampleSder => (None, Some(Command::CounterexampleSder)),
    };
    let text = match &path {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("cannot read {}: {e}", p.display());
                return 2;
            }
        },
        None => EMPTY_DOC.to_string(),
    };
    let report = match ProblemDocument::parse(&text) {
        Ok(mut doc) => {
            if let Some(c) = command {
                doc.commands = vec![c];
            }
            run_document(&doc, &opts)
        }
        Err(e) => Report::input_error(&e),
    };
    let rendered = match cli.format {
        Format::Human => report.render_human(),
        Format::Json => report.render_json() + "\n",
    };
    // A closed pipe (e.g. `| head`) is not an error of the computation.
    let _ = std::io::Write::write_all(&mut std::io::stdout(), rendered.as_bytes());
    report.exit_code
}
