//! Command-line front end. [`run`] takes the argument vector and output
//! streams so it can be driven from tests.
//!
//! Exit codes: 0 ok, 1 property false (inconsistent, not conforming, nothing
//! synthesized), 2 usage or parse error, 3 oracle limit.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::conformance::{self, semantic_conforms};
use crate::consistency::{self, ConsistencyReport};
use crate::dsl::{self, Parsed};
use crate::model::{Architecture, Cardinalities, Connector, Diagram, PortInstance};
use crate::oracle::{self, OracleError, DEFAULT_UNIVERSE_LIMIT, LIMIT_ENV};
use crate::synthesis::{self, SynthesisConstraints, SynthesisError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "archdia",
    version,
    about = "Architecture diagrams: consistency, synthesis and conformance"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Archa,
    Json,
    Dot,
}

#[derive(Debug, clap::Args)]
struct SynthArgs {
    /// Diagram file (.archd).
    diagram: PathBuf,
    /// Fix the cardinality of a type, `T=n`. Repeatable.
    #[arg(long = "cardinality", value_name = "T=n", value_parser = parse_cardinality)]
    cardinalities: Vec<(String, u32)>,
    /// Connector that must appear, as `id.port,id.port,...`. Repeatable.
    #[arg(long, value_name = "CONN", value_parser = parse_connector)]
    require: Vec<Connector>,
    /// Connector that must not appear. Repeatable.
    #[arg(long, value_name = "CONN", value_parser = parse_connector)]
    forbid: Vec<Connector>,
    /// Use the brute-force enumerator instead of synthesis.
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a diagram and decide its consistency.
    Check {
        diagram: PathBuf,
        /// Also confirm the verdict by brute force at every cardinality.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate conforming architectures.
    Synth {
        #[command(flatten)]
        args: SynthArgs,
        /// Emit at most K architectures.
        #[arg(long, value_name = "K")]
        limit: Option<usize>,
        /// Print only the number of architectures.
        #[arg(long)]
        count: bool,
        #[arg(long, value_enum, default_value = "archa")]
        out: OutFormat,
    },
    /// Count conforming architectures.
    Count {
        #[command(flatten)]
        args: SynthArgs,
    },
    /// Check an architecture against a diagram.
    Conform {
        architecture: PathBuf,
        diagram: PathBuf,
        /// Decide by trying every assignment of connectors to motifs.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        json: bool,
    },
    /// Export a diagram, or an architecture with `--diagram`, as DOT or JSON.
    Export {
        file: PathBuf,
        /// Diagram the architecture in FILE is resolved against.
        #[arg(long)]
        diagram: Option<PathBuf>,
        /// DOT output (the default).
        #[arg(long, conflicts_with = "json")]
        dot: bool,
        #[arg(long)]
        json: bool,
    },
}

fn parse_cardinality(s: &str) -> Result<(String, u32), String> {
    let (t, n) = s
        .split_once('=')
        .ok_or_else(|| format!("expected T=n, got `{s}`"))?;
    let n = n
        .trim()
        .parse()
        .map_err(|_| format!("bad cardinality `{n}`"))?;
    Ok((t.trim().to_string(), n))
}

/// `id.port,id.port,...`; whitespace around items is ignored.
pub fn parse_connector(s: &str) -> Result<Connector, String> {
    let mut ports = Vec::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (c, p) = item
            .split_once('.')
            .filter(|(c, p)| !c.is_empty() && !p.is_empty())
            .ok_or_else(|| format!("expected id.port, got `{item}`"))?;
        ports.push(PortInstance::new(c, p));
    }
    Connector::new(ports).map_err(|e| e.to_string())
}

/// Failure that ends a command with a given exit code.
struct Exit(i32, String);

impl From<SynthesisError> for Exit {
    fn from(e: SynthesisError) -> Self {
        Exit(EXIT_USAGE, e.to_string())
    }
}

impl From<OracleError> for Exit {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::MissingCardinality(_) => Exit(EXIT_USAGE, e.to_string()),
            _ => Exit(EXIT_LIMIT, e.to_string()),
        }
    }
}

impl From<dsl::ParseError> for Exit {
    fn from(e: dsl::ParseError) -> Self {
        let mut msg = e.to_string();
        for v in e.violations.iter().skip(1) {
            msg.push_str(&format!("\n  also: {v}"));
        }
        Exit(EXIT_USAGE, msg)
    }
}

fn read(path: &PathBuf) -> Result<String, Exit> {
    std::fs::read_to_string(path).map_err(|e| Exit(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn load_diagram(path: &PathBuf) -> Result<Diagram, Exit> {
    let text = read(path)?;
    Ok(dsl::parse_diagram_in(
        &text,
        Some(&path.display().to_string()),
    )?)
}

fn load_architecture(
    path: &PathBuf,
    d: &Diagram,
    err: &mut dyn Write,
) -> Result<Architecture, Exit> {
    let text = read(path)?;
    let Parsed { value, warnings } =
        dsl::parse_architecture_in(&text, d, Some(&path.display().to_string()))?;
    for w in warnings {
        let _ = writeln!(err, "{w}");
    }
    Ok(value)
}

fn oracle_limit() -> Result<usize, Exit> {
    match std::env::var(LIMIT_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Exit(
                EXIT_USAGE,
                format!("{LIMIT_ENV}: expected a non-negative integer, got `{v}`"),
            )
        }),
        Err(_) => Ok(DEFAULT_UNIVERSE_LIMIT),
    }
}

/// Runs the CLI and returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Check {
            diagram,
            oracle,
            json,
        } => cmd_check(&diagram, oracle, json, out),
        Command::Synth {
            args,
            limit,
            count,
            out: fmt,
        } => {
            let fmt = if args.json { OutFormat::Json } else { fmt };
            cmd_synth(&args, limit, count, fmt, out)
        }
        Command::Count { args } => cmd_synth(
            &args,
            None,
            true,
            if args.json {
                OutFormat::Json
            } else {
                OutFormat::Archa
            },
            out,
        ),
        Command::Conform {
            architecture,
            diagram,
            oracle,
            json,
        } => cmd_conform(&architecture, &diagram, oracle, json, out, err),
        Command::Export {
            file,
            diagram,
            json,
            ..
        } => cmd_export(&file, diagram.as_ref(), json, out, err),
    };
    match result {
        Ok(code) => code,
        Err(Exit(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn print_json(out: &mut dyn Write, v: &serde_json::Value) {
    let _ = writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(v).expect("json values serialize")
    );
}

fn fmt_cards(c: &Cardinalities) -> String {
    c.iter()
        .map(|(t, n)| format!("{t}={n}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn cmd_check(
    path: &PathBuf,
    use_oracle: bool,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32, Exit> {
    let d = load_diagram(path)?;
    let report = consistency::check(&d);

    let mut oracle_nonempty = None;
    if use_oracle {
        let limit = oracle_limit()?;
        let mut found = false;
        for cards in d.cardinality_assignments() {
            if !oracle::brute_force_with_limit(&d, &cards, limit)?.is_empty() {
                found = true;
                break;
            }
        }
        oracle_nonempty = Some(found);
    }

    if json {
        let mut v = json!({
            "diagram": d.name,
            "valid": true,
            "simple": crate::model::is_simple(&d),
            "report": report,
        });
        if let Some(found) = oracle_nonempty {
            v["oracle"] = json!({ "nonempty": found });
        }
        print_json(out, &v);
    } else {
        let _ = writeln!(out, "diagram {}: valid", d.name);
        write_report(out, &report);
        if let Some(found) = oracle_nonempty {
            let _ = writeln!(
                out,
                "oracle: {}",
                if found {
                    "a conforming architecture exists"
                } else {
                    "no conforming architecture"
                }
            );
        }
    }
    let consistent = oracle_nonempty.unwrap_or(report.consistent);
    Ok(if consistent { EXIT_OK } else { EXIT_FALSE })
}

fn write_report(out: &mut dyn Write, r: &ConsistencyReport) {
    if let Some(w) = &r.witness {
        let _ = writeln!(out, "consistent");
        let _ = writeln!(out, "  cardinalities: {}", fmt_cards(&w.cardinalities));
        for m in &w.motifs {
            let _ = writeln!(out, "  motif {}: {} connectors", m.motif, m.matching_factor);
            for p in &m.ports {
                let _ = writeln!(
                    out,
                    "    {}: n={} m={} d={} counts {}",
                    p.port, p.cardinality, p.multiplicity, p.degree, p.matching_factors
                );
            }
        }
    }
    if let Some(diag) = &r.diagnosis {
        let _ = writeln!(out, "inconsistent");
        let _ = writeln!(out, "  cardinalities: {}", fmt_cards(&diag.cardinalities));
        let _ = writeln!(out, "  {diag}");
    }
}

fn constraints(args: &SynthArgs) -> Result<SynthesisConstraints, Exit> {
    let cards: Cardinalities = args.cardinalities.iter().cloned().collect();
    Ok(
        SynthesisConstraints::new(args.require.iter().cloned(), args.forbid.iter().cloned())?
            .with_cardinalities(cards),
    )
}

/// Brute-force counterpart of `synthesis::enumerate_diagram`.
fn oracle_architectures(
    d: &Diagram,
    cons: &SynthesisConstraints,
) -> Result<Vec<Architecture>, Exit> {
    let limit = oracle_limit()?;
    for (t, &n) in cons.cardinalities() {
        match d.cardinality(t) {
            None => return Err(SynthesisError::UnknownType(t.clone()).into()),
            Some(iv) if !iv.contains(n) => {
                return Err(SynthesisError::CardinalityOutOfRange {
                    type_name: t.clone(),
                    n,
                    interval: iv,
                }
                .into())
            }
            _ => {}
        }
    }
    let mut all = Vec::new();
    for cards in d.cardinality_assignments() {
        if cons
            .cardinalities()
            .iter()
            .any(|(t, n)| cards.get(t) != Some(n))
        {
            continue;
        }
        for a in oracle::brute_force_with_limit(d, &cards, limit)? {
            if cons.required().iter().all(|c| a.configuration.contains(c))
                && !cons.forbidden().iter().any(|c| a.configuration.contains(c))
            {
                all.push(a);
            }
        }
    }
    all.sort_by(|a, b| a.shape_key().cmp(&b.shape_key()));
    for (k, a) in all.iter_mut().enumerate() {
        a.name = format!("{}_{}", d.name, k + 1);
    }
    Ok(all)
}

fn cmd_synth(
    args: &SynthArgs,
    limit: Option<usize>,
    count_only: bool,
    fmt: OutFormat,
    out: &mut dyn Write,
) -> Result<i32, Exit> {
    let d = load_diagram(&args.diagram)?;
    let cons = constraints(args)?;

    if count_only {
        let n = if args.oracle {
            oracle_architectures(&d, &cons)?.len() as u128
        } else {
            synthesis::count_configs(&d, &cons)?
        };
        if fmt == OutFormat::Json {
            print_json(out, &json!({ "diagram": d.name, "count": n.to_string() }));
        } else {
            let _ = writeln!(out, "{n}");
        }
        return Ok(if n == 0 { EXIT_FALSE } else { EXIT_OK });
    }

    let archs = if args.oracle {
        oracle_architectures(&d, &cons)?
    } else {
        synthesis::enumerate_diagram(&d, &cons)?
    };
    let total = archs.len();
    let shown = &archs[..limit.unwrap_or(total).min(total)];
    match fmt {
        OutFormat::Json => {
            let items: Vec<_> = shown
                .iter()
                .map(|a| {
                    json!({
                        "name": a.name,
                        "components": a.components,
                        "configuration": a.configuration,
                    })
                })
                .collect();
            print_json(
                out,
                &json!({ "diagram": d.name, "count": total, "architectures": items }),
            );
        }
        OutFormat::Archa => {
            for (k, a) in shown.iter().enumerate() {
                if k > 0 {
                    let _ = writeln!(out);
                }
                let _ = write!(out, "{}", dsl::print_architecture(a));
            }
        }
        OutFormat::Dot => {
            for a in shown {
                let _ = write!(out, "{}", dsl::export_dot_architecture(a));
            }
        }
    }
    Ok(if total == 0 { EXIT_FALSE } else { EXIT_OK })
}

fn cmd_conform(
    arch: &PathBuf,
    diagram: &PathBuf,
    use_oracle: bool,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Exit> {
    let d = load_diagram(diagram)?;
    let a = load_architecture(arch, &d, err)?;

    if use_oracle {
        let ok = semantic_conforms(&a, &d).map_err(|e| Exit(EXIT_LIMIT, e.to_string()))?;
        if json {
            print_json(
                out,
                &json!({ "architecture": a.name, "diagram": d.name, "conforms": ok }),
            );
        } else {
            let _ = writeln!(out, "{}", if ok { "conforms" } else { "does not conform" });
        }
        return Ok(if ok { EXIT_OK } else { EXIT_FALSE });
    }

    let v = conformance::verify(&a, &d);
    if json {
        print_json(
            out,
            &json!({ "architecture": a.name, "diagram": d.name, "verdict": v }),
        );
    } else if let Some(parts) = &v.partition {
        let path = match v.path {
            conformance::SearchPath::Greedy => "greedy",
            conformance::SearchPath::Backtracking => "backtracking",
        };
        let _ = writeln!(out, "conforms ({path})");
        for (j, part) in parts.iter().enumerate() {
            let _ = writeln!(out, "  motif {j}: {} connectors", part.len());
            for c in part {
                let _ = writeln!(out, "    {c}");
            }
        }
    } else if let Some(f) = &v.failure {
        let _ = writeln!(out, "does not conform");
        let _ = writeln!(out, "  stage: {}", f.stage);
        let _ = writeln!(
            out,
            "  {}: expected {}, found {}",
            f.entity, f.expected, f.actual
        );
    }
    Ok(if v.conforms { EXIT_OK } else { EXIT_FALSE })
}

fn cmd_export(
    file: &PathBuf,
    diagram: Option<&PathBuf>,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Exit> {
    match diagram {
        None => {
            let d = load_diagram(file)?;
            if json {
                print_json(out, &serde_json::to_value(&d).expect("diagrams serialize"));
            } else {
                let _ = write!(out, "{}", dsl::export_dot_diagram(&d));
            }
        }
        Some(dpath) => {
            let d = load_diagram(dpath)?;
            let a = load_architecture(file, &d, err)?;
            if json {
                let configs: BTreeSet<_> = [a.configuration.clone()].into();
                print_json(out, &dsl::configurations_json(&configs));
            } else {
                let _ = write!(out, "{}", dsl::export_dot_architecture(&a));
            }
        }
    }
    Ok(EXIT_OK)
}
