use std::io::{self, BufWriter, Write};
use std::ops::ControlFlow;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use chipfire::combinatorics::{contains_pattern, inversions, kappa, kd_catalan, lds};
use chipfire::search::{
    collect_stable, count_stable, enumerate_stable, max_inversions_search, max_lds_search, reachability_fuzz,
    verify_conjecture, ExtremalReport, Verdict,
};
use chipfire::tree::stabilize_traced;
use chipfire::{Configuration, EnumerationSpec, Error, FiringPlan, Mode, Permutation, Strategy, TreeParams};

/// Exit status when a search finds a counterexample or a fuzz escape.
const EXIT_FINDING: u8 = 3;
const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "chipfire", version, about = "Labeled chip-firing on directed k-ary trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// k-dimensional Catalan number C(k, m).
    Catalan {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u64,
    },
    /// Number of stable configurations for k^ell chips on a k-ary tree.
    Kappa {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        ell: u32,
    },
    /// Stabilize from the initial configuration under one strategy.
    Simulate(SimulateArgs),
    /// Enumerate stable configurations or search over them.
    Enumerate(EnumerateArgs),
    /// Inversions, LDS and pattern containment of a permutation.
    Analyze(AnalyzeArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    ell: u32,
    /// identity | unbundle | random:<seed> | embed:<n> | compose:<file>
    #[arg(long, default_value = "identity")]
    strategy: String,
    /// Print every firing in execution order.
    #[arg(long)]
    plan: bool,
    /// Print the configuration after every firing.
    #[arg(long)]
    dump: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EnumMode {
    List,
    Count,
    MaxInversions,
    MaxLds,
    Conjecture,
    Fuzz,
}

impl EnumMode {
    fn name(self) -> &'static str {
        match self {
            EnumMode::List => "list",
            EnumMode::Count => "count",
            EnumMode::MaxInversions => "max-inversions",
            EnumMode::MaxLds => "max-lds",
            EnumMode::Conjecture => "conjecture",
            EnumMode::Fuzz => "fuzz",
        }
    }

    fn search_mode(self) -> Mode {
        match self {
            EnumMode::List | EnumMode::Fuzz => Mode::Stream,
            EnumMode::Count => Mode::Count,
            EnumMode::MaxInversions => Mode::MaxInversions,
            EnumMode::MaxLds | EnumMode::Conjecture => Mode::MaxLds,
        }
    }
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    ell: u32,
    #[arg(long, value_enum, default_value = "count")]
    mode: EnumMode,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Stop listing after this many permutations.
    #[arg(long)]
    limit: Option<u64>,
    /// Ignore the size guard.
    #[arg(long)]
    force: bool,
    /// Disable branch-and-bound in LDS searches.
    #[arg(long)]
    no_prune: bool,
    /// Master seed for fuzz mode.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of fuzz trials.
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Permutation as space- or comma-separated values.
    values: Vec<String>,
    /// Read the permutation from a file instead.
    #[arg(long, conflicts_with = "values")]
    file: Option<PathBuf>,
    /// Pattern to search for.
    #[arg(long, num_args = 1..)]
    pattern: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = match cli.command {
        Command::Catalan { k, m } => cmd_catalan(&mut out, k, m),
        Command::Kappa { k, ell } => cmd_kappa(&mut out, k, ell),
        Command::Simulate(args) => cmd_simulate(&mut out, args),
        Command::Enumerate(args) => cmd_enumerate(&mut out, args),
        Command::Analyze(args) => cmd_analyze(&mut out, args),
    };
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(code), Ok(())) => code,
        (Err(e), _) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
        (_, Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{0}")]
    Usage(String),
}

type CliResult = Result<ExitCode, CliError>;

fn cmd_catalan(out: &mut impl Write, k: u32, m: u64) -> CliResult {
    if k == 0 {
        return Err(Error::InvalidBranching(0).into());
    }
    writeln!(out, "{}", kd_catalan(k, m))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_kappa(out: &mut impl Write, k: u32, ell: u32) -> CliResult {
    TreeParams::new(k, 0)?;
    writeln!(out, "{}", kappa(k, ell)?)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_strategy(name: &str) -> Result<Strategy, CliError> {
    match name.strip_prefix("compose:") {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            Ok(Strategy::parse_compose_spec(&text)?)
        }
        None => Ok(Strategy::from_name(name)?),
    }
}

fn plan_json(plan: &FiringPlan) -> Value {
    plan.events
        .iter()
        .map(|e| json!({"vertex": e.vertex.index(), "tuple": e.tuple}))
        .collect()
}

fn cmd_simulate(out: &mut impl Write, args: SimulateArgs) -> CliResult {
    if args.format == Format::Csv {
        return Err(CliError::Usage("simulate supports text and json output".into()));
    }
    let params = TreeParams::new(args.k, args.ell)?;
    let strategy = parse_strategy(&args.strategy)?;
    let initial = Configuration::initial(params);
    let mut dumps = Vec::new();
    let run = stabilize_traced(&initial, &strategy, |event, cfg| {
        if args.dump {
            dumps.push((event.to_string(), cfg.dump()));
        }
    })?;

    if args.format == Format::Json {
        let mut doc = json!({
            "version": SCHEMA_VERSION,
            "k": args.k,
            "ell": args.ell,
            "strategy": strategy.name(),
            "permutation": run.permutation.as_slice(),
        });
        if args.plan {
            doc["plan"] = plan_json(&run.plan);
        }
        if args.dump {
            doc["dump"] = dumps
                .iter()
                .map(|(e, d)| json!({"event": e, "configuration": d}))
                .collect();
        }
        writeln!(out, "{doc}")?;
        return Ok(ExitCode::SUCCESS);
    }

    if args.dump {
        write!(out, "initial\n{}", initial.dump())?;
        for (event, dump) in &dumps {
            write!(out, "fire {event}\n{dump}")?;
        }
    }
    if args.plan {
        write!(out, "{}", run.plan)?;
    }
    writeln!(out, "{}", run.permutation)?;
    Ok(ExitCode::SUCCESS)
}

fn spec_for(args: &EnumerateArgs) -> Result<EnumerationSpec, CliError> {
    let params = TreeParams::new(args.k, args.ell)?;
    let mut spec = EnumerationSpec::new(params, args.mode.search_mode())
        .workers(args.jobs)
        .force(args.force)
        .prune(!args.no_prune)
        .max_configs_from_env()?;
    if let Some(limit) = args.limit {
        spec = spec.limit(limit);
    }
    Ok(spec)
}

fn report_json(args: &EnumerateArgs, r: &ExtremalReport, ms: u128) -> Value {
    json!({
        "version": SCHEMA_VERSION,
        "k": args.k,
        "ell": args.ell,
        "mode": args.mode.name(),
        "statistic": r.statistic.name(),
        "value": r.value,
        "witness": r.witness.as_slice(),
        "closed_form": r.closed_form,
        "digit_reversal_value": r.digit_reversal_value,
        "explored": r.explored,
        "pruned": r.pruned,
        "duration_ms": ms,
    })
}

const REPORT_CSV_HEADER: &str = "version,k,ell,mode,value,closed_form,verdict,explored,pruned,duration_ms,witness";

fn csv_row(doc: &Value) -> String {
    let field = |key: &str| match &doc[key] {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
        v => v.to_string(),
    };
    REPORT_CSV_HEADER.split(',').map(field).collect::<Vec<_>>().join(",")
}

fn emit(out: &mut impl Write, format: Format, doc: &Value, text: &str) -> io::Result<()> {
    match format {
        Format::Json => writeln!(out, "{doc}"),
        Format::Csv => writeln!(out, "{REPORT_CSV_HEADER}\n{}", csv_row(doc)),
        Format::Text => write!(out, "{text}"),
    }
}

fn report_text(r: &ExtremalReport) -> String {
    format!(
        "value {}\nwitness {}\nclosed_form {}\ndigit_reversal {}\nexplored {}\npruned {}\n",
        r.value, r.witness, r.closed_form, r.digit_reversal_value, r.explored, r.pruned
    )
}

fn cmd_enumerate(out: &mut impl Write, args: EnumerateArgs) -> CliResult {
    let spec = spec_for(&args)?;
    let started = Instant::now();
    let elapsed = |s: Instant| s.elapsed().as_millis();

    match args.mode {
        EnumMode::List => {
            let total = kappa(args.k, args.ell)?;
            if total > spec.max_configs.into() && !(args.force && args.limit.is_some()) {
                return Err(CliError::Usage(format!(
                    "listing {total} permutations needs --force and --limit; use --mode count instead"
                )));
            }
            match args.format {
                Format::Json => {
                    let perms: Vec<Vec<u32>> = collect_stable(&spec)?
                        .into_iter()
                        .map(|p| p.as_slice().to_vec())
                        .collect();
                    let doc = json!({
                        "version": SCHEMA_VERSION,
                        "k": args.k,
                        "ell": args.ell,
                        "mode": "list",
                        "value": perms.len(),
                        "permutations": perms,
                        "closed_form": total.to_string(),
                        "duration_ms": elapsed(started),
                    });
                    writeln!(out, "{doc}")?;
                }
                format => {
                    let csv = format == Format::Csv;
                    if csv {
                        writeln!(out, "index,permutation")?;
                    }
                    let mut index = 0u64;
                    let mut failure = None;
                    enumerate_stable(&spec, |p| {
                        index += 1;
                        let line = p.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
                        let written = if csv {
                            writeln!(out, "{index},{line}")
                        } else {
                            writeln!(out, "{line}")
                        };
                        match written {
                            Ok(()) => ControlFlow::Continue(()),
                            Err(e) => {
                                failure = Some(e);
                                ControlFlow::Break(())
                            }
                        }
                    })?;
                    if let Some(e) = failure {
                        return Err(e.into());
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        EnumMode::Count => {
            let count = count_stable(&spec)?;
            let closed = kappa(args.k, args.ell)?;
            let doc = json!({
                "version": SCHEMA_VERSION,
                "k": args.k,
                "ell": args.ell,
                "mode": "count",
                "value": count,
                "closed_form": closed.to_string(),
                "duration_ms": elapsed(started),
            });
            emit(out, args.format, &doc, &format!("{count}\n"))?;
            Ok(ExitCode::SUCCESS)
        }
        EnumMode::MaxInversions | EnumMode::MaxLds => {
            let r = if args.mode == EnumMode::MaxInversions {
                max_inversions_search(&spec)?
            } else {
                max_lds_search(&spec)?
            };
            let doc = report_json(&args, &r, elapsed(started));
            emit(out, args.format, &doc, &report_text(&r))?;
            Ok(ExitCode::SUCCESS)
        }
        EnumMode::Conjecture => {
            let r = verify_conjecture(&spec)?;
            let verdict = match r.verdict {
                Verdict::Consistent => "CONSISTENT",
                Verdict::Violated => "VIOLATED",
            };
            let mut doc = report_json(&args, &r.search, elapsed(started));
            doc["verdict"] = json!(verdict);
            let mut text = format!("{verdict}: {} <= {}\n", r.search.value, r.z_value);
            if r.verdict == Verdict::Violated {
                text = format!("{verdict}: {} > {}\n", r.search.value, r.z_value);
            }
            text.push_str(&report_text(&r.search));
            if let Some(plan) = &r.witness_plan {
                doc["plan"] = plan_json(plan);
                text.push_str(&format!("plan\n{plan}"));
            }
            emit(out, args.format, &doc, &text)?;
            Ok(match r.verdict {
                Verdict::Consistent => ExitCode::SUCCESS,
                Verdict::Violated => ExitCode::from(EXIT_FINDING),
            })
        }
        EnumMode::Fuzz => {
            let r = reachability_fuzz(&spec, args.trials, args.seed)?;
            let verdict = if r.escapes.is_empty() { "CONSISTENT" } else { "VIOLATED" };
            let mut doc = json!({
                "version": SCHEMA_VERSION,
                "k": args.k,
                "ell": args.ell,
                "mode": "fuzz",
                "value": r.escapes.len(),
                "trials": r.trials,
                "seed": args.seed,
                "distinct": r.distinct,
                "closed_form": r.enumerated,
                "verdict": verdict,
                "duration_ms": elapsed(started),
            });
            let mut text = format!(
                "{verdict}: {} escapes in {} trials ({} distinct of {})\n",
                r.escapes.len(),
                r.trials,
                r.distinct,
                r.enumerated
            );
            if let Some(first) = r.escapes.first() {
                doc["witness"] = json!(first.permutation.as_slice());
                doc["plan"] = plan_json(&first.plan);
                for e in &r.escapes {
                    text.push_str(&format!("trial {} seed {}: {}\n{}", e.trial, e.seed, e.permutation, e.plan));
                }
            }
            emit(out, args.format, &doc, &text)?;
            Ok(if r.escapes.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FINDING)
            })
        }
    }
}

fn parse_values(tokens: &[String]) -> Result<Permutation, CliError> {
    Ok(tokens.join(" ").parse::<Permutation>()?)
}

fn cmd_analyze(out: &mut impl Write, args: AnalyzeArgs) -> CliResult {
    if args.format == Format::Csv {
        return Err(CliError::Usage("analyze supports text and json output".into()));
    }
    let perm = match &args.file {
        Some(path) => std::fs::read_to_string(path)?.parse::<Permutation>()?,
        None if args.values.is_empty() => return Err(CliError::Usage("no permutation given".into())),
        None => parse_values(&args.values)?,
    };
    let inv = inversions(&perm);
    let l = lds(&perm);
    let mut doc = json!({
        "version": SCHEMA_VERSION,
        "length": perm.len(),
        "inversions": inv,
        "lds": l,
    });
    let mut text = format!("inversions {inv}\nlds {l}\n");
    if let Some(tokens) = &args.pattern {
        let sigma = parse_values(tokens)?;
        match contains_pattern(&perm, &sigma)? {
            Some(positions) => {
                let one_based: Vec<usize> = positions.iter().map(|p| p + 1).collect();
                let shown = one_based.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ");
                text.push_str(&format!("contains {sigma} at positions {shown}\n"));
                doc["pattern"] = json!({"pattern": sigma.as_slice(), "contains": true, "positions": one_based});
            }
            None => {
                text.push_str(&format!("avoids {sigma}\n"));
                doc["pattern"] = json!({"pattern": sigma.as_slice(), "contains": false});
            }
        }
    }
    match args.format {
        Format::Json => writeln!(out, "{doc}")?,
        _ => write!(out, "{text}")?,
    }
    Ok(ExitCode::SUCCESS)
}
