//! `omlcause`: analyze finite event structures for correlations and
//! Reichenbachian common causes.
//!
//! Exit codes: 0 on success (including a not-closed verdict when it was not
//! demanded otherwise), 1 when a suite property fails, `--expect-closed` is
//! violated, or a decomposition reports a mathematical negative, 2 on usage,
//! parse, and validation errors. Output is a deterministic function of the
//! arguments; JSON is the default, tables sit behind `--pretty`.

mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use omlcause_core::causality::CorrelationWitness;
use omlcause_core::extend::{
    explain_in_extension, parse_split_table, verify_embedding, SplitTable,
};
use omlcause_core::greechie::{parse_diagram, paste};
use omlcause_core::lattice::{ElementId, Lattice};
use omlcause_core::ratio::parse_ratio;
use omlcause_core::states::{
    measure_from_atom_weights, measure_from_labeled_weights, parse_measure_file, q_decompose,
    random_state, Measure, QDecomposeError,
};
use omlcause_core::theorems::{
    has_failures, parse_suite_config, run_suite, SuiteConfig, PROPERTY_NAMES,
};

#[derive(Parser)]
#[command(
    name = "omlcause",
    version,
    about = "Correlations and common causes on finite orthomodular lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis: atoms, phi-atoms, correlations, common causes, closedness
    Analyze(AnalyzeArgs),
    /// Run the property suite over generated instances
    Theorems(TheoremsArgs),
    /// Split a measure at a phi-atom
    Qdecompose(QdecomposeArgs),
    /// Search a dyadic refinement for a hidden common cause
    Extend(ExtendArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct LatticeSource {
    /// Powerset algebra on comma-separated atom labels
    #[arg(long, value_name = "LABELS")]
    boolean: Option<String>,
    /// Horizontal sum of n four-element blocks
    #[arg(long, value_name = "N")]
    mo: Option<usize>,
    /// Greechie diagram file
    #[arg(long, value_name = "PATH")]
    greechie: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct MeasureSource {
    /// Comma-separated atom weights (rationals) in lattice atom order
    #[arg(long, value_name = "CSV")]
    weights: Option<String>,
    /// Measure file: `<atom> = <num>/<den>` per line
    #[arg(long, value_name = "PATH")]
    measure: Option<PathBuf>,
    /// Sample a faithful state deterministically from this seed
    #[arg(long, alias = "state-seed", value_name = "U64")]
    seed: Option<u64>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    lattice: LatticeSource,
    #[command(flatten)]
    measure: MeasureSource,
    /// Denominator bound for sampled states
    #[arg(long, default_value_t = 64)]
    bound: u32,
    /// Human-readable tables instead of JSON
    #[arg(long, conflicts_with = "json")]
    pretty: bool,
    /// JSON output (the default)
    #[arg(long)]
    json: bool,
    /// Exit 1 unless the space is common-cause closed
    #[arg(long)]
    expect_closed: bool,
}

#[derive(Args)]
struct TheoremsArgs {
    /// Suite config file (`key = value` lines); defaults apply when omitted
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// List property names without running
    #[arg(long)]
    list: bool,
    /// Human-readable lines instead of JSON
    #[arg(long, conflicts_with = "json")]
    pretty: bool,
    /// JSON output (the default)
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct QdecomposeArgs {
    #[command(flatten)]
    lattice: LatticeSource,
    #[command(flatten)]
    measure: MeasureSource,
    /// The phi-atom to split at
    #[arg(long, value_name = "LABEL")]
    atom: String,
    #[arg(long, default_value_t = 64)]
    bound: u32,
    #[arg(long, conflicts_with = "json")]
    pretty: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExtendArgs {
    #[command(flatten)]
    lattice: LatticeSource,
    #[command(flatten)]
    measure: MeasureSource,
    /// The correlated pair, as `<expr>,<expr>` with `|` for joins
    #[arg(long, value_name = "A,B")]
    pair: String,
    /// Refinement depth: every atom splits into 2^k parts
    #[arg(long, default_value_t = 1)]
    depth: u32,
    /// Split-weight table for non-uniform refinement
    #[arg(long, value_name = "PATH")]
    splits: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    bound: u32,
    #[arg(long, conflicts_with = "json")]
    pretty: bool,
    #[arg(long)]
    json: bool,
}

/// Errors that map to exit code 2.
struct UsageError(String);

fn usage<E: std::fmt::Display>(err: E) -> UsageError {
    UsageError(err.to_string())
}

fn build_lattice(source: &LatticeSource) -> Result<(Lattice, String), UsageError> {
    if let Some(labels) = &source.boolean {
        let names: Vec<&str> = labels
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        let lattice = Lattice::boolean(names).map_err(usage)?;
        return Ok((lattice, "boolean".to_string()));
    }
    if let Some(n) = source.mo {
        return Ok((Lattice::mo(n).map_err(usage)?, format!("mo[{n}]")));
    }
    if let Some(path) = &source.greechie {
        let text =
            fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        let diagram = parse_diagram(&text).map_err(usage)?;
        return Ok((paste(&diagram).map_err(usage)?, "greechie".to_string()));
    }
    Err(UsageError("missing lattice source".to_string()))
}

fn build_measure(
    lattice: &Lattice,
    source: &MeasureSource,
    bound: u32,
) -> Result<Measure, UsageError> {
    if let Some(csv) = &source.weights {
        let weights = csv
            .split(',')
            .map(parse_ratio)
            .collect::<Result<Vec<_>, _>>()
            .map_err(usage)?;
        return measure_from_atom_weights(lattice, weights).map_err(usage);
    }
    if let Some(path) = &source.measure {
        let text =
            fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        let entries = parse_measure_file(&text).map_err(usage)?;
        return measure_from_labeled_weights(lattice, &entries).map_err(usage);
    }
    if let Some(seed) = source.seed {
        return random_state(lattice, seed, bound).ok_or_else(|| {
            UsageError("no faithful state found within the sampling budget".into())
        });
    }
    Err(UsageError("missing measure source".to_string()))
}

fn load_splits(path: &Option<PathBuf>) -> Result<Option<SplitTable>, UsageError> {
    match path {
        None => Ok(None),
        Some(p) => {
            let text =
                fs::read_to_string(p).map_err(|e| UsageError(format!("{}: {e}", p.display())))?;
            Ok(Some(parse_split_table(&text).map_err(usage)?))
        }
    }
}

fn parse_pair(lattice: &Lattice, spec: &str) -> Result<(ElementId, ElementId), UsageError> {
    let (left, right) = spec
        .split_once(',')
        .ok_or_else(|| UsageError(format!("expected `<expr>,<expr>`, got `{spec}`")))?;
    let a = lattice.parse_element(left).map_err(usage)?;
    let b = lattice.parse_element(right).map_err(usage)?;
    Ok((a, b))
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<ExitCode, UsageError> {
    let (lattice, family) = build_lattice(&args.lattice)?;
    let measure = build_measure(&lattice, &args.measure, args.bound)?;
    let analysis = output::analyze(&lattice, &family, &measure);
    if args.pretty {
        print!("{}", analysis.to_pretty(&lattice, &measure));
    } else {
        println!("{}", analysis.to_json(&lattice, &measure));
    }
    if args.expect_closed && !analysis.closed() {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_theorems(args: &TheoremsArgs) -> Result<ExitCode, UsageError> {
    if args.list {
        for name in PROPERTY_NAMES {
            println!("{name}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let config = match &args.config {
        None => SuiteConfig::default(),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            parse_suite_config(&text).map_err(usage)?
        }
    };
    let reports = run_suite(&config);
    for report in &reports {
        if args.pretty {
            println!(
                "{:<28} {:<32} {}{}",
                report.property,
                report.instance,
                report.verdict.as_str(),
                report
                    .detail
                    .as_ref()
                    .map(|d| format!("  ({d})"))
                    .unwrap_or_default()
            );
        } else {
            println!("{}", report.to_json());
        }
    }
    if has_failures(&reports) {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_qdecompose(args: &QdecomposeArgs) -> Result<ExitCode, UsageError> {
    let (lattice, _) = build_lattice(&args.lattice)?;
    let measure = build_measure(&lattice, &args.measure, args.bound)?;
    let q = lattice
        .element_by_name(&args.atom)
        .ok_or_else(|| UsageError(format!("unknown element `{}`", args.atom)))?;
    match q_decompose(&lattice, &measure, q) {
        Ok(d) => {
            if args.pretty {
                print!("{}", output::qdecomposition_pretty(&lattice, &d));
            } else {
                println!("{}", output::qdecomposition_json(&lattice, &d));
            }
            Ok(ExitCode::SUCCESS)
        }
        // Bad input: the named element is not a phi-atom.
        Err(err @ QDecomposeError::NotPhiAtom(_)) => Err(usage(err)),
        // Mathematical negative: the cut tables are not measures here.
        Err(err) => {
            eprintln!("omlcause: {err}");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_extend(args: &ExtendArgs) -> Result<ExitCode, UsageError> {
    let (lattice, _) = build_lattice(&args.lattice)?;
    let measure = build_measure(&lattice, &args.measure, args.bound)?;
    let (a, b) = parse_pair(&lattice, &args.pair)?;
    let (a, b) = if a.0 <= b.0 { (a, b) } else { (b, a) };
    let witness = CorrelationWitness {
        a,
        b,
        lhs: measure.value(lattice.meet(a, b)),
        rhs: measure.value(a) * measure.value(b),
    };
    let splits = load_splits(&args.splits)?;
    // Precondition failures (uncorrelated or already-explained pairs) are
    // usage errors per the exit-code contract.
    let outcome = explain_in_extension(&lattice, &measure, &witness, args.depth, splits.as_ref())
        .map_err(usage)?;
    verify_embedding(
        &outcome.refinement.embedding,
        &measure,
        &outcome.refinement.refined,
    )
    .map_err(usage)?;
    if args.pretty {
        print!("{}", output::extension_pretty(&outcome, args.depth));
    } else {
        println!("{}", output::extension_json(&outcome, args.depth));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Theorems(args) => cmd_theorems(args),
        Command::Qdecompose(args) => cmd_qdecompose(args),
        Command::Extend(args) => cmd_extend(args),
    };
    match result {
        Ok(code) => code,
        Err(UsageError(message)) => {
            eprintln!("omlcause: {message}");
            ExitCode::from(2)
        }
    }
}
