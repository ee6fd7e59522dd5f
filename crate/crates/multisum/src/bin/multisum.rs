//! Command-line harness: verification campaigns, single-instance
//! evaluation, the residue self-test, and seeded instance generation.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use multisum::campaign::{eval_single, run_campaign, CampaignConfig};
use multisum::closed_form::{Mutation, RhsStrategy};
use multisum::instance::{random_instance, GenBounds, IdentityLabel, ProblemInstance, WeightKind};
use multisum::residue;

#[derive(Parser)]
#[command(
    name = "multisum",
    version,
    about = "Exact verification of generalized multi-sum Chu-Vandermonde identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification campaign over an exhaustive (a, c, n) grid
    /// crossed with seeded random weight vectors.
    Verify(VerifyArgs),
    /// Evaluate one instance file under one identity and print both sides.
    Eval(EvalArgs),
    /// Run the residue-engine property suites.
    ResidueSelftest(SelftestArgs),
    /// Generate a seeded random instance file.
    Gen(GenArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated identity labels (R1..R8, U1..U8); all 16 when omitted.
    #[arg(long, value_delimiter = ',')]
    identities: Option<Vec<IdentityLabel>>,
    /// Largest number of coordinates.
    #[arg(long, default_value_t = 2)]
    m_max: usize,
    /// Largest cap per coordinate.
    #[arg(long, default_value_t = 3)]
    a_max: u64,
    /// Weight field for the random vectors.
    #[arg(long, value_parser = parse_weight_kind, default_value = "gaussian")]
    weights: WeightKind,
    /// Campaign seed: reports are reproducible per seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seeded weight vectors per grid point.
    #[arg(long, default_value_t = 5)]
    random_count: usize,
    /// Comma-separated strategies (literal, moment, unrestricted).
    #[arg(long, value_delimiter = ',', value_parser = parse_strategy)]
    strategies: Option<Vec<RhsStrategy>>,
    /// Worker threads.
    #[arg(long, default_value_t = default_jobs())]
    jobs: usize,
    /// Write one record per line (plus a summary line) to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Corrupt one named closed-form coefficient to prove the harness can
    /// fail. See --mutate help in the README for the id catalog.
    #[arg(long, value_parser = parse_mutation)]
    mutate: Option<Mutation>,
}

#[derive(Args)]
struct EvalArgs {
    /// Instance file (JSON with fields m, n?, a, c, x, y?).
    #[arg(long)]
    instance: PathBuf,
    /// Identity label to evaluate.
    #[arg(long)]
    identity: IdentityLabel,
}

#[derive(Args)]
struct SelftestArgs {
    /// Truncation order for the series suites (>= 8).
    #[arg(long, default_value_t = 32)]
    order: usize,
    /// Corrupt one geometric closed-form coefficient (geom.s0..geom.s3).
    #[arg(long, value_parser = parse_mutation)]
    mutate: Option<Mutation>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    /// Output path for the instance file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 3)]
    m_max: usize,
    #[arg(long, default_value_t = 4)]
    a_max: u64,
    #[arg(long, value_parser = parse_weight_kind, default_value = "gaussian")]
    weights: WeightKind,
}

fn parse_weight_kind(s: &str) -> Result<WeightKind, String> {
    s.parse()
}

fn parse_strategy(s: &str) -> Result<RhsStrategy, String> {
    s.parse()
}

fn parse_mutation(s: &str) -> Result<Mutation, String> {
    s.parse()
}

fn default_jobs() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Verify(args) => verify(args),
        Command::Eval(args) => eval(args),
        Command::ResidueSelftest(args) => residue_selftest(args),
        Command::Gen(args) => gen(args),
    }
}

fn verify(args: VerifyArgs) -> ExitCode {
    let cfg = CampaignConfig {
        identities: args
            .identities
            .unwrap_or_else(|| IdentityLabel::ALL.to_vec()),
        m_max: args.m_max,
        a_max: args.a_max,
        weight_kind: args.weights,
        seed: args.seed,
        random_count: args.random_count,
        strategies: args.strategies.unwrap_or_else(|| {
            vec![
                RhsStrategy::Literal,
                RhsStrategy::MomentDecomposition,
                RhsStrategy::Unrestricted,
            ]
        }),
        jobs: args.jobs,
        mutation: args.mutate,
    };

    let mut sink: Option<BufWriter<File>> = match &args.out {
        Some(path) => match File::create(path) {
            Ok(f) => Some(BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: cannot open {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => None,
    };

    let summary = match run_campaign(&cfg, sink.as_mut().map(|w| w as &mut dyn Write)) {
        Ok(summary) => summary,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(mut w) = sink {
        if let Err(e) = w.flush() {
            eprintln!("error: flushing report: {e}");
            return ExitCode::from(2);
        }
    }

    println!(
        "records {}  evaluations {}  passes {}  mismatches {}  degenerate {} (total-ok {})  structural-errors {}",
        summary.records,
        summary.evaluations,
        summary.passes,
        summary.mismatches,
        summary.degenerate,
        summary.degenerate_total_ok,
        summary.structural_errors,
    );
    if summary.is_success() {
        println!("result: PASS");
        ExitCode::SUCCESS
    } else {
        println!("result: FAIL");
        ExitCode::FAILURE
    }
}

fn eval(args: EvalArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.instance) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.instance.display());
            return ExitCode::from(2);
        }
    };
    let inst: ProblemInstance = match serde_json::from_str(&text) {
        Ok(inst) => inst,
        Err(e) => {
            // serde_json reports line and column of the offending field
            eprintln!(
                "error: {} is not a valid instance: {e}",
                args.instance.display()
            );
            return ExitCode::from(2);
        }
    };
    let eval = match eval_single(&inst, args.identity) {
        Ok(eval) => eval,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    println!("identity {} on {}", eval.label, args.instance.display());
    println!(
        "zero-instance: {}",
        if eval.zero_instance { "yes" } else { "no" }
    );
    println!("lhs (oracle)   = {}", eval.lhs);
    for outcome in &eval.outcomes {
        let name = format!("{}", outcome.strategy);
        match (&outcome.value, outcome.degenerate) {
            (Some(value), _) => {
                let verdict = if outcome.matched == Some(true) {
                    "match"
                } else {
                    "MISMATCH"
                };
                println!("{name:<14} = {value}   {verdict}");
            }
            (None, true) => println!("{name:<14} = (degenerate denominator)"),
            (None, false) => println!(
                "{name:<14} = error: {}",
                outcome.error.as_deref().unwrap_or("unknown")
            ),
        }
    }
    println!("aggregates:");
    for (name, value) in &eval.aggregates {
        println!("  {name:<9} = {value}");
    }
    if eval.all_matched() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn residue_selftest(args: SelftestArgs) -> ExitCode {
    if args.order < 8 {
        eprintln!("error: --order must be at least 8");
        return ExitCode::from(2);
    }
    let report = residue::selftest(args.order, args.mutate.as_ref());
    for suite in &report.suites {
        println!(
            "{}: {} ({})",
            suite.name,
            if suite.passed { "PASS" } else { "FAIL" },
            suite.detail
        );
    }
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn gen(args: GenArgs) -> ExitCode {
    let bounds = GenBounds {
        m_max: args.m_max,
        a_max: args.a_max,
        weight_kind: args.weights,
    };
    let inst = random_instance(args.seed, &bounds);
    let json = serde_json::to_string_pretty(&inst).expect("instance serialization");
    if let Err(e) = std::fs::write(&args.out, json + "\n") {
        eprintln!("error: cannot write {}: {e}", args.out.display());
        return ExitCode::from(2);
    }
    println!("wrote {}", args.out.display());
    ExitCode::SUCCESS
}
