//! `kentail` command-line front end.

mod commands;
mod selftest;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "kentail", version, about = "Bounded entailment, accuracy estimates and PAC error bounds")]
struct Cli {
    /// Worker threads for parallel trials (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output format. JSON is the stable interface; text is for people.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fraction of size-k fragments satisfying a theory.
    Q(commands::QArgs),
    /// Apply a masking process to an example.
    Mask(commands::MaskArgs),
    /// Literals of a target predicate derived from masked evidence.
    Infer(commands::InferArgs),
    /// Count false derived literals next to the worst-case bound.
    Errors(commands::ErrorsArgs),
    /// Evaluate one of the error or tail bounds.
    Bounds(commands::BoundsArgs),
    /// Write a scenario example to a file.
    Generate(commands::GenerateArgs),
    /// Run a PAC experiment from a config file.
    Experiment(commands::ExperimentArgs),
    /// Monte Carlo check of the tail bounds.
    Concentration(commands::ConcentrationArgs),
    /// Theory rewriting.
    Transform(TransformArgs),
    /// Run the built-in worked examples and print a pass/fail table.
    Selftest,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[command(subcommand)]
    command: TransformCommand,
}

#[derive(Subcommand, Debug)]
enum TransformCommand {
    /// Replace constants in a theory by auxiliary predicates.
    EliminateConstants(commands::EliminateArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("cannot configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let f = cli.format;
    let result = match cli.command {
        Command::Q(a) => commands::q(a, f),
        Command::Mask(a) => commands::mask(a),
        Command::Infer(a) => commands::infer(a, f),
        Command::Errors(a) => commands::errors(a, f),
        Command::Bounds(a) => commands::bounds(a, f),
        Command::Generate(a) => commands::generate(a, f),
        Command::Experiment(a) => commands::experiment(a, f),
        Command::Concentration(a) => commands::concentration(a, f),
        Command::Transform(TransformArgs {
            command: TransformCommand::EliminateConstants(a),
        }) => commands::eliminate_constants(a, f),
        Command::Selftest => selftest::run(f),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let doc = serde_json::json!({
                "schema_version": kentail::harness::SCHEMA_VERSION,
                "error": { "kind": e.kind(), "message": e.to_string() },
            });
            eprintln!("{doc}");
            ExitCode::from(1)
        }
    }
}
