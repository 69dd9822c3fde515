use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use workbench::partition::{Options, Sub};
use workbench::{golden, partition, roundtrip};

#[derive(Parser)]
#[command(name = "chameleon", version, about = "Exact PL dynamics workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse an affine Markov partition file
    Partition {
        #[arg(value_enum)]
        action: Action,
        file: PathBuf,
        /// Derivation depth for tables, checks and enclosures
        #[arg(long)]
        depth: Option<u32>,
        /// Point at which to evaluate the conjugator
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Replay the worked examples against their recorded values
    PaperExamples {
        #[arg(long, value_delimiter = ',')]
        ids: Vec<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Recover random Thompson elements from their conjugates of doubling
    Roundtrip {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Action {
    Validate,
    Sigma,
    ConjugatorEval,
    EqualPairs,
    PlCriterion,
    DyadicStatus,
    CheckConjugacy,
}

impl From<Action> for Sub {
    fn from(a: Action) -> Sub {
        match a {
            Action::Validate => Sub::Validate,
            Action::Sigma => Sub::Sigma,
            Action::ConjugatorEval => Sub::ConjugatorEval,
            Action::EqualPairs => Sub::EqualPairs,
            Action::PlCriterion => Sub::PlCriterion,
            Action::DyadicStatus => Sub::DyadicStatus,
            Action::CheckConjugacy => Sub::CheckConjugacy,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let ((mut report, status), json) = match cli.command {
        Command::Partition { action, file, depth, at, json } => {
            (partition::run(action.into(), &file, &Options { depth, at }), json)
        }
        Command::PaperExamples { ids, json } => (golden::run(&ids), json),
        Command::Roundtrip { seed, count, json } => (roundtrip::run(seed, count), json),
    };
    report.wall_time = start.elapsed();
    if json {
        print!("{}", report.render_json());
    } else {
        print!("{}", report.render_text());
    }
    eprintln!("{} finished in {:.3}s", report.command, report.wall_time.as_secs_f64());
    ExitCode::from(status.code() as u8)
}
