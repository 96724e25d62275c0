//! `hypext`: build approximation graphs, check PQ-symmetry and extend maps.
//!
//! Exit status is 0 when every requested check passes, 1 when one fails
//! (the report, with witnesses, is still written) and 2 on bad input.

mod commands;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypext::EdgeRule;

use commands::{CliError, Output};

#[derive(Debug, Parser)]
#[command(
    name = "hypext",
    version,
    about = "Hyperbolic approximations and quasi-isometric extensions of finite metric spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the metric axioms of a space.
    Validate(Config),
    /// Build the approximation graph and export it.
    Build(Config),
    /// Hyperbolicity, structural lemmas and visual constants of the graph.
    Analyze(Config),
    /// Fit or check PQ-symmetry of a map and the diameter-ratio conversions.
    CheckPq(Config),
    /// Extend a map to the approximation graphs and check the extension.
    Extend(Config),
    /// Every stage for a (space, map, space) triple.
    Pipeline(Config),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EdgeRuleArg {
    Pointset,
    Distance,
}

impl From<EdgeRuleArg> for EdgeRule {
    fn from(e: EdgeRuleArg) -> Self {
        match e {
            EdgeRuleArg::Pointset => EdgeRule::Pointset,
            EdgeRuleArg::Distance => EdgeRule::Distance,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Config {
    /// Source space: CSV distance matrix or JSON.
    #[arg(long)]
    pub input: PathBuf,
    /// Map JSON {"pairs": [[src, dst], ...]}; defaults to matching labels.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Target space; defaults to the source.
    #[arg(long)]
    pub target: Option<PathBuf>,
    /// Scale parameter in (0, 1/6], as a decimal or a fraction.
    #[arg(long, default_value = "1/6", value_parser = parse_ratio)]
    pub r: f64,
    /// Deepest level to build, at least the truncation level.
    #[arg(long, allow_hyphen_values = true)]
    pub k_max: Option<i32>,
    #[arg(long, value_enum, default_value_t = EdgeRuleArg::Pointset)]
    pub edge_rule: EdgeRuleArg,
    /// Exponents tried when fitting PQ constants, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,1.5,2,2.5,3,3.5,4")]
    pub p_grid: Vec<f64>,
    /// Check these PQ constants instead of fitting q.
    #[arg(long)]
    pub q: Option<f64>,
    /// Override the exponent of the diameter-ratio constants.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for sampled sweeps on graphs too large to sweep exhaustively.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_ratio(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in {s:?}"))?;
            let den: f64 = den
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in {s:?}"))?;
            num / den
        }
        None => s
            .trim()
            .parse()
            .map_err(|_| format!("{s:?} is not a number"))?,
    };
    if value > 0.0 && value <= 1.0 / 6.0 {
        Ok(value)
    } else {
        Err(format!("r = {value} is outside (0, 1/6]"))
    }
}

fn emit(config: &Config, text: &str) -> Result<(), CliError> {
    match &config.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Validate(c) => commands::validate(c),
        Command::Build(c) => commands::build(c),
        Command::Analyze(c) => commands::analyze(c),
        Command::CheckPq(c) => commands::check_pq(c),
        Command::Extend(c) => commands::extend(c),
        Command::Pipeline(c) => commands::pipeline(c),
    }
}

fn config(cli: &Cli) -> &Config {
    match &cli.command {
        Command::Validate(c)
        | Command::Build(c)
        | Command::Analyze(c)
        | Command::CheckPq(c)
        | Command::Extend(c)
        | Command::Pipeline(c) => c,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        emit(config(&cli), &out.rendered)?;
        Ok(out.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let body = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{body}");
            ExitCode::from(2)
        }
    }
}
