//! Command-line entry points. Exit codes: 0 success, 1 check failed,
//! 2 usage, input or precondition error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use super::document::{self, parse_ta, write_ta, write_tts, AUTOMATON_FORMAT, TTS_FORMAT};
use super::dot::export_dot_ta;
use super::generator::{generate_random_ta, GeneratorParams};
use crate::equivalence::{check_theorem, CheckConfig, EquivalenceError, Theorem};
use crate::semantics::{explore, ExploreConfig, SemanticsKind};
use crate::transforms::{inv_transform, pur_transform, urg_transform, TransformOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ta-urgency", version, about = "Timed-automaton invariant and urgency transformations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TransformKind {
    Inv,
    Urg,
    Pur,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SemanticsArg {
    Baseline,
    Weak,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Apply INV, URG or PUR to an automaton.
    Transform {
        #[arg(long)]
        kind: TransformKind,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
        /// Keep edges whose guard is unsatisfiable.
        #[arg(long)]
        no_prune_false: bool,
    },
    /// Explore the discretized transition system of an automaton.
    Explore {
        #[arg(long)]
        semantics: SemanticsArg,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        cap: Option<u32>,
        #[arg(long)]
        max_states: Option<usize>,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Check a transformation's correctness theorem on an automaton.
    Check {
        /// inv (alias 5.5), urg (alias 5.6) or pur.
        #[arg(long)]
        theorem: Theorem,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = crate::equivalence::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also search for an isomorphism without the witness.
        #[arg(long)]
        cross_check: bool,
    },
    /// Generate a random automaton.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        locations: usize,
        #[arg(long, default_value_t = 2)]
        clocks: usize,
        #[arg(long, default_value_t = 3)]
        max_const: u32,
        #[arg(long, default_value_t = 0.3)]
        edge_density: f64,
        #[arg(long, default_value_t = 0.2)]
        urgent_prob: f64,
        #[arg(long, default_value_t = 0.5)]
        violation_prob: f64,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Render an automaton or explored system as Graphviz DOT.
    ExportDot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Document { path: PathBuf, source: document::DocumentError },
    #[error("{0}")]
    Other(String),
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn load_ta(path: &Path) -> Result<crate::automata::TimedAutomaton, CliError> {
    parse_ta(&read(path)?).map_err(|source| CliError::Document { path: path.to_owned(), source })
}

/// Parses arguments and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Transform { kind, input, output, no_prune_false } => {
            let ta = load_ta(&input)?;
            let opts = TransformOptions { prune_false: !no_prune_false };
            let result = match kind {
                TransformKind::Inv => inv_transform(&ta, opts),
                TransformKind::Urg => urg_transform(&ta, opts),
                TransformKind::Pur => pur_transform(&ta),
            }
            .map_err(|e| CliError::Other(e.to_string()))?;
            write(&output, &write_ta(&result.automaton))?;
            for (fresh, orig) in &result.renaming {
                println!("copy {fresh} <- {orig}");
            }
            println!("pruned-edges: {}", result.pruned_edges);
            Ok(EXIT_OK)
        }
        Command::Explore { semantics, input, cap, max_states, output } => {
            let ta = load_ta(&input)?;
            let mut cfg = match cap {
                Some(c) => ExploreConfig::with_cap(c),
                None => ExploreConfig::for_automaton(&ta),
            };
            if let Some(m) = max_states {
                cfg.max_states = m;
            }
            let kind = match semantics {
                SemanticsArg::Baseline => SemanticsKind::Baseline,
                SemanticsArg::Weak => SemanticsKind::WeakInvariant,
            };
            let tts = explore(&ta, kind, &cfg).map_err(|e| CliError::Other(e.to_string()))?;
            write(&output, &write_tts(&tts))?;
            println!("states: {}", tts.len());
            println!("transitions: {}", tts.transition_count());
            println!("truncated: {}", tts.truncated);
            Ok(EXIT_OK)
        }
        Command::Check { theorem, input, samples, seed, cross_check } => {
            let ta = load_ta(&input)?;
            let cfg = CheckConfig { samples, seed, cross_check, ..Default::default() };
            match check_theorem(&ta, theorem, &cfg) {
                Ok(report) => {
                    print!("{report}");
                    Ok(if report.holds() { EXIT_OK } else { EXIT_FAILED })
                }
                Err(e @ EquivalenceError::Precondition(_)) => Err(CliError::Other(e.to_string())),
                Err(e) => Err(CliError::Other(format!("check could not run: {e}"))),
            }
        }
        Command::Gen { seed, locations, clocks, max_const, edge_density, urgent_prob, violation_prob, output } => {
            let params = GeneratorParams {
                seed,
                locations,
                clocks,
                max_constant: max_const,
                edge_density,
                urgent_probability: urgent_prob,
                initial_violation_probability: violation_prob,
            };
            let ta = generate_random_ta(&params).map_err(|e| CliError::Other(e.to_string()))?;
            write(&output, &write_ta(&ta))?;
            Ok(EXIT_OK)
        }
        Command::ExportDot { input, output } => {
            let text = read(&input)?;
            let doc_err = |source| CliError::Document { path: input.clone(), source };
            let dot = match document::document_format(&text).map_err(doc_err)?.as_str() {
                AUTOMATON_FORMAT => export_dot_ta(&parse_ta(&text).map_err(doc_err)?),
                TTS_FORMAT => {
                    let tts = document::parse_tts_document(&text).map_err(doc_err)?;
                    super::dot::export_dot_tts_document(&tts)
                }
                other => return Err(CliError::Other(format!("unknown document format `{other}`"))),
            };
            write(&output, &dot)?;
            Ok(EXIT_OK)
        }
    }
}
