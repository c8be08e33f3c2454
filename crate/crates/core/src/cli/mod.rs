//! The `entangprops` command-line front end.
//!
//! Every command loads its inputs, calls one library routine and wraps the
//! result in a [`Report`]. Exit codes: 0 on success (whatever the verdict),
//! 2 on input errors, 3 on internal consistency failures.

pub mod document;
pub mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::approx::{classify_separated_groups, LengthUnit, OrbitalModel, DEFAULT_DECAY_LENGTH_CM, DEFAULT_THRESHOLD_LOG10};
use crate::decomp::{schmidt_above, slater_above, takagi_above, DecompositionSummary};
use crate::error::{Error, Result};
use crate::hilbert::Statistics;
use crate::manybody::{detect_partition, opo_residual, support_overlap};
use crate::selftest;
use crate::tol::{Tolerances, OPO_TOL};
use crate::verdicts::{classify_pair, correlation_factorizes, property_report_with, PropertyLevel};

pub use document::{load_state, parse_document, StateDocument};
pub use report::{CommandEcho, Payload, Report};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_CONSISTENCY: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "entangprops", version, about = "Entanglement and objective properties of few-particle pure states")]
pub struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Numerical zero for ranks (default 1e-10).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a two-particle state is entangled.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Properties objectively possessed by one particle of a pair.
    Properties {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        slot: usize,
        /// Extra observable (JSON rows, or @file); repeatable.
        #[arg(long = "observable")]
        observables: Vec<String>,
    },
    /// Compare ⟨A⊗B⟩ with ⟨A⊗I⟩⟨I⊗B⟩.
    Correlate {
        #[arg(long = "in")]
        input: PathBuf,
        /// Observable on slot 0 (JSON rows, or @file).
        #[arg(long)]
        a: String,
        /// Observable on slot 1 (JSON rows, or @file).
        #[arg(long)]
        b: String,
    },
    /// Schmidt decomposition of a pair.
    Schmidt {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Slater decomposition of a fermion pair.
    Slater {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Takagi factorization of a boson pair.
    Takagi {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// One-particle orthogonality of two fermion states.
    Opo {
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        phi: PathBuf,
    },
    /// Look for two non-entangled subgroups of M and N−M fermions.
    Subgroup {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Overlap of exponentially decaying orbitals at a given separation.
    Overlap {
        /// Center separation.
        #[arg(long)]
        d: f64,
        /// Decay length (default 1e-8 cm, converted to --unit).
        #[arg(long)]
        a: Option<f64>,
        #[arg(long, default_value = "cm")]
        unit: LengthUnit,
        /// Cutoff on log10 of the overlap.
        #[arg(long, default_value_t = DEFAULT_THRESHOLD_LOG10, allow_hyphen_values = true)]
        threshold: f64,
    },
    /// Run the randomized property suites.
    Selftest {
        #[arg(long, env = "ENTANGPROPS_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Properties { .. } => "properties",
            Command::Correlate { .. } => "correlate",
            Command::Schmidt { .. } => "schmidt",
            Command::Slater { .. } => "slater",
            Command::Takagi { .. } => "takagi",
            Command::Opo { .. } => "opo",
            Command::Subgroup { .. } => "subgroup",
            Command::Overlap { .. } => "overlap",
            Command::Selftest { .. } => "selftest",
        }
    }
}

fn tolerances(cli: &Cli) -> Result<Tolerances> {
    match cli.tol {
        None => Ok(Tolerances::default()),
        Some(t) if t > 0.0 && t.is_finite() => Ok(Tolerances::with_rank(t)),
        Some(t) => Err(Error::InvalidArgument(format!("--tol must be positive, got {t}"))),
    }
}

/// Execute a parsed command.
pub fn run(cli: &Cli, arguments: Vec<String>) -> Result<Report> {
    let tol = tolerances(cli)?;
    let echo = CommandEcho { name: cli.command.name().into(), arguments };
    let mut diagnostics = BTreeMap::new();
    let payload = match &cli.command {
        Command::Classify { input } => {
            let state = load_state(input)?;
            let verdict = classify_pair(&state, &tol)?;
            let properties = match state.statistics() {
                Statistics::Distinguishable => Some(property_report_with(&state, 0, &[], &tol)?.level),
                _ if !verdict.entangled => Some(PropertyLevel::Complete),
                _ => None,
            };
            diagnostics = verdict.diagnostics.clone();
            Payload::Classification(report::ClassificationRecord::new(state.statistics().to_string(), &verdict, properties))
        }
        Command::Properties { input, slot, observables } => {
            let state = load_state(input)?;
            let obs = observables.iter().map(|o| document::load_matrix(o)).collect::<Result<Vec<_>>>()?;
            let r = property_report_with(&state, *slot, &obs, &tol)?;
            Payload::Properties((&r).into())
        }
        Command::Correlate { input, a, b } => {
            let state = load_state(input)?;
            let threshold = tol.rank;
            let c = correlation_factorizes(&state, &document::load_matrix(a)?, &document::load_matrix(b)?, threshold)?;
            Payload::Correlation(report::CorrelationRecord::new(&c, threshold))
        }
        Command::Schmidt { input } => Payload::Decomposition(DecompositionSummary::from(&schmidt_above(&load_state(input)?, tol.rank)?)),
        Command::Slater { input } => {
            let state = load_state(input)?;
            state_is(&state, Statistics::Fermion)?;
            Payload::Decomposition(DecompositionSummary::from(&slater_above(&state, tol.rank)?))
        }
        Command::Takagi { input } => {
            let state = load_state(input)?;
            state_is(&state, Statistics::Boson)?;
            Payload::Decomposition(DecompositionSummary::from(&takagi_above(&state, tol.rank)?))
        }
        Command::Opo { sigma, phi } => {
            let (s, f) = (load_state(sigma)?, load_state(phi)?);
            let residual = opo_residual(&s, &f)?;
            Payload::Opo(report::OpoRecord { residual, one_particle_orthogonal: residual < OPO_TOL, support_overlap: support_overlap(&s, &f)? })
        }
        Command::Subgroup { input, m } => {
            let state = load_state(input)?;
            let found = detect_partition(&state, *m)?;
            Payload::Subgroup(report::SubgroupRecord::new(*m, state.particles() - m, found.as_ref()))
        }
        Command::Overlap { d, a, unit, threshold } => {
            let a = a.unwrap_or(DEFAULT_DECAY_LENGTH_CM / unit.in_cm());
            let model = OrbitalModel::new(a, *d)?;
            let verdict = classify_separated_groups(&model, *threshold)?;
            diagnostics.insert("separation_over_decay_length".into(), model.ratio());
            Payload::Overlap(report::OverlapRecord { model, unit: unit.to_string(), verdict })
        }
        Command::Selftest { seed, trials } => {
            let r = selftest::run(*seed, *trials);
            if !r.passed() {
                let failed: Vec<&str> = r.suites.iter().filter(|s| !s.passed()).map(|s| s.name.as_str()).collect();
                return Err(Error::Consistency(format!("selftest failed: {}", failed.join(", "))));
            }
            Payload::Selftest(r)
        }
    };
    Ok(Report::new(echo, payload, diagnostics))
}

fn state_is(state: &crate::hilbert::StateVector, s: Statistics) -> Result<()> {
    if state.statistics() != s {
        return Err(Error::WrongStatistics { expected: s.to_string(), found: state.statistics().to_string() });
    }
    Ok(())
}

/// Exit code for a failed command.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Consistency(_) => EXIT_CONSISTENCY,
        _ => EXIT_INPUT,
    }
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    match run(&cli, args.into_iter().skip(1).collect()) {
        Ok(report) => {
            if cli.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.render_human());
            }
            ExitCode::from(EXIT_OK)
        }
        Err(e) => {
            let code = exit_code(&e);
            if cli.json {
                let body = serde_json::json!({ "error": e.to_string(), "exit_code": code });
                println!("{}", serde_json::to_string_pretty(&body).expect("plain JSON value"));
            }
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}
