use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use super::exact::exact_analyze;
use super::monte_carlo::{run_monte_carlo, RunConfig};
use super::output;
use crate::attacks::AttackKind;
use crate::protocol::{CheckBasis, CheckBasisPolicy, InitialPolicy, Scheme};
use crate::states::{verify_identities, InitialState};

#[derive(Debug, Parser)]
#[command(
    name = "wqsc",
    version,
    about = "W-state secure communication simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo simulation of many rounds
    Run(RunArgs),
    /// Exact error and leak rates by branch enumeration
    Exact(ExactArgs),
    /// Check the written state decompositions
    Identities(FormatArg),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    Present,
    Cao,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AttackArg {
    None,
    #[value(name = "ir-z")]
    IrZ,
    #[value(name = "ir-x")]
    IrX,
    Cnot,
    #[value(name = "cao-ir-z")]
    CaoIrZ,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InitArg {
    Random,
    Phi1,
    Phi2,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CheckBasisArg {
    Random,
    Z,
    X,
    Bell,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct FormatArg {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "present")]
    scheme: SchemeArg,
    #[arg(long, value_enum, default_value = "none")]
    attack: AttackArg,
    #[arg(long, default_value_t = 100_000)]
    rounds: u64,
    #[arg(long, default_value_t = 0.5)]
    check_fraction: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Initial-state policy (present scheme)
    #[arg(long, value_enum, default_value = "random")]
    init: InitArg,
    /// Check-basis policy (cao scheme)
    #[arg(long, value_enum, default_value = "random")]
    check_basis: CheckBasisArg,
    /// Normal quantile for the error-rate interval
    #[arg(long, default_value_t = 1.96)]
    z: f64,
    /// Flag runs whose error rate exceeds this value; statistics are unchanged
    #[arg(long)]
    threshold: Option<f64>,
    /// Count unknown guesses as 1/2 in eve_leak_rate
    #[arg(long)]
    unknown_as_half: bool,
    #[command(flatten)]
    format: FormatArg,
}

#[derive(Debug, Args)]
struct ExactArgs {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    #[arg(long, value_enum)]
    attack: AttackArg,
    #[command(flatten)]
    format: FormatArg,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Present => Scheme::Present,
            SchemeArg::Cao => Scheme::Cao,
        }
    }
}

impl From<AttackArg> for AttackKind {
    fn from(a: AttackArg) -> Self {
        match a {
            AttackArg::None => AttackKind::None,
            AttackArg::IrZ => AttackKind::InterceptResendZ,
            AttackArg::IrX => AttackKind::InterceptResendX,
            AttackArg::Cnot => AttackKind::CnotAncilla,
            AttackArg::CaoIrZ => AttackKind::CaoInterceptResendZ34,
        }
    }
}

impl From<InitArg> for InitialPolicy {
    fn from(i: InitArg) -> Self {
        match i {
            InitArg::Random => InitialPolicy::Random,
            InitArg::Phi1 => InitialPolicy::Fixed(InitialState::Phi1),
            InitArg::Phi2 => InitialPolicy::Fixed(InitialState::Phi2),
        }
    }
}

impl From<CheckBasisArg> for CheckBasisPolicy {
    fn from(b: CheckBasisArg) -> Self {
        match b {
            CheckBasisArg::Random => CheckBasisPolicy::Random,
            CheckBasisArg::Z => CheckBasisPolicy::Fixed(CheckBasis::Z),
            CheckBasisArg::X => CheckBasisPolicy::Fixed(CheckBasis::X),
            CheckBasisArg::Bell => CheckBasisPolicy::Fixed(CheckBasis::Bell),
        }
    }
}

/// Entry point of the `wqsc` binary.
///
/// Exit codes: 0 on success, 1 on a usage or configuration error, 2 when
/// `identities` finds a failing identity.
pub fn cli_main<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{shown}");
                    0
                }
                _ => {
                    let _ = write!(err, "{shown}");
                    1
                }
            };
        }
    };

    let (text, code) = match cli.command {
        Command::Run(a) => {
            let config = RunConfig {
                scheme: a.scheme.into(),
                attack: a.attack.into(),
                rounds: a.rounds,
                check_fraction: a.check_fraction,
                seed: a.seed,
                initial: a.init.into(),
                check_basis: a.check_basis.into(),
                z: a.z,
                threshold: a.threshold,
                unknown_as_half: a.unknown_as_half,
            };
            match run_monte_carlo(&config) {
                Ok(stats) => match a.format.format {
                    Format::Json => (output::stats_to_json(&stats), 0),
                    Format::Csv => (output::stats_to_csv(&stats), 0),
                },
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return 1;
                }
            }
        }
        Command::Exact(a) => match exact_analyze(a.scheme.into(), a.attack.into()) {
            Ok(result) => match a.format.format {
                Format::Json => (output::exact_to_json(&result), 0),
                Format::Csv => (output::exact_to_csv(&result), 0),
            },
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return 1;
            }
        },
        Command::Identities(f) => {
            let reports = verify_identities();
            let code = if reports.iter().all(|r| r.pass) { 0 } else { 2 };
            for r in reports.iter().filter(|r| !r.pass) {
                let _ = writeln!(
                    err,
                    "identity {} failed: deviation {:e}",
                    r.id, r.max_deviation
                );
            }
            let text = match f.format {
                Format::Json => output::identities_to_json(&reports),
                Format::Csv => output::identities_to_csv(&reports),
            };
            (text, code)
        }
    };
    if out.write_all(text.as_bytes()).is_err() {
        return 1;
    }
    code
}
