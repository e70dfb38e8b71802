//! Command-line definition and resolution of the run configuration.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;
use crate::parse::parse_config_file;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

const AFTER_HELP: &str = "\
Grids: comma lists and inclusive ranges `start:stop:step`, e.g. `2:40:1` or `1,10`.
Complex values: `re`, `re+imi`, `r@phase` (radians).
Config files hold `key=value` lines using the long option names; options given
on the command line override the file.
Exit codes: 0 success, 2 usage error, 3 numerical-tolerance failure.";

/// Entangled-coherent-state experiments.
#[derive(Debug, Clone, Parser)]
#[command(name = "ecsim", version, after_help = AFTER_HELP, args_override_self = true)]
pub struct Cli {
    /// Master seed for Monte-Carlo experiments.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// File of `key=value` defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Kerr revival coefficients, closed form against the DFT oracle.
    Coefficients(CoefficientsArgs),
    /// Entanglement at the revival times tau/pi = 1/M.
    EntropySweep(EntropySweepArgs),
    /// Number-basis versus coherent-branch pipeline agreement.
    BackendsCheck(BackendsCheckArgs),
    /// Probabilistic teleportation: exact and sampled statistics.
    Teleport(TeleportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Coefficients(_) => "coefficients",
            Command::EntropySweep(_) => "entropy-sweep",
            Command::BackendsCheck(_) => "backends-check",
            Command::Teleport(_) => "teleport",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CoefficientsArgs {
    /// Largest order M.
    #[arg(long, default_value_t = 16)]
    pub m_max: usize,
}

#[derive(Debug, Clone, Args)]
pub struct EntropySweepArgs {
    /// Arm intensities |alpha|^2.
    #[arg(long, default_value = "1,10")]
    pub alpha_sq: String,
    /// Orders M (tau = pi/M).
    #[arg(long, default_value = "2:40:1")]
    pub orders: String,
}

#[derive(Debug, Clone, Args)]
pub struct BackendsCheckArgs {
    /// Input amplitudes beta (|beta|^2 <= 10).
    #[arg(long, default_value = "1")]
    pub beta: String,
    #[arg(long, default_value = "5")]
    pub orders: String,
    /// Minimum accepted fidelity between the pipelines.
    #[arg(long, default_value_t = 1.0 - 1e-8)]
    pub min_fidelity: f64,
    /// Largest accepted L-infinity change of the total photon-number distribution.
    #[arg(long, default_value_t = 1e-10)]
    pub max_distribution_diff: f64,
}

#[derive(Debug, Clone, Args)]
pub struct TeleportArgs {
    /// Even orders M.
    #[arg(long, default_value = "2")]
    pub orders: String,
    /// Coherent amplitudes alpha.
    #[arg(long, default_value = "3")]
    pub alpha: String,
    /// Input weights: `uniform`, `qubit` ((1,i)/sqrt2 on q=0,1), `basis:K`, or a complex list.
    #[arg(long, default_value = "qubit")]
    pub q: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Per-mode photon cap; derived from the amplitudes when absent.
    #[arg(long)]
    pub n_cap: Option<usize>,
    /// Count only dark H outputs as successes.
    #[arg(long, default_value_t = false)]
    pub h_only: bool,
}

const SUBCOMMANDS: [&str; 4] = [
    "coefficients",
    "entropy-sweep",
    "backends-check",
    "teleport",
];

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

fn subcommand_position(args: &[OsString]) -> Option<usize> {
    args.iter()
        .enumerate()
        .skip(1)
        .find(|(_, a)| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
        .map(|(i, _)| i)
}

/// Parses `args` after splicing in defaults from `--config`, so that options
/// given on the command line win.
pub fn parse_with_config<I, T>(args: I) -> std::result::Result<Cli, CliParseError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let Some(path) = config_path(&args) else {
        return Cli::try_parse_from(&args).map_err(CliParseError::Clap);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| {
        CliParseError::Cli(CliError::Usage(format!(
            "cannot read config {}: {e}",
            path.display()
        )))
    })?;
    let pairs = parse_config_file(&text).map_err(CliParseError::Cli)?;
    let file_args: Vec<OsString> = pairs
        .into_iter()
        .flat_map(|(k, v)| {
            if v.eq_ignore_ascii_case("true") && k == "h-only" {
                vec![OsString::from(format!("--{k}"))]
            } else {
                vec![OsString::from(format!("--{k}")), OsString::from(v)]
            }
        })
        .collect();
    let spliced = match subcommand_position(&args) {
        Some(pos) => {
            let mut v = args[..=pos].to_vec();
            v.extend(file_args);
            v.extend_from_slice(&args[pos + 1..]);
            v
        }
        None => args,
    };
    Cli::try_parse_from(&spliced).map_err(CliParseError::Clap)
}

#[derive(Debug)]
pub enum CliParseError {
    Clap(clap::Error),
    Cli(CliError),
}

/// Fully resolved configuration, echoed into every output file.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub cli: Cli,
}

impl RunConfig {
    pub fn new(cli: Cli) -> Self {
        Self { cli }
    }

    pub fn echo(&self) -> Vec<(String, String)> {
        let c = &self.cli;
        let mut out = vec![
            ("subcommand".to_owned(), c.command.name().to_owned()),
            ("seed".to_owned(), c.seed.to_string()),
            ("format".to_owned(), c.format.as_str().to_owned()),
        ];
        let mut push = |k: &str, v: String| out.push((k.to_owned(), v));
        match &c.command {
            Command::Coefficients(a) => push("m-max", a.m_max.to_string()),
            Command::EntropySweep(a) => {
                push("alpha-sq", a.alpha_sq.clone());
                push("orders", a.orders.clone());
            }
            Command::BackendsCheck(a) => {
                push("beta", a.beta.clone());
                push("orders", a.orders.clone());
                push("min-fidelity", format!("{:e}", a.min_fidelity));
                push(
                    "max-distribution-diff",
                    format!("{:e}", a.max_distribution_diff),
                );
            }
            Command::Teleport(a) => {
                push("orders", a.orders.clone());
                push("alpha", a.alpha.clone());
                push("q", a.q.clone());
                push("trials", a.trials.to_string());
                push(
                    "n-cap",
                    a.n_cap.map_or("auto".to_owned(), |n| n.to_string()),
                );
                push("h-only", a.h_only.to_string());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn global_flags_after_subcommand() {
        let cli =
            parse_with_config(["ecsim", "coefficients", "--m-max", "4", "--seed", "9"]).unwrap();
        assert_eq!(cli.seed, 9);
        let Command::Coefficients(a) = cli.command else {
            panic!()
        };
        assert_eq!(a.m_max, 4);
    }

    #[test]
    fn command_line_overrides_config_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "seed=5\ntrials=7\nalpha=2\nh-only=true").unwrap();
        let path = f.path().to_str().unwrap().to_owned();
        let cli =
            parse_with_config(["ecsim", "--config", &path, "teleport", "--trials", "11"]).unwrap();
        assert_eq!(cli.seed, 5);
        let Command::Teleport(a) = cli.command else {
            panic!()
        };
        assert_eq!(a.trials, 11);
        assert_eq!(a.alpha, "2");
        assert!(a.h_only);
    }

    #[test]
    fn unknown_config_key_is_usage_error() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "bogus=1").unwrap();
        let path = f.path().to_str().unwrap().to_owned();
        match parse_with_config(["ecsim", "teleport", "--config", &path]) {
            Err(CliParseError::Clap(e)) => assert_eq!(e.exit_code(), 2),
            other => panic!("{other:?}"),
        }
    }
}
