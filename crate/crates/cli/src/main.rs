use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use demforge_build::BuildConfig;
use demforge_cli::*;
use demforge_sensitivity::Granularity;

#[derive(Parser)]
#[command(name = "demforge", version, about = "Detector error models from non-Pauli noise models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Circuit file, or a fixture name (rep3, rep5, surface3, ampdamp-toy)
    #[arg(long)]
    circuit: String,
    /// YAML error model; omitted means noiseless
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Args)]
struct BuildFlags {
    #[arg(long, default_value_t = 1)]
    bch_order: usize,
    #[arg(long, default_value_t = 1)]
    zassenhaus_order: usize,
    /// leading, taylor2 or exact_s_only_plus_taylor2
    #[arg(long, default_value = "exact_s_only_plus_taylor2")]
    rate_mode: String,
    /// keep, clamp or reject
    #[arg(long, default_value = "keep")]
    negative_rates: String,
}

impl BuildFlags {
    fn config(&self) -> Result<BuildConfig, CliError> {
        Ok(BuildConfig {
            bch_order: self.bch_order,
            zassenhaus_order: self.zassenhaus_order,
            rate_mode: parse_rate_mode(&self.rate_mode)?,
            negative_rate_policy: parse_negative_policy(&self.negative_rates)?,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print a built-in circuit
    Fixture {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a DEM; the report goes to stderr
    Build {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        flags: BuildFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// DEM of the Pauli-twirled model
    Twirl {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the built and twirled DEMs against the exact oracle
    Validate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        flags: BuildFlags,
        /// Exit with status 2 when tvd_ours exceeds this
        #[arg(long)]
        max_tvd: Option<f64>,
        /// Comma-separated infidelity scale factors; reports TVD slopes
        #[arg(long, value_delimiter = ',')]
        sweep: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample detection histories from a DEM file or a circuit and model
    Sample {
        #[arg(long, conflicts_with = "circuit")]
        dem: Option<PathBuf>,
        #[arg(long)]
        circuit: Option<String>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[command(flatten)]
        flags: BuildFlags,
        #[arg(long)]
        shots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export a coherent-error sensitivity matrix
    Sensitivity {
        #[command(flatten)]
        input: Input,
        /// Detector product, e.g. "D0 D3"
        #[arg(long, group = "target")]
        expectation: Option<String>,
        /// DEM event, e.g. "D1 D2"
        #[arg(long, group = "target")]
        event: Option<String>,
        /// Probability that any detector fires
        #[arg(long, group = "target")]
        discard: bool,
        /// One parameter per gate location instead of per gate
        #[arg(long)]
        per_location: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Fixture { name, out } => emit(&cmd_fixture(&name)?, out.as_ref())?,
        Command::Build { input, flags, out } => {
            let ec = load_expanded(&input.circuit)?;
            let (dem, report) = cmd_build(&ec, &load_model(input.model.as_deref())?, &flags.config()?)?;
            eprint!("{report}");
            emit(&dem, out.as_ref())?;
        }
        Command::Twirl { input, out } => {
            let ec = load_expanded(&input.circuit)?;
            emit(&cmd_twirl(&ec, &load_model(input.model.as_deref())?)?, out.as_ref())?;
        }
        Command::Validate { input, flags, max_tvd, sweep, out } => {
            let ec = load_expanded(&input.circuit)?;
            let m = load_model(input.model.as_deref())?;
            let cfg = flags.config()?;
            let (text, worst) = if sweep.is_empty() {
                let r = cmd_validate(&ec, &m, &cfg)?;
                (r.to_text(), r.tvd_ours)
            } else {
                let r = cmd_sweep(&ec, &m, &cfg, &sweep)?;
                (r.to_text(), r.points.iter().map(|p| p.1).fold(0.0, f64::max))
            };
            emit(&text, out.as_ref())?;
            if max_tvd.is_some_and(|t| worst > t) {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Sample { dem, circuit, model, flags, shots, seed, out } => {
            let dem = match (dem, circuit) {
                (Some(p), _) => load_dem(&p)?,
                (None, Some(c)) => {
                    let ec = load_expanded(&c)?;
                    demforge_build::build_dem(&ec, &load_model(model.as_deref())?, &flags.config()?)?
                }
                (None, None) => return Err(CliError::Usage("sample needs --dem or --circuit".into())),
            };
            emit(&cmd_sample(&dem, shots, seed)?, out.as_ref())?;
        }
        Command::Sensitivity { input, expectation, event, discard, per_location, out } => {
            let ec = load_expanded(&input.circuit)?;
            let req = match (expectation, event, discard) {
                (Some(t), _, _) => SensitivityRequest::Expectation(t),
                (_, Some(t), _) => SensitivityRequest::Event(t),
                (_, _, true) => SensitivityRequest::Discard,
                _ => return Err(CliError::Usage("choose --expectation, --event or --discard".into())),
            };
            let g = if per_location { Granularity::PerLocation } else { Granularity::PerGate };
            emit(&cmd_sensitivity(&ec, &load_model(input.model.as_deref())?, &req, g)?, out.as_ref())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("DEMFORGE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
