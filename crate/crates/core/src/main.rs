use clap::{Args, Parser, Subcommand};
use spectral_shift::config::{preset, ExperimentConfig};
use spectral_shift::experiment::{Experiment, RunReport};
use spectral_shift::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Spectral shift function experiments: exit 0 pass, 1 check failure,
/// 2 config error, 3 solver failure.
#[derive(Parser)]
#[command(name = "ssf-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral shift function by the contour and determinant routes.
    Ssf(RunArgs),
    /// Partial-wave phase shifts and the total scattering phase.
    Phase(RunArgs),
    /// Cutoff excess charge and its R → ∞ limit.
    Excess(RunArgs),
    /// θ = ξ = Z_∞ comparison.
    FriedelCheck(RunArgs),
    /// Trace identity for a battery of test functions.
    KreinCheck(RunArgs),
    /// Weighted trace and boundary-limit probes.
    Probes(RunArgs),
    /// Merge earlier run directories into one report.
    Report {
        /// Run directories containing report.json.
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// KEY=VAL for a field of [tolerances]; repeatable.
    #[arg(long = "tolerance-override", value_name = "KEY=VAL")]
    overrides: Vec<String>,
}

fn load(args: &RunArgs) -> Result<ExperimentConfig, Error> {
    match (&args.config, &args.preset) {
        (Some(path), _) => ExperimentConfig::from_path(path, &args.overrides),
        (None, Some(name)) => preset(name)?.with_overrides(&args.overrides),
        (None, None) => ExperimentConfig::from_toml_str("", &[]),
    }
}

fn run(name: &str, args: &RunArgs) -> Result<i32, Error> {
    if args.threads > 0 {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build_global();
    }
    let exp = Experiment::new(load(args)?)?;
    let report = exp.run(name)?;
    let dir = args.out.clone().unwrap_or_else(|| exp.output_dir(name));
    report.write(&dir)?;
    std::fs::write(dir.join("config.toml"), exp.config.to_toml_string()?)?;
    print!("{}", report.text());
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Ssf(a) => run("ssf", a),
        Command::Phase(a) => run("phase", a),
        Command::Excess(a) => run("excess", a),
        Command::FriedelCheck(a) => run("friedel-check", a),
        Command::KreinCheck(a) => run("krein-check", a),
        Command::Probes(a) => run("probes", a),
        Command::Report { runs, out } => runs
            .iter()
            .map(|d| RunReport::read(d))
            .collect::<Result<Vec<_>, _>>()
            .and_then(|reports| {
                let merged = RunReport::merge(&reports);
                merged.write(out)?;
                print!("{}", merged.text());
                Ok(merged.exit_code())
            }),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
